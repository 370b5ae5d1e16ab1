"""Parameter search and scaling analysis on top of the metrics engine.

Provides the 1-D measurement-angle optimizer, the closed-form and numeric
optimal amplification for the local perturbation, a deterministic grid sweep
used by the CLI, and least-squares fitting of scaling exponents versus chain
length.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import metrics, model
from .errors import DomainError

# Parameters a sweep may vary.  "A" is the amplification factor: it maps to
# (w, delta) = (J cosh A, J sinh A) at the base configuration's J, so an
# A-axis sweeps eta = exp(A(N-1)) without touching the effective hopping.
AXIS_NAMES = ("theta", "phi", "varphi", "m", "N", "A", "epsilon")

_INVGOLD = (math.sqrt(5.0) - 1.0) / 2.0  # 1/golden ratio


@dataclass(frozen=True)
class SweepGrid:
    """Axis-major cartesian grid over a base configuration.

    axes is an ordered sequence of (name, values) with name in AXIS_NAMES;
    the first axis varies slowest.  base is a flat mapping using the CLI
    config field names (missing entries take the documented defaults).
    """

    axes: tuple
    base: dict


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of ln(value) against N."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int


def evaluate_config(cfg: dict) -> metrics.SensingReport:
    """Resolve a flat config mapping and run the full report."""
    resolved = model.resolve_config(cfg)
    chain, drive, pert, homodyne = model.setup_from_config(resolved)
    return metrics.snr_report(chain, drive, pert, homodyne, resolved["regime"])


# ---------------------------------------------------------------------------
# measurement-angle optimization
# ---------------------------------------------------------------------------

def _golden_max(f, a: float, b: float, tol: float = 1e-6):
    """Golden-section maximization of f on [a, b]; ties keep the left point."""
    c = b - _INVGOLD * (b - a)
    d = a + _INVGOLD * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVGOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVGOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def best_measurement_angle(
    chain: model.ChainParams,
    drive: model.DriveSpec,
    pert: model.PerturbationSpec,
    tau: float,
    grid_size: int = 91,
    regime: str = metrics.LINEAR,
):
    """Maximize snr_per_photon over the homodyne angle phi in [0, pi/2].

    Coarse grid of grid_size points followed by golden-section refinement to
    1e-6; ties break toward smaller phi.  Returns (phi_star, value).
    """
    if grid_size < 3:
        raise DomainError("grid_size must be >= 3")

    def objective(phi: float) -> float:
        hom = model.HomodyneSpec(phi=phi, tau=tau)
        return metrics.snr_report(chain, drive, pert, hom, regime).snr_per_photon

    grid = np.linspace(0.0, math.pi / 2.0, grid_size)
    values = [objective(p) for p in grid]
    i_best = int(np.argmax(values))  # first maximum -> smaller phi on ties
    lo = grid[max(i_best - 1, 0)]
    hi = grid[min(i_best + 1, grid_size - 1)]
    phi_ref, val_ref = _golden_max(objective, lo, hi)

    # keep whichever of (refined, coarse best) wins; prefer smaller phi on ties
    candidates = [(val_ref, phi_ref), (values[i_best], grid[i_best])]
    candidates.sort(key=lambda t: (-t[0], t[1]))
    best_val, best_phi = candidates[0]
    return float(best_phi), float(best_val)


# ---------------------------------------------------------------------------
# optimal amplification for the local perturbation
# ---------------------------------------------------------------------------

def optimal_eta_vn(kappa: float, epsilon0: float) -> float:
    """Closed-form optimal eta = (kappa^2 / 8 eps0^2)^(1/4), for 0 < eps0 < kappa."""
    if not 0.0 < epsilon0 < kappa:
        raise DomainError("optimal eta requires 0 < epsilon0 < kappa")
    return (kappa**2 / (8.0 * epsilon0**2)) ** 0.25


def best_amplification(
    base: dict,
    lo: float = 1.0,
    hi: float = 1.0e3,
    grid_size: int = 61,
):
    """Numerically maximize snr_per_photon over eta = exp(A(N-1)).

    Log-spaced coarse grid over [lo, hi] followed by golden-section in
    ln(eta) to relative 1e-6.  base is a flat config mapping (the regime,
    perturbation, drive, and measurement angle all come from it).
    Returns (eta_star, value).
    """
    resolved = model.resolve_config(base)
    n_sites = int(resolved["N"])
    J = math.sqrt(resolved["w"] ** 2 - resolved["delta"] ** 2)

    def objective(log_eta: float) -> float:
        A = log_eta / (n_sites - 1)
        cfg = dict(resolved)
        cfg["w"] = J * math.cosh(A)
        cfg["delta"] = J * math.sinh(A)
        return evaluate_config(cfg).snr_per_photon

    lgrid = np.linspace(math.log(lo), math.log(hi), grid_size)
    values = [objective(g) for g in lgrid]
    i_best = int(np.argmax(values))
    a = lgrid[max(i_best - 1, 0)]
    b = lgrid[min(i_best + 1, grid_size - 1)]
    log_ref, val_ref = _golden_max(objective, a, b, tol=1e-6)
    if values[i_best] > val_ref:
        log_ref, val_ref = lgrid[i_best], values[i_best]
    return float(math.exp(log_ref)), float(val_ref)


# ---------------------------------------------------------------------------
# grid sweep
# ---------------------------------------------------------------------------

METRIC_FIELDS = (
    "signal", "noise", "n_tot", "n_tot_dominant",
    "snr", "snr_per_photon", "snr_per_photon_dominant",
)

# Errors recorded per grid point rather than aborting the sweep.
_POINT_ERRORS = (ValueError, ArithmeticError, RuntimeError)


def _point_config(resolved_base: dict, names, combo) -> dict:
    """Apply one axis combination to the base configuration."""
    cfg = dict(resolved_base)
    for name, value in zip(names, combo):
        if name == "A":
            J = math.sqrt(cfg["w"] ** 2 - cfg["delta"] ** 2)
            cfg["w"] = J * math.cosh(value)
            cfg["delta"] = J * math.sinh(value)
        elif name in ("N", "m"):
            cfg[name] = int(value)
        else:
            cfg[name] = float(value)
    if cfg["m"] == "last":
        cfg["m"] = int(cfg["N"])
    return cfg


def sweep(grid: SweepGrid) -> list:
    """Evaluate every grid point in deterministic axis-major order.

    Returns one row per point: the resolved config fields plus the report
    metrics, and an "error" key holding the exception class name when the
    point failed validation or evaluation (empty string otherwise).
    """
    for name, values in grid.axes:
        if name not in AXIS_NAMES:
            raise DomainError(f"unknown sweep axis {name!r}; expected one of {AXIS_NAMES}")
        if len(values) == 0:
            raise DomainError(f"sweep axis {name!r} has no values")
    # m may be the sentinel "last" here; it resolves to N per grid point.
    resolved_base = model.resolve_config(dict(grid.base))

    names = [name for name, _ in grid.axes]
    value_lists = [list(values) for _, values in grid.axes]
    rows = []
    for combo in itertools.product(*value_lists):
        cfg = _point_config(resolved_base, names, combo)
        row = {k: cfg[k] for k in model.CONFIG_FIELDS}
        try:
            report = evaluate_config(cfg)
        except _POINT_ERRORS as exc:
            for k in METRIC_FIELDS:
                row[k] = None
            row["error"] = type(exc).__name__
        else:
            for k in METRIC_FIELDS:
                row[k] = getattr(report, k)
            row["error"] = ""
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# scaling-exponent fit
# ---------------------------------------------------------------------------

def fit_scaling_exponent(points) -> FitResult:
    """Least-squares fit of ln(value) versus N.

    points is a sequence of (N, value) pairs with at least three entries and
    strictly positive values.  A zero-variance data set fits slope 0 with
    r_squared defined as 1.
    """
    pts = list(points)
    if len(pts) < 3:
        raise DomainError("scaling fit needs at least 3 points")
    x = np.array([float(n) for n, _ in pts])
    vals = np.array([float(v) for _, v in pts])
    if np.any(vals <= 0.0):
        raise DomainError("scaling fit requires positive values")
    y = np.log(vals)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r2 = min(1.0, max(0.0, r2))
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        n_points=len(pts),
    )
