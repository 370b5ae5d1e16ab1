"""Validated configuration types shared by every other module.

A sensor instance is described by four small immutable records:

* :class:`ChainParams`  -- lattice geometry and rates, plus the derived
  effective hopping J and amplification factor A,
* :class:`DriveSpec`    -- coherent drive amplitude/phase, injection site,
  and thermal occupation of the input field,
* :class:`PerturbationSpec` -- which perturbation is switched on
  (boundary tunneling or a local detuning at the far end) and how strongly,
* :class:`HomodyneSpec` -- measurement angle and integration time.

All angles are radians.  Construction validates; downstream code assumes
validated inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Perturbation kinds.  NHSE couples the two ends of the chain (boundary
# tunneling, phase varphi); LOCALN detunes the last site.
NHSE = "nhse"
LOCALN = "localn"
_KINDS = (NHSE, LOCALN)

# Largest exponent used anywhere downstream is exp(4*A*(N-1)) (the squeezed
# noise term), so 4*A*(N-1) must stay comfortably inside double range.
_EXPONENT_BOUND = 600.0

TWO_PI = 2.0 * math.pi


def _wrap_angle(x: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    x = math.fmod(float(x), TWO_PI)
    if x < 0.0:
        x += TWO_PI
    return x


@dataclass(frozen=True)
class ChainParams:
    """Chain of N sites with hopping w, two-photon drive delta, damping kappa.

    J = sqrt(w**2 - delta**2) and A = 0.5*ln((w+delta)/(w-delta)) are stored
    alongside the raw rates; e**(2A) is the per-site gain of the two chiral
    lattices.
    """

    N: int
    w: float
    delta: float
    kappa: float
    J: float
    A: float


@dataclass(frozen=True)
class DriveSpec:
    """Coherent drive |beta|*e^(i*theta) injected at (odd) site m.

    n_th is the thermal occupation of the input field entering through the
    same port.
    """

    beta_abs: float
    theta: float
    m: int
    n_th: float = 0.0

    def __post_init__(self):
        if self.beta_abs <= 0.0:
            raise DomainError("drive amplitude beta_abs must be > 0")
        if not isinstance(self.m, int) or self.m < 1 or self.m % 2 == 0:
            raise DomainError("injection site m must be a positive odd integer")
        if self.n_th < 0.0:
            raise DomainError("thermal occupation n_th must be >= 0")
        object.__setattr__(self, "theta", _wrap_angle(self.theta))


@dataclass(frozen=True)
class PerturbationSpec:
    """Perturbation selector: kind NHSE (boundary tunneling with phase
    varphi) or LOCALN (detuning of the last site; varphi is ignored and
    stored as 0)."""

    kind: str
    epsilon: float
    varphi: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"perturbation kind must be one of {_KINDS}")
        if self.epsilon < 0.0:
            raise DomainError("perturbation strength epsilon must be >= 0")
        varphi = _wrap_angle(self.varphi) if self.kind == NHSE else 0.0
        object.__setattr__(self, "varphi", varphi)


@dataclass(frozen=True)
class HomodyneSpec:
    """Measurement angle phi in [0, pi/2] and integration time tau > 0."""

    phi: float
    tau: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.phi <= math.pi / 2.0:
            raise DomainError("measurement angle phi must lie in [0, pi/2]")
        if self.tau <= 0.0:
            raise DomainError("integration time tau must be > 0")


def derive_params(N: int, w: float, delta: float, kappa: float) -> ChainParams:
    """Validate raw rates and derive (J, A).

    J = sqrt(w**2 - delta**2),  A = 0.5*ln((w+delta)/(w-delta)).

    Raises DomainError for even/short N or rates outside w > delta >= 0,
    kappa > 0, and OverflowError when 4*A*(N-1) > 600 (some required
    exp(k*A*(N-1)) factor would not be representable).
    """
    if not isinstance(N, int) or isinstance(N, bool):
        raise DomainError("site count N must be an integer")
    if N % 2 == 0 or N < 3:
        raise DomainError("site count N must be odd and >= 3")
    w = float(w)
    delta = float(delta)
    kappa = float(kappa)
    if delta < 0.0:
        raise DomainError("two-photon drive delta must be >= 0")
    if w <= delta:
        raise DomainError("hopping w must exceed delta (w > delta >= 0)")
    if kappa <= 0.0:
        raise DomainError("damping kappa must be > 0")

    J = math.sqrt((w - delta) * (w + delta))
    A = 0.5 * math.log((w + delta) / (w - delta))
    if 4.0 * A * (N - 1) > _EXPONENT_BOUND:
        raise OverflowError(
            "4*A*(N-1) exceeds 600; exponential factors would overflow doubles"
        )
    return ChainParams(N=N, w=w, delta=delta, kappa=kappa, J=J, A=A)


def chain_from_gain(N: int, J: float, A: float, kappa: float) -> ChainParams:
    """Build ChainParams from (J, A) instead of (w, delta).

    Convenience inverse of derive_params: w = J*cosh(A), delta = J*sinh(A).
    """
    return derive_params(N, float(J) * math.cosh(A), float(J) * math.sinh(A), kappa)


def amplification_eta(chain: ChainParams) -> float:
    """End-to-end amplitude amplification eta = exp(A*(N-1))."""
    return math.exp(chain.A * (chain.N - 1))


def check_site(chain: ChainParams, m: int) -> int:
    """Validate a site index against the chain (odd, 1 <= m <= N)."""
    if not isinstance(m, int) or m < 1 or m % 2 == 0:
        raise DomainError("site m must be a positive odd integer")
    if m > chain.N:
        raise DomainError(f"site m={m} exceeds chain length N={chain.N}")
    return m


# ---------------------------------------------------------------------------
# Flat-mapping construction (shared by the CLI config and parameter sweeps)
# ---------------------------------------------------------------------------

# Field order is also the CSV column order used by the CLI.
CONFIG_FIELDS = (
    "N", "w", "delta", "kappa", "theta", "m", "beta", "nth",
    "pert", "epsilon", "varphi", "phi", "tau", "regime",
)

CONFIG_DEFAULTS = {
    "N": 3,
    "w": 1.0,
    "delta": 0.0,
    "kappa": 1.0,
    "theta": 0.0,
    "m": 1,
    "beta": 1.0e3,
    "nth": 0.0,
    "pert": NHSE,
    "epsilon": None,   # resolved per regime: 1e-8 linear, 1e-3 beyond
    "varphi": 0.0,
    "phi": 0.0,
    "tau": 1.0,
    "regime": "linear",
}

REGIMES = ("linear", "beyond")
_EPSILON_DEFAULTS = {"linear": 1.0e-8, "beyond": 1.0e-3}


def resolve_config(values: dict) -> dict:
    """Fill defaults and normalize a flat configuration mapping.

    Unknown keys raise DomainError so config typos surface immediately.
    """
    unknown = set(values) - set(CONFIG_FIELDS)
    if unknown:
        raise DomainError(f"unknown configuration fields: {sorted(unknown)}")
    cfg = dict(CONFIG_DEFAULTS)
    cfg.update({k: v for k, v in values.items() if v is not None})
    if cfg["regime"] not in REGIMES:
        raise DomainError(f"regime must be one of {REGIMES}")
    if cfg["epsilon"] is None:
        cfg["epsilon"] = _EPSILON_DEFAULTS[cfg["regime"]] * float(cfg["kappa"])
    return cfg


def setup_from_config(cfg: dict):
    """Construct (chain, drive, pert, homodyne) from a resolved mapping."""
    cfg = dict(cfg)
    if cfg["m"] == "last":
        cfg["m"] = cfg["N"]
    for key in ("N", "m"):
        v = cfg[key]
        try:
            ok = float(v).is_integer()
        except (TypeError, ValueError):
            ok = False
        if not ok:
            raise DomainError(f"{key} must be an integer, got {v!r}")
    chain = derive_params(int(cfg["N"]), cfg["w"], cfg["delta"], cfg["kappa"])
    drive = DriveSpec(
        beta_abs=float(cfg["beta"]),
        theta=float(cfg["theta"]),
        m=check_site(chain, int(cfg["m"])),
        n_th=float(cfg["nth"]),
    )
    pert = PerturbationSpec(
        kind=str(cfg["pert"]),
        epsilon=float(cfg["epsilon"]),
        varphi=float(cfg["varphi"]),
    )
    homodyne = HomodyneSpec(phi=float(cfg["phi"]), tau=float(cfg["tau"]))
    return chain, drive, pert, homodyne
