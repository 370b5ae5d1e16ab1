"""Command-line front end: reports, sweeps, and scaling fits.

Three subcommands:

* ``report``  -- evaluate one configuration, print a flat JSON object (or a
  one-row CSV with --format csv),
* ``sweep``   -- evaluate a cartesian grid (``--axis name=v1,v2,...`` or
  ``--axis name=log:lo:hi:count``) or a named preset, print CSV rows,
* ``scaling`` -- fit the exponent of snr_per_photon_dominant versus N for one
  of the named cases and print the fit next to its theoretical target.

Configuration comes from defaults, then an optional ``--config`` JSON file,
then individual flags, in that order.  Exit codes: 0 ok, 2 invalid
configuration, 3 numerical failure, 4 I/O failure.

Output is byte-deterministic: floats are printed with 17 significant digits,
columns have a fixed order, and lines end with a bare newline.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

import numpy as np

from . import model, optimize
from .errors import (
    DegenerateError,
    DivergenceError,
    DomainError,
    SingularError,
    StepSizeError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

METRIC_FIELDS = optimize.METRIC_FIELDS
CSV_COLUMNS = model.CONFIG_FIELDS + METRIC_FIELDS + ("error",)

_NUMERICAL_ERRORS = ("SingularError", "DegenerateError", "DivergenceError")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Flat run configuration mirroring the JSON schema.

    Field names are exactly the accepted JSON keys; unknown keys are a
    validation error.  ``m`` may be the sentinel string "last" (resolved to
    N), and ``epsilon`` may be None (resolved per regime).
    """

    N: int = None
    w: float = None
    delta: float = None
    kappa: float = None
    theta: float = None
    m: object = None
    beta: float = None
    nth: float = None
    pert: str = None
    epsilon: float = None
    varphi: float = None
    phi: float = None
    tau: float = None
    regime: str = None
    out: str = None
    format: str = None

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - allowed
        if unknown:
            raise DomainError(f"unknown configuration fields: {sorted(unknown)}")
        return cls(**data)

    def flat(self) -> dict:
        """The model-facing fields (everything except out/format), skipping None."""
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("format")
        return {k: v for k, v in d.items() if v is not None}


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_HALF_PI = math.pi / 2.0
_A_SCALING = 1.5
_SCALING_N = (3, 5, 7, 9)

# The eight linear-response cases: drive quadrature theta, injection site,
# homodyne angle, perturbation kind/phase, and the predicted exponent of
# snr_per_photon_dominant as a multiple of A.
SCALING_CASES = {
    "fig2a": dict(pert="nhse", varphi=_HALF_PI, theta=0.0, m=1, phi=0.0, factor=0.0),
    "fig2b": dict(pert="nhse", varphi=_HALF_PI, theta=0.0, m="last", phi=0.0, factor=2.0),
    "fig2c": dict(pert="nhse", varphi=_HALF_PI, theta=_HALF_PI, m=1, phi=_HALF_PI, factor=2.0),
    "fig2d": dict(pert="nhse", varphi=_HALF_PI, theta=_HALF_PI, m="last", phi=_HALF_PI, factor=0.0),
    "fig3a": dict(pert="localn", varphi=0.0, theta=0.0, m=1, phi=_HALF_PI, factor=2.0),
    "fig3b": dict(pert="localn", varphi=0.0, theta=0.0, m="last", phi=_HALF_PI, factor=0.0),
    "fig3c": dict(pert="localn", varphi=0.0, theta=_HALF_PI, m=1, phi=0.0, factor=-4.0),
    "fig3d": dict(pert="localn", varphi=0.0, theta=_HALF_PI, m="last", phi=0.0, factor=-2.0),
}


def _case_base(name: str, A: float) -> dict:
    case = SCALING_CASES[name]
    return {
        "w": math.cosh(A),
        "delta": math.sinh(A),
        "pert": case["pert"],
        "varphi": case["varphi"],
        "theta": case["theta"],
        "m": case["m"],
        "phi": case["phi"],
        "regime": "linear",
    }


def _eta_axis() -> list:
    # eta = exp(A(N-1)) from 1 to 1e3, 61 points log-spaced, at N = 3
    return list(np.linspace(0.0, math.log(1.0e3) / 2.0, 61))


def sweep_preset(name: str):
    """(base config, axes) for a named sweep preset."""
    if name in SCALING_CASES:
        return _case_base(name, _A_SCALING), [("N", list(_SCALING_N))]
    if name == "figure4a":
        base = {
            "N": 3, "pert": "localn", "theta": 0.0, "m": 1,
            "phi": _HALF_PI, "regime": "beyond",
        }
        return base, [("A", _eta_axis())]
    if name == "figure4b":
        base = {
            "N": 3, "pert": "nhse", "varphi": _HALF_PI, "theta": 0.0,
            "m": "last", "phi": 0.0, "regime": "beyond",
        }
        return base, [("A", _eta_axis())]
    raise DomainError(
        f"unknown preset {name!r}; expected one of "
        f"{sorted(SCALING_CASES) + ['figure4a', 'figure4b']}"
    )


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row.get(col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def _jsonable(row: dict) -> dict:
    out = {}
    for col in CSV_COLUMNS:
        v = row.get(col)
        if isinstance(v, np.integer):
            v = int(v)
        elif isinstance(v, np.floating):
            v = float(v)
        out[col] = v
    return out


def rows_to_json(rows, single: bool = False) -> str:
    payload = _jsonable(rows[0]) if single else [_jsonable(r) for r in rows]
    return json.dumps(payload, indent=2) + "\n"


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------

_FLAG_FIELDS = model.CONFIG_FIELDS  # every config field has a flag of the same name


def _site_flag(text: str):
    if text == "last":
        return "last"
    return int(text)


def _gather_config(args, preset_base: dict | None = None) -> dict:
    """defaults < preset < config file < flags, returned as a flat mapping."""
    cfg: dict = {}
    if preset_base:
        cfg.update(preset_base)
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise DomainError("config file must hold a JSON object")
        file_cfg = RunConfig.from_mapping(data)
        cfg.update(file_cfg.flat())
        if file_cfg.out is not None and args.out is None:
            args.out = file_cfg.out
        if file_cfg.format is not None and args.format is None:
            args.format = file_cfg.format
    for name in _FLAG_FIELDS:
        value = getattr(args, name)
        if value is not None:
            cfg[name] = value
    return cfg


def _resolve_m_last(cfg: dict) -> dict:
    resolved = model.resolve_config(cfg)
    if resolved["m"] == "last":
        resolved["m"] = int(resolved["N"])
    return resolved


def _report_row(cfg: dict, report) -> dict:
    row = {k: cfg[k] for k in model.CONFIG_FIELDS}
    for k in METRIC_FIELDS:
        row[k] = getattr(report, k)
    row["error"] = ""
    return row


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_report(args) -> int:
    cfg = _resolve_m_last(_gather_config(args))
    report = optimize.evaluate_config(cfg)
    row = _report_row(cfg, report)
    fmt = args.format or "json"
    text = rows_to_csv([row]) if fmt == "csv" else rows_to_json([row], single=True)
    _emit(text, args.out)
    return EXIT_OK


def _parse_axis(text: str):
    name, sep, rest = text.partition("=")
    name = name.strip()
    if not sep or not rest:
        raise DomainError(f"axis {text!r} must be name=v1,v2,... or name=log:lo:hi:count")
    if name not in optimize.AXIS_NAMES:
        raise DomainError(f"unknown sweep axis {name!r}; expected one of {optimize.AXIS_NAMES}")
    if rest.startswith("log:"):
        parts = rest.split(":")
        if len(parts) != 4:
            raise DomainError(f"log axis {text!r} must be name=log:lo:hi:count")
        lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        if lo <= 0.0 or hi <= 0.0:
            raise DomainError("log axis bounds must be positive")
        if count < 1:
            raise DomainError("log axis needs at least one point")
        return name, list(np.geomspace(lo, hi, count))
    try:
        values = [float(tok) for tok in rest.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"could not parse axis values in {text!r}: {exc}") from None
    if not values:
        raise DomainError(f"axis {text!r} has no values")
    return name, values


def cmd_sweep(args) -> int:
    preset_base, preset_axes = (None, None)
    if args.preset is not None:
        preset_base, preset_axes = sweep_preset(args.preset)
    axes = [ _parse_axis(a) for a in (args.axis or []) ]
    if not axes:
        axes = preset_axes or []
    if not axes:
        raise DomainError("sweep needs --axis or --preset")
    cfg = _gather_config(args, preset_base)
    rows = optimize.sweep(optimize.SweepGrid(axes=tuple(axes), base=cfg))
    fmt = args.format or "csv"
    text = rows_to_json(rows) if fmt == "json" else rows_to_csv(rows)
    _emit(text, args.out)
    if any(row["error"] == "" for row in rows):
        return EXIT_OK
    # nothing succeeded: report the first failure class
    first = rows[0]["error"] if rows else ""
    return EXIT_NUMERICAL if first in _NUMERICAL_ERRORS else EXIT_VALIDATION


def cmd_scaling(args) -> int:
    if args.case not in SCALING_CASES:
        raise DomainError(f"unknown scaling case {args.case!r}; expected one of {sorted(SCALING_CASES)}")
    n_values = [int(tok) for tok in args.N_list.split(",") if tok.strip() != ""]
    if len(n_values) < 3:
        raise DomainError("scaling needs at least 3 chain lengths")
    if any(n % 2 == 0 for n in n_values):
        raise DomainError("scaling chain lengths must all be odd")
    A = args.A
    base = _gather_config(args)
    base.update(_case_base(args.case, A))  # the case geometry always wins
    rows = optimize.sweep(optimize.SweepGrid(axes=(("N", n_values),), base=base))
    failed = [r for r in rows if r["error"]]
    if failed:
        first = failed[0]["error"]
        code = EXIT_NUMERICAL if first in _NUMERICAL_ERRORS else EXIT_VALIDATION
        sys.stderr.write(f"scaling point failed: {first}\n")
        return code
    points = [(row["N"], row["snr_per_photon_dominant"]) for row in rows]
    fit = optimize.fit_scaling_exponent(points)
    factor = SCALING_CASES[args.case]["factor"]
    target = factor * A
    if target != 0.0:
        deviation = (fit.slope - target) / abs(target)
    else:
        deviation = fit.slope / (2.0 * A)
    summary = {
        "case": args.case,
        "A": A,
        "N_values": n_values,
        "slope": fit.slope,
        "target_slope": target,
        "relative_deviation": deviation,
        "r_squared": fit.r_squared,
    }
    if (args.format or "json") == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = list(summary)
        writer.writerow(keys)
        writer.writerow([_cell(summary[k]) if not isinstance(summary[k], list)
                         else " ".join(str(n) for n in summary[k]) for k in keys])
        text = buf.getvalue()
    else:
        text = json.dumps(summary, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def _add_config_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", default=None, help="JSON config file")
    sp.add_argument("--N", type=int, default=None, help="chain length (odd, >= 3)")
    sp.add_argument("--w", type=float, default=None, help="hopping rate")
    sp.add_argument("--delta", type=float, default=None, help="two-photon drive rate")
    sp.add_argument("--kappa", type=float, default=None, help="damping rate")
    sp.add_argument("--theta", type=float, default=None, help="drive phase (rad)")
    sp.add_argument("--m", type=_site_flag, default=None,
                    help="injection site (odd int, or 'last')")
    sp.add_argument("--beta", type=float, default=None, help="drive amplitude |beta|")
    sp.add_argument("--nth", type=float, default=None, help="thermal occupation")
    sp.add_argument("--pert", choices=(model.NHSE, model.LOCALN), default=None,
                    help="perturbation kind")
    sp.add_argument("--epsilon", type=float, default=None, help="perturbation strength")
    sp.add_argument("--varphi", type=float, default=None, help="tunneling phase (rad)")
    sp.add_argument("--phi", type=float, default=None, help="homodyne angle (rad)")
    sp.add_argument("--tau", type=float, default=None, help="integration time")
    sp.add_argument("--regime", choices=model.REGIMES, default=None)
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hnsense",
        description="Steady-state sensing metrics for driven coupled chiral chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("report", help="evaluate one configuration")
    _add_config_flags(rep)
    rep.set_defaults(func=cmd_report)

    sw = sub.add_parser("sweep", help="evaluate a parameter grid")
    _add_config_flags(sw)
    sw.add_argument("--axis", action="append", default=None,
                    metavar="NAME=V1,V2,... | NAME=log:LO:HI:COUNT",
                    help="sweep axis (repeatable; first axis varies slowest)")
    sw.add_argument("--preset", default=None,
                    help="named grid: fig2a..fig3d, figure4a, figure4b")
    sw.set_defaults(func=cmd_sweep)

    sc = sub.add_parser("scaling", help="fit a scaling exponent versus N")
    _add_config_flags(sc)
    sc.add_argument("--case", required=True, help="one of fig2a..fig3d")
    sc.add_argument("--N-list", dest="N_list", default="3,5,7,9",
                    help="comma-separated odd chain lengths (>= 3 of them)")
    sc.add_argument("--A", type=float, default=_A_SCALING,
                    help="amplification factor for the fit")
    sc.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SingularError, DegenerateError, DivergenceError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except (DomainError, OverflowError, StepSizeError) as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"i/o failure: {exc}\n")
        return EXIT_IO
    except ValueError as exc:  # config/JSON parse problems
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
