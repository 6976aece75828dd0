"""Command-line front end.

One executable, eight subcommands, one exit-code contract:

    0  success (including reports that merely *count* violations)
    1  usage error (unknown flag, malformed argv shape)
    2  precondition error (value out of range, unknown family, bad file)
    3  numerical failure (divisor breakdown, budget exhaustion, stall)

Numerical failures are printed as structured JSON on stdout so parameter
sweeps can log and continue; usage errors go to stderr like any other
tool.  Angles are measured in turns throughout (theta = 1 is a full
circle), matching the rotation-number convention of the library.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import RunConfig
from .construction import ConstructionConfig, run_construction
from .errors import NumericalError, PreconditionError
from .families import family_catalog, get_family
from .linearize import DEFAULT_BUDGET, siegel_series, yoccoz_w
from .qanorm import qa_norm
from .radius import (
    parse_rotation,
    poisson_bound_check,
    rho_coefficient,
    rho_radial,
)
from .series import TruncatedSeries, derivative, evaluate

__all__ = ["main", "build_parser"]


class _UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; the contract reserves 2 for
    precondition failures, so bad usage raises and main() maps it to 1."""

    def error(self, message):
        raise _UsageError(message, self.format_usage())


# -- serialization helpers ---------------------------------------------------


def _jsonable(obj):
    """Recursively coerce to JSON-clean values; non-finite floats become
    null (the reports carry explicit flags for the interesting infinities)."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _emit_json(payload, out_path: str | None) -> None:
    _write_text(json.dumps(_jsonable(payload), indent=2), out_path)


def _emit_csv(header: list[str], rows: list[list], out_path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _write_text(buf.getvalue(), out_path)


def _error_body(exc: Exception) -> dict:
    body = {"type": type(exc).__name__, "message": str(exc)}
    for name in ("k", "magnitude", "floor", "budget"):
        if hasattr(exc, name):
            body[name] = getattr(exc, name)
    partial = getattr(exc, "partial_report", None)
    if partial is not None:
        body["partial_report"] = partial.describe()
    return {"error": body}


def _parse_complex_pair(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise PreconditionError(f"expected RE,IM (or a bare real), got {text!r}")


def _load_series(path: str, dtype=np.complex128) -> TruncatedSeries:
    """Series file: {"coeffs": [c0, c1, ...]} or a bare list, each entry a
    number or an [re, im] pair."""
    with open(path) as fh:
        raw = json.load(fh)
    if isinstance(raw, dict):
        if "coeffs" not in raw:
            raise PreconditionError(f"{path}: series object needs a 'coeffs' key")
        raw = raw["coeffs"]
    if not isinstance(raw, list) or not raw:
        raise PreconditionError(f"{path}: expected a non-empty coefficient list")
    coeffs = []
    for entry in raw:
        if isinstance(entry, (int, float)):
            coeffs.append(complex(entry))
        elif isinstance(entry, list) and len(entry) == 2:
            coeffs.append(complex(entry[0], entry[1]))
        else:
            raise PreconditionError(f"{path}: bad coefficient entry {entry!r}")
    return TruncatedSeries.from_coeffs(coeffs, dtype=dtype)


# -- subcommand handlers -----------------------------------------------------


def _cmd_families(args, cfg: RunConfig) -> int:
    if args.action == "list":
        _emit_json([f.describe() for f in family_catalog()], args.out)
    else:  # show
        if args.family_id is None:
            raise PreconditionError("families show needs a family id")
        _emit_json(get_family(args.family_id).describe(), args.out)
    return 0


def _cmd_yoccoz(args, cfg: RunConfig) -> int:
    family = get_family(args.family)
    lam = _parse_complex_pair(args.lam)
    value = yoccoz_w(
        family,
        lam,
        n=args.degree or cfg.default_degree,
        budget=args.budget or DEFAULT_BUDGET,
    )
    _emit_json(
        {
            "lambda": [lam.real, lam.imag],
            "w": [value.w.real, value.w.imag],
            "u": value.u,
            "iterations": value.iterations_used,
            "entry_radius": value.entry_radius,
        },
        args.out,
    )
    return 0


def _grid_point(task: tuple) -> dict:
    """One lambda sample; never raises, so sweeps survive bad parameters."""
    family_id, r, theta, n, budget = task
    lam = r * complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
    row = {"r": r, "theta": theta, "u": math.nan, "iterations": 0, "status": "ok"}
    try:
        value = yoccoz_w(get_family(family_id), lam, n=n, budget=budget)
        row["u"] = value.u
        row["iterations"] = value.iterations_used
    except (PreconditionError, NumericalError) as exc:
        row["status"] = type(exc).__name__
    return row


def _cmd_grid(args, cfg: RunConfig) -> int:
    if not 0.0 < args.rmin <= args.rmax < 1.0:
        raise PreconditionError("need 0 < rmin <= rmax < 1")
    if args.res < 1:
        raise PreconditionError("res must be >= 1")
    get_family(args.family)  # validate before spawning workers
    n = args.degree or cfg.default_degree
    radii = np.linspace(args.rmin, args.rmax, args.res)
    thetas = np.arange(args.res) / args.res
    tasks = [
        (args.family, float(r), float(t), n, args.budget or DEFAULT_BUDGET)
        for r in radii
        for t in thetas
    ]
    if cfg.worker_count > 1:
        with ProcessPoolExecutor(max_workers=cfg.worker_count) as pool:
            rows = list(pool.map(_grid_point, tasks, chunksize=8))
    else:
        rows = [_grid_point(t) for t in tasks]
    fmt = args.format or cfg.output_format
    if fmt == "json":
        _emit_json(rows, args.out)
    else:
        header = ["r", "theta", "u", "iterations", "status"]
        _emit_csv(header, [[row[k] for k in header] for row in rows], args.out)
    return 0


def _cmd_radius(args, cfg: RunConfig) -> int:
    family = get_family(args.family)
    alpha = parse_rotation(args.alpha)
    if args.method == "radial":
        estimate = rho_radial(
            family,
            alpha,
            depth=args.depth or cfg.default_depth,
            n=args.degree or cfg.default_degree,
        )
    else:
        estimate = rho_coefficient(family, alpha, n=args.degree or cfg.default_degree)
    _emit_json(estimate.describe(), args.out)
    return 0


def _cmd_poisson_check(args, cfg: RunConfig) -> int:
    family = get_family(args.family)
    alpha = parse_rotation(args.alpha)
    report = poisson_bound_check(
        family,
        alpha,
        args.delta,
        args.L,
        args.R,
        ray_samples=args.samples,
        n=args.degree or cfg.default_degree,
    )
    _emit_json(report.describe(), args.out)
    return 0


def _cmd_norm(args, cfg: RunConfig) -> int:
    series = _load_series(args.series, dtype=cfg.dtype)
    cap = args.K
    if cap is not None:
        if cap < 0:
            raise PreconditionError("K must be >= 0")
        # derivatives above the truncation degree vanish identically
        cap = min(cap, series.degree)
    result = qa_norm(series, args.r, order_cap=cap, circle_samples=args.samples)
    _emit_json(dataclasses.asdict(result), args.out)
    return 0


def _cmd_construct(args, cfg: RunConfig) -> int:
    schedule = None
    depth = args.depth
    if args.schedule and args.schedule != "auto":
        schedule = tuple(float(s) for s in args.schedule.split(","))
        depth = len(schedule)
    build = ConstructionConfig(
        family=args.family,
        alpha0=parse_rotation(args.alpha0),
        depth=depth,
        delta=args.delta,
        eps0=args.eps0,
        rho_infinity=args.rho_inf,
        schedule=schedule,
        tol_rho=args.tol_rho,
        n_series=args.degree,
    )
    report = run_construction(build)
    _emit_json(report.describe(), args.out)
    return 0


def _cmd_boundary(args, cfg: RunConfig) -> int:
    family = get_family(args.family)
    alpha = parse_rotation(args.alpha)
    g = siegel_series(
        family, alpha.value, n=args.degree or cfg.default_degree, dtype=cfg.dtype
    ).g
    gp = derivative(g, 1)
    radius = math.exp(args.rho)
    rows = []
    for j in range(args.samples):
        theta = j / args.samples
        w = radius * complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
        gv = evaluate(g, w).value
        rows.append([theta, float(gv.real), float(gv.imag), float(abs(evaluate(gp, w).value))])
    _emit_csv(["theta", "re", "im", "abs_gprime"], rows, args.out)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--config",
        default=argparse.SUPPRESS,
        help="JSON file with run-config overrides",
    )
    common.add_argument(
        "--out", default=argparse.SUPPRESS, help="write output to this file"
    )

    parser = _Parser(
        prog="siegelnum",
        description="Siegel-disc numerics: linearization, radius estimates, "
        "norms, and the rotation-number construction.",
    )
    parser.add_argument("--config", default=None)
    parser.add_argument("--out", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("families", parents=[common], help="catalog of map families")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("family_id", nargs="?", default=None)
    p.set_defaults(handler=_cmd_families)

    p = sub.add_parser("yoccoz", parents=[common], help="w(lambda) inside the disc")
    p.add_argument("--family", required=True)
    p.add_argument("--lambda", dest="lam", required=True, metavar="RE,IM")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(handler=_cmd_yoccoz)

    p = sub.add_parser("grid", parents=[common], help="polar sweep of u(lambda)")
    p.add_argument("--family", required=True)
    p.add_argument("--rmin", type=float, required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--res", type=int, required=True)
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(handler=_cmd_grid)

    p = sub.add_parser("radius", parents=[common], help="conformal-radius estimate")
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", required=True, metavar="float:X|cf:LIST|rat:P/Q|golden")
    p.add_argument("--method", choices=("radial", "coeff", "coefficient"), required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(handler=_cmd_radius)

    p = sub.add_parser(
        "poisson-check", parents=[common], help="harmonic upper bound on a ray"
    )
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(handler=_cmd_poisson_check)

    p = sub.add_parser("norm", parents=[common], help="weighted derivative norm")
    p.add_argument("--series", required=True, metavar="FILE.json")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--samples", type=int, default=512)
    p.set_defaults(handler=_cmd_norm)

    p = sub.add_parser(
        "construct", parents=[common], help="rotation-number refinement run"
    )
    p.add_argument("--family", default="quadratic")
    p.add_argument("--alpha0", default="golden")
    p.add_argument("--eps0", type=float, default=0.05)
    p.add_argument("--rho-inf", dest="rho_inf", type=float, default=None)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--schedule", default="auto", metavar="auto|R1,R2,...")
    p.add_argument("--tol-rho", dest="tol_rho", type=float, default=0.02)
    p.add_argument("--degree", type=int, default=256)
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("boundary", parents=[common], help="disc-boundary curve CSV")
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(handler=_cmd_boundary)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(exc.usage)
        sys.stderr.write(f"error: {exc}\n")
        return 1
    try:
        cfg = RunConfig.load(args.config)
        return args.handler(args, cfg)
    except PreconditionError as exc:
        _emit_json(_error_body(exc), None)
        return 2
    except NumericalError as exc:
        _emit_json(_error_body(exc), None)
        return 3
    except (OSError, ValueError) as exc:
        _emit_json(_error_body(exc), None)
        return 2


if __name__ == "__main__":
    sys.exit(main())
