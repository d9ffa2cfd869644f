"""Command line front end: solvers, sweeps and data export.

Subcommands mirror the library layers.  fixed-point and orbit run the outer
solvers and emit reports as JSON; window, cascade and orbit-diagnostics emit
CSV sweeps; spectrum reloads a stored report and prints the universal
constants extracted from it.  Exit codes: 0 success, 1 usage or validation
trouble, 2 a solver that honestly failed to converge (residual trace goes to
stderr).  Floats are serialized by repr, whose shortest round-trip decimal
keeps reloaded reports bit-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .decompspace import compose_all, identity_decomposition
from .errors import ConfigError, DomainError, NoFixedPoint, NonConvergence, RenormlabError
from .renorm import (
    DecomposedMap,
    FixedPointReport,
    SolverConfig,
    find_fixed_point,
    find_periodic_orbit,
    peak_value_rho,
    random_decomposed_map,
    renormalization_orbit_diagnostics,
    renormalization_window,
)
from .spectral import scaling_ratios, superstable_cascade, unstable_eigenvalue

_WINDOW_SAMPLES = 33


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here reserves 2 for numerics."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, help="critical exponent, must exceed 1")
    p.add_argument("--depth", type=int, default=8, help="decomposition tree depth")
    p.add_argument("--grid", type=int, default=64, help="Chebyshev grid degree")
    p.add_argument("--tol", type=float, default=1e-8, help="outer residual tolerance")
    p.add_argument("--max-iter", type=int, default=200, help="outer iteration cap")
    p.add_argument("--damping", type=float, default=0.5, help="blend weight in (0, 1]")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized starts")
    p.add_argument("--out", type=str, help="output path (default stdout)")


def _config(args, alpha=None) -> SolverConfig:
    a = args.alpha if alpha is None else alpha
    if a is None:
        raise ConfigError("--alpha is required")
    return SolverConfig(alpha=a, depth=args.depth, grid=args.grid, tol=args.tol,
                        max_iter=args.max_iter, damping=args.damping, seed=args.seed)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_json(report: FixedPointReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def _alpha_path(out_path: str, alpha: float) -> str:
    root, ext = os.path.splitext(out_path)
    return f"{root}-alpha{alpha:g}{ext or '.json'}"


def _cmd_fixed_point(args) -> int:
    if args.alpha_sweep:
        alphas = [float(a) for a in args.alpha_sweep.split(",") if a.strip()]
        if not alphas:
            raise ConfigError("empty --alpha-sweep list")
        if not args.out:
            raise ConfigError("--alpha-sweep writes per-alpha files; --out is required")
        configs = [_config(args, alpha=a) for a in alphas]

        def run(cfg: SolverConfig) -> str:
            path = _alpha_path(args.out, cfg.alpha)
            _emit(_report_json(find_fixed_point(cfg)), path)
            return path

        workers = max(1, int(os.environ.get("RENORMLAB_THREADS", "4")))
        failures = 0
        with ThreadPoolExecutor(max_workers=min(workers, len(configs))) as pool:
            futures = [(cfg.alpha, pool.submit(run, cfg)) for cfg in configs]
            for alpha, fut in futures:
                try:
                    print(f"alpha {alpha:g}: wrote {fut.result()}")
                except NonConvergence as exc:
                    print(f"alpha {alpha:g}: {exc}", file=sys.stderr)
                    failures += 1
        return 2 if failures else 0

    report = find_fixed_point(_config(args))
    _emit(_report_json(report), args.out)
    return 0


def _cmd_orbit(args) -> int:
    reports = find_periodic_orbit(_config(args), args.k)
    text = json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return 0


def _cmd_window(args) -> int:
    cfg = _config(args)
    dec = identity_decomposition(cfg.depth, cfg.grid)
    obs = compose_all(dec)
    result = renormalization_window(dec, cfg.alpha)
    lines = [f"# window t_min={result.t_min!r} t_max={result.t_max!r}"]
    if result.multiple:
        lines.append(f"# warning: {len(result.windows)} disjoint renormalizable "
                     "windows; sweeping the first")
    lines.append("t,rho")
    for t in np.linspace(result.t_min, result.t_max, _WINDOW_SAMPLES):
        try:
            rho = peak_value_rho(DecomposedMap(dec, float(t), cfg.alpha, observed=obs))
        except (DomainError, NoFixedPoint):
            continue
        lines.append(f"{float(t)!r},{rho!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_cascade(args) -> int:
    cfg = _config(args)
    _emit(superstable_cascade(cfg.alpha, args.m).to_csv(), args.out)
    return 0


def _cmd_spectrum(args) -> int:
    with open(args.infile) as fh:
        report = FixedPointReport.from_dict(json.load(fh))
    payload = {
        "alpha": report.alpha,
        "delta": unstable_eigenvalue(report),
        "scaling_ratios": scaling_ratios(report, args.levels),
        "residual_geometry": report.residual_geometry,
        "residual_peak": report.residual_peak,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_orbit_diagnostics(args) -> int:
    cfg = _config(args)
    start = random_decomposed_map(cfg.alpha, cfg.depth, cfg.grid, cfg.seed)
    records = renormalization_orbit_diagnostics(start, args.steps)
    lines = ["step,peak,distance,kappa"]
    for rec in records:
        lines.append(f"{rec['step']},{rec['peak']!r},{rec['distance']!r},{rec['kappa']!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="renormlab",
                     description="period-doubling renormalization laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixed-point", help="solve for a truncation fixed point")
    _add_common(p)
    p.add_argument("--alpha-sweep", type=str,
                   help="comma list of alphas solved in parallel, one output file each")
    p.set_defaults(handler=_cmd_fixed_point)

    p = sub.add_parser("orbit", help="solve for a periodic orbit of length k")
    _add_common(p)
    p.add_argument("-k", type=int, required=True, help="orbit length, at least 1")
    p.set_defaults(handler=_cmd_orbit)

    p = sub.add_parser("window", help="renormalizable peak-value window of the identity")
    _add_common(p)
    p.set_defaults(handler=_cmd_window)

    p = sub.add_parser("cascade", help="superstable cascade of the bare fold family")
    _add_common(p)
    p.add_argument("-m", type=int, default=8, help="deepest cascade level")
    p.set_defaults(handler=_cmd_cascade)

    p = sub.add_parser("spectrum", help="universal constants from a stored report")
    _add_common(p)
    p.add_argument("--in", dest="infile", required=True, help="report JSON path")
    p.add_argument("--levels", type=int, default=6, help="scaling ratios to collect")
    p.set_defaults(handler=_cmd_spectrum)

    p = sub.add_parser("orbit-diagnostics",
                       help="distance to the pure family along a random orbit")
    _add_common(p)
    p.add_argument("--steps", type=int, default=6, help="renormalization steps to track")
    p.set_defaults(handler=_cmd_orbit_diagnostics)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.trace:
            print("residual trace:", file=sys.stderr)
            for i, r in enumerate(exc.trace, 1):
                print(f"  {i:4d}  {r:.6e}", file=sys.stderr)
        return 2
    except RenormlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
