"""Command-line entry point.

Exit codes: 0 success; 2 invariant-suite failure; 3 obstruction detected
(not in kernel / not closed); 4 convergence failure; 1 configuration,
schema, gate, or usage errors.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, serialize
from .config import default_config, load_config, override
from .errors import (
    AssumptionGateError,
    ConfigError,
    NoConvergence,
    NotClosed,
    NotInKernel,
    ParacohError,
    SchemaError,
    SpectralGapError,
    TailNotConverged,
    ThetaNotVanishing,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2
EXIT_OBSTRUCTION = 3
EXIT_NO_CONVERGENCE = 4


class _Parser(argparse.ArgumentParser):
    # keep exit code 2 reserved for invariant failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="paracoh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--out", help="report output directory")
        p.add_argument("--k-per-axis", type=int, dest="k_per_axis")
        p.add_argument("--t", help="comma-separated Sobolev orders, e.g. '1,2'")

    p = sub.add_parser("verify-invariants", help="run the invariant suites")
    common(p)
    p = sub.add_parser("solve-top", help="top-degree coboundary solves per component")
    common(p)
    p.add_argument("--input", action="append", help="tensor JSON per component")
    p = sub.add_parser("solve-form", help="lower-degree primitive solves per component")
    common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--input", action="append", help="form JSON per component")
    p = sub.add_parser("sweep-bounds", help="bound sweeps and fitted exponents")
    common(p)
    p = sub.add_parser("gen", help="write random inputs for later solves")
    common(p)
    p.add_argument("--kind", choices=("tensor", "form"), default="tensor")
    p.add_argument("--degree", type=int, help="form degree (gen --kind form)")
    return parser


def _load_cfg(args) -> "ExperimentConfig":
    cfg = load_config(args.config) if args.config else default_config()
    t_list = None
    if args.t:
        try:
            t_list = tuple(float(x) for x in args.t.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --t value {args.t!r}: {exc}") from exc
    return override(
        cfg,
        seed=args.seed,
        k_per_axis=args.k_per_axis,
        t_list=t_list,
        out_dir=args.out,
    )


def _emit(report: experiments.Report, cfg) -> None:
    out_dir = cfg.out_dir or "paracoh-out"
    paths = experiments.write_report(report, out_dir)
    for rows in report.tables.values():
        for row in rows:
            if row.get("pass") is False:
                print(f"FAIL {row['param']}: value={row['value']}", file=sys.stderr)
    status = "ok" if report.passed else "FAILED"
    print(f"{report.command}: {status}; report at {paths[0]}")
    for key, val in report.metadata.items():
        print(f"  {key}: {val}")


def _load_inputs(paths):
    if not paths:
        return None
    return [serialize.load_json(p) for p in paths]


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help
        return int(exc.code or 0)
    try:
        cfg = _load_cfg(args)
        if args.command == "verify-invariants":
            report = experiments.cmd_verify_invariants(cfg)
            _emit(report, cfg)
            return EXIT_OK if report.passed else EXIT_INVARIANT
        if args.command == "solve-top":
            report = experiments.cmd_solve_top(cfg, _load_inputs(args.input))
            _emit(report, cfg)
            return EXIT_OK if report.passed else EXIT_NO_CONVERGENCE
        if args.command == "solve-form":
            report = experiments.cmd_solve_form(cfg, args.degree, _load_inputs(args.input))
            _emit(report, cfg)
            return EXIT_OK if report.passed else EXIT_NO_CONVERGENCE
        if args.command == "sweep-bounds":
            report = experiments.cmd_sweep_bounds(cfg)
            _emit(report, cfg)
            return EXIT_OK if report.passed else EXIT_INVARIANT
        if args.command == "gen":
            out_dir = cfg.out_dir or "paracoh-out"
            paths = experiments.cmd_gen(cfg, args.kind, args.degree, out_dir)
            for p in paths:
                print(p)
            return EXIT_OK
        raise ConfigError(f"unknown command {args.command!r}")  # pragma: no cover
    except (NotInKernel, NotClosed) as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        return EXIT_OBSTRUCTION
    except (NoConvergence, ThetaNotVanishing, TailNotConverged) as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ConfigError, SchemaError, AssumptionGateError, SpectralGapError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParacohError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
