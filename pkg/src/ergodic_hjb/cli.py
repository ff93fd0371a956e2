"""Command line entry point: ``ergodic-hjb {kernel-check,validate,solve,sweep,oracle}``.

Every subcommand exits with status 0 only when all of its checks pass.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .grid import field_to_csv
from .kernel import kernel_report, perron_gamma
from .model import validate_assumptions
from .oracles import cross_check_suite
from .reports import ConfigError, RunConfig, dumps, emit_reports, load_config, parse_config
from .solver import SolverError, nonnegativity_check, solve_discounted
from .sweep import SweepOptions, run_sweep


def _config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return parse_config("{}")


def _override(config: RunConfig, args) -> RunConfig:
    doc = config.to_dict()
    if getattr(args, "model", None):
        doc["model"] = {"name": args.model}
    if getattr(args, "kernel", None):
        doc["kernel"] = {"name": args.kernel}
    for key, attr in (("nx", "nx"), ("n_xi", "nxi")):
        if getattr(args, attr, None) is not None:
            doc[key] = getattr(args, attr)
    if getattr(args, "tol", None) is not None:
        doc["tolerances"]["solve_tol"] = args.tol
    if getattr(args, "output", None):
        doc["output"] = args.output
    return parse_config(json.dumps(doc))


def cmd_kernel_check(args) -> int:
    config = _override(_config(args), args)
    _, _, kernel = config.build()
    kernel = perron_gamma(kernel, tol=config.tolerances["gamma_tol"])
    report = kernel_report(kernel, seed=config.seed)
    print(dumps(report), end="")
    lo, hi = kernel.k0 / kernel.k1, kernel.k1 / kernel.k0
    ok = (report["identity_residual_max"] <= 1e-12
          and abs(report["rayleigh"] - 1) <= 1e-10
          and lo <= report["gamma_min"] and report["gamma_max"] <= hi)
    return 0 if ok else 1


def cmd_validate(args) -> int:
    config = _override(_config(args), args)
    _, model, _ = config.build()
    report = validate_assumptions(model, seed=config.seed)
    print(dumps(report), end="")
    return 0 if all(report[k]["passed"] for k in ("A1", "A2", "A3", "A4")) else 1


def cmd_solve(args) -> int:
    config = _override(_config(args), args)
    _, model, kernel = config.build()
    try:
        v, report = solve_discounted(model, kernel, args.alpha, tol=config.tolerances["solve_tol"],
                                     scheme=config.scheme)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(field_to_csv(v))
    doc = {"config": config.to_dict(), **report.to_dict()}
    if args.report:
        Path(args.report).write_text(dumps(doc))
    else:
        print(dumps(doc), end="")
    return 0 if nonnegativity_check(v, config.tolerances["solve_tol"]) else 1


def cmd_sweep(args) -> int:
    config = _override(_config(args), args)
    _, model, kernel = config.build()
    opts = SweepOptions(tol=config.tolerances["solve_tol"], c_tol=config.tolerances["c_tol"],
                        scheme=config.scheme)
    try:
        report = run_sweep(model, kernel, config.schedule, opts)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    paths = emit_reports(report, config)
    sup_f = model.sup_f
    bound_ok = all(m.sup_alpha_v <= sup_f + 1e-12 for m in report.per_alpha)
    nonneg_ok = all(nonnegativity_check(v, opts.tol) for v in report.fields)
    c_ok = abs(report.ergodic_c) <= opts.c_tol
    summary = {"written": [str(p) for p in paths], "bound_chain": bound_ok,
               "nonnegative": nonneg_ok, "ergodic_c": report.ergodic_c, "ergodic_c_ok": c_ok}
    print(dumps(summary), end="")
    return 0 if (bound_ok and nonneg_ok and c_ok) else 1


def cmd_oracle(args) -> int:
    rows = cross_check_suite()
    print(dumps(rows), end="")
    return 0 if all(r["passed"] for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergodic-hjb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=True):
        p.add_argument("--config", help="JSON run configuration")
        if grid:
            p.add_argument("--model")
            p.add_argument("--kernel")
            p.add_argument("--nx", type=int)
            p.add_argument("--nxi", type=int)

    p = sub.add_parser("kernel-check", help="Perron weight and conservation identity report")
    common(p)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("validate", help="sample-based check of the model assumptions")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve the discounted system for one alpha")
    common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="field CSV path")
    p.add_argument("--report", help="report JSON path (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="vanishing-discount sweep with report files")
    common(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--output", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="run the oracle cross-check suite")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="raise", invalid="raise")
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
