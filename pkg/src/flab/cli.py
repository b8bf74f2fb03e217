"""Command-line front end: byte-stable JSON reports for the example families.

Exit codes: 0 when every verdict is PASS/EXACT, 1 on any FAIL, 2 on any
UNCERTIFIED result.  FLAB_SEED seeds the randomized verifier suites
(a fixed default otherwise).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .kernels import ConvolutionKernel, UncertifiedWindowError
from .presets import DEFAULT_SEED
from .suite import (
    RunConfig,
    run_algebraic,
    run_compute_f,
    run_generalization,
    run_ornstein_weiss,
    run_verifier_suite,
)

_EXIT = {"PASS": 0, "FAIL": 1, "UNCERTIFIED": 2}


def _render_table(report: dict) -> str:
    """Human-readable view derived from the JSON report, never computed separately."""
    lines = [f"command: {report.get('command')}   status: {report.get('status')}"]
    for name, rep in report.get("reports", {}).items():
        lines.append(f"-- {name}: {rep['label']}")
        lines.append("   n |        F        |       F*        | inf F (n>=1)")
        for row in rep["rows"]:
            lines.append(
                "   {n} | {F:>15.12f} | {Fs:>15.12f} | {inf:>12.9f}".format(
                    n=row["n"],
                    F=row["F"]["float"],
                    Fs=row["F_star"]["float"],
                    inf=row["running_inf_F"]["float"],
                )
            )
        lines.append(
            f"   f = {rep['f']['value']['float']:.12f} [{rep['f']['certificate']}]  "
            f"f* = {rep['f_star']['value']['float']:.12f} [{rep['f_star']['certificate']}]"
        )
    if "addition" in report:
        lines.append(f"addition verdict: {report['addition']['verdict']}")
    for suite in report.get("suites", []):
        ok = sum(1 for c in suite["cases"] if c["passed"])
        lines.append(f"suite {suite['name']}: {ok}/{len(suite['cases'])} cases pass")
        for case in suite["cases"]:
            if not case["passed"]:
                lines.append(f"  FAIL {case['name']}: {case.get('witness')}")
    return "\n".join(lines)


def _emit(report: dict, out: str | None, pretty: bool) -> int:
    text = json.dumps(report, sort_keys=True, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if pretty:
        print(_render_table(report), file=sys.stderr)
    return _EXIT.get(report.get("status", "FAIL"), 1)


def _add_common(sub):
    sub.add_argument("--nmax", type=int, default=2, help="largest ball radius n")
    sub.add_argument("--rank", type=int, default=2, help="rank of the free group")
    sub.add_argument("--window-cap", type=int, default=4, dest="window_cap",
                     help="extra enclosing-window growth for marginal certification")
    sub.add_argument("--stable-threshold", type=int, default=3, dest="stable_threshold",
                     help="equal increments needed to declare a rate stable")
    sub.add_argument("--out", default=None, help="write the JSON report to this path")
    sub.add_argument("--pretty", action="store_true", help="also print a table to stderr")


def _config(args) -> RunConfig:
    seed = int(os.environ.get("FLAB_SEED", DEFAULT_SEED))
    return RunConfig(
        rank=args.rank,
        n_max=args.nmax,
        window_cap=args.window_cap,
        stable_threshold=args.stable_threshold,
        seed=seed,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flab",
        description="exact f-invariant computations for free-group actions",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ow = subs.add_parser("ow", help="run the doubling-map example family")
    _add_common(ow)

    gen = subs.add_parser("gen", help="run the finite-abelian generalization family")
    gen.add_argument("--k", required=True, help="finite abelian group preset, e.g. Z/3")
    _add_common(gen)

    ker = subs.add_parser("kernel", help="run a convolution-kernel subshift")
    ker.add_argument("--spec", required=True, help="path to a kernel spec JSON file")
    _add_common(ker)

    ver = subs.add_parser("verify", help="run the verifier suites")
    ver.add_argument(
        "--suite",
        default="all",
        help="comma-separated suites (cocycle,special,skew-entropy-bound,"
        "relative-collapse,pullback-exchange,generated-algebra,window-split,"
        "addition-formula), 'all', or 'none'",
    )
    ver.add_argument(
        "--inject-bug",
        default=None,
        choices=["negate-cocycle"],
        help="deliberately corrupt a cocycle table to demonstrate detection",
    )
    _add_common(ver)

    cf = subs.add_parser("compute-f", help="compute F/F* tables for a process spec")
    cf.add_argument("--process", required=True, help="path to a process spec JSON file")
    _add_common(cf)

    args = parser.parse_args(argv)
    cfg = _config(args)

    try:
        if args.command == "ow":
            report = run_ornstein_weiss(cfg)
        elif args.command == "gen":
            report = run_generalization(cfg, args.k)
        elif args.command == "kernel":
            with open(args.spec) as fh:
                kernel = ConvolutionKernel.from_json(json.load(fh))
            report = run_algebraic(cfg, kernel)
        elif args.command == "verify":
            if args.suite == "all":
                suites = None
            elif args.suite in ("none", ""):
                suites = []
            else:
                suites = [s.strip() for s in args.suite.split(",") if s.strip()]
            report = run_verifier_suite(cfg, suites, inject_bug=args.inject_bug)
        elif args.command == "compute-f":
            with open(args.process) as fh:
                spec = json.load(fh)
            report = run_compute_f(cfg, spec)
        else:  # pragma: no cover
            parser.error(f"unknown command {args.command}")
            return 2
    except UncertifiedWindowError as exc:
        print(f"uncertified: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    return _emit(report, args.out, args.pretty)


if __name__ == "__main__":
    sys.exit(main())
