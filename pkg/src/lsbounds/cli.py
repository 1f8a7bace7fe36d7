"""Command-line front end: ``lsbounds verify | explore | tighten | entropy``.

Exit status: 0 when every check passes, 1 when a mathematical check
fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import __version__, entropy, fixtures, suites
from .channels import KrausSet
from .errors import InternalConsistencyError
from .fileio import SpecFileError, load_channel, load_state, matrix_to_grid
from .inequalities import TOLERANCE
from .linalg import DEFAULT_CLIP, EIG_TOL, HERM_TOL
from .optimizer import CHAINS, RemixObjective, remix_report, tighten
from .samplers import ALGORITHM, SeededGenerator

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
STRICT_THRESHOLD = 1e-6


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimensions must be comma-separated integers: {text!r}")
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"dimensions must be positive: {text!r}")
    return dims


def _provenance(args, seed: int | None = None) -> dict:
    return {
        "tool": "lsbounds",
        "version": __version__,
        "seed": args.seed if seed is None else seed,
        "algorithm": ALGORITHM,
        "tolerances": {
            "slack": args.tolerance,
            "hermiticity": HERM_TOL,
            "eigen": EIG_TOL,
            "spectral_clip": DEFAULT_CLIP,
            "kernel": entropy.KERNEL_TOL,
        },
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, allow_nan=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _resolve_channel(spec: str | None, chain: str, dims) -> KrausSet | None:
    """A channel file path, or a fixture name sized for the chain."""
    if spec is None:
        return None
    if spec in fixtures.CHANNELS:
        acting_on = "B" if chain in ("ls9", "fin-equivalence") else None
        return fixtures.channel(spec, suites.kraus_dim(chain, dims), acting_on)
    return load_channel(spec)


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    names = suites.SUITE_NAMES if args.suite == "all" else (args.suite,)
    for name in names:
        suites.validate_dims(name, args.dims)
    results = [
        suites.run_suite(name, args.trials, args.dims, args.seed, args.kraus_count, tol=args.tolerance)
        for name in names
    ]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.chain}: trials={len(r.trials)} min_slack={_fmt(r.min_slack)} violations={r.violations}")
    doc = _provenance(args)
    doc["command"] = "verify"
    doc["suites"] = [r.to_dict() for r in results]
    if args.out:
        _emit(doc, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


def explore_header(n_terms: int) -> list[str]:
    return (
        ["row", "trial_id", "seed"]
        + [f"term_{i + 1}" for i in range(n_terms)]
        + [f"slack_{i + 1}" for i in range(n_terms - 1)]
    )


TERM_COUNTS = {"ssa": 2, "monotonicity": 2, "sandwich": 3, "ls-main": 3, "ls9": 4, "fin-equivalence": 3}


def summarize_slacks(columns: list[list[float]], threshold: float = STRICT_THRESHOLD) -> dict:
    return {
        "min": [min(c) for c in columns],
        "mean": [math.fsum(c) / len(c) for c in columns],
        "strict_frequency": [sum(1 for s in c if s > threshold) / len(c) for c in columns],
    }


def cmd_explore(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    suites.validate_dims(args.chain, args.dims)
    kraus = _resolve_channel(args.channel, args.chain, args.dims)
    result = suites.run_suite(
        args.chain, args.trials, args.dims, args.seed, args.kraus_count, kraus, args.tolerance
    )
    errors = [t for t in result.trials if t.report is None]
    if errors:
        for t in errors:
            print(f"trial {t.trial}: {t.error}", file=sys.stderr)
        return EXIT_VIOLATION

    n_terms = TERM_COUNTS[args.chain]
    header = explore_header(n_terms)
    values = [t.report.values for t in result.trials]
    slacks = [t.report.slacks for t in result.trials]
    term_cols = [list(c) for c in zip(*values)]
    slack_cols = [list(c) for c in zip(*slacks)]
    summary = summarize_slacks(slack_cols, args.threshold)
    term_summary = {"min": [min(c) for c in term_cols], "mean": [math.fsum(c) / len(c) for c in term_cols]}

    try:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for t in result.trials:
                w.writerow(["trial", t.trial, t.seed] + [_fmt(v) for v in t.report.values + t.report.slacks])
            for key in ("min", "mean"):
                w.writerow([key, "", ""] + [_fmt(v) for v in term_summary[key] + summary[key]])
            w.writerow(["strict_frequency", "", ""] + [""] * n_terms + [_fmt(v) for v in summary["strict_frequency"]])
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}")

    print(f"{args.chain}: {len(result.trials)} trials written to {args.out}")
    for i, (lo, mu, fr) in enumerate(zip(summary["min"], summary["mean"], summary["strict_frequency"])):
        print(f"slack_{i + 1}: min={_fmt(lo)} mean={_fmt(mu)} strict_frequency(>{args.threshold:g})={fr:.6f}")
    if args.report:
        doc = _provenance(args)
        doc.update(command="explore", chain=args.chain, trials=len(result.trials), dims=args.dims,
                   kraus_count=args.kraus_count, threshold=args.threshold, csv=str(args.out),
                   slack_summary=summary, violations=result.violations)
        _emit(doc, args.report)
    return EXIT_OK if result.passed else EXIT_VIOLATION


def _tighten_one(obj: RemixObjective, args) -> dict:
    trace = tighten(obj, args.budget, args.restarts, SeededGenerator(args.seed))
    best_w = trace.best_unitary
    report = remix_report(obj, best_w)
    return {
        "direction": obj.direction,
        "baseline": trace.baseline,
        "best_value": trace.best_value,
        "best_unitary": matrix_to_grid(best_w),
        "chain_at_best": report.to_dict(),
        "contained": report.passed,
        "trace": trace.to_dict(),
    }


def cmd_tighten(args) -> int:
    if args.budget < 1 or args.restarts < 1:
        raise UsageError("--budget and --restarts must be at least 1")
    rho = load_state(args.state)
    gamma = load_state(args.gamma) if args.gamma else None
    if args.chain == "sandwich" and gamma is None:
        raise UsageError("the sandwich chain needs --gamma")
    dims = list(rho.layout.dims)
    ks = _resolve_channel(args.channel, args.chain, dims)
    directions = ("maximize", "minimize") if args.direction == "both" else (args.direction,)
    runs = [_tighten_one(RemixObjective(d, args.chain, ks, rho, gamma), args) for d in directions]
    for r in runs:
        print(f"{r['direction']}: baseline={_fmt(r['baseline'])} best={_fmt(r['best_value'])} "
              f"evaluations={r['trace']['budget_used']}")
    doc = _provenance(args)
    doc.update(command="tighten", chain=args.chain, budget=args.budget, restarts=args.restarts, runs=runs)
    if args.out:
        _emit(doc, args.out)
    return EXIT_OK if all(r["contained"] for r in runs) else EXIT_VIOLATION


def format_value(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:#.12g}"


def cmd_entropy(args) -> int:
    states = [load_state(p) for p in args.states]
    if args.quantity == "H":
        if len(states) != 2:
            raise UsageError("H needs exactly two state files")
        rho, gamma = states
        if args.labels:
            rho, gamma = rho.marginal(args.labels), gamma.marginal(args.labels)
        value = entropy.relative_entropy(rho, gamma)
    else:
        if len(states) != 1:
            raise UsageError(f"{args.quantity} needs exactly one state file")
        rho = states[0]
        if args.quantity == "S":
            if args.labels:
                rho = rho.marginal(args.labels)
            value = entropy.von_neumann_entropy(rho)
        else:
            if args.target is None:
                raise UsageError("conditional needs --target")
            value = entropy.conditional_entropy(rho, args.target, args.rest or [])
    print(format_value(value))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lsbounds", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lsbounds {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed_required=True):
        sp.add_argument("--seed", type=int, required=seed_required)
        sp.add_argument("--tolerance", type=float, default=TOLERANCE)

    v = sub.add_parser("verify", help="run randomized inequality suites")
    v.add_argument("--suite", choices=suites.SUITE_NAMES + ("all",), default="all")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dims", type=_dims, default=[2, 2, 2])
    v.add_argument("--kraus-count", type=int, default=2)
    v.add_argument("--out")
    common(v)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("explore", help="write per-trial terms and slacks to CSV")
    e.add_argument("--chain", choices=suites.SUITE_NAMES, required=True)
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--dims", type=_dims, default=[2, 2, 2])
    e.add_argument("--kraus-count", type=int, default=2)
    e.add_argument("--channel", help="channel file or fixture name (identity, dephasing)")
    e.add_argument("--threshold", type=float, default=STRICT_THRESHOLD)
    e.add_argument("--out", required=True)
    e.add_argument("--report", help="optional JSON summary path")
    common(e)
    e.set_defaults(func=cmd_explore)

    t = sub.add_parser("tighten", help="search Kraus remixes for the extreme middle term")
    t.add_argument("--channel", required=True, help="channel file or fixture name")
    t.add_argument("--state", required=True)
    t.add_argument("--gamma")
    t.add_argument("--chain", choices=CHAINS, default="sandwich")
    t.add_argument("--direction", choices=("maximize", "minimize", "both"), default="both")
    t.add_argument("--budget", type=int, default=300)
    t.add_argument("--restarts", type=int, default=3)
    t.add_argument("--out")
    common(t)
    t.set_defaults(func=cmd_tighten)

    s = sub.add_parser("entropy", help="entropies of states given as files")
    s.add_argument("quantity", choices=("S", "H", "conditional"))
    s.add_argument("states", nargs="+")
    s.add_argument("--labels", nargs="+", help="restrict to the marginal on these labels")
    s.add_argument("--target")
    s.add_argument("--rest", nargs="*")
    s.set_defaults(func=cmd_entropy)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except InternalConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (UsageError, SpecFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
