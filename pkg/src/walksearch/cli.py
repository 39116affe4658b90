"""Command line interface: run experiments, analyze results, self-verify.

Exit codes: 0 success, 1 usage error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .bench import (
    ALGOS,
    ExperimentSpec,
    read_records,
    run_experiment,
    scaling_report,
    write_report,
)
from .verify import run_verification


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we reserve 2 for verify
        raise _UsageError(message)


def _csv_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _csv_floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="walksearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and write CSV records")
    run.add_argument("--config", type=Path, help="JSON config mirroring the spec; flags override")
    run.add_argument("--algo", choices=ALGOS)
    run.add_argument("--sides", type=_csv_ints, metavar="S1,S2,...")
    run.add_argument("--c-delta", type=_csv_floats, metavar="C1,C2,...")
    run.add_argument("--window", type=_csv_floats, metavar="LO,HI,POINTS")
    run.add_argument("--stride", type=int, dest="probe_stride")
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=str)
    run.add_argument("--marked", type=_csv_ints, metavar="X,Y")
    run.add_argument("--random-marked", action="store_true", dest="randomize_marked", default=None)
    run.add_argument("--workers", type=int)

    analyze = sub.add_parser("analyze", help="scaling report from a results CSV")
    analyze.add_argument("--in", dest="input", type=Path, required=True)
    analyze.add_argument("--report", type=Path, help="write the JSON summary here")

    sub.add_parser("verify", help="dense-oracle and invariant self-checks")
    return parser


def _spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    if args.config is not None:
        spec = ExperimentSpec.from_json(Path(args.config).read_text())
    else:
        spec = ExperimentSpec()
    overrides = {
        "algo": args.algo,
        "sides": args.sides,
        "c_delta": args.c_delta,
        "probe_stride": args.probe_stride,
        "seed": args.seed,
        "out": args.out,
        "randomize_marked": args.randomize_marked,
        "workers": args.workers,
    }
    if args.window is not None:
        if len(args.window) != 3:
            raise _UsageError("--window expects LO,HI,POINTS")
        spec.window = (args.window[0], args.window[1], int(args.window[2]))
    if args.marked is not None:
        if len(args.marked) != 2:
            raise _UsageError("--marked expects X,Y")
        spec.marked = (args.marked[0], args.marked[1])
    for name, value in overrides.items():
        if value is not None:
            setattr(spec, name, value)
    return spec


def _cmd_run(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    try:
        spec.validate()
    except ValueError as exc:
        raise _UsageError(str(exc))
    records = run_experiment(spec)
    by_side: dict[tuple[int, float], float] = {}
    for r in records:
        key = (r.side, r.delta)
        by_side[key] = max(by_side.get(key, 0.0), r.marked_probability)
    for (side, delta), peak in sorted(by_side.items()):
        print(f"side={side:4d} delta={delta:.4f} peak marked probability={peak:.4f}")
    if spec.out:
        print(f"wrote {len(records)} records to {spec.out}")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    records = read_records(args.input)
    report = scaling_report(records)
    for algo, entry in report["algos"].items():
        band = entry["band"]
        print(
            f"{algo}: cost / {entry['composite']} in "
            f"[{band['min']:.3f}, {band['max']:.3f}] (ratio {band['ratio']:.3f}), "
            f"fit slope {entry['fit']['slope']:.3f}"
        )
    if "ratio" in report:
        ratios = report["ratio"]["cost_per_success_ratio"]
        print(
            "akr+qaa / controlled cost-per-success ratio: "
            + ", ".join(f"{r:.3f}" for r in ratios)
            + (" (growing)" if report["ratio"]["grows"] else " (not growing)")
        )
    if args.report:
        write_report(args.report, report)
        print(f"wrote summary to {args.report}")
    return 0


def _cmd_verify() -> int:
    checks = run_verification()
    failed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += 0 if ok else 1
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_verify()
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
