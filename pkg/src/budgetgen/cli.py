"""Command-line entry points: ``bench`` and ``budgetgen {bench,laws}``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .bench import BENCH_FIXTURES, DEFAULT_STEP_CAP, Policy, PolicyKind, emit_csv, medians, outcome_fractions, run_bench


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")
    if not sizes or any(s < 0 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be a non-empty list of non-negative integers")
    return sizes


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def add_bench_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--policy", required=True, choices=[k.value for k in PolicyKind])
    parser.add_argument("--sizes", type=_sizes, default=[10, 100, 1000])
    parser.add_argument("--samples", type=_positive, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--step-cap", type=_positive, default=DEFAULT_STEP_CAP)
    parser.add_argument("--csv", required=True, help="output CSV path")
    parser.add_argument("--divisor", type=int, default=2, help="size divisor for sizediv")
    parser.add_argument(
        "--fixture", choices=BENCH_FIXTURES, default="Tree", help="datatype for the budgeted policy"
    )
    parser.add_argument("--figure", help="figure path (default: the CSV path with .png)")
    parser.add_argument("--no-figure", action="store_true", help="skip rendering the figure")
    parser.add_argument("--quiet", action="store_true")


def run_bench_command(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.policy == PolicyKind.SIZE_DIVISION.value and args.divisor < 2:
        parser.error("--divisor must be at least 2")
    if args.fixture != "Tree" and args.policy != PolicyKind.BUDGETED.value:
        parser.error(f"--fixture {args.fixture} needs --policy budgeted")
    policy = Policy.parse(args.policy, args.divisor)
    records = run_bench(policy, args.sizes, args.samples, args.seed, args.step_cap, fixture=args.fixture)
    try:
        emit_csv(records, args.csv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not args.no_figure:
        from .plotting import figure_path_for, render_bench_figure

        figure = args.figure or figure_path_for(args.csv)
        render_bench_figure(records, figure, title=f"{policy.name} {args.fixture} generation")
    if not args.quiet:
        fractions = outcome_fractions(records)
        for size, (cons, nanos) in medians(records).items():
            mix = ", ".join(f"{o.value} {f:.0%}" for o, f in fractions[size].items() if f)
            print(f"{policy.name} size={size}: median {cons:g} constructors, {nanos / 1e6:.3f} ms ({mix})")
    return 0


def bench_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="bench", description="Benchmark generation policies on the fixture datatypes.")
    add_bench_arguments(parser)
    args = parser.parse_args(argv)
    return run_bench_command(args, parser)


def run_laws_command(args: argparse.Namespace) -> int:
    from .fixtures import fixture_instances, register_fixtures
    from .instances import standard_instances
    from .laws import arbitrary_laws, exit_status, format_reports, less_arbitrary_laws, run_laws

    registry = register_fixtures()
    suites = []
    for inst in fixture_instances(registry):
        laws = arbitrary_laws(inst) + less_arbitrary_laws(inst, registry.cheapest[inst.name])
        suites.append((inst.name, laws))
    for inst in standard_instances():
        suites.append((inst.name, arbitrary_laws(inst)))
    reports = run_laws(suites, seed=args.seed, samples=args.samples)
    print(format_reports(reports))
    return exit_status(reports)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="budgetgen", description="Budgeted test-data generation tools.")
    commands = parser.add_subparsers(dest="command", required=True)
    bench_parser = commands.add_parser("bench", help="benchmark Tree generation policies")
    add_bench_arguments(bench_parser)
    laws_parser = commands.add_parser("laws", help="run the law suites on the shipped instances")
    laws_parser.add_argument("--seed", type=int, default=0)
    laws_parser.add_argument("--samples", type=_positive, default=None)
    args = parser.parse_args(argv)
    if args.command == "bench":
        return run_bench_command(args, bench_parser)
    return run_laws_command(args)


if __name__ == "__main__":
    sys.exit(main())
