"""Benchmark harness: naive, size-dividing and budgeted Tree generation.

Also holds the branching-process model used to predict how often the naive
generator runs away.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import random
import statistics
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from .cost import DEFAULT_FLOOR, GenContext, GenFailure, gc_paused, run_deep
from .fixtures import Branch, Leaf, count_constructors, register_fixtures

CSV_HEADER = ("policy", "size", "sample", "constructors", "nanos", "outcome")
DEFAULT_STEP_CAP = 1_000_000
WARMUP_RUNS = 3
BENCH_FIXTURES = ("Tree", "Expr", "Stmt")

_INT_OFFSET = 1 << 63


class PolicyKind(enum.Enum):
    NAIVE = "naive"
    SIZE_DIVISION = "sizediv"
    BUDGETED = "budgeted"


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    divisor: int = 2

    def __post_init__(self) -> None:
        if self.kind is PolicyKind.SIZE_DIVISION and self.divisor < 2:
            raise ValueError(f"size division needs a divisor of at least 2, got {self.divisor}")

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def parse(cls, name: str, divisor: int = 2) -> Policy:
        return cls(PolicyKind(name), divisor)


class Outcome(enum.Enum):
    COMPLETED = "completed"
    STEP_CAPPED = "step_capped"
    FAILED = "failed"


@dataclass(frozen=True)
class RunRecord:
    policy: str
    size: int
    sample: int
    constructors: int
    nanos: int
    outcome: Outcome


# Growth model ----------------------------------------------------------------

OffspringSampler = Callable[[np.random.Generator, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GrowthModel:
    """Recursive references made by each constructor of a type.

    ``offspring(rng, parents)`` draws the total number of children for each
    entry of ``parents``; it is only needed for simulation.
    """

    reference_counts: tuple[Fraction, ...]
    offspring: Optional[OffspringSampler] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.reference_counts:
            raise ValueError("a growth model needs at least one constructor")
        if any(c < 0 for c in self.reference_counts):
            raise ValueError("reference counts cannot be negative")

    @property
    def rate(self) -> Fraction:
        """Mean references per constructor (the mean offspring count)."""
        return Fraction(sum(self.reference_counts, Fraction(0))) / len(self.reference_counts)

    @classmethod
    def poisson(cls, rate: Fraction | int) -> GrowthModel:
        mean = float(rate)
        return cls((Fraction(rate),), lambda rng, parents: rng.poisson(mean * parents))


def naive_tree_model(size: int) -> GrowthModel:
    """The naive Tree: a fair coin between Leaf (no children) and Branch
    with a uniform ``0..size`` number of children."""
    faces = np.arange(size + 1)
    probs = np.full(size + 1, 1.0 / (size + 1))

    def offspring(rng: np.random.Generator, parents: np.ndarray) -> np.ndarray:
        branches = rng.binomial(parents, 0.5)
        counts = rng.multinomial(branches, probs)
        return counts @ faces

    return GrowthModel((Fraction(0), Fraction(size, 2)), offspring)


def expected_size(model: GrowthModel, depth_cap: int) -> Fraction:
    """Expected node count of the branching process cut off at ``depth_cap``."""
    if depth_cap < 0:
        raise ValueError("depth_cap must be non-negative")
    r = model.rate
    return sum((r**d for d in range(depth_cap + 1)), Fraction(0))


@dataclass(frozen=True)
class Simulation:
    sizes: np.ndarray  # total nodes per run, counted up to the cap
    capped: np.ndarray  # run exceeded the node cap

    @property
    def mean_size(self) -> float:
        return float(self.sizes.mean())

    @property
    def capped_fraction(self) -> float:
        return float(self.capped.mean())


def simulate(
    model: GrowthModel,
    runs: int,
    seed: int,
    depth_cap: Optional[int] = None,
    node_cap: Optional[int] = None,
) -> Simulation:
    """Generation-by-generation Monte-Carlo of the branching process.

    A run stops when it dies out, reaches ``depth_cap`` generations below the
    root, or its node total passes ``node_cap``.
    """
    if model.offspring is None:
        raise ValueError("the model has no offspring sampler")
    rng = np.random.default_rng(seed)
    alive = np.ones(runs, dtype=np.int64)
    total = np.ones(runs, dtype=np.int64)
    capped = np.zeros(runs, dtype=bool)
    depth = 0
    while alive.any() and (depth_cap is None or depth < depth_cap):
        alive = model.offspring(rng, alive).astype(np.int64)
        total += alive
        depth += 1
        if node_cap is not None:
            over = total > node_cap
            capped |= over
            alive[over] = 0
    return Simulation(total, capped)


def extinction_probability(size: int, tol: float = 1e-15) -> float:
    """Smallest fixed point of the naive Tree's offspring generating function.

    ``q = 1/2 + 1/2 * mean(q**k for k in 0..size)``, iterated up from 0.
    """
    q = 0.0
    ks = np.arange(size + 1)
    for _ in range(100_000):
        nxt = 0.5 + 0.5 * float(np.mean(q**ks))
        if abs(nxt - q) < tol:
            return nxt
        q = nxt
    return q


# Generators ------------------------------------------------------------------


def _leaf(rng: random.Random) -> Leaf:
    return tuple.__new__(Leaf, (rng.getrandbits(64) - _INT_OFFSET,))


class StepCapped(Exception):
    pass


def naive_tree(rng: random.Random, size: int, step_cap: int) -> tuple[Any, int]:
    """The unbounded ``oneof [Leaf, Branch]`` Tree with ``0..size`` children.

    Built with an explicit stack.  Raises :class:`StepCapped` once more than
    ``step_cap`` constructors would be needed.  Returns ``(tree, count)``.
    """
    steps = 0
    root: list = []
    # each frame: children collected so far, children still to build
    stack: list[list] = [[root, 1]]
    while True:
        frame = stack[-1]
        if frame[1] == 0:
            stack.pop()
            if not stack:
                return root[0], steps
            stack[-1][0].append(Branch(tuple(frame[0])))
            continue
        frame[1] -= 1
        steps += 1
        if steps > step_cap:
            raise StepCapped(steps)
        if rng.random() < 0.5:
            frame[0].append(_leaf(rng))
        else:
            stack.append([[], int(rng.random() * (size + 1))])


def size_division_tree(rng: random.Random, size: int, divisor: int, step_cap: int) -> tuple[Any, int]:
    """Like :func:`naive_tree`, but children are built at ``size // divisor``
    and size 0 forces a Leaf."""
    steps = 0
    root: list = []
    stack: list[list] = [[root, 1, size]]
    while True:
        frame = stack[-1]
        if frame[1] == 0:
            stack.pop()
            if not stack:
                return root[0], steps
            stack[-1][0].append(Branch(tuple(frame[0])))
            continue
        frame[1] -= 1
        steps += 1
        if steps > step_cap:
            raise StepCapped(steps)
        n = frame[2]
        if n == 0 or rng.random() < 0.5:
            frame[0].append(_leaf(rng))
        else:
            stack.append([[], int(rng.random() * (n + 1)), n // divisor])


def budget_floor(budget: int, per_element: int = 2) -> int:
    """A floor the fixtures can never reach from ``budget``.

    Lists prepay their length while the budget is positive and every element
    built after exhaustion spends again, so the final budget of a fixture run
    stays above ``-per_element * budget``.  The default floor is kept as
    headroom on top.
    """
    return DEFAULT_FLOOR - per_element * max(0, budget)


# Running ---------------------------------------------------------------------


def sample_seed(seed: int, size: int, sample: int) -> int:
    digest = hashlib.blake2b(f"{seed}/{size}/{sample}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _one_run(policy: Policy, size: int, seed: int, step_cap: int, budgeted_gen) -> tuple[int, int, Outcome]:
    start = time.monotonic_ns()
    try:
        if policy.kind is PolicyKind.BUDGETED:
            value = budgeted_gen.run(GenContext(seed, size, budget_floor(size)))
            nanos = time.monotonic_ns() - start
            return count_constructors(value), nanos, Outcome.COMPLETED
        rng = random.Random(seed)
        if policy.kind is PolicyKind.NAIVE:
            _, count = naive_tree(rng, size, step_cap)
        else:
            _, count = size_division_tree(rng, size, policy.divisor, step_cap)
        return count, time.monotonic_ns() - start, Outcome.COMPLETED
    except StepCapped:
        return step_cap, time.monotonic_ns() - start, Outcome.STEP_CAPPED
    except GenFailure:
        return 0, time.monotonic_ns() - start, Outcome.FAILED


def run_bench(
    policy: Policy,
    sizes: Sequence[int],
    samples_per_size: int,
    seed: int,
    step_cap: int = DEFAULT_STEP_CAP,
    warmup: int = WARMUP_RUNS,
    progress: Optional[Callable[[RunRecord], None]] = None,
    fixture: str = "Tree",
) -> list[RunRecord]:
    """Generate Tree values under ``policy`` and record size, time and outcome.

    ``warmup`` extra runs per size are made first and discarded.  The
    budgeted policy can also run another fixture (``"Expr"`` or ``"Stmt"``);
    the naive and size-dividing generators only exist for Tree.
    """
    if step_cap <= 0:
        raise ValueError("step_cap must be positive")
    registry = register_fixtures()
    if fixture not in BENCH_FIXTURES:
        raise ValueError(f"unknown fixture {fixture!r}; expected one of {', '.join(BENCH_FIXTURES)}")
    if fixture != "Tree" and policy.kind is not PolicyKind.BUDGETED:
        raise ValueError(f"the {policy.name} policy only generates Tree")
    budgeted_gen = registry[fixture].generator

    def _all() -> list[RunRecord]:
        records: list[RunRecord] = []
        for size in sizes:
            for w in range(warmup):
                with gc_paused():
                    _one_run(policy, size, sample_seed(seed, size, -1 - w), step_cap, budgeted_gen)
            for i in range(samples_per_size):
                with gc_paused():
                    count, nanos, outcome = _one_run(
                        policy, size, sample_seed(seed, size, i), step_cap, budgeted_gen
                    )
                record = RunRecord(policy.name, size, i, count, nanos, outcome)
                records.append(record)
                if progress is not None:
                    progress(record)
        return records

    return run_deep(_all)


def medians(records: Iterable[RunRecord]) -> dict[int, tuple[float, float]]:
    """Per size: median constructor count and median nanoseconds."""
    by_size: dict[int, list[RunRecord]] = {}
    for r in records:
        by_size.setdefault(r.size, []).append(r)
    return {
        size: (
            statistics.median(r.constructors for r in rs),
            statistics.median(r.nanos for r in rs),
        )
        for size, rs in sorted(by_size.items())
    }


def outcome_fractions(records: Iterable[RunRecord]) -> dict[int, dict[Outcome, float]]:
    by_size: dict[int, list[RunRecord]] = {}
    for r in records:
        by_size.setdefault(r.size, []).append(r)
    return {
        size: {o: sum(r.outcome is o for r in rs) / len(rs) for o in Outcome}
        for size, rs in sorted(by_size.items())
    }


# CSV -------------------------------------------------------------------------


def emit_csv(records: Iterable[RunRecord], path: str | Path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in records:
                writer.writerow((r.policy, r.size, r.sample, r.constructors, r.nanos, r.outcome.value))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_csv(path: str | Path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        return [
            RunRecord(p, int(size), int(sample), int(cons), int(nanos), Outcome(outcome))
            for p, size, sample, cons, nanos, outcome in reader
        ]
