"""Budget bookkeeping for generators.

A generator runs against a :class:`GenContext` that carries the random source
and the remaining budget.  Costly constructors spend from the budget; once it
is exhausted, :func:`budget_gate` routes generation to the cheap fallback.  A
budget that keeps falling past the floor means some recursive type has no
cheap way out, and generation fails instead of looping.
"""

from __future__ import annotations

import enum
import gc
import random
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable, Generic, Iterator, TypeVar

T = TypeVar("T")
U = TypeVar("U")

#: Remaining constructor-spend units.  May go negative during fallback.
Budget = int

DEFAULT_FLOOR: Budget = -10000

NO_LOOP_BREAKER = "Recursive structure with no loop breaker."


class FailureKind(enum.Enum):
    LOOP_BREAKER_MISSING = "LoopBreakerMissing"
    EMPTY_CHOICE = "EmptyChoice"
    BAD_WEIGHTS = "BadWeights"


class GenFailure(Exception):
    """Generation could not produce a value."""

    def __init__(self, kind: FailureKind, detail: str):
        super().__init__(detail)
        self.kind = kind
        self.detail = detail

    def __repr__(self) -> str:
        return f"GenFailure({self.kind.value}, {self.detail!r})"


def loop_breaker_missing() -> GenFailure:
    return GenFailure(FailureKind.LOOP_BREAKER_MISSING, NO_LOOP_BREAKER)


class GenContext:
    """A single generation session: random source, remaining budget, floor."""

    __slots__ = ("rng", "remaining", "floor", "spent_events")

    def __init__(self, seed: int, budget: Budget, floor: Budget = DEFAULT_FLOOR):
        if floor >= 0:
            raise ValueError(f"floor must be negative, got {floor}")
        self.rng = random.Random(seed)
        self.remaining = budget
        self.floor = floor
        # number of spend calls, for termination bounds in tests
        self.spent_events = 0

    def __repr__(self) -> str:
        return f"GenContext(remaining={self.remaining}, floor={self.floor})"


class Generator(Generic[T]):
    """A recipe producing a ``T`` when run against a :class:`GenContext`.

    ``run`` raises :class:`GenFailure` when generation cannot complete.
    """

    __slots__ = ("run",)

    def __init__(self, run: Callable[[GenContext], T]):
        self.run = run

    def map(self, f: Callable[[T], U]) -> Generator[U]:
        run = self.run
        return Generator(lambda ctx: f(run(ctx)))

    def bind(self, k: Callable[[T], Generator[U]]) -> Generator[U]:
        run = self.run
        return Generator(lambda ctx: k(run(ctx)).run(ctx))

    def then(self, other: Generator[U]) -> Generator[U]:
        """Run ``self`` for its effect, then ``other``."""
        first, second = self.run, other.run

        def _run(ctx: GenContext) -> U:
            first(ctx)
            return second(ctx)

        return Generator(_run)


class BatchGenerator(Generator[T]):
    """A spend-free generator that can also draw ``k`` values at once.

    ``batch(ctx, k)`` must return what ``k`` consecutive runs would, leaving
    the random source in the same state.
    """

    __slots__ = ("batch",)

    def __init__(self, run: Callable[[GenContext], T], batch: Callable[[GenContext, int], list]):
        super().__init__(run)
        self.batch = batch


class GatedGenerator(Generator[T]):
    """A generator that charges one unit and then gates between ``cheap``
    and its costly body, like a generated datatype.

    List generation uses ``cheap`` directly for elements produced after the
    budget is gone, and ``cheap_batch(ctx, k)`` (when set) for a run of ``k``
    such elements.
    """

    __slots__ = ("cheap", "cheap_batch")

    def __init__(
        self,
        run: Callable[[GenContext], T],
        cheap: Generator[T],
        cheap_batch: Callable[[GenContext, int], list] | None = None,
    ):
        super().__init__(run)
        self.cheap = cheap
        self.cheap_batch = cheap_batch


def enter_cheap_each(cheap: Callable[[GenContext], T], ctx: GenContext, k: int, out: list) -> None:
    """Append ``k`` values, each charged one unit and built by ``cheap``.

    Same effect as ``k`` runs of a gated generator at a non-positive budget.
    """
    floor = ctx.floor
    append = out.append
    for _ in range(k):
        left = ctx.remaining - 1
        ctx.remaining = left
        ctx.spent_events += 1
        if left <= floor:
            raise loop_breaker_missing()
        append(cheap(ctx))


def pure(value: T) -> Generator[T]:
    return Generator(lambda ctx: value)


def check_budget(ctx: GenContext) -> None:
    if ctx.remaining < ctx.floor:
        raise loop_breaker_missing()


def spend(ctx: GenContext, amount: Budget) -> None:
    """Charge ``amount`` units, then check the floor."""
    if amount < 0:
        raise ValueError(f"cannot spend a negative amount ({amount})")
    ctx.remaining -= amount
    ctx.spent_events += 1
    if ctx.remaining < ctx.floor:
        raise loop_breaker_missing()


def spending(amount: Budget) -> Generator[None]:
    """Generator form of :func:`spend`."""
    return Generator(lambda ctx: spend(ctx, amount))


def checking_budget() -> Generator[None]:
    return Generator(check_budget)


def current_budget() -> Generator[Budget]:
    return Generator(lambda ctx: ctx.remaining)


def budget_gate(cheap: Generator[T], costly: Generator[T]) -> Generator[T]:
    """Run ``costly`` while budget is positive, ``cheap`` until the floor.

    At or below the floor neither arm runs.
    """
    cheap_run, costly_run = cheap.run, costly.run

    def _run(ctx: GenContext) -> T:
        budget = ctx.remaining
        if budget > 0:
            return costly_run(ctx)
        if budget > ctx.floor:
            return cheap_run(ctx)
        raise loop_breaker_missing()

    return Generator(_run)


def spend_marked_map(f: Callable[[T], U], g: Generator[T]) -> Generator[U]:
    """Map for a costly constructor: spends one unit before running ``g``."""
    run = g.run

    def _run(ctx: GenContext) -> U:
        spend(ctx, 1)
        return f(run(ctx))

    return Generator(_run)


# Generation of recursive shapes recurses once per nested constructor, and
# fallback chains can reach |floor| levels.  Runs go through one worker
# thread with a large stack so deep values do not hit the C stack limit.
_STACK_BYTES = 512 * 1024 * 1024
_RECURSION_LIMIT = 1_000_000
_worker: ThreadPoolExecutor | None = None
_worker_ident: int | None = None
_worker_lock = threading.Lock()


def _mark_worker() -> None:
    global _worker_ident
    _worker_ident = threading.get_ident()


def _get_worker() -> ThreadPoolExecutor:
    global _worker
    with _worker_lock:
        if _worker is None:
            old = threading.stack_size()
            threading.stack_size(_STACK_BYTES)
            try:
                _worker = ThreadPoolExecutor(
                    max_workers=1,
                    thread_name_prefix="budgetgen-deep",
                    initializer=_mark_worker,
                )
                _worker.submit(lambda: None).result()
            finally:
                threading.stack_size(old)
            if sys.getrecursionlimit() < _RECURSION_LIMIT:
                sys.setrecursionlimit(_RECURSION_LIMIT)
        return _worker


def run_deep(fn: Callable[..., T], *args: Any) -> T:
    """Call ``fn(*args)`` on the large-stack worker thread."""
    if threading.get_ident() == _worker_ident:
        return fn(*args)
    return _get_worker().submit(fn, *args).result()


@contextmanager
def gc_paused() -> Iterator[None]:
    """Suspend the cyclic collector while a run allocates.

    Generated values are acyclic, and large budgets create tens of millions
    of nodes; periodic full collections would make runs superlinear.
    """
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def _run_with_cost(gen: Generator[T], cost: Budget, seed: int, floor: Budget) -> T:
    with gc_paused():
        return gen.run(GenContext(seed, cost, floor))


def with_cost(
    cost: Budget, gen: Generator[T], seed: int, floor: Budget = DEFAULT_FLOOR
) -> T:
    """Run ``gen`` in a fresh context starting with ``cost`` units."""
    return run_deep(_run_with_cost, gen, cost, seed, floor)


def run_in_context(gen: Generator[T], ctx: GenContext) -> T:
    """Run ``gen`` against an existing context (deep-stack safe)."""
    return run_deep(gen.run, ctx)


class SizedRunner(Generic[T]):
    """Adapts a budgeted generator to the property runner's size parameter.

    The runner's size becomes the starting budget.
    """

    __slots__ = ("gen", "floor")

    def __init__(self, gen: Generator[T], floor: Budget = DEFAULT_FLOOR):
        self.gen = gen
        self.floor = floor

    def __call__(self, size: int, seed: int) -> T:
        return with_cost(size, self.gen, seed, self.floor)

    def samples(self, size: int, seeds) -> list[T]:
        gen, floor = self.gen, self.floor

        def _all() -> list[T]:
            with gc_paused():
                return [gen.run(GenContext(s, size, floor)) for s in seeds]

        return run_deep(_all)


def sized_cost(gen: Generator[T], floor: Budget = DEFAULT_FLOOR) -> SizedRunner[T]:
    return SizedRunner(gen, floor)
