"""Budget-aware versions of the classic generator combinators."""

from __future__ import annotations

from bisect import bisect_left
from itertools import accumulate
from typing import Callable, Sequence, TypeVar

from .cost import (
    FailureKind,
    GenContext,
    GatedGenerator,
    GenFailure,
    Generator,
    budget_gate,
    enter_cheap_each,
    pure,
    spend,
)

T = TypeVar("T")
U = TypeVar("U")

_FAST_RANGE = 1 << 32


def draw_int(ctx: GenContext, lo: int, hi: int) -> int:
    """Uniform integer in ``[lo, hi]``; caller guarantees ``lo <= hi``."""
    n = hi - lo + 1
    if n <= _FAST_RANGE:
        return lo + int(ctx.rng.random() * n)
    return ctx.rng.randrange(lo, hi + 1)


def choose(lo: T, hi: T) -> Generator[T]:
    """Uniform draw from ``[lo, hi]`` (ints, floats or single characters).

    Spends nothing.
    """
    if lo > hi:  # type: ignore[operator]
        raise GenFailure(FailureKind.EMPTY_CHOICE, f"choose: empty range ({lo!r}, {hi!r})")
    if isinstance(lo, bool) or isinstance(hi, bool):
        lo_i, hi_i = int(lo), int(hi)
        return Generator(lambda ctx: bool(draw_int(ctx, lo_i, hi_i)))
    if isinstance(lo, int) and isinstance(hi, int):
        return Generator(lambda ctx: draw_int(ctx, lo, hi))
    if isinstance(lo, str) and isinstance(hi, str):
        if len(lo) != 1 or len(hi) != 1:
            raise TypeError("choose on strings needs single characters")
        a, b = ord(lo), ord(hi)
        return Generator(lambda ctx: chr(draw_int(ctx, a, b)))
    if isinstance(lo, (int, float)) and isinstance(hi, (int, float)):
        a, b = float(lo), float(hi)
        return Generator(lambda ctx: ctx.rng.uniform(a, b))
    raise TypeError(f"choose: unsupported scalar types {type(lo)!r}, {type(hi)!r}")


def oneof(gens: Sequence[Generator[T]]) -> Generator[T]:
    if not gens:
        raise GenFailure(FailureKind.EMPTY_CHOICE, "LessArbitrary.oneof used with empty list")
    runs = [g.run for g in gens]
    top = len(runs) - 1
    return Generator(lambda ctx: runs[draw_int(ctx, 0, top)](ctx))


def elements(xs: Sequence[T]) -> Generator[T]:
    if not xs:
        raise GenFailure(FailureKind.EMPTY_CHOICE, "LessArbitrary.elements used with empty list")
    items = list(xs)
    top = len(items) - 1
    return Generator(lambda ctx: items[draw_int(ctx, 0, top)])


def frequency(entries: Sequence[tuple[int, Generator[T]]]) -> Generator[T]:
    """Weighted choice: draw ``n`` in ``[1, total]`` and pick the entry it lands on.

    Zero-weight entries are never selected.
    """
    if not entries:
        raise GenFailure(FailureKind.EMPTY_CHOICE, "LessArbitrary.frequency used with empty list")
    weights = [w for w, _ in entries]
    if any(w < 0 for w in weights):
        raise GenFailure(FailureKind.BAD_WEIGHTS, "LessArbitrary.frequency: negative weight")
    if all(w == 0 for w in weights):
        raise GenFailure(FailureKind.BAD_WEIGHTS, "LessArbitrary.frequency: all weights were zero")
    runs = [g.run for _, g in entries]
    # first index whose running total reaches n is exactly the entry the
    # subtract-and-walk pick lands on
    cumulative = list(accumulate(weights))
    total = cumulative[-1]

    def _run(ctx: GenContext) -> T:
        n = draw_int(ctx, 1, total)
        return runs[bisect_left(cumulative, n)](ctx)

    return Generator(_run)


def pick(n: int, entries: Sequence[tuple[int, T]]) -> T:
    """Walk ``entries`` subtracting weights until ``n`` fits."""
    for k, x in entries:
        if n <= k:
            return x
        n -= k
    raise GenFailure(FailureKind.EMPTY_CHOICE, "LessArbitrary.pick used with empty list")


def budget_choose() -> Generator[int]:
    """Uniform size in ``[1, max(1, remaining)]`` for lists and arrays."""
    return Generator(lambda ctx: draw_int(ctx, 1, max(1, ctx.remaining)))


def such_that(g: Generator[T], pred: Callable[[T], bool]) -> Generator[T]:
    """Retry ``g`` until ``pred`` holds, paying one unit per rejection.

    The floor bounds the number of retries.
    """
    run = g.run

    def _run(ctx: GenContext) -> T:
        while True:
            value = run(ctx)
            if pred(value):
                return value
            spend(ctx, 1)

    return Generator(_run)


def for_all(g: Generator[T], prop: Callable[[T], Generator[U]]) -> Generator[U]:
    return g.bind(prop)


def _list_costly(elem: Generator[T]) -> Generator[list[T]]:
    def _run(ctx: GenContext) -> list[T]:
        n = draw_int(ctx, 1, max(1, ctx.remaining))
        spend(ctx, n)
        run = elem.run
        return [run(ctx) for _ in range(n)]

    def _run_gated(ctx: GenContext) -> list[T]:
        n = draw_int(ctx, 1, max(1, ctx.remaining))
        spend(ctx, n)
        run = elem.run
        out: list[T] = []
        append = out.append
        i = 0
        while i < n and ctx.remaining > 1:
            append(run(ctx))
            i += 1
        if i < n:
            # every remaining element would charge itself into a non-positive
            # budget and take the cheap arm; do that here without the gate
            batch = elem.cheap_batch  # type: ignore[attr-defined]
            if batch is not None:
                out.extend(batch(ctx, n - i))
            else:
                enter_cheap_each(elem.cheap.run, ctx, n - i, out)  # type: ignore[attr-defined]
        return out

    return Generator(_run_gated if isinstance(elem, GatedGenerator) else _run)


def gen_list(elem: Generator[T]) -> Generator[list[T]]:
    """Empty when the budget is gone, otherwise a prepaid list of 1..budget elements."""
    return budget_gate(Generator(lambda ctx: []), _list_costly(elem))


def vector_of(n: int, elem: Generator[T]) -> Generator[list[T]]:
    return Generator(lambda ctx: [elem.run(ctx) for _ in range(n)])


__all__ = [
    "budget_choose",
    "choose",
    "draw_int",
    "elements",
    "for_all",
    "frequency",
    "gen_list",
    "oneof",
    "pick",
    "pure",
    "such_that",
    "vector_of",
]
