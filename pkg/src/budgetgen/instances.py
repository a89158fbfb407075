"""Ready-made generators and shrinkers for scalars and standard containers."""

from __future__ import annotations

import enum
import math
import sys
from array import array
from dataclasses import dataclass
from functools import singledispatch
from typing import Any, Callable, Generic, Iterable, TypeVar

from .combinators import draw_int, gen_list
from .cost import BatchGenerator, GenContext, Generator, budget_gate, spend

T = TypeVar("T")
A = TypeVar("A")
B = TypeVar("B")

_INT_BITS = 64
_BIG_BITS = 128
_FLOAT_SPAN = 1e9


class ScalarKind(enum.Enum):
    BOOL = "bool"
    INT = "int"
    INTEGER = "integer"
    FLOAT = "float"
    CHAR = "char"
    TEXT = "text"
    SCIENTIFIC = "scientific"


@dataclass(frozen=True)
class Scientific:
    """A decimal number ``coefficient * 10 ** exponent``."""

    coefficient: int
    exponent: int

    def __float__(self) -> float:
        try:
            return float(self.coefficient) * 10.0 ** self.exponent
        except OverflowError:
            return math.copysign(math.inf, self.coefficient)


def _signed(ctx: GenContext, bits: int) -> int:
    return ctx.rng.getrandbits(bits) - (1 << (bits - 1))


def _bool(ctx: GenContext) -> bool:
    return ctx.rng.random() < 0.5


_INT_OFFSET = 1 << (_INT_BITS - 1)


def _int(ctx: GenContext) -> int:
    # inlined: this is on the hot path of every generated leaf
    return ctx.rng.getrandbits(_INT_BITS) - _INT_OFFSET


_SIGN_BYTES = (_INT_OFFSET).to_bytes(8, "little")


def _int_batch(ctx: GenContext, k: int) -> list[int]:
    """``k`` draws of :func:`_int` in one call.

    ``getrandbits(64 * k)`` yields the same 32-bit words as ``k`` calls of
    ``getrandbits(64)``, earliest draw in the lowest bits.  Flipping each
    chunk's top bit and reading it as signed subtracts the offset.
    """
    if k <= 0:
        return []
    raw = ctx.rng.getrandbits(_INT_BITS * k) ^ int.from_bytes(_SIGN_BYTES * k, "little")
    out = array("q", raw.to_bytes(8 * k, "little"))
    if sys.byteorder == "big":
        out.byteswap()
    return out.tolist()


def _integer(ctx: GenContext) -> int:
    return _signed(ctx, _BIG_BITS)


def _float(ctx: GenContext) -> float:
    return ctx.rng.uniform(-_FLOAT_SPAN, _FLOAT_SPAN)


_PRINTABLE = [chr(c) for c in range(0x20, 0x7F)]


def _char(ctx: GenContext) -> str:
    return chr(draw_int(ctx, 0x20, 0x7E))


def _scientific(ctx: GenContext) -> Scientific:
    return Scientific(_integer(ctx), _int(ctx))


def _text_costly(ctx: GenContext) -> str:
    n = draw_int(ctx, 1, max(1, ctx.remaining))
    spend(ctx, n)
    # choices() draws floor(random() * 95) per character, the same draw as _char
    return "".join(ctx.rng.choices(_PRINTABLE, k=n))


_TEXT = budget_gate(Generator(lambda ctx: ""), Generator(_text_costly))

_FLAT: dict[ScalarKind, Generator] = {
    ScalarKind.BOOL: Generator(_bool),
    ScalarKind.INT: BatchGenerator(_int, _int_batch),
    ScalarKind.INTEGER: Generator(_integer),
    ScalarKind.FLOAT: Generator(_float),
    ScalarKind.CHAR: Generator(_char),
    ScalarKind.SCIENTIFIC: Generator(_scientific),
    ScalarKind.TEXT: _TEXT,
}


def flat_gen(kind: ScalarKind) -> Generator:
    """Generator for a scalar kind.

    Everything except text spends nothing.  Text is a budgeted list of
    characters and pays for its length like any list.
    """
    return _FLAT[kind]


class ContainerKind(enum.Enum):
    LIST = "list"
    VECTOR = "vector"
    SET = "set"
    MAP = "map"


_CONVERT: dict[ContainerKind, Callable[[list], Any]] = {
    ContainerKind.LIST: lambda xs: xs,
    ContainerKind.VECTOR: tuple,
    ContainerKind.SET: frozenset,
    ContainerKind.MAP: dict,
}


def gen_container(elem: Generator, kind: ContainerKind) -> Generator:
    """A budgeted list converted to ``kind``.

    Sets and maps drop duplicate elements/keys, so they can come out shorter
    than the list they were built from.  Map elements must be pairs.
    """
    return gen_list(elem).map(_CONVERT[kind])


def gen_pair(ga: Generator[A], gb: Generator[B]) -> Generator[tuple[A, B]]:
    def run(ctx: GenContext) -> tuple[A, B]:
        a = ga.run(ctx)
        return a, gb.run(ctx)

    return Generator(run)


# Shrinking ------------------------------------------------------------------


@singledispatch
def shrink(value: Any) -> list:
    """Strictly smaller candidates for ``value``; never contains ``value``."""
    return []


@shrink.register
def _(value: bool) -> list:
    return [False] if value else []


@shrink.register
def _(value: int) -> list:
    if value == 0:
        return []
    out = [0]
    if value < 0:
        out.append(-value)
    half = value // 2 if value > 0 else -((-value) // 2)
    while half != 0:
        cand = value - half
        if cand not in out and cand != value:
            out.append(cand)
        half = half // 2 if half > 0 else -((-half) // 2)
    return out


@shrink.register
def _(value: float) -> list:
    if value == 0.0 and not math.isnan(value):
        return []
    if math.isnan(value) or math.isinf(value):
        return [0.0]
    out = [0.0]
    truncated = float(math.trunc(value))
    if truncated != value and truncated not in out:
        out.append(truncated)
    half = value / 2
    if half != value and half not in out:
        out.append(half)
    return out


def _shrink_seq(items: list, rebuild: Callable[[list], Any], elem_shrink=None) -> list:
    """Drop halves, drop single elements, then shrink elements in place."""
    elem_shrink = elem_shrink or shrink
    n = len(items)
    if n == 0:
        return []
    out: list = [rebuild([])]
    k = n // 2
    while k > 0:
        for start in range(0, n - k + 1, k):
            cand = items[:start] + items[start + k:]
            if len(cand) < n:
                out.append(rebuild(cand))
        k //= 2
    for i, x in enumerate(items):
        for smaller in elem_shrink(x)[:4]:
            out.append(rebuild(items[:i] + [smaller] + items[i + 1:]))
    return out


def _dedup(original: Any, cands: Iterable) -> list:
    out: list = []
    for c in cands:
        if c != original and c not in out:
            out.append(c)
    return out


def _shrink_char(c: str) -> list[str]:
    # toward 'a' then space; code points only go down, so this terminates
    return [t for t in "a " if t < c]


@shrink.register
def _(value: str) -> list:
    return _dedup(value, _shrink_seq(list(value), "".join, _shrink_char))


@shrink.register
def _(value: list) -> list:
    return _dedup(value, _shrink_seq(list(value), list))


@shrink.register
def _(value: tuple) -> list:
    if hasattr(value, "_fields"):
        # named tuples: shrink one field at a time
        out = []
        for i, x in enumerate(value):
            for smaller in shrink(x):
                out.append(type(value)(*value[:i], smaller, *value[i + 1:]))
        return _dedup(value, out)
    return _dedup(value, _shrink_seq(list(value), tuple))


@shrink.register
def _(value: frozenset) -> list:
    return _dedup(value, _shrink_seq(sorted(value, key=repr), frozenset))


@shrink.register
def _(value: set) -> list:
    return _dedup(value, _shrink_seq(sorted(value, key=repr), set))


@shrink.register
def _(value: dict) -> list:
    return _dedup(value, _shrink_seq(list(value.items()), dict, shrink_pair))


@shrink.register
def _(value: Scientific) -> list:
    out = [Scientific(c, value.exponent) for c in shrink(value.coefficient)]
    out += [Scientific(value.coefficient, e) for e in shrink(value.exponent)]
    return _dedup(value, out)


@dataclass(frozen=True)
class Instance(Generic[T]):
    """What the law suites need to know about a type."""

    name: str
    generator: Generator
    shrink: Callable[[Any], list] = shrink
    eq: Callable[[Any, Any], bool] = lambda a, b: a == b
    show: Callable[[Any], str] = repr


def scalar_instance(kind: ScalarKind) -> Instance:
    return Instance(kind.value, flat_gen(kind))


def container_instance(elem: Generator, kind: ContainerKind, name: str | None = None) -> Instance:
    return Instance(name or kind.value, gen_container(elem, kind))


def shrink_pair(value: tuple) -> list:
    """Shrink one component at a time, keeping the pair shape."""
    a, b = value
    out = [(x, b) for x in shrink(a)] + [(a, y) for y in shrink(b)]
    return _dedup(value, out)


def pair_instance(a: Instance, b: Instance) -> Instance:
    return Instance(f"({a.name}, {b.name})", gen_pair(a.generator, b.generator), shrink_pair)


def standard_instances() -> list[Instance]:
    """Every scalar kind, each container over machine integers, and a pair."""
    ints = flat_gen(ScalarKind.INT)
    out = [scalar_instance(kind) for kind in ScalarKind]
    for kind in ContainerKind:
        elem = gen_pair(ints, ints) if kind is ContainerKind.MAP else ints
        out.append(container_instance(elem, kind, f"{kind.value} of int"))
    out.append(pair_instance(scalar_instance(ScalarKind.INT), scalar_instance(ScalarKind.TEXT)))
    return out
