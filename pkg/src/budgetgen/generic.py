"""Generation driven by a datatype's shape.

:func:`gen_from_shape` spends one unit per datatype node and then either
walks the shape at random (budget left) or takes the statically cheapest
path (budget gone).  Shapes are compiled to closures once and cached.
"""

from __future__ import annotations

import weakref
from typing import Any, Callable, NamedTuple, Optional

from . import shape as sh
from .combinators import gen_list
from .cost import (
    BatchGenerator,
    GatedGenerator,
    GenContext,
    Generator,
    budget_gate,
    enter_cheap_each,
    loop_breaker_missing,
    pure,
)
from .shape import Con, Data, Field, FieldClass, Product, Sum, Unit


class Constructed(NamedTuple):
    """Default value for shapes registered without an assembly callback."""

    con: str
    fields: tuple


Run = Callable[[GenContext], Any]


def _default_assemble(names: list[str]) -> Callable[[int, list], Any]:
    def assemble(index: int, fields: list) -> Constructed:
        return Constructed(names[index], tuple(fields))

    return assemble


def _con_run(index: int, node: Con, assemble, cheap: bool) -> Run:
    fields = sh.fields_of(node)
    gens = [f.cheap_gen if cheap else f.gen for f in fields]
    make = node.make
    if make is None:
        make = lambda values: assemble(index, values)  # noqa: E731
    n = len(gens)
    # generator objects are looked up per call: recursive references are
    # compiled lazily and swap in their run function afterwards
    if n == 0:
        return lambda ctx: make([])
    if n == 1:
        (g0,) = gens
        return lambda ctx: make([g0.run(ctx)])
    if n == 2:
        g0, g1 = gens

        def run2(ctx: GenContext) -> Any:
            a = g0.run(ctx)
            return make([a, g1.run(ctx)])

        return run2
    return lambda ctx: make([g.run(ctx) for g in gens])


def _walk(node, assemble, counter: list[int], cheap: bool) -> Run:
    if isinstance(node, Sum):
        left = _walk(node.left, assemble, counter, cheap)
        right = _walk(node.right, assemble, counter, cheap)
        if cheap:
            # both sides were compiled so constructor indices stay aligned
            return left if sh.cheapest_side(node.left, node.right) is sh.Side.LEFT else right
        lw = node.left.sum_len
        total = lw + node.right.sum_len

        def choose_side(ctx: GenContext) -> Any:
            # same draw as frequency [(lw, left), (rw, right)]:
            # 1 + floor(u * total) <= lw  <=>  u * total < lw
            if ctx.rng.random() * total < lw:
                return left(ctx)
            return right(ctx)

        return choose_side
    if isinstance(node, Con):
        index = counter[0]
        counter[0] += 1
        return _con_run(index, node, assemble, cheap)
    if isinstance(node, (Product, Field, Unit)):
        # a bare field list outside any constructor acts as one constructor
        index = counter[0]
        counter[0] += 1
        return _con_run(index, Con("", node), assemble, cheap)
    raise sh.ShapeError(f"unexpected node {type(node).__name__} in a shape body")


class _Compiled(NamedTuple):
    costly: Run
    cheapest: Run
    data_run: Run


_cache: "weakref.WeakKeyDictionary[Data, _Compiled]" = weakref.WeakKeyDictionary()


def _compile(s: Data) -> _Compiled:
    hit = _cache.get(s)
    if hit is not None:
        return hit
    sh.validate(s)
    assemble = s.assemble or _default_assemble([c.name for c in sh.constructors(s)])
    costly = _walk(s.body, assemble, [0], cheap=False)
    cheapest = _walk(s.body, assemble, [0], cheap=True)

    def data_run(ctx: GenContext) -> Any:
        # one unit per datatype node, then the budget gate
        ctx.remaining -= 1
        ctx.spent_events += 1
        budget = ctx.remaining
        if budget > 0:
            return costly(ctx)
        if budget > ctx.floor:
            return cheapest(ctx)
        raise loop_breaker_missing()

    compiled = _Compiled(costly, cheapest, data_run)
    _cache[s] = compiled
    return compiled


def gen_from_shape(s: Data) -> Generator:
    """Budgeted random generation of a value of the datatype ``s``."""
    compiled = _compile(s)
    gen = GatedGenerator(compiled.data_run, Generator(compiled.cheapest))
    gen.cheap_batch = lambda ctx, k: _settle_batch(gen, s, compiled.cheapest)(ctx, k)
    return gen


def _settle_batch(gen: GatedGenerator, s: Data, cheapest: Run) -> Callable[[GenContext, int], list]:
    # decided on first use, once every referenced datatype is defined
    batch = _cheap_batch(s, cheapest)
    gen.cheap_batch = batch
    return batch


def costly_walk(s: Data) -> Generator:
    """The random walk over ``s`` without the per-datatype charge and gate."""
    return Generator(_compile(s).costly)


def cheapest_from_shape(s: Data) -> Generator:
    """Deterministic cheapest construction (up to flat field draws)."""
    return Generator(_compile(s).cheapest)


def gen_monoid_shortcut(empty: Any, s: Data) -> Generator:
    """Use ``empty`` as the fallback instead of the cheapest constructor."""
    return budget_gate(pure(empty), gen_from_shape(s))


class _Plan(NamedTuple):
    """A cheapest value whose construction is a fixed chain of single-field
    constructors, so ``k`` of them can be built in one pass."""

    spends: int  # reference entries inside one value
    values: Callable[[GenContext, int], list]


def _plan(s: Data, visiting: set[int]) -> Optional[_Plan]:
    if id(s) in visiting:
        return None  # the cheapest path loops back on itself
    node = s.body
    while isinstance(node, Sum):
        node = node.left if sh.cheapest_side(node.left, node.right) is sh.Side.LEFT else node.right
    if not isinstance(node, Con):
        return None
    index = next(i for i, c in enumerate(sh.constructors(s)) if c is node)
    make = node.make
    if make is None:
        assemble = s.assemble or _default_assemble([c.name for c in sh.constructors(s)])
        make = lambda values: assemble(index, values)  # noqa: E731
    body = node.body
    if isinstance(body, Unit):
        return _Plan(0, lambda ctx, k: [make([]) for _ in range(k)])
    if not isinstance(body, Field):
        return None
    cheap = body.cheap_gen
    if isinstance(cheap, BatchGenerator):
        batch = cheap.batch
        return _Plan(0, lambda ctx, k: list(map(make, zip(batch(ctx, k)))))
    if isinstance(cheap, _EnterCheapest):
        target = cheap.datatype._shape
        if target is None:
            return None
        inner = _plan(target, visiting | {id(s)})
        if inner is None:
            return None
        inner_values = inner.values
        return _Plan(
            1 + inner.spends,
            lambda ctx, k: list(map(make, zip(inner_values(ctx, k)))),
        )
    return None


def _plan_batch(plan: _Plan) -> Callable[[GenContext, int], list]:
    per_value = 1 + plan.spends
    values = plan.values

    def batch(ctx: GenContext, k: int) -> list:
        # k entries into the cheapest path: every spend is one unit and the
        # first one landing at or below the floor fails
        total = k * per_value
        start = ctx.remaining
        fail_at = max(1, start - ctx.floor)
        if fail_at <= total:
            ctx.remaining = start - fail_at
            ctx.spent_events += fail_at
            raise loop_breaker_missing()
        ctx.remaining = start - total
        ctx.spent_events += total
        return values(ctx, k)

    return batch


def _cheap_batch(s: Data, cheapest: Run) -> Callable[[GenContext, int], list]:
    plan = _plan(s, set())
    if plan is not None:
        return _plan_batch(plan)

    def each(ctx: GenContext, k: int) -> list:
        out: list = []
        enter_cheap_each(cheapest, ctx, k, out)
        return out

    return each


class DataType:
    """A named datatype whose shape may refer to itself or to other types.

    Create the handle first, use :func:`ref` / :func:`ref_list` on it while
    building shapes, then :meth:`define` it.
    """

    def __init__(self, name: str):
        self.name = name
        self._shape: Optional[Data] = None
        self.cheapest: Generator = Generator(self._first_cheap)
        self.generator: GatedGenerator = GatedGenerator(
            self._first_run, self.cheapest, self._first_batch
        )

    def define(self, *cons: Con, assemble: Optional[Callable[[int, list], Any]] = None) -> Data:
        if self._shape is not None:
            raise sh.ShapeError(f"{self.name} is already defined")
        self._shape = sh.data(self.name, *cons, assemble=assemble)
        sh.validate(self._shape)
        return self._shape

    @property
    def shape(self) -> Data:
        if self._shape is None:
            raise sh.ShapeError(f"{self.name} has no shape yet")
        return self._shape

    def _install(self) -> None:
        compiled = _compile(self.shape)
        self.generator.run = compiled.data_run
        self.cheapest.run = compiled.cheapest
        self.generator.cheap_batch = _cheap_batch(self.shape, compiled.cheapest)

    def _first_run(self, ctx: GenContext) -> Any:
        self._install()
        return self.generator.run(ctx)

    def _first_cheap(self, ctx: GenContext) -> Any:
        self._install()
        return self.cheapest.run(ctx)

    def _first_batch(self, ctx: GenContext, k: int) -> list:
        self._install()
        return self.generator.cheap_batch(ctx, k)  # type: ignore[misc]

    def __repr__(self) -> str:
        return f"DataType({self.name!r})"


class _EnterCheapest(Generator):
    """What a datatype's own gate does at a non-positive budget: charge one
    unit, then build the cheapest value."""

    __slots__ = ("datatype",)

    def __init__(self, dt: DataType):
        cheapest = dt.cheapest

        def run(ctx: GenContext) -> Any:
            ctx.remaining -= 1
            ctx.spent_events += 1
            if ctx.remaining <= ctx.floor:
                raise loop_breaker_missing()
            return cheapest.run(ctx)

        super().__init__(run)
        self.datatype = dt


def _guarded_empty(make: Callable[[], Any]) -> Generator:
    def run(ctx: GenContext) -> Any:
        if ctx.remaining <= ctx.floor:
            raise loop_breaker_missing()
        return make()

    return Generator(run)


def ref(dt: DataType, label: str = "") -> Field:
    """A field holding one value of another (or the same) datatype."""
    return Field(FieldClass.REFERENCE, dt.generator, _EnterCheapest(dt), label)


def ref_list(dt: DataType, label: str = "") -> Field:
    """A field holding a budgeted list of ``dt`` values."""
    return Field(FieldClass.REFERENCE, gen_list(dt.generator), _guarded_empty(list), label)


def flat(gen: Generator, cls: FieldClass = FieldClass.FLAT_ZERO, label: str = "") -> Field:
    """A scalar field; ``gen`` must be safe to run at an exhausted budget."""
    return Field(cls, gen, gen, label)


def field_of(gen: Generator, cheap_gen: Generator, label: str = "") -> Field:
    """A field of some other container type (cost one unit)."""
    return Field(FieldClass.REFERENCE, gen, cheap_gen, label)
