"""Datatypes used to exercise shape-driven generation.

``Tree`` is the classic rose tree, ``Expr``/``Stmt`` a small mutually
recursive AST (a scale model of a compiler's expression types), and
``NoBreaker`` a type with no finite values at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from operator import itemgetter
from typing import Any, Callable, Sequence, Union

from .generic import DataType, flat, ref, ref_list
from .instances import Instance, ScalarKind, flat_gen, shrink
from .shape import FieldClass, con


class Node(tuple):
    """An immutable constructor value: its fields in order, tagged by class.

    Values of different constructors never compare equal, even when their
    fields do.  Plain tuples are used underneath because generation builds
    millions of them.
    """

    __slots__ = ()
    _names: tuple[str, ...] = ()

    def __new__(cls, *fields: Any):
        if len(fields) != len(cls._names):
            raise TypeError(f"{cls.__name__} takes {len(cls._names)} field(s), got {len(fields)}")
        return tuple.__new__(cls, fields)

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and tuple.__eq__(self, other)

    def __ne__(self, other: object) -> bool:
        return not self.__eq__(other)

    __hash__ = tuple.__hash__

    def __getnewargs__(self) -> tuple:
        return tuple(self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(map(repr, self))})"


def _field(i: int) -> property:
    return property(itemgetter(i))


class Leaf(Node):
    __slots__ = ()
    _names = ("payload",)
    payload = _field(0)


class Branch(Node):
    __slots__ = ()
    _names = ("children",)
    children = _field(0)


Tree = Union[Leaf, Branch]


class Lit(Node):
    __slots__ = ()
    _names = ("value",)
    value = _field(0)


class Var(Node):
    __slots__ = ()
    _names = ("name",)
    name = _field(0)


class Call(Node):
    __slots__ = ()
    _names = ("func", "args")
    func = _field(0)
    args = _field(1)


class Block(Node):
    __slots__ = ()
    _names = ("body",)
    body = _field(0)


class ExprStmt(Node):
    __slots__ = ()
    _names = ("expr",)
    expr = _field(0)


class If(Node):
    __slots__ = ()
    _names = ("cond", "then", "orelse")
    cond = _field(0)
    then = _field(1)
    orelse = _field(2)


class While(Node):
    __slots__ = ()
    _names = ("cond", "body")
    cond = _field(0)
    body = _field(1)


class X(Node):
    __slots__ = ()
    _names = ("inner",)
    inner = _field(0)


def _maker(cls: type, *sequence_fields: int) -> Callable[[Sequence], Node]:
    """Fast builder from generated field values; list fields become tuples."""
    if not sequence_fields:
        return partial(tuple.__new__, cls)
    if sequence_fields == (0,) and len(cls._names) == 1:
        return lambda fs: tuple.__new__(cls, (tuple(fs[0]),))

    def make(fs: Sequence) -> Node:
        fs = list(fs)
        for i in sequence_fields:
            fs[i] = tuple(fs[i])
        return tuple.__new__(cls, fs)

    return make


@dataclass(frozen=True)
class Registry:
    """Fixture datatypes plus the predicates naming their cheapest values."""

    types: dict[str, DataType]
    cheapest: dict[str, Callable[[Any], bool]]

    def __getitem__(self, name: str) -> DataType:
        return self.types[name]


def is_leaf(t: Any) -> bool:
    return isinstance(t, Leaf)


def is_branch(t: Any) -> bool:
    return isinstance(t, Branch)


def is_lit(e: Any) -> bool:
    return isinstance(e, Lit)


def is_exprstmt_of_lit(s: Any) -> bool:
    return isinstance(s, ExprStmt) and isinstance(s.expr, Lit)


def register_fixtures() -> Registry:
    int_field = flat(flat_gen(ScalarKind.INT))
    text_field = flat(flat_gen(ScalarKind.TEXT), FieldClass.FLAT_ONE)

    tree = DataType("Tree")
    tree.define(
        con("Leaf", int_field, make=_maker(Leaf)),
        con("Branch", ref_list(tree), make=_maker(Branch, 0)),
    )

    expr = DataType("Expr")
    stmt = DataType("Stmt")
    expr.define(
        con("Lit", int_field, make=_maker(Lit)),
        con("Var", text_field, make=_maker(Var)),
        con("Call", text_field, ref_list(expr), make=_maker(Call, 1)),
        con("Block", ref_list(stmt), make=_maker(Block, 0)),
    )
    stmt.define(
        con("ExprStmt", ref(expr), make=_maker(ExprStmt)),
        con("If", ref(expr), ref_list(stmt), ref_list(stmt), make=_maker(If, 1, 2)),
        con("While", ref(expr), ref_list(stmt), make=_maker(While, 1)),
    )

    no_breaker = DataType("NoBreaker")
    no_breaker.define(con("X", ref(no_breaker), make=_maker(X)))

    return Registry(
        types={"Tree": tree, "Expr": expr, "Stmt": stmt, "NoBreaker": no_breaker},
        cheapest={"Tree": is_leaf, "Expr": is_lit, "Stmt": is_exprstmt_of_lit},
    )


# Size and shrinking -----------------------------------------------------------

_CHILDREN: dict[type, Callable[[Any], tuple]] = {
    Leaf: lambda v: (),
    Branch: itemgetter(0),
    Lit: lambda v: (),
    Var: lambda v: (),
    Call: itemgetter(1),
    Block: itemgetter(0),
    ExprStmt: lambda v: (v[0],),
    If: lambda v: (v[0],) + v[1] + v[2],
    While: lambda v: (v[0],) + v[1],
    X: lambda v: (v[0],),
}


def count_constructors(value: Any) -> int:
    """Number of fixture constructors in ``value`` (iterative, any depth)."""
    total = 0
    stack = [value]
    children = _CHILDREN
    while stack:
        node = stack.pop()
        total += 1
        kids = children[node.__class__](node)
        if kids:
            stack.extend(kids)
    return total


def depth(value: Any) -> int:
    """Constructor nesting depth; a lone leaf has depth 0."""
    best = 0
    stack = [(value, 0)]
    while stack:
        node, d = stack.pop()
        best = max(best, d)
        for kid in _CHILDREN[node.__class__](node):
            stack.append((kid, d + 1))
    return best


def _shrink_items(items: tuple) -> list[tuple]:
    return [tuple(c) for c in shrink(list(items))]


@shrink.register
def _(value: Leaf) -> list:
    return [Leaf(p) for p in shrink(value.payload)]


@shrink.register
def _(value: Branch) -> list:
    out: list = [Leaf(0)]
    out.extend(value.children)
    out.extend(Branch(cs) for cs in _shrink_items(value.children))
    return [c for c in out if c != value]


@shrink.register
def _(value: Lit) -> list:
    return [Lit(v) for v in shrink(value.value)]


@shrink.register
def _(value: Var) -> list:
    return [Lit(0)] + [Var(n) for n in shrink(value.name)]


@shrink.register
def _(value: Call) -> list:
    out: list = [Lit(0)]
    out.extend(value.args)
    out.extend(Call(value.func, a) for a in _shrink_items(value.args))
    out.extend(Call(f, value.args) for f in shrink(value.func))
    return [c for c in out if c != value]


@shrink.register
def _(value: Block) -> list:
    out: list = [Lit(0)]
    out.extend(Block(b) for b in _shrink_items(value.body))
    return [c for c in out if c != value]


@shrink.register
def _(value: ExprStmt) -> list:
    return [ExprStmt(e) for e in shrink(value.expr)]


@shrink.register
def _(value: If) -> list:
    out: list = [ExprStmt(value.cond)]
    out.extend(value.then)
    out.extend(value.orelse)
    out.extend(If(value.cond, t, value.orelse) for t in _shrink_items(value.then))
    out.extend(If(value.cond, value.then, e) for e in _shrink_items(value.orelse))
    out.extend(If(c, value.then, value.orelse) for c in shrink(value.cond))
    return [c for c in out if c != value]


@shrink.register
def _(value: While) -> list:
    out: list = [ExprStmt(value.cond)]
    out.extend(value.body)
    out.extend(While(value.cond, b) for b in _shrink_items(value.body))
    out.extend(While(c, value.body) for c in shrink(value.cond))
    return [c for c in out if c != value]


def fixture_instances(registry: Registry | None = None) -> list[Instance]:
    registry = registry or register_fixtures()
    return [
        Instance(name, registry[name].generator)
        for name in ("Tree", "Expr", "Stmt")
    ]
