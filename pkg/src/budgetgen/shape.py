"""Sum-of-products descriptors for datatypes and their static analyses.

A datatype is described as a :class:`Data` node over a binary :class:`Sum`
spine of :class:`Con` nodes, each holding a binary :class:`Product` of
:class:`Field` leaves (or :class:`Unit` for nullary constructors).  Two
numbers are computed per node when it is built and cached on it:

* ``sum_len``: how many constructors the node chooses between;
* ``cheapness``: the least static cost of completing the node, where every
  field that refers to another datatype counts as one unit.  Reference fields
  are never entered, so the analysis terminates for recursive types.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, Union


class FieldClass(enum.Enum):
    FLAT_ZERO = "FlatZero"  # ints, floats, bools, decimals
    FLAT_ONE = "FlatOne"  # text
    REFERENCE = "Reference"  # any other datatype

    @property
    def cost(self) -> int:
        return 0 if self is FieldClass.FLAT_ZERO else 1


class Side(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"


def min_nat(m: int, n: int) -> int:
    """Smaller of two costs; on a tie the first one wins."""
    return n if n < m else m


@dataclass(frozen=True, eq=False)
class Unit:
    sum_len: int = field(default=1, init=False)
    cheapness: int = field(default=0, init=False)


@dataclass(frozen=True, eq=False)
class Field:
    """A constructor argument.

    ``gen`` is used while the budget lasts, ``cheap_gen`` once it is gone.
    """

    cls: FieldClass
    gen: Any
    cheap_gen: Any
    label: str = ""
    sum_len: int = field(default=1, init=False)
    cheapness: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "cheapness", self.cls.cost)


@dataclass(frozen=True, eq=False)
class Product:
    left: "Shape"
    right: "Shape"
    sum_len: int = field(default=1, init=False)
    cheapness: int = field(init=False)

    def __post_init__(self) -> None:
        _reject_data(self.left, self.right)
        object.__setattr__(self, "cheapness", self.left.cheapness + self.right.cheapness)


@dataclass(frozen=True, eq=False)
class Sum:
    left: "Shape"
    right: "Shape"
    sum_len: int = field(init=False)
    cheapness: int = field(init=False)

    def __post_init__(self) -> None:
        _reject_data(self.left, self.right)
        object.__setattr__(self, "sum_len", self.left.sum_len + self.right.sum_len)
        object.__setattr__(
            self, "cheapness", min_nat(self.left.cheapness, self.right.cheapness)
        )


@dataclass(frozen=True, eq=False)
class Con:
    """A constructor.  ``make``, when given, builds the value from a sequence
    (list or tuple) of field values and takes precedence over the datatype's
    ``assemble``."""

    name: str
    body: "Shape"
    make: Optional[Callable[[Sequence], Any]] = None
    sum_len: int = field(default=1, init=False)
    cheapness: int = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.body, (Unit, Field, Product)):
            cost = self.body.cheapness
        else:
            # a constructor wrapping something that is not a field list
            cost = 1
        object.__setattr__(self, "cheapness", cost)


@dataclass(frozen=True, eq=False)
class Data:
    """Root of a datatype's shape.

    ``assemble(index, fields)`` turns the chosen constructor (numbered left
    to right from 0) and its field values into the user's value.
    """

    name: str
    body: "Shape"
    assemble: Optional[Callable[[int, list], Any]] = None
    sum_len: int = field(init=False)
    cheapness: int = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sum_len", self.body.sum_len)
        object.__setattr__(self, "cheapness", self.body.cheapness)


Shape = Union[Sum, Product, Unit, Field, Con, Data]


class ShapeError(ValueError):
    pass


def _reject_data(*children: Shape) -> None:
    for child in children:
        if isinstance(child, Data):
            raise ShapeError("a Data node can only appear at the root of a shape")


def sum_len(s: Shape) -> int:
    return s.sum_len


def cheapness(s: Shape) -> int:
    return s.cheapness


def cheapest_side(left: Shape, right: Shape) -> Side:
    return Side.LEFT if left.cheapness <= right.cheapness else Side.RIGHT


def _balanced(items: Sequence[Shape], node: type) -> Shape:
    # split like derived generic representations: left half gets n // 2
    if len(items) == 1:
        return items[0]
    mid = len(items) // 2
    return node(_balanced(items[:mid], node), _balanced(items[mid:], node))


def product_of(*fields: Shape) -> Shape:
    if not fields:
        return Unit()
    return _balanced(list(fields), Product)


def sum_of(*cons: Shape) -> Shape:
    if not cons:
        raise ShapeError("a datatype needs at least one constructor")
    return _balanced(list(cons), Sum)


def con(name: str, *fields: Shape, make: Optional[Callable[[Sequence], Any]] = None) -> Con:
    return Con(name, product_of(*fields), make)


def data(name: str, *cons: Con, assemble: Optional[Callable[[int, list], Any]] = None) -> Data:
    return Data(name, sum_of(*cons), assemble)


def constructors(s: Shape) -> list[Con]:
    """Constructors under the root's sum spine, left to right."""
    if isinstance(s, Data):
        return constructors(s.body)
    if isinstance(s, Sum):
        return constructors(s.left) + constructors(s.right)
    if isinstance(s, Con):
        return [s]
    return []


def fields_of(s: Shape) -> list[Field]:
    """Fields of a constructor body, left to right."""
    if isinstance(s, Con):
        return fields_of(s.body)
    if isinstance(s, Product):
        return fields_of(s.left) + fields_of(s.right)
    if isinstance(s, Field):
        return [s]
    return []


def validate(s: Shape) -> None:
    """Check the structural rules for a registered shape."""
    if not isinstance(s, Data):
        raise ShapeError("a registered shape must have a Data node at its root")
    stack: list[Shape] = [s.body]
    while stack:
        node = stack.pop()
        if isinstance(node, Data):
            raise ShapeError("nested Data node inside a shape")
        if isinstance(node, (Sum, Product)):
            stack.extend((node.left, node.right))
        elif isinstance(node, Con):
            stack.append(node.body)
