"""Budgeted random test-data generation.

Every generator draws from an explicit spend budget.  Recursive datatypes
pay one unit per constructor, and once the budget is gone generation falls
back to each type's statically cheapest constructor, so runs terminate and
take time linear in the budget.
"""

from .combinators import (
    budget_choose,
    choose,
    elements,
    for_all,
    frequency,
    gen_list,
    oneof,
    such_that,
    vector_of,
)
from .cost import (
    DEFAULT_FLOOR,
    NO_LOOP_BREAKER,
    Budget,
    FailureKind,
    GenContext,
    GenFailure,
    Generator,
    budget_gate,
    check_budget,
    current_budget,
    pure,
    run_in_context,
    sized_cost,
    spend,
    spend_marked_map,
    spending,
    with_cost,
)
from .generic import (
    DataType,
    cheapest_from_shape,
    field_of,
    flat,
    gen_from_shape,
    gen_monoid_shortcut,
    ref,
    ref_list,
)
from .instances import (
    ContainerKind,
    Instance,
    ScalarKind,
    Scientific,
    flat_gen,
    gen_container,
    gen_pair,
    shrink,
)
from .laws import Law, LawReport, arbitrary_laws, less_arbitrary_laws, run_laws, shrink_check
from .shape import (
    Con,
    Data,
    Field,
    FieldClass,
    Product,
    Side,
    Sum,
    Unit,
    cheapest_side,
    cheapness,
    con,
    data,
    min_nat,
    sum_len,
)

__all__ = [name for name in dir() if not name.startswith("_")]
