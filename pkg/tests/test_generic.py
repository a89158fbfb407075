from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from budgetgen.bench import budget_floor
from budgetgen.combinators import gen_list
from budgetgen.cost import NO_LOOP_BREAKER, FailureKind, GenContext, GenFailure, Generator, pure, run_deep
from budgetgen.fixtures import Branch, Leaf, count_constructors
from budgetgen.generic import (
    Constructed,
    DataType,
    cheapest_from_shape,
    costly_walk,
    flat,
    gen_from_shape,
    gen_monoid_shortcut,
    ref,
    ref_list,
)
from budgetgen.instances import ScalarKind, flat_gen
from budgetgen.shape import FieldClass, ShapeError, con, constructors, data, fields_of

from helpers import ALPHA, run, uniform_chi2_pvalue

# Largest cheapest value per fixture, in constructors: Leaf, Lit, ExprStmt(Lit).
CHEAPEST_SIZE = {"Tree": 1, "Expr": 1, "Stmt": 2}


def enum_type(*names: str) -> DataType:
    dt = DataType("Enum")
    dt.define(*(con(n) for n in names))
    return dt


# gen_from_shape --------------------------------------------------------------


def test_tree_at_zero_budget_is_leaf(registry):
    gen = registry["Tree"].generator
    for seed in range(500):
        value, ctx = run(gen, 0, seed)
        assert isinstance(value, Leaf)
        assert ctx.remaining == -1


@pytest.mark.parametrize("budget", [2, 3, 10, 100])
def test_tree_both_constructors_from_budget_two(registry, budget):
    gen = registry["Tree"].generator
    kinds = run_deep(lambda: Counter(type(gen.run(GenContext(s, budget))) for s in range(10_000)))
    assert kinds[Leaf] > 0 and kinds[Branch] > 0


def test_tree_budget_one_spends_it_on_the_root(registry):
    # one unit for entering Tree leaves zero, so the gate takes the cheap arm
    assert all(isinstance(run(registry["Tree"].generator, 1, s)[0], Leaf) for s in range(200))


@pytest.mark.parametrize("floor", [-10, -10000])
@pytest.mark.parametrize("budget", [0, 1, 10, 1000, 20000])
def test_no_breaker_fails_within_budget_minus_floor(registry, budget, floor):
    failure, ctx = run(registry["NoBreaker"].generator, budget, seed=3, floor=floor)
    assert isinstance(failure, GenFailure)
    assert failure.kind is FailureKind.LOOP_BREAKER_MISSING
    assert str(failure) == "Recursive structure with no loop breaker."
    assert ctx.spent_events <= budget - floor


def test_self_only_two_field_shape_fails():
    x = DataType("XX")
    x.define(con("XX", ref(x), ref(x)))
    for budget in (0, 5, 500):
        failure, ctx = run(x.generator, budget, seed=budget, floor=-50)
        assert isinstance(failure, GenFailure) and str(failure) == NO_LOOP_BREAKER
        assert ctx.spent_events <= budget + 50


@given(st.integers(0, 10**6), st.integers(0, 2**32), st.sampled_from(["Tree", "Expr", "Stmt"]))
def test_halts_within_event_bound(registry, budget, seed, name):
    # large budgets may hit the default floor and fail; either way the run
    # stops within the stated number of spend events
    floor = -10000
    _, ctx = run(registry[name].generator, budget, seed, floor)
    assert ctx.spent_events <= budget - floor + CHEAPEST_SIZE[name]


# (c1, c2) per fixture: Tree pays one unit per constructor; Expr/Stmt may add
# one cheap child per paid unit once the budget is gone.
LINEAR_FIT = {"Tree": (1, 1), "Expr": (2, 2), "Stmt": (2, 2)}


@pytest.mark.parametrize("name", ["Tree", "Expr", "Stmt"])
def test_constructor_count_is_linear_in_budget(registry, name):
    c1, c2 = LINEAR_FIT[name]
    gen = registry[name].generator
    for budget in (10, 100, 1000, 10000):
        counts = run_deep(
            lambda: [
                count_constructors(gen.run(GenContext(s, budget, budget_floor(budget))))
                for s in range(200)
            ]
        )
        assert max(counts) <= c1 * budget + c2


def test_tree_coverage_at_budget_100(registry):
    gen = registry["Tree"].generator
    seen: set = set()

    def walk(v):
        stack = [v]
        while stack:
            node = stack.pop()
            seen.add(type(node))
            if isinstance(node, Branch):
                stack.extend(node.children)

    run_deep(lambda: [walk(gen.run(GenContext(s, 100))) for s in range(10_000)])
    assert seen == {Leaf, Branch}


def test_three_constructor_enum_is_uniform():
    dt = enum_type("A", "B", "C")
    gen = dt.generator
    counts = Counter(gen.run(GenContext(s, 5)).con for s in range(100_000))
    assert set(counts) == {"A", "B", "C"}
    assert uniform_chi2_pvalue([counts[n] for n in "ABC"]) > ALPHA


def test_default_assembly_builds_named_values():
    dt = DataType("P")
    dt.define(con("P", flat(pure(4)), flat(pure("s"))))
    assert dt.generator.run(GenContext(0, 3)) == Constructed("P", (4, "s"))


def test_assemble_callback_receives_index_and_fields():
    dt = DataType("Q")
    dt.define(con("A"), con("B", flat(pure(1))), assemble=lambda i, fs: (i, tuple(fs)))
    seen = {dt.generator.run(GenContext(s, 10)) for s in range(200)}
    assert seen == {(0, ()), (1, (1,))}


def test_gen_from_shape_on_registered_shape_matches_handle(registry):
    s = registry["Stmt"].shape
    for seed in range(50):
        a, c1 = run(gen_from_shape(s), 300, seed)
        b, c2 = run(registry["Stmt"].generator, 300, seed)
        assert a == b and c1.remaining == c2.remaining


def test_costly_walk_skips_the_entry_charge(registry):
    s = registry["Tree"].shape
    for seed in range(50):
        a, c1 = run(costly_walk(s), 40, seed)
        b, c2 = run(gen_from_shape(s), 41, seed)
        assert a == b and c1.remaining == c2.remaining


# cheapest_from_shape ---------------------------------------------------------


def test_cheapest_tree_is_leaf(registry):
    for seed in range(100):
        value, ctx = run(cheapest_from_shape(registry["Tree"].shape), 0, seed)
        assert isinstance(value, Leaf) and ctx.remaining == 0


def test_unit_only_datatype_cheapest_spends_nothing():
    dt = enum_type("Only")
    value, ctx = run(cheapest_from_shape(dt.shape), 0)
    assert value == Constructed("Only", ())
    assert ctx.remaining == 0 and ctx.spent_events == 0


def test_equal_cost_sum_takes_left():
    dt = enum_type("First", "Second")
    assert all(run(cheapest_from_shape(dt.shape), 0, s)[0].con == "First" for s in range(20))


def test_cheapest_is_deterministic_with_constant_flat_fields():
    a, b = DataType("A"), DataType("B")
    a.define(
        con("A1", flat(pure(3)), ref(b)),
        con("A2", ref_list(a)),
    )
    b.define(
        con("B1", flat(pure("x"), FieldClass.FLAT_ONE)),
        con("B2", ref(a)),
    )
    outcomes = {repr(run(cheapest_from_shape(a.shape), 0, seed)[0]) for seed in range(100)}
    # A1 and A2 both cost 1, so the tie goes left
    assert outcomes == {repr(Constructed("A1", (3, Constructed("B1", ("x",)))))}


@given(st.integers(-40, 0), st.integers(0, 2**32))
def test_direct_cheapest_matches_gate_route(registry, remaining, seed):
    # a reference field's cheap generator versus running the referenced
    # type's generator with its own gate at an exhausted budget
    for owner, target in (("Stmt", "Expr"), ("NoBreaker", "NoBreaker")):
        field = next(
            f
            for c in constructors(registry[owner].shape)
            for f in fields_of(c)
            if f.gen is registry[target].generator
        )
        direct, c1 = run(field.cheap_gen, remaining, seed, floor=-50)
        gated, c2 = run(registry[target].generator, remaining, seed, floor=-50)
        assert repr(direct) == repr(gated)
        assert (c1.remaining, c1.spent_events) == (c2.remaining, c2.spent_events)
        assert c1.rng.random() == c2.rng.random()


# gen_monoid_shortcut ---------------------------------------------------------


def cons_list() -> DataType:
    dt = DataType("IntList")

    def assemble(index: int, fs: list) -> list:
        return [] if index == 0 else [fs[0], *fs[1]]

    dt.define(con("Nil"), con("Cons", flat(flat_gen(ScalarKind.INT)), ref(dt)), assemble=assemble)
    return dt


def test_shortcut_zero_budget_is_empty(registry):
    gen = gen_monoid_shortcut(Leaf(0), registry["Tree"].shape)
    for seed in range(50):
        value, ctx = run(gen, 0, seed)
        assert value == Leaf(0) and ctx.remaining == 0


@given(st.integers(1, 2000), st.integers(0, 2**32))
def test_shortcut_positive_budget_matches_generic(registry, budget, seed):
    s = registry["Stmt"].shape
    a, c1 = run(gen_monoid_shortcut(None, s), budget, seed)
    b, c2 = run(gen_from_shape(s), budget, seed)
    assert a == b and c1.remaining == c2.remaining


def test_shortcut_list_agrees_with_gen_list_at_zero():
    dt = cons_list()
    shortcut = gen_monoid_shortcut([], dt.shape)
    plain_list = gen_list(flat_gen(ScalarKind.INT))
    for seed in range(20):
        a, c1 = run(shortcut, 0, seed)
        b, c2 = run(plain_list, 0, seed)
        assert a == b == [] and c1.remaining == c2.remaining == 0


def test_cons_list_grows_with_budget():
    dt = cons_list()
    lengths = [len(run(dt.generator, 200, s)[0]) for s in range(200)]
    assert max(lengths) > 5 and min(lengths) == 0


# batched cheap elements ------------------------------------------------------


def _plain(gen) -> Generator:
    return Generator(lambda ctx: gen.run(ctx))


@given(st.integers(0, 500), st.integers(0, 2**32), st.sampled_from([-3, -40, -10000]))
def test_batched_enum_and_chain_elements_match_plain(budget, seed, floor):
    enum = enum_type("A", "B", "C")
    outer = DataType("Wrap")
    outer.define(con("W", ref(enum)), con("V", ref_list(outer), ref(enum)))
    for elem in (enum.generator, outer.generator, cons_list().generator):
        fast, c1 = run(gen_list(elem), budget, seed, floor)
        slow, c2 = run(gen_list(_plain(elem)), budget, seed, floor)
        assert repr(fast) == repr(slow)
        assert (c1.remaining, c1.spent_events) == (c2.remaining, c2.spent_events)


def test_list_of_no_breaker_fails_like_plain(registry):
    elem = registry["NoBreaker"].generator
    for budget in (1, 50):
        fast, c1 = run(gen_list(elem), budget, 0, floor=-30)
        slow, c2 = run(gen_list(_plain(elem)), budget, 0, floor=-30)
        assert isinstance(fast, GenFailure) and isinstance(slow, GenFailure)
        assert (c1.remaining, c1.spent_events) == (c2.remaining, c2.spent_events)


def test_define_twice_is_rejected():
    dt = enum_type("A")
    with pytest.raises(ShapeError):
        dt.define(con("B"))
    with pytest.raises(ShapeError):
        DataType("Undefined").shape


def test_data_helper_shape_generates():
    s = data("Pair", con("P", flat(pure(1)), flat(pure(2))))
    assert gen_from_shape(s).run(GenContext(0, 1)) == Constructed("P", (1, 2))
