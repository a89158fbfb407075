from __future__ import annotations

import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from budgetgen.cost import (
    DEFAULT_FLOOR,
    NO_LOOP_BREAKER,
    FailureKind,
    GenContext,
    GenFailure,
    Generator,
    budget_gate,
    check_budget,
    current_budget,
    pure,
    run_deep,
    sized_cost,
    spend,
    spend_marked_map,
    spending,
    with_cost,
)
from budgetgen.combinators import choose, gen_list
from budgetgen.fixtures import is_leaf

from helpers import run


def ctx_at(remaining: int, floor: int = DEFAULT_FLOOR) -> GenContext:
    return GenContext(0, remaining, floor)


# spend -----------------------------------------------------------------------


def test_spend_one_from_five():
    ctx = ctx_at(5)
    spend(ctx, 1)
    assert ctx.remaining == 4


def test_zero_spend_is_identity():
    ctx = ctx_at(0)
    spend(ctx, 0)
    assert ctx.remaining == 0


def test_spend_past_floor_fails():
    # -10000 - 1 = -10001 < -10000
    ctx = ctx_at(-10000)
    with pytest.raises(GenFailure) as info:
        spend(ctx, 1)
    assert info.value.kind is FailureKind.LOOP_BREAKER_MISSING
    assert info.value.detail == "Recursive structure with no loop breaker."
    assert ctx.remaining == -10001


def test_spend_rejects_negative_amount():
    with pytest.raises(ValueError):
        spend(ctx_at(3), -1)


def test_spend_counts_events():
    ctx = ctx_at(10)
    for _ in range(3):
        spend(ctx, 2)
    assert ctx.spent_events == 3 and ctx.remaining == 4


# check_budget ----------------------------------------------------------------


def test_check_budget_zero_ok():
    check_budget(ctx_at(0))


def test_check_budget_below_floor_fails():
    with pytest.raises(GenFailure) as info:
        check_budget(ctx_at(-10001))
    assert str(info.value) == NO_LOOP_BREAKER


def test_check_budget_exactly_at_floor_passes():
    ctx = ctx_at(-10000)
    check_budget(ctx)
    assert ctx.remaining == -10000


# budget_gate -----------------------------------------------------------------

CHEAP, COSTLY = pure("cheap"), pure("costly")


def test_gate_positive_budget_runs_costly():
    assert budget_gate(CHEAP, COSTLY).run(ctx_at(1)) == "costly"


def test_gate_zero_budget_runs_cheap():
    assert budget_gate(CHEAP, COSTLY).run(ctx_at(0)) == "cheap"


def test_gate_at_floor_fails_where_check_passes():
    ctx = ctx_at(-10000)
    check_budget(ctx)
    with pytest.raises(GenFailure) as info:
        budget_gate(CHEAP, COSTLY).run(ctx)
    assert info.value.kind is FailureKind.LOOP_BREAKER_MISSING


@given(st.integers(-50, 50), st.integers(-60, -1))
def test_gate_runs_exactly_one_arm(remaining, floor):
    calls = []
    cheap = Generator(lambda ctx: calls.append("cheap"))
    costly = Generator(lambda ctx: calls.append("costly"))
    ctx = GenContext(0, remaining, floor)
    try:
        budget_gate(cheap, costly).run(ctx)
    except GenFailure:
        assert remaining <= floor and calls == []
        return
    assert len(calls) == 1
    assert calls[0] == ("costly" if remaining > 0 else "cheap")


# current_budget --------------------------------------------------------------


def test_current_budget_reads_state():
    ctx = ctx_at(7)
    assert current_budget().run(ctx) == 7
    assert ctx.remaining == 7


def test_current_budget_after_spend():
    ctx = ctx_at(7)
    assert spending(3).then(current_budget()).run(ctx) == 4


def test_current_budget_negative():
    assert current_budget().run(ctx_at(-5)) == -5


# with_cost / sized_cost ------------------------------------------------------


def test_with_cost_zero_gives_leaf(registry):
    gen = registry["Tree"].generator
    assert all(is_leaf(with_cost(0, gen, s)) for s in range(200))


@given(st.integers(-100, 10**6), st.integers(0, 2**64 - 1))
def test_with_cost_pure(n, seed):
    assert with_cost(n, pure(42), seed) == 42


def test_with_cost_deterministic(registry):
    import random

    rng = random.Random(11)
    gens = [registry[n].generator for n in ("Tree", "Expr", "Stmt")]
    for _ in range(100):
        cost, seed, gen = rng.randint(0, 500), rng.getrandbits(64), rng.choice(gens)
        assert with_cost(cost, gen, seed) == with_cost(cost, gen, seed)


def test_with_cost_negative_routes_to_cheap(registry):
    value = with_cost(-5, registry["Tree"].generator, 3)
    assert is_leaf(value)


def test_sized_cost_matches_with_cost(registry):
    runner = sized_cost(registry["Tree"].generator)
    for seed in range(50):
        assert runner(10, seed) == with_cost(10, registry["Tree"].generator, seed)
    assert runner.samples(100, range(30)) == [
        with_cost(100, registry["Tree"].generator, s) for s in range(30)
    ]


def test_sized_cost_zero_is_cheapest(registry):
    runner = sized_cost(registry["Stmt"].generator)
    assert all(registry.cheapest["Stmt"](runner(0, s)) for s in range(100))


# spend_marked_map ------------------------------------------------------------


def test_spend_marked_map_spends_one():
    ctx = ctx_at(3)
    assert spend_marked_map(lambda x: x, pure("x")).run(ctx) == "x"
    assert ctx.remaining == 2


def test_spend_marked_map_at_floor_fails():
    with pytest.raises(GenFailure):
        spend_marked_map(lambda x: x, pure("x")).run(ctx_at(-10000))


@given(st.integers(-20, 20), st.integers(0, 1000))
def test_spend_marked_map_is_spend_then_map(budget, seed):
    f = lambda x: x * 2  # noqa: E731
    g = choose(0, 100)
    marked, c1 = run(spend_marked_map(f, g), budget, seed, floor=-10)
    manual, c2 = run(spending(1).then(g.map(f)), budget, seed, floor=-10)
    assert repr(marked) == repr(manual)
    assert c1.remaining == c2.remaining


# context and generator plumbing ---------------------------------------------


def test_floor_must_be_negative():
    with pytest.raises(ValueError):
        GenContext(0, 10, floor=0)


@given(st.integers(0, 300), st.integers(0, 2**32))
def test_monad_laws_observationally(budget, seed):
    g = gen_list(choose(0, 9))
    k = lambda xs: choose(0, len(xs))  # noqa: E731
    left, _ = run(pure([1, 2, 3]).bind(k), budget, seed)
    assert left == run(k([1, 2, 3]), budget, seed)[0]
    right, _ = run(g.bind(pure), budget, seed)
    assert right == run(g, budget, seed)[0]
    h = lambda n: pure(n + 1)  # noqa: E731
    assoc1, _ = run(g.bind(k).bind(h), budget, seed)
    assoc2, _ = run(g.bind(lambda x: k(x).bind(h)), budget, seed)
    assert assoc1 == assoc2


@given(st.integers(0, 2000), st.integers(0, 2**32))
def test_spend_is_monotone(registry, budget, seed):
    for name in ("Tree", "Stmt"):
        _, ctx = run(registry[name].generator, budget, seed, floor=-(10000 + 2 * budget))
        assert ctx.remaining <= budget


def test_run_deep_uses_one_worker_and_nests():
    outer = run_deep(threading.get_ident)
    assert run_deep(lambda: run_deep(threading.get_ident)) == outer
