"""Shared helpers for tests that need them outside fixtures."""

from __future__ import annotations

from scipy import stats

from budgetgen.cost import GenContext, GenFailure, run_deep

ALPHA = 0.001


def uniform_chi2_pvalue(counts: list[int]) -> float:
    return float(stats.chisquare(counts).pvalue)


def chi2_pvalue(counts: list[int], probs: list[float]) -> float:
    total = sum(counts)
    expected = [p * total for p in probs]
    return float(stats.chisquare(counts, expected).pvalue)


def run(gen, budget: int, seed: int = 0, floor: int = -10000):
    """Run ``gen`` and return ``(value_or_failure, context)``."""
    ctx = GenContext(seed, budget, floor)

    def _go():
        try:
            return gen.run(ctx)
        except GenFailure as failure:
            return failure

    return run_deep(_go), ctx


# One line per acceptance check, printed again in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def record(check: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'} {check}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed
