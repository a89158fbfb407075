"""A small deterministic property runner and the generator law suites."""

from __future__ import annotations

import operator
import random
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .cost import DEFAULT_FLOOR, GenContext, GenFailure, gc_paused, run_deep
from .instances import Instance, shrink

SHRINK_SAMPLES = 100
CHEAPEST_SAMPLES = 1000
MAX_SIZE = 100


@dataclass(frozen=True)
class LawResult:
    passed: bool
    samples: int
    counterexample: str = ""


@dataclass(frozen=True)
class Law:
    """A named property.  ``check(seed, samples)`` must be deterministic."""

    name: str
    check: Callable[[int, int], LawResult]
    default_samples: int = SHRINK_SAMPLES


@dataclass(frozen=True)
class LawReport:
    suite: str
    law: str
    passed: bool
    samples: int
    counterexample: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.suite}: {self.law} ({self.samples} samples)"
        if not self.passed:
            text += f"\n    counterexample: {self.counterexample}"
        return text


def shrink_check(
    value: Any,
    shrinker: Callable[[Any], list] = shrink,
    eq: Callable[[Any, Any], bool] = operator.eq,
) -> bool:
    """True iff ``value`` is not among its own shrink candidates."""
    return not any(eq(value, c) for c in shrinker(value))


def sample_seeds(seed: int, count: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(64) for _ in range(count)]


def _generate(instance: Instance, size: int, seed: int, floor: int) -> Any:
    return instance.generator.run(GenContext(seed, size, floor))


def arbitrary_laws(
    instance: Instance,
    samples: int = SHRINK_SAMPLES,
    max_size: int = MAX_SIZE,
    floor: int = DEFAULT_FLOOR,
) -> list[Law]:
    """The shrink law: no generated value appears in its own shrink list.

    Sample ``i`` is generated with budget ``i % max_size``, so small and
    large values are both covered.
    """

    def check(seed: int, count: int) -> LawResult:
        for i, s in enumerate(sample_seeds(seed, count)):
            size = i % max_size
            try:
                value = _generate(instance, size, s, floor)
            except GenFailure as failure:
                return LawResult(False, i + 1, f"generation failed at size {size}: {failure.detail}")
            if not shrink_check(value, instance.shrink, instance.eq):
                return LawResult(False, i + 1, instance.show(value))
        return LawResult(True, count)

    return [Law("does not shrink to itself", check, samples)]


def less_arbitrary_laws(
    instance: Instance,
    cheapest_pred: Callable[[Any], bool],
    samples: int = CHEAPEST_SAMPLES,
    floor: int = DEFAULT_FLOOR,
) -> list[Law]:
    """The cheapest law: a zero budget always yields a cheapest value."""

    def check(seed: int, count: int) -> LawResult:
        for i, s in enumerate(sample_seeds(seed, count)):
            try:
                value = _generate(instance, 0, s, floor)
            except GenFailure as failure:
                return LawResult(False, i + 1, f"generation failed: {failure.detail}")
            if not cheapest_pred(value):
                return LawResult(False, i + 1, instance.show(value))
        return LawResult(True, count)

    return [Law("always selects cheapest", check, samples)]


Suite = tuple[str, Sequence[Law]]


def run_laws(suites: Iterable[Suite], seed: int = 0, samples: int | None = None) -> list[LawReport]:
    """Run every law; ``samples`` overrides each law's own default."""

    def _all() -> list[LawReport]:
        reports = []
        with gc_paused():
            for suite_name, laws in suites:
                for law in laws:
                    result = law.check(seed, samples if samples is not None else law.default_samples)
                    reports.append(
                        LawReport(suite_name, law.name, result.passed, result.samples, result.counterexample)
                    )
        return reports

    return run_deep(_all)


def exit_status(reports: Iterable[LawReport]) -> int:
    return 0 if all(r.passed for r in reports) else 1


def format_reports(reports: Sequence[LawReport]) -> str:
    lines = [r.line() for r in reports]
    failed = sum(not r.passed for r in reports)
    lines.append(f"{len(reports) - failed} passed, {failed} failed")
    return "\n".join(lines)
