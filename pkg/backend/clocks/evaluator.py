"""
Clock Expression Evaluator
Materializes derived-clock tick steps over a run
"""

import logging
from typing import Dict, List, Mapping, Optional

import numpy as np

from backend.clocks.expressions import ClockExpr, DelayFor, Inf, Named, PeriodicOn, Sup
from backend.errors import BadParameter, CyclicDefinition, UnknownClock
from backend.trace.run import Run

logger = logging.getLogger(__name__)


def _steps(ticks) -> np.ndarray:
    return np.asarray(ticks, dtype=np.int64)


def eval_periodic_on(base_ticks, q: int) -> np.ndarray:
    """
    Ticks at the q-th, 2q-th, 3q-th ... base ticks

    Args:
        base_ticks: Sorted base tick steps
        q: Period, q >= 1

    Returns:
        Derived tick steps
    """
    if q < 1:
        raise BadParameter(f"period must be >= 1, got {q}")
    return _steps(base_ticks)[q - 1::q].copy()


def eval_delay_for(base_ticks, ref_ticks, d: int) -> np.ndarray:
    """
    Spawn one pending instance per base tick; each fires at the d-th
    reference tick strictly after its spawning step

    Instances firing at the same step coalesce; instances still pending
    at the end of the run produce nothing.

    Args:
        base_ticks: Sorted base tick steps
        ref_ticks: Sorted reference tick steps
        d: Delay in reference ticks, d >= 0

    Returns:
        Derived tick steps
    """
    if d < 0:
        raise BadParameter(f"delay must be >= 0, got {d}")
    base = _steps(base_ticks)
    if d == 0:
        return base.copy()
    ref = _steps(ref_ticks)
    # index of the d-th reference tick after each spawn
    target = np.searchsorted(ref, base, side="right") + (d - 1)
    return np.unique(ref[target[target < ref.size]])


def eval_infimum(left_ticks, right_ticks) -> np.ndarray:
    """
    k-th tick at min(k-th left, k-th right); the longer operand continues alone

    Args:
        left_ticks: Sorted tick steps
        right_ticks: Sorted tick steps

    Returns:
        Derived tick steps
    """
    left, right = _steps(left_ticks), _steps(right_ticks)
    k = min(left.size, right.size)
    longer = left if left.size >= right.size else right
    return np.unique(np.concatenate([np.minimum(left[:k], right[:k]), longer[k:]]))


def eval_supremum(left_ticks, right_ticks) -> np.ndarray:
    """k-th tick at max(k-th left, k-th right) while both operands have a k-th tick"""
    left, right = _steps(left_ticks), _steps(right_ticks)
    k = min(left.size, right.size)
    return np.unique(np.maximum(left[:k], right[:k]))


class ExpressionEvaluator:
    """Evaluates clock expressions over one run, memoizing sub-expressions"""

    def __init__(self, run: Run, definitions: Optional[Mapping[str, ClockExpr]] = None):
        """
        Initialize evaluator

        Args:
            run: Run providing the declared clocks
            definitions: Derived-clock definitions by name
        """
        self.run = run
        self.definitions = dict(definitions or {})
        self._cache: Dict[ClockExpr, np.ndarray] = {}
        self._resolving: List[str] = []

    def ticks(self, e: ClockExpr) -> np.ndarray:
        cached = self._cache.get(e)
        if cached is not None:
            return cached
        result = self._evaluate(e)
        result.setflags(write=False)
        self._cache[e] = result
        return result

    def _evaluate(self, e: ClockExpr) -> np.ndarray:
        if isinstance(e, Named):
            return self._resolve(e.name)
        if isinstance(e, PeriodicOn):
            return eval_periodic_on(self.ticks(e.base), e.period)
        if isinstance(e, DelayFor):
            return eval_delay_for(self.ticks(e.base), self.ticks(e.reference), e.delay)
        if isinstance(e, Inf):
            return eval_infimum(self.ticks(e.left), self.ticks(e.right))
        if isinstance(e, Sup):
            return eval_supremum(self.ticks(e.left), self.ticks(e.right))
        raise TypeError(f"not a clock expression: {e!r}")

    def _resolve(self, name: str) -> np.ndarray:
        if self.run.has_clock(name):
            return self.run.ticks(name).copy()
        if name not in self.definitions:
            raise UnknownClock(f"clock '{name}' is neither in the run nor defined")
        if name in self._resolving:
            cycle = " -> ".join(self._resolving[self._resolving.index(name):] + [name])
            raise CyclicDefinition(f"cyclic clock definition: {cycle}")
        self._resolving.append(name)
        try:
            return self.ticks(self.definitions[name]).copy()
        finally:
            self._resolving.pop()


def eval_expr(run: Run, e: ClockExpr, definitions: Optional[Mapping[str, ClockExpr]] = None) -> np.ndarray:
    """
    Tick steps of a clock expression over a run

    Args:
        run: Run
        e: Clock expression
        definitions: Optional derived-clock definitions referenced by Named nodes

    Returns:
        Sorted tick steps of the derived clock
    """
    return ExpressionEvaluator(run, definitions).ticks(e)
