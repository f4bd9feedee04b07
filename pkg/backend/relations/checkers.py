"""
Relation Checkers
Per-run satisfaction of subclock, coincidence, exclusion, causality and precedence
"""

from enum import Enum
from typing import Callable, Dict, Mapping, Optional, TYPE_CHECKING

import numpy as np

from backend.clocks.evaluator import ExpressionEvaluator
from backend.clocks.expressions import ClockExpr
from backend.trace.run import Run, history_from_ticks

if TYPE_CHECKING:
    from backend.relations.ensemble import ProbRelation


class RelationKind(str, Enum):
    """The five CCSL relations; values are the spec-language keywords"""
    SUBCLOCK = "subclock"
    COINCIDENCE = "coincides"
    EXCLUSION = "excludes"
    CAUSALITY = "causes"
    PRECEDENCE = "precedes"

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_SYMBOLS = {
    RelationKind.SUBCLOCK: "⊆",
    RelationKind.COINCIDENCE: "≡",
    RelationKind.EXCLUSION: "#",
    RelationKind.CAUSALITY: "≼",
    RelationKind.PRECEDENCE: "≺",
}


def _indicator(run: Run, ticks) -> np.ndarray:
    flags = np.zeros(run.num_steps, dtype=bool)
    flags[np.asarray(ticks, dtype=np.int64)] = True
    return flags


def _history(run: Run, ticks) -> np.ndarray:
    return history_from_ticks(np.asarray(ticks, dtype=np.int64), run.n)


def check_subclock(run: Run, sub, sup) -> bool:
    """
    Whenever sub ticks, sup ticks at the same step

    Args:
        run: Run the tick lists come from
        sub: Tick steps of the subclock
        sup: Tick steps of the superclock

    Returns:
        True if the relation holds on the run
    """
    return not np.any(_indicator(run, sub) & ~_indicator(run, sup))


def check_coincidence(run: Run, a, b) -> bool:
    """Both clocks tick at exactly the same steps"""
    return bool(np.array_equal(_indicator(run, a), _indicator(run, b)))


def check_exclusion(run: Run, a, b) -> bool:
    """No step carries both clocks"""
    return not np.any(_indicator(run, a) & _indicator(run, b))


def check_causality(run: Run, cause, effect) -> bool:
    """
    History of the cause never falls behind the history of the effect

    Args:
        run: Run the tick lists come from
        cause: Tick steps of the cause
        effect: Tick steps of the effect

    Returns:
        True iff H(cause, i) >= H(effect, i) for every step i in [0, n]
    """
    return bool(np.all(_history(run, cause) >= _history(run, effect)))


def check_precedence(run: Run, a, b) -> bool:
    """
    Causality, and b never ticks at a step where both histories are equal

    Args:
        run: Run the tick lists come from
        a: Tick steps of the preceding clock
        b: Tick steps of the following clock

    Returns:
        True if the strict relation holds on the run
    """
    ha, hb = _history(run, a), _history(run, b)
    if np.any(ha < hb):
        return False
    return not np.any((ha == hb) & _indicator(run, b))


CHECKERS: Dict[RelationKind, Callable[[Run, object, object], bool]] = {
    RelationKind.SUBCLOCK: check_subclock,
    RelationKind.COINCIDENCE: check_coincidence,
    RelationKind.EXCLUSION: check_exclusion,
    RelationKind.CAUSALITY: check_causality,
    RelationKind.PRECEDENCE: check_precedence,
}


def check_relation(run: Run, kind: RelationKind, left, right) -> bool:
    """Dispatch to the checker of a relation kind"""
    return CHECKERS[kind](run, left, right)


def satisfies(
    run: Run,
    relation: "ProbRelation",
    definitions: Optional[Mapping[str, ClockExpr]] = None,
    evaluator: Optional[ExpressionEvaluator] = None,
) -> bool:
    """
    Evaluate both sides of a relation on a run and check it

    Args:
        run: Run
        relation: Relation over clock expressions
        definitions: Derived-clock definitions
        evaluator: Optional shared evaluator for the same run

    Returns:
        Crisp per-run satisfaction
    """
    evaluator = evaluator or ExpressionEvaluator(run, definitions)
    left = evaluator.ticks(relation.left)
    right = evaluator.ticks(relation.right)
    return check_relation(run, relation.kind, left, right)
