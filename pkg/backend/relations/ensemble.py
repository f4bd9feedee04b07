"""
Ensemble Verdicts
Probabilistic relations and their ratio-of-runs verdict
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from backend.clocks.expressions import ClockExpr
from backend.errors import BadParameter, EmptyEnsemble
from backend.relations.checkers import RelationKind, satisfies
from backend.trace.run import Run

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = Fraction(95, 100)


@dataclass(frozen=True)
class ProbRelation:
    """A relation that must hold on at least a fraction p of runs"""
    kind: RelationKind
    left: ClockExpr
    right: ClockExpr
    p: Fraction = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not isinstance(self.p, Fraction):
            object.__setattr__(self, "p", Fraction(str(self.p)))
        if not 0 <= self.p <= 1:
            raise BadParameter(f"threshold p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class EnsembleVerdict:
    """Outcome of checking a probabilistic relation over k runs"""
    satisfied_count: int
    total: int
    ratio: Fraction
    holds: bool


def eval_prccsl(
    rel: ProbRelation,
    runs: Iterable[Run],
    definitions: Optional[Mapping[str, ClockExpr]] = None,
) -> EnsembleVerdict:
    """
    Count satisfying runs and compare m/k with p exactly

    Args:
        rel: Probabilistic relation
        runs: Run ensemble
        definitions: Derived-clock definitions

    Returns:
        EnsembleVerdict
    """
    m = k = 0
    for run in runs:
        k += 1
        if satisfies(run, rel, definitions):
            m += 1
    if k == 0:
        raise EmptyEnsemble("cannot evaluate a relation over zero runs")

    ratio = Fraction(m, k)
    verdict = EnsembleVerdict(satisfied_count=m, total=k, ratio=ratio, holds=ratio >= rel.p)
    logger.debug("%s: %d/%d runs satisfy (p=%s)", rel.kind.value, m, k, rel.p)
    return verdict
