"""
Hypothesis Testing
Sequential threshold tests and fixed-size ensemble verdicts over run sources
"""

import logging
from dataclasses import dataclass
from typing import List, Mapping, Optional

from backend.clocks.expressions import ClockExpr
from backend.errors import BadParameter
from backend.relations.ensemble import EnsembleVerdict, ProbRelation, eval_prccsl
from backend.smc.monitors import Monitor
from backend.smc.sources import RunSource, take_runs
from backend.smc.sprt import SequentialTester, SprtParams, Verdict

logger = logging.getLogger(__name__)


def hypothesis_test(source: RunSource, monitor: Monitor, params: SprtParams) -> Verdict:
    """
    Test whether the monitored property holds with probability >= threshold

    Args:
        source: Run source, consumed in stream order from j = 0
        monitor: Per-run property
        params: Sequential test parameters

    Returns:
        Verdict
    """
    tester = SequentialTester(params)
    j = 0
    while tester.decision is None and not tester.exhausted:
        tester.update(monitor.holds(source.run(j)))
        j += 1

    verdict = tester.verdict()
    logger.info(
        "%s: %s after %d runs (%d satisfied, threshold %s)",
        monitor.label, verdict.decision.value, verdict.runs_used, verdict.satisfied_count, params.threshold,
    )
    return verdict


@dataclass(frozen=True)
class EnsembleResult:
    """Ratio-of-runs verdict of every relation of a constraint"""
    verdicts: List[EnsembleVerdict]
    runs: int

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts)


def ensemble_verdict(
    source: RunSource,
    relations: List[ProbRelation],
    runs: int,
    bound: Optional[int] = None,
    definitions: Optional[Mapping[str, ClockExpr]] = None,
) -> EnsembleResult:
    """
    Check relations on the first `runs` runs of a source

    Args:
        source: Run source
        relations: Probabilistic relations, each with its own threshold
        runs: Ensemble size
        bound: Optional horizon the runs are truncated to
        definitions: Derived-clock definitions

    Returns:
        EnsembleResult
    """
    if runs < 1:
        raise BadParameter(f"runs must be >= 1, got {runs}")
    ensemble = take_runs(source, runs)
    if bound is not None:
        ensemble = [run.truncate(bound) for run in ensemble]
    verdicts = [eval_prccsl(rel, ensemble, definitions) for rel in relations]
    result = EnsembleResult(verdicts=verdicts, runs=runs)
    logger.info("Ensemble of %d runs: %s", runs, "holds" if result.holds else "fails")
    return result
