"""
Sequential Probability Ratio Test
Wald's test of H0: p >= threshold + delta against H1: p <= threshold - delta
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from backend.config import get_settings
from backend.errors import BadParameter

logger = logging.getLogger(__name__)


class Decision(str, Enum):
    """Outcome of a sequential test"""
    ACCEPT = "accept"
    REJECT = "reject"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SprtParams:
    """
    Parameters of a sequential test

    Attributes:
        threshold: Probability the property must reach
        alpha: Probability of rejecting H0 although it holds
        beta: Probability of accepting H0 although H1 holds
        delta: Half-width of the indifference region around the threshold
        max_runs: Number of outcomes after which the test gives up
    """
    threshold: float
    alpha: float = 0.05
    beta: float = 0.05
    delta: float = 0.01
    max_runs: int = 10000

    def __post_init__(self):
        if not 0 < self.alpha < 0.5 or not 0 < self.beta < 0.5:
            raise BadParameter(f"alpha and beta must lie in (0, 0.5), got {self.alpha}, {self.beta}")
        if self.delta <= 0:
            raise BadParameter(f"delta must be positive, got {self.delta}")
        if not 0 < self.threshold - self.delta or not self.threshold + self.delta < 1:
            raise BadParameter(
                f"indifference region [{self.threshold - self.delta}, {self.threshold + self.delta}] "
                "must lie inside (0, 1)"
            )
        if self.max_runs < 1:
            raise BadParameter(f"max_runs must be >= 1, got {self.max_runs}")

    @classmethod
    def from_settings(cls, threshold: Optional[float] = None, **overrides) -> "SprtParams":
        """Parameters with defaults taken from settings; None overrides are ignored"""
        settings = get_settings()
        values = {
            "threshold": settings.threshold if threshold is None else threshold,
            "alpha": settings.alpha,
            "beta": settings.beta,
            "delta": settings.delta,
            "max_runs": settings.max_runs,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def p0(self) -> float:
        return self.threshold + self.delta

    @property
    def p1(self) -> float:
        return self.threshold - self.delta

    @property
    def reject_ratio(self) -> float:
        """Likelihood ratio at or above which H0 is rejected, (1 - beta) / alpha"""
        return (1 - self.beta) / self.alpha

    @property
    def accept_ratio(self) -> float:
        """Likelihood ratio at or below which H0 is accepted, beta / (1 - alpha)"""
        return self.beta / (1 - self.alpha)


@dataclass(frozen=True)
class Verdict:
    """Result of a sequential test"""
    decision: Decision
    runs_used: int
    satisfied_count: int
    log_ratio: float


class SequentialTester:
    """Consumes Bernoulli outcomes one at a time until a boundary is crossed"""

    def __init__(self, params: SprtParams):
        self.params = params
        self._success_step = math.log(params.p1 / params.p0)
        self._failure_step = math.log((1 - params.p1) / (1 - params.p0))
        self._upper = math.log(params.reject_ratio)
        self._lower = math.log(params.accept_ratio)
        self.log_ratio = 0.0
        self.runs = 0
        self.successes = 0
        self.decision: Optional[Decision] = None

    @property
    def exhausted(self) -> bool:
        return self.runs >= self.params.max_runs

    def update(self, outcome: bool) -> Optional[Decision]:
        """
        Add one outcome

        Args:
            outcome: Whether the property held on the run

        Returns:
            The decision once reached, else None
        """
        if self.decision is not None:
            return self.decision
        self.runs += 1
        if outcome:
            self.successes += 1
            self.log_ratio += self._success_step
        else:
            self.log_ratio += self._failure_step

        if self.log_ratio >= self._upper:
            self.decision = Decision.REJECT
        elif self.log_ratio <= self._lower:
            self.decision = Decision.ACCEPT
        return self.decision

    def verdict(self) -> Verdict:
        return Verdict(
            decision=self.decision or Decision.INCONCLUSIVE,
            runs_used=self.runs,
            satisfied_count=self.successes,
            log_ratio=self.log_ratio,
        )


def sprt(outcomes: Iterable[bool], params: SprtParams) -> Verdict:
    """
    Run a sequential test over an outcome stream

    Args:
        outcomes: Bernoulli outcomes in stream order
        params: Test parameters

    Returns:
        Verdict; INCONCLUSIVE when max_runs outcomes (or the stream) ran out first
    """
    tester = SequentialTester(params)
    for outcome in outcomes:
        if tester.update(bool(outcome)) is not None or tester.exhausted:
            break
    verdict = tester.verdict()
    logger.debug("SPRT %s after %d runs (%d satisfied)", verdict.decision.value, verdict.runs_used, verdict.satisfied_count)
    return verdict
