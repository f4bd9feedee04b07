"""
Probability Comparison
Paired sequential test of H0: Pr(phi1) / Pr(phi2) >= u

Run 2j decides phi1 and run 2j+1 decides phi2. Each pair contributes
x = a - u * b, whose mean is p1 - u * p2, so H0 is the region where that mean
is non-negative. The test is Wald's for a mean with indifference region
[-delta, +delta]: H0 is taken as mean >= +delta and H1 as mean <= -delta, with
x in [-u, 1] and its variance bounded by (1 + u)^2 / 4. The log-likelihood
ratio then depends on the per-arm counts only.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

from backend.errors import BadParameter, DegenerateDenominator
from backend.smc.monitors import Monitor
from backend.smc.sources import RunSource
from backend.smc.sprt import Decision, SprtParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Comparison:
    """Outcome of a paired comparison"""
    decision: Decision
    pairs: int
    first_count: int
    second_count: int
    log_ratio: float

    @property
    def runs_used(self) -> int:
        return 2 * self.pairs

    @property
    def ratio(self) -> Optional[float]:
        """Estimated Pr(phi1) / Pr(phi2)"""
        return self.first_count / self.second_count if self.second_count else None


def difference_log_ratio(first_count: int, second_count: int, ratio: float, delta: float) -> float:
    """
    Log-likelihood ratio of H1 (mean <= -delta) against H0 (mean >= +delta)

    Sums -2 * delta * x / sigma^2 over the pairs seen so far, with
    sigma^2 = (1 + ratio)^2 / 4.
    """
    variance = (1 + ratio) ** 2 / 4
    return -2 * delta * (first_count - ratio * second_count) / variance


def compare_probabilities(
    source: RunSource,
    first: Monitor,
    second: Monitor,
    ratio: float,
    params: Optional[SprtParams] = None,
) -> Comparison:
    """
    Test H0: Pr(first) / Pr(second) >= ratio

    Args:
        source: Run source; pairs use runs (2j, 2j+1)
        first: Numerator property, with its own bound
        second: Denominator property, with its own bound
        ratio: Required ratio u > 0
        params: alpha, beta, delta and max_runs; delta is the half-width on Pr(first) - u * Pr(second)

    Returns:
        Comparison

    Raises:
        DegenerateDenominator: second never held within max_runs
    """
    if ratio <= 0:
        raise BadParameter(f"ratio must be positive, got {ratio}")
    params = params or SprtParams.from_settings()
    reject_at = math.log((1 - params.beta) / params.alpha)
    accept_at = math.log(params.beta / (1 - params.alpha))

    decision: Optional[Decision] = None
    llr = 0.0
    pairs = first_count = second_count = 0
    while 2 * (pairs + 1) <= params.max_runs:
        if decision is not None and second_count > 0:
            break
        a = first.holds(source.run(2 * pairs))
        b = second.holds(source.run(2 * pairs + 1))
        pairs += 1
        first_count += a
        second_count += b
        if decision is None:
            llr = difference_log_ratio(first_count, second_count, ratio, params.delta)
            if llr >= reject_at:
                decision = Decision.REJECT
            elif llr <= accept_at:
                decision = Decision.ACCEPT

    if second_count == 0:
        raise DegenerateDenominator(f"{second.label} never held in {2 * pairs} runs")

    result = Comparison(
        decision=decision or Decision.INCONCLUSIVE,
        pairs=pairs,
        first_count=first_count,
        second_count=second_count,
        log_ratio=llr,
    )
    logger.info(
        "%s vs %s (ratio %s): %s after %d pairs, estimated ratio %.3f",
        first.label, second.label, ratio, result.decision.value, pairs, result.ratio,
    )
    return result
