"""
Probability Estimation
Clopper-Pearson intervals over a Chernoff-Hoeffding sized ensemble
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from scipy.stats import beta as beta_dist

from backend.errors import BadParameter
from backend.smc.monitors import Monitor
from backend.smc.sources import RunSource

logger = logging.getLogger(__name__)

METHODS = ("clopper-pearson", "chernoff")


def clopper_pearson(m: int, k: int, alpha: float) -> Tuple[float, float]:
    """
    Exact binomial confidence interval

    Args:
        m: Successes
        k: Trials
        alpha: 1 - confidence

    Returns:
        (lower, upper); lower is 0 when m = 0 and upper is 1 when m = k
    """
    if k < 1 or not 0 <= m <= k:
        raise BadParameter(f"need 0 <= m <= k and k >= 1, got m={m}, k={k}")
    if not 0 < alpha < 1:
        raise BadParameter(f"alpha must lie in (0, 1), got {alpha}")
    lower = 0.0 if m == 0 else float(beta_dist.ppf(alpha / 2, m, k - m + 1))
    upper = 1.0 if m == k else float(beta_dist.ppf(1 - alpha / 2, m + 1, k - m))
    return lower, upper


def chernoff_runs(alpha: float, epsilon: float) -> int:
    """Runs needed so that |p_hat - p| <= epsilon with probability 1 - alpha"""
    if not 0 < alpha < 1 or epsilon <= 0:
        raise BadParameter(f"need 0 < alpha < 1 and epsilon > 0, got {alpha}, {epsilon}")
    return math.ceil(math.log(2 / alpha) / (2 * epsilon ** 2))


@dataclass(frozen=True)
class Estimate:
    """Point estimate and confidence interval of a probability"""
    satisfied_count: int
    runs: int
    point: Fraction
    interval: Tuple[float, float]
    confidence: float
    method: str


def estimate_probability(
    source: RunSource,
    monitor: Monitor,
    confidence: float = 0.95,
    epsilon: float = 0.05,
    method: str = "clopper-pearson",
    runs: Optional[int] = None,
) -> Estimate:
    """
    Estimate the probability of a property

    Args:
        source: Run source, consumed from j = 0
        monitor: Per-run property
        confidence: Interval confidence 1 - alpha
        epsilon: Precision deciding the run count
        method: "clopper-pearson" for the exact interval, "chernoff" for p_hat +- epsilon
        runs: Explicit run count overriding the Chernoff-Hoeffding bound

    Returns:
        Estimate whose point is exactly m/k
    """
    if not 0 < confidence < 1:
        raise BadParameter(f"confidence must lie in (0, 1), got {confidence}")
    if method not in METHODS:
        raise BadParameter(f"unknown estimation method '{method}'")
    alpha = 1 - confidence
    k = runs if runs is not None else chernoff_runs(alpha, epsilon)
    if k < 1:
        raise BadParameter(f"runs must be >= 1, got {k}")

    m = sum(1 for j in range(k) if monitor.holds(source.run(j)))
    point = Fraction(m, k)
    if method == "clopper-pearson":
        interval = clopper_pearson(m, k, alpha)
    else:
        interval = (max(0.0, float(point) - epsilon), min(1.0, float(point) + epsilon))

    logger.info("%s: %d/%d runs, interval [%.3f, %.3f]", monitor.label, m, k, *interval)
    return Estimate(satisfied_count=m, runs=k, point=point, interval=interval, confidence=confidence, method=method)
