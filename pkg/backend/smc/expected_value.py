"""
Expected Value
Mean of a per-run extremum with a Student-t confidence half-width
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from scipy.stats import t as student_t

from backend.errors import BadParameter
from backend.smc.monitors import Observable
from backend.smc.sources import RunSource

logger = logging.getLogger(__name__)

MAX_BINS = 50


@dataclass(frozen=True)
class ValueEstimate:
    """Sample mean of an observable over N runs"""
    mean: float
    half_width: float
    values: np.ndarray
    histogram: pd.DataFrame
    confidence: float = 0.95

    @property
    def runs(self) -> int:
        return int(self.values.size)


def value_histogram(values: np.ndarray) -> pd.DataFrame:
    """
    Frequency table of observed values

    Bins have integer edges and equal width, at most MAX_BINS of them.

    Args:
        values: Per-run values

    Returns:
        DataFrame with columns bin_left, bin_right, count
    """
    lo = math.floor(float(values.min()))
    hi = math.floor(float(values.max())) + 1
    width = max(1, math.ceil((hi - lo) / MAX_BINS))
    edges = np.arange(lo, hi + width, width, dtype=float)
    counts, edges = np.histogram(values, bins=edges)
    return pd.DataFrame({"bin_left": edges[:-1], "bin_right": edges[1:], "count": counts})


def expected_value(source: RunSource, observable: Observable, runs: int, confidence: float = 0.95) -> ValueEstimate:
    """
    Estimate E[observable] from the first `runs` runs

    Args:
        source: Run source
        observable: Per-run max or min of a term
        runs: N >= 2
        confidence: Level of the t interval

    Returns:
        ValueEstimate
    """
    if runs < 2:
        raise BadParameter(f"expected value needs at least 2 runs, got {runs}")
    values = np.array([observable.value(source.run(j)) for j in range(runs)], dtype=float)
    mean = float(values.mean())
    sd = float(values.std(ddof=1))
    half_width = float(student_t.ppf((1 + confidence) / 2, runs - 1) * sd / math.sqrt(runs)) if sd > 0 else 0.0

    logger.info("E[%s] = %.3f +- %.3f over %d runs", observable.label, mean, half_width, runs)
    return ValueEstimate(
        mean=mean, half_width=half_width, values=values, histogram=value_histogram(values), confidence=confidence
    )


def write_histogram_csv(histogram: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a histogram table as CSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    histogram.to_csv(path, index=False)
    return path
