"""
Simulation Monitoring
Per-run trajectories of numeric terms
"""

import logging
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd

from backend.clocks.expressions import ClockExpr
from backend.errors import BadParameter
from backend.smc.monitors import TermEvaluator
from backend.smc.sources import RunSource
from backend.speclang.printer import format_term

logger = logging.getLogger(__name__)


def monitor_simulations(
    source: RunSource,
    terms: Sequence,
    runs: int,
    bound: int,
    definitions: Optional[Mapping[str, ClockExpr]] = None,
) -> List[pd.DataFrame]:
    """
    Trajectories of terms over the first `runs` runs

    Args:
        source: Run source
        terms: Numeric terms to monitor
        runs: N >= 1
        bound: Horizon the runs are truncated to
        definitions: Derived-clock definitions

    Returns:
        One DataFrame per run: a step column plus one column per term, named by its text
    """
    if runs < 1:
        raise BadParameter(f"runs must be >= 1, got {runs}")
    if not terms:
        raise BadParameter("nothing to monitor")

    frames = []
    for j in range(runs):
        run = source.run(j).truncate(bound)
        evaluator = TermEvaluator(run, definitions)
        columns = {"step": np.arange(run.num_steps)}
        for term in terms:
            columns[format_term(term)] = evaluator.values(term)
        frames.append(pd.DataFrame(columns))
    logger.info("Monitored %d terms over %d runs", len(terms), runs)
    return frames


def write_trajectories_csv(frames: Sequence[pd.DataFrame], path: Union[str, Path]) -> Path:
    """Write trajectories as one long table with a run column"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = pd.concat([frame.assign(run=j) for j, frame in enumerate(frames)], ignore_index=True)
    table = table[["run"] + [c for c in table.columns if c != "run"]]
    table.to_csv(path, index=False)
    return path
