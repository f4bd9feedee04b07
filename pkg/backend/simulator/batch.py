"""
Batch Simulation
Ensembles of independent runs, one PRNG stream per run index
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List

from backend.errors import GeneratorFailure, PrccslError
from backend.simulator.engine import simulate_run
from backend.simulator.model import StaModel, check_model
from backend.trace.run import Run

logger = logging.getLogger(__name__)


def _simulate_one(model: StaModel, bound: int, seed: int, j: int, strict: bool) -> Run:
    try:
        return simulate_run(model, bound, seed, j, strict=strict)
    except GeneratorFailure:
        raise
    except PrccslError as e:
        raise GeneratorFailure(str(e), j=j) from e


def _simulate_chunk(args) -> List[Run]:
    model, bound, seed, indices, strict = args
    return [_simulate_one(model, bound, seed, j, strict) for j in indices]


def simulate_batch(
    model: StaModel,
    bound: int,
    seed: int,
    k: int,
    jobs: int = 1,
    start: int = 0,
    strict: bool = False,
) -> List[Run]:
    """
    Simulate runs start..start+k-1

    Args:
        model: Validated model
        bound: Horizon in ms
        seed: Master seed
        k: Number of runs
        jobs: Worker processes; 1 runs serially
        start: First stream index
        strict: Raise on time-lock instead of truncating

    Returns:
        Runs ordered by stream index, independent of scheduling
    """
    if k < 1:
        raise GeneratorFailure(f"k must be >= 1, got {k}")
    check_model(model)
    indices = list(range(start, start + k))

    if jobs <= 1 or k == 1:
        runs = [_simulate_one(model, bound, seed, j, strict) for j in indices]
    else:
        workers = min(jobs, k)
        chunk = -(-k // workers)
        chunks = [indices[i:i + chunk] for i in range(0, k, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = executor.map(_simulate_chunk, [(model, bound, seed, c, strict) for c in chunks])
            runs = [run for batch in results for run in batch]

    flagged = sum(1 for r in runs if "deadlock" in r.meta)
    if flagged:
        logger.warning("%d of %d runs were truncated by a deadlock", flagged, k)
    logger.debug("Simulated %d runs (streams %d..%d, bound %d, jobs %d)", k, start, start + k - 1, bound, jobs)
    return runs

