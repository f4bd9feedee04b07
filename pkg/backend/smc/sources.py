"""
Run Sources
Indexed run generators: live simulation or pre-recorded traces
"""

import logging
from collections import OrderedDict
from pathlib import Path
from typing import Iterator, List, Optional, Protocol, Sequence, Union

from backend.errors import GeneratorFailure
from backend.simulator.batch import simulate_batch
from backend.simulator.model import StaModel, check_model
from backend.trace.run import Run
from backend.trace.trace_io import read_trace_dir

logger = logging.getLogger(__name__)


class RunSource(Protocol):
    """Run j of an ensemble, for any j >= 0"""
    description: str

    def run(self, j: int) -> Run:
        ...


def iter_runs(source: RunSource, start: int = 0) -> Iterator[Run]:
    """Runs start, start + 1, ... in stream order"""
    j = start
    while True:
        yield source.run(j)
        j += 1


def take_runs(source: RunSource, k: int, start: int = 0) -> List[Run]:
    return [source.run(j) for j in range(start, start + k)]


class SimulationSource:
    """Simulates runs on demand in chunks, keeping the most recent ones"""

    def __init__(
        self,
        model: StaModel,
        bound: int,
        seed: int,
        jobs: int = 1,
        chunk: Optional[int] = None,
        cache_runs: int = 256,
        strict: bool = False,
    ):
        """
        Initialize source

        Args:
            model: Model to simulate
            bound: Simulation horizon; monitors truncate to their own bounds
            seed: Master seed
            jobs: Worker processes per chunk
            chunk: Runs simulated per request (default 16 per worker)
            cache_runs: Number of runs kept in memory
            strict: Raise on time-lock instead of truncating
        """
        check_model(model)
        self.model = model
        self.bound = bound
        self.seed = seed
        self.jobs = max(1, jobs)
        self.chunk = chunk or 16 * self.jobs
        self.cache_runs = max(cache_runs, self.chunk)
        self.strict = strict
        self.description = f"simulation of {model.name} (seed {seed}, bound {bound})"
        self._cache: "OrderedDict[int, Run]" = OrderedDict()
        self.generated = 0

    def run(self, j: int) -> Run:
        cached = self._cache.get(j)
        if cached is not None:
            return cached
        runs = simulate_batch(self.model, self.bound, self.seed, self.chunk, jobs=self.jobs, start=j, strict=self.strict)
        self.generated += len(runs)
        for offset, run in enumerate(runs):
            self._cache[j + offset] = run
        while len(self._cache) > self.cache_runs:
            self._cache.popitem(last=False)
        return runs[0]


class TraceSource:
    """Pre-recorded runs; asking past the last one fails"""

    def __init__(self, runs: Sequence[Run], description: str = "recorded traces"):
        self.runs = list(runs)
        self.description = description

    @classmethod
    def from_dir(cls, trace_dir: Union[str, Path]) -> "TraceSource":
        runs = read_trace_dir(trace_dir)
        logger.info("Loaded %d traces from %s", len(runs), trace_dir)
        return cls(runs, description=f"traces in {trace_dir}")

    def __len__(self) -> int:
        return len(self.runs)

    def run(self, j: int) -> Run:
        if j >= len(self.runs):
            raise GeneratorFailure(f"only {len(self.runs)} recorded traces are available", j=j)
        return self.runs[j]
