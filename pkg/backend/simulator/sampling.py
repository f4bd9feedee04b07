"""
Delay Sampling
Stochastic sojourn times of automaton locations
"""

import math
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence

import numpy as np

from backend.errors import MissingRate
from backend.simulator.model import Automaton, Edge

# Slack for comparing clock readings against guard and invariant constants
GUARD_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DelayWindow:
    """
    Where the next firing of a location may fall, relative to now

    lower is the earliest time any variable-enabled edge's clock guard holds;
    upper is the invariant bound (inf when unbounded).
    """
    lower: float
    upper: float
    edges: Sequence[Edge]
    rate: Optional[float] = None

    @property
    def passive(self) -> bool:
        """No edge can leave the location on its own"""
        return not self.edges and math.isinf(self.upper)

    @property
    def time_locked(self) -> bool:
        """The invariant expires before any edge can be taken"""
        return self.lower > self.upper + GUARD_TOLERANCE


def variables_allow(edge: Edge, valuation: Mapping[str, int]) -> bool:
    return all(valuation.get(var) == value for var, value in edge.when.items())


def clocks_allow(edge: Edge, clock_values: Mapping[str, float]) -> bool:
    return all(clock_values.get(c, 0.0) + GUARD_TOLERANCE >= bound for c, bound in edge.guard.items())


def enabled_edges(edges: Sequence[Edge], clock_values: Mapping[str, float], valuation: Mapping[str, int]) -> List[Edge]:
    """Edges whose variable and clock guards both hold now"""
    return [e for e in edges if variables_allow(e, valuation) and clocks_allow(e, clock_values)]


def delay_window(
    automaton: Automaton,
    location: str,
    clock_values: Optional[Mapping[str, float]] = None,
    valuation: Optional[Mapping[str, int]] = None,
) -> DelayWindow:
    """
    Compute the firing window of a location

    Args:
        automaton: Automaton owning the location
        location: Current location name
        clock_values: Current local clock readings (default all 0)
        valuation: Current variable values

    Returns:
        DelayWindow relative to now
    """
    clocks = clock_values or {}
    loc = automaton.location(location)
    candidates = [e for e in automaton.outgoing(location) if variables_allow(e, valuation or {})]

    upper = math.inf
    for c, bound in loc.invariant.items():
        upper = min(upper, bound - clocks.get(c, 0.0))
    upper = max(upper, 0.0)

    lower = math.inf
    for e in candidates:
        wait = 0.0
        for c, bound in e.guard.items():
            wait = max(wait, bound - clocks.get(c, 0.0))
        lower = min(lower, wait)
    if not candidates:
        lower = math.inf if math.isinf(upper) else upper
    return DelayWindow(lower=lower, upper=upper, edges=tuple(candidates), rate=loc.rate)


def sample_from_window(window: DelayWindow, rng: np.random.Generator, where: str = "") -> float:
    """
    Draw a delay from a window

    Uniform over [lower, upper] under a bounded invariant (exact when the
    interval is degenerate), lower plus an exponential with the location rate
    otherwise. Passive windows give inf; time-locked windows give upper.
    """
    if window.passive:
        return math.inf
    if not window.edges or window.time_locked:
        return window.upper
    if math.isinf(window.upper):
        if window.rate is None:
            raise MissingRate(f"{where}: location without an upper invariant needs a rate")
        return window.lower + float(rng.exponential(1.0 / window.rate))
    if window.upper - window.lower <= GUARD_TOLERANCE:
        return window.upper
    return float(rng.uniform(window.lower, window.upper))


def delay_sample(
    automaton: Automaton,
    location: str,
    rng: np.random.Generator,
    clock_values: Optional[Mapping[str, float]] = None,
    valuation: Optional[Mapping[str, int]] = None,
) -> float:
    """
    Sample how long an automaton stays in a location

    Args:
        automaton: Automaton owning the location
        location: Location name
        rng: Random generator of the current run
        clock_values: Current local clock readings (default all 0, i.e. just entered)
        valuation: Current variable values

    Returns:
        Delay in ms; inf for a passive location
    """
    window = delay_window(automaton, location, clock_values, valuation)
    return sample_from_window(window, rng, f"{automaton.name}.{location}")


def choose_edge(edges: Sequence[Edge], rng: np.random.Generator) -> Edge:
    """Pick one edge with probability proportional to its weight"""
    if len(edges) == 1:
        return edges[0]
    weights = np.array([e.weight for e in edges], dtype=float)
    return edges[int(rng.choice(len(edges), p=weights / weights.sum()))]
