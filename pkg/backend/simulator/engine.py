"""
Simulation Engine
Race semantics for networks of stochastic timed automata, discretized onto 1 ms steps
"""

import logging
import math
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from backend.errors import InvalidModel, ModelDeadlock
from backend.simulator.model import Automaton, Edge, StaModel, check_model
from backend.simulator.sampling import (
    GUARD_TOLERANCE,
    choose_edge,
    delay_window,
    enabled_edges,
    sample_from_window,
)
from backend.trace.run import Run, build_run

logger = logging.getLogger(__name__)


def location_signal(automaton: str) -> str:
    """Signal name carrying an automaton's location index"""
    return f"{automaton}.loc"


def make_rng(seed: int, j: int = 0) -> np.random.Generator:
    """Independent PCG64 stream j of a master seed"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(j,))))


class _AutomatonState:
    """Mutable per-run state of one automaton"""

    def __init__(self, automaton: Automaton):
        self.automaton = automaton
        self.location = automaton.initial
        self.resets: Dict[str, float] = {c: 0.0 for c in automaton.clocks}
        self.fire_at = math.inf
        self.blocked = False

    def clock_values(self, now: float) -> Dict[str, float]:
        return {c: now - t for c, t in self.resets.items()}

    def invariant_expired(self, now: float) -> bool:
        loc = self.automaton.location(self.location)
        return any(now - self.resets[c] + GUARD_TOLERANCE >= bound for c, bound in loc.invariant.items())


class Simulator:
    """Simulates one run of a model"""

    def __init__(self, model: StaModel, bound: int, strict: bool = False):
        """
        Initialize simulator

        Args:
            model: Validated model
            bound: Horizon in ms; events at times >= bound are not recorded
            strict: Raise ModelDeadlock instead of truncating the run
        """
        if bound < 1:
            raise InvalidModel(f"bound must be >= 1, got {bound}")
        self.model = model
        self.bound = bound
        self.strict = strict
        self.clocks = model.clock_names()

        # Reverse event map: (automaton, edge) or "!channel" -> clocks
        self.edge_clocks: Dict[Tuple[str, str], List[str]] = {}
        self.channel_clocks: Dict[str, List[str]] = {}
        for clock, sources in model.events.items():
            for source in sources:
                if source.startswith("!"):
                    self.channel_clocks.setdefault(source[1:], []).append(clock)
                else:
                    automaton, _, edge = source.partition(".")
                    self.edge_clocks.setdefault((automaton, edge), []).append(clock)

    def run(self, rng: np.random.Generator, meta: Optional[dict] = None) -> Run:
        """
        Simulate until the horizon

        Args:
            rng: Random generator of this run
            meta: Extra metadata stored in the run

        Returns:
            Run with n = bound (or shorter after a deadlock)
        """
        model = self.model
        states = [_AutomatonState(a) for a in model.automata]
        valuation = dict(model.variables)
        ticks: Dict[str, Set[int]] = {c: set() for c in self.clocks}
        changes: Dict[str, List[Tuple[int, int]]] = {}
        deadlock: Optional[float] = None
        now = 0.0

        for state in states:
            self._resample(state, now, valuation, rng)

        while True:
            index = min(range(len(states)), key=lambda k: (states[k].fire_at, k))
            state = states[index]
            t = state.fire_at
            if t >= self.bound:
                break
            now = t

            edges = enabled_edges(state.automaton.outgoing(state.location), state.clock_values(now), valuation)
            if not edges:
                if state.invariant_expired(now):
                    message = f"{state.automaton.name} time-locked in {state.location} at t={now:.3f}"
                    if self.strict:
                        raise ModelDeadlock(message, time=now)
                    logger.warning("%s; truncating run", message)
                    deadlock = now
                    break
                self._resample(state, now, valuation, rng)
                continue

            step = int(math.floor(now))
            edge = choose_edge(edges, rng)
            self._take(state, edge, now, step, valuation, ticks, changes)
            if edge.emit:
                for clock in self.channel_clocks.get(edge.emit, ()):
                    ticks[clock].add(step)
                for other in states:
                    if other is state:
                        continue
                    receivers = enabled_edges(
                        other.automaton.receiving(other.location, edge.emit), other.clock_values(now), valuation
                    )
                    if receivers:
                        self._take(other, choose_edge(receivers, rng), now, step, valuation, ticks, changes)
                        self._resample(other, now, valuation, rng)
            self._resample(state, now, valuation, rng)
            for other in states:
                if other.blocked and other is not state:
                    self._resample(other, now, valuation, rng)

        n = self.bound if deadlock is None else int(math.floor(deadlock))
        if self.model.universal:
            ticks[self.model.universal] = set(range(n))
        tick_lists = {c: sorted(s for s in steps if s <= n) for c, steps in ticks.items()}
        signals = self._signals(changes, n)
        run_meta = dict(meta or {})
        run_meta["locations"] = {a.name: [loc.name for loc in a.locations] for a in model.automata}
        if deadlock is not None:
            run_meta["deadlock"] = deadlock
        return build_run(tick_lists, n, clocks=self.clocks, signals=signals, meta=run_meta)

    def _take(self, state, edge: Edge, now: float, step: int, valuation, ticks, changes) -> None:
        """Apply one edge of one automaton"""
        automaton = state.automaton
        for var, value in edge.set.items():
            valuation[var] = value
            changes.setdefault(var, []).append((step, value))
        for var, delta in edge.add.items():
            valuation[var] = valuation[var] + delta
            changes.setdefault(var, []).append((step, valuation[var]))
        for c in edge.reset:
            state.resets[c] = now
        if edge.target != state.location:
            state.location = edge.target
            changes.setdefault(location_signal(automaton.name), []).append(
                (step, automaton.location_index(edge.target))
            )
        for clock in self.edge_clocks.get((automaton.name, edge.id), ()):
            ticks[clock].add(step)
        logger.debug("t=%.3f %s.%s -> %s", now, automaton.name, edge.id, edge.target)

    def _resample(self, state, now: float, valuation, rng) -> None:
        window = delay_window(state.automaton, state.location, state.clock_values(now), valuation)
        delay = sample_from_window(window, rng, f"{state.automaton.name}.{state.location}")
        # Variable guards may open later; passive locations stay passive
        state.blocked = not window.edges and bool(state.automaton.outgoing(state.location))
        state.fire_at = now + delay

    def _signals(self, changes: Dict[str, List[Tuple[int, int]]], n: int) -> Dict[str, np.ndarray]:
        """Per-step values at the end of each step"""
        initial = dict(self.model.variables)
        for a in self.model.automata:
            initial[location_signal(a.name)] = a.location_index(a.initial)
        signals = {}
        for name, value in initial.items():
            values = np.full(n + 1, value, dtype=np.int64)
            for step, new in changes.get(name, ()):
                if step <= n:
                    values[step:] = new
            signals[name] = values
        return signals


def simulate_run(
    model: StaModel,
    bound: int,
    seed: int,
    j: int = 0,
    strict: bool = False,
) -> Run:
    """
    Simulate run j of a model

    Args:
        model: Model (its event map defines the run's clocks)
        bound: Horizon in ms
        seed: Master seed
        j: Stream index
        strict: Raise ModelDeadlock on time-lock

    Returns:
        Run with meta["stream"] = j
    """
    check_model(model)
    simulator = Simulator(model, bound, strict=strict)
    return simulator.run(make_rng(seed, j), meta={"stream": j, "seed": seed})
