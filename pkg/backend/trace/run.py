"""
Run Module
Finite runs over logical clocks: tick sets per step and clock histories
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from backend.errors import IndexOutOfRange, NonMonotone, UnknownClock

logger = logging.getLogger(__name__)


def _frozen(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Run:
    """A finite run: steps 0..n, each carrying the set of clocks ticking there"""

    n: int
    clocks: Tuple[str, ...]
    tick_arrays: Mapping[str, np.ndarray]
    signals: Mapping[str, np.ndarray] = field(default_factory=dict)
    meta: Mapping[str, Any] = field(default_factory=dict)
    _histories: Dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def num_steps(self) -> int:
        """Number of steps, n + 1"""
        return self.n + 1

    def _check_index(self, i: int) -> None:
        if i < 0 or i > self.n:
            raise IndexOutOfRange(f"step {i} outside [0, {self.n}]")

    def has_clock(self, c: str) -> bool:
        return c in self.tick_arrays

    def ticks(self, c: str) -> np.ndarray:
        """
        Tick steps of a clock

        Args:
            c: Clock name

        Returns:
            Sorted read-only int64 array of steps
        """
        try:
            return self.tick_arrays[c]
        except KeyError:
            raise UnknownClock(f"clock '{c}' is not declared in this run") from None

    def ticks_at(self, c: str, i: int) -> bool:
        self._check_index(i)
        ticks = self.ticks(c)
        pos = int(np.searchsorted(ticks, i))
        return pos < ticks.size and int(ticks[pos]) == i

    def tick_set(self, i: int) -> FrozenSet[str]:
        """Clocks ticking at step i, R(i)"""
        self._check_index(i)
        return frozenset(c for c in self.clocks if self.ticks_at(c, i))

    def indicator(self, c: str) -> np.ndarray:
        """Boolean tick indicator of length n + 1"""
        flags = np.zeros(self.num_steps, dtype=bool)
        flags[self.ticks(c)] = True
        return flags

    def history_table(self, c: str) -> np.ndarray:
        """
        History of a clock at every step

        Value at step 0 is 0; value at step i+1 adds one exactly when c ticks at step i.

        Args:
            c: Clock name

        Returns:
            Read-only int64 array of length n + 1
        """
        table = self._histories.get(c)
        if table is None:
            table = history_from_ticks(self.ticks(c), self.n)
            self._histories[c] = _frozen(table)
        return table

    def history(self, c: str, i: int) -> int:
        self._check_index(i)
        return int(self.history_table(c)[i])

    def tick_lists(self) -> Dict[str, List[int]]:
        return {c: [int(s) for s in self.tick_arrays[c]] for c in self.clocks}

    def truncate(self, bound: int) -> "Run":
        """
        Prefix of the run for a shorter query bound

        Args:
            bound: New horizon; ticks at steps >= bound are dropped and n becomes bound

        Returns:
            Truncated run (self when bound >= n)
        """
        if bound >= self.n:
            return self
        if bound < 0:
            raise IndexOutOfRange(f"bound {bound} is negative")
        ticks = {c: arr[arr < bound] for c, arr in self.tick_arrays.items()}
        signals = {name: values[: bound + 1] for name, values in self.signals.items()}
        return build_run(ticks, bound, clocks=self.clocks, signals=signals, meta=self.meta)

    def with_clocks(self, extra: Mapping[str, Sequence[int]]) -> "Run":
        """New run with additional clocks; existing clocks keep their ticks"""
        ticks: Dict[str, Sequence[int]] = dict(self.tick_arrays)
        ticks.update(extra)
        clocks = self.clocks + tuple(c for c in extra if c not in self.tick_arrays)
        return build_run(ticks, self.n, clocks=clocks, signals=self.signals, meta=self.meta)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Run):
            return NotImplemented
        if self.n != other.n or self.clocks != other.clocks:
            return False
        if set(self.signals) != set(other.signals) or dict(self.meta) != dict(other.meta):
            return False
        return all(np.array_equal(self.tick_arrays[c], other.tick_arrays[c]) for c in self.clocks) and all(
            np.array_equal(self.signals[s], other.signals[s]) for s in self.signals
        )

    __hash__ = None


def history_from_ticks(ticks: np.ndarray, n: int) -> np.ndarray:
    """History table of a sorted tick array over steps 0..n"""
    flags = np.zeros(n + 1, dtype=np.int64)
    flags[ticks] = 1
    table = np.zeros(n + 1, dtype=np.int64)
    table[1:] = np.cumsum(flags[:-1])
    return table


def _as_tick_array(c: str, ticks: Iterable[int], n: int) -> np.ndarray:
    values = np.asarray(list(ticks), dtype=np.int64)
    if values.size == 0:
        return _frozen(values)
    if int(values.min()) < 0 or int(values.max()) > n:
        raise IndexOutOfRange(f"clock '{c}' has a tick outside [0, {n}]")
    if np.any(np.diff(values) <= 0):
        raise NonMonotone(f"ticks of clock '{c}' are not strictly increasing")
    return _frozen(values)


def build_run(
    tick_lists: Mapping[str, Iterable[int]],
    n: int,
    clocks: Optional[Sequence[str]] = None,
    signals: Optional[Mapping[str, Sequence[int]]] = None,
    meta: Optional[Mapping[str, Any]] = None,
) -> Run:
    """
    Construct a run from per-clock tick lists

    Args:
        tick_lists: Mapping clock -> strictly increasing step indices
        n: Last step index (the run has steps 0..n)
        clocks: Declared clocks, in order; defaults to the keys of tick_lists
        signals: Optional per-step integer values (length n + 1 each)
        meta: Optional metadata (stream index, flags)

    Returns:
        Immutable Run
    """
    if n < 0:
        raise IndexOutOfRange(f"step count {n} is negative")

    declared = tuple(clocks) if clocks is not None else tuple(tick_lists)
    arrays: Dict[str, np.ndarray] = {}
    for c in declared:
        arrays[c] = _as_tick_array(c, tick_lists.get(c, ()), n)
    for c in tick_lists:
        if c not in arrays:
            raise UnknownClock(f"ticks given for undeclared clock '{c}'")

    signal_arrays: Dict[str, np.ndarray] = {}
    for name, values in (signals or {}).items():
        array = np.asarray(values, dtype=np.int64)
        if array.shape != (n + 1,):
            raise IndexOutOfRange(f"signal '{name}' must have {n + 1} values")
        signal_arrays[name] = _frozen(array.copy())

    return Run(n=n, clocks=declared, tick_arrays=arrays, signals=signal_arrays, meta=dict(meta or {}))


def history(run: Run, c: str, i: int) -> int:
    """
    Number of ticks of c strictly before step i

    Args:
        run: Run
        c: Clock name
        i: Step index in [0, n]

    Returns:
        History value H(c, i)
    """
    return run.history(c, i)


def ticks_at(run: Run, c: str, i: int) -> bool:
    """True iff c ticks at step i"""
    return run.ticks_at(c, i)
