"""
Run Monitors
Per-run outcomes for constraints, state predicates and numeric observables
"""

import logging
from typing import List, Mapping, Optional, Protocol

import numpy as np

from backend.clocks.evaluator import ExpressionEvaluator
from backend.clocks.expressions import ClockExpr
from backend.errors import BadParameter
from backend.relations.checkers import satisfies
from backend.relations.ensemble import ProbRelation
from backend.speclang.printer import format_predicate, format_term
from backend.speclang.syntax import (
    Always,
    And,
    At,
    BinOp,
    Compare,
    Const,
    ElapsedOf,
    Eventually,
    HistoryOf,
    Not,
    Or,
    Property,
    SpecFile,
    TickOf,
    Var,
)
from backend.speclang.templates import constraint_relations
from backend.trace.run import Run, history_from_ticks

logger = logging.getLogger(__name__)

_COMPARE = {
    ">=": np.greater_equal,
    "<=": np.less_equal,
    ">": np.greater,
    "<": np.less,
    "==": np.equal,
    "!=": np.not_equal,
}


def elapsed_steps(ticks: np.ndarray, n: int) -> np.ndarray:
    """
    Steps since the last tick strictly before each step

    Args:
        ticks: Sorted tick steps
        n: Last step index

    Returns:
        int64 array of length n + 1; steps before the first tick count from 0
    """
    steps = np.arange(n + 1, dtype=np.int64)
    if ticks.size == 0:
        return steps
    previous = np.searchsorted(ticks, steps, side="left") - 1
    last = np.where(previous >= 0, ticks[np.clip(previous, 0, None)], 0)
    return steps - last


class TermEvaluator:
    """Evaluates numeric terms and state predicates as per-step vectors over one run"""

    def __init__(self, run: Run, definitions: Optional[Mapping[str, ClockExpr]] = None):
        self.run = run
        self.clocks = ExpressionEvaluator(run, definitions)

    def values(self, term) -> np.ndarray:
        """
        Values of a term at steps 0..n

        Args:
            term: Numeric term

        Returns:
            int64 array of length n + 1
        """
        run = self.run
        if isinstance(term, Const):
            return np.full(run.num_steps, term.value, dtype=np.int64)
        if isinstance(term, HistoryOf):
            return history_from_ticks(self.clocks.ticks(term.expr), run.n)
        if isinstance(term, TickOf):
            flags = np.zeros(run.num_steps, dtype=np.int64)
            flags[self.clocks.ticks(term.expr)] = 1
            return flags
        if isinstance(term, ElapsedOf):
            return elapsed_steps(self.clocks.ticks(term.expr), run.n)
        if isinstance(term, Var):
            if term.name not in run.signals:
                raise BadParameter(f"run carries no variable '{term.name}'")
            return np.asarray(run.signals[term.name], dtype=np.int64)
        if isinstance(term, At):
            return self._at(term).astype(np.int64)
        if isinstance(term, BinOp):
            left, right = self.values(term.left), self.values(term.right)
            return left + right if term.op == "+" else left - right
        raise TypeError(f"not a numeric term: {term!r}")

    def holds(self, predicate) -> np.ndarray:
        """Boolean vector of a state predicate; a bare term holds where it is non-zero"""
        if isinstance(predicate, Compare):
            return _COMPARE[predicate.op](self.values(predicate.left), self.values(predicate.right))
        if isinstance(predicate, Not):
            return ~self.holds(predicate.operand)
        if isinstance(predicate, And):
            return self.holds(predicate.left) & self.holds(predicate.right)
        if isinstance(predicate, Or):
            return self.holds(predicate.left) | self.holds(predicate.right)
        return self.values(predicate) != 0

    def _at(self, term: At) -> np.ndarray:
        locations = self.run.meta.get("locations", {}).get(term.automaton)
        signal = self.run.signals.get(f"{term.automaton}.loc")
        if locations is None or signal is None:
            raise BadParameter(f"run carries no locations of automaton '{term.automaton}'")
        if term.location not in locations:
            raise BadParameter(f"automaton '{term.automaton}' has no location '{term.location}'")
        return np.asarray(signal) == locations.index(term.location)


class Monitor(Protocol):
    """Anything that decides a property on one run"""
    bound: int
    label: str

    def holds(self, run: Run) -> bool:
        ...


class ConstraintMonitor:
    """A constraint holds on a run when all of its relations do"""

    def __init__(
        self,
        relations: List[ProbRelation],
        bound: int,
        definitions: Optional[Mapping[str, ClockExpr]] = None,
        label: str = "",
    ):
        if not relations:
            raise BadParameter("a constraint monitor needs at least one relation")
        self.relations = relations
        self.bound = bound
        self.definitions = dict(definitions or {})
        self.label = label

    def holds(self, run: Run) -> bool:
        run = run.truncate(self.bound)
        evaluator = ExpressionEvaluator(run, self.definitions)
        return all(satisfies(run, rel, evaluator=evaluator) for rel in self.relations)


class AlwaysMonitor:
    """[] φ: the predicate holds at every step 0..bound"""

    def __init__(self, predicate, bound: int, definitions: Optional[Mapping[str, ClockExpr]] = None):
        self.predicate = predicate
        self.bound = bound
        self.definitions = dict(definitions or {})
        self.label = f"[] {format_predicate(predicate)}"

    def holds(self, run: Run) -> bool:
        run = run.truncate(self.bound)
        return bool(np.all(TermEvaluator(run, self.definitions).holds(self.predicate)))


class EventuallyMonitor:
    """<> φ: the predicate holds at some step 0..bound"""

    def __init__(self, predicate, bound: int, definitions: Optional[Mapping[str, ClockExpr]] = None):
        self.predicate = predicate
        self.bound = bound
        self.definitions = dict(definitions or {})
        self.label = f"<> {format_predicate(predicate)}"

    def holds(self, run: Run) -> bool:
        run = run.truncate(self.bound)
        return bool(np.any(TermEvaluator(run, self.definitions).holds(self.predicate)))


class Observable:
    """Per-run maximum or minimum of a numeric term over steps 0..bound"""

    def __init__(self, kind: str, term, bound: int, definitions: Optional[Mapping[str, ClockExpr]] = None):
        if kind not in ("max", "min"):
            raise BadParameter(f"observable kind must be max or min, got '{kind}'")
        self.kind = kind
        self.term = term
        self.bound = bound
        self.definitions = dict(definitions or {})
        self.label = f"{kind} {format_term(term)}"

    def value(self, run: Run) -> float:
        values = TermEvaluator(run.truncate(self.bound), self.definitions).values(self.term)
        return float(values.max() if self.kind == "max" else values.min())


def build_monitor(prop: Property, bound: int, spec: SpecFile, wcet: Optional[Mapping[str, int]] = None) -> Monitor:
    """
    Monitor for a query property

    Args:
        prop: Constraint name or temporal state formula
        bound: Query horizon
        spec: Spec providing constraints and definitions
        wcet: Extra WCET entries for comparison templates

    Returns:
        Monitor
    """
    definitions = spec.definition_map()
    if isinstance(prop, Always):
        return AlwaysMonitor(prop.predicate, bound, definitions)
    if isinstance(prop, Eventually):
        return EventuallyMonitor(prop.predicate, bound, definitions)

    constraint = spec.constraint(prop)
    if constraint is None:
        raise BadParameter(f"unknown constraint '{prop}'")
    table = dict(wcet or {})
    table.update(spec.wcet_map())
    return ConstraintMonitor(constraint_relations(constraint, table), bound, definitions, label=prop)
