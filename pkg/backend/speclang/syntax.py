"""
Specification Syntax
Abstract syntax of spec files: declarations, constraint templates, state predicates and queries
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

from backend.clocks.expressions import ClockExpr
from backend.relations.ensemble import DEFAULT_THRESHOLD, ProbRelation


class Category(str, Enum):
    """Timing-constraint categories with a fixed expansion pattern"""
    PERIODIC = "periodic"
    EXECUTION = "execution"
    SPORADIC = "sporadic"
    SYNCHRONIZATION = "sync"
    END_TO_END = "e2e"
    COMPARISON = "comparison"
    EXCLUSION = "exclusion"


WcetTerm = Union[str, int]


@dataclass(frozen=True)
class ConstraintTemplate:
    """
    A timing constraint before expansion into PrCCSL relations

    Field use per category:
      periodic      events=(c,), period, multiple_of
      execution     events=(src, tgt), lower, upper
      e2e           events=(src, tgt), lower (optional), upper
      sporadic      events=(trigger, target), lower (minimum gap)
      sync          events=(e1, ..., en), upper (tolerance)
      comparison    events=(src,), lower (required bound), wcet terms
      exclusion     events=(a, b)
    """
    category: Category
    events: Tuple[str, ...]
    lower: Optional[int] = None
    upper: Optional[int] = None
    period: Optional[int] = None
    multiple_of: Optional[str] = None
    wcet: Tuple[WcetTerm, ...] = ()
    reference: str = "ms"
    p: Fraction = DEFAULT_THRESHOLD


@dataclass(frozen=True)
class Constraint:
    """A named (or anonymous) template or raw relation"""
    name: Optional[str]
    body: Union[ConstraintTemplate, ProbRelation]


@dataclass(frozen=True)
class Definition:
    """name ≜ clock expression"""
    name: str
    expr: ClockExpr


# Numeric terms of state predicates, evaluated per step

@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class HistoryOf:
    expr: ClockExpr


@dataclass(frozen=True)
class TickOf:
    expr: ClockExpr


@dataclass(frozen=True)
class ElapsedOf:
    """Steps since the previous tick of a clock (or since step 0)"""
    expr: ClockExpr


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class At:
    """1 while an automaton is in a location, else 0"""
    automaton: str
    location: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Term"
    right: "Term"


Term = Union[Const, HistoryOf, TickOf, ElapsedOf, Var, At, BinOp]


@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    operand: "Predicate"


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


Predicate = Union[Compare, Not, And, Or, Term]


@dataclass(frozen=True)
class Always:
    """[] φ: the predicate holds at every step"""
    predicate: Predicate


@dataclass(frozen=True)
class Eventually:
    """<> φ: the predicate holds at some step"""
    predicate: Predicate


# A property is a constraint id or a temporal state formula
Property = Union[str, Always, Eventually]


@dataclass(frozen=True)
class HypothesisTest:
    prop: Property
    bound: int
    threshold: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    delta: Optional[float] = None
    runs: Optional[int] = None


@dataclass(frozen=True)
class ProbEstimate:
    prop: Property
    bound: int
    confidence: Optional[float] = None
    epsilon: Optional[float] = None
    method: Optional[str] = None


@dataclass(frozen=True)
class ProbCompare:
    prop1: Property
    bound1: int
    prop2: Property
    bound2: int
    ratio: float


@dataclass(frozen=True)
class ExpectedValue:
    kind: str
    term: Term
    bound: int
    runs: Optional[int] = None


@dataclass(frozen=True)
class Simulate:
    runs: int
    bound: int
    terms: Tuple[Term, ...]


@dataclass(frozen=True)
class Ensemble:
    """Ratio-of-runs verdict of a constraint over a fixed number of runs"""
    prop: str
    bound: int
    runs: Optional[int] = None


QueryBody = Union[HypothesisTest, ProbEstimate, ProbCompare, ExpectedValue, Simulate, Ensemble]


@dataclass(frozen=True)
class Query:
    name: str
    body: QueryBody


@dataclass(frozen=True)
class SpecFile:
    """Parsed specification"""
    clocks: Tuple[str, ...] = ()
    definitions: Tuple[Definition, ...] = ()
    wcet: Tuple[Tuple[str, int], ...] = ()
    constraints: Tuple[Constraint, ...] = ()
    queries: Tuple[Query, ...] = field(default=())

    def definition_map(self):
        return {d.name: d.expr for d in self.definitions}

    def wcet_map(self):
        return dict(self.wcet)

    def constraint(self, name: str) -> Optional[Constraint]:
        return next((c for c in self.constraints if c.name == name), None)

    def query(self, name: str) -> Optional[Query]:
        return next((q for q in self.queries if q.name == name), None)
