"""
Clock Expressions
Abstract syntax of derived clocks: named, periodicOn, delayFor, infimum, supremum
"""

from dataclasses import dataclass
from functools import reduce
from typing import List, Sequence, Union

from backend.errors import BadParameter


@dataclass(frozen=True)
class Named:
    """A declared clock or a derived-clock definition, by name"""
    name: str

    def __post_init__(self):
        if not self.name:
            raise BadParameter("clock name must be non-empty")


@dataclass(frozen=True)
class PeriodicOn:
    """Ticks at every q-th tick of the base clock"""
    base: "ClockExpr"
    period: int

    def __post_init__(self):
        if self.period < 1:
            raise BadParameter(f"periodicOn period must be >= 1, got {self.period}")


@dataclass(frozen=True)
class DelayFor:
    """Each base tick fires again at the d-th later tick of the reference clock"""
    base: "ClockExpr"
    reference: "ClockExpr"
    delay: int

    def __post_init__(self):
        if self.delay < 0:
            raise BadParameter(f"delayFor delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class Inf:
    """Slowest clock faster than both operands"""
    left: "ClockExpr"
    right: "ClockExpr"


@dataclass(frozen=True)
class Sup:
    """Fastest clock slower than both operands"""
    left: "ClockExpr"
    right: "ClockExpr"


ClockExpr = Union[Named, PeriodicOn, DelayFor, Inf, Sup]


def inf_of(operands: Sequence[ClockExpr]) -> ClockExpr:
    """Left-nested infimum over two or more operands"""
    if len(operands) < 2:
        raise BadParameter("inf needs at least two operands")
    return reduce(Inf, operands)


def sup_of(operands: Sequence[ClockExpr]) -> ClockExpr:
    """Left-nested supremum over two or more operands"""
    if len(operands) < 2:
        raise BadParameter("sup needs at least two operands")
    return reduce(Sup, operands)


def referenced_clocks(e: ClockExpr) -> List[str]:
    """
    Names referenced by an expression, in first-seen order

    Args:
        e: Clock expression

    Returns:
        Distinct names
    """
    seen: List[str] = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Named):
            if node.name not in seen:
                seen.append(node.name)
        elif isinstance(node, PeriodicOn):
            stack.append(node.base)
        elif isinstance(node, DelayFor):
            stack.extend([node.reference, node.base])
        else:
            stack.extend([node.right, node.left])
    return seen
