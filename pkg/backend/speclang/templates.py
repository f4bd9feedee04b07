"""
Constraint Templates
Expands timing-constraint templates into PrCCSL relations
"""

from typing import Dict, List, Mapping, Optional, Tuple

from backend.clocks.expressions import DelayFor, Named, PeriodicOn, inf_of, sup_of
from backend.errors import BadParameter
from backend.relations.checkers import RelationKind
from backend.relations.ensemble import ProbRelation
from backend.speclang.syntax import Category, Constraint, ConstraintTemplate, SpecFile

# Number of events each category takes; None means two or more
EVENT_COUNTS = {
    Category.PERIODIC: 1,
    Category.EXECUTION: 2,
    Category.END_TO_END: 2,
    Category.SPORADIC: 2,
    Category.SYNCHRONIZATION: None,
    Category.COMPARISON: 1,
    Category.EXCLUSION: 2,
}


def check_template(t: ConstraintTemplate) -> None:
    """
    Raise BadParameter when a template's parameters are unusable

    Args:
        t: Template to check
    """
    expected = EVENT_COUNTS[t.category]
    if expected is None and len(t.events) < 2:
        raise BadParameter(f"{t.category.value} needs at least two events")
    if expected is not None and len(t.events) != expected:
        raise BadParameter(f"{t.category.value} takes {expected} event(s), got {len(t.events)}")

    for label, value in (("lower bound", t.lower), ("upper bound", t.upper)):
        if value is not None and value < 0:
            raise BadParameter(f"{t.category.value}: {label} must be non-negative, got {value}")
    if t.lower is not None and t.upper is not None and t.lower > t.upper:
        raise BadParameter(f"{t.category.value}: lower bound {t.lower} exceeds upper bound {t.upper}")
    if not 0 <= t.p <= 1:
        raise BadParameter(f"threshold p must lie in [0, 1], got {t.p}")

    if t.category is Category.PERIODIC and (t.period is None or t.period < 1):
        raise BadParameter("periodic: period must be >= 1")
    if t.category is Category.EXECUTION and (t.lower is None or t.upper is None):
        raise BadParameter("execution needs both bounds")
    if t.category in (Category.END_TO_END, Category.SYNCHRONIZATION) and t.upper is None:
        raise BadParameter(f"{t.category.value} needs an upper bound")
    if t.category in (Category.SPORADIC, Category.COMPARISON) and t.lower is None:
        raise BadParameter(f"{t.category.value} needs a bound")
    if t.category is Category.COMPARISON and not t.wcet:
        raise BadParameter("comparison needs at least one WCET term")


def wcet_total(t: ConstraintTemplate, wcet: Optional[Mapping[str, int]] = None) -> int:
    """Sum of a comparison template's WCET terms"""
    table = dict(wcet or {})
    total = 0
    for term in t.wcet:
        if isinstance(term, int):
            total += term
        elif term in table:
            total += table[term]
        else:
            raise BadParameter(f"unknown WCET '{term}'")
    return total


def expand_template(t: ConstraintTemplate, wcet: Optional[Mapping[str, int]] = None) -> List[ProbRelation]:
    """
    Expand a template into its PrCCSL relations

    Args:
        t: Template
        wcet: WCET table for comparison templates

    Returns:
        One or two relations, all carrying the template's threshold
    """
    check_template(t)
    ref = Named(t.reference)
    events = [Named(e) for e in t.events]

    def rel(kind, left, right):
        return ProbRelation(kind, left, right, t.p)

    if t.category is Category.PERIODIC:
        clock = events[0]
        if t.multiple_of:
            return [rel(RelationKind.SUBCLOCK, clock, Named(t.multiple_of))]
        return [rel(RelationKind.COINCIDENCE, clock, PeriodicOn(ref, t.period))]

    if t.category is Category.EXECUTION:
        src, tgt = events
        return [
            rel(RelationKind.CAUSALITY, DelayFor(src, ref, t.lower), tgt),
            rel(RelationKind.CAUSALITY, tgt, DelayFor(src, ref, t.upper)),
        ]

    if t.category is Category.END_TO_END:
        src, tgt = events
        relations = []
        if t.lower is not None:
            relations.append(rel(RelationKind.PRECEDENCE, DelayFor(src, ref, t.lower), tgt))
        relations.append(rel(RelationKind.PRECEDENCE, tgt, DelayFor(src, ref, t.upper)))
        return relations

    if t.category is Category.SPORADIC:
        trigger, target = events
        return [rel(RelationKind.PRECEDENCE, DelayFor(trigger, ref, t.lower), target)]

    if t.category is Category.SYNCHRONIZATION:
        return [rel(RelationKind.CAUSALITY, sup_of(events), DelayFor(inf_of(events), ref, t.upper))]

    if t.category is Category.COMPARISON:
        src = events[0]
        return [
            rel(RelationKind.CAUSALITY, DelayFor(src, ref, t.lower), DelayFor(src, ref, wcet_total(t, wcet)))
        ]

    a, b = events
    return [rel(RelationKind.EXCLUSION, a, b)]


def constraint_relations(constraint: Constraint, wcet: Optional[Mapping[str, int]] = None) -> List[ProbRelation]:
    """Relations of a constraint, expanding templates"""
    if isinstance(constraint.body, ConstraintTemplate):
        return expand_template(constraint.body, wcet)
    return [constraint.body]


def expand_spec(spec: SpecFile, wcet: Optional[Mapping[str, int]] = None) -> List[Tuple[Optional[str], List[ProbRelation]]]:
    """
    Expand every constraint of a spec

    Args:
        spec: Parsed spec
        wcet: Extra WCET entries; the spec's own wcet statements take precedence

    Returns:
        (constraint name, relations) pairs in spec order
    """
    table: Dict[str, int] = dict(wcet or {})
    table.update(spec.wcet_map())
    return [(c.name, constraint_relations(c, table)) for c in spec.constraints]
