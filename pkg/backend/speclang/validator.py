"""
Spec Validation
Rule-based checks of a parsed spec before it is expanded or model-checked
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Set

from backend.clocks.expressions import ClockExpr, referenced_clocks
from backend.errors import BadParameter
from backend.relations.ensemble import ProbRelation
from backend.speclang.syntax import (
    Always,
    And,
    BinOp,
    Compare,
    ConstraintTemplate,
    ElapsedOf,
    Ensemble,
    Eventually,
    ExpectedValue,
    HistoryOf,
    HypothesisTest,
    Not,
    Or,
    ProbCompare,
    ProbEstimate,
    Simulate,
    SpecFile,
    TickOf,
)
from backend.speclang.templates import check_template, wcet_total

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    """One finding of the spec validator"""
    code: str
    severity: str
    message: str
    subject: Optional[str] = None


def _predicate_exprs(node) -> Iterator[ClockExpr]:
    """Clock expressions used inside a state predicate or numeric term"""
    if isinstance(node, (HistoryOf, TickOf, ElapsedOf)):
        yield node.expr
    elif isinstance(node, (Compare, BinOp, And, Or)):
        yield from _predicate_exprs(node.left)
        yield from _predicate_exprs(node.right)
    elif isinstance(node, Not):
        yield from _predicate_exprs(node.operand)
    elif isinstance(node, (Always, Eventually)):
        yield from _predicate_exprs(node.predicate)


class SpecRules:
    """Rule table for spec files"""

    # Rule code -> severity
    RULES = {
        "CyclicDefinition": "critical",
        "UndeclaredClock": "critical",
        "BadParameter": "critical",
        "UnknownConstraint": "major",
        "DuplicateName": "major",
    }

    def __init__(self, wcet: Optional[Mapping[str, int]] = None):
        """
        Initialize spec rules

        Args:
            wcet: External WCET table; when None, WCET names the spec does not declare are not resolved
        """
        self.wcet = wcet

    def _diagnostic(self, code: str, message: str, subject: Optional[str] = None) -> Diagnostic:
        return Diagnostic(code=code, severity=self.RULES[code], message=message, subject=subject)

    def check_duplicates(self, spec: SpecFile) -> List[Diagnostic]:
        """
        Check that clocks, definitions, WCET entries, constraints and queries have distinct names

        Args:
            spec: Parsed spec

        Returns:
            List of DuplicateName diagnostics
        """
        diagnostics = []
        groups = {
            "clock or definition": list(spec.clocks) + [d.name for d in spec.definitions],
            "WCET entry": [name for name, _ in spec.wcet],
            "constraint": [c.name for c in spec.constraints if c.name],
            "query": [q.name for q in spec.queries],
        }
        for kind, names in groups.items():
            seen: Set[str] = set()
            for name in names:
                if name in seen:
                    diagnostics.append(self._diagnostic("DuplicateName", f"{kind} '{name}' declared twice", name))
                seen.add(name)
        return diagnostics

    def check_cycles(self, spec: SpecFile) -> List[Diagnostic]:
        """
        Check that no derived clock depends on itself

        Forward references between definitions are fine.
        """
        definitions = spec.definition_map()
        graph = {name: [r for r in referenced_clocks(e) if r in definitions] for name, e in definitions.items()}
        diagnostics = []
        state: Dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(name: str, path: List[str]) -> None:
            state[name] = 1
            for dep in graph[name]:
                if state.get(dep) == 1:
                    cycle = path[path.index(dep):] + [dep]
                    diagnostics.append(self._diagnostic(
                        "CyclicDefinition", "cyclic definition: " + " -> ".join(cycle), dep
                    ))
                elif dep not in state:
                    visit(dep, path + [dep])
            state[name] = 2

        for name in graph:
            if name not in state:
                visit(name, [name])
        return diagnostics

    def _used_clocks(self, spec: SpecFile) -> Iterator[tuple]:
        """(clock name, where) for every clock the spec refers to"""
        for d in spec.definitions:
            for name in referenced_clocks(d.expr):
                yield name, f"definition {d.name}"
        for i, c in enumerate(spec.constraints):
            where = f"constraint {c.name or i + 1}"
            body = c.body
            if isinstance(body, ProbRelation):
                for name in referenced_clocks(body.left) + referenced_clocks(body.right):
                    yield name, where
                continue
            for name in body.events:
                yield name, where
            yield body.reference, where
            if body.multiple_of:
                yield body.multiple_of, where
        for q in spec.queries:
            for e in _predicate_exprs(q.body.prop if hasattr(q.body, "prop") else None):
                for name in referenced_clocks(e):
                    yield name, f"query {q.name}"
            for node in _query_terms(q.body):
                for e in _predicate_exprs(node):
                    for name in referenced_clocks(e):
                        yield name, f"query {q.name}"

    def check_declared(self, spec: SpecFile) -> List[Diagnostic]:
        """Check that every referenced clock is declared or defined"""
        known = set(spec.clocks) | set(spec.definition_map())
        diagnostics = []
        reported: Set[tuple] = set()
        for name, where in self._used_clocks(spec):
            if name not in known and (name, where) not in reported:
                reported.add((name, where))
                diagnostics.append(self._diagnostic("UndeclaredClock", f"{where}: clock '{name}' is not declared", name))
        return diagnostics

    def check_parameters(self, spec: SpecFile) -> List[Diagnostic]:
        """Check template and query parameters"""
        diagnostics = []
        wcet = dict(self.wcet or {})
        wcet.update(spec.wcet_map())
        resolve = self.wcet is not None or bool(spec.wcet)
        for i, c in enumerate(spec.constraints):
            if not isinstance(c.body, ConstraintTemplate):
                continue
            try:
                check_template(c.body)
                if c.body.wcet and resolve:
                    wcet_total(c.body, wcet)
            except BadParameter as e:
                diagnostics.append(self._diagnostic("BadParameter", str(e), c.name or str(i + 1)))
        for q in spec.queries:
            for message in _query_problems(q.body):
                diagnostics.append(self._diagnostic("BadParameter", f"query {q.name}: {message}", q.name))
        return diagnostics

    def check_references(self, spec: SpecFile) -> List[Diagnostic]:
        """Check that queries only name constraints that exist"""
        names = {c.name for c in spec.constraints if c.name}
        diagnostics = []
        for q in spec.queries:
            for prop in _query_props(q.body):
                if isinstance(prop, str) and prop not in names:
                    diagnostics.append(self._diagnostic(
                        "UnknownConstraint", f"query {q.name} refers to unknown constraint '{prop}'", prop
                    ))
        return diagnostics

    def validate(self, spec: SpecFile) -> List[Diagnostic]:
        """
        Run all rules

        Args:
            spec: Parsed spec

        Returns:
            All diagnostics found
        """
        diagnostics: List[Diagnostic] = []
        diagnostics.extend(self.check_duplicates(spec))
        diagnostics.extend(self.check_cycles(spec))
        diagnostics.extend(self.check_declared(spec))
        diagnostics.extend(self.check_parameters(spec))
        diagnostics.extend(self.check_references(spec))
        return diagnostics


def _query_props(body) -> list:
    if isinstance(body, ProbCompare):
        return [body.prop1, body.prop2]
    if isinstance(body, (HypothesisTest, ProbEstimate, Ensemble)):
        return [body.prop]
    return []


def _query_terms(body) -> list:
    """Numeric terms and temporal properties of a query"""
    if isinstance(body, ExpectedValue):
        return [body.term]
    if isinstance(body, Simulate):
        return list(body.terms)
    if isinstance(body, ProbCompare):
        return [body.prop1, body.prop2]
    return []


def _query_problems(body) -> List[str]:
    problems = []
    bounds = [body.bound1, body.bound2] if isinstance(body, ProbCompare) else [body.bound]
    if any(b < 1 for b in bounds):
        problems.append("bound must be >= 1")
    if getattr(body, "runs", None) is not None and body.runs < 1:
        problems.append("runs must be >= 1")
    for key in ("threshold", "alpha", "beta", "confidence"):
        value = getattr(body, key, None)
        if value is not None and not 0 < value < 1:
            problems.append(f"{key} must lie in (0, 1), got {value}")
    for key in ("delta", "epsilon", "ratio"):
        value = getattr(body, key, None)
        if value is not None and value <= 0:
            problems.append(f"{key} must be positive, got {value}")
    if isinstance(body, HypothesisTest) and body.threshold is not None and body.delta is not None:
        if not (0 < body.threshold - body.delta and body.threshold + body.delta < 1):
            problems.append("threshold ± delta must stay inside (0, 1)")
    return problems


def validate_spec(spec: SpecFile, wcet: Optional[Mapping[str, int]] = None) -> List[Diagnostic]:
    """
    Validate a parsed spec

    Args:
        spec: Parsed SpecFile
        wcet: WCET table used to resolve comparison terms

    Returns:
        Diagnostics; empty when the spec is acyclic, fully declared and parameter-sane
    """
    diagnostics = SpecRules(wcet).validate(spec)
    if diagnostics:
        logger.info("Spec validation found %d problem(s)", len(diagnostics))
    return diagnostics
