"""
Spec Printer
Pretty-prints syntax trees back into .prccsl text
"""

from fractions import Fraction
from typing import List

from backend.clocks.expressions import ClockExpr, DelayFor, Inf, Named, PeriodicOn, Sup
from backend.relations.ensemble import ProbRelation
from backend.speclang.syntax import (
    Always,
    And,
    At,
    BinOp,
    Category,
    Compare,
    Const,
    Constraint,
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
    Query,
    Simulate,
    SpecFile,
    TickOf,
    Var,
)


def format_fraction(p: Fraction) -> str:
    """Exact decimal text when one exists, else num/den"""
    if p.denominator == 1:
        return str(p.numerator)
    for digits in range(1, 31):
        scaled = p * 10 ** digits
        if scaled.denominator == 1:
            whole, frac = divmod(scaled.numerator, 10 ** digits)
            return f"{whole}.{frac:0{digits}d}"
    return f"{p.numerator}/{p.denominator}"


def format_number(x: float) -> str:
    text = repr(float(x))
    if "e" in text or "E" in text:
        text = f"{x:.20f}".rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def format_expr(e: ClockExpr) -> str:
    if isinstance(e, Named):
        return e.name
    if isinstance(e, PeriodicOn):
        return f"{{periodicOn {format_expr(e.base)} period {e.period}}}"
    if isinstance(e, DelayFor):
        return f"{{{format_expr(e.base)} delayFor {e.delay} on {format_expr(e.reference)}}}"
    if isinstance(e, Inf):
        return f"inf({format_expr(e.left)}, {format_expr(e.right)})"
    if isinstance(e, Sup):
        return f"sup({format_expr(e.left)}, {format_expr(e.right)})"
    raise TypeError(f"not a clock expression: {e!r}")


def format_relation(rel: ProbRelation) -> str:
    return f"{format_expr(rel.left)} {rel.kind.value} {format_expr(rel.right)} prob {format_fraction(rel.p)}"


def format_relation_symbolic(rel: ProbRelation) -> str:
    """Relation in CCSL notation, e.g. cmrTrig ≡p {periodicOn ms period 50}"""
    return f"{format_expr(rel.left)} {rel.kind.symbol}p {format_expr(rel.right)}"


def format_template(t: ConstraintTemplate) -> str:
    events = t.events
    if t.category is Category.PERIODIC:
        text = f"periodic {events[0]} period {t.period}"
        if t.multiple_of:
            text += f" multiple of {t.multiple_of}"
    elif t.category in (Category.EXECUTION, Category.END_TO_END):
        window = f"{t.upper}" if t.lower is None else f"[{t.lower}, {t.upper}]"
        text = f"{t.category.value} from {events[0]} to {events[1]} within {window}"
    elif t.category is Category.SPORADIC:
        text = f"sporadic from {events[0]} to {events[1]} gap {t.lower}"
    elif t.category is Category.SYNCHRONIZATION:
        text = f"sync {', '.join(events)} tolerance {t.upper}"
    elif t.category is Category.COMPARISON:
        terms = " + ".join(str(term) for term in t.wcet)
        text = f"comparison from {events[0]} bound {t.lower} wcet {terms}"
    else:
        return f"exclusion {events[0]}, {events[1]} prob {format_fraction(t.p)}"
    if t.reference != "ms":
        text += f" on {t.reference}"
    return f"{text} prob {format_fraction(t.p)}"


def format_constraint(c: Constraint) -> str:
    body = format_template(c.body) if isinstance(c.body, ConstraintTemplate) else format_relation(c.body)
    return f"{c.name}: {body}" if c.name else body


def format_term(t) -> str:
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, HistoryOf):
        return f"h({format_expr(t.expr)})"
    if isinstance(t, TickOf):
        return f"tick({format_expr(t.expr)})"
    if isinstance(t, ElapsedOf):
        return f"elapsed({format_expr(t.expr)})"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, At):
        return f"at({t.automaton}, {t.location})"
    if isinstance(t, BinOp):
        return f"{format_term(t.left)} {t.op} {format_term(t.right)}"
    raise TypeError(f"not a term: {t!r}")


def format_predicate(p, level: int = 0) -> str:
    """
    Print a predicate, parenthesizing where the grammar's precedence requires

    Levels: 0 = or, 1 = and, 2 = not/atom.
    """
    if isinstance(p, Or):
        text = f"{format_predicate(p.left, 0)} or {format_predicate(p.right, 1)}"
        return f"({text})" if level > 0 else text
    if isinstance(p, And):
        text = f"{format_predicate(p.left, 1)} and {format_predicate(p.right, 2)}"
        return f"({text})" if level > 1 else text
    if isinstance(p, Not):
        return f"not {format_predicate(p.operand, 2)}"
    if isinstance(p, Compare):
        return f"{format_term(p.left)} {p.op} {format_term(p.right)}"
    return format_term(p)


def format_property(prop) -> str:
    if isinstance(prop, Always):
        return f"[] {format_predicate(prop.predicate)}"
    if isinstance(prop, Eventually):
        return f"<> {format_predicate(prop.predicate)}"
    return prop


def _options(pairs) -> str:
    return "".join(f" {key} {value}" for key, value in pairs if value is not None)


def format_query_body(body) -> str:
    if isinstance(body, HypothesisTest):
        options = [
            ("threshold", body.threshold), ("alpha", body.alpha), ("beta", body.beta), ("delta", body.delta),
        ]
        text = f"hypothesis {format_property(body.prop)} bound {body.bound}"
        text += _options((key, format_number(v) if v is not None else None) for key, v in options)
        return text + _options([("runs", body.runs)])
    if isinstance(body, ProbEstimate):
        options = [("confidence", body.confidence), ("epsilon", body.epsilon)]
        text = f"estimate {format_property(body.prop)} bound {body.bound}"
        text += _options((key, format_number(v) if v is not None else None) for key, v in options)
        return text + _options([("method", body.method)])
    if isinstance(body, ProbCompare):
        return (
            f"compare {format_property(body.prop1)} bound {body.bound1} "
            f"with {format_property(body.prop2)} bound {body.bound2} ratio {format_number(body.ratio)}"
        )
    if isinstance(body, ExpectedValue):
        return f"expect {body.kind} {format_term(body.term)} bound {body.bound}" + _options([("runs", body.runs)])
    if isinstance(body, Simulate):
        terms = ", ".join(format_term(t) for t in body.terms)
        return f"simulate runs {body.runs} bound {body.bound} {{ {terms} }}"
    if isinstance(body, Ensemble):
        return f"ensemble {body.prop} bound {body.bound}" + _options([("runs", body.runs)])
    raise TypeError(f"not a query: {body!r}")


def format_query(q: Query) -> str:
    return f"query {q.name}: {format_query_body(q.body)}"


def format_spec(spec: SpecFile) -> str:
    """
    Pretty-print a spec; parsing the result gives back an equal SpecFile

    Args:
        spec: Spec to print

    Returns:
        Spec text, one statement per line
    """
    lines: List[str] = []
    if spec.clocks:
        lines.append("clock " + ", ".join(spec.clocks))
    lines.extend(f"wcet {name} = {value}" for name, value in spec.wcet)
    lines.extend(f"let {d.name} = {format_expr(d.expr)}" for d in spec.definitions)
    lines.extend(format_constraint(c) for c in spec.constraints)
    lines.extend(format_query(q) for q in spec.queries)
    return "\n".join(lines) + ("\n" if lines else "")
