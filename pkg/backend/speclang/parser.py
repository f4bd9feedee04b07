"""
Spec Parser
Parses .prccsl text into a SpecFile using the lark grammar
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from backend.clocks.expressions import DelayFor, Named, PeriodicOn, inf_of, sup_of
from backend.errors import BadParameter, PrccslError, SpecSyntaxError
from backend.relations.checkers import RelationKind
from backend.relations.ensemble import DEFAULT_THRESHOLD, ProbRelation
from backend.speclang.grammar import SPEC_GRAMMAR
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
    Definition,
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

logger = logging.getLogger(__name__)


def _int(token: Token) -> int:
    text = str(token)
    if not text.isdigit():
        raise BadParameter(f"line {token.line}: expected an integer, got {text}")
    return int(text)


def _float(token: Token) -> float:
    return float(str(token))


def _split_options(items) -> Dict[str, Any]:
    """Separate [on_ref] [prob] placeholders from the positional children"""
    options: Dict[str, Any] = {"reference": "ms", "p": DEFAULT_THRESHOLD}
    for item in items:
        if isinstance(item, tuple) and item and item[0] in ("on", "prob", "multiple"):
            options[{"on": "reference", "prob": "p", "multiple": "multiple_of"}[item[0]]] = item[1]
    return options


def _tokens(items) -> List[Token]:
    return [item for item in items if isinstance(item, Token)]


class SpecTransformer(Transformer):
    """Turns the lark parse tree into syntax dataclasses"""

    # Statements

    def start(self, items):
        clocks: List[str] = []
        definitions, wcet, constraints, queries = [], [], [], []
        for item in items:
            if isinstance(item, tuple) and item[0] == "clocks":
                clocks.extend(item[1])
            elif isinstance(item, tuple) and item[0] == "wcet":
                wcet.append((item[1], item[2]))
            elif isinstance(item, Definition):
                definitions.append(item)
            elif isinstance(item, Constraint):
                constraints.append(item)
            elif isinstance(item, Query):
                queries.append(item)
        return SpecFile(
            clocks=tuple(clocks),
            definitions=tuple(definitions),
            wcet=tuple(wcet),
            constraints=tuple(constraints),
            queries=tuple(queries),
        )

    def clock_decl(self, items):
        return ("clocks", tuple(str(t) for t in items))

    def definition(self, items):
        name, expr = items
        return Definition(str(name), expr)

    def wcet_decl(self, items):
        name, value = items
        return ("wcet", str(name), _int(value))

    def label(self, items):
        return str(items[0])

    def constraint(self, items):
        label, body = items
        return Constraint(label, body)

    # Relations and templates

    def relation(self, items):
        left, kind, right, prob = items
        return ProbRelation(kind, left, right, prob[1] if prob else DEFAULT_THRESHOLD)

    def subclock(self, _):
        return RelationKind.SUBCLOCK

    def coincides(self, _):
        return RelationKind.COINCIDENCE

    def excludes(self, _):
        return RelationKind.EXCLUSION

    def causes(self, _):
        return RelationKind.CAUSALITY

    def precedes(self, _):
        return RelationKind.PRECEDENCE

    def multiple(self, items):
        return ("multiple", str(items[0]))

    def on_ref(self, items):
        return ("on", str(items[0]))

    def prob(self, items):
        return ("prob", Fraction(str(items[0])))

    def interval(self, items):
        return ("interval", _int(items[0]), _int(items[1]))

    def upper_only(self, items):
        return ("interval", None, _int(items[0]))

    def wcet_sum(self, items):
        return ("wcet", tuple(_int(t) if t.type == "NUMBER" else str(t) for t in items))

    def periodic(self, items):
        name, period = _tokens(items[:2])
        return ConstraintTemplate(Category.PERIODIC, (str(name),), period=_int(period), **_split_options(items[2:]))

    def _windowed(self, category, items):
        src, tgt = _tokens(items[:2])
        _, lower, upper = items[2]
        return ConstraintTemplate(category, (str(src), str(tgt)), lower=lower, upper=upper, **_split_options(items[3:]))

    def execution(self, items):
        return self._windowed(Category.EXECUTION, items)

    def e2e(self, items):
        return self._windowed(Category.END_TO_END, items)

    def sporadic(self, items):
        src, tgt, gap = _tokens(items[:3])
        return ConstraintTemplate(Category.SPORADIC, (str(src), str(tgt)), lower=_int(gap), **_split_options(items[3:]))

    def sync(self, items):
        tokens = _tokens(items)
        events, tolerance = tokens[:-1], tokens[-1]
        return ConstraintTemplate(
            Category.SYNCHRONIZATION, tuple(str(e) for e in events), upper=_int(tolerance), **_split_options(items)
        )

    def comparison(self, items):
        src, bound = _tokens(items[:2])
        return ConstraintTemplate(
            Category.COMPARISON, (str(src),), lower=_int(bound), wcet=items[2][1], **_split_options(items[3:])
        )

    def exclusion(self, items):
        a, b = _tokens(items[:2])
        return ConstraintTemplate(Category.EXCLUSION, (str(a), str(b)), **_split_options(items[2:]))

    # Clock expressions

    def named(self, items):
        return Named(str(items[0]))

    def periodic_on(self, items):
        base, period = items
        return PeriodicOn(base, _int(period))

    def delay_for(self, items):
        base, delay, reference = items
        return DelayFor(base, reference, _int(delay))

    def inf(self, items):
        return inf_of(items)

    def sup(self, items):
        return sup_of(items)

    # Queries

    def query(self, items):
        name, body = items
        return Query(str(name), body)

    def prop_ref(self, items):
        return str(items[0])

    def always(self, items):
        return Always(items[0])

    def eventually(self, items):
        return Eventually(items[0])

    def hypothesis(self, items):
        prop, bound, *options = items
        return HypothesisTest(prop, _int(bound), **self._options(options))

    def estimate(self, items):
        prop, bound, *options = items
        return ProbEstimate(prop, _int(bound), **self._options(options))

    def compare(self, items):
        prop1, bound1, prop2, bound2, ratio = items
        return ProbCompare(prop1, _int(bound1), prop2, _int(bound2), _float(ratio))

    def expect(self, items):
        kind, term, bound, runs = items
        return ExpectedValue(kind, term, _int(bound), runs)

    def simulate(self, items):
        runs, bound, *terms = items
        return Simulate(_int(runs), _int(bound), tuple(terms))

    def ensemble(self, items):
        name, bound, runs = items
        return Ensemble(str(name), _int(bound), runs)

    def runs(self, items):
        return _int(items[0])

    def _options(self, options) -> Dict[str, Any]:
        result: Dict[str, Any] = {}
        for key, value in options:
            if key in result:
                raise BadParameter(f"option '{key}' given twice")
            result[key] = value
        return result

    def opt_threshold(self, items):
        return ("threshold", _float(items[0]))

    def opt_alpha(self, items):
        return ("alpha", _float(items[0]))

    def opt_beta(self, items):
        return ("beta", _float(items[0]))

    def opt_delta(self, items):
        return ("delta", _float(items[0]))

    def opt_runs(self, items):
        return ("runs", _int(items[0]))

    def opt_confidence(self, items):
        return ("confidence", _float(items[0]))

    def opt_epsilon(self, items):
        return ("epsilon", _float(items[0]))

    def opt_method(self, items):
        return ("method", str(items[0]))

    def ext_max(self, _):
        return "max"

    def ext_min(self, _):
        return "min"

    # State predicates

    def or_(self, items):
        return Or(*items)

    def and_(self, items):
        return And(*items)

    def not_(self, items):
        return Not(items[0])

    def compare_terms(self, items):
        left, op, right = items
        return Compare(op, left, right)

    def ge(self, _):
        return ">="

    def le(self, _):
        return "<="

    def gt(self, _):
        return ">"

    def lt(self, _):
        return "<"

    def eq(self, _):
        return "=="

    def ne(self, _):
        return "!="

    def add(self, items):
        return BinOp("+", *items)

    def sub(self, items):
        return BinOp("-", *items)

    def const(self, items):
        return Const(_int(items[0]))

    def hist(self, items):
        return HistoryOf(items[0])

    def tick(self, items):
        return TickOf(items[0])

    def elapsed(self, items):
        return ElapsedOf(items[0])

    def at(self, items):
        return At(str(items[0]), str(items[1]))

    def var(self, items):
        return Var(str(items[0]))


class SpecParser:
    """LALR parser for spec files"""

    def __init__(self):
        """Initialize parser"""
        self.parser = Lark(SPEC_GRAMMAR, parser="lalr", maybe_placeholders=True, propagate_positions=False)

    def parse(self, text: str) -> SpecFile:
        """
        Parse spec text

        Args:
            text: UTF-8 spec text

        Returns:
            SpecFile
        """
        try:
            tree = self.parser.parse(text)
        except UnexpectedInput as e:
            line, column = e.line, e.column
            if line is None or line < 1:
                lines = text.split("\n")
                line, column = len(lines), len(lines[-1]) + 1
            raise SpecSyntaxError(_describe(e), line=line, column=column) from None
        try:
            return SpecTransformer().transform(tree)
        except VisitError as e:
            if isinstance(e.orig_exc, PrccslError):
                raise e.orig_exc from None
            raise


def _describe(e: UnexpectedInput) -> str:
    token = getattr(e, "token", None)
    if token is not None and token.type == "$END":
        return "unexpected end of input"
    if token is not None:
        return f"unexpected token {str(token)!r}"
    char = getattr(e, "char", None)
    return f"unexpected character {char!r}" if char else "syntax error"


@lru_cache()
def get_parser() -> SpecParser:
    return SpecParser()


def parse_spec(text: str) -> SpecFile:
    """
    Parse spec text into a SpecFile

    Args:
        text: Spec text

    Returns:
        SpecFile (empty for an empty text)
    """
    spec = get_parser().parse(text)
    logger.debug(
        "Parsed spec: %d clocks, %d definitions, %d constraints, %d queries",
        len(spec.clocks), len(spec.definitions), len(spec.constraints), len(spec.queries),
    )
    return spec


def parse_spec_file(path) -> SpecFile:
    """Read and parse a spec file"""
    with open(path, "r", encoding="utf-8") as f:
        return parse_spec(f.read())
