"""Boolean search language: expression trees, parsing, rendering, matching.

The search language drives inclusion of publications: an expression of
phrases combined with AND/OR (AND binds tighter), evaluated against the
text of a publication.  A ``SearchSpec`` bundles the expression with the
inclusion/exclusion criteria (year range, source set, result cap).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union


class ExpressionError(ValueError):
    """Base class for search-expression parse errors."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class EmptyExpressionError(ExpressionError):
    """The expression text, or a parenthesized group, contains no terms."""


class UnbalancedParenthesesError(ExpressionError):
    """An opening or closing parenthesis has no partner."""


class DanglingOperatorError(ExpressionError):
    """An AND/OR is missing an operand."""


_OPERATOR_WORDS = frozenset({"AND", "OR"})


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


@dataclass(frozen=True)
class Term:
    """A literal phrase; multi-word phrases are kept intact."""

    phrase: str

    def __post_init__(self):
        phrase = _normalize_ws(self.phrase)
        if not phrase:
            raise ValueError("term phrase must be non-empty")
        if "(" in phrase or ")" in phrase:
            raise ValueError("term phrase must not contain parentheses")
        # A bare AND/OR word inside a phrase would re-tokenize as an
        # operator and break the parse/render round trip.
        if any(w.upper() in _OPERATOR_WORDS for w in phrase.split()):
            raise ValueError("term phrase must not contain AND/OR words")
        object.__setattr__(self, "phrase", phrase)


@dataclass(frozen=True)
class And:
    left: "BooleanExpr"
    right: "BooleanExpr"


@dataclass(frozen=True)
class Or:
    left: "BooleanExpr"
    right: "BooleanExpr"


BooleanExpr = Union[Term, And, Or]


@dataclass(frozen=True)
class DocumentText:
    """The text a search expression is matched against."""

    title: str
    abstract: str = ""
    keywords: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.title.strip():
            raise ValueError("document title must be non-empty")
        object.__setattr__(self, "keywords", tuple(self.keywords))


# --- tokenizer / parser ---

_LPAREN = "("
_RPAREN = ")"


@dataclass(frozen=True)
class _Token:
    kind: str  # "word" | "and" | "or" | "lparen" | "rparen"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in (_LPAREN, _RPAREN):
            tokens.append(_Token("lparen" if ch == _LPAREN else "rparen", ch, i))
            i += 1
            continue
        start = i
        while i < n and not text[i].isspace() and text[i] not in (_LPAREN, _RPAREN):
            i += 1
        word = text[start:i]
        upper = word.upper()
        if upper in _OPERATOR_WORDS:
            tokens.append(_Token("and" if upper == "AND" else "or", word, start))
        else:
            tokens.append(_Token("word", word, start))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], length: int):
        self.tokens = tokens
        self.i = 0
        self.length = length

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse_or(self) -> BooleanExpr:
        expr = self.parse_and()
        while (tok := self.peek()) is not None and tok.kind == "or":
            self.next()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self) -> BooleanExpr:
        expr = self.parse_atom()
        while (tok := self.peek()) is not None and tok.kind == "and":
            self.next()
            expr = And(expr, self.parse_atom())
        return expr

    def parse_atom(self) -> BooleanExpr:
        tok = self.peek()
        if tok is None:
            raise DanglingOperatorError(
                "expected a term at end of expression", self.length
            )
        if tok.kind in ("and", "or"):
            raise DanglingOperatorError(
                f"operator {tok.text!r} is missing a left operand", tok.pos
            )
        if tok.kind == "rparen":
            raise DanglingOperatorError(
                "expected a term before ')'", tok.pos
            )
        if tok.kind == "lparen":
            open_tok = self.next()
            inner = self.peek()
            if inner is not None and inner.kind == "rparen":
                raise EmptyExpressionError("empty parentheses", inner.pos)
            expr = self.parse_or()
            closing = self.peek()
            if closing is None or closing.kind != "rparen":
                raise UnbalancedParenthesesError(
                    "unmatched '('", open_tok.pos
                )
            self.next()
            return expr
        # Maximal run of plain words forms one phrase.
        words = [self.next().text]
        while (nxt := self.peek()) is not None and nxt.kind == "word":
            words.append(self.next().text)
        return Term(" ".join(words))


def parse_search_expr(text: str) -> BooleanExpr:
    """Parse search text into a ``BooleanExpr``.

    Grammar: ``expr := and (OR and)*; and := atom (AND atom)*;
    atom := phrase | '(' expr ')'``.  Operators are case-insensitive
    keywords; phrases are maximal runs of non-operator tokens.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise EmptyExpressionError("expression is empty")
    parser = _Parser(tokens, len(text))
    expr = parser.parse_or()
    leftover = parser.peek()
    if leftover is not None:
        if leftover.kind == "rparen":
            raise UnbalancedParenthesesError("unmatched ')'", leftover.pos)
        raise DanglingOperatorError(
            f"unexpected {leftover.text!r}", leftover.pos
        )
    return expr


def render_search_expr(expr: BooleanExpr) -> str:
    """Render an expression to canonical text.

    Every Or under an And is parenthesized, as is any right-nested chain
    of the same operator, so that ``parse(render(e))`` reproduces ``e``
    exactly (the parser folds operator runs to the left).
    """
    if isinstance(expr, Term):
        return expr.phrase
    if isinstance(expr, And):
        left = _render_child(expr.left, And, right_side=False)
        right = _render_child(expr.right, And, right_side=True)
        return f"{left} AND {right}"
    if isinstance(expr, Or):
        left = _render_child(expr.left, Or, right_side=False)
        right = _render_child(expr.right, Or, right_side=True)
        return f"{left} OR {right}"
    raise TypeError(f"not a BooleanExpr: {expr!r}")


def _render_child(child: BooleanExpr, parent_type: type, right_side: bool) -> str:
    text = render_search_expr(child)
    if isinstance(child, Term):
        return text
    if parent_type is And and isinstance(child, Or):
        return f"({text})"
    if isinstance(child, parent_type) and right_side:
        return f"({text})"
    return text


def matches(expr: BooleanExpr, doc: DocumentText) -> bool:
    """Evaluate an expression against a document.

    A term matches iff its phrase occurs as a case-insensitive substring
    of the whitespace-normalized ``title + " " + abstract + " " +
    joined keywords``; And/Or are logical conjunction/disjunction.
    """
    haystack = _normalize_ws(
        " ".join([doc.title, doc.abstract, " ".join(doc.keywords)])
    ).lower()
    return _eval(expr, haystack)


def _eval(expr: BooleanExpr, haystack: str) -> bool:
    if isinstance(expr, Term):
        return _normalize_ws(expr.phrase).lower() in haystack
    if isinstance(expr, And):
        return _eval(expr.left, haystack) and _eval(expr.right, haystack)
    if isinstance(expr, Or):
        return _eval(expr.left, haystack) or _eval(expr.right, haystack)
    raise TypeError(f"not a BooleanExpr: {expr!r}")


def expr_terms(expr: BooleanExpr) -> list[str]:
    """All term phrases in the expression, left to right."""
    if isinstance(expr, Term):
        return [expr.phrase]
    return expr_terms(expr.left) + expr_terms(expr.right)


# --- search specification ---

DEFAULT_MAX_PER_SOURCE = 1000


@dataclass(frozen=True)
class SearchSpec:
    """A search expression plus the inclusion/exclusion criteria.

    Deliberately permissive at construction: violations are reported as
    data by :func:`validate_spec`, not raised.
    """

    expr: BooleanExpr
    year_from: int
    year_to: int
    sources: frozenset[str] = field(default_factory=frozenset)
    max_per_source: int = DEFAULT_MAX_PER_SOURCE

    def __post_init__(self):
        object.__setattr__(self, "sources", frozenset(self.sources))


@dataclass(frozen=True)
class Violation:
    """One failed SearchSpec rule; ``detail`` names the offending value."""

    field: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        suffix = f": {self.detail}" if self.detail else ""
        return f"{self.field} {self.rule}{suffix}"


def validate_spec(
    spec: SearchSpec, known_sources: Optional[Iterable[str]] = None
) -> list[Violation]:
    """Check SearchSpec invariants; an empty list means the spec is valid.

    ``known_sources`` is the set of registered connector identifiers;
    when omitted the source-registration rule is not checked.
    """
    violations: list[Violation] = []
    if spec.year_from > spec.year_to:
        violations.append(
            Violation(
                "year_from/year_to",
                "YearRangeInverted",
                f"{spec.year_from} > {spec.year_to}",
            )
        )
    if not spec.sources:
        violations.append(Violation("sources", "EmptySources"))
    if known_sources is not None:
        known = set(known_sources)
        for sid in sorted(spec.sources - known):
            violations.append(Violation("sources", "UnknownSource", sid))
    if spec.max_per_source < 1:
        violations.append(
            Violation("max_per_source", "NonPositiveCap", str(spec.max_per_source))
        )
    return violations
