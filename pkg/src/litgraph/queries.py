"""Graph query mini-language: attribute filters, sorting, clustering.

Two statement kinds cover the review workflows: ``FIND PUBLICATIONS``
with an optional WHERE condition, ORDER BY, and LIMIT; and ``CLUSTER BY
FIELD|YEAR|DATABASE`` which partitions the publications along one of
the three value-node dimensions.  The CSV export remains the escape
hatch to a full graph query language.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .graph import EdgeLabel, KnowledgeGraph, Node

NUMERIC_ATTRS = frozenset({"year", "citations"})
LIST_ATTRS = frozenset({"author", "keyword"})
STRING_ATTRS = frozenset({"title", "database", "field"})
ATTRIBUTES = NUMERIC_ATTRS | LIST_ATTRS | STRING_ATTRS

ORDERING_OPS = frozenset({"<", "<=", ">", ">="})
COMPARISON_OPS = ORDERING_OPS | {"=", "!=", "CONTAINS"}

CLUSTER_DIMENSIONS = ("field", "year", "database")

_DIMENSION_EDGE = {
    "field": EdgeLabel.APPLIED_IN,
    "year": EdgeLabel.PUBLISHED_IN,
    "database": EdgeLabel.PUBLISHED_BY,
}


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAttributeError(ValueError):
    def __init__(self, name: str, position: int):
        super().__init__(f"unknown attribute {name!r} (at position {position})")
        self.name = name
        self.position = position


class QueryTypeError(TypeError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Comparison:
    attr: str
    op: str
    value: Union[str, int]


@dataclass(frozen=True)
class AndCond:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class OrCond:
    left: "Condition"
    right: "Condition"


Condition = Union[Comparison, AndCond, OrCond]


@dataclass(frozen=True)
class FindQuery:
    condition: Optional[Condition] = None
    order_by: Optional[tuple[str, str]] = None  # (attr, "asc"|"desc")
    limit: Optional[int] = None


@dataclass(frozen=True)
class ClusterQuery:
    dimension: str


QueryAST = Union[FindQuery, ClusterQuery]


# -- tokenizer --

_KEYWORDS = frozenset(
    {"FIND", "PUBLICATIONS", "WHERE", "ORDER", "BY", "LIMIT", "ASC", "DESC",
     "CLUSTER", "AND", "OR", "CONTAINS"}
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # keyword kinds, "ident", "string", "int", "op", "lparen", "rparen"
    value: Union[str, int]
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    tokens: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "(":
            tokens.append(_Tok("lparen", ch, i))
            i += 1
        elif ch == ")":
            tokens.append(_Tok("rparen", ch, i))
            i += 1
        elif ch == '"':
            end = text.find('"', i + 1)
            if end == -1:
                raise QuerySyntaxError("unterminated string literal", i)
            tokens.append(_Tok("string", text[i + 1 : end], i))
            i = end + 1
        elif ch in "=<>!":
            if text[i : i + 2] in ("<=", ">=", "!="):
                tokens.append(_Tok("op", text[i : i + 2], i))
                i += 2
            elif ch in "=<>":
                tokens.append(_Tok("op", ch, i))
                i += 1
            else:
                raise QuerySyntaxError(f"unexpected character {ch!r}", i)
        elif ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(_Tok("int", int(text[start:i]), start))
        elif ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            upper = word.upper()
            if upper in _KEYWORDS:
                tokens.append(_Tok(upper, upper, start))
            else:
                tokens.append(_Tok("ident", word, start))
        else:
            raise QuerySyntaxError(f"unexpected character {ch!r}", i)
    return tokens


class _QueryParser:
    def __init__(self, tokens: list[_Tok], length: int):
        self.tokens = tokens
        self.i = 0
        self.length = length

    def peek(self) -> Optional[_Tok]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise QuerySyntaxError("unexpected end of query", self.length)
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise QuerySyntaxError(f"expected {kind}", self.length)
        if tok.kind != kind:
            raise QuerySyntaxError(f"expected {kind}, found {tok.value!r}", tok.pos)
        return self.next()

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    # condition := and (OR and)* ; and := atom (AND atom)*
    def parse_condition(self) -> Condition:
        cond = self.parse_and()
        while (tok := self.peek()) is not None and tok.kind == "OR":
            self.next()
            cond = OrCond(cond, self.parse_and())
        return cond

    def parse_and(self) -> Condition:
        cond = self.parse_atom()
        while (tok := self.peek()) is not None and tok.kind == "AND":
            self.next()
            cond = AndCond(cond, self.parse_atom())
        return cond

    def parse_atom(self) -> Condition:
        tok = self.peek()
        if tok is None:
            raise QuerySyntaxError("expected a comparison", self.length)
        if tok.kind == "lparen":
            self.next()
            cond = self.parse_condition()
            closing = self.peek()
            if closing is None or closing.kind != "rparen":
                raise QuerySyntaxError("unmatched '('", tok.pos)
            self.next()
            return cond
        return self.parse_comparison()

    def parse_comparison(self) -> Comparison:
        attr_tok = self.peek()
        if attr_tok is None or attr_tok.kind != "ident":
            pos = attr_tok.pos if attr_tok else self.length
            found = f", found {attr_tok.value!r}" if attr_tok else ""
            raise QuerySyntaxError(f"expected an attribute name{found}", pos)
        self.next()
        attr = str(attr_tok.value).lower()
        if attr not in ATTRIBUTES:
            raise UnknownAttributeError(str(attr_tok.value), attr_tok.pos)
        op_tok = self.peek()
        if op_tok is None or op_tok.kind not in ("op", "CONTAINS"):
            pos = op_tok.pos if op_tok else self.length
            raise QuerySyntaxError("expected a comparison operator", pos)
        self.next()
        op = "CONTAINS" if op_tok.kind == "CONTAINS" else str(op_tok.value)
        value_tok = self.peek()
        if value_tok is None or value_tok.kind not in ("string", "int"):
            pos = value_tok.pos if value_tok else self.length
            raise QuerySyntaxError("expected a literal value", pos)
        self.next()
        _check_types(attr, op, value_tok)
        return Comparison(attr, op, value_tok.value)


def _check_types(attr: str, op: str, value_tok: _Tok) -> None:
    numeric_attr = attr in NUMERIC_ATTRS
    if op in ORDERING_OPS and not numeric_attr:
        raise QueryTypeError(
            f"ordering operator {op!r} requires a numeric attribute, not {attr!r}",
            value_tok.pos,
        )
    if op == "CONTAINS":
        if numeric_attr:
            raise QueryTypeError(
                f"CONTAINS requires a string attribute, not {attr!r}", value_tok.pos
            )
        if value_tok.kind != "string":
            raise QueryTypeError("CONTAINS requires a string literal", value_tok.pos)
        return
    if numeric_attr and value_tok.kind != "int":
        raise QueryTypeError(
            f"attribute {attr!r} requires a numeric literal", value_tok.pos
        )
    if not numeric_attr and value_tok.kind != "string":
        raise QueryTypeError(
            f"attribute {attr!r} requires a quoted string literal", value_tok.pos
        )


def parse_query(text: str) -> QueryAST:
    """Parse query text into a FindQuery or ClusterQuery."""
    tokens = _tokenize(text)
    parser = _QueryParser(tokens, len(text))
    first = parser.peek()
    if first is None:
        raise QuerySyntaxError("query is empty", 0)
    if first.kind == "CLUSTER":
        parser.next()
        parser.expect("BY")
        dim_tok = parser.next()
        dim = str(dim_tok.value).lower()
        if dim not in CLUSTER_DIMENSIONS:
            raise QuerySyntaxError(
                f"cluster dimension must be FIELD, YEAR, or DATABASE, found {dim_tok.value!r}",
                dim_tok.pos,
            )
        if not parser.at_end():
            tok = parser.peek()
            raise QuerySyntaxError(f"unexpected {tok.value!r} after cluster query", tok.pos)
        return ClusterQuery(dim)
    if first.kind != "FIND":
        raise QuerySyntaxError(
            f"query must start with FIND or CLUSTER, found {first.value!r}", first.pos
        )
    parser.next()
    parser.expect("PUBLICATIONS")
    condition = None
    order_by = None
    limit = None
    if (tok := parser.peek()) is not None and tok.kind == "WHERE":
        parser.next()
        condition = parser.parse_condition()
    if (tok := parser.peek()) is not None and tok.kind == "ORDER":
        parser.next()
        parser.expect("BY")
        attr_tok = parser.peek()
        if attr_tok is None or attr_tok.kind != "ident":
            pos = attr_tok.pos if attr_tok else parser.length
            raise QuerySyntaxError("expected an attribute after ORDER BY", pos)
        parser.next()
        attr = str(attr_tok.value).lower()
        if attr not in ATTRIBUTES:
            raise UnknownAttributeError(str(attr_tok.value), attr_tok.pos)
        if attr in LIST_ATTRS:
            raise QueryTypeError(f"cannot order by list attribute {attr!r}", attr_tok.pos)
        direction = "asc"
        if (d := parser.peek()) is not None and d.kind in ("ASC", "DESC"):
            parser.next()
            direction = str(d.value).lower()
        order_by = (attr, direction)
    if (tok := parser.peek()) is not None and tok.kind == "LIMIT":
        parser.next()
        n_tok = parser.peek()
        if n_tok is None or n_tok.kind != "int":
            pos = n_tok.pos if n_tok else parser.length
            raise QuerySyntaxError("LIMIT requires an integer", pos)
        parser.next()
        if int(n_tok.value) < 1:
            raise QuerySyntaxError("LIMIT must be positive", n_tok.pos)
        limit = int(n_tok.value)
    if not parser.at_end():
        tok = parser.peek()
        raise QuerySyntaxError(f"unexpected {tok.value!r}", tok.pos)
    return FindQuery(condition, order_by, limit)


def render_query(ast: QueryAST) -> str:
    """Canonical query text; reparsing yields a structurally equal AST."""
    if isinstance(ast, ClusterQuery):
        return f"CLUSTER BY {ast.dimension.upper()}"
    parts = ["FIND PUBLICATIONS"]
    if ast.condition is not None:
        parts.append(f"WHERE {_render_cond(ast.condition)}")
    if ast.order_by is not None:
        attr, direction = ast.order_by
        parts.append(f"ORDER BY {attr} {direction.upper()}")
    if ast.limit is not None:
        parts.append(f"LIMIT {ast.limit}")
    return " ".join(parts)


def _render_cond(cond: Condition) -> str:
    if isinstance(cond, Comparison):
        value = cond.value if isinstance(cond.value, int) else f'"{cond.value}"'
        return f"{cond.attr} {cond.op} {value}"
    if isinstance(cond, AndCond):
        left = _wrap(cond.left, AndCond, right_side=False)
        right = _wrap(cond.right, AndCond, right_side=True)
        return f"{left} AND {right}"
    left = _wrap(cond.left, OrCond, right_side=False)
    right = _wrap(cond.right, OrCond, right_side=True)
    return f"{left} OR {right}"


def _wrap(cond: Condition, parent: type, right_side: bool) -> str:
    text = _render_cond(cond)
    if isinstance(cond, Comparison):
        return text
    if parent is AndCond and isinstance(cond, OrCond):
        return f"({text})"
    if isinstance(cond, parent) and right_side:
        return f"({text})"
    return text


# -- execution --

RESULT_COLUMNS = ("title", "authors", "year", "database", "citations", "field")


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[dict, ...]


@dataclass(frozen=True)
class ClusterSet:
    dimension: str
    clusters: dict[str, tuple[str, ...]]  # cluster key -> publication dedup keys


@dataclass(frozen=True)
class _PubView:
    """One publication's query-visible attributes."""

    key: str
    title: str
    author: tuple[str, ...]
    year: int
    database: str
    citations: int
    field: str
    keyword: tuple[str, ...]


def _view(kg: KnowledgeGraph, pub: Node) -> _PubView:
    return _PubView(
        key=pub.key,
        title=str(pub.props.get("title", "")),
        author=tuple(pub.props.get("authors", [])),
        year=int(kg.out_target(pub.id, EdgeLabel.PUBLISHED_IN).key),
        database=kg.out_target(pub.id, EdgeLabel.PUBLISHED_BY).key,
        citations=int(kg.out_target(pub.id, EdgeLabel.CITED).key),
        field=kg.out_target(pub.id, EdgeLabel.APPLIED_IN).key,
        keyword=tuple(
            sorted(kg.get_node(e.dst).key for e in kg.out_edges(pub.id, EdgeLabel.HAS_KEYWORD))
        ),
    )


def _compare_scalar(actual, op: str, expected) -> bool:
    if op == "=":
        return actual == expected
    if op == "!=":
        return actual != expected
    if op == "<":
        return actual < expected
    if op == "<=":
        return actual <= expected
    if op == ">":
        return actual > expected
    if op == ">=":
        return actual >= expected
    if op == "CONTAINS":
        return str(expected).lower() in str(actual).lower()
    raise ValueError(f"unknown operator {op!r}")


def _eval_comparison(view: _PubView, cmp: Comparison) -> bool:
    actual = getattr(view, cmp.attr)
    if cmp.attr in LIST_ATTRS:
        if cmp.op == "!=":
            return not any(_compare_scalar(item, "=", cmp.value) for item in actual)
        return any(_compare_scalar(item, cmp.op, cmp.value) for item in actual)
    return _compare_scalar(actual, cmp.op, cmp.value)


def _eval_condition(view: _PubView, cond: Condition) -> bool:
    if isinstance(cond, Comparison):
        return _eval_comparison(view, cond)
    if isinstance(cond, AndCond):
        return _eval_condition(view, cond.left) and _eval_condition(view, cond.right)
    return _eval_condition(view, cond.left) or _eval_condition(view, cond.right)


def execute(kg: KnowledgeGraph, ast: QueryAST) -> Union[ResultTable, ClusterSet]:
    """Run a parsed query against a graph snapshot."""
    if isinstance(ast, ClusterQuery):
        return cluster_by(kg, ast.dimension)
    views = [_view(kg, pub) for pub in kg.publications()]
    if ast.condition is not None:
        views = [v for v in views if _eval_condition(v, ast.condition)]
    views.sort(key=lambda v: v.key)
    if ast.order_by is not None:
        attr, direction = ast.order_by
        views.sort(key=lambda v: getattr(v, attr), reverse=(direction == "desc"))
    if ast.limit is not None:
        views = views[: ast.limit]
    rows = tuple(
        {
            "title": v.title,
            "authors": list(v.author),
            "year": v.year,
            "database": v.database,
            "citations": v.citations,
            "field": v.field,
        }
        for v in views
    )
    return ResultTable(RESULT_COLUMNS, rows)


def cluster_by(kg: KnowledgeGraph, dimension: str) -> ClusterSet:
    """Partition all publications by their field, year, or database node."""
    if dimension not in CLUSTER_DIMENSIONS:
        raise ValueError(
            f"dimension must be one of {', '.join(CLUSTER_DIMENSIONS)}: {dimension!r}"
        )
    edge_label = _DIMENSION_EDGE[dimension]
    clusters: dict[str, list[str]] = {}
    for pub in kg.publications():
        target = kg.out_target(pub.id, edge_label)
        clusters.setdefault(target.key, []).append(pub.key)
    return ClusterSet(
        dimension,
        {key: tuple(sorted(members)) for key, members in sorted(clusters.items())},
    )
