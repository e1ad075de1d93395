"""Query AST for the Cypher subset.

All nodes are frozen dataclasses so parsed queries compare by value; the
canonical unparser plus the parser form an exact round trip over this tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

PropertyLiteral = Union[int, float, str, bool, None]


@dataclass(frozen=True)
class Literal:
    value: PropertyLiteral


@dataclass(frozen=True)
class VariableRef:
    name: str


@dataclass(frozen=True)
class PropertyAccess:
    variable: str
    name: str


@dataclass(frozen=True)
class FunctionCall:
    name: str                       # dotted, e.g. "gds.similarity.cosine"
    args: tuple["Expr", ...]


@dataclass(frozen=True)
class Compare:
    op: str                         # one of = <> < > <= >=
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Literal, VariableRef, PropertyAccess, FunctionCall, Compare]


@dataclass(frozen=True)
class NodePattern:
    variable: str
    label: Optional[str] = None
    properties: tuple[tuple[str, PropertyLiteral], ...] = ()


@dataclass(frozen=True)
class PatternPath:
    """A node pattern chain: (a), or (a)-[:KIND]->(b)-[:KIND]->(c)."""
    nodes: tuple[NodePattern, ...]
    rel_kinds: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.rel_kinds) != len(self.nodes) - 1:
            raise ValueError("a path needs exactly one relationship between adjacent nodes")


@dataclass(frozen=True)
class Projection:
    expr: Expr
    alias: Optional[str] = None


@dataclass(frozen=True)
class OrderItem:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class QueryAst:
    matches: tuple[PatternPath, ...]
    returns: tuple[Projection, ...]
    where: Optional[Expr] = None
    with_items: Optional[tuple[Projection, ...]] = None
    with_where: Optional[Expr] = None
    order_by: tuple[OrderItem, ...] = ()
    limit: Optional[int] = None

    def pattern_variables(self) -> list[str]:
        """Variables bound by MATCH patterns, in binding order."""
        seen: dict[str, None] = {}
        for path in self.matches:
            for node in path.nodes:
                seen.setdefault(node.variable, None)
        return list(seen)

    def output_names(self) -> list[str]:
        """Names visible after the WITH stage (or the pattern variables)."""
        if self.with_items is None:
            return self.pattern_variables()
        names = []
        for item in self.with_items:
            if item.alias is not None:
                names.append(item.alias)
            elif isinstance(item.expr, VariableRef):
                names.append(item.expr.name)
        return names


def walk_expr(expr: Expr):
    """Yield expr and every sub-expression."""
    yield expr
    if isinstance(expr, Compare):
        yield from walk_expr(expr.lhs)
        yield from walk_expr(expr.rhs)
    elif isinstance(expr, FunctionCall):
        for arg in expr.args:
            yield from walk_expr(arg)


def iter_exprs(ast: QueryAst):
    """Yield every expression node appearing anywhere in the query."""
    roots: list[Expr] = []
    if ast.where is not None:
        roots.append(ast.where)
    if ast.with_items:
        roots.extend(item.expr for item in ast.with_items)
    if ast.with_where is not None:
        roots.append(ast.with_where)
    roots.extend(item.expr for item in ast.returns)
    roots.extend(item.expr for item in ast.order_by)
    for root in roots:
        yield from walk_expr(root)
