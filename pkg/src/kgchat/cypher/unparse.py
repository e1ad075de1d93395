"""Canonical single-line pretty-printer; parse(unparse(ast)) == ast."""

from __future__ import annotations

from .ast import (
    Compare,
    Expr,
    FunctionCall,
    Literal,
    NodePattern,
    PatternPath,
    Projection,
    PropertyAccess,
    QueryAst,
    VariableRef,
)

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t"}


def format_literal(value) -> str:
    if isinstance(value, bool) or value is None:
        raise ValueError(f"literal {value!r} has no query syntax")
    if isinstance(value, str):
        body = "".join(_STRING_ESCAPES.get(ch, ch) for ch in value)
        return f'"{body}"'
    return repr(value)


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Literal):
        return format_literal(expr.value)
    if isinstance(expr, VariableRef):
        return expr.name
    if isinstance(expr, PropertyAccess):
        return f"{expr.variable}.{expr.name}"
    if isinstance(expr, FunctionCall):
        args = ", ".join(format_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if isinstance(expr, Compare):
        return f"{format_expr(expr.lhs)} {expr.op} {format_expr(expr.rhs)}"
    raise TypeError(f"not an expression: {expr!r}")


def _format_node(node: NodePattern) -> str:
    out = node.variable
    if node.label is not None:
        out += f":{node.label}"
    if node.properties:
        pairs = ", ".join(f"{k}: {format_literal(v)}" for k, v in node.properties)
        out += f" {{{pairs}}}"
    return f"({out})"


def _format_path(path: PatternPath) -> str:
    out = _format_node(path.nodes[0])
    for kind, node in zip(path.rel_kinds, path.nodes[1:]):
        out += f"-[:{kind}]->{_format_node(node)}"
    return out


def _format_projection(item: Projection) -> str:
    out = format_expr(item.expr)
    if item.alias is not None:
        out += f" AS {item.alias}"
    return out


def unparse(ast: QueryAst) -> str:
    """Render the AST as normalized single-line Cypher."""
    parts = ["MATCH " + ", ".join(_format_path(p) for p in ast.matches)]
    if ast.where is not None:
        parts.append("WHERE " + format_expr(ast.where))
    if ast.with_items is not None:
        parts.append("WITH " + ", ".join(_format_projection(i) for i in ast.with_items))
        if ast.with_where is not None:
            parts.append("WHERE " + format_expr(ast.with_where))
    parts.append("RETURN " + ", ".join(_format_projection(i) for i in ast.returns))
    if ast.order_by:
        keys = ", ".join(format_expr(i.expr) + (" DESC" if i.descending else "")
                         for i in ast.order_by)
        parts.append("ORDER BY " + keys)
    if ast.limit is not None:
        parts.append(f"LIMIT {ast.limit}")
    return " ".join(parts)
