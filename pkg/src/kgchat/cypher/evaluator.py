"""Evaluator for validated queries against the embedded graph.

Semantics: enumerate all pattern bindings (cross product restricted by
labels, inline property maps, and relationships), filter with WHERE,
compute WITH projections, filter again, project RETURN items, then apply
ORDER BY with a deterministic tie-break (ascending article_id of the bound
article variables, then enumeration order) and truncate to the effective
limit. Missing properties evaluate to null, and any comparison against
null is false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import DimensionMismatchError, EvalError
from ..graph import ARTICLE, Graph, Node
from .ast import (
    Compare,
    Expr,
    FunctionCall,
    Literal,
    NodePattern,
    Projection,
    PropertyAccess,
    QueryAst,
    VariableRef,
)
from .unparse import format_expr


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"columns": self.columns, "rows": self.rows}


def cosine(a: list[float], b: list[float]) -> float:
    """Cosine similarity dot(a,b)/(|a|*|b|); 0.0 when either vector is zero."""
    if len(a) != len(b):
        raise DimensionMismatchError(f"vector lengths differ: {len(a)} vs {len(b)}")
    dot = math.fsum(x * y for x, y in zip(a, b))
    norm_a = math.sqrt(math.fsum(x * x for x in a))
    norm_b = math.sqrt(math.fsum(y * y for y in b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return dot / (norm_a * norm_b)


def _call_function(name: str, args: list) -> float:
    if name != "gds.similarity.cosine":
        raise EvalError("unknown_function", f"function {name!r} is not registered")
    if len(args) != 2:
        raise EvalError("arity", f"{name} takes 2 arguments, got {len(args)}")
    for arg in args:
        if not isinstance(arg, list):
            raise EvalError("type", f"{name} expects float vectors")
    try:
        return cosine(args[0], args[1])
    except DimensionMismatchError as exc:
        raise EvalError("dimension", str(exc)) from exc


def _eval_expr(expr: Expr, env: dict):
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, VariableRef):
        return env.get(expr.name)
    if isinstance(expr, PropertyAccess):
        value = env.get(expr.variable)
        if isinstance(value, Node):
            return value.properties.get(expr.name)
        return None
    if isinstance(expr, FunctionCall):
        return _call_function(expr.name, [_eval_expr(a, env) for a in expr.args])
    if isinstance(expr, Compare):
        return _compare(expr.op, _eval_expr(expr.lhs, env), _eval_expr(expr.rhs, env))
    raise EvalError("type", f"cannot evaluate {expr!r}")


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _equal(lhs, rhs) -> bool:
    if isinstance(lhs, Node) and isinstance(rhs, Node):
        return lhs.id == rhs.id
    if _is_number(lhs) and _is_number(rhs):
        return float(lhs) == float(rhs)
    if type(lhs) is type(rhs):
        return lhs == rhs
    return False


def _compare(op: str, lhs, rhs) -> bool:
    if lhs is None or rhs is None:
        return False
    if op == "=":
        return _equal(lhs, rhs)
    if op == "<>":
        return not _equal(lhs, rhs)
    # ordering is defined within numbers and within text only
    if _is_number(lhs) and _is_number(rhs):
        pass
    elif isinstance(lhs, str) and isinstance(rhs, str):
        pass
    else:
        return False
    if op == "<":
        return lhs < rhs
    if op == ">":
        return lhs > rhs
    if op == "<=":
        return lhs <= rhs
    if op == ">=":
        return lhs >= rhs
    raise EvalError("type", f"unknown comparison operator {op!r}")


def _node_matches(node: Node, pattern: NodePattern) -> bool:
    if pattern.label is not None and node.label != pattern.label:
        return False
    for key, expected in pattern.properties:
        if not _compare("=", node.properties.get(key), expected):
            return False
    return True


def _candidates(graph: Graph, pattern: NodePattern) -> list[Node]:
    """Nodes matching a pattern, ascending id; article_id maps use the index."""
    props = dict(pattern.properties)
    if pattern.label == ARTICLE and "article_id" in props and _is_number(props["article_id"]):
        node = graph.find_article(int(props["article_id"]))
        return [node] if node is not None and _node_matches(node, pattern) else []
    return [n for n in graph.all_nodes() if _node_matches(n, pattern)]


def _enumerate_bindings(graph: Graph, ast: QueryAst) -> list[dict]:
    """All pattern bindings, in deterministic nested-loop order."""
    steps: list = []  # ("node", pattern) | ("rel", from_var, kind, pattern)
    for path in ast.matches:
        previous = path.nodes[0]
        steps.append(("node", previous))
        for kind, node in zip(path.rel_kinds, path.nodes[1:]):
            steps.append(("rel", previous.variable, kind, node))
            previous = node

    results: list[dict] = []

    def extend(index: int, env: dict) -> None:
        if index == len(steps):
            results.append(dict(env))
            return
        step = steps[index]
        if step[0] == "node":
            pattern = step[1]
            bound = env.get(pattern.variable)
            if bound is not None:
                if _node_matches(bound, pattern):
                    extend(index + 1, env)
                return
            for node in _candidates(graph, pattern):
                env[pattern.variable] = node
                extend(index + 1, env)
            env.pop(pattern.variable, None)
        else:
            _, from_var, kind, pattern = step
            source = env[from_var]
            bound = env.get(pattern.variable)
            if bound is not None:
                if _node_matches(bound, pattern) and graph.has_edge(source.id, bound.id, kind):
                    extend(index + 1, env)
                return
            for node in graph.neighbors(source.id, kind, "out"):
                if _node_matches(node, pattern):
                    env[pattern.variable] = node
                    extend(index + 1, env)
            env.pop(pattern.variable, None)

    extend(0, {})
    return results


def _article_tie_key(env: dict, variables: list[str]) -> tuple:
    """Ascending article_id tuple over bound article variables, binding order."""
    key = []
    for name in variables:
        value = env.get(name)
        if isinstance(value, Node) and value.label == ARTICLE:
            key.append(value.properties.get("article_id", 0))
    return tuple(key)


def _sort_key(value):
    if value is None:
        return (4, 0)
    if _is_number(value):
        return (0, float(value))
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, bool):
        return (2, value)
    return (3, str(value))


def execute(ast: QueryAst, graph: Graph, effective_limit: int | None = None) -> ResultTable:
    """Run a validated query; the caller passes the report's effective limit."""
    pattern_vars = ast.pattern_variables()
    bindings = _enumerate_bindings(graph, ast)

    if ast.where is not None:
        bindings = [env for env in bindings if _eval_expr(ast.where, env) is True]

    staged: list[tuple[dict, tuple]] = []
    for env in bindings:
        tie = _article_tie_key(env, pattern_vars)
        if ast.with_items is not None:
            scope: dict = {}
            for item in ast.with_items:
                value = _eval_expr(item.expr, env)
                name = item.alias if item.alias is not None else item.expr.name
                scope[name] = value
        else:
            scope = env
        staged.append((scope, tie))

    if ast.with_where is not None:
        staged = [(scope, tie) for scope, tie in staged
                  if _eval_expr(ast.with_where, scope) is True]

    columns = [item.alias if item.alias is not None else format_expr(item.expr)
               for item in ast.returns]
    computed: list[tuple[list, dict, tuple]] = []
    for scope, tie in staged:
        cells = []
        for item in ast.returns:
            value = _eval_expr(item.expr, scope)
            if isinstance(value, Node):
                raise EvalError("type", "queries return scalar values, not whole nodes")
            cells.append(value)
        computed.append((cells, scope, tie))

    if ast.order_by:
        # stable multi-pass sort: tie-break first, then keys last-to-first
        computed.sort(key=lambda row: row[2])
        alias_index = {c: i for i, c in enumerate(columns)}
        for item in reversed(ast.order_by):
            def key(row, item=item):
                scope = row[1]
                if (isinstance(item.expr, VariableRef)
                        and item.expr.name not in scope
                        and item.expr.name in alias_index):
                    return _sort_key(row[0][alias_index[item.expr.name]])
                return _sort_key(_eval_expr(item.expr, scope))
            computed.sort(key=key, reverse=item.descending)

    rows = [cells for cells, _, _ in computed]
    if effective_limit is None and ast.limit is not None:
        effective_limit = ast.limit
    if effective_limit is not None:
        rows = rows[:effective_limit]
    return ResultTable(columns=columns, rows=rows)
