"""Validation layer between query text and the graph.

Accepts only read-only queries over the schema allowlist. Write and DDL
keywords are refused at the keyword level before parsing, so hostile text
fails fast even though the grammar could never produce those clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import LexError, ParseError
from .ast import FunctionCall, Literal, PropertyAccess, QueryAst, VariableRef, iter_exprs
from .lexer import WRITE_KEYWORDS, TokenKind, tokenize
from .parser import parse

ACCEPTED = "Accepted"
REJECTED = "Rejected"

DEFAULT_INJECTED_LIMIT = 100


@dataclass(frozen=True)
class ValidationPolicy:
    """Allowlists and limits enforced on every query."""
    allowed_labels: frozenset[str] = frozenset({"Article", "Topic"})
    allowed_rel_kinds: frozenset[str] = frozenset({"HAS_TOPIC"})
    allowed_properties: frozenset[str] = frozenset({
        "article_id", "title", "content", "sentiment", "compound",
        "content_vector", "published_date", "publisher", "country",
        "topic_id", "name",
    })
    allowed_functions: frozenset[str] = frozenset({"gds.similarity.cosine"})
    max_limit: int = 100
    max_literals: int = 32
    max_text_literal: int = 256


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    offset: Optional[int] = None


@dataclass
class ValidationReport:
    verdict: str                    # Accepted | Rejected
    violations: list[Violation] = field(default_factory=list)
    effective_limit: int = 0
    limit_injected: bool = False

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPTED

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violations": [{"code": v.code, "message": v.message, "offset": v.offset}
                           for v in self.violations],
            "effective_limit": self.effective_limit,
            "limit_injected": self.limit_injected,
        }


def _rejected(violations: list[Violation]) -> ValidationReport:
    return ValidationReport(verdict=REJECTED, violations=violations)


def validate(ast: QueryAst, policy: ValidationPolicy) -> ValidationReport:
    """Check a parsed query against the allowlists; pure and total."""
    violations: list[Violation] = []

    literal_count = 0

    def check_text_size(value) -> None:
        if isinstance(value, str) and len(value) > policy.max_text_literal:
            violations.append(Violation(
                "LITERAL_TOO_LARGE",
                f"text literal of {len(value)} chars exceeds {policy.max_text_literal}"))

    for path in ast.matches:
        for node in path.nodes:
            if node.label is not None and node.label not in policy.allowed_labels:
                violations.append(Violation("UNKNOWN_LABEL", f"label {node.label!r} not allowed"))
            for key, value in node.properties:
                literal_count += 1
                check_text_size(value)
                if key not in policy.allowed_properties:
                    violations.append(Violation("UNKNOWN_PROPERTY", f"property {key!r} not allowed"))
        for kind in path.rel_kinds:
            if kind not in policy.allowed_rel_kinds:
                violations.append(Violation("UNKNOWN_RELATIONSHIP",
                                            f"relationship kind {kind!r} not allowed"))

    for expr in iter_exprs(ast):
        if isinstance(expr, PropertyAccess) and expr.name not in policy.allowed_properties:
            violations.append(Violation("UNKNOWN_PROPERTY", f"property {expr.name!r} not allowed"))
        elif isinstance(expr, FunctionCall) and expr.name not in policy.allowed_functions:
            violations.append(Violation("UNKNOWN_FUNCTION", f"function {expr.name!r} not allowed"))
        elif isinstance(expr, Literal):
            literal_count += 1
            check_text_size(expr.value)
    if literal_count > policy.max_literals:
        violations.append(Violation("TOO_MANY_LITERALS",
                                    f"{literal_count} literals exceed {policy.max_literals}"))

    for item in ast.returns:
        if isinstance(item.expr, VariableRef) and item.expr.name in ast.pattern_variables():
            passed_through = ast.with_items is None or any(
                i.alias is None and isinstance(i.expr, VariableRef) and i.expr.name == item.expr.name
                for i in ast.with_items)
            if passed_through:
                violations.append(Violation(
                    "NODE_RETURN", f"returning whole node {item.expr.name!r} is not allowed"))

    effective_limit = ast.limit if ast.limit is not None else min(
        DEFAULT_INJECTED_LIMIT, policy.max_limit)
    limit_injected = ast.limit is None
    if ast.limit is not None and ast.limit > policy.max_limit:
        violations.append(Violation("LIMIT_TOO_LARGE",
                                    f"LIMIT {ast.limit} exceeds maximum {policy.max_limit}"))

    if violations:
        return _rejected(violations)
    return ValidationReport(verdict=ACCEPTED, effective_limit=effective_limit,
                            limit_injected=limit_injected)


def validate_text(text: str, policy: ValidationPolicy) -> tuple[ValidationReport, Optional[QueryAst]]:
    """Full gate for raw query text: lex, keyword scan, parse, validate.

    Returns the report plus the parsed AST when (and only when) accepted.
    """
    try:
        tokens = tokenize(text)
    except LexError as exc:
        return _rejected([Violation("SYNTAX_ERROR", str(exc), exc.offset)]), None

    write_hits = [Violation("WRITE_CLAUSE", f"write/DDL keyword {t.upper} is forbidden", t.offset)
                  for t in tokens
                  if t.kind == TokenKind.KEYWORD and t.upper in WRITE_KEYWORDS]
    if write_hits:
        return _rejected(write_hits), None

    try:
        ast = parse(tokens)
    except ParseError as exc:
        return _rejected([Violation("SYNTAX_ERROR", str(exc), exc.offset)]), None

    report = validate(ast, policy)
    return report, (ast if report.accepted else None)
