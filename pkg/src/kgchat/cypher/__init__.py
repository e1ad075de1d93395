"""Read-only Cypher subset: lexer, parser, validation layer, evaluator.

The grammar is intentionally closed: MATCH / WHERE / WITH / RETURN /
ORDER BY / LIMIT over Article and Topic patterns, comparisons, and the
cosine-similarity function. Everything else is rejected before execution.
"""

from .ast import (
    Compare,
    FunctionCall,
    Literal,
    NodePattern,
    OrderItem,
    PatternPath,
    Projection,
    PropertyAccess,
    QueryAst,
    VariableRef,
)
from .evaluator import ResultTable, cosine, execute
from .lexer import Token, TokenKind, tokenize
from .parser import parse, parse_text
from .unparse import unparse
from .validator import (
    ValidationPolicy,
    ValidationReport,
    Violation,
    validate,
    validate_text,
)

__all__ = [
    "Compare", "FunctionCall", "Literal", "NodePattern", "OrderItem",
    "PatternPath", "Projection", "PropertyAccess", "QueryAst", "VariableRef",
    "ResultTable", "cosine", "execute",
    "Token", "TokenKind", "tokenize",
    "parse", "parse_text", "unparse",
    "ValidationPolicy", "ValidationReport", "Violation", "validate", "validate_text",
]
