"""Recursive-descent parser for the Cypher subset.

Grammar (keywords case-insensitive):

    query      := MATCH path ("," path)*
                  [WHERE expr]
                  [WITH item ("," item)* [WHERE expr]]
                  RETURN item ("," item)*
                  [ORDER BY order ("," order)*]
                  [LIMIT INTEGER]
    path       := node ("-[:" IDENT "]->" node)*
    node       := "(" IDENT [":" IDENT] ["{" IDENT ":" literal ("," ...)* "}"] ")"
    item       := expr [AS IDENT]
    order      := expr [ASC | DESC]
    expr       := operand [("=" | "<>" | "<" | ">" | "<=" | ">=") operand]
    operand    := literal | dotted "(" expr ("," expr)* ")" | IDENT "." IDENT | IDENT

Every variable referenced after the patterns must be bound by a pattern or a
prior WITH alias; violations raise ParseError.
"""

from __future__ import annotations

from ..errors import ParseError
from .ast import (
    Compare,
    Expr,
    FunctionCall,
    Literal,
    NodePattern,
    OrderItem,
    PatternPath,
    Projection,
    PropertyAccess,
    QueryAst,
    VariableRef,
    walk_expr,
)
from .lexer import Token, TokenKind, string_value, tokenize

_COMPARE_OPS = ("=", "<>", "<", ">", "<=", ">=")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token helpers ---

    def _peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _found(self) -> str:
        token = self._peek()
        return repr(token.text) if token else "end of query"

    def _offset(self) -> int:
        token = self._peek()
        return token.offset if token else (self.tokens[-1].offset if self.tokens else 0)

    def _error(self, expected: str) -> ParseError:
        return ParseError(expected, self._found(), self._offset())

    def _at_keyword(self, word: str) -> bool:
        token = self._peek()
        return token is not None and token.kind == TokenKind.KEYWORD and token.upper == word

    def _at_symbol(self, text: str) -> bool:
        token = self._peek()
        return token is not None and token.kind == TokenKind.SYMBOL and token.text == text

    def _take_keyword(self, word: str) -> Token:
        if not self._at_keyword(word):
            raise self._error(word)
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _take_symbol(self, text: str) -> Token:
        if not self._at_symbol(text):
            raise self._error(repr(text))
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _take_identifier(self) -> str:
        token = self._peek()
        if token is None or token.kind != TokenKind.IDENTIFIER:
            raise self._error("identifier")
        self.pos += 1
        return token.text

    # --- grammar ---

    def parse_query(self) -> QueryAst:
        self._take_keyword("MATCH")
        paths = [self._parse_path()]
        while self._at_symbol(","):
            self.pos += 1
            paths.append(self._parse_path())

        where = None
        if self._at_keyword("WHERE"):
            self.pos += 1
            where = self._parse_expr()

        with_items = None
        with_where = None
        if self._at_keyword("WITH"):
            self.pos += 1
            with_items = tuple(self._parse_projections())
            if self._at_keyword("WHERE"):
                self.pos += 1
                with_where = self._parse_expr()

        self._take_keyword("RETURN")
        returns = tuple(self._parse_projections())

        order_by: list[OrderItem] = []
        if self._at_keyword("ORDER"):
            self.pos += 1
            self._take_keyword("BY")
            order_by.append(self._parse_order_item())
            while self._at_symbol(","):
                self.pos += 1
                order_by.append(self._parse_order_item())

        limit = None
        if self._at_keyword("LIMIT"):
            self.pos += 1
            token = self._peek()
            if token is None or token.kind != TokenKind.INTEGER:
                raise self._error("integer")
            limit = int(token.text)
            if limit < 1:
                raise ParseError("LIMIT >= 1", token.text, token.offset)
            self.pos += 1

        if self._peek() is not None:
            raise self._error("end of query")

        ast = QueryAst(matches=tuple(paths), returns=returns, where=where,
                       with_items=with_items, with_where=with_where,
                       order_by=tuple(order_by), limit=limit)
        self._check_bindings(ast)
        return ast

    def _parse_path(self) -> PatternPath:
        nodes = [self._parse_node_pattern()]
        kinds: list[str] = []
        while self._at_symbol("-"):
            self.pos += 1
            self._take_symbol("[")
            self._take_symbol(":")
            kinds.append(self._take_identifier())
            self._take_symbol("]")
            self._take_symbol("->")
            nodes.append(self._parse_node_pattern())
        return PatternPath(nodes=tuple(nodes), rel_kinds=tuple(kinds))

    def _parse_node_pattern(self) -> NodePattern:
        self._take_symbol("(")
        variable = self._take_identifier()
        label = None
        if self._at_symbol(":"):
            self.pos += 1
            label = self._take_identifier()
        properties: list[tuple[str, object]] = []
        if self._at_symbol("{"):
            self.pos += 1
            while True:
                key = self._take_identifier()
                self._take_symbol(":")
                value = self._parse_literal_value()
                properties.append((key, value))
                if self._at_symbol(","):
                    self.pos += 1
                    continue
                break
            self._take_symbol("}")
        self._take_symbol(")")
        return NodePattern(variable=variable, label=label, properties=tuple(properties))

    def _parse_literal_value(self):
        negative = False
        if self._at_symbol("-"):
            self.pos += 1
            negative = True
        token = self._peek()
        if token is None:
            raise self._error("literal")
        if token.kind == TokenKind.INTEGER:
            self.pos += 1
            return -int(token.text) if negative else int(token.text)
        if token.kind == TokenKind.FLOAT:
            self.pos += 1
            return -float(token.text) if negative else float(token.text)
        if token.kind == TokenKind.TEXT and not negative:
            self.pos += 1
            return string_value(token)
        raise self._error("literal")

    def _parse_projections(self) -> list[Projection]:
        items = [self._parse_projection()]
        while self._at_symbol(","):
            self.pos += 1
            items.append(self._parse_projection())
        return items

    def _parse_projection(self) -> Projection:
        expr = self._parse_expr()
        alias = None
        if self._at_keyword("AS"):
            self.pos += 1
            alias = self._take_identifier()
        return Projection(expr=expr, alias=alias)

    def _parse_order_item(self) -> OrderItem:
        expr = self._parse_expr()
        descending = False
        if self._at_keyword("DESC"):
            self.pos += 1
            descending = True
        elif self._at_keyword("ASC"):
            self.pos += 1
        return OrderItem(expr=expr, descending=descending)

    def _parse_expr(self) -> Expr:
        lhs = self._parse_operand()
        token = self._peek()
        if token is not None and token.kind == TokenKind.SYMBOL and token.text in _COMPARE_OPS:
            self.pos += 1
            rhs = self._parse_operand()
            return Compare(op=token.text, lhs=lhs, rhs=rhs)
        return lhs

    def _parse_operand(self) -> Expr:
        token = self._peek()
        if token is None:
            raise self._error("expression")
        if token.kind in (TokenKind.INTEGER, TokenKind.FLOAT, TokenKind.TEXT) or self._at_symbol("-"):
            return Literal(self._parse_literal_value())
        if token.kind == TokenKind.IDENTIFIER:
            parts = [self._take_identifier()]
            while self._at_symbol("."):
                self.pos += 1
                parts.append(self._take_identifier())
            if self._at_symbol("("):
                self.pos += 1
                args = [self._parse_expr()]
                while self._at_symbol(","):
                    self.pos += 1
                    args.append(self._parse_expr())
                self._take_symbol(")")
                return FunctionCall(name=".".join(parts), args=tuple(args))
            if len(parts) == 1:
                return VariableRef(name=parts[0])
            if len(parts) == 2:
                return PropertyAccess(variable=parts[0], name=parts[1])
            raise ParseError("property access or function call", ".".join(parts), token.offset)
        raise self._error("expression")

    # --- binding discipline ---

    def _check_bindings(self, ast: QueryAst) -> None:
        bound = set(ast.pattern_variables())

        def check(expr: Expr, scope: set[str], where: str) -> None:
            for sub in walk_expr(expr):
                if isinstance(sub, VariableRef) and sub.name not in scope:
                    raise ParseError(f"a bound variable in {where}",
                                     repr(sub.name), self._binding_offset())
                if isinstance(sub, PropertyAccess) and sub.variable not in scope:
                    raise ParseError(f"a bound variable in {where}",
                                     repr(sub.variable), self._binding_offset())

        if ast.where is not None:
            check(ast.where, bound, "WHERE")
        scope = bound
        if ast.with_items is not None:
            for item in ast.with_items:
                check(item.expr, bound, "WITH")
                if item.alias is None and not isinstance(item.expr, VariableRef):
                    raise ParseError("AS alias for a non-variable WITH item",
                                     "expression", self._binding_offset())
            scope = set(ast.output_names())
            if ast.with_where is not None:
                check(ast.with_where, scope, "WHERE after WITH")
        for item in ast.returns:
            check(item.expr, scope, "RETURN")
        order_scope = scope | {item.alias for item in ast.returns if item.alias}
        for item in ast.order_by:
            check(item.expr, order_scope, "ORDER BY")

    def _binding_offset(self) -> int:
        return self.tokens[-1].offset if self.tokens else 0


def parse(tokens: list[Token]) -> QueryAst:
    """Parse a token stream into a QueryAst; raises ParseError."""
    return _Parser(tokens).parse_query()


def parse_text(text: str) -> QueryAst:
    """Tokenize and parse query text; raises LexError or ParseError."""
    return parse(tokenize(text))
