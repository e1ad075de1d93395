"""Tokenizer for the Cypher subset.

Keywords are case-insensitive, identifiers case-sensitive. Offsets are UTF-8
byte positions into the original text, so concatenating token texts with the
original whitespace reconstructs the input exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import LexError


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    INTEGER = "integer"
    FLOAT = "float"
    TEXT = "text"
    SYMBOL = "symbol"


# Clause keywords the grammar accepts plus write/DDL keywords that must be
# recognizable so hostile text fails fast at the keyword level.
KEYWORDS = frozenset({
    "MATCH", "WHERE", "WITH", "RETURN", "ORDER", "BY", "AS", "ASC", "DESC",
    "LIMIT", "AND",
    "CREATE", "MERGE", "DELETE", "DETACH", "SET", "REMOVE", "DROP", "CALL", "LOAD",
})

WRITE_KEYWORDS = frozenset({
    "CREATE", "MERGE", "DELETE", "DETACH", "SET", "REMOVE", "DROP", "CALL", "LOAD",
})

_TWO_CHAR_SYMBOLS = ("<>", "<=", ">=", "->")
_ONE_CHAR_SYMBOLS = set("(){}[]:,.-=<>")

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "'": "'", "\\": "\\"}


@dataclass
class Token:
    kind: TokenKind
    text: str
    offset: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def string_value(token: Token) -> str:
    """Unescaped value of a TEXT token (token.text keeps the raw source)."""
    raw = token.text[1:-1]
    out: list[str] = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\":
            out.append(_ESCAPES[raw[i + 1]])
            i += 2
        else:
            out.append(raw[i])
            i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    """Full tokenization of `text`, or LexError at the first invalid character."""
    tokens: list[Token] = []
    pos = 0        # index into the string
    offset = 0     # UTF-8 byte offset
    n = len(text)

    def byte_len(fragment: str) -> int:
        return len(fragment.encode("utf-8"))

    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            offset += byte_len(ch)
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            word = text[start:pos]
            if not word.isascii():
                raise LexError(f"non-ascii identifier {word!r}", offset)
            kind = TokenKind.KEYWORD if word.upper() in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, word, offset))
            offset += byte_len(word)
            continue
        if ch.isdigit():
            start = pos
            is_float = False
            while pos < n and text[pos].isdigit():
                pos += 1
            if pos + 1 < n and text[pos] == "." and text[pos + 1].isdigit():
                is_float = True
                pos += 1
                while pos < n and text[pos].isdigit():
                    pos += 1
            if pos < n and text[pos] in "eE":
                exp = pos + 1
                if exp < n and text[exp] in "+-":
                    exp += 1
                if exp < n and text[exp].isdigit():
                    is_float = True
                    pos = exp
                    while pos < n and text[pos].isdigit():
                        pos += 1
            word = text[start:pos]
            kind = TokenKind.FLOAT if is_float else TokenKind.INTEGER
            tokens.append(Token(kind, word, offset))
            offset += byte_len(word)
            continue
        if ch in "'\"":
            start_pos = pos
            start_offset = offset
            quote = ch
            pos += 1
            offset += 1
            closed = False
            while pos < n:
                c = text[pos]
                if c == "\\":
                    if pos + 1 >= n or text[pos + 1] not in _ESCAPES:
                        raise LexError("invalid escape sequence", offset)
                    offset += byte_len(text[pos:pos + 2])
                    pos += 2
                    continue
                if c == quote:
                    pos += 1
                    offset += 1
                    closed = True
                    break
                offset += byte_len(c)
                pos += 1
            if not closed:
                raise LexError("unterminated string literal", start_offset)
            tokens.append(Token(TokenKind.TEXT, text[start_pos:pos], start_offset))
            continue
        two = text[pos:pos + 2]
        if two in _TWO_CHAR_SYMBOLS:
            tokens.append(Token(TokenKind.SYMBOL, two, offset))
            pos += 2
            offset += 2
            continue
        if ch in _ONE_CHAR_SYMBOLS:
            tokens.append(Token(TokenKind.SYMBOL, ch, offset))
            pos += 1
            offset += 1
            continue
        raise LexError(f"invalid character {ch!r}", offset)
    return tokens
