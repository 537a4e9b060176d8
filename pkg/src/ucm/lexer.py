"""Tokenizer for `.ucm` sources.

Keywords are context-sensitive: the lexer emits plain IDENT tokens and the
parser matches keyword values, so clause names remain usable as model
identifiers. Labels (``2``, ``2-6a1``) are digit-led and lexed greedily,
which keeps them distinct from identifiers. `//` comments run to end of line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .spans import SourceSpan, position_at


class TokenKind(Enum):
    IDENT = "identifier"
    LABEL = "label"
    NUMBER = "number"
    STRING = "string"
    ARROW = "'->'"
    COLONCOLON = "'::'"
    COLON = "':'"
    COMMA = "','"
    DOT = "'.'"
    DOTDOT = "'..'"
    LBRACE = "'{'"
    RBRACE = "'}'"
    LBRACKET = "'['"
    RBRACKET = "']'"
    STAR = "'*'"
    EOF = "end of file"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan


class LexError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


# Identifiers may contain single hyphens between word parts so multi-word
# keywords (user-goal, interrupt-continue) lex as one token. A hyphen not
# followed by a letter is left for the next token (e.g. `->`).
_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\n]+)
    | (?P<comment>//[^\n]*)
    | (?P<number>\d+\.\d+)
    | (?P<label>\d+(?:-\d+)?(?:[a-z]\d*)*)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<arrow>->)
    | (?P<coloncolon>::)
    | (?P<dotdot>\.\.)
    | (?P<punct>[:,.{}\[\]*])
    """,
    re.VERBOSE,
)

_PUNCT_KINDS = {
    ":": TokenKind.COLON,
    ",": TokenKind.COMMA,
    ".": TokenKind.DOT,
    "{": TokenKind.LBRACE,
    "}": TokenKind.RBRACE,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
    "*": TokenKind.STAR,
}


def normalize(source: str) -> str:
    """CRLF and lone CR become LF so offsets are stable across platforms;
    a leading UTF-8 BOM is dropped."""
    if source.startswith("﻿"):
        source = source[1:]
    return source.replace("\r\n", "\n").replace("\r", "\n")


def tokenize(source: str, file: str) -> list[Token]:
    """Lex LF-normalized source; raises LexError on an unrecognizable character."""
    tokens: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            line, col = position_at(source, pos)
            span = SourceSpan(file, pos, pos + 1, line, col)
            raise LexError(f"unrecognized character {source[pos]!r}", span)
        start, end = m.span()
        group = m.lastgroup
        if group not in ("ws", "comment"):
            line, col = position_at(source, start)
            span = SourceSpan(file, start, end, line, col)
            text = m.group()
            if group == "number":
                kind = TokenKind.NUMBER
            elif group == "label":
                kind = TokenKind.LABEL
            elif group == "ident":
                kind = TokenKind.IDENT
            elif group == "string":
                kind = TokenKind.STRING
            elif group == "arrow":
                kind = TokenKind.ARROW
            elif group == "coloncolon":
                kind = TokenKind.COLONCOLON
            elif group == "dotdot":
                kind = TokenKind.DOTDOT
            else:
                kind = _PUNCT_KINDS[text]
            tokens.append(Token(kind, text, span))
        pos = end
    line, col = position_at(source, n)
    tokens.append(Token(TokenKind.EOF, "", SourceSpan(file, n, n, line, col)))
    return tokens


def string_value(token: Token) -> str:
    """Unquote a STRING token, handling backslash escapes."""
    body = token.text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)
