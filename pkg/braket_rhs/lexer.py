"""Tokenizer for Dirac-notation expressions.

    |a>          ket of bound vector a
    <a|          bra of bound vector a
    <a|b>        braket sugar, lowered by the parser to <a| applied to |b>
    (x)  ⊗       tensor product
    '    †       dagger
    2  0.5i      real and imaginary decimal literals
    P_sym  U[2,1,3]  identifiers; U[...] takes a 1-based image list

Terminals come from the shared lark grammar; this module turns lark's tokens
into Token values with parsed payloads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any

from lark.exceptions import UnexpectedCharacters

from .errors import LexError
from .grammar import dsl_parser

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
PERMUTATION_RE = re.compile(r"U\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]")


class TokenKind(str, Enum):
    KET = "KET"
    BRA = "BRA"
    BRAKET = "BRAKET"
    IDENT = "IDENT"
    NUMBER = "NUMBER"
    LPAREN = "LPAREN"
    RPAREN = "RPAREN"
    PLUS = "PLUS"
    MINUS = "MINUS"
    STAR = "STAR"
    TENSOR = "TENSOR"
    DAGGER = "DAGGER"
    EOF = "EOF"


# grammar terminal name -> token kind
TERMINAL_KINDS = {
    "KET": TokenKind.KET,
    "BRA": TokenKind.BRA,
    "BRAKET": TokenKind.BRAKET,
    "IDENT": TokenKind.IDENT,
    "PERMUTATION": TokenKind.IDENT,
    "NUMBER": TokenKind.NUMBER,
    "_LPAREN": TokenKind.LPAREN,
    "_RPAREN": TokenKind.RPAREN,
    "_PLUS": TokenKind.PLUS,
    "MINUS": TokenKind.MINUS,
    "_STAR": TokenKind.STAR,
    "_TENSOR": TokenKind.TENSOR,
    "DAGGER": TokenKind.DAGGER,
}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    start: int
    end: int
    value: Any = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __repr__(self) -> str:
        if self.value is None:
            return self.kind.value
        return f"{self.kind.value}({self.value})"


def _number_value(text: str) -> complex:
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text), 0.0)


def _payload(terminal: str, text: str) -> Any:
    if terminal in ("KET", "BRA", "IDENT"):
        return NAME_RE.search(text).group(0)
    if terminal == "BRAKET":
        bra_name, ket_name = NAME_RE.findall(text)
        return (bra_name, ket_name)
    if terminal == "PERMUTATION":
        images = PERMUTATION_RE.fullmatch(text).group(1)
        return "U[" + ",".join(part.strip() for part in images.split(",")) + "]"
    if terminal == "NUMBER":
        return _number_value(text)
    return None


def _lex_error(text: str, exc: UnexpectedCharacters) -> LexError:
    pos = exc.pos_in_stream
    ch = text[pos]
    if ch == "|":
        return LexError("unterminated ket", (pos, len(text)))
    if ch == "<":
        return LexError("unterminated bra", (pos, len(text)))
    return LexError(f"illegal character {ch!r}", (pos, pos + 1))


def tokenize(text: str) -> list[Token]:
    """Split text into tokens, ending with an EOF token.

    Raises LexError on unterminated kets/bras and illegal characters.
    """
    tokens: list[Token] = []
    try:
        for tok in dsl_parser().lex(text):
            tokens.append(Token(
                TERMINAL_KINDS[tok.type], str(tok), tok.start_pos, tok.end_pos,
                _payload(tok.type, str(tok)),
            ))
    except UnexpectedCharacters as exc:
        raise _lex_error(text, exc) from None
    tokens.append(Token(TokenKind.EOF, "", len(text), len(text)))
    return tokens
