"""Parser for Dirac-notation expressions.

Binding, loosest first (the lark grammar in grammar.py):

    sum      := scaled (("+" | "-") scaled)*
    scaled   := tensored ("*" tensored)*
    tensored := applied ("(x)" applied)*
    applied  := signed daggered*          juxtaposition, left-associative
    signed   := "-" signed | daggered
    daggered := atom "'"*
    atom     := KET | BRA | BRAKET | IDENT | NUMBER | "(" sum ")"

Tokens from tokenize() are fed to the LALR table one at a time, so every
syntax error is reported at the offending token. Spans are carried on every
node but excluded from equality, so two parses of differently spaced text
compare equal.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import lark
from lark.exceptions import UnexpectedInput
from lark.visitors import Transformer_NonRecursive

from .errors import ParseError
from .grammar import dsl_parser
from .lexer import Token, TokenKind, tokenize

log = logging.getLogger(__name__)

Span = tuple[int, int]

_NO_SPAN: Span = (0, 0)


@dataclass(frozen=True)
class KetLeaf:
    name: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class BraLeaf:
    name: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class OpLeaf:
    """Any bare identifier: a bound vector, an observable or a builtin."""
    name: str
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Scalar:
    value: complex
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Tensor:
    left: Ast
    right: Ast
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Apply:
    func: Ast
    arg: Ast
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Add:
    left: Ast
    right: Ast
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Scale:
    scalar: Ast
    operand: Ast
    span: Span = field(default=_NO_SPAN, compare=False)


@dataclass(frozen=True)
class Dagger:
    operand: Ast
    span: Span = field(default=_NO_SPAN, compare=False)


Ast = Union[KetLeaf, BraLeaf, OpLeaf, Scalar, Tensor, Apply, Add, Scale, Dagger]

# token kind -> grammar terminal fed to the LALR table
_TERMINALS = {
    TokenKind.KET: "KET",
    TokenKind.BRA: "BRA",
    TokenKind.BRAKET: "BRAKET",
    TokenKind.IDENT: "IDENT",
    TokenKind.NUMBER: "NUMBER",
    TokenKind.LPAREN: "_LPAREN",
    TokenKind.RPAREN: "_RPAREN",
    TokenKind.PLUS: "_PLUS",
    TokenKind.MINUS: "MINUS",
    TokenKind.STAR: "_STAR",
    TokenKind.TENSOR: "_TENSOR",
    TokenKind.DAGGER: "DAGGER",
}


def _join(a: Ast, b: Ast) -> Span:
    return (a.span[0], b.span[1])


class _AstBuilder(Transformer_NonRecursive):
    """Turns the lark tree into Ast nodes; terminals resolve back to Tokens by start offset."""

    def __init__(self, tokens: dict[int, Token]):
        super().__init__()
        self.tokens = tokens

    def _token(self, t: lark.Token) -> Token:
        return self.tokens[t.start_pos]

    def ket(self, children) -> Ast:
        tok = self._token(children[0])
        return KetLeaf(tok.value, tok.span)

    def bra(self, children) -> Ast:
        tok = self._token(children[0])
        return BraLeaf(tok.value, tok.span)

    def braket(self, children) -> Ast:
        tok = self._token(children[0])
        bra_name, ket_name = tok.value
        return Apply(BraLeaf(bra_name, tok.span), KetLeaf(ket_name, tok.span), tok.span)

    def ident(self, children) -> Ast:
        tok = self._token(children[0])
        return OpLeaf(tok.value, tok.span)

    def number(self, children) -> Ast:
        tok = self._token(children[0])
        return Scalar(tok.value, tok.span)

    def dagger(self, children) -> Ast:
        node, tok = children[0], self._token(children[1])
        return Dagger(node, (node.span[0], tok.end))

    def negate(self, children) -> Ast:
        minus, operand = self._token(children[0]), children[1]
        span = (minus.start, operand.span[1])
        if isinstance(operand, Scalar):
            return Scalar(-operand.value, span)
        return Scale(Scalar(-1 + 0j, minus.span), operand, span)

    def apply(self, children) -> Ast:
        func, arg = children
        return Apply(func, arg, _join(func, arg))

    def tensor(self, children) -> Ast:
        left, right = children
        return Tensor(left, right, _join(left, right))

    def scale(self, children) -> Ast:
        scalar, operand = children
        return Scale(scalar, operand, _join(scalar, operand))

    def add(self, children) -> Ast:
        left, right = children
        return Add(left, right, _join(left, right))

    def subtract(self, children) -> Ast:
        left, minus, right = children[0], self._token(children[1]), children[2]
        negated = Scale(Scalar(-1 + 0j, minus.span), right, (minus.start, right.span[1]))
        return Add(left, negated, _join(left, negated))


def _unexpected(tok: Token) -> ParseError:
    if tok.kind is TokenKind.EOF:
        return ParseError("unexpected end of input", tok.span)
    return ParseError(f"unexpected {tok.text!r}", tok.span)


def _feed(tokens: list[Token]) -> lark.Tree:
    # tokens are fed by hand, the lexer never runs
    interactive = dsl_parser().parse_interactive("")
    open_parens: list[Token] = []
    last: lark.Token | None = None
    for tok in tokens:
        if tok.kind is TokenKind.EOF:
            break
        last = lark.Token(
            _TERMINALS[tok.kind], tok.text,
            start_pos=tok.start, line=1, column=tok.start + 1,
            end_line=1, end_column=tok.end + 1, end_pos=tok.end,
        )
        try:
            interactive.feed_token(last)
        except UnexpectedInput:
            raise _unexpected(tok) from None
        if tok.kind is TokenKind.LPAREN:
            open_parens.append(tok)
        elif tok.kind is TokenKind.RPAREN:
            open_parens.pop()
    try:
        return interactive.feed_eof(last)
    except UnexpectedInput as exc:
        if open_parens and "_RPAREN" in getattr(exc, "expected", ()):
            raise ParseError("unclosed '('", open_parens[-1].span) from None
        raise _unexpected(tokens[-1]) from None


def parse(tokens: list[Token]) -> Ast:
    """Build the Ast for a token list produced by tokenize()."""
    if not tokens or tokens[-1].kind is not TokenKind.EOF:
        end = tokens[-1].end if tokens else 0
        tokens = list(tokens) + [Token(TokenKind.EOF, "", end, end)]
    if tokens[0].kind is TokenKind.EOF:
        raise ParseError("empty expression", tokens[0].span)
    try:
        tree = _feed(tokens)
        node = _AstBuilder({t.start: t for t in tokens}).transform(tree)
    except RecursionError:
        raise ParseError("expression nested too deeply", (tokens[0].start, tokens[-1].end)) from None
    log.debug("parsed %d tokens into %s", len(tokens) - 1, type(node).__name__)
    return node


def parse_text(text: str) -> Ast:
    return parse(tokenize(text))


def _number_text(value: float) -> str:
    # repr round-trips exactly and always lexes as a NUMBER
    return repr(abs(value))


def _scalar_text(value: complex) -> str:
    re, im = value.real, value.imag
    if im == 0:
        body, negative = _number_text(re), re < 0
    elif re == 0:
        body, negative = _number_text(im) + "i", im < 0
    else:
        return f"({_scalar_text(complex(re, 0))} + {_scalar_text(complex(0, im))})"
    return f"(-{body})" if negative else body


def pretty_print(node: Ast) -> str:
    """Fully parenthesized text that parses back to an equal Ast."""
    if isinstance(node, KetLeaf):
        return f"|{node.name}>"
    if isinstance(node, BraLeaf):
        return f"<{node.name}|"
    if isinstance(node, OpLeaf):
        return node.name
    if isinstance(node, Scalar):
        return _scalar_text(node.value)
    if isinstance(node, Tensor):
        return f"({pretty_print(node.left)} (x) {pretty_print(node.right)})"
    if isinstance(node, Apply):
        return f"({pretty_print(node.func)} {pretty_print(node.arg)})"
    if isinstance(node, Add):
        return f"({pretty_print(node.left)} + {pretty_print(node.right)})"
    if isinstance(node, Scale):
        return f"({pretty_print(node.scalar)} * {pretty_print(node.operand)})"
    if isinstance(node, Dagger):
        return f"{pretty_print(node.operand)}'"
    raise TypeError(f"not an Ast node: {node!r}")
