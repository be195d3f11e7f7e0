"""Lark grammar for Dirac-notation expressions.

One grammar serves both stages: tokenize() runs its basic lexer and parse()
feeds the resulting tokens to its LALR table. Terminals with a leading
underscore are dropped from the parse tree.
"""
from __future__ import annotations

from functools import lru_cache

import lark

grammar = r"""
?start: sum

?sum: scaled
    | sum _PLUS scaled      -> add
    | sum MINUS scaled      -> subtract

?scaled: tensored
    | scaled _STAR tensored -> scale

?tensored: applied
    | tensored _TENSOR applied -> tensor

?applied: signed
    | applied daggered      -> apply

?signed: daggered
    | MINUS signed          -> negate

?daggered: atom
    | daggered DAGGER       -> dagger

?atom: KET                  -> ket
    | BRA                   -> bra
    | BRAKET                -> braket
    | IDENT                 -> ident
    | PERMUTATION           -> ident
    | NUMBER                -> number
    | _LPAREN sum _RPAREN

_TENSOR.3: "(x)" | "⊗"
BRAKET.2: /<\s*[A-Za-z_][A-Za-z0-9_]*\s*\|\s*[A-Za-z_][A-Za-z0-9_]*\s*>/
PERMUTATION.2: /U\[\s*[0-9]+(?:\s*,\s*[0-9]+)*\s*\]/
KET: /\|\s*[A-Za-z_][A-Za-z0-9_]*\s*>/
BRA: /<\s*[A-Za-z_][A-Za-z0-9_]*\s*\|/
NUMBER: /(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?(?:i(?![A-Za-z0-9_]))?/
IDENT: /[A-Za-z_][A-Za-z0-9_]*/
DAGGER: "'" | "†"
_LPAREN: "("
_RPAREN: ")"
_PLUS: "+"
MINUS: "-"
_STAR: "*"

%ignore /\s+/
"""


@lru_cache(maxsize=1)
def dsl_parser() -> lark.Lark:
    return lark.Lark(grammar, parser="lalr", lexer="basic")
