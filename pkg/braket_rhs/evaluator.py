"""Evaluate parsed Dirac-notation expressions against a set of bindings.

Values are plain library objects: complex scalars, HilbertVector and
TensorVector, Functional (bras and kets), the observable types, and two
builtin operators (the symmetrizers and the permutation operators U[...]).
Every semantic step delegates to the library operation of the same name;
library errors are re-raised as EvalError carrying the span of the node that
failed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Mapping, Union

from .config import DEFAULT_TOL, ModelConfig
from .dual import Functional, Kind, composite_bra, composite_ket, conjugate, make_bra, make_ket
from .errors import BraketError, ConfigError, DslError, EvalError
from .hilbert import HilbertVector
from .lexer import PERMUTATION_RE
from .observable import (
    CompositeObservable,
    FactorObservable,
    TensorOperator,
    apply_operator,
    extend_operator,
)
from .parser import Add, Apply, Ast, BraLeaf, Dagger, KetLeaf, OpLeaf, Scalar, Scale, Tensor, parse_text
from .permutation import (
    Permutation,
    SymmetrizerKind,
    apply_permutation,
    dual_permutation,
    dual_projector,
    projector,
)
from .tensor import TensorVector, as_tensor, tensor_product

log = logging.getLogger(__name__)

BUILTIN_NAMES = frozenset({"P_sym", "P_asym", "A_hat"})


@dataclass(frozen=True)
class ProjectorBuiltin:
    kind: SymmetrizerKind

    def __str__(self) -> str:
        return "P_sym" if self.kind is SymmetrizerKind.SYM else "P_asym"


@dataclass(frozen=True)
class PermutationBuiltin:
    sigma: Permutation

    def __str__(self) -> str:
        return f"U{self.sigma}"


MatrixOperator = Union[FactorObservable, TensorOperator, CompositeObservable]
Value = Union[complex, HilbertVector, TensorVector, Functional, MatrixOperator, ProjectorBuiltin, PermutationBuiltin]

_MATRIX_OPERATORS = (FactorObservable, TensorOperator, CompositeObservable)
_OPERATORS = _MATRIX_OPERATORS + (ProjectorBuiltin, PermutationBuiltin)
_VECTORS = (HilbertVector, TensorVector)


def is_reserved(name: str) -> bool:
    return name in BUILTIN_NAMES or name.startswith("U[")


class Bindings:
    """Read-only name environment: bound vectors and observables plus the builtins.

    A_hat resolves to the model's composite observable; P_sym, P_asym and
    U[...] are always available. Builtin names cannot be rebound.
    """

    def __init__(self, values: Mapping[str, Any] | None = None,
                 composite: CompositeObservable | None = None):
        values = dict(values or {})
        for name in values:
            if is_reserved(name):
                raise ConfigError(f"{name!r} is a reserved builtin name")
        self._values = values
        self.composite = composite

    def __contains__(self, name: str) -> bool:
        return name in self._values or is_reserved(name)

    @property
    def names(self) -> list[str]:
        return sorted(self._values)

    def lookup(self, name: str, span: tuple[int, int]) -> Value:
        if name in self._values:
            return self._values[name]
        if name == "P_sym":
            return ProjectorBuiltin(SymmetrizerKind.SYM)
        if name == "P_asym":
            return ProjectorBuiltin(SymmetrizerKind.ANTISYM)
        if name == "A_hat":
            if self.composite is None:
                raise EvalError("A_hat is unavailable: the model has no composite observable", span)
            return self.composite
        m = PERMUTATION_RE.fullmatch(name)
        if m:
            images = [int(part) for part in m.group(1).split(",")]
            try:
                return PermutationBuiltin(Permutation.from_one_based(images))
            except BraketError as exc:
                raise EvalError(str(exc), span) from exc
        raise EvalError(f"unbound identifier {name!r}", span)


def type_name(value: Any) -> str:
    if isinstance(value, complex):
        return "scalar"
    if isinstance(value, Functional):
        return value.kind.value
    if isinstance(value, _VECTORS):
        return "vector"
    if isinstance(value, ProjectorBuiltin):
        return "projector"
    if isinstance(value, PermutationBuiltin):
        return "permutation"
    if isinstance(value, _MATRIX_OPERATORS):
        return "operator"
    return type(value).__name__


class _Evaluator:
    def __init__(self, bindings: Bindings, model: ModelConfig):
        self.bindings = bindings
        self.model = model

    def eval(self, node: Ast) -> Value:
        handler = getattr(self, "_eval_" + type(node).__name__.lower())
        try:
            return handler(node)
        except DslError:
            raise
        except BraketError as exc:
            raise EvalError(str(exc), node.span) from exc

    def _eval_scalar(self, node: Scalar) -> Value:
        return complex(node.value)

    def _eval_opleaf(self, node: OpLeaf) -> Value:
        return self.bindings.lookup(node.name, node.span)

    def _leaf_vector(self, name: str, span: tuple[int, int]) -> HilbertVector | TensorVector:
        value = self.bindings.lookup(name, span)
        if not isinstance(value, _VECTORS):
            raise EvalError(f"{name!r} is bound to a {type_name(value)}, not a vector", span)
        return value

    def _eval_ketleaf(self, node: KetLeaf) -> Value:
        v = self._leaf_vector(node.name, node.span)
        if isinstance(v, HilbertVector):
            return make_ket(v, self.model)
        return composite_ket(v, self.model)

    def _eval_braleaf(self, node: BraLeaf) -> Value:
        v = self._leaf_vector(node.name, node.span)
        if isinstance(v, HilbertVector):
            return make_bra(v, self.model)
        return composite_bra(v, self.model)

    def _check_arity(self, arity: int, span: tuple[int, int]) -> None:
        if arity > self.model.factors:
            raise EvalError(
                f"tensor of {arity} factors in a {self.model.factors}-factor model", span
            )

    def _eval_tensor(self, node: Tensor) -> Value:
        left, right = self.eval(node.left), self.eval(node.right)
        if isinstance(left, Functional) and isinstance(right, Functional):
            if left.kind is not right.kind:
                raise EvalError(f"cannot tensor a {left.kind.value} with a {right.kind.value}", node.span)
            self._check_arity(left.arity + right.arity, node.span)
            return Functional(left.kind, tensor_product(left.rep, right.rep))
        if isinstance(left, _VECTORS) and isinstance(right, _VECTORS):
            left, right = as_tensor(left), as_tensor(right)
            self._check_arity(left.arity + right.arity, node.span)
            return tensor_product(left, right)
        raise EvalError(f"cannot tensor a {type_name(left)} with a {type_name(right)}", node.span)

    def _eval_add(self, node: Add) -> Value:
        # left-deep chains such as a + b + c + ... are folded without recursion
        chain = []
        while isinstance(node, Add):
            chain.append(node)
            node = node.left
        total = self.eval(node)
        for step in reversed(chain):
            try:
                total = self._add(total, self.eval(step.right), step.span)
            except DslError:
                raise
            except BraketError as exc:
                raise EvalError(str(exc), step.span) from exc
        return total

    def _add(self, left: Value, right: Value, span: tuple[int, int]) -> Value:
        if isinstance(left, complex) and isinstance(right, complex):
            return left + right
        if isinstance(left, Functional) and isinstance(right, Functional):
            return left + right
        if isinstance(left, _VECTORS) and isinstance(right, _VECTORS):
            if isinstance(left, HilbertVector) and isinstance(right, HilbertVector):
                return left + right
            return as_tensor(left) + as_tensor(right)
        raise EvalError(f"cannot add a {type_name(left)} and a {type_name(right)}", span)

    def _scale(self, s: complex, x: Value, span: tuple[int, int]) -> Value:
        if isinstance(x, complex):
            return s * x
        if isinstance(x, (Functional,) + _VECTORS):
            return s * x
        raise EvalError(f"cannot scale a {type_name(x)}", span)

    def _eval_scale(self, node: Scale) -> Value:
        s, x = self.eval(node.scalar), self.eval(node.operand)
        if not isinstance(s, complex):
            if isinstance(x, complex):
                s, x = x, s
            else:
                raise EvalError(f"left operand of '*' must be a scalar, got a {type_name(s)}", node.scalar.span)
        return self._scale(s, x, node.span)

    def _eval_dagger(self, node: Dagger) -> Value:
        x = self.eval(node.operand)
        if isinstance(x, Functional):
            return conjugate(x)
        if isinstance(x, complex):
            return x.conjugate()
        if isinstance(x, PermutationBuiltin):
            return PermutationBuiltin(x.sigma.inverse())
        if isinstance(x, TensorOperator):
            return TensorOperator(x.matrix.conj().T, x.dim, x.arity)
        if isinstance(x, (FactorObservable, CompositeObservable, ProjectorBuiltin)):
            return x
        raise EvalError(f"dagger of a bare {type_name(x)}; write |name> or <name|", node.span)

    def _eval_apply(self, node: Apply) -> Value:
        f, x = self.eval(node.func), self.eval(node.arg)
        if isinstance(f, complex):
            return self._scale(f, x, node.span)
        if isinstance(f, Functional):
            return self._apply_functional(f, x, node.span)
        if isinstance(f, _OPERATORS):
            return self._apply_operator(f, x, node.span)
        raise EvalError(f"a {type_name(f)} cannot be applied", node.span)

    def _apply_functional(self, f: Functional, x: Value, span: tuple[int, int]) -> Value:
        if isinstance(x, Functional):
            if f.kind is Kind.BRA and x.kind is Kind.KET:
                return f(x.rep)
            if f.kind is Kind.KET and x.kind is Kind.BRA:
                raise EvalError("outer products |a><b| are not supported", span)
            raise EvalError(f"cannot apply a {f.kind.value} to a {x.kind.value}", span)
        if isinstance(x, _VECTORS):
            return f(x)
        if isinstance(x, _OPERATORS):
            if f.kind is not Kind.BRA:
                raise EvalError("a ket cannot act on an operator from the left", span)
            return self._act_on_functional(x, f)
        raise EvalError(f"cannot apply a {f.kind.value} to a {type_name(x)}", span)

    def _apply_operator(self, op: Value, x: Value, span: tuple[int, int]) -> Value:
        if isinstance(x, Functional):
            return self._act_on_functional(op, x)
        if isinstance(x, _VECTORS):
            t = as_tensor(x)
            if isinstance(op, ProjectorBuiltin):
                return projector(op.kind, t)
            if isinstance(op, PermutationBuiltin):
                return apply_permutation(op.sigma, t)
            return apply_operator(op, t)
        raise EvalError(f"cannot apply a {type_name(op)} to a {type_name(x)}", span)

    @staticmethod
    def _act_on_functional(op: Value, f: Functional) -> Functional:
        if isinstance(op, ProjectorBuiltin):
            return dual_projector(op.kind, f)
        if isinstance(op, PermutationBuiltin):
            return dual_permutation(op.sigma, f)
        return extend_operator(op, f)


def evaluate(ast: Ast, bindings: Bindings, model: ModelConfig) -> Value:
    """Evaluate an Ast; raises EvalError with the failing node's span."""
    try:
        value = _Evaluator(bindings, model).eval(ast)
    except RecursionError:
        raise EvalError("expression nested too deeply", ast.span) from None
    log.debug("evaluated to %s", type_name(value))
    return value


def evaluate_text(text: str, bindings: Bindings, model: ModelConfig) -> Value:
    return evaluate(parse_text(text), bindings, model)


def _real_text(x: float) -> str:
    return f"{x + 0.0:.12g}"


def complex_text(z: complex) -> str:
    """1+0i style rendering."""
    im = z.imag + 0.0
    sign = "-" if im < 0 else "+"
    return f"{_real_text(z.real)}{sign}{_real_text(abs(im))}i"


def _coords_text(t: TensorVector | HilbertVector) -> str:
    coords = t.dense if isinstance(t, TensorVector) else t.coords
    return "[" + ", ".join(complex_text(complex(c)) for c in coords) + "]"


def describe(value: Value, tol: float = DEFAULT_TOL) -> str:
    """One-line rendering of an evaluation result."""
    if isinstance(value, complex):
        return complex_text(value)
    if isinstance(value, Functional):
        if value.is_zero(tol):
            return "zero functional"
        return f"{value.kind.value} on {value.arity} factor(s): {_coords_text(value.rep)}"
    if isinstance(value, HilbertVector):
        return f"vector {_coords_text(value)}"
    if isinstance(value, TensorVector):
        return f"tensor on {value.arity} factor(s): {_coords_text(value)}"
    if isinstance(value, (ProjectorBuiltin, PermutationBuiltin)):
        return f"operator {value}"
    if isinstance(value, _MATRIX_OPERATORS):
        return f"operator on {value.dim}**{value.arity}"
    return repr(value)
