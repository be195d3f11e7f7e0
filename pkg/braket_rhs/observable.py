"""Self-adjoint observables on the factor and tensor spaces.

A composite observable is the Kronecker sum A = sum_i I (x) ... (x) A_i (x) ... (x) I
with its factor decomposition retained. Operators act on functionals through
the pullback

    A^(f)(phi) = f(A phi)

which, for Hermitian A, keeps the kind and maps the representing vector to A rep.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Protocol, Sequence

import numpy as np

from .config import DEFAULT_TOL
from .dual import Functional, evaluate_product, functional_tensor
from .errors import ContractError, ModelError
from .report import CheckReport, max_residual
from .tensor import TensorVector

log = logging.getLogger(__name__)


class Operator(Protocol):
    """Anything with a dense matrix on the tensor space of `arity` factors."""

    @property
    def dense(self) -> np.ndarray: ...

    @property
    def dim(self) -> int: ...

    @property
    def arity(self) -> int: ...


def hermitian_asymmetry(matrix: np.ndarray) -> float:
    """max |M - M^dagger|"""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def _square(matrix, what: str) -> np.ndarray:
    arr = np.array(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ModelError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ModelError(f"{what} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _require_hermitian(matrix: np.ndarray, tol: float, what: str) -> None:
    asym = hermitian_asymmetry(matrix)
    if asym > tol:
        raise ContractError(f"{what} is not Hermitian: max asymmetry {asym:.3e}", asymmetry=asym)


@dataclass(frozen=True, eq=False)
class FactorObservable:
    """Hermitian dim x dim matrix acting on one factor."""
    matrix: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _square(self.matrix, "factor observable"))

    @classmethod
    def from_matrix(cls, matrix, tol: float = DEFAULT_TOL, name: str = "factor observable") -> FactorObservable:
        op = cls(matrix)
        _require_hermitian(op.matrix, tol, name)
        return op

    @property
    def dense(self) -> np.ndarray:
        return self.matrix

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class TensorOperator:
    """General operator on the tensor space, e.g. the B of a commuting pair."""
    matrix: np.ndarray
    dim: int
    arity: int

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _square(self.matrix, "tensor operator"))
        if self.matrix.shape[0] != self.dim ** self.arity:
            raise ModelError(
                f"operator of size {self.matrix.shape[0]} does not act on {self.dim}**{self.arity}"
            )

    @classmethod
    def from_matrix(cls, matrix, dim: int, arity: int, tol: float = DEFAULT_TOL,
                    name: str = "tensor operator") -> TensorOperator:
        op = cls(matrix, dim, arity)
        _require_hermitian(op.matrix, tol, name)
        return op

    @property
    def dense(self) -> np.ndarray:
        return self.matrix


@dataclass(frozen=True, eq=False)
class CompositeObservable:
    """A = sum_i A_i-check with the factor observables kept alongside the dense matrix."""
    factor_ops: tuple[FactorObservable, ...]
    dense: np.ndarray

    __array_ufunc__ = None

    @property
    def dim(self) -> int:
        return self.factor_ops[0].dim

    @property
    def arity(self) -> int:
        return len(self.factor_ops)

    def identical_factors(self, tol: float) -> bool:
        first = self.factor_ops[0].matrix
        return all(float(np.max(np.abs(op.matrix - first))) <= tol for op in self.factor_ops[1:])


def embed_factor(op: np.ndarray, slot: int, arity: int) -> np.ndarray:
    """I (x) ... (x) op (x) ... (x) I with op in the given slot."""
    dim = op.shape[0]
    eye = np.eye(dim, dtype=np.complex128)
    return reduce(np.kron, [op if k == slot else eye for k in range(arity)])


def compose_observable(factor_ops: Sequence[FactorObservable | np.ndarray],
                       tol: float = DEFAULT_TOL) -> CompositeObservable:
    """Kronecker sum of the factor observables."""
    ops = tuple(op if isinstance(op, FactorObservable) else FactorObservable(op) for op in factor_ops)
    if not ops:
        raise ModelError("a composite observable needs at least one factor")
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise ModelError(f"factor observables must share one dimension, got {sorted(dims)}")
    for i, op in enumerate(ops):
        _require_hermitian(op.matrix, tol, f"factor observable {i + 1}")
    dense = sum(embed_factor(op.matrix, k, len(ops)) for k, op in enumerate(ops))
    dense = np.asarray(dense, dtype=np.complex128)
    dense.setflags(write=False)
    return CompositeObservable(ops, dense)


def _check_acts_on(op: Operator, t: TensorVector) -> None:
    if (op.dim, op.arity) != (t.dim, t.arity):
        raise ModelError(
            f"operator on (dim={op.dim}, arity={op.arity}) applied to a vector in "
            f"(dim={t.dim}, arity={t.arity})"
        )


def apply_operator(op: Operator, t: TensorVector) -> TensorVector:
    _check_acts_on(op, t)
    return TensorVector.from_dense(op.dense @ t.dense, t.dim, t.arity)


def extend_operator(op: Operator, f: Functional) -> Functional:
    """A^(f), the extension of a Hermitian operator to the dual spaces."""
    return Functional(f.kind, apply_operator(op, f.rep))


def evaluate_extended(op: Operator, f: Functional, phi: TensorVector) -> complex:
    """A^(f)(phi) straight from the definition f(A phi)."""
    return f(apply_operator(op, phi))


def commutator_norm(x: np.ndarray, y: np.ndarray) -> float:
    """max |XY - YX|"""
    comm = x @ y - y @ x
    return float(np.max(np.abs(comm))) if comm.size else 0.0


def check_extension_relation(
    factor_ops: Sequence[FactorObservable],
    f_terms: Sequence[Sequence[Functional]],
    probes: Sequence[TensorVector],
    tol: float,
    name: str = "extension_relation",
) -> CheckReport:
    """A^(f) = (A_1^ (x) I^ + I^ (x) A_2^ + ...)(f) for f = sum_i f_i^1 (x) f_i^2 (x) ...

    The left side pulls f back through the dense Kronecker sum. The right side
    never builds it: each factor observable acts on its own single-factor
    functional and the product is evaluated slot by slot.
    """
    if not probes:
        return CheckReport.error(name, tol, "no probes given")
    if not f_terms:
        return CheckReport.error(name, tol, "empty functional sum")
    a = compose_observable(factor_ops, tol=max(tol, DEFAULT_TOL))
    f = None
    for term in f_terms:
        product = functional_tensor(term)
        f = product if f is None else f + product

    residuals = []
    for phi in probes:
        lhs = evaluate_extended(a, f, phi)
        rhs = 0j
        for term in f_terms:
            for k, op in enumerate(factor_ops):
                moved = [extend_operator(op, g) if j == k else g for j, g in enumerate(term)]
                rhs += evaluate_product(moved, phi)
        residuals.append(abs(lhs - rhs))
    worst = max_residual(residuals)
    kind = f_terms[0][0].kind.value
    log.debug("extension relation: %d terms, %d probes, max residual %.3e", len(f_terms), len(probes), worst)
    return CheckReport.compare(name, worst, tol, f"{kind}, {len(f_terms)} terms, {len(probes)} probes")
