"""N-fold algebraic tensor product of the factor space.

A TensorVector carries two representations: a list of weighted simple
tensors and the dense coordinate array. Dense coordinates use row-major
multi-index order with factor 1 slowest:

    dense[i_1 * d**(N-1) + ... + i_N] = sum_terms weight * prod_k factor_k[i_k]

which is exactly what chained np.kron produces. Equality is always judged on
the dense form; simple-tensor decompositions are not unique and are never
merged automatically.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .config import ModelConfig
from .errors import ModelError
from .hilbert import HilbertVector, as_cplx, basis, inner


@dataclass(frozen=True, eq=False)
class SimpleTensor:
    """weight * factors[0] (x) ... (x) factors[N-1]"""
    weight: complex
    factors: tuple[HilbertVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", as_cplx(self.weight))
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ModelError("a simple tensor needs at least one factor")
        dims = {f.dim for f in self.factors}
        if len(dims) != 1:
            raise ModelError(f"factors of a simple tensor must share one dimension, got {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.factors[0].dim

    @property
    def arity(self) -> int:
        return len(self.factors)

    def flatten(self) -> np.ndarray:
        return self.weight * reduce(np.kron, (f.coords for f in self.factors))


@dataclass(frozen=True, eq=False)
class TensorVector:
    """Element of the tensor space of `arity` copies of a `dim`-dimensional factor.

    Build with TensorVector.from_terms / TensorVector.from_dense or the module
    helpers; the dense array is read-only.
    """
    dim: int
    arity: int
    dense: np.ndarray
    _terms: tuple[SimpleTensor, ...] | None = field(default=None, repr=False)

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        arr = np.array(self.dense, dtype=np.complex128).reshape(-1)
        if arr.size != self.dim ** self.arity:
            raise ModelError(
                f"dense length {arr.size} does not match {self.dim}**{self.arity}"
            )
        if not np.all(np.isfinite(arr)):
            raise ModelError("coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "dense", arr)

    @classmethod
    def from_terms(
        cls,
        terms: Sequence[SimpleTensor],
        dim: int | None = None,
        arity: int | None = None,
    ) -> TensorVector:
        terms = tuple(terms)
        if not terms:
            if dim is None or arity is None:
                raise ModelError("an empty term list needs an explicit dim and arity")
            return zero_tensor(dim, arity)
        dim = terms[0].dim if dim is None else dim
        arity = terms[0].arity if arity is None else arity
        for term in terms:
            if term.dim != dim or term.arity != arity:
                raise ModelError(
                    f"term shape (dim={term.dim}, arity={term.arity}) "
                    f"does not match (dim={dim}, arity={arity})"
                )
        dense = np.zeros(dim ** arity, dtype=np.complex128)
        for term in terms:
            dense += term.flatten()
        return cls(dim=dim, arity=arity, dense=dense, _terms=terms)

    @classmethod
    def from_dense(cls, dense: Sequence[complex] | np.ndarray, dim: int, arity: int) -> TensorVector:
        return cls(dim=dim, arity=arity, dense=dense)

    @property
    def terms(self) -> tuple[SimpleTensor, ...]:
        """Simple-tensor terms; dense-built vectors expand over the product basis."""
        if self._terms is None:
            expanded = tuple(
                SimpleTensor(
                    self.dense[flat],
                    tuple(basis(self.dim, i) for i in np.unravel_index(flat, self.grid_shape)),
                )
                for flat in np.flatnonzero(self.dense)
            )
            object.__setattr__(self, "_terms", expanded)
        return self._terms  # type: ignore[return-value]

    @property
    def explicit_terms(self) -> tuple[SimpleTensor, ...] | None:
        """Terms the vector was built from, or None for dense-built vectors."""
        return self._terms

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.dim,) * self.arity

    def grid(self) -> np.ndarray:
        """Dense coordinates reshaped to one axis per factor."""
        return self.dense.reshape(self.grid_shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.dense))

    def is_zero(self, tol: float) -> bool:
        return self.dense.size == 0 or float(np.max(np.abs(self.dense))) <= tol

    def __add__(self, other: TensorVector) -> TensorVector:
        _check_same_space(self, other)
        terms = None
        if self._terms is not None and other._terms is not None:
            terms = self._terms + other._terms
        return TensorVector(self.dim, self.arity, self.dense + other.dense, terms)

    def __sub__(self, other: TensorVector) -> TensorVector:
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> TensorVector:
        a = as_cplx(scalar)
        terms = None
        if self._terms is not None:
            terms = tuple(SimpleTensor(a * t.weight, t.factors) for t in self._terms)
        return TensorVector(self.dim, self.arity, a * self.dense, terms)

    def __neg__(self) -> TensorVector:
        return (-1) * self

    def __repr__(self) -> str:
        return (
            f"TensorVector(dim={self.dim}, arity={self.arity}, "
            f"dense={np.array2string(self.dense, precision=6)})"
        )


def _check_same_space(s: TensorVector, t: TensorVector) -> None:
    if (s.dim, s.arity) != (t.dim, t.arity):
        raise ModelError(
            f"tensor space mismatch: (dim={s.dim}, arity={s.arity}) vs (dim={t.dim}, arity={t.arity})"
        )


def check_in_model(t: TensorVector, config: ModelConfig) -> None:
    """Raise ModelError unless t lives in the config's N-fold tensor space."""
    if (t.dim, t.arity) != (config.dim, config.factors):
        raise ModelError(
            f"vector in (dim={t.dim}, arity={t.arity}) is not in the model "
            f"(dim={config.dim}, factors={config.factors})"
        )


def zero_tensor(dim: int, arity: int) -> TensorVector:
    return TensorVector(dim, arity, np.zeros(dim ** arity, dtype=np.complex128), ())


def basis_tensor(dim: int, indices: Sequence[int]) -> TensorVector:
    """e_{i_1} (x) ... (x) e_{i_N}"""
    return canonical_chi([basis(dim, i) for i in indices])


def canonical_chi(factors: Sequence[HilbertVector], config: ModelConfig | None = None) -> TensorVector:
    """The canonical multilinear map (phi_1, ..., phi_N) -> phi_1 (x) ... (x) phi_N."""
    factors = tuple(factors)
    if config is not None:
        if len(factors) != config.factors:
            raise ModelError(f"expected {config.factors} factors, got {len(factors)}")
        for f in factors:
            if f.dim != config.dim:
                raise ModelError(f"factor dimension {f.dim} does not match model dim {config.dim}")
    return TensorVector.from_terms([SimpleTensor(1.0, factors)])


def as_tensor(v: HilbertVector | TensorVector) -> TensorVector:
    """View a factor-space vector as a one-factor TensorVector."""
    if isinstance(v, TensorVector):
        return v
    return canonical_chi([v])


def flatten(t: TensorVector | np.ndarray) -> np.ndarray:
    """Dense coordinates of t; arrays pass through unchanged."""
    if isinstance(t, TensorVector):
        return t.dense
    return np.asarray(t, dtype=np.complex128).reshape(-1)


def tensor_product(*vectors: TensorVector) -> TensorVector:
    """a (x) b (x) ...; factor counts add up, term lists multiply out."""
    if not vectors:
        raise ModelError("tensor_product needs at least one operand")
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise ModelError(f"cannot tensor vectors of different factor dimensions {sorted(dims)}")
    dim = vectors[0].dim
    arity = sum(v.arity for v in vectors)
    dense = reduce(np.kron, (v.dense for v in vectors))
    terms = None
    if all(v._terms is not None for v in vectors):
        terms = tuple(
            SimpleTensor(
                np.prod([t.weight for t in combo]),
                tuple(f for t in combo for f in t.factors),
            )
            for combo in itertools.product(*(v._terms for v in vectors))
        )
    return TensorVector(dim, arity, dense, terms)


def tensor_inner(s: TensorVector, t: TensorVector) -> complex:
    """<s, t> on the tensor space (conjugate-linear in s)."""
    _check_same_space(s, t)
    return complex(np.vdot(s.dense, t.dense))


def tensor_inner_by_terms(s: TensorVector, t: TensorVector) -> complex:
    """<s, t> expanded over simple terms with the product rule

        <phi_1 (x) ... , psi_1 (x) ...> = <phi_1, psi_1> ... <phi_N, psi_N>
    """
    _check_same_space(s, t)
    total = 0j
    for a in s.terms:
        for b in t.terms:
            prod = a.weight.conjugate() * b.weight
            for fa, fb in zip(a.factors, b.factors):
                prod *= inner(fa, fb)
            total += prod
    return total
