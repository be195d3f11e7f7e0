"""Symmetric group action on the tensor space and the permutation operators.

U_sigma moves factors between slots: on every simple term, the output factor
in slot k is the input factor sigma(k),

    U_sigma(phi_1 (x) ... (x) phi_N) = phi_sigma(1) (x) ... (x) phi_sigma(N).

With that slot rule sigma -> U_sigma reverses composition order:
U_tau(U_sigma(t)) = U_(sigma o tau)(t). P_c sums over the whole group with a
multiplicative character, so it does not depend on the convention.

Permutations are stored 0-based internally; user-facing text is 1-based.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .dual import Functional, functional_tensor
from .errors import ModelError
from .report import CheckReport, max_residual
from .tensor import SimpleTensor, TensorVector

log = logging.getLogger(__name__)

MAX_GROUP_DEGREE = 8


@dataclass(frozen=True)
class Permutation:
    """A bijection of {0, ..., N-1}; images[k] is the image of k."""
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ModelError(f"{list(images)} is not a permutation of 0..{len(images) - 1}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> Permutation:
        return cls(tuple(i - 1 for i in images))

    @property
    def arity(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k]

    def compose(self, other: Permutation) -> Permutation:
        """self o other: k -> self(other(k))"""
        if other.arity != self.arity:
            raise ModelError(f"cannot compose permutations of degree {self.arity} and {other.arity}")
        return Permutation(tuple(self.images[other.images[k]] for k in range(self.arity)))

    def inverse(self) -> Permutation:
        inv = [0] * self.arity
        for k, image in enumerate(self.images):
            inv[image] = k
        return Permutation(tuple(inv))

    def sign(self) -> int:
        """+1 for even, -1 for odd permutations (via cycle decomposition)."""
        seen = [False] * self.arity
        transpositions = 0
        for start in range(self.arity):
            length = 0
            k = start
            while not seen[k]:
                seen[k] = True
                k = self.images[k]
                length += 1
            if length:
                transpositions += length - 1
        return -1 if transpositions % 2 else 1

    def one_based(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in self.images)

    def __str__(self) -> str:
        return "[" + ",".join(str(i) for i in self.one_based()) + "]"


class SymmetrizerKind(str, Enum):
    """Character of the permutation operator: trivial (bosons) or sign (fermions)."""
    SYM = "sym"
    ANTISYM = "antisym"

    def character(self, sigma: Permutation) -> int:
        return 1 if self is SymmetrizerKind.SYM else sigma.sign()


@lru_cache(maxsize=None)
def enumerate_group(n: int) -> tuple[Permutation, ...]:
    """All n! permutations in lexicographic order."""
    if not 1 <= n <= MAX_GROUP_DEGREE:
        raise ModelError(f"group degree must be in 1..{MAX_GROUP_DEGREE}, got {n}")
    group = tuple(Permutation(p) for p in itertools.permutations(range(n)))
    log.debug("enumerated S_%d: %d elements", n, len(group))
    return group


def _check_arity(sigma: Permutation, t: TensorVector) -> None:
    if sigma.arity != t.arity:
        raise ModelError(f"permutation of degree {sigma.arity} applied to a {t.arity}-factor vector")


def apply_permutation(sigma: Permutation, t: TensorVector) -> TensorVector:
    """U_sigma(t); simple terms are permuted along with the dense form."""
    _check_arity(sigma, t)
    dense = np.transpose(t.grid(), sigma.images).reshape(-1)
    terms = None
    if t.explicit_terms is not None:
        terms = tuple(
            SimpleTensor(term.weight, tuple(term.factors[sigma(k)] for k in range(sigma.arity)))
            for term in t.explicit_terms
        )
    return TensorVector(t.dim, t.arity, dense, terms)


def projector(c: SymmetrizerKind, t: TensorVector) -> TensorVector:
    """P_c(t) = (1/N!) sum_sigma c(sigma) U_sigma(t)"""
    grid = t.grid()
    acc = np.zeros_like(grid)
    group = enumerate_group(t.arity)
    for sigma in group:
        acc += c.character(sigma) * np.transpose(grid, sigma.images)
    return TensorVector.from_dense(acc.reshape(-1) / len(group), t.dim, t.arity)


def permutation_matrix(sigma: Permutation, dim: int) -> np.ndarray:
    """Dense matrix of U_sigma on the dim**N coordinate space."""
    n = sigma.arity
    size = dim ** n
    index = np.transpose(np.arange(size).reshape((dim,) * n), sigma.images).reshape(-1)
    matrix = np.zeros((size, size), dtype=np.complex128)
    matrix[np.arange(size), index] = 1.0
    return matrix


def projector_matrix(c: SymmetrizerKind, dim: int, n: int) -> np.ndarray:
    group = enumerate_group(n)
    total = sum(c.character(sigma) * permutation_matrix(sigma, dim) for sigma in group)
    return total / len(group)


def projector_rank(c: SymmetrizerKind, dim: int, n: int) -> int:
    """Rank of P_c, counting eigenvalues above 1/2 (the spectrum is {0, 1})."""
    eigenvalues = np.linalg.eigvalsh(projector_matrix(c, dim, n))
    return int(np.count_nonzero(eigenvalues > 0.5))


def dual_permutation(sigma: Permutation, f: Functional) -> Functional:
    """The pullback f o U_sigma; U_sigma is unitary, so rep -> U_sigma^-1 rep."""
    return Functional(f.kind, apply_permutation(sigma.inverse(), f.rep))


def dual_projector(c: SymmetrizerKind, f: Functional) -> Functional:
    """P~_c(f) with P~_c(f)(phi) = f(P_c phi), for bras and kets alike.

    P_c is self-adjoint, so the representing vector simply becomes P_c(rep).
    """
    return Functional(f.kind, projector(c, f.rep))


def explicit_symmetrized_product(c: SymmetrizerKind, fs: Sequence[Functional]) -> Functional:
    """(1/N!) sum_sigma c(sigma) f_sigma(1) (x) ... (x) f_sigma(N), term by term."""
    fs = tuple(fs)
    group = enumerate_group(len(fs))
    total = None
    for sigma in group:
        term = (c.character(sigma) / len(group)) * functional_tensor([fs[sigma(k)] for k in range(len(fs))])
        total = term if total is None else total + term
    return total  # type: ignore[return-value]


def dual_projector_check(
    c: SymmetrizerKind,
    f: Functional,
    probes: Sequence[TensorVector],
    tol: float,
    name: str = "dual_projector",
) -> CheckReport:
    """Definitional f(P_c phi) against the representation shortcut, on every probe."""
    shortcut = dual_projector(c, f)
    worst = max_residual(abs(f(projector(c, phi)) - shortcut(phi)) for phi in probes)
    return CheckReport.compare(name, worst, tol, f"{c.value} {f.kind.value}, {len(probes)} probes")


class Membership(NamedTuple):
    member: bool
    residual: float


def is_in_symmetric_space(f: Functional, c: SymmetrizerKind, tol: float) -> Membership:
    """f lies in the image of P~_c iff it is a fixed point of P~_c."""
    diff = dual_projector(c, f).rep.dense - f.rep.dense
    residual = float(np.max(np.abs(diff))) if diff.size else 0.0
    return Membership(residual <= tol, residual)


