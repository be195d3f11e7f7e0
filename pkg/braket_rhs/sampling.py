"""Random vectors, functionals and operators for the property suites."""
from __future__ import annotations

from functools import reduce

import numpy as np

from .dual import Functional, Kind
from .hilbert import HilbertVector
from .observable import CompositeObservable, FactorObservable, TensorOperator, compose_observable, embed_factor
from .tensor import SimpleTensor, TensorVector


def random_scalar(rng: np.random.Generator) -> complex:
    return complex(rng.normal(), rng.normal())


def random_coords(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_hilbert_vector(rng: np.random.Generator, dim: int, normalize: bool = False) -> HilbertVector:
    coords = random_coords(rng, dim)
    if normalize:
        coords = coords / np.linalg.norm(coords)
    return HilbertVector(coords)


def random_simple_tensor(rng: np.random.Generator, dim: int, arity: int) -> SimpleTensor:
    return SimpleTensor(
        random_scalar(rng),
        tuple(random_hilbert_vector(rng, dim) for _ in range(arity)),
    )


def random_tensor_vector(rng: np.random.Generator, dim: int, arity: int, max_terms: int = 5) -> TensorVector:
    """Sum of 1..max_terms random simple tensors."""
    count = int(rng.integers(1, max_terms + 1))
    return TensorVector.from_terms([random_simple_tensor(rng, dim, arity) for _ in range(count)])


def random_probes(rng: np.random.Generator, dim: int, arity: int, count: int) -> list[TensorVector]:
    return [random_tensor_vector(rng, dim, arity) for _ in range(count)]


def random_functional(rng: np.random.Generator, kind: Kind, dim: int, arity: int) -> Functional:
    return Functional(kind, random_tensor_vector(rng, dim, arity))


def random_single_functionals(rng: np.random.Generator, kind: Kind, dim: int, count: int) -> list[Functional]:
    return [Functional(kind, TensorVector.from_dense(random_coords(rng, dim), dim, 1)) for _ in range(count)]


def random_functional_terms(
    rng: np.random.Generator, kind: Kind, dim: int, arity: int, n_terms: int,
) -> list[list[Functional]]:
    """Terms of f = sum_i f_i^1 (x) ... (x) f_i^N, all of one kind."""
    return [random_single_functionals(rng, kind, dim, arity) for _ in range(n_terms)]


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = random_coords(rng, dim * dim).reshape(dim, dim)
    return (m + m.conj().T) / 2


def random_factor_observable(rng: np.random.Generator, dim: int) -> FactorObservable:
    return FactorObservable(random_hermitian(rng, dim))


def random_commuting_operator(rng: np.random.Generator, a: CompositeObservable) -> TensorOperator:
    """Real polynomial in A and in the embedded factor observables; always commutes with A."""
    size = a.dim ** a.arity
    embedded = [embed_factor(op.matrix, k, a.arity) for k, op in enumerate(a.factor_ops)]
    generators = [a.dense] + embedded
    b = rng.normal() * np.eye(size, dtype=np.complex128)
    for _ in range(int(rng.integers(1, 4))):
        degree = int(rng.integers(1, 3))
        chosen = [generators[int(rng.integers(len(generators)))] for _ in range(degree)]
        b = b + rng.normal() * reduce(np.matmul, chosen)
    b = (b + b.conj().T) / 2
    return TensorOperator(b, a.dim, a.arity)


def random_tensor_operator(rng: np.random.Generator, dim: int, arity: int) -> TensorOperator:
    """Random Hermitian operator on the tensor space; generically fails to commute with A."""
    return TensorOperator(random_hermitian(rng, dim ** arity), dim, arity)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(random_coords(rng, dim * dim).reshape(dim, dim))
    # fix column phases so the distribution does not depend on the QR routine
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_degenerate_observable(rng: np.random.Generator, dim: int) -> FactorObservable:
    """Random eigenbasis with eigenvalue 1 doubly degenerate (the whole space when dim is 2)."""
    values = np.array([1.0, 1.0, 0.0][:dim] + [0.0] * max(0, dim - 3))
    u = random_unitary(rng, dim)
    m = u @ np.diag(values) @ u.conj().T
    return FactorObservable((m + m.conj().T) / 2)


def random_composite(rng: np.random.Generator, dim: int, arity: int, variant: str = "generic") -> CompositeObservable:
    """variant: "generic" (independent factors), "identical" or "degenerate"."""
    if variant == "identical":
        op = random_factor_observable(rng, dim)
        ops = [op] * arity
    elif variant == "degenerate":
        ops = [random_degenerate_observable(rng, dim)] + [random_factor_observable(rng, dim) for _ in range(arity - 1)]
    else:
        ops = [random_factor_observable(rng, dim) for _ in range(arity)]
    return compose_observable(ops)
