"""Single-factor finite-dimensional complex inner-product space.

Scalars are Python/numpy complex numbers. The inner product is
conjugate-linear in the FIRST argument and linear in the second, so that a
ket |phi>(psi) = <psi, phi> comes out anti-linear in psi.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ModelError

Cplx = complex


def as_cplx(value: complex | float | int) -> complex:
    """Coerce to complex, rejecting NaN and infinities."""
    z = complex(value)
    if not cmath.isfinite(z):
        raise ModelError(f"non-finite scalar {value!r}")
    return z


def _frozen_coords(coords: Sequence[complex] | np.ndarray) -> np.ndarray:
    arr = np.array(coords, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ModelError("coordinates must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HilbertVector:
    """Element of the factor space, stored as its coordinates in the standard basis."""
    coords: np.ndarray

    __array_ufunc__ = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _frozen_coords(self.coords))
        if self.coords.size == 0:
            raise ModelError("a HilbertVector needs at least one coordinate")

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    def __add__(self, other: HilbertVector) -> HilbertVector:
        _check_same_dim(self, other)
        return HilbertVector(self.coords + other.coords)

    def __sub__(self, other: HilbertVector) -> HilbertVector:
        _check_same_dim(self, other)
        return HilbertVector(self.coords - other.coords)

    def __rmul__(self, scalar: complex) -> HilbertVector:
        return HilbertVector(as_cplx(scalar) * self.coords)

    def __neg__(self) -> HilbertVector:
        return HilbertVector(-self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __repr__(self) -> str:
        return f"HilbertVector({np.array2string(self.coords, precision=6)})"


def _check_same_dim(u: HilbertVector, v: HilbertVector) -> None:
    if u.dim != v.dim:
        raise ModelError(f"dimension mismatch: {u.dim} vs {v.dim}")


def basis(dim: int, index: int) -> HilbertVector:
    """Standard basis vector e_index of a dim-dimensional factor space."""
    if not 0 <= index < dim:
        raise ModelError(f"basis index {index} out of range for dim {dim}")
    coords = np.zeros(dim, dtype=np.complex128)
    coords[index] = 1.0
    return HilbertVector(coords)


def zero(dim: int) -> HilbertVector:
    return HilbertVector(np.zeros(dim, dtype=np.complex128))


def inner(u: HilbertVector, v: HilbertVector) -> complex:
    """<u, v>: conjugate-linear in u, linear in v."""
    _check_same_dim(u, v)
    return complex(np.vdot(u.coords, v.coords))
