"""Bras and kets: linear and anti-linear functionals on the (tensor) space.

Every functional is stored as kind + representing vector (Riesz):

    Bra  <phi|(psi) = <phi, psi>     linear in psi
    Ket  |phi>(psi) = <psi, phi>     anti-linear in psi

Single-factor functionals are one-factor instances of the same type.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .config import ModelConfig
from .errors import ContractError, ModelError
from .hilbert import HilbertVector, as_cplx
from .report import CheckReport, max_residual
from .tensor import (
    TensorVector,
    as_tensor,
    canonical_chi,
    check_in_model,
    tensor_product,
    zero_tensor,
)

log = logging.getLogger(__name__)


class Kind(str, Enum):
    BRA = "bra"
    KET = "ket"

    @property
    def dual(self) -> Kind:
        return Kind.KET if self is Kind.BRA else Kind.BRA


@dataclass(frozen=True, eq=False)
class Functional:
    """A bra or ket over the tensor space of `rep`."""
    kind: Kind
    rep: TensorVector

    __array_ufunc__ = None

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def arity(self) -> int:
        return self.rep.arity

    def __call__(self, phi: HilbertVector | TensorVector) -> complex:
        phi = as_tensor(phi)
        if (phi.dim, phi.arity) != (self.dim, self.arity):
            raise ModelError(
                f"{self.kind.value} over (dim={self.dim}, arity={self.arity}) evaluated "
                f"at a vector in (dim={phi.dim}, arity={phi.arity})"
            )
        if self.kind is Kind.BRA:
            return complex(np.vdot(self.rep.dense, phi.dense))
        return complex(np.vdot(phi.dense, self.rep.dense))

    def __add__(self, other: Functional) -> Functional:
        if not isinstance(other, Functional):
            return NotImplemented
        if other.kind is not self.kind:
            raise ContractError(f"cannot add a {self.kind.value} and a {other.kind.value}")
        return Functional(self.kind, self.rep + other.rep)

    def __sub__(self, other: Functional) -> Functional:
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> Functional:
        # (a f)(psi) = a f(psi): a bra's representing vector scales by a*, a ket's by a
        a = as_cplx(scalar)
        factor = a.conjugate() if self.kind is Kind.BRA else a
        return Functional(self.kind, factor * self.rep)

    def __neg__(self) -> Functional:
        return (-1) * self

    def is_zero(self, tol: float) -> bool:
        return self.rep.is_zero(tol)

    def __repr__(self) -> str:
        return f"Functional({self.kind.value}, dim={self.dim}, arity={self.arity})"


def _check_factor(phi: HilbertVector, config: ModelConfig | None) -> None:
    if config is not None and phi.dim != config.dim:
        raise ModelError(f"vector dimension {phi.dim} does not match model dim {config.dim}")


def make_ket(phi: HilbertVector, config: ModelConfig | None = None) -> Functional:
    """|phi>: psi -> <psi, phi>"""
    _check_factor(phi, config)
    return Functional(Kind.KET, as_tensor(phi))


def make_bra(phi: HilbertVector, config: ModelConfig | None = None) -> Functional:
    """<phi|: psi -> <phi, psi>"""
    _check_factor(phi, config)
    return Functional(Kind.BRA, as_tensor(phi))


def conjugate(f: Functional) -> Functional:
    """Swap bra and ket, keeping the representing vector: <phi|(psi) = (|phi>(psi))*"""
    return Functional(f.kind.dual, f.rep)


def composite_ket(phi: TensorVector, config: ModelConfig | None = None) -> Functional:
    if config is not None:
        check_in_model(phi, config)
    return Functional(Kind.KET, phi)


def composite_bra(phi: TensorVector, config: ModelConfig | None = None) -> Functional:
    if config is not None:
        check_in_model(phi, config)
    return Functional(Kind.BRA, phi)


def zero_functional(kind: Kind, dim: int, arity: int) -> Functional:
    return Functional(kind, zero_tensor(dim, arity))


def _common_kind(fs: Sequence[Functional]) -> Kind:
    if not fs:
        raise ModelError("need at least one functional")
    kinds = {f.kind for f in fs}
    if len(kinds) != 1:
        raise ContractError("cannot tensor bras with kets: " + ", ".join(f.kind.value for f in fs))
    return fs[0].kind


def functional_tensor(fs: Sequence[Functional], config: ModelConfig | None = None) -> Functional:
    """f_1 (x) ... (x) f_N, whose value at phi_1 (x) ... (x) phi_N is prod f_i(phi_i).

    Realized by tensoring the representing vectors.
    """
    fs = tuple(fs)
    kind = _common_kind(fs)
    if config is not None:
        arity = sum(f.arity for f in fs)
        if arity != config.factors:
            raise ModelError(f"expected {config.factors} factors in total, got {arity}")
    return Functional(kind, tensor_product(*(f.rep for f in fs)))


def evaluate_product(fs: Sequence[Functional], phi: TensorVector) -> complex:
    """Evaluate f_1 (x) ... (x) f_N at phi from its definition on simple tensors.

    Each single-factor functional sees only its own slot; the weights of phi's
    terms enter linearly for bras and conjugated for kets.
    """
    fs = tuple(fs)
    kind = _common_kind(fs)
    if any(f.arity != 1 for f in fs):
        raise ModelError("evaluate_product takes single-factor functionals")
    if phi.arity != len(fs):
        raise ModelError(f"expected a {len(fs)}-factor vector, got {phi.arity} factors")
    total = 0j
    for term in phi.terms:
        weight = term.weight if kind is Kind.BRA else term.weight.conjugate()
        value = weight
        for f, factor in zip(fs, term.factors):
            value *= f(factor)
        total += value
    return total


def check_identification(
    factors: Sequence[HilbertVector],
    probes: Sequence[TensorVector],
    tol: float,
    name: str = "identification",
) -> CheckReport:
    """|phi_1 (x) ... (x) phi_N> = |phi_1> (x) ... (x) |phi_N>, and the bra analogue.

    The left side is the composite functional of chi(phi_1, ..., phi_N); the
    right side is evaluated twice, from the tensored representing vectors and
    from the definition on simple tensors.
    """
    if not probes:
        return CheckReport.error(name, tol, "no probes given")
    chi = canonical_chi(factors)
    residuals = []
    for make_single, make_composite in ((make_ket, composite_ket), (make_bra, composite_bra)):
        singles = [make_single(phi) for phi in factors]
        lhs = make_composite(chi)
        rhs = functional_tensor(singles)
        for probe in probes:
            value = lhs(probe)
            residuals.append(abs(value - rhs(probe)))
            residuals.append(abs(value - evaluate_product(singles, probe)))
    worst = max_residual(residuals)
    log.debug("identification: N=%d, %d probes, max residual %.3e", len(factors), len(probes), worst)
    return CheckReport.compare(
        name, worst, tol,
        f"N={len(factors)}, {len(probes)} probes, kets and bras",
    )
