"""Spectral decomposition of composite observables and the checks built on it.

The generalized eigenvectors of A = sum_i A_i-check are the product vectors
e^1_(lambda_1, k_1) (x) ... (x) e^N_(lambda_N, k_N) of factor eigenvectors. In
finite dimension the spectral measures are counting measures: every pair has
weight 1 and the spectral integral is a plain sum over all d**N pairs.

Ordering and phase are fixed so decompositions are reproducible:

- factor eigenvalues ascending; near-equal eigenvalues (within
  DEGENERACY_RTOL * (1 + |lambda|)) form one eigenspace sharing one label;
- inside a degenerate eigenspace the basis is Gram-Schmidt of the projected
  standard basis vectors, in ascending basis index;
- every factor eigenvector has its first largest-modulus component real
  and positive;
- product pairs are enumerated row-major, factor 1 slowest.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .dual import Functional, Kind, composite_bra, composite_ket
from .errors import ModelError, NumericError, PreconditionError
from .hilbert import HilbertVector, inner
from .observable import (
    CompositeObservable,
    FactorObservable,
    Operator,
    apply_operator,
    commutator_norm,
    extend_operator,
)
from .permutation import SymmetrizerKind, dual_projector, projector_matrix
from .report import CheckReport, combine, max_residual
from .tensor import TensorVector, canonical_chi, tensor_inner

log = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-9

# Gram-Schmidt acceptance threshold for projected basis vectors
_GS_THRESHOLD = 1e-6


@dataclass(frozen=True)
class FactorEigenbasis:
    """Orthonormal eigenbasis of one factor observable."""
    values: tuple[float, ...]
    mult_indices: tuple[int, ...]
    vectors: tuple[HilbertVector, ...]

    @property
    def spectrum(self) -> tuple[float, ...]:
        return tuple(dict.fromkeys(self.values))


@dataclass(frozen=True, eq=False)
class GeneralizedEigenpair:
    lambdas: tuple[float, ...]
    mult_indices: tuple[int, ...]
    lambda_sum: float
    factor_vectors: tuple[HilbertVector, ...]
    ket: Functional
    bra: Functional
    weight: float = 1.0

    @property
    def rep(self) -> TensorVector:
        return self.ket.rep

    @property
    def label(self) -> tuple[tuple[float, int], ...]:
        return tuple(zip(self.lambdas, self.mult_indices))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    observable: CompositeObservable
    factor_bases: tuple[FactorEigenbasis, ...]
    pairs: tuple[GeneralizedEigenpair, ...]
    groups: dict[float, tuple[int, ...]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.observable.dim

    @property
    def arity(self) -> int:
        return self.observable.arity

    @property
    def spectrum(self) -> tuple[float, ...]:
        return tuple(self.groups)

    def rep_matrix(self) -> np.ndarray:
        """Columns are the representing vectors of the pairs, in pair order."""
        return np.column_stack([p.rep.dense for p in self.pairs])


def _cluster(values: Sequence[float]) -> list[list[int]]:
    """Group indices of ascending values whose gap to the cluster start is within tolerance."""
    clusters: list[list[int]] = []
    start = None
    for i, value in enumerate(values):
        if start is not None and value - start <= DEGENERACY_RTOL * (1.0 + abs(value)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
            start = value
    return clusters


def _fix_phase(v: np.ndarray) -> np.ndarray:
    moduli = np.abs(v)
    pivot = int(np.flatnonzero(moduli >= moduli.max() - 1e-9)[0])
    return v * (np.conj(v[pivot]) / moduli[pivot])


def _canonical_eigenspace_basis(columns: np.ndarray) -> list[np.ndarray]:
    """Deterministic orthonormal basis of span(columns) from projected e_0, e_1, ..."""
    m = columns.shape[1]
    proj = columns @ columns.conj().T
    accepted: list[np.ndarray] = []
    for j in range(proj.shape[0]):
        if len(accepted) == m:
            break
        v = proj[:, j].copy()
        for _ in range(2):
            for u in accepted:
                v -= np.vdot(u, v) * u
        norm = np.linalg.norm(v)
        if norm > _GS_THRESHOLD:
            accepted.append(v / norm)
    if len(accepted) < m:
        log.warning("projected basis lost rank in a %d-fold eigenspace, using solver vectors", m)
        q, _ = np.linalg.qr(columns)
        accepted = [q[:, k] for k in range(m)]
    return [_fix_phase(v) for v in accepted]


def diagonalize_factor(op: FactorObservable) -> FactorEigenbasis:
    """Eigenbasis of one factor with the ordering and phase convention above."""
    try:
        w, v = scipy.linalg.eigh(op.matrix)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"eigensolver failed: {e}") from e
    values: list[float] = []
    mults: list[int] = []
    vectors: list[HilbertVector] = []
    for cluster in _cluster(w):
        label = float(np.mean(w[cluster]))
        for k, vec in enumerate(_canonical_eigenspace_basis(v[:, cluster]), start=1):
            values.append(label)
            mults.append(k)
            vectors.append(HilbertVector(vec))
    return FactorEigenbasis(tuple(values), tuple(mults), tuple(vectors))


def _group_sums(sums: Sequence[float]) -> dict[float, tuple[int, ...]]:
    order = sorted(range(len(sums)), key=lambda i: (sums[i], i))
    groups: dict[float, tuple[int, ...]] = {}
    for cluster in _cluster([sums[i] for i in order]):
        members = tuple(sorted(order[i] for i in cluster))
        groups[sums[order[cluster[0]]]] = members
    return groups


def spectral_decompose(a: CompositeObservable) -> SpectralDecomposition:
    """All generalized eigenpairs of A, built from the factor eigenbases."""
    bases = tuple(diagonalize_factor(op) for op in a.factor_ops)
    scale = 1.0 + float(np.max(np.abs(a.dense))) if a.dense.size else 1.0
    pairs = []
    for combo in itertools.product(*(range(len(b.values)) for b in bases)):
        lambdas = tuple(b.values[i] for b, i in zip(bases, combo))
        vectors = tuple(b.vectors[i] for b, i in zip(bases, combo))
        rep = canonical_chi(vectors)
        lambda_sum = float(sum(lambdas))
        residual = float(np.linalg.norm(a.dense @ rep.dense - lambda_sum * rep.dense))
        if residual > 1e-6 * scale:
            raise NumericError(f"eigen-residual {residual:.3e} for labels {lambdas}")
        pairs.append(GeneralizedEigenpair(
            lambdas=lambdas,
            mult_indices=tuple(b.mult_indices[i] for b, i in zip(bases, combo)),
            lambda_sum=lambda_sum,
            factor_vectors=vectors,
            ket=composite_ket(rep),
            bra=composite_bra(rep),
        ))
    groups = _group_sums([p.lambda_sum for p in pairs])
    log.debug("decomposed %d-factor observable: %d pairs, %d distinct sums", a.arity, len(pairs), len(groups))
    return SpectralDecomposition(a, bases, tuple(pairs), groups)


def _check_space(sd: SpectralDecomposition, phi: TensorVector) -> None:
    if (phi.dim, phi.arity) != (sd.dim, sd.arity):
        raise ModelError(
            f"vector in (dim={phi.dim}, arity={phi.arity}) does not match the decomposition "
            f"(dim={sd.dim}, arity={sd.arity})"
        )


def expand_ket(sd: SpectralDecomposition, phi: TensorVector) -> list[tuple[int, complex]]:
    """Coefficients <lambda_1| (x) ... (x) <lambda_N| |phi> of |phi>."""
    _check_space(sd, phi)
    return [(p, pair.bra(phi)) for p, pair in enumerate(sd.pairs)]


def expand_bra(sd: SpectralDecomposition, phi: TensorVector) -> list[tuple[int, complex]]:
    """Coefficients <phi| |lambda_1> (x) ... (x) |lambda_N> of <phi|."""
    return [(p, c.conjugate()) for p, c in expand_ket(sd, phi)]


def expand_image(sd: SpectralDecomposition, phi: TensorVector) -> list[tuple[int, complex]]:
    """Coefficients of |A phi>: each ket coefficient times its lambda_sum."""
    return [(p, sd.pairs[p].lambda_sum * c) for p, c in expand_ket(sd, phi)]


def expand_product_ket(sd: SpectralDecomposition, phis: Sequence[HilbertVector]) -> list[tuple[int, complex]]:
    """Coefficients of |phi_1> (x) ... (x) |phi_N> as products <lambda_i|phi_i>."""
    if len(phis) != sd.arity:
        raise ModelError(f"expected {sd.arity} factors, got {len(phis)}")
    out = []
    for p, pair in enumerate(sd.pairs):
        coeff = 1 + 0j
        for e, phi in zip(pair.factor_vectors, phis):
            coeff *= inner(e, phi)
        out.append((p, coeff))
    return out


def expand_product_bra(sd: SpectralDecomposition, phis: Sequence[HilbertVector]) -> list[tuple[int, complex]]:
    return [(p, c.conjugate()) for p, c in expand_product_ket(sd, phis)]


def reconstruct(sd: SpectralDecomposition, coefficients: Sequence[tuple[int, complex]],
                kind: Kind = Kind.KET) -> Functional:
    """sum_p c_p |p> for kets, sum_p c_p <p| for bras."""
    dense = np.zeros(sd.dim ** sd.arity, dtype=np.complex128)
    for p, c in coefficients:
        weight = c if kind is Kind.KET else np.conj(c)
        dense += weight * sd.pairs[p].rep.dense
    return Functional(kind, TensorVector.from_dense(dense, sd.dim, sd.arity))


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def expansion_check(sd: SpectralDecomposition, phi: TensorVector, tol: float,
                    name: str = "expansion") -> CheckReport:
    """|phi>, |A phi>, <phi| and <A phi| rebuilt from their spectral expansions."""
    a_phi = apply_operator(sd.observable, phi)
    image_bra = [(p, c.conjugate()) for p, c in expand_image(sd, phi)]
    cases = [
        (reconstruct(sd, expand_ket(sd, phi), Kind.KET), phi),
        (reconstruct(sd, expand_image(sd, phi), Kind.KET), a_phi),
        (reconstruct(sd, expand_bra(sd, phi), Kind.BRA), phi),
        (reconstruct(sd, image_bra, Kind.BRA), a_phi),
    ]
    worst = max_residual(_max_abs(f.rep.dense - target.dense) for f, target in cases)
    return CheckReport.compare(name, worst, tol, "ket, A-ket, bra, A-bra expansions")


def parseval_check(sd: SpectralDecomposition, phi: TensorVector, psi: TensorVector, tol: float,
                   name: str = "parseval") -> CheckReport:
    """<phi, psi> = sum_p c_p(phi)* c_p(psi) and <phi, A psi> = sum_p lambda_p c_p(phi)* c_p(psi)."""
    cphi = np.array([c for _, c in expand_ket(sd, phi)])
    cpsi = np.array([c for _, c in expand_ket(sd, psi)])
    sums = np.array([pair.lambda_sum for pair in sd.pairs])
    plain = abs(tensor_inner(phi, psi) - complex(np.sum(cphi.conj() * cpsi)))
    a_psi = apply_operator(sd.observable, psi)
    weighted = abs(tensor_inner(phi, a_psi) - complex(np.sum(sums * cphi.conj() * cpsi)))
    return CheckReport.compare(
        name, max(plain, weighted), tol,
        f"plain {plain:.3e}, weighted {weighted:.3e}",
    )


def completeness_check(sd: SpectralDecomposition, tol: float, name: str = "completeness") -> CheckReport:
    """sum_p |p><p| = I"""
    reps = sd.rep_matrix()
    total = reps @ reps.conj().T
    residual = _max_abs(total - np.eye(total.shape[0]))
    return CheckReport.compare(name, residual, tol, f"{len(sd.pairs)} pairs")


def orthonormality_check(sd: SpectralDecomposition, tol: float, name: str = "orthonormality") -> CheckReport:
    """<p|(rep_q) = delta_pq per eigen-label, including distinct labels with equal sums."""
    reps = sd.rep_matrix()
    gram = reps.conj().T @ reps
    residual = _max_abs(gram - np.eye(gram.shape[0]))
    same_sum = 0.0
    for members in sd.groups.values():
        for p, q in itertools.combinations(members, 2):
            same_sum = max(same_sum, abs(gram[p, q]))
    return CheckReport.compare(
        name, residual, tol,
        f"{len(sd.pairs)} labels, max overlap within equal sums {same_sum:.3e}",
    )


def eigenequation_check(sd: SpectralDecomposition, a: Operator, probes: Sequence[TensorVector], tol: float,
                        name: str = "eigenequation") -> CheckReport:
    """<p|(A phi) = lambda <p|(phi), |p>(A phi) = lambda |p>(phi), and A^|p> = lambda |p>."""
    if not probes:
        return CheckReport.error(name, tol, "no probes given")
    residuals = []
    images = [apply_operator(a, phi) for phi in probes]
    for pair in sd.pairs:
        lam = pair.lambda_sum
        extended = [extend_operator(a, pair.ket), extend_operator(a, pair.bra)]
        for phi, a_phi in zip(probes, images):
            for f, ext in zip((pair.ket, pair.bra), extended):
                value = f(phi)
                residuals.append(abs(f(a_phi) - lam * value))
                residuals.append(abs(ext(phi) - lam * value))
    worst = max_residual(residuals)
    return CheckReport.compare(name, worst, tol, f"{len(sd.pairs)} pairs x {len(probes)} probes")


def _factor_sumset(sd: SpectralDecomposition) -> list[float]:
    spectra = []
    for op in sd.observable.factor_ops:
        w = np.linalg.eigvalsh(op.matrix)
        spectra.append([float(np.mean(w[c])) for c in _cluster(w)])
    sums = sorted(float(sum(combo)) for combo in itertools.product(*spectra))
    return [sums[c[0]] for c in _cluster(sums)]


def spectral_set_check(sd: SpectralDecomposition, tol: float, name: str = "spectral_set") -> CheckReport:
    """Sp(A) equals the sumset Sp(A_1) + ... + Sp(A_N)."""
    expected = _factor_sumset(sd)
    actual = list(sd.spectrum)
    if len(expected) != len(actual):
        return CheckReport.compare(
            name, float("inf"), tol,
            f"{len(actual)} distinct sums, sumset has {len(expected)}",
        )
    residual = max_residual(abs(x - y) for x, y in zip(actual, expected))
    return CheckReport.compare(name, residual, tol, f"{len(actual)} distinct eigenvalues")


def spectral_projector(sd: SpectralDecomposition, lambda_sum: float) -> np.ndarray:
    """E_lambda: sum of |p><p| over the pairs grouped under lambda_sum."""
    if lambda_sum not in sd.groups:
        raise ModelError(f"{lambda_sum!r} is not a grouped eigenvalue")
    reps = sd.rep_matrix()[:, list(sd.groups[lambda_sum])]
    return reps @ reps.conj().T


def spectral_resolution_check(sd: SpectralDecomposition, tol: float,
                              name: str = "spectral_resolution") -> CheckReport:
    """A = sum_lambda lambda E_lambda with E_lambda orthogonal projections summing to I."""
    size = sd.dim ** sd.arity
    rebuilt = np.zeros((size, size), dtype=np.complex128)
    total = np.zeros_like(rebuilt)
    residuals = []
    for lam in sd.groups:
        e = spectral_projector(sd, lam)
        residuals.append(_max_abs(e @ e - e))
        residuals.append(_max_abs(e - e.conj().T))
        rebuilt += lam * e
        total += e
    residuals.append(_max_abs(rebuilt - sd.observable.dense))
    residuals.append(_max_abs(total - np.eye(size)))
    return CheckReport.compare(name, max_residual(residuals), tol, f"{len(sd.groups)} eigenprojections")


def lemma_commuting_check(a: Operator, b: Operator, sd: SpectralDecomposition,
                          probes: Sequence[TensorVector], tol: float,
                          name: str = "lemma_commuting") -> CheckReport:
    """If [A, B] = 0 then B^|p> and <p|B^ are again eigen-ket and eigen-bra for lambda_p.

    Raises PreconditionError when A and B do not commute.
    """
    norm = commutator_norm(a.dense, b.dense)
    if norm > tol:
        raise PreconditionError(f"A and B do not commute: |[A,B]| = {norm:.3e}", norm=norm)
    if not probes:
        return CheckReport.error(name, tol, "no probes given")
    residuals = []
    for pair in sd.pairs:
        lam = pair.lambda_sum
        for f in (pair.ket, pair.bra):
            bf = extend_operator(b, f)
            abf = extend_operator(a, bf)
            for phi in probes:
                b_phi = apply_operator(b, phi)
                # A^(B^ f)(phi) = f(B(A phi)) from the definition
                chained = f(apply_operator(b, apply_operator(a, phi)))
                residuals.append(abs(chained - lam * f(b_phi)))
                residuals.append(abs(abf(phi) - lam * bf(phi)))
    worst = max_residual(residuals)
    return CheckReport.compare(name, worst, tol, f"|[A,B]| = {norm:.3e}, {len(sd.pairs)} pairs")


def symmetrized_eigenvector(sd: SpectralDecomposition, index: int, c: SymmetrizerKind,
                            kind: Kind = Kind.KET) -> Functional:
    """P~_c applied to the eigen-ket (or eigen-bra) of pair `index`; may be zero."""
    pair = sd.pairs[index]
    return dual_projector(c, pair.ket if kind is Kind.KET else pair.bra)


def _max_factor_difference(a: CompositeObservable) -> float:
    first = a.factor_ops[0].matrix
    return max((_max_abs(op.matrix - first) for op in a.factor_ops[1:]), default=0.0)


def symmetrized_eigenequation_check(
    a: CompositeObservable,
    sd: SpectralDecomposition,
    probes: Sequence[TensorVector],
    tol: float,
    characters: Sequence[SymmetrizerKind] = (SymmetrizerKind.SYM, SymmetrizerKind.ANTISYM),
    name: str = "symmetrized_eigenequation",
) -> CheckReport:
    """With identical factor observables, P~_c|p> and <p|P~_c are eigenvectors for lambda_p.

    Raises PreconditionError when the factor observables differ.
    """
    diff = _max_factor_difference(a)
    if diff > tol:
        raise PreconditionError(f"factor observables are not identical (max difference {diff:.3e})", norm=diff)
    if not probes:
        return CheckReport.error(name, tol, "no probes given")
    reports = []
    for c in characters:
        comm = commutator_norm(a.dense, projector_matrix(c, a.dim, a.arity))
        reports.append(CheckReport.compare(f"{name}.commutator.{c.value}", comm, tol))
        residuals = []
        images = [apply_operator(a, phi) for phi in probes]
        for index, pair in enumerate(sd.pairs):
            for kind in (Kind.KET, Kind.BRA):
                sym = symmetrized_eigenvector(sd, index, c, kind)
                extended = extend_operator(a, sym)
                for phi, a_phi in zip(probes, images):
                    value = sym(phi)
                    residuals.append(abs(sym(a_phi) - pair.lambda_sum * value))
                    residuals.append(abs(extended(phi) - pair.lambda_sum * value))
        reports.append(CheckReport.compare(f"{name}.eigen.{c.value}", max_residual(residuals), tol))
    return combine(name, reports, tol)


def commutation_negative_control(a: CompositeObservable, c: SymmetrizerKind, threshold: float = 1e-6,
                                 name: str = "commutation_negative_control") -> CheckReport:
    """Passes when [A, P_c] is clearly nonzero, as it must be for unequal factor observables."""
    comm = commutator_norm(a.dense, projector_matrix(c, a.dim, a.arity))
    return CheckReport.compare(
        name, max(0.0, threshold - comm), 0.0,
        f"|[A, P_{c.value}]| = {comm:.17g}, expected > {threshold:g}",
    )
