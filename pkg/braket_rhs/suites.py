"""Property suites run by `braket-rhs check`.

Each suite turns one family of identities into CheckReports. Suites combine
checks on the loaded model with randomized checks on generated models at
desk scale. Every suite draws from its own RNG stream
default_rng([seed, suite_index]), so a suite's reports do not depend on which
other suites were selected or on the worker count.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_SEED
from .dual import Kind, functional_tensor, make_bra, make_ket, check_identification
from .errors import BraketError, ConfigError, DslError, PreconditionError
from .evaluator import describe, evaluate_text, type_name
from .hilbert import HilbertVector
from .model_file import LoadedModel
from .observable import CompositeObservable, check_extension_relation
from .permutation import (
    MAX_GROUP_DEGREE,
    SymmetrizerKind,
    dual_projector,
    dual_projector_check,
    enumerate_group,
    explicit_symmetrized_product,
    is_in_symmetric_space,
    permutation_matrix,
    projector,
    projector_matrix,
    projector_rank,
)
from .report import CheckReport, combine, max_residual
from .sampling import (
    random_commuting_operator,
    random_composite,
    random_functional,
    random_functional_terms,
    random_hilbert_vector,
    random_probes,
    random_scalar,
    random_single_functionals,
    random_tensor_operator,
    random_tensor_vector,
)
from .spectral import (
    commutation_negative_control,
    completeness_check,
    eigenequation_check,
    expand_ket,
    expand_product_ket,
    expansion_check,
    lemma_commuting_check,
    orthonormality_check,
    parseval_check,
    spectral_decompose,
    spectral_resolution_check,
    spectral_set_check,
    symmetrized_eigenequation_check,
)
from .tensor import canonical_chi

log = logging.getLogger(__name__)

SYMMETRIZERS = (SymmetrizerKind.SYM, SymmetrizerKind.ANTISYM)

IDENTIFICATION_SHAPES = ((2, 2), (2, 3), (3, 2))


@dataclass(frozen=True)
class SuiteSizes:
    """Sample counts for the randomized parts of the suites."""
    tuples: int = 100
    probes: int = 50
    functionals: int = 100
    models: int = 20
    commuting: int = 20
    extension_terms: int = 5
    max_permutation_degree: int = 4

    @classmethod
    def quick(cls) -> SuiteSizes:
        return cls(tuples=4, probes=5, functionals=4, models=4, commuting=3, max_permutation_degree=3)


DEFAULT_SIZES = SuiteSizes()


@dataclass(frozen=True)
class SuiteContext:
    model: LoadedModel
    tol: float
    rng: np.random.Generator
    sizes: SuiteSizes

    @property
    def dim(self) -> int:
        return self.model.config.dim

    @property
    def factors(self) -> int:
        return self.model.config.factors

    def probes(self, dim: int | None = None, arity: int | None = None) -> list:
        return random_probes(self.rng, dim or self.dim, arity or self.factors, self.sizes.probes)


def _max_abs(x: np.ndarray) -> float:
    return float(np.max(np.abs(x))) if x.size else 0.0


def _model_composite(ctx: SuiteContext) -> CompositeObservable:
    if ctx.model.composite is not None:
        return ctx.model.composite
    log.warning("model has no factor observables; using a random composite observable")
    return random_composite(ctx.rng, ctx.dim, ctx.factors)


# ---------------------------------------------------------------------------
# identification
# ---------------------------------------------------------------------------

def suite_identification(ctx: SuiteContext) -> list[CheckReport]:
    reports = []
    shapes = list(IDENTIFICATION_SHAPES)
    if (ctx.dim, ctx.factors) not in shapes:
        shapes.append((ctx.dim, ctx.factors))
    for dim, n in shapes:
        sub = [
            check_identification(
                [random_hilbert_vector(ctx.rng, dim) for _ in range(n)],
                ctx.probes(dim, n),
                ctx.tol,
            )
            for _ in range(ctx.sizes.tuples)
        ]
        reports.append(combine(f"identification.d{dim}n{n}", sub, ctx.tol))

    singles = [v for v in ctx.model.vectors.values() if isinstance(v, HilbertVector)]
    if singles:
        factors = list(itertools.islice(itertools.cycle(singles), ctx.factors))
        reports.append(check_identification(factors, ctx.probes(), ctx.tol, name="identification.model"))

    # bras are linear and kets anti-linear in the evaluated argument
    residuals = []
    for _ in range(ctx.sizes.tuples):
        phi = random_hilbert_vector(ctx.rng, ctx.dim)
        psi = random_hilbert_vector(ctx.rng, ctx.dim)
        a = random_scalar(ctx.rng)
        ket, bra = make_ket(phi), make_bra(phi)
        residuals.append(abs(ket(a * psi) - a.conjugate() * ket(psi)))
        residuals.append(abs(bra(a * psi) - a * bra(psi)))
        residuals.append(abs(bra(psi) - ket(psi).conjugate()))
    reports.append(CheckReport.compare(
        "identification.linearity", max_residual(residuals), ctx.tol,
        f"{ctx.sizes.tuples} random scalar pairs",
    ))
    return reports


# ---------------------------------------------------------------------------
# permutation
# ---------------------------------------------------------------------------

def suite_permutation(ctx: SuiteContext) -> list[CheckReport]:
    unitary, idempotent, selfadjoint, homomorphism = [], [], [], []
    for n in range(1, ctx.sizes.max_permutation_degree + 1):
        for dim in (2, 3):
            if dim ** n > 81:
                continue
            size = dim ** n
            group = enumerate_group(n)
            mats = {sigma: permutation_matrix(sigma, dim) for sigma in group}
            for sigma, u in mats.items():
                unitary.append(_max_abs(u @ u.conj().T - np.eye(size)))
            for sigma, tau in itertools.islice(itertools.product(group, repeat=2), 50):
                # U_tau U_sigma = U_(sigma o tau) with the slot convention used throughout
                homomorphism.append(_max_abs(mats[tau] @ mats[sigma] - mats[sigma.compose(tau)]))
            for c in SYMMETRIZERS:
                p = projector_matrix(c, dim, n)
                idempotent.append(_max_abs(p @ p - p))
                selfadjoint.append(_max_abs(p - p.conj().T))
    reports = [
        CheckReport.compare("permutation.unitary", max_residual(unitary), ctx.tol),
        CheckReport.compare("permutation.homomorphism", max_residual(homomorphism), ctx.tol),
        CheckReport.compare("permutation.idempotent", max_residual(idempotent), ctx.tol),
        CheckReport.compare("permutation.self_adjoint", max_residual(selfadjoint), ctx.tol),
    ]

    # Sym + Antisym = I exactly at N = 2
    pair_residual = max_residual(
        _max_abs(projector_matrix(SymmetrizerKind.SYM, dim, 2)
                 + projector_matrix(SymmetrizerKind.ANTISYM, dim, 2) - np.eye(dim * dim))
        for dim in (2, 3)
    )
    reports.append(CheckReport.compare("permutation.sym_plus_antisym_n2", pair_residual, ctx.tol))

    # ... and never at N = 3: the two ranks leave a deficit
    deficits = []
    for dim in (2, 3):
        total = projector_rank(SymmetrizerKind.SYM, dim, 3) + projector_rank(SymmetrizerKind.ANTISYM, dim, 3)
        deficits.append(dim ** 3 - total)
    reports.append(CheckReport.compare(
        "permutation.rank_deficit_n3", float(max(0, 1 - min(deficits))), 0.0,
        "rank deficits " + ", ".join(f"d={d}: {x}" for d, x in zip((2, 3), deficits)),
    ))

    order_errors = [abs(len(enumerate_group(n)) - math.factorial(n)) for n in range(1, MAX_GROUP_DEGREE + 1)]
    sign_errors = []
    for sigma, tau in itertools.islice(itertools.product(enumerate_group(4), repeat=2), 200):
        sign_errors.append(abs(sigma.compose(tau).sign() - sigma.sign() * tau.sign()))
    reports.append(CheckReport.compare(
        "permutation.group", float(max(order_errors + sign_errors)), 0.0,
        f"orders and sign homomorphism up to N={MAX_GROUP_DEGREE}",
    ))
    return reports


# ---------------------------------------------------------------------------
# dual_projector
# ---------------------------------------------------------------------------

def suite_dual_projector(ctx: SuiteContext) -> list[CheckReport]:
    reports = []
    probes = ctx.probes()
    for c in SYMMETRIZERS:
        for kind in (Kind.BRA, Kind.KET):
            sub = [
                dual_projector_check(c, random_functional(ctx.rng, kind, ctx.dim, ctx.factors), probes, ctx.tol)
                for _ in range(ctx.sizes.functionals)
            ]
            reports.append(combine(f"dual_projector.{c.value}.{kind.value}", sub, ctx.tol))

    relation, membership = [], []
    for _ in range(ctx.sizes.functionals):
        for c in SYMMETRIZERS:
            for kind in (Kind.BRA, Kind.KET):
                fs = random_single_functionals(ctx.rng, kind, ctx.dim, ctx.factors)
                projected = dual_projector(c, functional_tensor(fs))
                explicit = explicit_symmetrized_product(c, fs)
                relation.append(_max_abs(projected.rep.dense - explicit.rep.dense))
                membership.append(is_in_symmetric_space(projected, c, ctx.tol).residual)
    reports.append(CheckReport.compare(
        "dual_projector.symmetry_relation", max_residual(relation), ctx.tol,
        "P~_c(f_1 (x) ... (x) f_N) against the explicit permutation sum",
    ))
    reports.append(CheckReport.compare("dual_projector.fixed_points", max_residual(membership), ctx.tol))
    return reports


# ---------------------------------------------------------------------------
# spectral and eigen
# ---------------------------------------------------------------------------

_VARIANTS = ("generic", "identical", "degenerate", "generic")


def _random_models(ctx: SuiteContext) -> list[CompositeObservable]:
    models = []
    for i in range(ctx.sizes.models):
        dim = int(ctx.rng.integers(2, 4))
        arity = int(ctx.rng.integers(1, 4))
        models.append(random_composite(ctx.rng, dim, arity, _VARIANTS[i % len(_VARIANTS)]))
    return models


def suite_spectral(ctx: SuiteContext) -> list[CheckReport]:
    checks: dict[str, list[CheckReport]] = {
        "spectral_set": [], "expansion": [], "product_expansion": [], "parseval": [],
        "completeness": [], "orthonormality": [], "resolution": [],
    }
    for a in [_model_composite(ctx)] + _random_models(ctx):
        sd = spectral_decompose(a)
        phi = random_tensor_vector(ctx.rng, a.dim, a.arity)
        psi = random_tensor_vector(ctx.rng, a.dim, a.arity)
        checks["spectral_set"].append(spectral_set_check(sd, ctx.tol))
        checks["expansion"].append(expansion_check(sd, phi, ctx.tol))
        checks["parseval"].append(parseval_check(sd, phi, psi, ctx.tol))
        checks["completeness"].append(completeness_check(sd, ctx.tol))
        checks["orthonormality"].append(orthonormality_check(sd, ctx.tol))
        checks["resolution"].append(spectral_resolution_check(sd, ctx.tol))

        factors = [random_hilbert_vector(ctx.rng, a.dim) for _ in range(a.arity)]
        by_product = np.array([c for _, c in expand_product_ket(sd, factors)])
        direct = np.array([c for _, c in expand_ket(sd, canonical_chi(factors))])
        checks["product_expansion"].append(
            CheckReport.compare("product_expansion", _max_abs(by_product - direct), ctx.tol)
        )
    return [combine(f"spectral.{key}", sub, ctx.tol) for key, sub in checks.items()]


def suite_eigen(ctx: SuiteContext) -> list[CheckReport]:
    a = _model_composite(ctx)
    reports = [eigenequation_check(spectral_decompose(a), a, ctx.probes(a.dim, a.arity), ctx.tol,
                                   name="eigen.model")]
    sub = []
    for model in _random_models(ctx):
        probes = ctx.probes(model.dim, model.arity)
        sub.append(eigenequation_check(spectral_decompose(model), model, probes, ctx.tol))
    reports.append(combine("eigen.random_models", sub, ctx.tol))
    return reports


# ---------------------------------------------------------------------------
# extension
# ---------------------------------------------------------------------------

def suite_extension(ctx: SuiteContext) -> list[CheckReport]:
    a = _model_composite(ctx)
    probes = ctx.probes(a.dim, a.arity)
    reports = []
    for kind in (Kind.BRA, Kind.KET):
        sub = [
            check_extension_relation(
                a.factor_ops,
                random_functional_terms(ctx.rng, kind, a.dim, a.arity, ctx.sizes.extension_terms),
                probes,
                ctx.tol,
            )
            for _ in range(ctx.sizes.functionals)
        ]
        reports.append(combine(f"extension.{kind.value}", sub, ctx.tol))
    return reports


# ---------------------------------------------------------------------------
# lemma
# ---------------------------------------------------------------------------

def suite_lemma(ctx: SuiteContext) -> list[CheckReport]:
    a = _model_composite(ctx)
    sd = spectral_decompose(a)
    probes = ctx.probes(a.dim, a.arity)
    sub = [
        lemma_commuting_check(a, random_commuting_operator(ctx.rng, a), sd, probes, ctx.tol)
        for _ in range(ctx.sizes.commuting)
    ]
    reports = [combine("lemma.commuting", sub, ctx.tol)]

    b = random_tensor_operator(ctx.rng, a.dim, a.arity)
    name = "lemma.noncommuting_rejected"
    try:
        lemma_commuting_check(a, b, sd, probes, ctx.tol)
    except PreconditionError as exc:
        reports.append(CheckReport.compare(name, 0.0, 0.0, f"rejected: |[A,B]| = {exc.norm:.17g}"))
    else:
        reports.append(CheckReport.compare(name, 1.0, 0.0, "a non-commuting B passed the precondition"))
    return reports


# ---------------------------------------------------------------------------
# symmetrization
# ---------------------------------------------------------------------------

def _singlet_check(a: CompositeObservable, ctx: SuiteContext) -> CheckReport | None:
    """Antisymmetrized product of two distinct factor eigenvectors is an eigenvector of A."""
    if a.arity != 2:
        return None
    sd = spectral_decompose(a)
    for pair in sd.pairs:
        if pair.lambdas[0] == pair.lambdas[1]:
            continue
        s = projector(SymmetrizerKind.ANTISYM, pair.rep)
        if s.is_zero(ctx.tol):
            continue
        residual = _max_abs(a.dense @ s.dense - pair.lambda_sum * s.dense)
        return CheckReport.compare(
            "symmetrization.singlet", residual, ctx.tol,
            f"labels {pair.lambdas}, eigenvalue {pair.lambda_sum:.17g}",
        )
    return None


def suite_symmetrization(ctx: SuiteContext) -> list[CheckReport]:
    a = _model_composite(ctx)
    reports = []
    if a.identical_factors(ctx.tol):
        sd = spectral_decompose(a)
        reports.append(symmetrized_eigenequation_check(
            a, sd, ctx.probes(a.dim, a.arity), ctx.tol, name="symmetrization.model",
        ))
        singlet = _singlet_check(a, ctx)
        if singlet is not None:
            reports.append(singlet)
    elif a.arity > 1:
        for c in SYMMETRIZERS:
            reports.append(commutation_negative_control(a, c, name=f"symmetrization.negative_control.{c.value}"))

    identical = random_composite(ctx.rng, ctx.dim, max(2, ctx.factors), "identical")
    reports.append(symmetrized_eigenequation_check(
        identical, spectral_decompose(identical), ctx.probes(identical.dim, identical.arity),
        ctx.tol, name="symmetrization.random_identical",
    ))
    unequal = random_composite(ctx.rng, ctx.dim, max(2, ctx.factors), "generic")
    reports.append(commutation_negative_control(
        unequal, SymmetrizerKind.SYM, name="symmetrization.random_negative_control",
    ))
    return reports


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

def suite_expressions(ctx: SuiteContext) -> list[CheckReport]:
    bindings = ctx.model.bindings
    reports = []
    for i, case in enumerate(ctx.model.spec.expressions, 1):
        name = f"expressions.{i}"
        try:
            value = evaluate_text(case.expr, bindings, ctx.model.config)
        except DslError as exc:
            reports.append(CheckReport.error(name, ctx.tol, f"{case.expr}: {exc}"))
            continue
        if case.expected is None:
            reports.append(CheckReport.compare(name, 0.0, ctx.tol, f"{case.expr} = {describe(value, ctx.tol)}"))
        elif not isinstance(value, complex):
            reports.append(CheckReport.error(name, ctx.tol, f"{case.expr}: expected a scalar, got a {type_name(value)}"))
        else:
            expected = complex(*case.expected)
            reports.append(CheckReport.compare(name, abs(value - expected), ctx.tol, case.expr))
    return reports


SUITES: dict[str, Callable[[SuiteContext], list[CheckReport]]] = {
    "identification": suite_identification,
    "permutation": suite_permutation,
    "dual_projector": suite_dual_projector,
    "spectral": suite_spectral,
    "eigen": suite_eigen,
    "extension": suite_extension,
    "lemma": suite_lemma,
    "symmetrization": suite_symmetrization,
    "expressions": suite_expressions,
}

SUITE_NAMES = tuple(SUITES)


def resolve_suites(requested: Sequence[str] | None, model: LoadedModel) -> list[str]:
    """CLI selection, else the model file's list, else every suite; canonical order, no repeats."""
    names = list(requested or model.spec.suites or SUITE_NAMES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITE_NAMES)}")
    return [n for n in SUITE_NAMES if n in names]


def _run_one(name: str, model: LoadedModel, tol: float, seed: int, sizes: SuiteSizes) -> list[CheckReport]:
    rng = np.random.default_rng([seed, SUITE_NAMES.index(name)])
    ctx = SuiteContext(model, tol, rng, sizes)
    start = time.perf_counter()
    try:
        reports = SUITES[name](ctx)
    except BraketError as exc:
        log.debug("suite %s raised %s", name, exc)
        return [CheckReport.error(name, tol, str(exc))]
    log.debug("suite %s: %d checks in %.2fs", name, len(reports), time.perf_counter() - start)
    return reports


def run_suites(
    model: LoadedModel,
    suites: Sequence[str] | None = None,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    tol: float | None = None,
    sizes: SuiteSizes | None = None,
) -> list[CheckReport]:
    """Run the selected suites; reports come back in declaration order whatever the worker count."""
    names = resolve_suites(suites, model)
    tol = model.config.tol if tol is None else tol
    sizes = sizes or DEFAULT_SIZES
    if workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda n: _run_one(n, model, tol, seed, sizes), names))
    else:
        results = [_run_one(n, model, tol, seed, sizes) for n in names]
    return [report for chunk in results for report in chunk]
