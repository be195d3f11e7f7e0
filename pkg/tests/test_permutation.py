"""Tests for braket_rhs.permutation."""
import math

import numpy as np
import pytest

from braket_rhs.dual import Kind, composite_ket, functional_tensor, make_bra, make_ket
from braket_rhs.errors import ModelError
from braket_rhs.hilbert import basis
from braket_rhs.permutation import (
    Permutation,
    SymmetrizerKind,
    apply_permutation,
    dual_permutation,
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
from braket_rhs.sampling import random_functional, random_hilbert_vector, random_probes, random_tensor_vector
from braket_rhs.tensor import basis_tensor, canonical_chi

SYM, ANTISYM = SymmetrizerKind.SYM, SymmetrizerKind.ANTISYM


class TestPermutation:
    """Permutation values, 0-based inside, 1-based in text."""

    def test_rejects_non_bijection(self):
        with pytest.raises(ModelError):
            Permutation((0, 0))

    def test_one_based_round_trip(self):
        sigma = Permutation.from_one_based([2, 3, 1])
        assert sigma.images == (1, 2, 0)
        assert sigma.one_based() == (2, 3, 1)
        assert str(sigma) == "[2,3,1]"

    def test_compose_and_inverse(self):
        sigma = Permutation.from_one_based([2, 3, 1])
        assert sigma.compose(sigma.inverse()) == Permutation.identity(3)
        assert sigma.inverse().compose(sigma) == Permutation.identity(3)

    def test_sign(self):
        assert Permutation.identity(4).sign() == 1
        assert Permutation.from_one_based([2, 1]).sign() == -1
        assert Permutation.from_one_based([2, 3, 1]).sign() == 1
        assert Permutation.from_one_based([2, 1, 4, 3]).sign() == 1

    def test_compose_degree_mismatch(self):
        with pytest.raises(ModelError):
            Permutation.identity(2).compose(Permutation.identity(3))


class TestEnumerateGroup:
    """All N! permutations, lexicographic."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_order(self, n):
        group = enumerate_group(n)
        assert len(group) == math.factorial(n)
        assert len(set(group)) == len(group)

    def test_lexicographic(self):
        assert [p.images for p in enumerate_group(3)][:2] == [(0, 1, 2), (0, 2, 1)]

    @pytest.mark.parametrize("n", [0, 9])
    def test_out_of_range(self, n):
        with pytest.raises(ModelError):
            enumerate_group(n)


class TestApplyPermutation:
    """U_sigma moves input factor sigma(k) into slot k."""

    def test_transposition(self):
        swap = Permutation.from_one_based([2, 1])
        t = apply_permutation(swap, basis_tensor(2, [0, 1]))
        assert np.allclose(t.dense, basis_tensor(2, [1, 0]).dense)

    def test_cycle_on_simple_tensor(self):
        rng = np.random.default_rng(0)
        phis = [random_hilbert_vector(rng, 2) for _ in range(3)]
        sigma = Permutation.from_one_based([2, 3, 1])
        t = apply_permutation(sigma, canonical_chi(phis))
        expected = canonical_chi([phis[1], phis[2], phis[0]])
        assert np.allclose(t.dense, expected.dense)
        assert len(t.explicit_terms) == 1

    def test_composition_order(self):
        rng = np.random.default_rng(1)
        t = random_tensor_vector(rng, 2, 3)
        sigma = Permutation.from_one_based([2, 3, 1])
        tau = Permutation.from_one_based([1, 3, 2])
        twice = apply_permutation(tau, apply_permutation(sigma, t))
        assert np.allclose(twice.dense, apply_permutation(sigma.compose(tau), t).dense)

    def test_matrix_agrees(self):
        rng = np.random.default_rng(2)
        t = random_tensor_vector(rng, 3, 2)
        for sigma in enumerate_group(2):
            assert np.allclose(permutation_matrix(sigma, 3) @ t.dense, apply_permutation(sigma, t).dense)

    def test_arity_mismatch(self):
        with pytest.raises(ModelError):
            apply_permutation(Permutation.identity(3), basis_tensor(2, [0, 1]))


class TestProjector:
    """P_c = (1/N!) sum c(sigma) U_sigma is an orthogonal projection."""

    @pytest.mark.parametrize("c", [SYM, ANTISYM])
    @pytest.mark.parametrize("dim,n", [(2, 2), (2, 3), (3, 2), (2, 4)])
    def test_idempotent_and_self_adjoint(self, c, dim, n):
        p = projector_matrix(c, dim, n)
        assert np.max(np.abs(p @ p - p)) <= 1e-12
        assert np.max(np.abs(p - p.conj().T)) <= 1e-12

    @pytest.mark.parametrize("dim", [2, 3])
    def test_sym_plus_antisym_is_identity_at_n2(self, dim):
        total = projector_matrix(SYM, dim, 2) + projector_matrix(ANTISYM, dim, 2)
        assert np.allclose(total, np.eye(dim * dim), atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_rank_deficit_at_n3(self, dim):
        total = projector_rank(SYM, dim, 3) + projector_rank(ANTISYM, dim, 3)
        assert dim ** 3 - total >= 1

    def test_ranks(self):
        assert projector_rank(SYM, 2, 2) == 3
        assert projector_rank(ANTISYM, 2, 2) == 1
        assert projector_rank(ANTISYM, 2, 3) == 0

    def test_antisymmetrizer_kills_repeated_factor(self):
        a = random_hilbert_vector(np.random.default_rng(3), 2)
        assert projector(ANTISYM, canonical_chi([a, a])).is_zero(1e-14)

    def test_singlet(self):
        s = projector(ANTISYM, basis_tensor(2, [0, 1]))
        assert np.allclose(s.dense, [0, 0.5, -0.5, 0])


class TestDualProjector:
    """P~_c(f)(phi) = f(P_c phi), for bras and kets."""

    @pytest.mark.parametrize("c", [SYM, ANTISYM])
    @pytest.mark.parametrize("kind", [Kind.BRA, Kind.KET])
    def test_definition_matches_shortcut(self, c, kind):
        rng = np.random.default_rng(7)
        probes = random_probes(rng, 2, 3, 20)
        for _ in range(5):
            f = random_functional(rng, kind, 2, 3)
            assert dual_projector_check(c, f, probes, 1e-12).passed

    def test_antisymmetrized_equal_kets_vanish(self):
        a = basis(2, 0) + basis(2, 1)
        f = functional_tensor([make_ket(a), make_ket(a)])
        assert dual_projector(ANTISYM, f).is_zero(1e-14)

    @pytest.mark.parametrize("c", [SYM, ANTISYM])
    def test_explicit_symmetrized_product(self, c):
        rng = np.random.default_rng(8)
        fs = [make_bra(random_hilbert_vector(rng, 2)) for _ in range(3)]
        projected = dual_projector(c, functional_tensor(fs))
        explicit = explicit_symmetrized_product(c, fs)
        assert np.allclose(projected.rep.dense, explicit.rep.dense, atol=1e-12)

    def test_membership(self):
        rng = np.random.default_rng(9)
        f = random_functional(rng, Kind.KET, 2, 2)
        assert not is_in_symmetric_space(f, SYM, 1e-12).member
        assert is_in_symmetric_space(dual_projector(SYM, f), SYM, 1e-12).member

    def test_dual_permutation_is_pullback(self):
        rng = np.random.default_rng(10)
        sigma = Permutation.from_one_based([3, 1, 2])
        f = composite_ket(random_tensor_vector(rng, 2, 3))
        g = dual_permutation(sigma, f)
        for phi in random_probes(rng, 2, 3, 5):
            assert g(phi) == pytest.approx(f(apply_permutation(sigma, phi)))
