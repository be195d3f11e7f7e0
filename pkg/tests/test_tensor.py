"""Tests for braket_rhs.tensor."""
import numpy as np
import pytest

from braket_rhs.config import ModelConfig
from braket_rhs.errors import ModelError
from braket_rhs.hilbert import HilbertVector, basis
from braket_rhs.sampling import random_tensor_vector
from braket_rhs.tensor import (
    SimpleTensor,
    TensorVector,
    as_tensor,
    basis_tensor,
    canonical_chi,
    check_in_model,
    flatten,
    tensor_inner,
    tensor_inner_by_terms,
    tensor_product,
    zero_tensor,
)


def _make_vector(*coords) -> HilbertVector:
    return HilbertVector(np.array(coords, dtype=complex))


class TestCanonicalChi:
    """chi(phi_1, ..., phi_N) = phi_1 (x) ... (x) phi_N, row-major with factor 1 slowest."""

    def test_basis_ordering(self):
        t = canonical_chi([basis(2, 0), basis(2, 1)])
        assert np.array_equal(t.dense, [0, 1, 0, 0])
        t = canonical_chi([basis(2, 1), basis(2, 0)])
        assert np.array_equal(t.dense, [0, 0, 1, 0])

    def test_matches_kron(self):
        u, v, w = _make_vector(1, 2j), _make_vector(3, 1), _make_vector(0.5, -1)
        t = canonical_chi([u, v, w])
        assert np.allclose(t.dense, np.kron(np.kron(u.coords, v.coords), w.coords))
        assert t.arity == 3

    def test_multilinear(self):
        u, v, w = _make_vector(1, 2j), _make_vector(3, 1), _make_vector(0.5, -1)
        left = canonical_chi([u + 2 * w, v]).dense
        right = canonical_chi([u, v]).dense + 2 * canonical_chi([w, v]).dense
        assert np.allclose(left, right)

    def test_config_mismatch(self):
        config = ModelConfig(dim=2, factors=2)
        with pytest.raises(ModelError):
            canonical_chi([basis(2, 0)], config)
        with pytest.raises(ModelError):
            canonical_chi([basis(3, 0), basis(3, 1)], config)

    def test_keeps_terms(self):
        t = canonical_chi([basis(2, 0), basis(2, 1)])
        assert t.explicit_terms is not None
        assert len(t.terms) == 1


class TestTensorVector:
    """Dense and term representations."""

    def test_from_terms_sums_dense(self):
        terms = [SimpleTensor(1.0, (basis(2, 0), basis(2, 0))), SimpleTensor(2j, (basis(2, 1), basis(2, 1)))]
        t = TensorVector.from_terms(terms)
        assert np.allclose(t.dense, [1, 0, 0, 2j])

    def test_empty_terms_need_shape(self):
        with pytest.raises(ModelError):
            TensorVector.from_terms([])
        assert TensorVector.from_terms([], dim=2, arity=2).is_zero(0.0)

    def test_dense_length_checked(self):
        with pytest.raises(ModelError):
            TensorVector.from_dense([1, 2, 3], 2, 2)

    def test_dense_terms_expand_over_product_basis(self):
        t = TensorVector.from_dense([0, 1, 0, 3], 2, 2)
        assert t.explicit_terms is None
        terms = t.terms
        assert len(terms) == 2
        assert np.allclose(TensorVector.from_terms(terms).dense, t.dense)

    def test_arithmetic(self):
        s = basis_tensor(2, [0, 1])
        t = basis_tensor(2, [1, 0])
        assert np.allclose((s + t).dense, [0, 1, 1, 0])
        assert np.allclose((s - t).dense, [0, 1, -1, 0])
        assert np.allclose((1j * s).dense, [0, 1j, 0, 0])
        assert (s - s).is_zero(0.0)

    def test_space_mismatch(self):
        with pytest.raises(ModelError):
            basis_tensor(2, [0, 1]) + basis_tensor(2, [0, 1, 1])

    def test_zero_tensor(self):
        z = zero_tensor(3, 2)
        assert z.dense.shape == (9,)
        assert z.is_zero(0.0)

    def test_check_in_model(self):
        check_in_model(basis_tensor(2, [0, 1]), ModelConfig(dim=2, factors=2))
        with pytest.raises(ModelError):
            check_in_model(basis_tensor(2, [0, 1]), ModelConfig(dim=2, factors=3))


class TestTensorProduct:
    """General tensor product concatenates factor counts."""

    def test_arity_adds(self):
        a = basis_tensor(2, [0])
        b = basis_tensor(2, [1, 1])
        t = tensor_product(a, b)
        assert t.arity == 3
        assert np.allclose(t.dense, basis_tensor(2, [0, 1, 1]).dense)

    def test_terms_multiply_out(self):
        a = TensorVector.from_terms([SimpleTensor(1, (basis(2, 0),)), SimpleTensor(1, (basis(2, 1),))])
        t = tensor_product(a, a)
        assert len(t.explicit_terms) == 4

    def test_dim_mismatch(self):
        with pytest.raises(ModelError):
            tensor_product(basis_tensor(2, [0]), basis_tensor(3, [0]))

    def test_as_tensor_and_flatten(self):
        v = _make_vector(1, 2)
        assert as_tensor(v).arity == 1
        assert np.allclose(flatten(as_tensor(v)), [1, 2])
        assert flatten(np.eye(2)).shape == (4,)


class TestTensorInner:
    """The induced inner product factorizes over simple tensors."""

    def test_product_rule(self):
        u1, u2 = _make_vector(1, 1j), _make_vector(2, -1)
        v1, v2 = _make_vector(0.5, 2), _make_vector(1j, 1)
        lhs = tensor_inner(canonical_chi([u1, u2]), canonical_chi([v1, v2]))
        rhs = np.vdot(u1.coords, v1.coords) * np.vdot(u2.coords, v2.coords)
        assert lhs == pytest.approx(rhs)

    def test_dense_and_term_paths_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            s = random_tensor_vector(rng, 3, 2)
            t = random_tensor_vector(rng, 3, 2)
            assert tensor_inner(s, t) == pytest.approx(tensor_inner_by_terms(s, t), abs=1e-10)

    def test_space_mismatch(self):
        with pytest.raises(ModelError):
            tensor_inner(basis_tensor(2, [0, 0]), basis_tensor(2, [0]))
