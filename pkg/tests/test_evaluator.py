"""Tests for braket_rhs.evaluator: expressions agree with direct library calls."""
import numpy as np
import pytest

from braket_rhs.config import ModelConfig
from braket_rhs.dual import Functional, Kind, composite_ket, functional_tensor, make_bra, make_ket
from braket_rhs.errors import ConfigError, EvalError
from braket_rhs.evaluator import (
    Bindings,
    PermutationBuiltin,
    ProjectorBuiltin,
    complex_text,
    describe,
    evaluate,
    evaluate_text,
    is_reserved,
    type_name,
)
from braket_rhs.hilbert import HilbertVector, basis
from braket_rhs.observable import FactorObservable, TensorOperator, apply_operator, compose_observable, extend_operator
from braket_rhs.parser import parse_text
from braket_rhs.permutation import Permutation, SymmetrizerKind, apply_permutation, dual_projector, projector
from braket_rhs.tensor import basis_tensor, canonical_chi

MODEL = ModelConfig(dim=2, factors=2)
SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
A = compose_observable([SZ, SZ])
SX_OP = FactorObservable(SX)


def _vec(*coords) -> HilbertVector:
    return HilbertVector(np.array(coords, dtype=complex))


VECTORS = {
    "l1": basis(2, 0),
    "l2": basis(2, 1),
    "a": _vec(0.6, 0.8j),
    "p": _vec(0.5 + 0.5j, 0.5 - 0.5j),
    "q": _vec(1j, 2),
}


def _make_bindings(**extra) -> Bindings:
    return Bindings({**VECTORS, "A": A, "sx": SX_OP, **extra}, composite=A)


def _eval(text: str):
    return evaluate_text(text, _make_bindings(), MODEL)


class TestBindings:
    """Builtins resolve; reserved names cannot be bound."""

    def test_builtins(self):
        b = _make_bindings()
        assert b.lookup("P_sym", (0, 0)) == ProjectorBuiltin(SymmetrizerKind.SYM)
        assert b.lookup("P_asym", (0, 0)) == ProjectorBuiltin(SymmetrizerKind.ANTISYM)
        assert b.lookup("A_hat", (0, 0)) is A
        assert b.lookup("U[2,1]", (0, 0)) == PermutationBuiltin(Permutation((1, 0)))
        assert "P_sym" in b
        assert "l1" in b
        assert "nope" not in b

    def test_reserved(self):
        assert is_reserved("P_sym")
        assert is_reserved("U[1,2]")
        assert not is_reserved("sz")
        with pytest.raises(ConfigError):
            Bindings({"A_hat": A})

    def test_a_hat_without_composite(self):
        with pytest.raises(EvalError):
            Bindings({}).lookup("A_hat", (3, 8))

    def test_invalid_permutation(self):
        with pytest.raises(EvalError) as exc_info:
            Bindings({}).lookup("U[1,1]", (0, 6))
        assert exc_info.value.span == (0, 6)

    def test_names(self):
        assert _make_bindings().names == sorted([*VECTORS, "A", "sx"])


class TestEvaluate:
    """Each expression equals the matching library computation."""

    def test_braket(self):
        assert _eval("<a|a>") == pytest.approx(1.0)
        assert _eval("<l1|l2>") == 0

    def test_braket_is_linear_in_the_ket(self):
        expected = make_bra(VECTORS["p"])(VECTORS["q"])
        assert _eval("<p|q>") == pytest.approx(expected)

    def test_ket_tensor(self):
        value = _eval("|p> (x) |q>")
        expected = functional_tensor([make_ket(VECTORS["p"]), make_ket(VECTORS["q"])])
        assert isinstance(value, Functional)
        assert value.kind is Kind.KET
        assert np.allclose(value.rep.dense, expected.rep.dense)

    def test_antisymmetrized_repeated_ket_is_zero(self):
        value = _eval("P_asym (|a> (x) |a>)")
        assert isinstance(value, Functional)
        assert value.is_zero(1e-12)
        assert describe(value) == "zero functional"

    def test_symmetrizer_matches_dual_projector(self):
        value = _eval("P_sym (|p> (x) |q>)")
        f = functional_tensor([make_ket(VECTORS["p"]), make_ket(VECTORS["q"])])
        assert np.allclose(value.rep.dense, dual_projector(SymmetrizerKind.SYM, f).rep.dense)

    @pytest.mark.parametrize("first,second,expected", [
        ("l1", "l1", 2.0),
        ("l1", "l2", 0.0),
        ("l2", "l1", 0.0),
        ("l2", "l2", -2.0),
    ])
    def test_eigen_bras_on_observable(self, first, second, expected):
        text = f"(<{first}| (x) <{second}|) (A (|{first}> (x) |{second}>))"
        assert _eval(text) == pytest.approx(expected)

    def test_a_hat_is_the_composite(self):
        assert _eval("(<l2| (x) <l2|) (A_hat (|l2> (x) |l2>))") == pytest.approx(-2.0)

    def test_bra_acting_on_operator(self):
        value = _eval("(<p| (x) <q|) A")
        f = functional_tensor([make_bra(VECTORS["p"]), make_bra(VECTORS["q"])])
        assert value.kind is Kind.BRA
        assert np.allclose(value.rep.dense, extend_operator(A, f).rep.dense)

    def test_operator_on_vector(self):
        value = _eval("A (p (x) q)")
        expected = apply_operator(A, canonical_chi([VECTORS["p"], VECTORS["q"]]))
        assert np.allclose(value.dense, expected.dense)

    def test_permutation_on_vector(self):
        value = _eval("U[2,1] (p (x) q)")
        expected = apply_permutation(Permutation((1, 0)), canonical_chi([VECTORS["p"], VECTORS["q"]]))
        assert np.allclose(value.dense, expected.dense)

    def test_projector_on_vector(self):
        value = _eval("P_asym (l1 (x) l2)")
        expected = projector(SymmetrizerKind.ANTISYM, canonical_chi([basis(2, 0), basis(2, 1)]))
        assert np.allclose(value.dense, expected.dense)

    def test_dagger_of_tensored_kets(self):
        value = _eval("(|a> (x) |p>)'")
        assert value.kind is Kind.BRA
        assert _eval("(|l1> (x) |l2>)' (l1 (x) l2)") == pytest.approx(1.0)

    def test_dagger_of_permutation_is_inverse(self):
        value = _eval("U[2,3,1]'")
        assert value == PermutationBuiltin(Permutation.from_one_based([2, 3, 1]).inverse())

    def test_dagger_of_tensor_operator(self):
        m = np.array([[1, 1j, 0, 0], [-1j, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]])
        op = TensorOperator(m, 2, 2)
        value = evaluate(parse_text("B'"), _make_bindings(B=op), MODEL)
        assert np.allclose(value.matrix, m.conj().T)

    def test_scalar_arithmetic(self):
        assert _eval("2 * <a|a> + 0.5i") == pytest.approx(2 + 0.5j)
        assert _eval("<a|a> * 3") == pytest.approx(3.0)
        assert _eval("-<l1|l1>") == pytest.approx(-1.0)
        assert _eval("(2i)'") == pytest.approx(-2j)

    def test_scaled_functional(self):
        value = _eval("2i * <l1|")
        assert value(basis(2, 0)) == pytest.approx(2j)

    def test_functional_sum(self):
        value = _eval("<l1| + <l2|")
        assert value(_vec(1, 1)) == pytest.approx(2.0)

    def test_difference_of_kets(self):
        value = _eval("|l1> (x) |l2> - |l2> (x) |l1>")
        assert np.allclose(value.rep.dense, [0, 1, -1, 0])

    def test_long_sum(self):
        assert _eval(" + ".join(["1"] * 800)) == pytest.approx(800)
        value = _eval(" + ".join(["<l1|"] * 600))
        assert value(basis(2, 0)) == pytest.approx(600)

    def test_tensor_vector_binding(self):
        b = _make_bindings(t=basis_tensor(2, [1, 0]))
        value = evaluate(parse_text("<t| (l2 (x) l1)"), b, MODEL)
        assert value == pytest.approx(1.0)
        assert np.allclose(evaluate(parse_text("|t>"), b, MODEL).rep.dense,
                           composite_ket(basis_tensor(2, [1, 0])).rep.dense)


class TestEvalErrors:
    """Type errors are EvalError with the span of the failing node."""

    def test_unbound_identifier(self):
        with pytest.raises(EvalError) as exc_info:
            _eval("<a| (x) <zz|")
        assert exc_info.value.span == (8, 12)
        assert "unbound identifier 'zz'" in str(exc_info.value)

    def test_too_many_factors(self):
        with pytest.raises(EvalError) as exc_info:
            _eval("|a> (x) |a> (x) |a>")
        assert "tensor of 3 factors in a 2-factor model" in str(exc_info.value)
        assert exc_info.value.span == (0, 19)

    def test_ket_applied_to_ket(self):
        with pytest.raises(EvalError, match="cannot apply a ket to a ket"):
            _eval("|a> |a>")

    def test_outer_product(self):
        with pytest.raises(EvalError, match="outer products"):
            _eval("|a> <a|")

    def test_mixed_kind_tensor(self):
        with pytest.raises(EvalError):
            _eval("|a> (x) <a|")

    def test_bare_vector_dagger(self):
        with pytest.raises(EvalError):
            _eval("a'")

    def test_operator_cannot_be_scaled(self):
        with pytest.raises(EvalError, match="cannot scale"):
            _eval("2 * A")

    def test_non_scalar_factor(self):
        with pytest.raises(EvalError):
            _eval("|a> * |a>")

    def test_vector_name_expected(self):
        with pytest.raises(EvalError, match="not a vector"):
            _eval("|A>")

    def test_mismatched_sum_span(self):
        with pytest.raises(EvalError) as exc_info:
            _eval("1 + 2 + |a> + 3")
        assert "cannot add a scalar and a ket" in str(exc_info.value)
        assert exc_info.value.span == (0, 11)

    def test_deep_nesting_is_reported(self):
        text = "-" * 3000 + "|a>"
        with pytest.raises(EvalError) as exc_info:
            _eval(text)
        assert "nested too deeply" in str(exc_info.value)
        assert exc_info.value.span == (0, len(text))

    def test_library_error_gets_span(self):
        # a one-factor functional cannot evaluate a two-factor vector
        with pytest.raises(EvalError) as exc_info:
            _eval("<a| (l1 (x) l2)")
        assert exc_info.value.span == (0, 14)


class TestDescribe:
    """One-line renderings."""

    def test_complex_text(self):
        assert complex_text(1 + 0j) == "1+0i"
        assert complex_text(complex(-0.0, -0.0)) == "0+0i"
        assert complex_text(0.5 - 2j) == "0.5-2i"

    def test_describe_values(self):
        assert describe(_eval("<a|a>")) == "1+0i"
        assert describe(_eval("|l1>")) == "ket on 1 factor(s): [1+0i, 0+0i]"
        assert describe(_eval("l1 (x) l2")) == "tensor on 2 factor(s): [0+0i, 1+0i, 0+0i, 0+0i]"
        assert describe(_eval("l1")) == "vector [1+0i, 0+0i]"
        assert describe(_eval("P_sym")) == "operator P_sym"
        assert describe(_eval("U[2,1]")) == "operator U[2,1]"
        assert describe(_eval("A")) == "operator on 2**2"

    def test_type_names(self):
        assert type_name(1j) == "scalar"
        assert type_name(make_bra(basis(2, 0))) == "bra"
        assert type_name(basis(2, 0)) == "vector"
        assert type_name(A) == "operator"
        assert type_name(ProjectorBuiltin(SymmetrizerKind.SYM)) == "projector"
