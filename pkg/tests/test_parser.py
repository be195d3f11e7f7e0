"""Tests for braket_rhs.parser."""
import pytest

from braket_rhs.errors import DslError, ParseError
from braket_rhs.lexer import tokenize
from braket_rhs.parser import (
    Add,
    Apply,
    BraLeaf,
    Dagger,
    KetLeaf,
    OpLeaf,
    Scalar,
    Scale,
    Tensor,
    parse,
    parse_text,
    pretty_print,
)

CORPUS = [
    "|a>",
    "<a|",
    "<a|b>",
    "A",
    "2",
    "0.5i",
    "-3",
    "--2",
    "-|a>",
    "|a>'",
    "|a>''",
    "|a>†",
    "|a> (x) |b>",
    "|a> ⊗ |b> ⊗ |c>",
    "<a| (x) <b|",
    "P_sym (|a> (x) |b>)",
    "P_asym (|a> (x) |a>)",
    "U[2,1] (|a> (x) |b>)",
    "U[2, 3, 1] (|a> (x) |b> (x) |c>)",
    "A_hat (|l1> (x) |l2>)",
    "(<l1| (x) <l2|) (A (|p> (x) |q>))",
    "(|a> (x) |b>)' (a (x) b)",
    "2 * |a> + |b>",
    "|a> - |b>",
    "|a> - 2 * |b> + 0.5i * |c>",
    "2 * <a|a> + 0.5i",
    "(1 + 2i) * |a>",
    "f g x",
    "f (g x)",
    "P_sym' x",
    "-(|a> (x) |b>)",
    "<a| A |b>",
    "1e-3 * |a>",
    ".5 * |a>",
    "A (B (C x))",
    "(y (x) z)'",
    "3 * 4 * |a>",
    "-0.5i * <a| (x) <b|",
]


class TestGolden:
    """Precedence: dagger > application > (x) > * > + -."""

    def test_projector_application(self):
        assert parse_text("P_asym (|a> (x) |a>)") == Apply(OpLeaf("P_asym"), Tensor(KetLeaf("a"), KetLeaf("a")))

    def test_scale_binds_tighter_than_add(self):
        assert parse_text("2 * |a> + |b>") == Add(Scale(Scalar(2 + 0j), KetLeaf("a")), KetLeaf("b"))

    def test_bras_on_observable_image(self):
        expected = Apply(
            Tensor(BraLeaf("l1"), BraLeaf("l2")),
            Apply(OpLeaf("A"), Tensor(KetLeaf("p"), KetLeaf("q"))),
        )
        assert parse_text("(<l1| (x) <l2|) (A (|p> (x) |q>))") == expected

    def test_braket_lowers_to_apply(self):
        assert parse_text("<a|b>") == Apply(BraLeaf("a"), KetLeaf("b"))

    def test_application_binds_tighter_than_tensor(self):
        assert parse_text("f |a> (x) |b>") == Tensor(Apply(OpLeaf("f"), KetLeaf("a")), KetLeaf("b"))

    def test_dagger_binds_tightest(self):
        assert parse_text("|a> (x) |b>'") == Tensor(KetLeaf("a"), Dagger(KetLeaf("b")))

    def test_tensor_binds_tighter_than_scale(self):
        assert parse_text("2 * |a> (x) |b>") == Scale(Scalar(2 + 0j), Tensor(KetLeaf("a"), KetLeaf("b")))

    def test_left_associative(self):
        assert parse_text("f g x") == Apply(Apply(OpLeaf("f"), OpLeaf("g")), OpLeaf("x"))
        t = parse_text("|a> (x) |b> (x) |c>")
        assert t == Tensor(Tensor(KetLeaf("a"), KetLeaf("b")), KetLeaf("c"))

    def test_binary_minus(self):
        assert parse_text("|a> - |b>") == Add(KetLeaf("a"), Scale(Scalar(-1 + 0j), KetLeaf("b")))

    def test_unary_minus(self):
        assert parse_text("-3") == Scalar(-3 + 0j)
        assert parse_text("-|a>") == Scale(Scalar(-1 + 0j), KetLeaf("a"))

    def test_permutation_identifier(self):
        assert parse_text("U[2, 1]") == OpLeaf("U[2,1]")

    def test_spans(self):
        node = parse_text("2 * |a> + |b>")
        assert node.span == (0, 13)
        assert node.left.span == (0, 7)
        assert node.right.span == (10, 13)

    def test_spans_do_not_affect_equality(self):
        assert parse_text("|a>(x)|b>") == parse_text("  |a>   (x)   |b>  ")

    def test_parse_accepts_token_list(self):
        assert parse(tokenize("|a>")) == KetLeaf("a")


class TestPrettyPrint:
    """Fully parenthesized output that reparses to the same tree."""

    def test_golden_text(self):
        assert pretty_print(parse_text("2 * |a> + |b>")) == "((2.0 * |a>) + |b>)"
        assert pretty_print(parse_text("<a|b>")) == "(<a| |b>)"
        assert pretty_print(parse_text("|a>'")) == "|a>'"

    def test_negative_and_imaginary_scalars(self):
        assert pretty_print(Scalar(-2 + 0j)) == "(-2.0)"
        assert pretty_print(Scalar(0.5j)) == "0.5i"
        assert pretty_print(Scalar(-0.5j)) == "(-0.5i)"
        assert pretty_print(Scalar(1 + 2j)) == "(1.0 + 2.0i)"

    @pytest.mark.parametrize("text", CORPUS)
    def test_round_trip(self, text):
        ast = parse_text(text)
        assert parse_text(pretty_print(ast)) == ast

    def test_corpus_size(self):
        assert len(CORPUS) >= 30

    def test_rejects_non_nodes(self):
        with pytest.raises(TypeError):
            pretty_print("not a node")


class TestParseErrors:
    """Every failure carries a span."""

    @pytest.mark.parametrize("text,message,span", [
        ("", "empty expression", (0, 0)),
        ("   ", "empty expression", (3, 3)),
        ("|a> +", "unexpected end of input", (5, 5)),
        ("(|a>", "unclosed '('", (0, 1)),
        ("|a> )", "unexpected ')'", (4, 5)),
        ("* |a>", "unexpected '*'", (0, 1)),
        ("|a> (x) (x) |b>", "unexpected '(x)'", (8, 11)),
        ("(|a> |b>", "unclosed '('", (0, 1)),
        ("()", "unexpected ')'", (1, 2)),
    ])
    def test_error_span(self, text, message, span):
        with pytest.raises(ParseError) as exc_info:
            parse_text(text)
        assert exc_info.value.message == message
        assert exc_info.value.span == span

    @pytest.mark.parametrize("text", ["|a", "<<a|", "|a> & |b>", "U[1,", "2 * * 3", "((|a>)"])
    def test_malformed_input_raises_dsl_error(self, text):
        with pytest.raises(DslError) as exc_info:
            parse_text(text)
        start, end = exc_info.value.span
        assert 0 <= start <= end <= len(text)


MALFORMED = [
    "²",
    "<a|a> * ²",
    "٣",
    "|ψ>",
    "<a|ψ>",
    "|a> ⊕ |b>",
    "U[2,1",
    "U[a]",
    "(",
    ")",
    "(((|a>",
    "|a> (x)",
    "(x) |a>",
    "' |a>",
    "|a> + * |b>",
    "2 ** 3",
    "<a|b> )",
    "- ",
    "()" * 50,
    "(" * 400 + "|a>",
    "|a>" + ")" * 400,
    " + ".join(["1"] * 500) + " +",
]


class TestMalformedInput:
    """Every malformed expression raises a DslError with a span inside the text."""

    @pytest.mark.parametrize("text", MALFORMED)
    def test_spanned_error(self, text):
        with pytest.raises(DslError) as exc_info:
            parse_text(text)
        start, end = exc_info.value.span
        assert 0 <= start <= end <= len(text)

    def test_unclosed_reports_innermost_paren(self):
        with pytest.raises(ParseError) as exc_info:
            parse_text("(" * 400 + "|a>")
        assert exc_info.value.message == "unclosed '('"
        assert exc_info.value.span == (399, 400)


class TestDeepInput:
    """Deep nesting and long chains parse without exhausting the stack."""

    def test_deep_parentheses(self):
        text = "(" * 300 + "1" + ")" * 300
        node = parse_text(text)
        assert node == Scalar(1 + 0j)
        assert node.span == (300, 301)

    def test_long_sum_is_left_deep(self):
        node = parse_text(" + ".join(["|a>"] * 800))
        depth = 0
        while isinstance(node, Add):
            assert node.right == KetLeaf("a")
            node = node.left
            depth += 1
        assert depth == 799

    def test_deep_negation(self):
        assert parse_text("-" * 2001 + "3") == Scalar(-3 + 0j)

    def test_deep_application(self):
        node = parse_text("f (" * 500 + "x" + ")" * 500)
        for _ in range(500):
            assert isinstance(node, Apply)
            node = node.arg
        assert node == OpLeaf("x")
