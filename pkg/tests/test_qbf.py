import hypothesis as hyp
import hypothesis.strategies as st
import pytest

from safelc.qbf import (
    And,
    BoolVar,
    Not,
    Or,
    QBF,
    Quantifier,
    formula_vars,
    parse_qbf,
    qbf_text,
)
from safelc.qbf_oracle import MAX_QUANTIFIERS, eval_qbf
from safelc.syntax import ParseError


def test_parse_example():
    q = parse_qbf("forall x. exists y. (x | y) & (!x | !y)")
    assert q.prefix == (
        (Quantifier.FORALL, "x"),
        (Quantifier.EXISTS, "y"),
    )
    assert q.matrix == And(
        Or(BoolVar("x"), BoolVar("y")),
        Or(Not(BoolVar("x")), Not(BoolVar("y"))),
    )


def test_connective_precedence():
    q = parse_qbf("forall x. x | x & !x")
    assert q.matrix == Or(BoolVar("x"), And(BoolVar("x"), Not(BoolVar("x"))))


def test_left_associativity():
    q = parse_qbf("exists x. x | x | x")
    assert q.matrix == Or(Or(BoolVar("x"), BoolVar("x")), BoolVar("x"))
    q = parse_qbf("exists x. x & x & x")
    assert q.matrix == And(And(BoolVar("x"), BoolVar("x")), BoolVar("x"))


def test_printer_minimal_parens():
    text = "forall x. exists y. (x | y) & (!x | !y)"
    assert qbf_text(parse_qbf(text)) == text
    assert qbf_text(parse_qbf("forall x. x | x & x")) == "forall x. x | x & x"


def test_parse_errors():
    for bad in (
        "",
        "x & y",
        "forall x",
        "forall x. ",
        "forall x. y",
        "forall x. forall x. x",
        "forall x. x)",
        "forall x. x $ x",
        "forall forall. x",
    ):
        with pytest.raises(ParseError):
            parse_qbf(bad)


def test_qbf_validation():
    with pytest.raises(ValueError):
        QBF((), BoolVar("x"))
    with pytest.raises(ValueError):
        QBF(
            ((Quantifier.FORALL, "x"), (Quantifier.EXISTS, "x")),
            BoolVar("x"),
        )
    with pytest.raises(ValueError):
        QBF(((Quantifier.FORALL, "x"),), BoolVar("y"))


def test_formula_size():
    q = parse_qbf("forall x. exists y. (x | y) & (!x | !y)")
    # 2 quantifiers + 5 connectives + 4 atoms
    assert q.size == 11
    assert formula_vars(q.matrix) == frozenset({"x", "y"})


names = st.sampled_from(("x", "y", "z"))
formulas = st.recursive(
    st.builds(BoolVar, names),
    lambda sub: st.one_of(
        st.builds(Not, sub),
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
    ),
    max_leaves=8,
)


@hyp.given(formulas)
def test_print_parse_roundtrip(matrix):
    prefix = tuple((Quantifier.FORALL, n) for n in ("x", "y", "z"))
    q = QBF(prefix, matrix)
    assert parse_qbf(qbf_text(q)) == q


# --------------------------------------------------------------------------
# the brute-force oracle


def test_oracle_basics():
    assert not eval_qbf(parse_qbf("forall x. x"))
    assert eval_qbf(parse_qbf("exists x. x"))
    assert eval_qbf(parse_qbf("forall x. x | !x"))
    assert not eval_qbf(parse_qbf("exists x. x & !x"))


def test_oracle_two_quantifiers():
    assert eval_qbf(parse_qbf("forall x. exists y. (x & y) | (!x & !y)"))
    assert not eval_qbf(parse_qbf("exists x. forall y. (x & y) | (!x & !y)"))
    assert eval_qbf(parse_qbf("forall x. exists y. (x | y) & (!x | !y)"))


def test_oracle_quantifier_order_matters():
    assert eval_qbf(parse_qbf("forall x. exists y. x & y | !x & !y"))
    assert not eval_qbf(parse_qbf("exists y. forall x. x & y | !x & !y"))


def test_oracle_unused_quantifier():
    assert eval_qbf(parse_qbf("forall x. exists y. x | !x"))


def test_oracle_quantifier_bound():
    prefix = tuple(
        (Quantifier.FORALL, f"v{i}") for i in range(MAX_QUANTIFIERS + 1)
    )
    big = QBF(prefix, Or(BoolVar("v0"), Not(BoolVar("v0"))))
    with pytest.raises(ValueError):
        eval_qbf(big)


@hyp.given(formulas)
def test_oracle_negation_duality(matrix):
    # !(forall x y z. m) == exists x y z. !m
    all_prefix = tuple((Quantifier.FORALL, n) for n in ("x", "y", "z"))
    any_prefix = tuple((Quantifier.EXISTS, n) for n in ("x", "y", "z"))
    assert eval_qbf(QBF(all_prefix, matrix)) != eval_qbf(
        QBF(any_prefix, Not(matrix))
    )
