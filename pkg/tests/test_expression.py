import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ckthermo.errors import EvaluationError, PotentialSyntaxError
from ckthermo.expression import (EULER, BinOp, Call, Num, Sym, depth, evaluate,
                                 parse_potential, to_text)


def test_euler_is_a_constant_node():
    assert parse_potential("euler") == EULER
    assert EULER.value == math.e


def test_sum_with_indicator():
    node = parse_potential("1.5 + 0.5*eq(sym(0),1)")
    assert node == BinOp("+", Num(1.5), BinOp("*", Num(0.5), Call("eq", (Sym(0), Num(1.0)))))
    assert depth(node) == 1


def test_unclosed_call_reports_offset():
    with pytest.raises(PotentialSyntaxError) as info:
        parse_potential("log(")
    assert info.value.offset == 4


@pytest.mark.parametrize("text, offset", [
    ("", 0), ("1 +", 3), ("sym(-1)", 4), ("foo(1)", 0), ("1 2", 2), ("eq(1)", 4), ("2 $ 3", 2),
])
def test_syntax_errors(text, offset):
    with pytest.raises(PotentialSyntaxError) as info:
        parse_potential(text)
    assert info.value.offset == offset


def test_precedence_and_unary_minus():
    pts = np.array([[1]])
    assert evaluate(parse_potential("2 + 3*4"), pts)[0] == 14
    assert evaluate(parse_potential("(2 + 3)*4"), pts)[0] == 20
    assert evaluate(parse_potential("-2 - -3"), pts)[0] == 1
    assert evaluate(parse_potential("8/2/2"), pts)[0] == 2


def test_depth_counts_highest_coordinate():
    assert depth(parse_potential("3")) == 0
    assert depth(parse_potential("sym(0) + pow(2, sym(3))")) == 4


def test_evaluate_is_rowwise():
    node = parse_potential("sym(0) + 10*sym(1)")
    out = evaluate(node, np.array([[1, 2], [2, 1], [2, 2]]))
    np.testing.assert_array_equal(out, [21, 12, 22])


def test_short_points_rejected():
    with pytest.raises(EvaluationError):
        evaluate(parse_potential("sym(2)"), np.array([[1, 1]]))


@pytest.mark.parametrize("text, message", [
    ("1/(sym(0) - 2)", "division by zero"),
    ("log(sym(0) - 2)", "non-positive"),
    ("pow(sym(0) - 3, 0.5)", "pow"),
    ("exp(1000*sym(0))", "non-finite"),
])
def test_evaluation_errors_name_the_cylinder(text, message):
    with pytest.raises(EvaluationError) as info:
        evaluate(parse_potential(text), np.array([[1, 1], [2, 1]]))
    assert message in str(info.value)
    assert info.value.word is not None


_exprs = st.recursive(
    st.one_of(st.integers(0, 9).map(lambda v: Num(float(v))), st.integers(0, 2).map(Sym)),
    lambda inner: st.one_of(
        st.tuples(st.sampled_from("+-*"), inner, inner).map(lambda t: BinOp(*t)),
        inner.map(lambda a: Call("exp", (BinOp("*", Num(0.01), a),))),
        st.tuples(inner, inner).map(lambda t: Call("eq", t)),
    ),
    max_leaves=8,
)


@given(_exprs)
def test_to_text_roundtrips(node):
    pts = np.array([[1, 2, 3], [3, 1, 2]])
    again = parse_potential(to_text(node))
    np.testing.assert_allclose(evaluate(again, pts), evaluate(node, pts), rtol=1e-12)
