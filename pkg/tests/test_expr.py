import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labopt.exceptions import (
    EvaluationError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    VariableIndexError,
)
from labopt.expr import (
    BinOp,
    Call,
    Num,
    Var,
    eval_expression,
    format_expression,
    max_variable,
    parse_constraint,
    parse_expression,
)


def ev(text, x, n=None):
    x = np.asarray(x, dtype=float)
    return eval_expression(parse_expression(text, n or x.shape[-1]), x)


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("(x1 - 2)^2 + x2^2 - 1.1", [2, 0], -1.1),
        ("x1^2+x2^2-1", [1, 0], 0.0),
        ("2^3^2", [0], 512.0),  # right associative
        ("-x1^2", [3], -9.0),  # unary minus binds looser than ^
        ("+x1 - -x1", [2], 4.0),
        ("1 - 2 - 3", [0], -4.0),
        ("8 / 4 / 2", [0], 1.0),
        ("2 * pi", [0], 2 * math.pi),
        ("sqrt(x1) + abs(-3) + exp(0) + log(1)", [4], 6.0),
        ("sin(0) + cos(0) + tan(0)", [0], 1.0),
        ("min(x1, x2, 3) + max(x1, x2)", [1, 5], 6.0),
        ("1e-3 * 2.5E2", [0], 0.25),
    ],
)
def test_evaluation_examples(text, x, expected):
    assert ev(text, x) == pytest.approx(expected, abs=1e-12)


def test_batch_evaluation_matches_pointwise(rng):
    tree = parse_expression("x1 * sin(x2) - x3^2 / (1 + abs(x1))", 3)
    X = rng.normal(size=(20, 3))
    out = eval_expression(tree, X)
    assert out.shape == (20,)
    assert np.allclose(out, [eval_expression(tree, x) for x in X])


def test_constant_expression_broadcasts_over_batch():
    assert np.array_equal(eval_expression(parse_expression("0", 2), np.zeros((4, 2))), np.zeros(4))


def test_tree_shape():
    tree = parse_expression("x1 + 2 * x2", 2)
    assert tree == BinOp("+", Var(0), BinOp("*", Num(2.0), Var(1)))
    assert max_variable(tree) == 2


@pytest.mark.parametrize(
    "text, n, exc, offset",
    [
        ("x1 +", 1, ExpressionSyntaxError, 4),
        ("(x1", 1, ExpressionSyntaxError, 3),
        ("x1 $ 2", 1, ExpressionSyntaxError, 3),
        ("foo(x1)", 1, UnknownIdentifierError, 0),
        ("y + 1", 1, UnknownIdentifierError, 0),
        ("x3", 2, VariableIndexError, 0),
        ("x0", 2, VariableIndexError, 0),
        ("sqrt(1, 2)", 1, ExpressionSyntaxError, None),
        ("", 1, ExpressionSyntaxError, 0),
    ],
)
def test_syntax_errors_carry_offsets(text, n, exc, offset):
    with pytest.raises(exc) as info:
        parse_expression(text, n)
    assert isinstance(info.value, ValueError)
    if offset is not None:
        assert info.value.offset == offset
        assert f"at offset {offset}" in str(info.value)


@pytest.mark.parametrize("text, x", [("1 / x1", [0]), ("sqrt(x1)", [-1]), ("log(x1)", [0]), ("x1 ^ 0.5", [-2])])
def test_domain_errors(text, x):
    with pytest.raises(EvaluationError):
        ev(text, x)


def test_point_too_short():
    with pytest.raises(VariableIndexError):
        eval_expression(parse_expression("x2", 2), np.zeros(1))


@pytest.mark.parametrize(
    "text, x, expected",
    [
        ("x1^2 + x2^2 <= 1", [0.5, 0], -0.75),
        ("x1 >= 2", [3, 0], -1.0),
        ("x1 + x2", [1, 1], 2.0),
        ("x1 < 0", [1, 0], 1.0),
    ],
)
def test_constraints_normalised_to_less_equal_zero(text, x, expected):
    assert eval_expression(parse_constraint(text, 2), np.asarray(x, float)) == pytest.approx(expected)


def test_disjunction_is_min():
    tree = parse_constraint("(x1 - 2)^2 + x2^2 <= 1.1 or (x1 + 2)^2 + x2^2 <= 0.9", 2)
    assert isinstance(tree, Call) and tree.name == "min"
    assert eval_expression(tree, np.array([2.0, 0.0])) == pytest.approx(-1.1)
    assert eval_expression(tree, np.array([-2.0, 0.0])) == pytest.approx(-0.9)
    assert eval_expression(tree, np.array([0.0, 0.0])) > 0


def test_double_comparison_rejected():
    with pytest.raises(ExpressionSyntaxError):
        parse_constraint("0 <= x1 <= 1", 1)


_leaf = st.one_of(
    st.floats(0.1, 10, allow_nan=False).map(lambda v: f"{v!r}"),
    st.sampled_from(["x1", "x2", "x3"]),
)
_exprs = st.recursive(
    _leaf,
    lambda inner: st.one_of(
        st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        inner.map(lambda s: f"-{s}"),
        inner.map(lambda s: f"abs({s})"),
    ),
    max_leaves=12,
)


@settings(max_examples=150, deadline=None)
@given(_exprs, st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_format_round_trip_preserves_value(text, x):
    tree = parse_expression(text, 3)
    again = parse_expression(format_expression(tree), 3)
    x = np.asarray(x)
    assert eval_expression(again, x) == pytest.approx(eval_expression(tree, x), rel=1e-12, abs=1e-12)
