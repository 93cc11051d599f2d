from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracgronwall.errors import DomainError, ExprSyntaxError, UnknownVariableError
from fracgronwall.expr import (
    BinOp,
    Call,
    Neg,
    Num,
    Pow,
    Var,
    as_expr,
    constant_value,
    evaluate,
    evaluate_masked,
    parse,
    rename,
    substitute,
    to_text,
)


def test_parse_and_evaluate():
    assert evaluate(parse("t^(-1/2) + 9*t^(1/2)", {"t"}), t=1.0) == 10.0
    assert evaluate(parse("t^(-1/3)", {"t"}), t=8.0) == pytest.approx(0.5, rel=1e-15)
    assert evaluate(parse("t^(-11/12)+t^(-5/6)", {"t"}), t=1.0) == 2.0


def test_parse_structure():
    assert parse("u^(1/2)", {"u"}) == Pow(Var("u"), 0.5)
    assert parse("sqrt(u)", {"u"}) == Pow(Var("u"), 0.5)
    # right-associative power, unary minus below power
    assert parse("2^3^2", set()) == Pow(Num(2.0), 9.0)
    assert evaluate(parse("-2^2", set())) == -4.0
    assert evaluate(parse("2*3+4/2-1", set())) == 7.0
    assert parse("min(t, 1)", {"t"}) == Call("min", (Var("t"), Num(1.0)))


@pytest.mark.parametrize(("text", "offset"), [
    ("t +* 2", 3),
    ("2t", 1),
    ("t^x", 2),
    ("(t", 2),
    ("ln(t, t)", 0),
    ("t $ 1", 2),
    ("", 0),
])
def test_syntax_errors(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text, {"t", "x"})
    assert info.value.offset == offset


def test_unknown_variable():
    with pytest.raises(UnknownVariableError) as info:
        parse("t + u", {"t"})
    assert info.value.name == "u"
    assert info.value.offset == 4


@pytest.mark.parametrize(("text", "t"), [
    ("ln(t)", 0.0),
    ("t^(-1/2)", 0.0),
    ("t^(1/2)", -1.0),
    ("1/t", 0.0),
    ("exp(t)", 1000.0),
])
def test_domain_errors(text, t):
    with pytest.raises(DomainError):
        evaluate(parse(text, {"t"}), t=t)


def test_arrays_and_masks():
    e = parse("ln(t) + x", {"t", "x"})
    t = np.array([1.0, math.e, 0.0])
    with pytest.raises(DomainError):
        evaluate(e, t=t, x=1.0)
    v, ok = evaluate_masked(e, t=t, x=1.0)
    assert ok.tolist() == [True, True, False]
    np.testing.assert_allclose(v[:2], [1.0, 2.0])
    assert evaluate(parse("t*0 + 3", {"t"}), t=np.ones(4)).shape == (4,)


def test_helpers():
    e = parse("t^(-1/3)*x", {"t", "x"})
    assert evaluate(substitute(e, "x", 2.0), t=8.0) == pytest.approx(1.0)
    assert rename(parse("t^2", {"t"}), "t", "u") == Pow(Var("u"), 2.0)
    assert constant_value(parse("2/3", set())) == pytest.approx(2 / 3)
    assert constant_value(parse("t", {"t"})) is None
    assert as_expr(1.5) == Num(1.5)
    assert parse("t", {"t"}).variables == frozenset({"t"})


# {{{ round trip

_leaves = st.one_of(
    st.sampled_from([Var("t"), Var("x"), Var("u")]),
    st.floats(0.0, 1e6, allow_nan=False).map(Num),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda a: BinOp(*a)),
        st.tuples(children, st.floats(-5, 5, allow_nan=False)).map(lambda a: Pow(*a)),
        st.tuples(st.sampled_from(["exp", "ln", "abs"]), children).map(
            lambda a: Call(a[0], (a[1],))),
        st.tuples(st.sampled_from(["min", "max"]), children, children).map(
            lambda a: Call(a[0], (a[1], a[2]))),
    )


expressions = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=1000, deadline=None)
@given(expressions)
def test_text_round_trip(e):
    assert parse(to_text(e), {"t", "x", "u"}) == e

# }}}
