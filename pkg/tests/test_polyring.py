import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diokex.errors import DimensionError, PolySyntaxError, RingMismatch, UnknownVariable
from diokex.polyring import (
    Polynomial,
    RingSpec,
    poly_add,
    poly_eval,
    poly_format,
    poly_mul,
    poly_parse,
    poly_pow,
)

from conftest import TOY, polynomials

F15 = RingSpec(2, 15)


def P(text, spec=TOY):
    return poly_parse(text, spec)


def test_add_cancels():
    assert poly_add(P("x1 + 1"), P("x1 - 1")) == P("2*x1")


def test_add_constant():
    assert poly_add(P("x1*x2^2"), P("3")) == P("x1*x2^2 + 3")


def test_add_zero_identity():
    p = P("x1^2 - 7*x2 + 4")
    assert poly_add(p, Polynomial.zero(TOY)) == p


def test_mul_single_terms():
    assert poly_mul(P("x1"), P("x2^2")) == P("x1*x2^2")


def test_mul_worked_substitution():
    assert poly_mul(P("x2^2 - 1"), P("x2^6")) == P("x2^8 - x2^6")


def test_mul_one_identity():
    p = P("x1^2 - 7*x2 + 4")
    assert poly_mul(p, Polynomial.constant(1, TOY)) == p


def test_pow_cube():
    assert poly_pow(P("x1*x2^2 + 4"), 3) == P("x1^3*x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 64")


@pytest.mark.parametrize("e", [0, 1])
def test_pow_small(e):
    p = P("3*x1 - x2")
    assert poly_pow(p, e) == (Polynomial.constant(1, TOY) if e == 0 else p)


def test_pow_negative():
    with pytest.raises(ValueError):
        poly_pow(P("x1"), -1)


@pytest.mark.parametrize(
    "text, point, value",
    [
        ("x1^3 - x2^2 + 1", (2, 3), 0),
        ("x2^8 - x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 66", (2, 3), 10650),
        ("x1*x2^2", (2, 3), 18),
    ],
)
def test_eval_worked_values(text, point, value):
    assert poly_eval(P(text), point) == value


def test_eval_dimension():
    with pytest.raises(DimensionError):
        poly_eval(P("x1"), (1, 2, 3))


def test_eval_finite_reduces():
    assert poly_eval(P("x1^3", F15), (2, 0)) == 8
    assert poly_eval(P("x1^4", F15), (2, 0)) == 1


def test_mismatched_rings():
    with pytest.raises(DimensionError):
        P("x1") + poly_parse("x1", RingSpec(3))
    with pytest.raises(RingMismatch):
        P("x1") + P("x1", F15)


def test_parse_indexed():
    p = P("x1^3 - x2^2 + 1")
    assert dict(p.terms) == {(3, 0): 1, (0, 2): -1, (0, 0): 1}


def test_parse_zero():
    p = P("0")
    assert p.is_zero() and dict(p.terms) == {}


def test_format_orders_variables():
    assert poly_format(P("x2*x1")) == "x1*x2"


def test_format_worked_polynomial():
    h = P("66 + 48*x1*x2^2 + 12*x1^2*x2^4 - x2^6 + x2^8")
    assert poly_format(h) == "x2^8 - x2^6 + 12*x1^2*x2^4 + 48*x1*x2^2 + 66"


def test_format_negative_leading_and_units():
    assert poly_format(P("-x1 - 1")) == "-x1 - 1"
    assert poly_format(P("-1")) == "-1"
    assert poly_format(P("1")) == "1"


def test_format_finite_residues():
    assert poly_format(P("x1 - 1", F15)) == "x1 + 14"


def test_parse_repeated_variable():
    assert P("x1*x1^2") == P("x1^3")


@pytest.mark.parametrize("text, pos", [("x1 +", 4), ("x1 ** 2", 4), ("3x1", 1), ("x1 $ 2", 3), ("", 0)])
def test_parse_syntax_errors(text, pos):
    with pytest.raises(PolySyntaxError) as info:
        P(text)
    assert info.value.position == pos


def test_parse_unknown_variable():
    with pytest.raises(UnknownVariable):
        P("x3 + 1")
    with pytest.raises(UnknownVariable):
        P("x0")


def test_zero_polynomial_any_varcount():
    for m in (1, 2, 5):
        z = Polynomial.zero(RingSpec(m))
        assert poly_format(z) == "0" and z.degree == -1


def test_squarefree_required():
    with pytest.raises(ValueError):
        RingSpec(2, 12)


# properties

ps = polynomials(TOY)
fps = polynomials(F15)
points = st.tuples(st.integers(-6, 6), st.integers(-6, 6))


@given(ps, ps, ps)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(fps, fps, fps)
def test_ring_axioms_finite(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    for p in (a + b, a * b, a - c):
        assert all(0 < v < 15 for v in p.terms.values())


@given(ps, ps, points)
def test_eval_homomorphism(a, b, v):
    assert poly_eval(a + b, v) == poly_eval(a, v) + poly_eval(b, v)
    assert poly_eval(a * b, v) == poly_eval(a, v) * poly_eval(b, v)


@given(fps, fps, points)
def test_eval_homomorphism_finite(a, b, v):
    assert poly_eval(a + b, v) == (poly_eval(a, v) + poly_eval(b, v)) % 15
    assert poly_eval(a * b, v) == poly_eval(a, v) * poly_eval(b, v) % 15


@given(ps)
def test_canonical_form(p):
    assert 0 not in p.terms.values()
    assert poly_parse(poly_format(p), TOY) == p


@given(fps)
def test_round_trip_finite(p):
    assert poly_parse(poly_format(p), F15) == p


@settings(max_examples=30)
@given(polynomials(TOY, max_terms=3, max_exp=2, coef=5), st.integers(0, 5))
def test_pow_matches_repeated_product(p, e):
    expected = Polynomial.constant(1, TOY)
    for _ in range(e):
        expected = expected * p
    assert poly_pow(p, e) == expected
