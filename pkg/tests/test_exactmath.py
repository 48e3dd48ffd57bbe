from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quadfunc.exactmath import (
    ALPHA,
    BETA,
    DegreeError,
    Poly1,
    Poly2,
    ZeroPolynomialError,
    integer_divisors,
    poly_from_roots,
    poly_gcd,
    rational_roots,
    solve_linear_in_beta,
    substitute_beta,
)

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)
poly1s = st.lists(fractions, max_size=6).map(Poly1.from_list)
poly2s = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), fractions, max_size=6
).map(Poly2)


# ---- Poly1 -----------------------------------------------------------------


def test_poly1_basics():
    x = Poly1.x()
    p = 3 * x**2 - x + Fraction(1, 2)
    assert p.degree() == 2
    assert p.leading() == 3
    assert p(2) == Fraction(21, 2)
    assert str(p) == "3*alpha^2 - alpha + 1/2"
    assert Poly1().degree() == -1
    assert Poly1().is_zero()


def test_poly1_divmod_reconstructs():
    x = Poly1.x()
    a = x**5 - 3 * x**2 + 7
    b = 2 * x**2 + x - 1
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree() < b.degree()


def test_poly1_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Poly1.x().divmod(Poly1())


@settings(max_examples=150, deadline=None)
@given(poly1s, poly1s, poly1s)
def test_poly1_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly1()


@settings(max_examples=150, deadline=None)
@given(poly1s, poly1s, fractions)
def test_poly1_eval_is_homomorphism(a, b, x):
    assert (a * b)(x) == a(x) * b(x)
    assert (a + b)(x) == a(x) + b(x)


@settings(max_examples=100, deadline=None)
@given(poly1s, poly1s)
def test_poly1_divmod_property(a, b):
    if b.is_zero():
        return
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree() < b.degree()


def test_poly1_primitive_and_content():
    p = Poly1.from_list([Fraction(1, 2), Fraction(-3, 4), Fraction(5, 6)])
    prim = p.primitive()
    assert all(c.denominator == 1 for c in prim.coeffs.values())
    assert prim.leading() > 0
    assert p == prim * p.content() or p == -prim * p.content()


# ---- Poly2 -----------------------------------------------------------------


def test_poly2_rendering_and_parse():
    p = Fraction(27, 2) * ALPHA**2 - Fraction(3, 2) * ALPHA + BETA
    text = str(p)
    assert text == "27/2*alpha^2 - 3/2*alpha + beta"
    assert Poly2.parse(text) == p


@settings(max_examples=150, deadline=None)
@given(poly2s)
def test_poly2_parse_roundtrip(p):
    assert Poly2.parse(str(p)) == p


@settings(max_examples=150, deadline=None)
@given(poly2s, poly2s, poly2s)
def test_poly2_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@settings(max_examples=100, deadline=None)
@given(poly2s, poly2s, fractions, fractions)
def test_poly2_eval_matches_sympy(a, b, x, y):
    al, be = sympy.symbols("alpha beta")

    def to_sympy(p):
        return sum(sympy.Rational(c.numerator, c.denominator) * al**i * be**j for (i, j), c in p.terms.items())

    expected = sympy.expand(to_sympy(a) * to_sympy(b)).subs({al: x, be: y})
    assert (a * b).eval(x, y) == Fraction(str(expected))


def test_poly2_degree_views():
    p = ALPHA**3 * BETA + 2 * BETA**2 - ALPHA
    assert p.degree() == 4
    assert p.degree_alpha() == 3
    assert p.degree_beta() == 2
    assert p.coeff_beta(1) == Poly1.x() ** 3
    assert p.at_alpha(2).var == "beta"


# ---- elimination -----------------------------------------------------------


def test_solve_linear_in_beta_constant_denominator():
    p = 16 * ALPHA**2 + 4 * ALPHA - 5 * BETA
    (num, den), excluded = solve_linear_in_beta(p)
    assert den == Poly1.const(1)
    assert excluded == []
    assert num == Poly1.from_list([0, Fraction(4, 5), Fraction(16, 5)])


def test_solve_linear_in_beta_reports_denominator_roots():
    p = (3 * ALPHA - 1) * BETA - ALPHA**2
    (num, den), excluded = solve_linear_in_beta(p)
    assert excluded == [Fraction(1, 3)]
    assert den.leading() > 0
    assert substitute_beta(p, (num, den)).is_zero()


def test_solve_linear_rejects_other_degrees():
    with pytest.raises(DegreeError):
        solve_linear_in_beta(BETA**2 + ALPHA)


@settings(max_examples=100, deadline=None)
@given(poly1s, poly1s, fractions)
def test_substitution_clears_denominators(n, d, a0):
    if d.is_zero() or d(a0) == 0:
        return
    p = ALPHA * BETA**2 - 3 * BETA + ALPHA**2
    beta = n(a0) / d(a0)
    assert substitute_beta(p, (n, d))(a0) == p.eval(a0, beta) * d(a0) ** 2


# ---- roots -----------------------------------------------------------------


def test_integer_divisors():
    assert integer_divisors(12) == [1, 2, 3, 4, 6, 12]
    assert integer_divisors(-7) == [1, 7]
    with pytest.raises(ValueError):
        integer_divisors(0)


def test_rational_roots_known_eliminant():
    p = Poly1.from_list([0, -4, 55, -186, 135])
    roots, residual = rational_roots(p)
    assert roots == [(0, 1), (Fraction(1, 9), 1), (Fraction(4, 15), 1), (1, 1)]
    assert residual.is_constant()


def test_rational_roots_keeps_irrational_part():
    x = Poly1.x()
    roots, residual = rational_roots((x - 2) ** 2 * (x**2 - 2))
    assert roots == [(2, 2)]
    assert residual == x**2 - 2


def test_rational_roots_zero_polynomial():
    with pytest.raises(ZeroPolynomialError):
        rational_roots(Poly1())


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.fractions(min_value=-30, max_value=30, max_denominator=20), min_size=1, max_size=5),
    st.integers(1, 5),
)
def test_rational_roots_recovers_planted_roots(planted, scale):
    p = poly_from_roots([(r, 1) for r in planted]) * scale
    roots, residual = rational_roots(p)
    expected = {}
    for r in planted:
        expected[r] = expected.get(r, 0) + 1
    assert dict(roots) == expected
    assert residual.is_constant()


def test_rational_roots_agree_with_sympy():
    x = sympy.Symbol("x")
    coeffs = [-15360, -16120, 2303, 2401]
    ours, residual = rational_roots(Poly1.from_list(coeffs))
    theirs = [r for r in sympy.roots(sympy.Poly(coeffs[::-1], x), filter="Q")]
    assert ours == [] and len(theirs) == 0
    assert residual.degree() == 3


def test_poly_gcd():
    x = Poly1.x()
    g = poly_gcd((x - 1) * (x + 2) * (3 * x - 1), (x + 2) * (3 * x - 1) * x)
    assert g == ((x + 2) * (3 * x - 1)).primitive()
    assert poly_gcd(x - 1, x + 1).is_constant()
