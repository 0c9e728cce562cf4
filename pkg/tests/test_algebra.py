"""Testing exact polynomial algebra in polypart"""

import logging
import os
from fractions import Fraction

import pytest

from polypart.algebra import (
    CONTAINED_IN_Z,
    MultiPoly,
    UniPoly,
    ZeroPolynomialError,
    count_roots_in_interval,
    isolate_roots,
    line_through,
    line_zero_intersections,
    lines_contained,
    monomial_count,
    monomials,
    normalize_line,
    product,
    restrict_to_segment,
    segment_has_root,
)
from polypart.util.seeding import make_rng, random_fraction

logger = logging.getLogger(__name__)

TESTDIR = os.path.dirname(os.path.abspath(__file__))

X = MultiPoly.variable(2, 0)
Y = MultiPoly.variable(2, 1)
CIRCLE = X * X + Y * Y - 1


def test_eval_poly():
    """Exact evaluation, including the zero polynomial"""
    assert CIRCLE.eval((0, 0)) == -1
    assert (X * Y)((2, 3)) == 6
    assert MultiPoly.zero(2).eval(("7/3", "-1")) == 0
    assert CIRCLE.eval(("3/5", "4/5")) == 0
    with pytest.raises(ValueError):
        CIRCLE.eval((1, 2, 3))


@pytest.mark.parametrize(
    "d, D, expected", [(2, 2, 5), (2, 1, 2), (3, 2, 9), (1, 4, 4), (3, 0, 0)]
)
def test_monomial_count(d, D, expected):
    """binom(D+d, d) - 1 nonconstant monomials"""
    assert monomial_count(d, D) == expected
    assert len(monomials(d, D)) == expected + 1


def test_monomial_order():
    """Constant first, then by degree with the first exponent descending"""
    assert monomials(2, 2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    with pytest.raises(ValueError):
        monomial_count(0, 2)


def test_arithmetic():
    """Ring operations agree with pointwise evaluation"""
    f = X * X - 2 * Y + Fraction(1, 3)
    g = X * Y + 5
    point = (Fraction(2, 7), Fraction(-3, 2))
    assert (f + g)(point) == f(point) + g(point)
    assert (f - g)(point) == f(point) - g(point)
    assert (f * g)(point) == f(point) * g(point)
    assert (g**3)(point) == g(point) ** 3
    assert (f - f).is_zero()
    assert (f * g).degree() == 4
    assert f + 0 == f
    assert product([X, Y, X]) == X * X * Y
    assert hash(X * Y) == hash(Y * X)


def test_dense_round_trip():
    """Dense vectors over the fixed order rebuild the polynomial"""
    dense = CIRCLE.to_dense()
    assert dense == [-1, 0, 0, 1, 0, 1]
    assert MultiPoly.from_dense(2, 2, dense) == CIRCLE
    with pytest.raises(ValueError):
        MultiPoly.from_dense(2, 2, [1, 2])


def test_sign_at_matches_eval():
    """Integer sign evaluation agrees with exact evaluation"""
    rng = make_rng(11)
    f = X**3 - Fraction(7, 5) * X * Y + Fraction(1, 9) * Y * Y - Fraction(2, 3)
    for _ in range(200):
        point = (
            random_fraction(rng, -3, 3, 17),
            random_fraction(rng, -3, 3, 13),
        )
        value = f(point)
        assert f.sign_at(point) == (value > 0) - (value < 0)
    assert MultiPoly.zero(2).sign_at((1, 1)) == 0


def test_compose_affine():
    """f(a x + b) evaluated directly and through the composition agree"""
    f = X * X * Y - 3 * Y + 2
    g = f.compose_affine((Fraction(1, 2), 3), (-1, Fraction(2, 5)))
    point = (Fraction(5, 3), Fraction(-1, 4))
    mapped = (Fraction(1, 2) * point[0] - 1, 3 * point[1] + Fraction(2, 5))
    assert g(point) == f(mapped)


def test_text_format(tmpdir):
    """Polynomials survive the fixture text format"""
    f = Fraction(3, 4) * X * X - Y + 7
    text = f.to_text()
    assert "2 0 : 3/4" in text
    assert MultiPoly.from_text(text) == f
    tmpdir.chdir()
    with open("poly.txt", "w") as fhandle:
        fhandle.write("# a comment\n" + text)
    with open("poly.txt") as fhandle:
        assert MultiPoly.from_text(fhandle.read()) == f
    with pytest.raises(ValueError):
        MultiPoly.from_text("1 0 3/4")
    with pytest.raises(ValueError):
        MultiPoly.from_text("1 0 : 1\n1 0 : 2")


def test_restrict_to_segment():
    """t=0 is p and t=1 is q"""
    assert restrict_to_segment(CIRCLE, (0, 0), (2, 0)) == UniPoly([-1, 0, 4])
    assert restrict_to_segment(X, (-1, 0), (1, 0)) == UniPoly([-1, 2])
    assert restrict_to_segment(Y, (0, 5), (1, 5)) == UniPoly([5])
    with pytest.raises(ValueError):
        restrict_to_segment(X, (1, 1), (1, 1))


@pytest.mark.parametrize(
    "coeffs, low, high, expected",
    [
        ([-1, 0, 1], -2, 2, 2),
        ([1, 0, 1], -10, 10, 0),
        ([0, 0, 1], -1, 1, 1),
        ([-1, 0, 1], -1, 1, 0),
        ([6, -5, 1], 2, 3, 0),
    ],
)
def test_count_roots_open(coeffs, low, high, expected):
    """Distinct roots strictly inside the interval"""
    assert count_roots_in_interval(UniPoly(coeffs), low, high) == expected


def test_count_roots_closed():
    """Roots at the endpoints count in the closed interval"""
    g = UniPoly([-1, 0, 1])
    assert count_roots_in_interval(g, -1, 1, open_interval=False) == 2
    g = UniPoly([6, -5, 1]) * UniPoly([6, -5, 1])
    assert count_roots_in_interval(g, 2, 3, open_interval=False) == 2
    with pytest.raises(ZeroPolynomialError):
        count_roots_in_interval(UniPoly([]), 0, 1)
    with pytest.raises(ValueError):
        count_roots_in_interval(g, 1, 1)


def test_count_roots_against_sympy():
    """Sturm counts agree with an independent root counter"""
    sympy = pytest.importorskip("sympy")
    t = sympy.Symbol("t")
    rng = make_rng(5)
    for _ in range(40):
        degree = int(rng.integers(1, 7))
        coeffs = [int(v) for v in rng.integers(-6, 7, size=degree + 1)]
        if coeffs[-1] == 0:
            coeffs[-1] = 1
        low = random_fraction(rng, -3, 0, 7)
        high = random_fraction(rng, 1, 4, 5)
        g = UniPoly(coeffs)
        expected = sympy.Poly(
            sum(c * t**i for i, c in enumerate(coeffs)), t
        ).count_roots(sympy.Rational(low.numerator, low.denominator),
                      sympy.Rational(high.numerator, high.denominator))
        assert count_roots_in_interval(g, low, high, open_interval=False) == expected


def test_isolate_roots():
    """One root inside every interval, none at the endpoints"""
    g = UniPoly([0, -1, 0, 1])  # t^3 - t
    intervals = isolate_roots(g)
    assert len(intervals) == 3
    for lo, hi in intervals:
        assert lo < hi
        assert g.eval(lo) and g.eval(hi)
        assert count_roots_in_interval(g, lo, hi) == 1
    assert [lo < 0 < hi for lo, hi in intervals] == [False, True, False]
    assert isolate_roots(UniPoly([1, 0, 1])) == []


def test_line_zero_intersections():
    """A line lies in Z(f) or meets it in at most deg f points"""
    assert line_zero_intersections(CIRCLE, (0, 1, 0)) == 2
    assert line_zero_intersections(X * Y, (1, 0, 0)) is CONTAINED_IN_Z
    assert line_zero_intersections(X * Y, (0, 1, -1)) == 1
    assert line_zero_intersections(CIRCLE, ((0, 1), (1, 1))) == 1
    assert line_zero_intersections(CIRCLE, (0, 1, -2)) == 0
    with pytest.raises(ZeroPolynomialError):
        line_zero_intersections(MultiPoly.zero(2), (1, 0, 0))


def test_line_zero_intersections_random():
    """Random polynomials never meet a line in more than deg f points"""
    rng = make_rng(2024)
    for _ in range(150):
        degree = int(rng.integers(1, 6))
        coeffs = {
            exps: random_fraction(rng, -4, 4, 3) for exps in monomials(2, degree)
        }
        f = MultiPoly(2, coeffs)
        if f.is_zero():
            continue
        line = tuple(random_fraction(rng, -5, 5, 4) for _ in range(3))
        if line[0] == 0 and line[1] == 0:
            continue
        count = line_zero_intersections(f, line)
        assert count is CONTAINED_IN_Z or count <= f.degree()


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_line_zero_intersections_many(seed):
    """Ten thousand random polynomial and line pairs over twenty seeds"""
    rng = make_rng(seed, 11)
    for _ in range(500):
        degree = int(rng.integers(1, 7))
        coeffs = {exps: random_fraction(rng, -8, 8, 5) for exps in monomials(2, degree)}
        f = MultiPoly(2, coeffs)
        if f.is_zero():
            continue
        line = tuple(random_fraction(rng, -9, 9, 7) for _ in range(3))
        if line[0] == 0 and line[1] == 0:
            continue
        count = line_zero_intersections(f, line)
        assert count is CONTAINED_IN_Z or count <= f.degree()


@pytest.mark.parametrize("num_vars", [2, 3])
def test_restriction_commutes_with_eval(num_vars):
    """g(t) equals f at p + t (q - p) for random f, segments and t"""
    rng = make_rng(77, num_vars)
    for _ in range(100):
        degree = int(rng.integers(0, 5))
        coeffs = {
            exps: random_fraction(rng, -6, 6, 4) for exps in monomials(num_vars, degree)
        }
        f = MultiPoly(num_vars, coeffs)
        if f.is_zero():
            continue
        p = tuple(random_fraction(rng, -3, 3, 8) for _ in range(num_vars))
        q = tuple(random_fraction(rng, -3, 3, 8) for _ in range(num_vars))
        if p == q:
            continue
        g = restrict_to_segment(f, p, q)
        assert g.degree() <= f.degree()
        for t in (Fraction(0), Fraction(1), random_fraction(rng, -2, 2, 16)):
            point = tuple(a + t * (b - a) for a, b in zip(p, q))
            assert g.eval(t) == f.eval(point)


def test_segment_has_root():
    """Closed-segment zero test"""
    assert segment_has_root(CIRCLE, (0, 0), (2, 0))
    assert not segment_has_root(CIRCLE, (0, 0), (Fraction(1, 2), 0))
    assert segment_has_root(CIRCLE, (0, 0), (1, 0))
    assert not segment_has_root(X, (1, 1), (2, 3))
    # Two roots inside the segment, positive at both ends
    assert segment_has_root(X * X - Fraction(1, 4), (-1, 0), (1, 0))
    # Vanishes on the whole segment
    assert segment_has_root(Y, (0, 0), (1, 0))


def test_lines():
    """Normalized line triples and contained lines"""
    assert normalize_line(-2, 4, 6) == (1, -2, -3)
    assert normalize_line(0, Fraction(-1, 2), 1) == (0, 1, -2)
    assert line_through((0, 0), (1, 1)) == (1, -1, 0)
    with pytest.raises(ValueError):
        normalize_line(0, 0, 1)
    lines = [(1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 1, -1)]
    assert lines_contained(X * Y, lines) == [0, 1]


def test_polynomial_fixture():
    """The fixture file parses to the unit circle"""
    with open(os.path.join(TESTDIR, "data", "unit_circle.poly")) as fhandle:
        circle = MultiPoly.from_text(fhandle.read())
    x = MultiPoly.variable(2, 0)
    y = MultiPoly.variable(2, 1)
    assert circle == x * x + y * y - 1
    assert circle.eval((Fraction(3, 5), Fraction(4, 5))) == 0
