"""Testing the polynomial ham-sandwich search"""

import logging
from fractions import Fraction

import pytest

from polypart.algebra import MultiPoly, monomials
from polypart.hamsandwich import (
    NOT_FOUND,
    BisectionCertificate,
    BisectionNotFound,
    BisectionSearch,
    bisection_allowance,
    exact_bisector_oracle,
    find_bisecting_polynomial,
    minimal_degree,
    round_coefficients,
    verify_bisection,
    veronese_lift,
)
from polypart.util.seeding import make_rng, random_fraction

logger = logging.getLogger(__name__)

X = MultiPoly.variable(2, 0)
Y = MultiPoly.variable(2, 1)

COLLINEAR = [(0, 0), (1, 0), (2, 0)]


def _random_sets(seed, num_sets, size, side=8):
    rng = make_rng(seed)
    return [
        [(random_fraction(rng, 0, side, 1), random_fraction(rng, 0, side, 1)) for _ in range(size)]
        for _ in range(num_sets)
    ]


def test_veronese_lift():
    """Monomials in the fixed order, constant left out"""
    assert veronese_lift((2, 3), 2, 2).coords == (2, 3, 4, 6, 9)
    assert veronese_lift((0, 0), 2, 3).coords == (0,) * 9
    assert veronese_lift(("1/2", "-3"), 2, 1).coords == (Fraction(1, 2), -3)
    with pytest.raises(ValueError):
        veronese_lift((1, 1), 2, 0)
    with pytest.raises(ValueError):
        veronese_lift((1, 1, 1), 2, 2)


def test_lift_matches_sign():
    """A polynomial's sign equals the sign of the lifted hyperplane test"""
    rng = make_rng(99)
    exps = monomials(2, 3)
    for _ in range(30):
        dense = [random_fraction(rng, -5, 5, 7) for _ in exps]
        f = MultiPoly.from_dense(2, 3, dense)
        point = (random_fraction(rng, -2, 2, 9), random_fraction(rng, -2, 2, 11))
        lifted = veronese_lift(point, 2, 3).coords
        value = dense[0] + sum(a * b for a, b in zip(dense[1:], lifted))
        assert f.sign_at(point) == (value > 0) - (value < 0)


@pytest.mark.parametrize(
    "size, eps, expected",
    [(3, 0, 1), (4, 0, 2), (10, Fraction(1, 20), 6), (20, Fraction(1, 20), 11)],
)
def test_bisection_allowance(size, eps, expected):
    """floor(n/2) + ceil(eps n)"""
    assert bisection_allowance(size, eps) == expected


def test_verify_bisection():
    """Exact sign counts, zeros on neither side"""
    cert = verify_bisection(X - 1, [COLLINEAR])
    assert cert[0][:3] == (1, 1, 1)
    assert cert.passed

    cert = verify_bisection(X, [[(1, 0), (2, 0)]])
    assert cert[0][:3] == (2, 0, 0)
    assert not cert.passed
    assert cert.failing_sets() == [0]

    circle = X * X + Y * Y - 1
    cert = verify_bisection(circle, [[(0, 0), (2, 0), (0, 2), (3, 3)]])
    assert cert[0][:3] == (3, 1, 0)
    assert cert[0].allowance == 2
    assert cert.excess == 1
    assert not cert.passed

    # Slack lets the same split through
    assert verify_bisection(circle, [[(0, 0), (2, 0), (0, 2), (3, 3)]], "1/4").passed

    with pytest.raises(ValueError):
        verify_bisection(MultiPoly.zero(2), [COLLINEAR])


def test_certificate_dict():
    """Certificates rebuild from their dict form"""
    cert = verify_bisection(X - 1, [COLLINEAR, [(0, 1), (5, 5)]], "1/20")
    again = BisectionCertificate.from_dict(cert.to_dict())
    assert again.counts == cert.counts
    assert again.slack == Fraction(1, 20)
    frame = cert.to_dataframe()
    assert list(frame["pass"]) == cert.verdicts
    assert len(frame) == 2


def test_round_coefficients():
    """Largest entry becomes 1, all on the 2^32 grid"""
    rounded = round_coefficients([0.5, -2.0, 1.0])
    assert rounded == [Fraction(1, 4), Fraction(-1), Fraction(1, 2)]
    with pytest.raises(ValueError):
        round_coefficients([0.0, 0.0])


def test_find_trivial():
    """Collinear triple and two parallel pairs at eps=0"""
    f, cert = find_bisecting_polynomial([COLLINEAR], 1, eps=0, seed=1, iterations=500)
    assert cert.passed
    assert f.degree() <= 1
    assert verify_bisection(f, [COLLINEAR], 0).passed

    sets = [[(0, 0), (2, 0)], [(0, 2), (2, 2)]]
    f, cert = find_bisecting_polynomial(sets, 1, eps=0, seed=1, iterations=500)
    assert verify_bisection(f, sets, 0).passed


def test_find_deterministic():
    """Same seed and key, same polynomial"""
    sets = _random_sets(3, 2, 9)
    first, _ = find_bisecting_polynomial(sets, 2, seed=17, key=(4,), iterations=800)
    second, _ = find_bisecting_polynomial(sets, 2, seed=17, key=(4,), iterations=800)
    assert first == second


def test_find_preconditions():
    """Too few monomials, empty sets and mixed dimensions are refused"""
    with pytest.raises(ValueError):
        find_bisecting_polynomial([COLLINEAR] * 3, 1)
    with pytest.raises(ValueError):
        find_bisecting_polynomial([[]], 1)
    with pytest.raises(ValueError):
        find_bisecting_polynomial([[(0, 0), (1, 1, 1)]], 1)
    with pytest.raises(ValueError):
        BisectionSearch(1, eps="3/4")


def test_not_found_carries_certificate():
    """A hopeless budget raises with the best certificate seen"""
    sets = _random_sets(8, 5, 10)
    try:
        find_bisecting_polynomial(sets, 2, eps=0, seed=0, restarts=1, iterations=1)
    except BisectionNotFound as err:
        assert err.degree == 2
        assert err.certificate is not None
        assert len(err.certificate) == 5
    # A lucky single iteration is allowed, the result is verified either way


def test_search_trace(tmpdir):
    """The optimizer trace is recorded and written as CSV"""
    search = BisectionSearch(1, eps="1/20", seed=2, restarts=2, iterations=100, record_trace=True)
    try:
        search.run([COLLINEAR + [(0, 1), (3, 1)]])
    except BisectionNotFound:
        pass
    assert list(search.trace.columns) == ["restart", "iteration", "loss", "sigma"]
    assert len(search.trace) > 0
    tmpdir.chdir()
    search.trace_to_csv("trace/bisect.csv")
    assert tmpdir.join("trace").join("bisect.csv").check()


def test_oracle_examples():
    """Exhaustive bisectors on tiny inputs"""
    f = exact_bisector_oracle([COLLINEAR], 1)
    assert f is not NOT_FOUND
    assert verify_bisection(f, [COLLINEAR], 0).passed

    f = exact_bisector_oracle([[(0, 0), (1, 1)]], 1)
    assert verify_bisection(f, [[(0, 0), (1, 1)]], 0).passed

    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    diamond = [(2, 5), (3, 4), (4, 5), (3, 6)]
    f = exact_bisector_oracle([square, diamond], 1)
    assert f is not NOT_FOUND
    assert verify_bisection(f, [square, diamond], 0).passed

    with pytest.raises(ValueError):
        exact_bisector_oracle([[(i, i * i) for i in range(15)]], 1)
    with pytest.raises(ValueError):
        exact_bisector_oracle([COLLINEAR], 2)


def test_search_agrees_with_oracle():
    """Whenever the oracle finds a bisector the search does too"""
    for seed in range(12):
        sets = _random_sets(100 + seed, 2, 4, side=6)
        oracle = exact_bisector_oracle(sets, 1)
        if oracle is NOT_FOUND:
            continue
        f, cert = find_bisecting_polynomial(sets, 1, eps=0, seed=seed, iterations=1000)
        assert cert.passed
        assert verify_bisection(f, sets, 0).passed


@pytest.mark.slow
def test_oracle_sweep():
    """200 tiny instances at 64 restarts: every oracle success is matched
    by a certified search result"""
    checked = 0
    for seed in range(200):
        num_sets = 1 + seed % 2
        size = 3 + seed % 4
        sets = _random_sets(1000 + seed, num_sets, size, side=6)
        if exact_bisector_oracle(sets, 1) is NOT_FOUND:
            continue
        f, cert = find_bisecting_polynomial(sets, 1, eps=0, seed=seed, restarts=64)
        assert cert.passed, seed
        assert verify_bisection(f, sets, 0).passed, seed
        checked += 1
    logger.info("Oracle found bisectors for %d of 200 instances", checked)
    assert checked >= 100


@pytest.mark.slow
def test_five_sets_degree_two():
    """Five 10-point sets bisected by a conic"""
    sets = _random_sets(5, 5, 10, side=64)
    f, cert = find_bisecting_polynomial(sets, 2, eps=0, seed=0, max_escalations=1)
    assert verify_bisection(f, sets, 0).passed
    assert f.degree() <= 3


@pytest.mark.parametrize(
    "d, num_sets, expected", [(2, 1, 1), (2, 2, 1), (2, 3, 2), (2, 5, 2), (2, 6, 3), (3, 4, 2)]
)
def test_minimal_degree(d, num_sets, expected):
    """Smallest degree with enough monomials"""
    assert minimal_degree(d, num_sets) == expected
