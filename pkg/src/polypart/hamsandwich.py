"""Polynomial ham-sandwich cuts

A polynomial of degree D in d variables is a hyperplane in the space of
its nonconstant monomials (the Veronese lift). Finding a polynomial that
bisects s point sets is therefore finding a hyperplane that bisects s
lifted point sets, which exists once monomial_count(d, D) >= s.

The search is numeric (a smoothed counting loss on the unit sphere of
coefficient vectors, several seeded restarts), but nothing leaves this
module unverified: candidates are rounded to rationals and their sign
counts recomputed exactly before they are returned.
"""

import itertools
import logging
import os
from collections import namedtuple
from fractions import Fraction

import numpy as np
import pandas as pd

from .algebra import MultiPoly, monomial_count, monomials
from .util import ceil_fraction, parse_rational
from .util.linalg import nullspace, project_out, rank, solve_min_norm
from .util.seeding import make_rng

logger = logging.getLogger(__name__)

DEFAULT_EPS = Fraction(1, 20)
DEFAULT_RESTARTS = 64
DEFAULT_ITERATIONS = 5000
ROUNDING_DENOMINATOR = 2**32

# Optimizer schedule
SIGMA_START = 1.0
SIGMA_END = 1e-3
STEP_START = 0.2
STEP_END = 1e-3
CHECK_EVERY = 50
TRACE_EVERY = 10
MAX_EXACT_ATTEMPTS = 8
MAX_SNAP_CANDIDATES = 3
MAX_SNAP_COMBINATIONS = 27

ORACLE_MAX_POINTS = 14
ORACLE_MAX_DIMENSION = 4


LiftedPoint = namedtuple("LiftedPoint", ["coords", "source"])


class NotFound(object):
    """Marker result of the exhaustive oracle when no bisector exists"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotFound"

    def __bool__(self):
        return False


NOT_FOUND = NotFound()


def veronese_lift(point, d, D, source=0):
    """Lift a point to the vector of its nonconstant monomials.

    Args:
        point: rational coordinates, length d
        d (int): dimension
        D (int): degree, at least 1
        source (int): index of the point, kept on the result

    Returns:
        LiftedPoint with monomial_count(d, D) coordinates in the fixed
        monomial order.
    """
    if D < 1:
        raise ValueError("Veronese lift needs D >= 1, got %d" % D)
    if len(point) != d:
        raise ValueError("Point %s is not of dimension %d" % (point, d))
    point = [parse_rational(coord) for coord in point]
    powers = []
    for coord in point:
        row = [Fraction(1)]
        for _ in range(D):
            row.append(row[-1] * coord)
        powers.append(row)
    coords = []
    for exps in monomials(d, D)[1:]:
        value = Fraction(1)
        for idx, power in enumerate(exps):
            if power:
                value *= powers[idx][power]
        coords.append(value)
    return LiftedPoint(tuple(coords), source)


def bisection_allowance(size, eps):
    """Largest number of points allowed strictly on one side"""
    return size // 2 + ceil_fraction(Fraction(eps) * size)


class SetCount(
    namedtuple("SetCount", ["count_pos", "count_neg", "count_zero", "allowance"])
):
    """Exact sign counts of one set against a polynomial"""

    @property
    def size(self):
        return self.count_pos + self.count_neg + self.count_zero

    @property
    def passed(self):
        return self.count_pos <= self.allowance and self.count_neg <= self.allowance

    @property
    def excess(self):
        return max(0, self.count_pos - self.allowance) + max(
            0, self.count_neg - self.allowance
        )


class BisectionCertificate(object):
    """Per-set sign counts of a polynomial and the verdict at slack eps"""

    def __init__(self, counts, slack):
        self.counts = list(counts)
        self.slack = Fraction(slack)

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, idx):
        return self.counts[idx]

    @property
    def passed(self):
        return all(count.passed for count in self.counts)

    @property
    def verdicts(self):
        return [count.passed for count in self.counts]

    @property
    def excess(self):
        """Total number of points over the allowance, summed over sets"""
        return sum(count.excess for count in self.counts)

    def failing_sets(self):
        return [idx for idx, count in enumerate(self.counts) if not count.passed]

    def to_dataframe(self):
        return pd.DataFrame(
            [
                {
                    "set": idx,
                    "count_pos": count.count_pos,
                    "count_neg": count.count_neg,
                    "count_zero": count.count_zero,
                    "allowance": count.allowance,
                    "pass": count.passed,
                }
                for idx, count in enumerate(self.counts)
            ],
            columns=[
                "set",
                "count_pos",
                "count_neg",
                "count_zero",
                "allowance",
                "pass",
            ],
        )

    def to_dict(self):
        return {
            "slack": str(self.slack),
            "sets": [
                [count.count_pos, count.count_neg, count.count_zero]
                for count in self.counts
            ],
        }

    @classmethod
    def from_dict(cls, data):
        slack = parse_rational(data["slack"])
        counts = []
        for pos, neg, zero in data["sets"]:
            allowance = bisection_allowance(pos + neg + zero, slack)
            counts.append(SetCount(pos, neg, zero, allowance))
        return cls(counts, slack)

    def __repr__(self):
        return "<BisectionCertificate eps=%s %s>" % (
            self.slack,
            " ".join(
                "%d/%d/%d%s"
                % (c.count_pos, c.count_neg, c.count_zero, "" if c.passed else "!")
                for c in self.counts
            ),
        )


class BisectionNotFound(RuntimeError):
    """No verified bisecting polynomial was found.

    Attributes:
        certificate: the best certificate seen (fewest excess points)
        degree: the degree that was tried last
    """

    def __init__(self, message, certificate=None, degree=None):
        super().__init__(message)
        self.certificate = certificate
        self.degree = degree


def verify_bisection(f, sets, eps=0):
    """Exact sign counts of f on every set.

    Points where f vanishes count toward neither side.

    Returns:
        BisectionCertificate
    """
    if f.is_zero():
        raise ValueError("Cannot verify a bisection with the zero polynomial")
    eps = parse_rational(eps)
    counts = []
    for points in sets:
        signs = [f.sign_at(point) for point in points]
        counts.append(
            SetCount(
                signs.count(1),
                signs.count(-1),
                signs.count(0),
                bisection_allowance(len(signs), eps),
            )
        )
    return BisectionCertificate(counts, eps)


def _validate_sets(sets, D):
    if not sets:
        raise ValueError("At least one point set is required")
    if any(len(points) == 0 for points in sets):
        raise ValueError("Every point set must be nonempty")
    dims = {len(point) for points in sets for point in points}
    if len(dims) != 1:
        raise ValueError("Points have mixed dimensions %s" % sorted(dims))
    d = dims.pop()
    if D < 1:
        raise ValueError("Degree must be at least 1, got %d" % D)
    available = monomial_count(d, D)
    if available < len(sets):
        raise ValueError(
            "Degree %d in %d variables gives %d monomials, fewer than %d sets"
            % (D, d, available, len(sets))
        )
    return d


class _LiftedProblem(object):
    """Normalised exact points and standardised float features"""

    def __init__(self, sets, d, D, eps):
        self.sets = [[tuple(parse_rational(c) for c in p) for p in s] for s in sets]
        self.d = d
        self.D = D
        self.eps = eps
        all_points = [p for s in self.sets for p in s]
        self.scales = []
        self.offsets = []
        for idx in range(d):
            low = min(p[idx] for p in all_points)
            high = max(p[idx] for p in all_points)
            half = (high - low) / 2 or Fraction(1)
            center = (high + low) / 2
            self.scales.append(1 / half)
            self.offsets.append(-center / half)
        self.normalized = [
            [
                tuple(s * c + o for s, c, o in zip(self.scales, p, self.offsets))
                for p in points
            ]
            for points in self.sets
        ]
        self.exps = monomials(d, D)[1:]
        self.set_ids = np.concatenate(
            [np.full(len(points), idx) for idx, points in enumerate(self.sets)]
        )
        self.sizes = np.array([len(points) for points in self.sets], dtype=float)
        self.allowances = np.array(
            [bisection_allowance(len(points), eps) for points in self.sets],
            dtype=float,
        )
        coords = np.array(
            [[float(c) for c in p] for points in self.normalized for p in points]
        )
        features = np.ones((len(coords), len(self.exps)))
        for col, exps in enumerate(self.exps):
            for idx, power in enumerate(exps):
                if power:
                    features[:, col] *= coords[:, idx] ** power
        self.mean = features.mean(axis=0)
        std = features.std(axis=0)
        self.std = np.where(std > 1e-12, std, 1.0)
        self.features = (features - self.mean) / self.std
        self.offsets_in_set = np.concatenate(
            [np.arange(len(points)) for points in self.sets]
        )
        self._exact_rows = {}

    @property
    def dimension(self):
        return len(self.exps) + 1

    def values(self, v):
        return self.features @ v[1:] + v[0]

    def coefficients(self, v):
        """Float coefficients over monomials(d, D), constant first"""
        weights = v[1:] / self.std
        constant = v[0] - float(np.dot(weights, self.mean))
        return np.concatenate([[constant], weights])

    def exact_row(self, set_idx, point_idx):
        key = (set_idx, point_idx)
        if key not in self._exact_rows:
            lifted = veronese_lift(
                self.normalized[set_idx][point_idx], self.d, self.D
            )
            self._exact_rows[key] = [Fraction(1)] + list(lifted.coords)
        return self._exact_rows[key]

    def to_original(self, dense):
        g = MultiPoly.from_dense(self.d, self.D, dense)
        return g.compose_affine(self.scales, self.offsets)


def round_coefficients(coefficients, denominator=ROUNDING_DENOMINATOR):
    """Scale to max |c| = 1 and round each entry to the given denominator"""
    coefficients = np.asarray(coefficients, dtype=float)
    top = float(np.max(np.abs(coefficients)))
    if not np.isfinite(top) or top == 0:
        raise ValueError("Cannot round a zero or non-finite coefficient vector")
    return [
        Fraction(int(round(value / top * denominator)), denominator)
        for value in coefficients
    ]


class BisectionSearch(object):
    """Seeded multi-restart search for a bisecting polynomial.

    Restarts run in index order and the first verified polynomial wins,
    so the result depends only on the seed and the key path.

    Args:
        degree (int): polynomial degree D
        eps (Fraction): bisection slack
        seed (int): run seed
        key (tuple): extra spawn keys, e.g. the partition round
        restarts (int): number of restarts
        iterations (int): iteration cap per restart
        record_trace (bool): keep (restart, iteration, loss, sigma) rows
    """

    def __init__(
        self,
        degree,
        eps=DEFAULT_EPS,
        seed=0,
        key=(),
        restarts=DEFAULT_RESTARTS,
        iterations=DEFAULT_ITERATIONS,
        record_trace=False,
    ):
        self.degree = int(degree)
        self.eps = parse_rational(eps)
        if not 0 <= self.eps <= Fraction(1, 2):
            raise ValueError("eps must be in [0, 1/2], got %s" % self.eps)
        if restarts < 1 or iterations < 1:
            raise ValueError("restarts and iterations must be positive")
        self.seed = seed
        self.key = tuple(key)
        self.restarts = int(restarts)
        self.iterations = int(iterations)
        self.record_trace = record_trace
        self._trace = []
        self.best_certificate = None

    @property
    def trace(self):
        """Optimizer trace as a DataFrame"""
        return pd.DataFrame(
            self._trace, columns=["restart", "iteration", "loss", "sigma"]
        )

    def trace_to_csv(self, filename):
        dirname = os.path.dirname(filename)
        if dirname and not os.path.exists(dirname):
            os.makedirs(dirname)
        self.trace.to_csv(filename, index=False, lineterminator="\n")

    def run(self, sets):
        """Search for a polynomial bisecting all sets.

        Returns:
            (MultiPoly, BisectionCertificate), the certificate passing.

        Raises:
            BisectionNotFound: every restart failed
        """
        d = _validate_sets(sets, self.degree)
        problem = _LiftedProblem(sets, d, self.degree, self.eps)
        self.best_certificate = None
        for restart in range(self.restarts):
            result = self._run_restart(problem, restart)
            if result is not None:
                logger.debug(
                    "Bisection of %d sets at degree %d found in restart %d",
                    len(sets),
                    self.degree,
                    restart,
                )
                return result
        logger.warning(
            "No bisecting polynomial of degree %d for %d sets after %d restarts",
            self.degree,
            len(sets),
            self.restarts,
        )
        raise BisectionNotFound(
            "No verified bisecting polynomial of degree %d after %d restarts"
            % (self.degree, self.restarts),
            certificate=self.best_certificate,
            degree=self.degree,
        )

    def _loss_and_gradient(self, v, sigma, problem):
        values = problem.values(v)
        smooth = np.tanh(values / sigma)
        counts = problem.sizes
        pos = np.bincount(problem.set_ids, weights=(1 + smooth) / 2, minlength=len(counts))
        neg = counts - pos
        target = problem.allowances - 0.5
        excess_pos = np.maximum(0.0, pos - target)
        excess_neg = np.maximum(0.0, neg - target)
        norm = counts**2
        loss = float(np.sum((excess_pos**2 + excess_neg**2) / norm))
        per_set = 2 * (excess_pos - excess_neg) / norm
        slope = per_set[problem.set_ids] * (1 - smooth**2) / (2 * sigma)
        gradient = np.concatenate([[slope.sum()], problem.features.T @ slope])
        return loss, gradient, values

    def _float_status(self, values, problem):
        counts = len(problem.sizes)
        pos = np.bincount(problem.set_ids, weights=(values > 0).astype(float), minlength=counts)
        neg = np.bincount(problem.set_ids, weights=(values < 0).astype(float), minlength=counts)
        over = np.maximum(pos - problem.allowances, 0) + np.maximum(
            neg - problem.allowances, 0
        )
        return float(over.max())

    def _run_restart(self, problem, restart):
        rng = make_rng(self.seed, *self.key, restart)
        v = rng.standard_normal(problem.dimension)
        v /= np.linalg.norm(v)
        attempts = 0
        span = max(self.iterations - 1, 1)
        values = problem.values(v)
        for iteration in range(self.iterations):
            fraction = iteration / span
            sigma = SIGMA_START * (SIGMA_END / SIGMA_START) ** fraction
            step = STEP_START * (STEP_END / STEP_START) ** fraction
            loss, gradient, values = self._loss_and_gradient(v, sigma, problem)
            if self.record_trace and iteration % TRACE_EVERY == 0:
                self._trace.append(
                    {
                        "restart": restart,
                        "iteration": iteration,
                        "loss": loss,
                        "sigma": sigma,
                    }
                )
            tangent = gradient - np.dot(gradient, v) * v
            size = np.linalg.norm(tangent)
            stalled = size < 1e-15
            if not stalled:
                v = v - step * tangent / size
                v /= np.linalg.norm(v)
            if stalled or (iteration + 1) % CHECK_EVERY == 0:
                values = problem.values(v)
                over = self._float_status(values, problem)
                late = iteration >= self.iterations // 2
                if attempts < MAX_EXACT_ATTEMPTS and (over == 0 or (late and over <= 1)):
                    attempts += 1
                    result = self._exact_attempt(v, values, problem)
                    if result is not None:
                        return result
            if stalled:
                break
        values = problem.values(v)
        return self._exact_attempt(v, values, problem)

    def _record(self, certificate):
        if self.best_certificate is None or certificate.excess < self.best_certificate.excess:
            self.best_certificate = certificate

    def _exact_attempt(self, v, values, problem):
        """Round, verify, and if needed snap through anchor points"""
        dense = round_coefficients(problem.coefficients(v))
        f = problem.to_original(dense)
        certificate = verify_bisection(f, problem.sets, self.eps)
        self._record(certificate)
        if certificate.passed:
            return f, certificate
        return self._snap(dense, values, problem, certificate)

    def _snap(self, dense, values, problem, certificate):
        failing = certificate.failing_sets()
        if len(failing) >= problem.dimension:
            return None
        starts = np.concatenate([[0], np.cumsum(problem.sizes).astype(int)])
        candidates = []
        for set_idx in failing:
            count = certificate[set_idx]
            side = 1 if count.count_pos > count.allowance else -1
            local = values[starts[set_idx] : starts[set_idx + 1]]
            order = [
                int(idx)
                for idx in np.argsort(np.abs(local), kind="stable")
                if np.sign(local[idx]) == side
            ]
            if not order:
                return None
            candidates.append(
                [(set_idx, idx) for idx in order[:MAX_SNAP_CANDIDATES]]
            )
        combos = itertools.islice(itertools.product(*candidates), MAX_SNAP_COMBINATIONS)
        for anchors in combos:
            rows = [problem.exact_row(set_idx, idx) for set_idx, idx in anchors]
            snapped = project_out(dense, rows)
            if not any(snapped):
                continue
            f = problem.to_original(snapped)
            snapped_certificate = verify_bisection(f, problem.sets, self.eps)
            self._record(snapped_certificate)
            if snapped_certificate.passed:
                logger.debug("Snapped bisector through %d anchors", len(anchors))
                return f, snapped_certificate
        return None


def find_bisecting_polynomial(
    sets,
    D,
    eps=DEFAULT_EPS,
    seed=0,
    key=(),
    restarts=DEFAULT_RESTARTS,
    iterations=DEFAULT_ITERATIONS,
    max_escalations=0,
):
    """Find a nonzero polynomial of degree <= D bisecting every set.

    Args:
        sets (list): point sets with rational coordinates
        D (int): degree; monomial_count(d, D) must be >= len(sets)
        eps (Fraction): slack, each side may hold floor(n/2) + ceil(eps n)
        seed (int): run seed
        key (tuple): spawn keys below the seed
        restarts (int): restarts per degree
        iterations (int): iteration cap per restart
        max_escalations (int): how many times to retry with D + 1

    Returns:
        (MultiPoly, BisectionCertificate). The certificate always passes.

    Raises:
        BisectionNotFound: after all restarts and escalations
    """
    degree = D
    escalation = 0
    while True:
        search = BisectionSearch(
            degree,
            eps=eps,
            seed=seed,
            key=tuple(key) + (escalation,),
            restarts=restarts,
            iterations=iterations,
        )
        try:
            return search.run(sets)
        except BisectionNotFound:
            if escalation == max_escalations:
                raise
            logger.warning("Escalating bisection degree from %d to %d", degree, degree + 1)
            degree += 1
            escalation += 1


def _oracle_candidates(rows, k):
    """Coefficient vectors of hyperplanes through k lifted points,
    as (a, b) pairs: the candidate is a + eta * b for a tiny eta."""
    cols = k + 1
    if rank(rows) < cols:
        for vector in nullspace(rows):
            yield vector, None
    for subset in itertools.combinations(range(len(rows)), k):
        sub = [rows[idx] for idx in subset]
        basis = nullspace(sub)
        for vector in basis:
            yield vector, None
        if len(basis) != 1:
            continue
        for pattern in itertools.product((-1, 0, 1), repeat=k):
            if not any(pattern):
                continue
            yield basis[0], solve_min_norm(sub, pattern)


def exact_bisector_oracle(sets, D):
    """Exhaustive search for an exact (eps=0) bisector. Tiny inputs only.

    Enumerates hyperplanes in lifted space through k lifted points, and
    every small perturbation moving each defining point to a chosen side.

    Args:
        sets: point sets, at most 14 points in total
        D (int): degree, monomial_count(d, D) <= 4

    Returns:
        MultiPoly passing verify_bisection at eps=0, or NOT_FOUND
    """
    d = _validate_sets(sets, D)
    total = sum(len(points) for points in sets)
    k = monomial_count(d, D)
    if total > ORACLE_MAX_POINTS or k > ORACLE_MAX_DIMENSION:
        raise ValueError(
            "Oracle limited to %d points and %d monomials, got %d and %d"
            % (ORACLE_MAX_POINTS, ORACLE_MAX_DIMENSION, total, k)
        )
    distinct = []
    for points in sets:
        for point in points:
            point = tuple(parse_rational(c) for c in point)
            if point not in distinct:
                distinct.append(point)
    rows = [[Fraction(1)] + list(veronese_lift(p, d, D).coords) for p in distinct]
    membership = [
        [distinct.index(tuple(parse_rational(c) for c in point)) for point in points]
        for points in sets
    ]
    allowances = [bisection_allowance(len(points), 0) for points in sets]

    def dot(left, right):
        return sum((a * b for a, b in zip(left, right)), Fraction(0))

    for base, direction in _oracle_candidates(rows, k):
        base_values = [dot(base, row) for row in rows]
        if direction is None:
            signs = [(v > 0) - (v < 0) for v in base_values]
            vector = base
        else:
            dir_values = [dot(direction, row) for row in rows]
            nonzero = [
                abs(bv) / (2 * (abs(dv) + 1))
                for bv, dv in zip(base_values, dir_values)
                if bv
            ]
            eta = min(nonzero) if nonzero else Fraction(1)
            vector = [a + eta * b for a, b in zip(base, direction)]
            signs = [
                (v > 0) - (v < 0)
                for v in (bv + eta * dv for bv, dv in zip(base_values, dir_values))
            ]
        ok = True
        for members, allowance in zip(membership, allowances):
            local = [signs[idx] for idx in members]
            if local.count(1) > allowance or local.count(-1) > allowance:
                ok = False
                break
        if ok and any(vector):
            f = MultiPoly.from_dense(d, D, vector)
            if verify_bisection(f, sets, 0).passed:
                return f
    return NOT_FOUND


def minimal_degree(d, num_sets):
    """Smallest D with monomial_count(d, D) >= num_sets"""
    if num_sets < 1:
        raise ValueError("num_sets must be positive")
    D = 1
    while monomial_count(d, D) < num_sets:
        D += 1
    return D
