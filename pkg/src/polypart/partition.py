"""Partitioning polynomials built from repeated ham-sandwich bisections

Round j bisects every current point set that is still too large with a
single polynomial f_j; the partitioning polynomial is the product
f_1 f_2 ... f_t. Cells are the classes of points sharing a nonzero sign
vector (sign f_1, ..., sign f_t). Points where some factor vanishes are
boundary points and belong to no cell.
"""

import logging
import math
import os
from collections import OrderedDict, namedtuple
from fractions import Fraction

import yaml

from .algebra import (
    MultiPoly,
    isolate_roots,
    line_points,
    product,
    product_of_restrictions,
)
from .audit import AuditReport
from .hamsandwich import (
    DEFAULT_EPS,
    DEFAULT_ITERATIONS,
    DEFAULT_RESTARTS,
    BisectionCertificate,
    BisectionNotFound,
    find_bisecting_polynomial,
    minimal_degree,
)
from .util import ceil_fraction, format_rational, parse_rational

logger = logging.getLogger(__name__)

MAX_ESCALATIONS = 3
MAX_EXTRA_ROUNDS = 8

SIGN_CHARS = {1: "+", 0: "0", -1: "-"}
CHAR_SIGNS = {char: sign for sign, char in SIGN_CHARS.items()}

RoundRecord = namedtuple(
    "RoundRecord", ["index", "num_sets", "degree", "escalations", "certificate"]
)


class PartitionError(RuntimeError):
    """A partition round could not be bisected.

    Attributes:
        round_index (int): the failing round, 0-based
        num_sets (int): number of sets that round had to bisect
        certificate: best certificate from the failed search
    """

    def __init__(self, message, round_index=None, num_sets=None, certificate=None):
        super().__init__(message)
        self.round_index = round_index
        self.num_sets = num_sets
        self.certificate = certificate


def warren_bound(d, D):
    """6 (2D)^d, bound on the components of R^d minus a degree-D zero set"""
    return 6 * (2 * D) ** d


def section_warren_bound(d, D):
    """6 (2D)^(d-1), components met by one hyperplane"""
    return 6 * (2 * D) ** (d - 1)


def harnack_bound(D):
    """1 + binom(D-1, 2), components of a degree-D plane curve"""
    return 1 + math.comb(max(D - 1, 0), 2)


def elementary_harnack_bound(D):
    """D(D+1)/2, the bound obtained from critical points and Bezout"""
    return D * (D + 1) // 2


def round_count(r, eps):
    """Smallest t with (1/2 + eps)^t <= 1/r.

    With eps=0 this is ceil(log2 r).
    """
    r = parse_rational(r)
    eps = parse_rational(eps)
    if not 0 <= eps < Fraction(1, 2):
        raise ValueError("eps must be in [0, 1/2), got %s" % eps)
    shrink = Fraction(1, 2) + eps
    rounds = 0
    size = Fraction(1)
    while size * r > 1:
        size *= shrink
        rounds += 1
    return rounds


def sign_vector(point, factors):
    """Exact signs of every factor at a point, as a tuple in {-1, 0, 1}"""
    return tuple(f.sign_at(point) for f in factors)


def sign_string(signs):
    return "".join(SIGN_CHARS[sign] for sign in signs)


def parse_sign_string(text):
    try:
        return tuple(CHAR_SIGNS[char] for char in text)
    except KeyError as err:
        raise ValueError("Invalid sign string %r" % text) from err


class PartitionResult(object):
    """A product of factors and the cell structure it induces on a point set.

    Construct through build_partition() or from_yaml(); the object is not
    modified afterwards.

    Args:
        factors (list): the MultiPoly factors f_1..f_t
        point_signs (list): one sign tuple per input point
        r (Fraction): targeted r
        eps (Fraction): bisection slack used
        seed (int): run seed
        rounds (list): RoundRecord per round
    """

    def __init__(self, factors, point_signs, r, eps=DEFAULT_EPS, seed=0, rounds=None):
        self.factors = list(factors)
        self.point_signs = [tuple(signs) for signs in point_signs]
        if any(len(signs) != len(self.factors) for signs in self.point_signs):
            raise ValueError("Sign vectors do not match the number of factors")
        self.r = parse_rational(r)
        self.eps = parse_rational(eps)
        self.seed = seed
        self.rounds = list(rounds or [])
        self.boundary_points = [
            idx for idx, signs in enumerate(self.point_signs) if 0 in signs
        ]
        cells = {}
        for idx, signs in enumerate(self.point_signs):
            if 0 not in signs:
                cells.setdefault(signs, []).append(idx)
        self.cells = OrderedDict(
            sorted(cells.items(), key=lambda item: item[1][0])
        )

    @property
    def num_points(self):
        return len(self.point_signs)

    @property
    def num_rounds(self):
        return len(self.factors)

    @property
    def total_degree(self):
        return sum(f.degree() for f in self.factors)

    @property
    def dimension(self):
        return self.factors[0].num_vars if self.factors else None

    @property
    def target_size(self):
        return ceil_fraction(Fraction(self.num_points) / self.r)

    def polynomial(self):
        """The product of all factors"""
        return product(self.factors, num_vars=self.dimension or 1)

    def cell_sizes(self):
        return [len(members) for members in self.cells.values()]

    def max_cell_size(self):
        return max(self.cell_sizes(), default=0)

    def cell_of(self, idx):
        """Sign vector of the cell holding point idx, None for boundary points"""
        signs = self.point_signs[idx]
        return None if 0 in signs else signs

    def line_sign_classes(self, line):
        """Distinct nonzero sign vectors realised along a line.

        The line is split at the roots of all factors restricted to it;
        one rational sample per open interval is evaluated exactly.

        Args:
            line: (a, b, c) in the plane, or two distinct points

        Returns:
            list of sign tuples in order along the line
        """
        p, q = line_points(line)
        combined = product_of_restrictions(self.factors, p, q)
        if combined.is_zero():
            return []
        samples = line_samples(combined)
        classes = []
        for t in samples:
            point = tuple(a + t * (b - a) for a, b in zip(p, q))
            signs = sign_vector(point, self.factors)
            if signs not in classes:
                classes.append(signs)
        return classes

    def to_dict(self):
        return OrderedDict(
            [
                ("dimension", self.dimension),
                ("r", format_rational(self.r)),
                ("eps", format_rational(self.eps)),
                ("seed", self.seed),
                ("total_degree", self.total_degree),
                (
                    "rounds",
                    [
                        {
                            "num_sets": record.num_sets,
                            "degree": record.degree,
                            "escalations": record.escalations,
                            "certificate": record.certificate.to_dict()
                            if record.certificate is not None
                            else None,
                        }
                        for record in self.rounds
                    ],
                ),
                ("factors", [f.to_text().splitlines() for f in self.factors]),
                ("signs", [sign_string(signs) for signs in self.point_signs]),
            ]
        )

    def to_yaml(self):
        """Deterministic YAML text of the partition"""
        return yaml.safe_dump(dict(self.to_dict()), sort_keys=False)

    def to_disk(self, filename):
        """Write the YAML text to a file, creating directories"""
        dirname = os.path.dirname(filename)
        if dirname and not os.path.exists(dirname):
            os.makedirs(dirname)
        with open(filename, "w") as fhandle:
            fhandle.write(self.to_yaml())

    @classmethod
    def from_yaml(cls, text_or_filename):
        if os.path.exists(str(text_or_filename)):
            with open(text_or_filename) as fhandle:
                data = yaml.safe_load(fhandle)
        else:
            data = yaml.safe_load(text_or_filename)
        dimension = data["dimension"]
        factors = [
            MultiPoly.from_text("\n".join(lines), num_vars=dimension)
            for lines in data["factors"]
        ]
        rounds = [
            RoundRecord(
                idx,
                item["num_sets"],
                item["degree"],
                item["escalations"],
                BisectionCertificate.from_dict(item["certificate"])
                if item.get("certificate")
                else None,
            )
            for idx, item in enumerate(data.get("rounds", []))
        ]
        return cls(
            factors,
            [parse_sign_string(text) for text in data["signs"]],
            data["r"],
            eps=data["eps"],
            seed=data["seed"],
            rounds=rounds,
        )

    def __eq__(self, other):
        if not isinstance(other, PartitionResult):
            return NotImplemented
        return self.to_yaml() == other.to_yaml()

    def __repr__(self):
        return "<PartitionResult n=%d t=%d degree=%d cells=%d boundary=%d>" % (
            self.num_points,
            self.num_rounds,
            self.total_degree,
            len(self.cells),
            len(self.boundary_points),
        )


def line_samples(g):
    """Rational parameters, one inside every maximal root-free interval of g"""
    if g.degree() < 1:
        return [Fraction(0)]
    intervals = isolate_roots(g)
    if not intervals:
        return [Fraction(0)]
    return [intervals[0][0]] + [hi for _, hi in intervals]


def _split(points, members, f):
    pos, neg, zero = [], [], []
    for idx in members:
        sign = f.sign_at(points[idx])
        if sign > 0:
            pos.append(idx)
        elif sign < 0:
            neg.append(idx)
        else:
            zero.append(idx)
    return pos, neg, zero


def build_partition(
    points,
    r,
    eps=DEFAULT_EPS,
    seed=0,
    key=(),
    restarts=DEFAULT_RESTARTS,
    iterations=DEFAULT_ITERATIONS,
):
    """Build an r-partitioning polynomial for a point set.

    Every round bisects all sets still larger than ceil(n/r) with one
    polynomial of the smallest degree the ham-sandwich theorem allows,
    escalating the degree when the search fails.

    Args:
        points (list): rational points, all of one dimension
        r (Fraction): 1 < r <= n
        eps (Fraction): bisection slack, 0 <= eps < 1/2
        seed (int): run seed
        key (tuple): spawn keys below the seed
        restarts, iterations: forwarded to the bisection search

    Returns:
        PartitionResult

    Raises:
        PartitionError: a round failed after all degree escalations
    """
    points = [tuple(parse_rational(c) for c in point) for point in points]
    n = len(points)
    r = parse_rational(r)
    eps = parse_rational(eps)
    if not 1 < r <= n:
        logger.error("r must satisfy 1 < r <= n, got r=%s, n=%d", r, n)
        raise ValueError("r must satisfy 1 < r <= %d, got %s" % (n, r))
    dims = {len(point) for point in points}
    if len(dims) != 1:
        raise ValueError("Points have mixed dimensions %s" % sorted(dims))
    d = dims.pop()
    target = ceil_fraction(Fraction(n) / r)
    planned = round_count(r, eps)
    logger.info(
        "Partitioning %d points in R^%d, r=%s, target cell size %d, %d planned rounds",
        n,
        d,
        format_rational(r),
        target,
        planned,
    )

    factors = []
    rounds = []
    active = [list(range(n))] if n > target else []
    round_index = 0
    while active:
        if round_index >= planned + MAX_EXTRA_ROUNDS:
            raise PartitionError(
                "Sets still above %d points after %d rounds" % (target, round_index),
                round_index=round_index,
                num_sets=len(active),
            )
        degree = minimal_degree(d, len(active))
        sets = [[points[idx] for idx in members] for members in active]
        try:
            f, certificate = find_bisecting_polynomial(
                sets,
                degree,
                eps=eps,
                seed=seed,
                key=tuple(key) + (round_index,),
                restarts=restarts,
                iterations=iterations,
                max_escalations=MAX_ESCALATIONS,
            )
        except BisectionNotFound as err:
            logger.error("Round %d with %d sets failed", round_index, len(active))
            raise PartitionError(
                "Round %d: %s" % (round_index, err),
                round_index=round_index,
                num_sets=len(active),
                certificate=err.certificate,
            ) from err
        escalations = f.degree() - degree if f.degree() > degree else 0
        if escalations:
            logger.warning(
                "Round %d needed degree %d instead of %d", round_index, f.degree(), degree
            )
        factors.append(f)
        rounds.append(
            RoundRecord(round_index, len(active), f.degree(), escalations, certificate)
        )
        next_active = []
        for members in active:
            pos, neg, _ = _split(points, members, f)
            next_active.extend(part for part in (pos, neg) if len(part) > target)
        logger.info(
            "Round %d: %d sets bisected with degree %d, %d still above %d",
            round_index,
            len(active),
            f.degree(),
            len(next_active),
            target,
        )
        active = next_active
        round_index += 1

    point_signs = [sign_vector(point, factors) for point in points]
    result = PartitionResult(
        factors, point_signs, r, eps=eps, seed=seed, rounds=rounds
    )
    if result.max_cell_size() > target:
        # The round loop only stops when every set is small enough
        raise PartitionError(
            "Cell of size %d exceeds %d" % (result.max_cell_size(), target),
            round_index=round_index,
        )
    logger.info("Built %s", result)
    return result


def audit_partition(pr, points, r=None, lines=None):
    """Check the size and degree bounds of a partition.

    Entries: max cell size, total degree against 7 sqrt(2^t) (plane only,
    compared squared), sign classes along each supplied line against
    total_degree + 1, and nonempty cells against the Warren bound.

    Args:
        pr (PartitionResult): built over ``points``
        points (list): the point set
        r (Fraction): defaults to pr.r
        lines (list): optional lines, (a, b, c) or point pairs

    Returns:
        AuditReport
    """
    r = pr.r if r is None else parse_rational(r)
    n = len(points)
    if n != pr.num_points:
        raise ValueError("Partition was built over %d points, got %d" % (pr.num_points, n))
    report = AuditReport("partition")
    total_degree = pr.total_degree
    d = pr.dimension or len(points[0])
    report.add("max_cell_size", pr.max_cell_size(), ceil_fraction(Fraction(n) / r))
    if d == 2:
        report.add(
            "total_degree_squared",
            total_degree**2,
            49 * 2**pr.num_rounds,
        )
        report.set_info("harnack_bound", harnack_bound(total_degree))
    for idx, line in enumerate(lines or []):
        report.add(
            "line_%d_sign_classes" % idx,
            len(pr.line_sign_classes(line)),
            total_degree + 1,
        )
    report.add("nonempty_cells", len(pr.cells), warren_bound(d, total_degree))
    report.set_info("rounds", pr.num_rounds)
    report.set_info("total_degree", total_degree)
    report.set_info("boundary_points", len(pr.boundary_points))
    return report
