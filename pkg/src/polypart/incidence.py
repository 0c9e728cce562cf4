"""Point-line and point-curve incidences: counting, generators and audits

The audits recompute, exactly, every quantity in the partition proof of
the Szemeredi-Trotter bound and in the curve version of it, and report
each inequality as an entry of an AuditReport.
"""

import itertools
import logging
import math
from fractions import Fraction

from .algebra import (
    MultiPoly,
    count_roots_in_interval,
    line_points,
    line_through,
    normalize_line,
    product_of_restrictions,
)
from .audit import AuditReport
from .hamsandwich import DEFAULT_EPS, DEFAULT_ITERATIONS, DEFAULT_RESTARTS
from .partition import build_partition, harnack_bound
from .util import ceil_fraction, parse_rational
from .util.seeding import make_rng, random_fraction

logger = logging.getLogger(__name__)

R_DENOMINATOR_LIMIT = 1000
RATIO_DENOMINATOR = 2**32


class LineSet(object):
    """Distinct lines ax+by+c=0 in normalized form.

    Each triple is scaled to coprime integers with the first nonzero
    entry positive. Duplicate lines are dropped with a warning.

    Args:
        lines: iterable of (a, b, c) rationals
    """

    def __init__(self, lines=None):
        self.lines = []
        seen = set()
        for line in lines or []:
            normalized = normalize_line(*line)
            if normalized in seen:
                logger.warning("Dropping duplicate line %s", normalized)
                continue
            seen.add(normalized)
            self.lines.append(normalized)

    @classmethod
    def through_point_pairs(cls, pairs):
        return cls(line_through(p, q) for p, q in pairs)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, idx):
        return self.lines[idx]

    def has_vertical(self):
        return any(b == 0 for _, b, _ in self.lines)

    def __repr__(self):
        return "<LineSet n=%d>" % len(self.lines)


def curve_key(curve):
    """Key identifying a curve polynomial up to nonzero scaling"""
    _, terms = curve.integer_coefficients()
    if terms and terms[-1][1] < 0:
        terms = tuple((exps, -value) for exps, value in terms)
    return terms


class CurveSet(object):
    """Plane algebraic curves of degree at most b.

    The family parameters state that any k points lie on at most C curves
    of the family, and that two curves meet in at most b^2 points.

    Args:
        curves: iterable of bivariate MultiPoly
        k (int), C (int), b (int): family parameters
    """

    def __init__(self, curves=None, k=3, C=1, b=2):
        if k < 1 or C < 1 or b < 1:
            raise ValueError("Family parameters k, C, b must be positive")
        self.k = int(k)
        self.C = int(C)
        self.b = int(b)
        self.curves = []
        seen = set()
        for curve in curves or []:
            if curve.num_vars != 2:
                raise ValueError("Curves must be bivariate")
            if curve.is_zero():
                raise ValueError("The zero polynomial is not a curve")
            if curve.degree() > self.b:
                raise ValueError(
                    "Curve of degree %d exceeds b=%d" % (curve.degree(), self.b)
                )
            key = curve_key(curve)
            if key in seen:
                logger.warning("Dropping duplicate curve %s", curve)
                continue
            seen.add(key)
            self.curves.append(curve)

    def __len__(self):
        return len(self.curves)

    def __iter__(self):
        return iter(self.curves)

    def __getitem__(self, idx):
        return self.curves[idx]

    def __repr__(self):
        return "<CurveSet n=%d k=%d C=%d b=%d>" % (len(self), self.k, self.C, self.b)


def _point_ints(points):
    result = []
    for point in points:
        x, y = (parse_rational(c) for c in point)
        result.append((x.numerator, x.denominator, y.numerator, y.denominator))
    return result


def incidences_per_line(points, lines):
    """For each line, the indices of the points on it"""
    ints = _point_ints(points)
    result = []
    for line in lines:
        a, b, c = normalize_line(*line)
        a, b, c = int(a), int(b), int(c)
        result.append(
            [
                idx
                for idx, (xn, xd, yn, yd) in enumerate(ints)
                if a * xn * yd + b * yn * xd + c * xd * yd == 0
            ]
        )
    return result


def count_incidences_lines(points, lines):
    """Number of pairs (p, l) with p on l, by exact evaluation"""
    return sum(len(members) for members in incidences_per_line(points, lines))


def incidences_per_curve(points, curves):
    return [
        [idx for idx, point in enumerate(points) if curve.sign_at(point) == 0]
        for curve in curves
    ]


def count_incidences_curves(points, curves):
    """Number of pairs (p, gamma) with gamma(p) = 0"""
    return sum(len(members) for members in incidences_per_curve(points, curves))


def generate_extremal_grid(k):
    """Grid instance with k^4 incidences.

    P = {1..k} x {1..2k^2} and L = {y = ax + b : a in 1..k, b in 1..k^2};
    every line holds exactly k points of P.

    Returns:
        (points, LineSet)
    """
    if k < 1:
        raise ValueError("k must be at least 1, got %d" % k)
    points = [
        (Fraction(x), Fraction(y))
        for x in range(1, k + 1)
        for y in range(1, 2 * k * k + 1)
    ]
    lines = LineSet(
        (a, -1, b) for a in range(1, k + 1) for b in range(1, k * k + 1)
    )
    return points, lines


def generate_grid_points(rows, cols=None):
    """Integer points {0..rows-1} x {0..cols-1}, row-major"""
    cols = rows if cols is None else cols
    if rows < 1 or cols < 1:
        raise ValueError("Grid sides must be positive")
    return [(Fraction(x), Fraction(y)) for x in range(rows) for y in range(cols)]


def generate_random_points(m, seed, side=None, dimension=2):
    """m distinct random points on an integer grid {0..side-1}^dimension"""
    if m < 1:
        raise ValueError("m must be positive")
    if side is None:
        side = max(2, math.ceil((4 * m) ** (1 / dimension)))
    if side**dimension < m:
        raise ValueError("Grid of side %d holds fewer than %d points" % (side, m))
    rng = make_rng(seed, 0)
    chosen = rng.choice(side**dimension, size=m, replace=False)
    points = []
    for value in chosen:
        value = int(value)
        coords = []
        for _ in range(dimension):
            coords.append(Fraction(value % side))
            value //= side
        points.append(tuple(coords))
    return points


def generate_random_instance(m, n, seed, side=None):
    """Random integer points and n distinct lines through random pairs.

    Returns:
        (points, LineSet); fewer than n lines only if the points do not
        span that many.
    """
    if m < 2:
        raise ValueError("A random line instance needs at least 2 points")
    points = generate_random_points(m, seed, side=side)
    rng = make_rng(seed, 1)
    lines = []
    seen = set()
    attempts = 0
    while len(lines) < n and attempts < 20 * n + 100:
        attempts += 1
        i, j = (int(v) for v in rng.choice(m, size=2, replace=False))
        line = line_through(points[i], points[j])
        if line not in seen:
            seen.add(line)
            lines.append(line)
    if len(lines) < n:
        logger.warning("Only %d distinct lines found, %d requested", len(lines), n)
    return points, LineSet(lines)


def circle_through(p, q, s):
    """Monic circle x^2+y^2+Dx+Ey+F through three points, None if collinear"""
    rows = []
    for x, y in (p, q, s):
        x, y = parse_rational(x), parse_rational(y)
        rows.append((x, y, Fraction(1), -(x * x + y * y)))

    def det3(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    base = [row[:3] for row in rows]
    det = det3(base)
    if det == 0:
        return None
    solution = []
    for col in range(3):
        replaced = [
            [row[3] if idx == col else row[idx] for idx in range(3)] for row in rows
        ]
        solution.append(det3(replaced) / det)
    return tuple(solution)


def circle_polynomial(D, E, F):
    return MultiPoly(2, {(2, 0): 1, (0, 2): 1, (1, 0): D, (0, 1): E, (0, 0): F})


def generate_circle_instance(g):
    """Grid points and every circle through at least 3 of them.

    P is the g x g grid {0..g-1}^2. The circles have squared radius at
    most g^2 and are deduplicated by their monic equation.

    Returns:
        (points, CurveSet) with k=3, C=1, b=2
    """
    if g < 2:
        raise ValueError("g must be at least 2, got %d" % g)
    points = generate_grid_points(g)
    found = {}
    for p, q, s in itertools.combinations(points, 3):
        coeffs = circle_through(p, q, s)
        if coeffs is None or coeffs in found:
            continue
        D, E, F = coeffs
        if (D * D + E * E) / 4 - F > g * g:
            continue
        found[coeffs] = circle_polynomial(D, E, F)
    logger.info("Generated %d circles on a %dx%d grid", len(found), g, g)
    return points, CurveSet(found.values(), k=3, C=1, b=2)


def generate_parabola_instance(g):
    """Grid points and every parabola y = ax^2+bx+c (a != 0) through 3 of them.

    Three points with distinct x determine at most one such curve, so
    the family has k=3, C=1, b=2.

    Returns:
        (points, CurveSet)
    """
    if g < 3:
        raise ValueError("g must be at least 3, got %d" % g)
    points = generate_grid_points(g)
    found = {}
    for p, q, s in itertools.combinations(points, 3):
        xs = [p[0], q[0], s[0]]
        if len(set(xs)) < 3:
            continue
        coeffs = [Fraction(0)] * 3
        for (xi, yi), (xj, _), (xk, _) in ((p, q, s), (q, s, p), (s, p, q)):
            weight = yi / ((xi - xj) * (xi - xk))
            coeffs[0] += weight
            coeffs[1] -= weight * (xj + xk)
            coeffs[2] += weight * xj * xk
        a, b, c = coeffs
        if a == 0 or (a, b, c) in found:
            continue
        found[(a, b, c)] = MultiPoly(
            2, {(2, 0): a, (1, 0): b, (0, 0): c, (0, 1): -1}
        )
    logger.info("Generated %d parabolas on a %dx%d grid", len(found), g, g)
    return points, CurveSet(found.values(), k=3, C=1, b=2)


def dualize(points, lines, seed=0):
    """Planar duality exchanging points and lines, preserving incidences.

    A point (p, q) maps to the line y = p x - q, a line y = s x + t to the
    point (s, -t). When some line is vertical, the whole instance is first
    sheared by (x, y) -> (x + lam y, y) with a random rational lam.

    Returns:
        (dual_points, dual LineSet, lam)
    """
    lines = list(lines)
    lam = Fraction(0)
    if any(b == 0 for _, b, _ in lines):
        rng = make_rng(seed, 2)
        while True:
            lam = random_fraction(rng, Fraction(1, 2), Fraction(2), 1024)
            if all(b - a * lam != 0 for a, b, _ in lines):
                break
        logger.info("Shearing instance by %s before dualising", lam)
    sheared_points = [
        (parse_rational(x) + lam * parse_rational(y), parse_rational(y))
        for x, y in points
    ]
    sheared_lines = [(a, b - a * lam, c) for a, b, c in lines]
    dual_lines = LineSet((x, -1, -y) for x, y in sheared_points)
    dual_points = [(-a / b, c / b) for a, b, c in sheared_lines]
    return dual_points, dual_lines, lam


def _two_thirds_product(m, n):
    """(m n)^(2/3): exact when it is an integer, else a float lower bound"""
    square = (m * n) ** 2
    root = round(square ** (1 / 3))
    for candidate in (root - 1, root, root + 1):
        if candidate >= 0 and candidate**3 == square:
            return Fraction(candidate)
    return Fraction(float(m * n) ** (2 / 3) * (1 - 2.0**-40))


def st_bound_ratio(points, lines):
    """I(P, L) / (m^(2/3) n^(2/3) + m + n), rounded up.

    The denominator is exact when (mn)^(2/3) is an integer; otherwise it
    is evaluated in floating point, under-estimated, and the ratio
    rounded up to a multiple of 2^-32, so the result never falls below
    the true ratio.
    """
    m = len(points)
    n = len(lines)
    if m < 1 or n < 1:
        raise ValueError("st_bound_ratio needs at least one point and one line")
    incidences = count_incidences_lines(points, lines)
    if incidences == 0:
        return Fraction(0)
    denominator = _two_thirds_product(m, n) + m + n
    ratio = Fraction(incidences) / denominator
    if denominator.denominator == 1:
        return ratio
    return Fraction(ceil_fraction(ratio * RATIO_DENOMINATOR), RATIO_DENOMINATOR)


def choose_st_r(m, n):
    """r for the incidence partition: n^(2/3) if m == n, else m^(4/3)/n^(2/3).

    Rounded to a rational and clamped to [2, m].
    """
    if m == n:
        value = float(n) ** (2 / 3)
    else:
        value = float(m) ** (4 / 3) / float(n) ** (2 / 3)
    r = Fraction(value).limit_denominator(R_DENOMINATOR_LIMIT)
    return min(max(r, Fraction(2)), Fraction(m))


def choose_curve_r(m, n, k):
    """r = m^(2k/(2k-1)) / n^(2/(2k-1)), rounded, not clamped"""
    value = float(m) ** (2 * k / (2 * k - 1)) / float(n) ** (2 / (2 * k - 1))
    return Fraction(value).limit_denominator(R_DENOMINATOR_LIMIT)


def _line_zero_structure(pr, line):
    """(contained, zero_count) of the product of factors along a line"""
    p, q = line_points(line)
    g = product_of_restrictions(pr.factors, p, q)
    if g.is_zero():
        return True, None
    if g.degree() < 1:
        return False, 0
    bound = g.root_bound()
    return False, count_roots_in_interval(g, -bound, bound)


def _add_lemma_entries(report, per_line, m, n):
    incidences = sum(len(members) for members in per_line)
    report.add("lemma_bound", incidences, n + m * m)
    sparse = sum(len(members) for members in per_line if len(members) <= 1)
    dense = incidences - sparse
    report.add("lemma_sparse_lines", sparse, n)
    report.add("lemma_rich_lines", dense, m * (m - 1))
    return incidences


def audit_szemeredi_trotter(
    points,
    lines,
    r=None,
    eps=DEFAULT_EPS,
    seed=0,
    dual=False,
    partition_outside_range=False,
    restarts=DEFAULT_RESTARTS,
    iterations=DEFAULT_ITERATIONS,
):
    """Exact audit of the partition proof of the Szemeredi-Trotter bound.

    m is the number of points and n the number of lines. The entries
    follow the proof: the elementary bound I <= n + m^2 and its split,
    then for an r-partitioning polynomial of total degree D: lines in
    Z (at most D), I(P0, L0) <= |L0||P0|, I(P0, L - L0) <= |L - L0| D,
    zeros per line <= D, sum |L_i| <= (D+1) n, sum |P_i|^2 <= max|P_i| m,
    and the decomposition of I as an equality.

    Args:
        points, lines: the instance
        r (Fraction): defaults to choose_st_r(m, n)
        eps, seed, restarts, iterations: forwarded to build_partition
        dual (bool): audit the dual instance when m > n
        partition_outside_range (bool): also run the partition part when
            m < sqrt(n), where the elementary bound already suffices

    Returns:
        AuditReport
    """
    points = [tuple(parse_rational(c) for c in point) for point in points]
    lines = list(LineSet(lines))
    report = AuditReport("szemeredi_trotter")
    if dual and len(points) > len(lines):
        points, dual_lines, lam = dualize(points, lines, seed=seed)
        lines = list(dual_lines)
        report.set_info("dualized", True)
        report.set_info("shear", lam)
    m, n = len(points), len(lines)
    report.set_info("m", m)
    report.set_info("n", n)
    per_line = incidences_per_line(points, lines)
    incidences = _add_lemma_entries(report, per_line, m, n)
    report.set_info("incidences", incidences)
    if n:
        report.set_info("st_ratio", float(st_bound_ratio(points, lines)))

    in_range = m * m >= n
    report.set_info("in_range", in_range)
    if m < 2 or n < 1 or not (in_range or partition_outside_range):
        logger.info("Partition part of the audit skipped (m=%d, n=%d)", m, n)
        return report
    r = choose_st_r(m, n) if r is None else parse_rational(r)
    if not 1 < r <= m:
        raise ValueError("r must satisfy 1 < r <= m, got %s" % r)
    report.set_info("r", r)
    pr = build_partition(
        points, r, eps=eps, seed=seed, restarts=restarts, iterations=iterations
    )
    degree = pr.total_degree
    report.set_info("total_degree", degree)
    report.set_info("rounds", pr.num_rounds)
    report.set_info("harnack_bound", harnack_bound(degree))
    report.add("max_cell_size", pr.max_cell_size(), ceil_fraction(Fraction(m) / r))

    boundary = set(pr.boundary_points)
    contained = []
    max_zeros = 0
    meets = 0
    nonempty = set(pr.cells)
    for idx, line in enumerate(lines):
        is_contained, zeros = _line_zero_structure(pr, line)
        if is_contained:
            contained.append(idx)
            continue
        max_zeros = max(max_zeros, zeros)
        meets += len(nonempty.intersection(pr.line_sign_classes(line)))
    contained_set = set(contained)

    on_z_contained = sum(
        1 for idx in contained for p in per_line[idx] if p in boundary
    )
    on_z_other = sum(
        1
        for idx in range(n)
        if idx not in contained_set
        for p in per_line[idx]
        if p in boundary
    )
    in_cells = sum(
        1 for members in per_line for p in members if p not in boundary
    )
    report.add("contained_lines", len(contained), degree)
    report.add(
        "boundary_contained_incidences", on_z_contained, len(contained) * len(boundary)
    )
    report.add("boundary_other_incidences", on_z_other, (n - len(contained)) * degree)
    report.add("max_line_zeros", max_zeros, degree)
    report.add("lines_meeting_cells", meets, (degree + 1) * n)
    squares = sum(size * size for size in pr.cell_sizes())
    report.add("cell_size_squares", squares, pr.max_cell_size() * m)
    report.add("cell_incidences", in_cells, meets + squares)
    report.add_equality(
        "decomposition", on_z_contained + on_z_other + in_cells, incidences
    )
    return report


def audit_curve_bounds(
    points,
    curves,
    with_partition=False,
    eps=DEFAULT_EPS,
    seed=0,
    restarts=DEFAULT_RESTARTS,
    iterations=DEFAULT_ITERATIONS,
):
    """Exact audit of the incidence bounds for a curve family.

    Entries: I <= (k-1) n + C m binom(m-1, k-1) with its split into
    curves with fewer than k incidences and the rest, and
    I <= m + b^2 n (n-1). The target combination
    m^(k/(2k-1)) n^((2k-2)/(2k-1)) + m + n, the ratio to it and the r
    choice are reported as info. With with_partition, the partition
    entry sum |P_i|^k <= max|P_i|^(k-1) m is added when 1 < r <= m.

    Args:
        points: the point set (m points)
        curves (CurveSet): n curves with family parameters k, C, b

    Returns:
        AuditReport
    """
    points = [tuple(parse_rational(c) for c in point) for point in points]
    k, C, b = curves.k, curves.C, curves.b
    m, n = len(points), len(curves)
    report = AuditReport("curve_bounds")
    per_curve = incidences_per_curve(points, curves)
    incidences = sum(len(members) for members in per_curve)
    sparse = sum(len(members) for members in per_curve if len(members) < k)
    rich = incidences - sparse
    rich_bound = C * m * math.comb(max(m - 1, 0), k - 1)
    report.add("sparse_curves", sparse, (k - 1) * n)
    report.add("rich_curves", rich, rich_bound)
    report.add("points_bound", incidences, (k - 1) * n + rich_bound)
    report.add("curves_bound", incidences, m + b * b * n * (n - 1))
    report.set_info("m", m)
    report.set_info("n", n)
    report.set_info("incidences", incidences)
    report.set_info("in_range", m <= n * n and n <= m**k)
    if m and n:
        target = (
            float(m) ** (k / (2 * k - 1)) * float(n) ** ((2 * k - 2) / (2 * k - 1))
            + m
            + n
        )
        report.set_info("target", target)
        report.set_info("ratio", incidences / target)
        r = choose_curve_r(m, n, k)
        report.set_info("r", r)
        if with_partition and 1 < r <= m:
            pr = build_partition(
                points,
                r,
                eps=eps,
                seed=seed,
                restarts=restarts,
                iterations=iterations,
            )
            sizes = pr.cell_sizes()
            largest = max(sizes, default=0)
            report.set_info("total_degree", pr.total_degree)
            report.add("max_cell_size", largest, ceil_fraction(Fraction(m) / r))
            report.add(
                "cell_size_powers",
                sum(size**k for size in sizes),
                largest ** (k - 1) * sum(sizes),
            )
    return report
