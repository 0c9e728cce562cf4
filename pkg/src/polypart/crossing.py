"""Crossing number of a straight-edge graph with respect to hyperplanes

The crossing number is the largest number of edges a single hyperplane
avoiding every vertex can cut. Exact mode enumerates every way a
hyperplane can split the vertex set: each split is realized by a small
perturbation of a hyperplane through d affinely independent vertices,
so it is enough to look at those hyperplanes together with every sign
assignment of the vertices lying on them. When more than d vertices lie
on a candidate, the assignments are the splits of those vertices inside
the candidate, found by the same enumeration one dimension lower.
Sampled mode evaluates random hyperplanes and reports a lower bound.
"""

import logging
import os
from collections import OrderedDict
from fractions import Fraction
from itertools import combinations, product
from math import lcm

import numpy as np
import yaml

from .spantree import GeoTree, default_delta, perturb_points
from .util import format_rational, parse_rational
from .util.linalg import integer_scaled, nullspace, rref, solve_min_norm
from .util.seeding import make_rng

logger = logging.getLogger(__name__)

EXACT_MODE_LIMIT = 128
EXACT_MODE_LIMIT_PLANE = 512
DEFAULT_SAMPLES = 20000
SAMPLE_COEFFICIENT_RANGE = 2**16
INT64_SAFE = 2**62
MODES = ("exact", "sampled")


def choose_mode(n, d):
    """Exact when affordable: n <= 512 in the plane, n <= 128 above"""
    limit = EXACT_MODE_LIMIT_PLANE if d <= 2 else EXACT_MODE_LIMIT
    return "exact" if n <= limit else "sampled"


def hyperplane_values(points, normal, offset):
    return [sum((a * c for a, c in zip(normal, p)), Fraction(0)) + offset for p in points]


def count_crossings(points, edges, normal, offset):
    """Edges cut by the hyperplane normal . x + offset = 0.

    Returns:
        (count, touched) where touched lists the vertices on the hyperplane
    """
    values = hyperplane_values(points, normal, offset)
    touched = [idx for idx, value in enumerate(values) if value == 0]
    count = sum(1 for i, j in edges if values[i] * values[j] < 0)
    return count, touched


class CrossingReport(object):
    """Result of crossing_number.

    Attributes:
        max_crossings (int): exact maximum, or a lower bound when sampled
        normal, offset: witness hyperplane normal . x + offset = 0
        mode (str): "exact" or "sampled"
        candidates_examined (int)
        crossed_edges (list): edges cut by the witness
    """

    def __init__(
        self, max_crossings, normal, offset, mode, candidates_examined, crossed_edges=None
    ):
        self.max_crossings = int(max_crossings)
        self.normal = tuple(parse_rational(value) for value in normal)
        self.offset = parse_rational(offset)
        self.mode = mode
        self.candidates_examined = int(candidates_examined)
        self.crossed_edges = [tuple(edge) for edge in (crossed_edges or [])]

    @property
    def lower_bound(self):
        """True when max_crossings is only a lower bound"""
        return self.mode == "sampled"

    def verify(self, tree):
        """Check that the witness avoids every vertex and cuts exactly
        max_crossings edges"""
        count, touched = count_crossings(tree.points, tree.edges, self.normal, self.offset)
        if touched:
            logger.error("Witness passes through vertices %s", touched)
            return False
        if count != self.max_crossings:
            logger.error("Witness cuts %d edges, report says %d", count, self.max_crossings)
            return False
        return True

    def to_dict(self):
        return OrderedDict(
            [
                ("max_crossings", self.max_crossings),
                ("mode", self.mode),
                ("lower_bound", self.lower_bound),
                ("candidates_examined", self.candidates_examined),
                ("normal", [format_rational(value) for value in self.normal]),
                ("offset", format_rational(self.offset)),
                ("crossed_edges", [list(edge) for edge in self.crossed_edges]),
            ]
        )

    def to_yaml(self):
        return yaml.safe_dump(dict(self.to_dict()), sort_keys=False)

    def to_disk(self, filename):
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
        return cls(
            data["max_crossings"],
            [str(value) for value in data["normal"]],
            str(data["offset"]),
            data["mode"],
            data["candidates_examined"],
            crossed_edges=data.get("crossed_edges"),
        )

    def __repr__(self):
        return "<CrossingReport %s max=%d%s over %d candidates>" % (
            self.mode,
            self.max_crossings,
            " (lower bound)" if self.lower_bound else "",
            self.candidates_examined,
        )


def _project(points):
    """Coordinate axes on which the affine hull of points projects injectively.

    Returns:
        (pivots, projected points)
    """
    if not points:
        return [], []
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    pivots = rref(diffs)[1] if diffs else []
    return pivots, [tuple(p[col] for col in pivots) for p in points]


def _hyperplane_through(points):
    """(normal, offset) of the unique hyperplane through k points in R^k,
    or None if they are affinely dependent"""
    k = len(points[0])
    if k == 1:
        return [Fraction(1)], -points[0][0]
    if k == 2:
        (x1, y1), (x2, y2) = points
        normal = [y1 - y2, x2 - x1]
        if not any(normal):
            return None
        return normal, -(normal[0] * x1 + normal[1] * y1)
    basis = nullspace([list(p) + [Fraction(1)] for p in points])
    if len(basis) != 1:
        return None
    vector = basis[0]
    return vector[:-1], vector[-1]


def _normalized_key(normal, offset):
    vector = integer_scaled(list(normal) + [offset])
    lead = next(value for value in vector if value)
    if lead < 0:
        vector = [-value for value in vector]
    return tuple(vector)


def _sign_patterns(points):
    """Every sign pattern a strict affine function takes on points.

    Yields (pattern, plan) pairs, each pattern once. The plan rebuilds a
    function realizing the pattern with _affine_from_plan.
    """
    n = len(points)
    seen = set()
    for sign in (1, -1):
        pattern = (sign,) * n
        seen.add(pattern)
        yield pattern, ("const", sign)
    pivots, proj = _project(points)
    k = len(pivots)
    if k == 0:
        return
    planes = set()
    for subset in combinations(range(n), k):
        plane = _hyperplane_through([proj[i] for i in subset])
        if plane is None:
            continue
        normal, offset = plane
        values = hyperplane_values(proj, normal, offset)
        on_plane = [idx for idx, value in enumerate(values) if value == 0]
        base = [1 if value > 0 else -1 if value < 0 else 0 for value in values]
        if len(on_plane) == k:
            variants = [
                (dict(zip(subset, assign)), ("assign", assign))
                for assign in product((1, -1), repeat=k)
            ]
        else:
            key = _normalized_key(normal, offset)
            if key in planes:
                continue
            planes.add(key)
            variants = [
                (dict(zip(on_plane, sub)), subplan)
                for sub, subplan in _sign_patterns([proj[i] for i in on_plane])
            ]
        for assignment, subplan in variants:
            pattern = tuple(assignment.get(idx, base[idx]) for idx in range(n))
            if pattern not in seen:
                seen.add(pattern)
                yield pattern, ("plane", subset, subplan)


def _affine_from_plan(points, plan):
    """Exact (normal, offset) in the coordinates of points realizing a plan"""
    dim = len(points[0])
    if plan[0] == "const":
        return [Fraction(0)] * dim, Fraction(plan[1])
    _, subset, subplan = plan
    pivots, proj = _project(points)
    normal, offset = _hyperplane_through([proj[i] for i in subset])
    values = hyperplane_values(proj, normal, offset)
    on_plane = [idx for idx, value in enumerate(values) if value == 0]
    if subplan[0] == "assign":
        rows = [list(proj[i]) + [Fraction(1)] for i in subset]
        weights = solve_min_norm(rows, [Fraction(sign) for sign in subplan[1]])
        g_normal, g_offset = weights[:-1], weights[-1]
    else:
        g_normal, g_offset = _affine_from_plan([proj[i] for i in on_plane], subplan)
    g_values = hyperplane_values(proj, g_normal, g_offset)
    eta = Fraction(1)
    for idx, value in enumerate(values):
        if value and g_values[idx]:
            eta = min(eta, abs(value) / abs(g_values[idx]) / 2)
    local = [a + eta * b for a, b in zip(normal, g_normal)]
    full = [Fraction(0)] * dim
    for col, value in zip(pivots, local):
        full[col] = value
    return full, offset + eta * g_offset


class _IntegerPoints(object):
    """Points scaled by a common denominator to integers, as numpy arrays.

    The int64 copy is used whenever a product cannot overflow, Python
    ints in an object array otherwise.
    """

    def __init__(self, points):
        self.scale = lcm(*(c.denominator for p in points for c in p)) if points else 1
        ints = [[int(c * self.scale) for c in p] for p in points]
        self.largest = max((abs(v) for row in ints for v in row), default=0)
        self.exact = np.array(ints, dtype=object)
        self.fast = self.exact.astype(np.int64) if self.largest < INT64_SAFE else None

    def values(self, normal, offset=0):
        """matrix @ normal + offset for integer normal and offset"""
        magnitude = self.largest * sum(abs(v) for v in normal) + abs(offset)
        if self.fast is not None and magnitude < INT64_SAFE:
            return self.fast @ np.array(normal, dtype=np.int64) + np.int64(offset)
        return self.exact.dot(np.array(normal, dtype=object)) + offset

    def signs(self, normal, offset=0):
        values = self.values(normal, offset)
        return np.asarray(values > 0, dtype=np.int8) - np.asarray(values < 0, dtype=np.int8)


class _Counter(object):
    """Vectorized edge counting shared by both modes"""

    def __init__(self, edges):
        self.left = np.array([i for i, _ in edges], dtype=np.int64)
        self.right = np.array([j for _, j in edges], dtype=np.int64)

    def fixed(self, signs):
        """Edges cut for sure, and the edges touching a zero vertex"""
        su = signs[self.left].astype(np.int64)
        sv = signs[self.right].astype(np.int64)
        fixed = int(np.count_nonzero(su * sv < 0))
        touching = np.nonzero((su == 0) | (sv == 0))[0]
        return fixed, [(int(self.left[e]), int(self.right[e])) for e in touching]


def _best_exact(tree):
    """Best candidate over hyperplanes through vertices.

    Returns:
        (count, plan, candidates examined); ties go to the first candidate
    """
    pivots, proj = _project(tree.points)
    k = len(pivots)
    if k == 0:
        return 0, ("const", 1), 0
    integer = _IntegerPoints(proj)
    counter = _Counter(tree.edges)
    best_count, best_plan = 0, ("const", 1)
    examined = 0
    planes = set()
    for subset in combinations(range(len(proj)), k):
        plane = _hyperplane_through([proj[i] for i in subset])
        if plane is None:
            continue
        normal, offset = plane
        vector = integer_scaled(list(normal) + [offset * integer.scale])
        signs = integer.signs([int(v) for v in vector[:-1]], int(vector[-1]))
        on_plane = [int(idx) for idx in np.nonzero(signs == 0)[0]]
        if len(on_plane) == k:
            variants = [
                (dict(zip(subset, assign)), ("assign", assign))
                for assign in product((1, -1), repeat=k)
            ]
        else:
            key = _normalized_key(normal, offset)
            if key in planes:
                continue
            planes.add(key)
            variants = [
                (dict(zip(on_plane, sub)), subplan)
                for sub, subplan in _sign_patterns([proj[i] for i in on_plane])
            ]
        examined += 1
        fixed, touching = counter.fixed(signs)
        for assignment, subplan in variants:
            count = fixed
            for i, j in touching:
                if assignment.get(i, int(signs[i])) != assignment.get(j, int(signs[j])):
                    count += 1
            if count > best_count:
                best_count, best_plan = count, ("plane", subset, subplan)
    return best_count, best_plan, examined


def _best_axis(tree):
    """Best axis-parallel hyperplane halfway between consecutive coordinates"""
    counter = _Counter(tree.edges)
    best = (0, None, None)
    examined = 0
    for axis in range(tree.dimension):
        column = np.array([p[axis] for p in tree.points], dtype=object)
        values = sorted(set(column))
        for low, high in zip(values, values[1:]):
            examined += 1
            middle = (low + high) / 2
            signs = np.where(np.asarray(column > middle, dtype=bool), 1, -1).astype(np.int8)
            count = counter.fixed(signs)[0]
            if count > best[0]:
                normal = [Fraction(0)] * tree.dimension
                normal[axis] = Fraction(1)
                best = (count, normal, -middle)
    return best, examined


def _far_hyperplane(tree):
    normal = [Fraction(0)] * tree.dimension
    normal[0] = Fraction(1)
    return normal, -(max(p[0] for p in tree.points) + 1)


def _best_sampled(tree, samples, seed):
    """Best of random hyperplanes, each placed halfway between two
    consecutive projections of the vertices"""
    integer = _IntegerPoints(tree.points)
    counter = _Counter(tree.edges)
    rng = make_rng(seed, 4)
    best = (0, None, None)
    d = tree.dimension
    for _ in range(samples):
        normal = [0] * d
        while not any(normal):
            normal = [
                int(v)
                for v in rng.integers(
                    -SAMPLE_COEFFICIENT_RANGE, SAMPLE_COEFFICIENT_RANGE + 1, size=d
                )
            ]
        values = integer.values(normal)
        distinct = np.unique(values)
        if len(distinct) < 2:
            continue
        gap = int(rng.integers(0, len(distinct) - 1))
        threshold = int(distinct[gap]) + int(distinct[gap + 1])
        above = np.asarray(2 * values.astype(object) > threshold, dtype=bool)
        signs = np.where(above, 1, -1).astype(np.int8)
        count = counter.fixed(signs)[0]
        if count > best[0]:
            best = (count, [Fraction(v) for v in normal], -Fraction(threshold, 2 * integer.scale))
    return best


def crossing_number(tree, mode="exact", samples=DEFAULT_SAMPLES, seed=0):
    """Largest number of edges of tree cut by one hyperplane avoiding its vertices.

    Args:
        tree (GeoTree): a valid tree
        mode (str): "exact" or "sampled"
        samples (int): number of random hyperplanes in sampled mode
        seed (int): seed for sampled mode

    Returns:
        CrossingReport with a verified witness hyperplane
    """
    if mode not in MODES:
        raise ValueError("Unknown crossing mode %s, use one of %s" % (mode, MODES))
    tree.validate()
    n = len(tree.points)
    d = tree.dimension
    if mode == "sampled" and samples <= 0:
        logger.error("Sampled mode needs a positive sample count, got %s", samples)
        raise ValueError("Sample count must be positive, got %s" % samples)
    if mode == "exact" and d >= 3 and n > EXACT_MODE_LIMIT:
        raise ValueError(
            "Exact crossing mode is limited to %d points in dimension %d, got %d, "
            "use sampled mode" % (EXACT_MODE_LIMIT, d, n)
        )
    if mode == "exact":
        (count, normal, offset), axis_examined = _best_axis(tree)
        best_count, plan, examined = _best_exact(tree)
        examined += axis_examined
        if best_count > count:
            count = best_count
            normal, offset = _affine_from_plan(tree.points, plan)
    else:
        count, normal, offset = _best_sampled(tree, samples, seed)
        examined = samples
    if normal is None:
        normal, offset = _far_hyperplane(tree)

    values = hyperplane_values(tree.points, normal, offset)
    crossed = [(i, j) for i, j in tree.edges if values[i] * values[j] < 0]
    touched = [idx for idx, value in enumerate(values) if value == 0]
    if touched or len(crossed) != count:
        raise RuntimeError(
            "Witness check failed: cuts %d edges (expected %d), touches %s"
            % (len(crossed), count, touched)
        )
    report = CrossingReport(count, normal, offset, mode, examined, crossed)
    logger.info("Crossing number %s", report)
    return report


def graph_crossings(points, edges):
    """Exact crossing number of any straight-edge graph, spanning or not"""
    graph = GeoTree(points, edges)
    if not graph.edges:
        return 0
    (count, _, _), _ = _best_axis(graph)
    return max(count, _best_exact(graph)[0])


def crossings_agree(points, moved, edges):
    """Whether one edge set has the same exact crossing number on two
    placements of its vertices.

    Returns:
        (agree, crossings on points, crossings on moved)
    """
    before = graph_crossings(points, edges)
    after = graph_crossings(moved, edges)
    return before == after, before, after


def perturbation_check(tree, delta=None, seed=0, key=(), max_halvings=3):
    """Compare the exact crossing number before and after perturbing the
    vertices, with the edge set unchanged.

    Points in general position keep their crossing number under a small
    enough perturbation. On a mismatch delta is halved and the vertices
    perturbed again, at most max_halvings times.

    Args:
        tree (GeoTree): valid tree
        delta (Fraction): initial shift bound, default_delta of the vertices
            if omitted
        seed (int), key (tuple): perturbation stream

    Returns:
        (matched, delta, original CrossingReport, perturbed CrossingReport)
    """
    delta = default_delta(tree.points) if delta is None else parse_rational(delta)
    original = crossing_number(tree, mode="exact")
    for halving in range(max_halvings + 1):
        moved = GeoTree(
            perturb_points(tree.points, delta, seed, key=tuple(key) + (halving,)),
            tree.edges,
        )
        perturbed = crossing_number(moved, mode="exact")
        if perturbed.max_crossings == original.max_crossings:
            return True, delta, original, perturbed
        logger.warning(
            "Crossing number %d after perturbing by %s, %d before; halving",
            perturbed.max_crossings,
            format_rational(delta),
            original.max_crossings,
        )
        if halving < max_halvings:
            delta /= 2
    return False, delta, original, perturbed
