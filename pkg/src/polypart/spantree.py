"""Straight-edge spanning trees with low crossing number

The tree is built level by level. At each level the current
representatives are perturbed slightly, an r-partitioning polynomial
with r = n/c is built for them, and inside every cell the points that
can see each other (a straight segment on which no factor vanishes) are
joined. One representative per visibility group moves on to the next
level. A hyperplane crossing an edge of a level must enter the cell of
that edge, which bounds how many edges of a level it can cross.
"""

import logging
import os
from collections import OrderedDict, namedtuple
from fractions import Fraction

import pandas as pd
import yaml

from .algebra import monomial_count, segment_has_root
from .audit import AuditReport
from .hamsandwich import DEFAULT_EPS, DEFAULT_ITERATIONS, DEFAULT_RESTARTS, veronese_lift
from .partition import (
    build_partition,
    elementary_harnack_bound,
    harnack_bound,
    section_warren_bound,
    warren_bound,
)
from .util import format_rational, ints_to_point, parse_rational, point_to_ints
from .util.linalg import determinant
from .util.seeding import make_rng, random_fraction

logger = logging.getLogger(__name__)

DEFAULT_C = 8
MAX_PERTURB_RETRIES = 3
MAX_DOUBLINGS = 3
MAX_DELTA_HALVINGS = 3
CHECK_LIMIT_PLANE = 128
CHECK_LIMIT_SPACE = 32
DELTA_CAP = Fraction(1, 1024)
PERTURB_RESOLUTION = 2**20

BUILD_LOG_COLUMNS = [
    "level",
    "n",
    "c",
    "r",
    "t",
    "total_degree",
    "cells",
    "boundary",
    "groups",
    "retries",
    "halvings",
    "doublings",
    "fallback_edges",
]

BoundConstants = namedtuple(
    "BoundConstants", ["warren", "harnack", "section_warren", "elementary_harnack"]
)


def bound_constants(d, D):
    """Component bounds for a degree-D polynomial in R^d.

    Returns:
        BoundConstants: warren = 6 (2D)^d, harnack = 1 + binom(D-1, 2)
        (None unless d == 2), section_warren = 6 (2D)^(d-1) and the
        elementary plane bound D(D+1)/2 (None unless d == 2).
    """
    if d < 1 or D < 1:
        raise ValueError("bound_constants needs d >= 1 and D >= 1")
    planar = d == 2
    return BoundConstants(
        warren_bound(d, D),
        harnack_bound(D) if planar else None,
        section_warren_bound(d, D),
        elementary_harnack_bound(D) if planar else None,
    )


def exceptional_tuple_test(points, D):
    """Determinant of the rows (1, lift(p)) for k+1 points, k = monomial_count.

    The value is zero exactly when the points lie on a common zero set
    of a nonzero polynomial of degree <= D.

    Returns:
        Fraction
    """
    if not points:
        raise ValueError("Empty tuple")
    d = len(points[0])
    expected = monomial_count(d, D) + 1
    if len(points) != expected:
        raise ValueError(
            "Tuple must have %d points for d=%d, D=%d, got %d"
            % (expected, d, D, len(points))
        )
    rows = [[Fraction(1)] + list(veronese_lift(p, d, D).coords) for p in points]
    return determinant(rows)


def default_delta(points):
    """Half the smallest nonzero coordinate difference, capped at 1/1024"""
    smallest = None
    if points:
        for axis in range(len(points[0])):
            values = sorted({parse_rational(p[axis]) for p in points})
            for low, high in zip(values, values[1:]):
                gap = high - low
                if smallest is None or gap < smallest:
                    smallest = gap
    if smallest is None:
        return DELTA_CAP
    return min(smallest / 2, DELTA_CAP)


def perturb_points(points, delta, seed, key=()):
    """Shift every coordinate by an independent rational in (-delta, delta).

    The shifts are drawn from a grid of resolution delta / 2^20. Output
    points are pairwise distinct; a point colliding with an earlier one
    is redrawn.
    """
    delta = parse_rational(delta)
    if delta <= 0:
        raise ValueError("delta must be positive, got %s" % delta)
    rng = make_rng(seed, *key)
    denominator = delta.denominator * PERTURB_RESOLUTION
    seen = set()
    result = []
    for point in points:
        point = tuple(parse_rational(c) for c in point)
        while True:
            moved = []
            for coord in point:
                shift = -delta
                while shift == -delta:
                    shift = random_fraction(rng, -delta, delta, denominator)
                moved.append(coord + shift)
            moved = tuple(moved)
            if moved not in seen:
                break
        seen.add(moved)
        result.append(moved)
    return result


def segment_crosses_zero(factors, p, q):
    """True if some factor vanishes on the closed segment [p, q].

    A factor vanishing identically on the segment counts as crossing.
    """
    if tuple(p) == tuple(q):
        raise ValueError("Segment endpoints coincide")
    return any(segment_has_root(f, p, q) for f in factors)


class _UnionFind(object):
    """Union-find whose roots are always the lowest member"""

    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, left, right):
        left, right = self.find(left), self.find(right)
        if left == right:
            return False
        low, high = min(left, right), max(left, right)
        self.parent[high] = low
        return True


class TreeLevel(object):
    """Everything one level of the construction produced.

    Attributes:
        level (int), active (list of original indices), c (int),
        partition (PartitionResult or None), perturbed (list of points),
        groups (list of lists of original indices), edges (list of pairs),
        representatives (list), retries (int), delta (Fraction),
        halvings (int), doublings (int), fallback (bool)
    """

    def __init__(self, level, active, c, **kwargs):
        self.level = level
        self.active = list(active)
        self.c = c
        self.r = kwargs.get("r")
        self.partition = kwargs.get("partition")
        self.perturbed = kwargs.get("perturbed", [])
        self.groups = kwargs.get("groups", [])
        self.edges = kwargs.get("edges", [])
        self.representatives = kwargs.get("representatives", [])
        self.retries = kwargs.get("retries", 0)
        self.delta = kwargs.get("delta")
        self.halvings = kwargs.get("halvings", 0)
        self.doublings = kwargs.get("doublings", 0)
        self.fallback = kwargs.get("fallback", False)
        self.star = kwargs.get("star", False)

    @property
    def n(self):
        return len(self.active)

    def to_record(self):
        pr = self.partition
        return OrderedDict(
            [
                ("level", self.level),
                ("n", self.n),
                ("c", self.c),
                ("r", format_rational(self.r) if self.r is not None else ""),
                ("t", pr.num_rounds if pr else 0),
                ("total_degree", pr.total_degree if pr else 0),
                ("cells", len(pr.cells) if pr else 0),
                ("boundary", len(pr.boundary_points) if pr else 0),
                ("groups", len(self.groups)),
                ("retries", self.retries),
                ("halvings", self.halvings),
                ("doublings", self.doublings),
                ("fallback_edges", len(self.edges) if self.fallback else 0),
            ]
        )


class GeoTree(object):
    """A straight-edge graph on an indexed point set.

    Args:
        points (list): rational points of one dimension
        edges (list): index pairs
        fallback_edges (list): the subset of edges added by the fallback
        levels (list): TreeLevel records of the construction
    """

    def __init__(self, points, edges, fallback_edges=None, levels=None):
        self.points = [tuple(parse_rational(c) for c in point) for point in points]
        self.edges = [tuple(sorted((int(i), int(j)))) for i, j in edges]
        self.fallback_edges = [
            tuple(sorted((int(i), int(j)))) for i, j in (fallback_edges or [])
        ]
        self.levels = list(levels or [])

    @property
    def dimension(self):
        return len(self.points[0]) if self.points else None

    def __len__(self):
        return len(self.points)

    def components(self):
        finder = _UnionFind(range(len(self.points)))
        for i, j in self.edges:
            finder.union(i, j)
        return len({finder.find(idx) for idx in range(len(self.points))})

    def problems(self):
        """List of reasons the graph is not a spanning tree (empty if it is)"""
        problems = []
        n = len(self.points)
        if any(i == j for i, j in self.edges):
            problems.append("self-loop")
        if len(set(self.edges)) != len(self.edges):
            problems.append("duplicate edge")
        if any(not (0 <= i < n and 0 <= j < n) for i, j in self.edges):
            problems.append("edge index out of range")
            return problems
        if len(self.edges) != max(n - 1, 0):
            problems.append("%d edges for %d points" % (len(self.edges), n))
        if n and self.components() != 1:
            problems.append("%d components" % self.components())
        return problems

    def is_spanning_tree(self):
        return not self.problems()

    def validate(self):
        problems = self.problems()
        if problems:
            logger.error("Not a spanning tree: %s", ", ".join(problems))
            raise ValueError("Not a spanning tree: %s" % ", ".join(problems))

    def build_log(self):
        """One row per construction level"""
        return pd.DataFrame(
            [level.to_record() for level in self.levels], columns=BUILD_LOG_COLUMNS
        )

    def to_dict(self):
        data = OrderedDict(
            [
                ("dimension", self.dimension),
                ("points", [point_to_ints(point) for point in self.points]),
                ("edges", [list(edge) for edge in self.edges]),
                ("fallback_edges", [list(edge) for edge in self.fallback_edges]),
            ]
        )
        if self.levels:
            data["log"] = [dict(level.to_record()) for level in self.levels]
        return data

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
            [ints_to_point(ints) for ints in data["points"]],
            data["edges"],
            fallback_edges=data.get("fallback_edges"),
        )

    def __repr__(self):
        return "<GeoTree n=%d edges=%d fallback=%d>" % (
            len(self.points),
            len(self.edges),
            len(self.fallback_edges),
        )


def _squared_distance(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q))


def nearest_representative_edges(points, indices):
    """Spanning tree on the given indices by repeatedly adding the shortest
    edge from the tree to a new point (ties to the lowest indices)"""
    indices = sorted(indices)
    if len(indices) < 2:
        return []
    inside = [indices[0]]
    outside = indices[1:]
    best = {idx: (_squared_distance(points[idx], points[indices[0]]), indices[0]) for idx in outside}
    edges = []
    while outside:
        chosen = min(outside, key=lambda idx: (best[idx][0], best[idx][1], idx))
        edges.append(tuple(sorted((best[chosen][1], chosen))))
        outside.remove(chosen)
        inside.append(chosen)
        for idx in outside:
            distance = _squared_distance(points[idx], points[chosen])
            if (distance, chosen) < best[idx]:
                best[idx] = (distance, chosen)
    return edges


class TreeBuilder(object):
    """Level-by-level construction of a low-crossing spanning tree.

    Args:
        c (int): target points per cell, at least 2
        seed (int): run seed
        eps, restarts, iterations: forwarded to build_partition
        delta (Fraction): initial perturbation bound for every level,
            default_delta of the level's points if omitted
        check_crossings (bool): compare exact crossing numbers of each
            level's edges before and after perturbing, halving delta and
            rebuilding the level on a mismatch
    """

    def __init__(
        self,
        c=DEFAULT_C,
        seed=0,
        eps=DEFAULT_EPS,
        restarts=DEFAULT_RESTARTS,
        iterations=DEFAULT_ITERATIONS,
        delta=None,
        check_crossings=True,
    ):
        if c < 2:
            raise ValueError("c must be at least 2, got %s" % c)
        self.c = int(c)
        self.seed = seed
        self.eps = parse_rational(eps)
        self.restarts = restarts
        self.iterations = iterations
        self.delta = parse_rational(delta) if delta is not None else None
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive, got %s" % delta)
        self.check_crossings = check_crossings

    def run(self, points):
        points = [tuple(parse_rational(coord) for coord in p) for p in points]
        if not points:
            raise ValueError("Cannot build a tree on an empty point set")
        if len({len(p) for p in points}) != 1:
            raise ValueError("Points have mixed dimensions")
        active = list(range(len(points)))
        edges = []
        fallback = []
        levels = []
        level = 0
        while len(active) > 1:
            if len(active) <= self.c:
                record = self._star(level, active)
            else:
                record = self._level(points, level, active)
            levels.append(record)
            edges.extend(record.edges)
            if record.fallback:
                fallback.extend(record.edges)
            logger.info(
                "Level %d: %d points, %d groups, %d edges",
                level,
                record.n,
                len(record.groups),
                len(record.edges),
            )
            active = record.representatives
            level += 1
        tree = GeoTree(points, edges, fallback_edges=fallback, levels=levels)
        tree.validate()
        return tree

    def _star(self, level, active):
        center = min(active)
        edges = [(center, idx) for idx in sorted(active) if idx != center]
        return TreeLevel(
            level,
            active,
            self.c,
            groups=[sorted(active)],
            edges=edges,
            representatives=[center],
            star=True,
        )

    def _partition(self, local, level, doubling, halving, r, delta):
        d = len(local[0])
        retries = 0
        while True:
            key = (level, doubling, halving, retries)
            perturbed = perturb_points(local, delta, self.seed, key=key)
            pr = build_partition(
                perturbed,
                r,
                eps=self.eps,
                seed=self.seed,
                key=key,
                restarts=self.restarts,
                iterations=self.iterations,
            )
            cap = monomial_count(d, pr.total_degree)
            if len(pr.boundary_points) <= cap:
                return perturbed, pr, retries
            if retries == MAX_PERTURB_RETRIES:
                logger.warning(
                    "Level %d: %d boundary points exceed %d after %d retries, accepted",
                    level,
                    len(pr.boundary_points),
                    cap,
                    retries,
                )
                return perturbed, pr, retries
            logger.warning(
                "Level %d: %d boundary points exceed %d, perturbing again",
                level,
                len(pr.boundary_points),
                cap,
            )
            retries += 1

    def _groups(self, active, perturbed, pr):
        """Visibility groups inside every cell, and the edges joining them"""
        finder = _UnionFind(range(len(active)))
        edges = []
        for members in pr.cells.values():
            for pos, i in enumerate(members):
                for j in members[pos + 1 :]:
                    if finder.find(i) == finder.find(j):
                        continue
                    if not segment_crosses_zero(pr.factors, perturbed[i], perturbed[j]):
                        finder.union(i, j)
                        edges.append((active[i], active[j]))
        grouped = OrderedDict()
        for local in range(len(active)):
            grouped.setdefault(finder.find(local), []).append(active[local])
        return list(grouped.values()), edges

    def _crossings_kept(self, level, active, local, perturbed, edges, delta):
        """Exact crossing number of the level's edges is the same on the
        original and on the perturbed points. Levels too large for the
        exact count are not checked."""
        if not self.check_crossings or not edges:
            return True
        limit = CHECK_LIMIT_PLANE if len(local[0]) <= 2 else CHECK_LIMIT_SPACE
        if len(local) > limit:
            return True
        # crossing imports this module
        from . import crossing

        position = {idx: pos for pos, idx in enumerate(active)}
        pairs = [(position[i], position[j]) for i, j in edges]
        agree, before, after = crossing.crossings_agree(local, perturbed, pairs)
        if not agree:
            logger.warning(
                "Level %d: crossing number %d after perturbing by %s, %d before",
                level,
                after,
                format_rational(delta),
                before,
            )
        return agree

    def _level(self, points, level, active):
        c = self.c
        n = len(active)
        local = [points[idx] for idx in active]
        for doubling in range(MAX_DOUBLINGS + 1):
            if n <= c:
                record = self._star(level, active)
                record.c = c
                record.doublings = doubling
                return record
            r = Fraction(n, c)
            delta = self.delta if self.delta is not None else default_delta(local)
            for halving in range(MAX_DELTA_HALVINGS + 1):
                perturbed, pr, retries = self._partition(
                    local, level, doubling, halving, r, delta
                )
                groups, edges = self._groups(active, perturbed, pr)
                if self._crossings_kept(level, active, local, perturbed, edges, delta):
                    break
                if halving == MAX_DELTA_HALVINGS:
                    logger.warning(
                        "Level %d: crossing number still changes at delta %s, accepted",
                        level,
                        format_rational(delta),
                    )
                else:
                    delta /= 2
            record = TreeLevel(
                level,
                active,
                c,
                r=r,
                partition=pr,
                perturbed=perturbed,
                groups=groups,
                edges=edges,
                representatives=sorted(min(group) for group in groups),
                retries=retries,
                delta=delta,
                halvings=halving,
                doublings=doubling,
            )
            if 2 * len(groups) <= n:
                return record
            if doubling < MAX_DOUBLINGS:
                logger.warning(
                    "Level %d: %d groups for %d points, doubling c to %d",
                    level,
                    len(groups),
                    n,
                    2 * c,
                )
                c *= 2
        logger.warning(
            "Level %d: still %d groups for %d points, adding fallback edges",
            level,
            len(record.groups),
            n,
        )
        record.fallback = True
        record.edges = record.edges + nearest_representative_edges(
            points, record.representatives
        )
        record.representatives = [min(record.representatives)]
        return record


def build_low_crossing_tree(
    points,
    c=DEFAULT_C,
    seed=0,
    eps=DEFAULT_EPS,
    restarts=DEFAULT_RESTARTS,
    iterations=DEFAULT_ITERATIONS,
):
    """Spanning tree on points with low crossing number.

    Args:
        points (list): rational points in R^d
        c (int): cell size parameter, r = n / c at each level
        seed (int): run seed

    Returns:
        GeoTree with its construction levels; edges index the input points.
    """
    return TreeBuilder(
        c=c, seed=seed, eps=eps, restarts=restarts, iterations=iterations
    ).run(points)


def audit_tree(tree):
    """Structural audit of a tree built by build_low_crossing_tree.

    Returns:
        AuditReport
    """
    report = AuditReport("tree")
    n = len(tree.points)
    report.add_equality("edge_count", len(tree.edges), max(n - 1, 0))
    report.add_equality("components", tree.components() if n else 1, 1)
    report.set_info("fallback_edges", len(tree.fallback_edges))
    for record in tree.levels:
        pr = record.partition
        if pr is None:
            continue
        prefix = "level_%d_" % record.level
        position = {idx: local for local, idx in enumerate(record.active)}
        crossing = 0
        fallback = set(tree.fallback_edges)
        for i, j in record.edges:
            if tuple(sorted((i, j))) in fallback:
                continue
            p = record.perturbed[position[i]]
            q = record.perturbed[position[j]]
            if segment_crosses_zero(pr.factors, p, q):
                crossing += 1
        report.add(prefix + "edges_crossing_zero", crossing, 0)
        if not record.fallback:
            report.add(prefix + "groups_halved", 2 * len(record.groups), record.n)
        d = len(record.perturbed[0])
        report.add(
            prefix + "boundary_points",
            len(pr.boundary_points),
            monomial_count(d, pr.total_degree),
        )
        report.add(prefix + "cells", len(pr.cells), warren_bound(d, pr.total_degree))
    return report
