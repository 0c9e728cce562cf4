"""Testing low-crossing spanning trees"""

import logging
from fractions import Fraction

import pytest

from polypart import crossing
from polypart.algebra import MultiPoly
from polypart.incidence import generate_grid_points, generate_random_points
from polypart.spantree import (
    BUILD_LOG_COLUMNS,
    DELTA_CAP,
    MAX_DELTA_HALVINGS,
    GeoTree,
    TreeBuilder,
    audit_tree,
    bound_constants,
    build_low_crossing_tree,
    default_delta,
    exceptional_tuple_test,
    nearest_representative_edges,
    perturb_points,
    segment_crosses_zero,
)
from polypart.util.seeding import make_rng, random_fraction

logger = logging.getLogger(__name__)

X = MultiPoly.variable(2, 0)
Y = MultiPoly.variable(2, 1)
CIRCLE = X * X + Y * Y - 1


@pytest.mark.parametrize(
    "d, D, warren, harnack",
    [(2, 4, 384, 4), (2, 3, 216, 2), (3, 2, 384, None), (2, 1, 24, 1)],
)
def test_bound_constants(d, D, warren, harnack):
    """6 (2D)^d, and 1 + binom(D-1, 2) in the plane only"""
    constants = bound_constants(d, D)
    assert constants.warren == warren
    assert constants.harnack == harnack
    if d != 2:
        assert constants.elementary_harnack is None
    with pytest.raises(ValueError):
        bound_constants(2, 0)


def test_exceptional_tuples():
    """The lifted determinant vanishes on common zero sets"""
    assert exceptional_tuple_test([(0, 0), (1, 1), (2, 2)], 1) == 0
    assert abs(exceptional_tuple_test([(0, 0), (1, 0), (0, 1)], 1)) == 1
    on_circle = [(1, 0), (0, 1), (-1, 0), (0, -1), ("3/5", "4/5"), ("4/5", "-3/5")]
    assert exceptional_tuple_test(on_circle, 2) == 0
    with pytest.raises(ValueError):
        exceptional_tuple_test([(0, 0), (1, 1)], 1)
    with pytest.raises(ValueError):
        exceptional_tuple_test([], 1)


def test_exceptional_tuples_random():
    """Degenerate tuples give zero, random ones do not; swaps negate"""
    rng = make_rng(8)
    for _ in range(100):
        a, b, c = (random_fraction(rng, -9, 9, 5) for _ in range(3))
        if a == 0 and b == 0:
            continue
        # Three points on a*x + b*y + c = 0
        if b:
            xs = [random_fraction(rng, -4, 4, 3) for _ in range(3)]
            triple = [(x, -(a * x + c) / b) for x in xs]
        else:
            triple = [(-c / a, random_fraction(rng, -4, 4, 3)) for _ in range(3)]
        assert exceptional_tuple_test(triple, 1) == 0

        conic = [(x, x * x - 1) for x in (random_fraction(rng, -4, 4, 7) for _ in range(6))]
        assert exceptional_tuple_test(conic, 2) == 0

        generic = [(random_fraction(rng, -4, 4, 97), random_fraction(rng, -4, 4, 89)) for _ in range(6)]
        value = exceptional_tuple_test(generic, 2)
        assert value != 0
        swapped = [generic[1], generic[0]] + generic[2:]
        assert exceptional_tuple_test(swapped, 2) == -value


def test_default_delta():
    """Half the smallest gap, capped"""
    assert default_delta([(0, 0), (1, 0), (0, "1/2")]) == DELTA_CAP
    assert default_delta([(0, 0), (Fraction(1, 4096), 1)]) == Fraction(1, 8192)
    assert default_delta([(3, 3)]) == DELTA_CAP


def test_perturb_points():
    """Small reproducible shifts that keep the coordinate order"""
    points = generate_grid_points(4)
    delta = Fraction(1, 8)
    first = perturb_points(points, delta, seed=1)
    assert first == perturb_points(points, delta, seed=1)
    assert first != perturb_points(points, delta, seed=2)
    assert first != perturb_points(points, delta, seed=1, key=(1,))
    for old, new in zip(points, first):
        assert all(abs(a - b) < delta for a, b in zip(old, new))
    for axis in range(2):
        for p, q in zip(points, points[1:]):
            if p[axis] < q[axis]:
                assert first[points.index(p)][axis] < first[points.index(q)][axis]
    with pytest.raises(ValueError):
        perturb_points(points, 0, seed=1)


def test_perturb_duplicates():
    """Repeated points come out distinct"""
    moved = perturb_points([(1, 1)] * 10, Fraction(1, 1024), seed=3)
    assert len(set(moved)) == 10


def test_segment_crosses_zero():
    """Closed segments against the zero sets of the factors"""
    assert segment_crosses_zero([CIRCLE], (0, 0), (2, 0))
    assert not segment_crosses_zero([CIRCLE], (0, 0), ("1/2", 0))
    assert not segment_crosses_zero([X, Y], (1, 1), (2, 3))
    assert segment_crosses_zero([X, Y], (1, 1), (-1, 2))
    with pytest.raises(ValueError):
        segment_crosses_zero([X], (1, 1), (1, 1))


def test_geotree_problems():
    """Structural checks of a spanning tree"""
    points = [(0, 0), (1, 0), (2, 0)]
    assert GeoTree(points, [(0, 1), (1, 2)]).is_spanning_tree()
    assert GeoTree([(5, 5)], []).is_spanning_tree()
    assert "self-loop" in GeoTree(points, [(0, 0), (1, 2)]).problems()
    assert "duplicate edge" in GeoTree(points, [(0, 1), (1, 0)]).problems()
    assert "2 components" in GeoTree(points, [(0, 1)]).problems()
    assert GeoTree(points, [(0, 1), (1, 5)]).problems() == ["edge index out of range"]
    with pytest.raises(ValueError):
        GeoTree(points, [(0, 1), (0, 1), (1, 2)]).validate()


def test_nearest_representative_edges():
    """Prim on squared distances, ties to the lowest index"""
    points = [(0, 0), (1, 0), (3, 0), (0, 1)]
    assert nearest_representative_edges(points, [0, 1, 2]) == [(0, 1), (1, 2)]
    assert nearest_representative_edges(points, [1, 3, 0]) == [(0, 1), (0, 3)]
    assert nearest_representative_edges(points, [2]) == []


def test_star_base_case():
    """n <= c gives a star from the lowest index"""
    tree = build_low_crossing_tree([(0, 0), (1, 0), (2, 0)], c=3)
    assert tree.edges == [(0, 1), (0, 2)]
    assert tree.levels[0].star
    assert tree.fallback_edges == []
    assert len(tree.build_log()) == 1

    single = build_low_crossing_tree([(4, 4)], c=2)
    assert single.edges == []
    assert single.levels == []
    with pytest.raises(ValueError):
        build_low_crossing_tree([])
    with pytest.raises(ValueError):
        TreeBuilder(c=1)


def test_tree_random_plane():
    """Spanning tree on random points; tree edges stay inside their cells"""
    points = generate_random_points(40, seed=6)
    tree = build_low_crossing_tree(points, c=8, seed=6, restarts=16, iterations=800)
    assert tree.is_spanning_tree()
    assert len(tree.edges) == 39
    report = audit_tree(tree)
    assert report.passed, report.failures()
    level = tree.levels[0]
    assert level.partition is not None
    position = {idx: pos for pos, idx in enumerate(level.active)}
    for i, j in ([] if level.fallback else level.edges):
        p, q = level.perturbed[position[i]], level.perturbed[position[j]]
        assert not segment_crosses_zero(level.partition.factors, p, q)
    log = tree.build_log()
    assert list(log.columns) == BUILD_LOG_COLUMNS
    assert list(log["level"]) == list(range(len(tree.levels)))


def test_tree_deterministic():
    """Same points and seed, same tree"""
    points = generate_random_points(24, seed=12)
    first = build_low_crossing_tree(points, c=4, seed=1, restarts=8, iterations=600)
    second = build_low_crossing_tree(points, c=4, seed=1, restarts=8, iterations=600)
    assert first.to_yaml() == second.to_yaml()


def test_tree_duplicates_and_collinear():
    """Degenerate inputs still give spanning trees"""
    points = [(i, 0) for i in range(12)] + [(3, 0), (3, 0)]
    tree = build_low_crossing_tree(points, c=4, seed=2, restarts=8, iterations=600)
    assert tree.is_spanning_tree()


def test_tree_space():
    """Trees in R^3"""
    points = generate_random_points(30, seed=3, dimension=3)
    tree = build_low_crossing_tree(points, c=8, seed=3, restarts=8, iterations=600)
    assert tree.dimension == 3
    assert tree.is_spanning_tree()
    assert audit_tree(tree)["edge_count"].passed


def test_tree_yaml(tmpdir):
    """Trees survive their YAML form; the log stays in the file"""
    points = [(0, 0), ("1/2", 3), (2, -1), (5, 5)]
    tree = build_low_crossing_tree(points, c=4)
    tmpdir.chdir()
    tree.to_disk("trees/small.yml")
    again = GeoTree.from_yaml("trees/small.yml")
    assert again.points == tree.points
    assert again.edges == tree.edges
    assert "log:" in tree.to_yaml()
    assert GeoTree.from_yaml(again.to_yaml()).edges == tree.edges


def test_crossing_mismatch_rebuilds_level(monkeypatch):
    """A level whose crossing number changes under perturbation is rebuilt
    with half the delta"""
    bound = Fraction(1, 4096)

    def agree_when_close(points, moved, edges):
        close = all(
            abs(a - b) < bound for p, q in zip(points, moved) for a, b in zip(p, q)
        )
        return close, 1, (1 if close else 2)

    monkeypatch.setattr(crossing, "crossings_agree", agree_when_close)
    points = generate_random_points(24, seed=5)
    builder = TreeBuilder(c=8, seed=5, delta=2 * bound, restarts=8, iterations=600)
    tree = builder.run(points)
    assert tree.is_spanning_tree()
    checked = [
        level for level in tree.levels if level.partition is not None and level.edges
    ]
    assert checked
    for level in checked:
        assert level.halvings == 1
        assert level.delta == bound
        for original, moved in zip(level.active, level.perturbed):
            assert all(abs(a - b) < bound for a, b in zip(points[original], moved))
    log = tree.build_log()
    assert list(log["halvings"]) == [level.halvings for level in tree.levels]

    def never_agree(points, moved, edges):
        return False, 1, 2

    monkeypatch.setattr(crossing, "crossings_agree", never_agree)
    tree = TreeBuilder(c=8, seed=5, restarts=8, iterations=600).run(points)
    assert tree.is_spanning_tree()
    level = tree.levels[0]
    assert level.halvings == MAX_DELTA_HALVINGS
    assert level.delta == default_delta(points) / 2**MAX_DELTA_HALVINGS

    builder = TreeBuilder(c=8, seed=5, restarts=8, iterations=600, check_crossings=False)
    tree = builder.run(points)
    assert all(level.halvings == 0 for level in tree.levels)
    with pytest.raises(ValueError):
        TreeBuilder(delta=0)


@pytest.mark.slow
def test_tree_grid():
    """16 x 16 grid at c=8"""
    points = generate_grid_points(16)
    tree = build_low_crossing_tree(points, c=8, seed=0)
    assert tree.is_spanning_tree()
    assert audit_tree(tree).passed
