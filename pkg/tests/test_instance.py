"""Testing instance files and generator parameters"""

import logging
import os
from fractions import Fraction

import pytest
import yaml

from polypart.incidence import count_incidences_curves, count_incidences_lines
from polypart.instance import KINDS, Instance, generate_instance, resolve_params

logger = logging.getLogger(__name__)

TESTDIR = os.path.dirname(os.path.abspath(__file__))


def test_resolve_params():
    """Defaults fill in, strings become integers, bad names are refused"""
    assert resolve_params("grid", {"rows": "3"}) == {"rows": 3, "cols": 0}
    assert resolve_params("random", {"n": 10, "lines": 4}) == {"n": 10, "lines": 4, "side": 0}
    with pytest.raises(ValueError):
        resolve_params("hexagon", {})
    with pytest.raises(ValueError):
        resolve_params("grid", {})
    with pytest.raises(ValueError):
        resolve_params("grid", {"rows": 3, "depth": 2})
    with pytest.raises(ValueError):
        resolve_params("circle", {"g": "two"})
    with pytest.raises(ValueError):
        resolve_params("circle", {"g": -1})


@pytest.mark.parametrize("kind", list(KINDS))
def test_generate_every_kind(kind):
    """Each generator kind produces a valid, reproducible instance"""
    params = {
        "grid": {"rows": 3},
        "random": {"n": 12, "lines": 6},
        "circle": {"g": 3},
        "parabola": {"g": 3},
        "extremal-grid": {"k": 2},
        "random3d": {"n": 10},
    }[kind]
    instance = generate_instance(kind, params, seed=5)
    again = generate_instance(kind, params, seed=5)
    assert instance.to_yaml() == again.to_yaml()
    assert instance.kind == kind
    assert len(instance.points) > 0
    assert instance.dimension == (3 if kind == "random3d" else 2)


def test_instance_validation():
    """Distinct points of one dimension"""
    with pytest.raises(ValueError):
        Instance([(0, 0), (0, 0)])
    with pytest.raises(ValueError):
        Instance([(0, 0), (1, 1, 1)])
    with pytest.raises(ValueError):
        Instance.from_dict({"kind": "custom"})
    with pytest.raises(ValueError):
        Instance.from_yaml("- just\n- a list\n")
    assert Instance([]).dimension is None


def test_lines_round_trip(tmpdir):
    """Points and lines come back exactly from disk"""
    instance = generate_instance("extremal-grid", {"k": 2})
    tmpdir.chdir()
    instance.to_disk("inst/grid.yml")
    again = Instance.from_yaml("inst/grid.yml")
    assert again.points == instance.points
    assert list(again.lines) == list(instance.lines)
    assert again.curves is None
    assert count_incidences_lines(again.points, again.lines) == 16
    assert again.params == {"k": 2}


def test_curves_round_trip():
    """Curve families keep their polynomials and parameters"""
    instance = generate_instance("circle", {"g": 3})
    again = Instance.from_yaml(instance.to_yaml())
    assert list(again.curves) == list(instance.curves)
    assert (again.curves.k, again.curves.C, again.curves.b) == (3, 1, 2)
    assert count_incidences_curves(again.points, again.curves) == count_incidences_curves(
        instance.points, instance.curves
    )


def test_rational_points():
    """Non-integer coordinates are kept as exact rationals"""
    instance = Instance([("1/3", "-2/7"), (1, "5/2")])
    data = yaml.safe_load(instance.to_yaml())
    assert data["points"][0] == [1, 3, -2, 7]
    again = Instance.from_yaml(instance.to_yaml())
    assert again.points[0] == (Fraction(1, 3), Fraction(-2, 7))
    assert again.kind == "custom"


def test_instance_fixture():
    """A hand-written instance file loads with exact points and lines"""
    instance = Instance.from_yaml(os.path.join(TESTDIR, "data", "pencil.yml"))
    assert instance.kind == "custom"
    assert instance.points[4] == (Fraction(1, 2), Fraction(1, 2))
    assert len(instance.lines) == 3
    assert count_incidences_lines(instance.points, instance.lines) == 8
