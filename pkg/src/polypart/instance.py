"""Instance files: point sets with optional lines or curves, as YAML"""

import logging
import os
from collections import OrderedDict

import yaml

from .algebra import MultiPoly
from .incidence import (
    CurveSet,
    LineSet,
    generate_circle_instance,
    generate_extremal_grid,
    generate_grid_points,
    generate_parabola_instance,
    generate_random_instance,
    generate_random_points,
)
from .util import format_rational, ints_to_point, parse_rational, point_to_ints

logger = logging.getLogger(__name__)

# Parameter names and defaults per generator kind, None means required
KINDS = OrderedDict(
    [
        ("grid", OrderedDict([("rows", None), ("cols", 0)])),
        ("random", OrderedDict([("n", None), ("lines", 0), ("side", 0)])),
        ("circle", OrderedDict([("g", None)])),
        ("parabola", OrderedDict([("g", None)])),
        ("extremal-grid", OrderedDict([("k", None)])),
        ("random3d", OrderedDict([("n", None), ("side", 0)])),
    ]
)


class Instance(object):
    """A point set, possibly with lines or a curve family.

    Points are stored as [num_x, den_x, num_y, den_y, ...] integer lists
    so that rationals survive YAML exactly.

    Args:
        points (list): rational points
        lines (LineSet): optional
        curves (CurveSet): optional
        kind (str): generator that made the instance, "custom" otherwise
        params (dict): generator parameters
        seed (int): generator seed, None for deterministic kinds
    """

    def __init__(self, points, lines=None, curves=None, kind="custom", params=None, seed=None):
        self.points = [tuple(parse_rational(c) for c in p) for p in points]
        if len({len(p) for p in self.points}) > 1:
            raise ValueError("Instance points have mixed dimensions")
        if len(set(self.points)) != len(self.points):
            raise ValueError("Instance points must be distinct")
        self.lines = lines
        self.curves = curves
        self.kind = kind
        self.params = OrderedDict(params or {})
        self.seed = seed

    @property
    def dimension(self):
        return len(self.points[0]) if self.points else None

    def to_dict(self):
        data = OrderedDict(
            [
                ("kind", self.kind),
                ("params", dict(self.params)),
                ("seed", self.seed),
                ("dimension", self.dimension),
                ("points", [point_to_ints(p) for p in self.points]),
            ]
        )
        if self.lines is not None:
            data["lines"] = [[format_rational(c) for c in line] for line in self.lines]
        if self.curves is not None:
            data["curves"] = {
                "k": self.curves.k,
                "C": self.curves.C,
                "b": self.curves.b,
                "polynomials": [curve.to_text() for curve in self.curves],
            }
        return data

    def to_yaml(self):
        return yaml.safe_dump(dict(self.to_dict()), sort_keys=False)

    def to_disk(self, filename):
        dirname = os.path.dirname(filename)
        if dirname and not os.path.exists(dirname):
            os.makedirs(dirname)
        with open(filename, "w") as fhandle:
            fhandle.write(self.to_yaml())
        logger.info("Wrote %s instance with %d points to %s", self.kind, len(self.points), filename)

    @classmethod
    def from_dict(cls, data):
        if "points" not in data:
            raise ValueError("Instance has no points")
        lines = None
        if data.get("lines") is not None:
            lines = LineSet(
                tuple(parse_rational(str(c)) for c in line) for line in data["lines"]
            )
        curves = None
        if data.get("curves") is not None:
            family = data["curves"]
            curves = CurveSet(
                (MultiPoly.from_text(text, num_vars=2) for text in family["polynomials"]),
                k=family.get("k", 3),
                C=family.get("C", 1),
                b=family.get("b", 2),
            )
        return cls(
            [ints_to_point(ints) for ints in data["points"]],
            lines=lines,
            curves=curves,
            kind=data.get("kind", "custom"),
            params=data.get("params"),
            seed=data.get("seed"),
        )

    @classmethod
    def from_yaml(cls, text_or_filename):
        if os.path.exists(str(text_or_filename)):
            with open(text_or_filename) as fhandle:
                data = yaml.safe_load(fhandle)
        else:
            data = yaml.safe_load(text_or_filename)
        if not isinstance(data, dict):
            raise ValueError("Instance file must hold a mapping")
        return cls.from_dict(data)

    def __repr__(self):
        return "<Instance %s: %d points, %s lines, %s curves>" % (
            self.kind,
            len(self.points),
            len(self.lines) if self.lines is not None else 0,
            len(self.curves) if self.curves is not None else 0,
        )


def resolve_params(kind, params):
    """Fill defaults and validate generator parameters.

    Args:
        kind (str): one of KINDS
        params (dict): name to integer (or integer string)

    Returns:
        OrderedDict of int
    """
    if kind not in KINDS:
        raise ValueError("Unknown instance kind %s, use one of %s" % (kind, list(KINDS)))
    known = KINDS[kind]
    unknown = set(params) - set(known)
    if unknown:
        raise ValueError("Unknown parameters for %s: %s" % (kind, sorted(unknown)))
    resolved = OrderedDict()
    for name, default in known.items():
        if name in params:
            try:
                resolved[name] = int(params[name])
            except (TypeError, ValueError):
                raise ValueError("Parameter %s must be an integer, got %s" % (name, params[name]))
        elif default is None:
            raise ValueError("Instance kind %s needs parameter %s" % (kind, name))
        else:
            resolved[name] = default
        if resolved[name] < 0:
            raise ValueError("Parameter %s must not be negative" % name)
    return resolved


def generate_instance(kind, params, seed=0):
    """Build an instance of a generator kind, deterministic in (kind, params, seed)"""
    params = resolve_params(kind, params)
    if kind == "grid":
        points = generate_grid_points(params["rows"], params["cols"] or None)
        return Instance(points, kind=kind, params=params)
    if kind == "extremal-grid":
        points, lines = generate_extremal_grid(params["k"])
        return Instance(points, lines=lines, kind=kind, params=params)
    if kind == "circle":
        points, curves = generate_circle_instance(params["g"])
        return Instance(points, curves=curves, kind=kind, params=params)
    if kind == "parabola":
        points, curves = generate_parabola_instance(params["g"])
        return Instance(points, curves=curves, kind=kind, params=params)
    side = params["side"] or None
    if kind == "random" and params["lines"]:
        points, lines = generate_random_instance(params["n"], params["lines"], seed, side=side)
        return Instance(points, lines=lines, kind=kind, params=params, seed=seed)
    dimension = 3 if kind == "random3d" else 2
    points = generate_random_points(params["n"], seed, side=side, dimension=dimension)
    return Instance(points, kind=kind, params=params, seed=seed)
