"""Run configuration shared by the command line and the experiment suites"""

import logging
import os
from collections import OrderedDict

import yaml

from .crossing import DEFAULT_SAMPLES, MODES
from .hamsandwich import DEFAULT_EPS, DEFAULT_ITERATIONS, DEFAULT_RESTARTS
from .spantree import DEFAULT_C
from .util import format_rational, parse_rational
from .util.seeding import SEED_MASK

logger = logging.getLogger(__name__)

# Field name to default. Order is the order of report headers.
FIELDS = OrderedDict(
    [
        ("command", None),
        ("seed", 0),
        ("r", None),
        ("c", DEFAULT_C),
        ("eps", DEFAULT_EPS),
        ("mode", None),
        ("samples", DEFAULT_SAMPLES),
        ("restarts", DEFAULT_RESTARTS),
        ("iterations", DEFAULT_ITERATIONS),
        ("workers", 1),
        ("input", None),
        ("out", None),
        ("svg", None),
        ("suite", None),
        ("sizes", None),
        ("seeds", 1),
        ("kind", None),
        ("timings", False),
    ]
)

RATIONAL_FIELDS = ("r", "eps")
INTEGER_FIELDS = ("seed", "c", "samples", "restarts", "iterations", "workers", "seeds")


class RunConfig(object):
    """Parameters of one run, echoed into every report it writes.

    Values are validated on construction; r and eps are Fractions.
    Unknown keys raise ValueError.
    """

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(FIELDS)
        if unknown:
            raise ValueError("Unknown configuration keys: %s" % sorted(unknown))
        for name, default in FIELDS.items():
            setattr(self, name, kwargs.get(name, default))
        self._validate()

    def _validate(self):
        for name in RATIONAL_FIELDS:
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, parse_rational(str(value)))
        for name in INTEGER_FIELDS:
            value = getattr(self, name)
            try:
                setattr(self, name, int(value))
            except (TypeError, ValueError):
                raise ValueError("%s must be an integer, got %s" % (name, value))
        if not 0 <= self.seed <= SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer, got %d" % self.seed)
        if self.r is not None and self.r <= 1:
            raise ValueError("r must be larger than 1, got %s" % self.r)
        if not 0 <= self.eps < parse_rational("1/2"):
            raise ValueError("eps must lie in [0, 1/2), got %s" % self.eps)
        if self.c < 2:
            raise ValueError("c must be at least 2, got %d" % self.c)
        if self.mode is not None and self.mode not in MODES:
            raise ValueError("mode must be one of %s, got %s" % (MODES, self.mode))
        if self.samples < 1:
            raise ValueError("samples must be positive, got %d" % self.samples)
        if self.workers < 1:
            raise ValueError("workers must be positive, got %d" % self.workers)
        if self.seeds < 1:
            raise ValueError("seeds must be positive, got %d" % self.seeds)
        if self.restarts < 1 or self.iterations < 1:
            raise ValueError("restarts and iterations must be positive")
        self.timings = bool(self.timings)
        if self.sizes is not None:
            if isinstance(self.sizes, str):
                self.sizes = [token for token in self.sizes.split(",") if token.strip()]
            try:
                self.sizes = [int(size) for size in self.sizes]
            except (TypeError, ValueError):
                raise ValueError("sizes must be a list of integers, got %s" % self.sizes)
            if not self.sizes or min(self.sizes) < 1:
                raise ValueError("sizes must be positive integers")

    @classmethod
    def from_yaml(cls, filename):
        return cls(**_load_mapping(filename))

    @classmethod
    def from_namespace(cls, namespace, config_file=None):
        """Combine a YAML file (if any) with parsed arguments.

        Arguments left at None do not override the file.
        """
        values = OrderedDict()
        if config_file:
            values.update(_load_mapping(config_file))
            logger.info("Loaded configuration from %s", config_file)
        for name in FIELDS:
            value = getattr(namespace, name, None)
            if value is not None:
                values[name] = value
        return cls(**values)

    def to_dict(self):
        result = OrderedDict()
        for name in FIELDS:
            value = getattr(self, name)
            if name in RATIONAL_FIELDS and value is not None:
                value = format_rational(value)
            result[name] = value
        return result

    def to_yaml(self):
        return yaml.safe_dump(dict(self.to_dict()), sort_keys=False)

    def __repr__(self):
        return "<RunConfig %s seed=%d>" % (self.command, self.seed)


def _load_mapping(filename):
    if not os.path.exists(filename):
        raise ValueError("Configuration file %s not found" % filename)
    with open(filename) as fhandle:
        data = yaml.safe_load(fhandle) or {}
    if not isinstance(data, dict):
        raise ValueError("Configuration file %s must hold a mapping" % filename)
    return data
