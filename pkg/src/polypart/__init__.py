"""Top-level package for polypart"""

try:
    from .version import version

    __version__ = version
except ImportError:
    __version__ = "0.0.0"

from .algebra import MultiPoly, UniPoly  # noqa
from .audit import AuditReport  # noqa
from .hamsandwich import find_bisecting_polynomial  # noqa
from .partition import PartitionResult, build_partition  # noqa
from .incidence import CurveSet, LineSet  # noqa
from .spantree import GeoTree, build_low_crossing_tree  # noqa
from .crossing import CrossingReport, crossing_number  # noqa
from .instance import Instance  # noqa
from .config import RunConfig  # noqa
