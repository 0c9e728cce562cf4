"""Named inequality checks and their tabular export"""

import logging
import os
from collections import OrderedDict, namedtuple
from fractions import Fraction

import pandas as pd
import yaml

from .util import format_approx, format_rational

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["check_name", "observed", "bound", "pass"]

AuditEntry = namedtuple("AuditEntry", ["name", "observed", "bound", "passed", "exact"])


def format_value(value, exact=True):
    """String for a report cell: exact rationals as "p/q", the rest with "~" """
    if isinstance(value, str):
        return value
    if exact and isinstance(value, (int, Fraction)):
        return format_rational(value)
    return format_approx(value)


class AuditReport(object):
    """An ordered list of checks "observed <= bound".

    Checks never raise when they fail; a failed inequality is an entry
    with passed=False. Values that are not inequalities (the Harnack
    constant, the chosen r, a shear used for dualisation) go in
    ``info``.

    Args:
        title (str): Name used in log messages and headers
    """

    def __init__(self, title="audit"):
        self.title = title
        self.entries = []
        self.info = OrderedDict()

    def add(self, name, observed, bound, exact=True):
        """Add the check observed <= bound and return its pass flag.

        Exact checks take int or Fraction values. Set exact=False for
        derived real-valued quantities; they are compared as floats
        and marked as approximate in every export.
        """
        if any(entry.name == name for entry in self.entries):
            raise ValueError("Duplicate audit entry %s" % name)
        if exact:
            observed = Fraction(observed)
            bound = Fraction(bound)
            passed = observed <= bound
        else:
            passed = float(observed) <= float(bound)
        self.entries.append(AuditEntry(name, observed, bound, passed, exact))
        if not passed:
            logger.warning(
                "%s: check %s failed, %s > %s",
                self.title,
                name,
                format_value(observed, exact),
                format_value(bound, exact),
            )
        return passed

    def add_equality(self, name, observed, expected):
        """Add a check that holds iff observed == expected.

        Stored as |observed - expected| <= 0 so the table keeps one shape.
        """
        difference = abs(Fraction(observed) - Fraction(expected))
        return self.add(name, difference, 0)

    def set_info(self, name, value):
        self.info[name] = value

    def extend(self, other, prefix=""):
        """Append all entries and info of another report"""
        for entry in other.entries:
            self.entries.append(entry._replace(name=prefix + entry.name))
        for key, value in other.info.items():
            self.info[prefix + key] = value

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, name):
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def __contains__(self, name):
        return any(entry.name == name for entry in self.entries)

    @property
    def passed(self):
        """True if every check passed; vacuously True when empty"""
        return all(entry.passed for entry in self.entries)

    def failures(self):
        """Names of the failed checks, in insertion order"""
        return [entry.name for entry in self.entries if not entry.passed]

    def to_dataframe(self):
        """The checks as a DataFrame with the report columns.

        observed and bound are strings: exact rationals as "p/q",
        approximate values prefixed with "~".
        """
        rows = [
            {
                "check_name": entry.name,
                "observed": format_value(entry.observed, entry.exact),
                "bound": format_value(entry.bound, entry.exact),
                "pass": bool(entry.passed),
            }
            for entry in self.entries
        ]
        return pd.DataFrame(rows, columns=REPORT_COLUMNS)

    def info_dict(self):
        """Info values made YAML friendly (rationals as strings)"""
        return OrderedDict(
            (key, _plain(value)) for key, value in self.info.items()
        )

    def to_csv(self, filename, header=None):
        """Write the report as CSV, preceded by a "#"-prefixed YAML header.

        The header holds ``header`` (typically the run configuration)
        and the report info. Read back with
        ``pandas.read_csv(filename, comment="#")``.
        """
        dirname = os.path.dirname(filename)
        if dirname and not os.path.exists(dirname):
            os.makedirs(dirname)
        with open(filename, "w", newline="") as fhandle:
            fhandle.write(header_lines(header, self.info_dict()))
            self.to_dataframe().to_csv(fhandle, index=False, lineterminator="\n")

    def to_yaml(self):
        return yaml.safe_dump(
            {
                "title": self.title,
                "passed": self.passed,
                "info": dict(self.info_dict()),
                "checks": self.to_dataframe().to_dict(orient="records"),
            },
            sort_keys=False,
        )

    def __repr__(self):
        return "<AuditReport %s: %d checks, %d failed>" % (
            self.title,
            len(self.entries),
            len(self.failures()),
        )


def _plain(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, (int, Fraction)):
        return format_rational(value)
    if isinstance(value, float):
        return format_approx(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    return value


def header_lines(header=None, info=None):
    """Render dicts as "#"-prefixed YAML lines for a CSV preamble"""
    content = {}
    if header:
        content["config"] = _plain(dict(header))
    if info:
        content["info"] = _plain(dict(info))
    if not content:
        return ""
    text = yaml.safe_dump(content, sort_keys=False)
    return "".join("# " + line + "\n" for line in text.splitlines())
