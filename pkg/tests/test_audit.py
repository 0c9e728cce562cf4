"""Testing audit reports"""

import logging
from fractions import Fraction

import pandas as pd
import pytest
import yaml

from polypart.audit import AuditReport, header_lines

logger = logging.getLogger(__name__)


def test_report_checks():
    """Inequalities pass and fail without raising"""
    report = AuditReport("unit")
    assert report.passed
    assert report.add("cells", 4, 96)
    assert not report.add("degree", Fraction(7, 2), 3)
    assert report.add("ratio", 0.75, 1, exact=False)
    assert report.add_equality("edges", 5, 5)
    assert not report.add_equality("components", 2, 1)
    assert len(report) == 5
    assert not report.passed
    assert report.failures() == ["degree", "components"]
    assert "cells" in report
    assert report["components"].observed == 1
    with pytest.raises(ValueError):
        report.add("cells", 1, 2)
    with pytest.raises(KeyError):
        report["missing"]


def test_report_extend():
    """Entries of another report are appended under a prefix"""
    inner = AuditReport("inner")
    inner.add("size", 1, 2)
    inner.set_info("r", Fraction(3, 2))
    outer = AuditReport("outer")
    outer.extend(inner, prefix="level_0_")
    assert outer.failures() == []
    assert "level_0_size" in outer
    assert outer.info_dict()["level_0_r"] == "3/2"


def test_report_csv(tmpdir):
    """CSV with a commented YAML header, read back by pandas"""
    report = AuditReport("csv")
    report.add("cells", 4, 96)
    report.add("ratio", Fraction(1, 3), 1, exact=False)
    report.set_info("rounds", 2)
    tmpdir.chdir()
    report.to_csv("out/report.csv", header={"seed": 7, "eps": Fraction(1, 20)})
    with open("out/report.csv") as fhandle:
        lines = fhandle.read().splitlines()
    assert lines[0] == "# config:"
    assert all(line.startswith("# ") for line in lines[:5])
    frame = pd.read_csv("out/report.csv", comment="#")
    assert list(frame.columns) == ["check_name", "observed", "bound", "pass"]
    assert list(frame["observed"]) == ["4", "~0.333333"]
    assert frame["pass"].all()


def test_report_yaml():
    """YAML export keeps the verdict and the checks"""
    report = AuditReport("yaml")
    report.add("cells", 5, 4)
    data = yaml.safe_load(report.to_yaml())
    assert data["title"] == "yaml"
    assert data["passed"] is False
    assert data["checks"][0]["check_name"] == "cells"


def test_header_lines():
    """Empty headers give no text"""
    assert header_lines() == ""
    text = header_lines({"seed": 1}, {"m": 4})
    assert text.startswith("# config:\n")
    assert "# info:\n" in text
