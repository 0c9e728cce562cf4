"""Testing tree figures"""

import logging
import xml.etree.ElementTree as ET

import pytest

from polypart.crossing import crossing_number
from polypart.spantree import GeoTree, build_low_crossing_tree
from polypart.svg import render_tree, write_tree_svg

logger = logging.getLogger(__name__)

SVG = "{http://www.w3.org/2000/svg}"


def _square_tree():
    return GeoTree([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2), (2, 3)])


def test_render_counts():
    """One circle per point, one line per edge plus the witness"""
    tree = _square_tree()
    root = ET.fromstring(render_tree(tree))
    assert len(root.findall(SVG + "circle")) == 4
    assert len(root.findall(SVG + "line")) == 3

    report = crossing_number(tree)
    root = ET.fromstring(render_tree(tree, report=report, title="square"))
    lines = root.findall(SVG + "line")
    assert len(lines) == 4
    assert lines[-1].get("stroke-dasharray") == "6 3"
    assert root.find(SVG + "text").text == "square"


def test_render_is_deterministic():
    """Same tree, same text"""
    tree = _square_tree()
    assert render_tree(tree) == render_tree(_square_tree())


def test_space_tree_is_projected():
    """Trees in R^3 are drawn without a witness line"""
    tree = GeoTree([(0, 0, 0), (1, 0, 2), (0, 1, 5)], [(0, 1), (0, 2)])
    report = crossing_number(tree)
    root = ET.fromstring(render_tree(tree, report=report))
    assert len(root.findall(SVG + "line")) == 2


def test_write(tmpdir):
    """Figures land on disk, directories are made"""
    tree = build_low_crossing_tree([(0, 0), (2, 1), (1, 3)], c=4)
    tmpdir.chdir()
    write_tree_svg("figs/tree.svg", tree)
    assert tmpdir.join("figs").join("tree.svg").read().endswith("</svg>\n")
    with pytest.raises(ValueError):
        render_tree(GeoTree([], []))
