"""Testing run configuration"""

import argparse
import logging
from fractions import Fraction

import pytest
import yaml

from polypart.config import FIELDS, RunConfig

logger = logging.getLogger(__name__)


def test_defaults():
    """Every field gets its default, rationals are exact"""
    config = RunConfig()
    assert config.seed == 0
    assert config.c == 8
    assert config.eps == Fraction(1, 20)
    assert config.r is None
    assert config.timings is False
    assert list(config.to_dict()) == list(FIELDS)
    assert config.to_dict()["eps"] == "1/20"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"colour": "blue"},
        {"seed": -1},
        {"seed": 2**64},
        {"seed": "abc"},
        {"r": 1},
        {"eps": "1/2"},
        {"eps": "-1/10"},
        {"c": 1},
        {"mode": "fast"},
        {"samples": 0},
        {"workers": 0},
        {"seeds": 0},
        {"restarts": 0},
        {"sizes": "4,x"},
        {"sizes": []},
        {"sizes": "0"},
    ],
)
def test_invalid(kwargs):
    """Each bad value is refused on construction"""
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_conversions():
    """Strings become numbers, size ladders become lists"""
    config = RunConfig(r="5/2", eps="0.1", seed="7", sizes="16, 32,64")
    assert config.r == Fraction(5, 2)
    assert config.eps == Fraction(1, 10)
    assert config.seed == 7
    assert config.sizes == [16, 32, 64]
    assert config.to_dict()["r"] == "5/2"


def test_from_namespace(tmpdir):
    """Command line values override the file, None leaves it alone"""
    tmpdir.chdir()
    with open("run.yml", "w") as fhandle:
        yaml.safe_dump({"seed": 11, "restarts": 4, "eps": "1/10"}, fhandle)
    namespace = argparse.Namespace(command="tree", seed=None, restarts=9, eps=None, c=4)
    config = RunConfig.from_namespace(namespace, config_file="run.yml")
    assert config.seed == 11
    assert config.restarts == 9
    assert config.eps == Fraction(1, 10)
    assert config.c == 4
    assert config.command == "tree"


def test_file_errors(tmpdir):
    """Missing files and non-mappings are refused"""
    tmpdir.chdir()
    with pytest.raises(ValueError):
        RunConfig.from_yaml("missing.yml")
    with open("list.yml", "w") as fhandle:
        fhandle.write("- 1\n- 2\n")
    with pytest.raises(ValueError):
        RunConfig.from_yaml("list.yml")
    with open("empty.yml", "w") as fhandle:
        fhandle.write("")
    assert RunConfig.from_yaml("empty.yml").seed == 0


def test_yaml_echo():
    """The YAML echo reloads to the same configuration"""
    config = RunConfig(command="experiment", suite="st", sizes=[8, 16], seed=3)
    again = RunConfig(**yaml.safe_load(config.to_yaml()))
    assert again.to_dict() == config.to_dict()
