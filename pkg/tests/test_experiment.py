"""Testing experiment suites"""

import logging

import pandas as pd
import pytest

from polypart.config import RunConfig
from polypart.experiment import (
    RECORD_COLUMNS,
    SCHEMA_VERSION,
    experiment_tasks,
    run_experiment,
    run_row,
)

logger = logging.getLogger(__name__)


def _config(**kwargs):
    values = dict(command="experiment", restarts=16, iterations=1000)
    values.update(kwargs)
    return RunConfig(**values)


def test_tasks():
    """One task per size and seed index, seeds derived per row"""
    tasks = experiment_tasks(_config(suite="tree2d", sizes=[8, 16], seeds=2, svg="f.svg"))
    assert [(task[2], task[3]) for task in tasks] == [(8, 0), (8, 1), (16, 0), (16, 1)]
    assert len({task[4] for task in tasks}) == 4
    assert [task[6] for task in tasks] == [True, False, False, False]
    assert tasks[0][1] == "random"

    with pytest.raises(ValueError):
        experiment_tasks(_config(suite="voronoi"))
    with pytest.raises(ValueError):
        experiment_tasks(_config(suite="tree3d", kind="grid"))


def test_tree_suite(tmpdir):
    """Small tree rows pass and land in a CSV with a YAML header"""
    config = _config(suite="tree2d", sizes=[8, 24], seeds=1, c=4, svg="fig.svg")
    result = run_experiment(config)
    assert len(result) == 2
    assert list(result.records.columns) == RECORD_COLUMNS
    assert result.failed().empty, result.failed()
    assert (result.records["schema"] == SCHEMA_VERSION).all()
    assert result.figure.startswith("<svg")

    tmpdir.chdir()
    result.to_csv("out/tree2d.csv")
    with open("out/tree2d.csv") as fhandle:
        text = fhandle.read()
    assert text.startswith("# config:")
    assert "runtime_ms" not in text
    frame = pd.read_csv("out/tree2d.csv", comment="#")
    assert list(frame["size"]) == [8, 24]
    assert all(value.startswith("~") for value in frame["crossing_ratio"])

    result.to_csv("out/timed.csv", timings=True)
    assert "runtime_ms" in pd.read_csv("out/timed.csv", comment="#").columns


def test_grid_kind():
    """Grid rows need square sizes; other sizes fail their row only"""
    result = run_experiment(_config(suite="tree2d", kind="grid", sizes=[9, 10], c=16))
    assert list(result.records["passed"]) == [True, False]
    assert "ValueError" in result.records["error"].iloc[1]
    assert len(result.failed()) == 1


def test_incidence_suites():
    """Szemeredi-Trotter and curve rows on small instances"""
    result = run_experiment(_config(suite="st", kind="extremal-grid", sizes=[2]))
    row = result.records.iloc[0]
    assert row["incidences"] == 16
    assert row["passed"]
    assert row["ratio"].startswith("~")

    result = run_experiment(_config(suite="curves", kind="circle", sizes=[3]))
    assert result.records.iloc[0]["m"] == 9


def test_run_row_records_errors():
    """Exceptions inside a row become an error field"""
    config = _config(suite="tree2d").to_dict()
    record, figure = run_row(("tree2d", "grid", 7, 0, 1, config, False))
    assert record["passed"] is False
    assert record["error"].startswith("ValueError")
    assert figure is None


def test_deterministic_bytes(tmpdir):
    """Same configuration, same file"""
    tmpdir.chdir()
    for name in ("first", "second"):
        run_experiment(_config(suite="tree2d", sizes=[16], seeds=2, c=4)).to_csv(name + ".csv")
    with open("first.csv") as first, open("second.csv") as second:
        assert first.read() == second.read()


@pytest.mark.slow
def test_workers_do_not_change_output(tmpdir):
    """A process pool writes the same bytes as a single worker"""
    tmpdir.chdir()
    for workers in (1, 2):
        config = _config(suite="tree2d", sizes=[32, 64], seeds=2, workers=workers)
        run_experiment(config).to_csv("w%d.csv" % workers)
    with open("w1.csv") as first, open("w2.csv") as second:
        lines_one = first.read().splitlines()
        lines_two = second.read().splitlines()
    # The echoed configuration names the worker count
    assert [line for line in lines_one if not line.startswith("#")] == [
        line for line in lines_two if not line.startswith("#")
    ]
