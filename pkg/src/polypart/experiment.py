"""Experiment suites measuring each bound across a ladder of sizes

Every (size, seed) pair is one row. Rows may run in a process pool;
the table is always assembled in (size, seed) order, so a run writes
the same bytes whatever the number of workers.
"""

import logging
import math
import os
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor

import pandas as pd

from .audit import header_lines
from .config import RunConfig
from .crossing import choose_mode, crossing_number
from .incidence import (
    audit_curve_bounds,
    audit_szemeredi_trotter,
    generate_circle_instance,
    generate_extremal_grid,
    generate_grid_points,
    generate_parabola_instance,
    generate_random_instance,
    generate_random_points,
)
from .spantree import audit_tree, build_low_crossing_tree
from .svg import render_tree
from .util import format_approx
from .util.seeding import derive_seed

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Suite name to the instance kinds it accepts, the first being the default
SUITES = OrderedDict(
    [
        ("st", ("random", "extremal-grid")),
        ("curves", ("circle", "parabola")),
        ("tree2d", ("random", "grid")),
        ("tree3d", ("random3d",)),
    ]
)

DEFAULT_SIZES = {
    "st": [64, 256, 1024],
    "curves": [4, 5, 6],
    "tree2d": [64, 256, 1024],
    "tree3d": [64, 128],
}

RECORD_COLUMNS = [
    "schema",
    "suite",
    "kind",
    "size",
    "seed_index",
    "seed",
    "m",
    "n",
    "incidences",
    "ratio",
    "max_crossing",
    "crossing_ratio",
    "lower_bound",
    "total_degree",
    "cells",
    "fallback_edges",
    "passed",
    "failures",
    "error",
    "runtime_ms",
]


def _empty_record(suite, kind, size, seed_index, seed):
    record = OrderedDict((column, "") for column in RECORD_COLUMNS)
    record.update(
        schema=SCHEMA_VERSION,
        suite=suite,
        kind=kind,
        size=size,
        seed_index=seed_index,
        seed=seed,
        passed=False,
    )
    return record


def _incidence_row(record, suite, kind, size, seed, config):
    if suite == "st":
        if kind == "extremal-grid":
            points, lines = generate_extremal_grid(size)
        else:
            points, lines = generate_random_instance(size, size, seed)
        report = audit_szemeredi_trotter(
            points,
            lines,
            r=config.r,
            eps=config.eps,
            seed=seed,
            restarts=config.restarts,
            iterations=config.iterations,
        )
        ratio = report.info.get("st_ratio")
    else:
        generator = generate_circle_instance if kind == "circle" else generate_parabola_instance
        points, curves = generator(size)
        report = audit_curve_bounds(
            points,
            curves,
            with_partition=True,
            eps=config.eps,
            seed=seed,
            restarts=config.restarts,
            iterations=config.iterations,
        )
        ratio = report.info.get("ratio")
    record.update(
        m=report.info["m"],
        n=report.info["n"],
        incidences=report.info["incidences"],
        ratio=format_approx(ratio) if ratio is not None else "",
        total_degree=report.info.get("total_degree", ""),
        passed=report.passed,
        failures=";".join(report.failures()),
    )


def _tree_points(suite, kind, size, seed):
    if kind == "grid":
        side = math.isqrt(size)
        if side * side != size:
            raise ValueError("Grid suites need square sizes, got %d" % size)
        return generate_grid_points(side)
    return generate_random_points(size, seed, dimension=3 if suite == "tree3d" else 2)


def _tree_row(record, suite, kind, size, seed, config, want_svg):
    points = _tree_points(suite, kind, size, seed)
    tree = build_low_crossing_tree(
        points,
        c=config.c,
        seed=seed,
        eps=config.eps,
        restarts=config.restarts,
        iterations=config.iterations,
    )
    d = tree.dimension
    mode = config.mode or choose_mode(len(points), d)
    report = crossing_number(tree, mode=mode, samples=config.samples, seed=seed)
    audit = audit_tree(tree)
    first = next((level.partition for level in tree.levels if level.partition), None)
    record.update(
        m="",
        n=len(points),
        max_crossing=report.max_crossings,
        crossing_ratio=format_approx(report.max_crossings / len(points) ** (1 - 1 / d)),
        lower_bound=report.lower_bound,
        total_degree=first.total_degree if first else 0,
        cells=len(first.cells) if first else 0,
        fallback_edges=len(tree.fallback_edges),
        passed=audit.passed,
        failures=";".join(audit.failures()),
    )
    if want_svg:
        return render_tree(tree, report=report, title="%s n=%d seed=%d" % (suite, size, seed))
    return None


def run_row(task):
    """Compute one experiment row. Failures are recorded, never raised.

    Args:
        task (tuple): (suite, kind, size, seed_index, seed, config dict, want_svg)

    Returns:
        (record, svg text or None)
    """
    suite, kind, size, seed_index, seed, config_dict, want_svg = task
    config = RunConfig(**config_dict)
    record = _empty_record(suite, kind, size, seed_index, seed)
    figure = None
    start = time.perf_counter()
    try:
        if suite in ("st", "curves"):
            _incidence_row(record, suite, kind, size, seed, config)
        else:
            figure = _tree_row(record, suite, kind, size, seed, config, want_svg)
    except (ValueError, RuntimeError) as err:
        logger.warning("Row %s size=%d seed=%d failed: %s", suite, size, seed, err)
        record["error"] = "%s: %s" % (type(err).__name__, err)
        record["passed"] = False
    record["runtime_ms"] = int(round(1000 * (time.perf_counter() - start)))
    logger.info(
        "Row %s size=%d seed_index=%d done in %d ms", suite, size, seed_index, record["runtime_ms"]
    )
    return record, figure


class ExperimentResult(object):
    """Rows of one suite run, with the configuration that produced them"""

    def __init__(self, config, records, figure=None):
        self.config = config
        self.records = pd.DataFrame(records, columns=RECORD_COLUMNS)
        self.figure = figure

    def failed(self):
        """Rows that failed an audit or raised"""
        return self.records[~self.records["passed"].astype(bool)]

    def to_csv(self, filename, timings=False):
        """Write the rows after a "#"-prefixed YAML header.

        Runtimes vary between runs and are left out unless timings is set.
        """
        dirname = os.path.dirname(filename)
        if dirname and not os.path.exists(dirname):
            os.makedirs(dirname)
        columns = RECORD_COLUMNS if timings else RECORD_COLUMNS[:-1]
        with open(filename, "w", newline="") as fhandle:
            fhandle.write(header_lines(self.config.to_dict(), {"schema": SCHEMA_VERSION}))
            self.records[columns].to_csv(fhandle, index=False, lineterminator="\n")
        logger.info("Wrote %d experiment rows to %s", len(self.records), filename)

    def __len__(self):
        return len(self.records)


def experiment_tasks(config):
    """One task per (size, seed index), in output order"""
    suite = config.suite
    if suite not in SUITES:
        raise ValueError("Unknown suite %s, use one of %s" % (suite, list(SUITES)))
    kind = config.kind or SUITES[suite][0]
    if kind not in SUITES[suite]:
        raise ValueError("Suite %s does not run on %s instances" % (suite, kind))
    sizes = config.sizes or DEFAULT_SIZES[suite]
    config_dict = config.to_dict()
    tasks = []
    for size in sizes:
        for seed_index in range(config.seeds):
            seed = derive_seed(config.seed, size, seed_index)
            want_svg = bool(config.svg) and not tasks and suite.startswith("tree")
            tasks.append((suite, kind, size, seed_index, seed, config_dict, want_svg))
    return tasks


def run_experiment(config):
    """Run a suite as configured and return its ExperimentResult"""
    tasks = experiment_tasks(config)
    logger.info("Running %d %s rows with %d workers", len(tasks), config.suite, config.workers)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(run_row, tasks))
    else:
        results = [run_row(task) for task in tasks]
    records = [record for record, _ in results]
    figure = next((svg for _, svg in results if svg), None)
    return ExperimentResult(config, records, figure=figure)
