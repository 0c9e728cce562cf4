"""Command line interface for polypart

Exit codes: 0 on success, 1 on usage errors, 2 when a computation fails
or an audit does not pass. Failing audit checks are named on standard
error.
"""

import argparse
import logging
import sys

import yaml

from . import __version__
from .audit import header_lines
from .config import RunConfig
from .crossing import choose_mode, crossing_number
from .experiment import SUITES, run_experiment
from .hamsandwich import BisectionNotFound
from .incidence import audit_curve_bounds, audit_szemeredi_trotter
from .instance import KINDS, Instance, generate_instance
from .partition import PartitionError, audit_partition, build_partition
from .spantree import GeoTree, audit_tree, build_low_crossing_tree
from .svg import write_tree_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class UsageError(ValueError):
    """Bad command line parameters"""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser raising UsageError instead of exiting with code 2"""

    def error(self, message):
        raise UsageError(message)


def get_parser():
    """The polypart argument parser"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="64-bit run seed (default 0)")
    common.add_argument("--out", help="Output file, standard output if omitted")
    common.add_argument("--config", help="YAML file with run parameters")
    common.add_argument("--eps", help="Bisection tolerance, a rational in [0, 1/2)")
    common.add_argument("--restarts", type=int, help="Optimizer restarts per bisection")
    common.add_argument("--iterations", type=int, help="Optimizer iterations per restart")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging, repeatable"
    )

    parser = _Parser(
        prog="polypart",
        description="Polynomial partitioning of point sets and its audited applications",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)

    gen = subparsers.add_parser("gen", parents=[common], help="Generate an instance file")
    gen.add_argument("generator", metavar="kind", help="One of %s" % ", ".join(KINDS))
    gen.add_argument("params", nargs="*", help="Generator parameters as name=value")

    part = subparsers.add_parser(
        "partition", parents=[common], help="Build an r-partitioning polynomial"
    )
    part.add_argument("input", help="Instance file")
    part.add_argument("--r", help="Partition parameter r > 1")

    inc = subparsers.add_parser(
        "incidences", parents=[common], help="Audit incidence bounds of an instance"
    )
    inc.add_argument("input", help="Instance file with lines or curves")
    inc.add_argument("--r", help="Override the partition parameter")

    tree = subparsers.add_parser(
        "tree", parents=[common], help="Build a spanning tree with low crossing number"
    )
    tree.add_argument("input", help="Instance file")
    tree.add_argument("--c", type=int, help="Cell size parameter, r = n/c per level")
    tree.add_argument("--svg", help="Also draw the tree to this SVG file")

    cross = subparsers.add_parser(
        "crossings", parents=[common], help="Crossing number of a tree file"
    )
    cross.add_argument("input", help="Tree file")
    cross.add_argument("--mode", choices=["exact", "sampled"])
    cross.add_argument("--samples", type=int, help="Hyperplanes in sampled mode")
    cross.add_argument("--svg", help="Draw the tree and witness line to this SVG file")

    audit = subparsers.add_parser(
        "audit", parents=[common], help="Audit an instance or tree file"
    )
    audit.add_argument("input", help="Instance or tree file")
    audit.add_argument("--r", help="Partition parameter for point-only instances")

    exp = subparsers.add_parser(
        "experiment", parents=[common], help="Run an experiment suite"
    )
    exp.add_argument("suite", help="One of %s" % ", ".join(SUITES))
    exp.add_argument("--sizes", help="Comma separated size ladder")
    exp.add_argument("--seeds", type=int, help="Seeds per size")
    exp.add_argument("--kind", help="Instance kind for the suite")
    exp.add_argument("--c", type=int, help="Cell size parameter of tree suites")
    exp.add_argument("--mode", choices=["exact", "sampled"])
    exp.add_argument("--samples", type=int, help="Hyperplanes in sampled mode")
    exp.add_argument("--workers", type=int, help="Worker processes")
    exp.add_argument("--svg", help="Figure of the first tree row")
    exp.add_argument(
        "--timings", action="store_const", const=True, help="Add a runtime column"
    )
    return parser


def _write_text(text, filename):
    if filename:
        with open(filename, "w") as fhandle:
            fhandle.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(report, config):
    """Write an audit report as CSV and name its failures on stderr"""
    header = config.to_dict()
    if config.out:
        report.to_csv(config.out, header=header)
    else:
        sys.stdout.write(header_lines(header, report.info_dict()))
        report.to_dataframe().to_csv(sys.stdout, index=False, lineterminator="\n")
    if not report.passed:
        for name in report.failures():
            print("Audit failed: %s" % name, file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def _load_instance(filename):
    try:
        return Instance.from_yaml(filename)
    except (OSError, KeyError, TypeError) as err:
        raise UsageError("Cannot read instance %s: %s" % (filename, err))


def cmd_gen(args, config):
    params = {}
    for item in args.params:
        if "=" not in item:
            raise UsageError("Generator parameters look like name=value, got %s" % item)
        name, value = item.split("=", 1)
        params[name.strip()] = value.strip()
    instance = generate_instance(args.generator, params, seed=config.seed)
    _write_text(instance.to_yaml(), config.out)
    return EXIT_OK


def cmd_partition(args, config):
    if config.r is None:
        raise UsageError("partition needs --r")
    instance = _load_instance(config.input)
    pr = build_partition(
        instance.points,
        config.r,
        eps=config.eps,
        seed=config.seed,
        restarts=config.restarts,
        iterations=config.iterations,
    )
    _write_text(pr.to_yaml(), config.out)
    return EXIT_OK


def _incidence_report(instance, config):
    if instance.lines is not None:
        return audit_szemeredi_trotter(
            instance.points,
            instance.lines,
            r=config.r,
            eps=config.eps,
            seed=config.seed,
            restarts=config.restarts,
            iterations=config.iterations,
        )
    if instance.curves is not None:
        return audit_curve_bounds(
            instance.points,
            instance.curves,
            with_partition=True,
            eps=config.eps,
            seed=config.seed,
            restarts=config.restarts,
            iterations=config.iterations,
        )
    raise UsageError("Instance %s has neither lines nor curves" % config.input)


def cmd_incidences(args, config):
    instance = _load_instance(config.input)
    return _emit_report(_incidence_report(instance, config), config)


def cmd_tree(args, config):
    instance = _load_instance(config.input)
    tree = build_low_crossing_tree(
        instance.points,
        c=config.c,
        seed=config.seed,
        eps=config.eps,
        restarts=config.restarts,
        iterations=config.iterations,
    )
    _write_text(tree.to_yaml(), config.out)
    if config.svg:
        write_tree_svg(config.svg, tree)
    return EXIT_OK


def _load_tree(filename):
    try:
        return GeoTree.from_yaml(filename)
    except (OSError, KeyError, TypeError) as err:
        raise UsageError("Cannot read tree %s: %s" % (filename, err))


def cmd_crossings(args, config):
    tree = _load_tree(config.input)
    mode = config.mode or choose_mode(len(tree.points), tree.dimension)
    report = crossing_number(tree, mode=mode, samples=config.samples, seed=config.seed)
    _write_text(report.to_yaml(), config.out)
    if config.svg:
        write_tree_svg(config.svg, tree, report=report)
    return EXIT_OK


def _read_mapping(filename):
    try:
        with open(filename) as fhandle:
            data = yaml.safe_load(fhandle)
    except (OSError, yaml.YAMLError) as err:
        raise UsageError("Cannot read %s: %s" % (filename, err))
    if not isinstance(data, dict):
        raise UsageError("%s does not hold a YAML mapping" % filename)
    return data


def cmd_audit(args, config):
    """Trees carry an edges key, everything else is an instance"""
    if "edges" in _read_mapping(config.input):
        tree = _load_tree(config.input)
        report = audit_tree(tree)
        if tree.edges:
            crossing = crossing_number(
                tree,
                mode=choose_mode(len(tree.points), tree.dimension),
                samples=config.samples,
                seed=config.seed,
            )
            report.add_equality("witness_verified", int(crossing.verify(tree)), 1)
            report.set_info("max_crossings", crossing.max_crossings)
        return _emit_report(report, config)
    instance = _load_instance(config.input)
    if instance.lines is not None or instance.curves is not None:
        return _emit_report(_incidence_report(instance, config), config)
    if config.r is None:
        raise UsageError("Auditing a point-only instance needs --r")
    pr = build_partition(
        instance.points,
        config.r,
        eps=config.eps,
        seed=config.seed,
        restarts=config.restarts,
        iterations=config.iterations,
    )
    return _emit_report(audit_partition(pr, instance.points, r=config.r), config)


def cmd_experiment(args, config):
    if config.suite not in SUITES:
        raise UsageError("Unknown suite %s, use one of %s" % (config.suite, list(SUITES)))
    result = run_experiment(config)
    if config.out:
        result.to_csv(config.out, timings=config.timings)
    else:
        columns = list(result.records.columns)
        if not config.timings:
            columns = columns[:-1]
        sys.stdout.write(header_lines(config.to_dict()))
        result.records[columns].to_csv(sys.stdout, index=False, lineterminator="\n")
    if config.svg and result.figure:
        with open(config.svg, "w") as fhandle:
            fhandle.write(result.figure)
    failed = result.failed()
    for _, row in failed.iterrows():
        print(
            "Row failed: size=%s seed_index=%s %s"
            % (row["size"], row["seed_index"], row["failures"] or row["error"]),
            file=sys.stderr,
        )
    return EXIT_FAILURE if len(failed) else EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "partition": cmd_partition,
    "incidences": cmd_incidences,
    "tree": cmd_tree,
    "crossings": cmd_crossings,
    "audit": cmd_audit,
    "experiment": cmd_experiment,
}


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)


def main(argv=None):
    """Entry point, returns the exit code"""
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(getattr(args, "verbose", 0))
        if args.command is None:
            raise UsageError("A subcommand is required")
        config = RunConfig.from_namespace(args, config_file=args.config)
        return COMMANDS[args.command](args, config)
    except (PartitionError, BisectionNotFound, RuntimeError) as err:
        print("Computation failed: %s" % err, file=sys.stderr)
        return EXIT_FAILURE
    except (ValueError, OSError) as err:
        print("Usage error: %s" % err, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
