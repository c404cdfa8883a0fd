"""
Command-line controller for condlab.
Parses arguments, runs one experiment, writes its rows and maps the outcome
to an exit code.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from .. import __version__
from ..config.settings import EnsembleConfig, ExperimentDefaults, get_config
from ..core.ensembles import generator_description
from ..core.exceptions import CondLabError, ConfigurationError, DomainError, ResourceError, UsageError
from ..data.models import ExperimentConfig, ExperimentKind, OutputFormat, RunReport
from ..data.results import check_format, create_metadata, emit
from ..experiments.bound_checks import run_bound_check
from ..experiments.contrast import family_label, run_contrast
from ..experiments.tables import run_table_kappa, run_table_norms
from ..utils.logging_setup import configure_logging
from ..utils.performance import get_performance_monitor

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATED = 2

_COMMANDS = {
    "table-norms": ExperimentKind.TABLE_NORMS,
    "table-kappa": ExperimentKind.TABLE_KAPPA,
    "bound-check": ExperimentKind.BOUND_CHECK,
    "contrast": ExperimentKind.CONTRAST,
}

_DEFAULT_ENSEMBLES = {
    ExperimentKind.TABLE_NORMS: ["general", "toeplitz", "circulant"],
    ExperimentKind.TABLE_KAPPA: ["general", "toeplitz", "circulant"],
    ExperimentKind.BOUND_CHECK: [],
    ExperimentKind.CONTRAST: ["toeplitz"],
}


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"Expected comma-separated integers, got {text!r}", error_code="BAD_SIZES")


def parse_grid(text: str) -> List[float]:
    """'y0:y1:steps' -> steps evenly spaced points from y0 to y1"""
    try:
        y0, y1, steps = text.split(":")
        y0, y1, steps = float(y0), float(y1), int(steps)
    except ValueError:
        raise UsageError(f"Grid must look like y0:y1:steps, got {text!r}", error_code="BAD_GRID")
    if steps < 1 or y1 < y0:
        raise UsageError(f"Grid needs steps >= 1 and y0 <= y1, got {text!r}", error_code="BAD_GRID")
    return [float(y) for y in np.linspace(y0, y1, steps)]


def default_sizes(kind: ExperimentKind, ensembles: Sequence[str]) -> List[int]:
    if kind is ExperimentKind.BOUND_CHECK:
        return list(ExperimentDefaults.BOUND_SIZES)
    if kind is ExperimentKind.CONTRAST:
        return list(ExperimentDefaults.CONTRAST_SIZES)
    if kind is ExperimentKind.TABLE_KAPPA and list(ensembles) == ["circulant"]:
        return list(ExperimentDefaults.CIRCULANT_KAPPA_SIZES)
    if kind is ExperimentKind.TABLE_KAPPA and list(ensembles) == ["toeplitz"]:
        return list(ExperimentDefaults.TOEPLITZ_KAPPA_SIZES)
    return list(ExperimentDefaults.TABLE_SIZES)


class _Parser(argparse.ArgumentParser):
    """Argument errors are usage errors: exit 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="condlab",
        description="Structured-matrix conditioning laboratory",
    )
    parser.add_argument("--version", action="version", version=f"condlab {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    for name in _COMMANDS:
        sub = commands.add_parser(name)
        sub.add_argument("--ensemble", help="comma-separated: general,toeplitz,hankel,circulant,fcirculant:<f>")
        sub.add_argument("--sizes", help="comma-separated, strictly increasing")
        sub.add_argument("--trials", type=int)
        sub.add_argument("--dist", help="gaussian:mu,sigma or uniform:lo,hi")
        sub.add_argument("--seed", type=int, default=ExperimentDefaults.SEED)
        sub.add_argument("--norm", type=int, choices=(1, 2))
        sub.add_argument("--bound")
        sub.add_argument("--grid", help="y0:y1:steps")
        sub.add_argument("--out", help="output path (stdout when omitted)")
        sub.add_argument("--format", default=ExperimentDefaults.FORMAT, choices=("csv", "json"))
        sub.add_argument("--jobs", type=int, default=ExperimentDefaults.JOBS)
        sub.add_argument("--log-level")
        sub.add_argument("--log-json", action="store_true", default=None)

    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    kind = _COMMANDS[args.command]
    ensembles = [e.strip() for e in args.ensemble.split(",")] if args.ensemble else _DEFAULT_ENSEMBLES[kind]
    sizes = parse_int_list(args.sizes) if args.sizes else default_sizes(kind, ensembles)

    if kind is ExperimentKind.BOUND_CHECK:
        trials = args.trials if args.trials is not None else ExperimentDefaults.BOUND_TRIALS
        distribution = args.dist or EnsembleConfig.BOUND_DISTRIBUTION
    else:
        trials = args.trials if args.trials is not None else ExperimentDefaults.TRIALS
        distribution = args.dist or EnsembleConfig.TABLE_DISTRIBUTION

    return ExperimentConfig(
        experiment=kind,
        ensembles=ensembles,
        sizes=sizes,
        trials=trials,
        distribution=distribution,
        seed=args.seed,
        norm=args.norm,
        out=args.out,
        format=check_format(args.format),
        jobs=args.jobs,
        bound=args.bound,
        grid=parse_grid(args.grid) if args.grid else None,
    ).validate()


class ExperimentController:
    """
    Runs one configured experiment end to end.
    Owns dispatch, emission and the exit-code policy.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._runners = {
            ExperimentKind.TABLE_NORMS: run_table_norms,
            ExperimentKind.TABLE_KAPPA: run_table_kappa,
            ExperimentKind.BOUND_CHECK: run_bound_check,
            ExperimentKind.CONTRAST: run_contrast,
        }

    def metadata(self) -> dict:
        cfg = self.config
        extra = {
            "experiment": cfg.experiment.value,
            "distribution": cfg.distribution,
            "sizes": ",".join(str(n) for n in cfg.sizes),
        }
        if cfg.ensembles:
            extra["ensembles"] = ",".join(cfg.ensembles)
        if cfg.experiment is ExperimentKind.BOUND_CHECK:
            extra["bound"] = cfg.bound
            extra["slack"] = f"{ExperimentDefaults.SE_MULTIPLIER:g} binomial standard errors per grid point"
            extra["bonferroni"] = (f"{len(cfg.grid)} grid points per size are tested separately; "
                                   "no familywise correction is applied")
        if cfg.experiment is ExperimentKind.CONTRAST:
            extra["contrast_family"] = f"{family_label()} symmetric Toeplitz, t_k = rho^(k^2)"
        if cfg.format is OutputFormat.JSON:
            # CSV headers stay one line per key
            extra["settings"] = get_config()
        return create_metadata(generator_description(), cfg.seed, cfg.trials, __version__, **extra)

    def run(self) -> RunReport:
        cfg = self.config
        logger.info(f"Running {cfg.experiment.value} on sizes {cfg.sizes} with {cfg.trials} trials")
        report = self._runners[cfg.experiment](cfg)
        for key, count in report.resamples.items():
            logger.info(f"Resamples {key}: {count}")
        if report.trials_requested != report.trials_summarized:
            logger.error(f"Summarized {report.trials_summarized} of {report.trials_requested} trials")
        return report

    def execute(self) -> int:
        report = self.run()
        emit(report.rows, self.config.format, self.config.out, self.metadata())
        stats = get_performance_monitor().get_performance_stats()
        logger.info(f"Stage timings: {stats['operation_averages']}")
        return EXIT_VIOLATED if report.violated else EXIT_OK


def create_experiment_controller(config: ExperimentConfig) -> ExperimentController:
    """Create an experiment controller instance"""
    return ExperimentController(config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_json)

    try:
        controller = create_experiment_controller(config_from_args(args))
        return controller.execute()
    except (UsageError, ConfigurationError, DomainError, ResourceError) as e:
        logger.error(f"{e.__class__.__name__}: {e.message}")
        return EXIT_USAGE
    except CondLabError as e:
        logger.error(f"Run failed: {e.to_dict()}")
        return EXIT_USAGE
