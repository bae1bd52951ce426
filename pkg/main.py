#!/usr/bin/env python3
"""
Biorobots DE - command-line entry point

Subcommands:
    optimize   one algorithm on one objective
    compare    paired GA-vs-DE study from a shared initial population
    sim        a single biorobots replicate with per-step output
    bench      sphere and Rastrigin suite (DE, GA and random sampling)

Exit codes: 0 success, 1 configuration or usage error, 2 evaluator failure.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.biorobots import DESIGN_BOUNDS, DesignParams, Schedule, SimulationSetup, design_space, run_simulation
from src.core import ConfigError, EvaluatorFailure, OptimizationError, RngStream
from src.objectives import ObjectiveKind, benchmark_space
from src.optimizers import Algorithm, run
from src.services import ComparisonService, ExperimentService, ExportService, evaluation_pool
from src.utils import Config, configure_logging


logger = logging.getLogger("biorobots")

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
DEFAULT_EXPERIMENT = os.path.join(PROJECT_ROOT, 'config', 'biorobots_experiment.json')
DEFAULT_BENCHMARK = os.path.join(PROJECT_ROOT, 'config', 'benchmark_experiment.json')

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EVALUATOR = 2


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with the configuration-error code"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(parser, default_config):
    parser.add_argument('--config', default=default_config, help='experiment JSON file')
    parser.add_argument('--seed', type=int, help='master seed (overrides the experiment file)')
    parser.add_argument('--budget', type=int, help='evaluation budget (overrides the experiment file)')
    parser.add_argument('--budget-unit', choices=['design', 'sim'], help='unit of --budget')
    parser.add_argument('--out', help='output directory')
    parser.add_argument('--preset', choices=['desk', 'full'], help='biorobots schedule preset')
    parser.add_argument('--jobs', type=int, help='worker processes for replicate evaluation')
    parser.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')


def build_parser():
    parser = CliParser(prog='biorobots', description='DE vs GA on the biorobots surrogate')
    sub = parser.add_subparsers(dest='command', required=True)

    optimize = sub.add_parser('optimize', help='run one algorithm')
    _add_common(optimize, DEFAULT_EXPERIMENT)
    optimize.add_argument('--algorithm', choices=[a.value for a in Algorithm], default=Algorithm.DE.value)
    optimize.add_argument('--objective', choices=[k.value for k in ObjectiveKind if k is not ObjectiveKind.EXTERNAL],
                          help='replace the experiment objective')

    comparison = sub.add_parser('compare', help='paired comparison of the enabled algorithms')
    _add_common(comparison, DEFAULT_EXPERIMENT)
    comparison.add_argument('--runs', type=int, help='number of comparison runs')

    sim = sub.add_parser('sim', help='one biorobots replicate with a per-step CSV')
    sim.add_argument('--config', help='experiment JSON providing constants and tissue settings')
    sim.add_argument('--seed', type=int, default=0)
    sim.add_argument('--design', type=float, nargs=len(DESIGN_BOUNDS), metavar='X',
                     help='design values in order: ' + ', '.join(name for name, *_ in DESIGN_BOUNDS))
    sim.add_argument('--out', help='output directory')
    sim.add_argument('--preset', choices=['desk', 'full'])
    sim.add_argument('--log-level')

    bench = sub.add_parser('bench', help='analytic benchmark suite')
    _add_common(bench, DEFAULT_BENCHMARK)
    bench.add_argument('--runs', type=int, help='seeded runs per function')

    return parser


def _load(args, settings):
    config = ExperimentService(settings).load(args.config, preset=args.preset)
    config = config.with_overrides(master_seed=args.seed, budget=args.budget,
                                   budget_unit=args.budget_unit, output_dir=args.out)
    if getattr(args, 'runs', None) is not None:
        config = replace(config, comparison_runs=args.runs)
    return config


def _jobs(args, settings):
    jobs = args.jobs if args.jobs is not None else settings.jobs
    if jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def cmd_optimize(args, settings):
    config = _load(args, settings)
    algorithm = Algorithm(args.algorithm)
    objective = config.objective
    if args.objective and args.objective != objective.kind.value:
        kind = ObjectiveKind(args.objective)
        params = SimulationSetup(schedule=Schedule.preset(config.preset)) if kind is ObjectiveKind.BIOROBOTS else None
        space = design_space() if kind is ObjectiveKind.BIOROBOTS else benchmark_space(config.space.D)
        objective = replace(objective, kind=kind, space=space, params=params)

    with evaluation_pool(_jobs(args, settings)) as pool:
        log = run(algorithm, objective, config.budget, RngStream(config.master_seed, (0,)),
                  de_config=config.de, ga_config=config.ga, population_size=config.random_population,
                  executor=pool)
    out = config.output_dir
    ExportService(out).export_single_run(log, config.to_dict())
    print(f"{algorithm.value}: best fitness {log.best_fitness!r} after {len(log.history)} design evaluations")
    print(f"Results written to {out}")
    return EXIT_OK


def cmd_compare(args, settings):
    config = _load(args, settings)
    report = ComparisonService(config, jobs=_jobs(args, settings)).compare()
    ExportService(config.output_dir).export_report(report)
    summary = report.summary()
    for entry in summary['runs']:
        print(f"run {entry['run']}: {entry['status']}, winner {entry['winner']}")
    print(f"Results written to {config.output_dir}")
    return EXIT_OK if not any(p.failed for p in report.pairs) else EXIT_EVALUATOR


def cmd_sim(args, settings):
    if args.config:
        config = ExperimentService(settings).load(args.config, preset=args.preset)
        if not isinstance(config.objective.params, SimulationSetup):
            raise ConfigError(f"{args.config} does not describe a biorobots objective")
        setup = config.objective.params
    else:
        setup = SimulationSetup(schedule=Schedule.preset(args.preset or 'desk'))

    if args.design is None:
        values = [(lo + hi) / 2.0 for _, lo, hi, _ in DESIGN_BOUNDS]
    else:
        values = args.design
    design = DesignParams.from_genome(values)

    result = run_simulation(design, setup.constants, setup.schedule, RngStream(args.seed),
                            tissue=setup.tissue, record=True)
    out = args.out or os.path.join(settings.output_dir, 'sim')
    ExportService(out).export_simulation(result, design, args.seed)
    print(f"live cancer cells: {result.live_cells} (drug deaths {result.drug_deaths}, "
          f"released cargo {result.released_cargo})")
    print(f"Results written to {out}")
    return EXIT_OK


def cmd_bench(args, settings):
    config = _load(args, settings)
    jobs = _jobs(args, settings)
    for kind in (ObjectiveKind.SPHERE, ObjectiveKind.RASTRIGIN):
        suite = replace(config, objective=replace(config.objective, kind=kind, params=None))
        report = ComparisonService(suite, jobs=jobs).compare()
        out = os.path.join(config.output_dir, kind.value)
        ExportService(out).export_report(report)
        wins = report.summary()['wins']
        print(f"{kind.value}: wins {wins}")
    print(f"Results written to {config.output_dir}")
    return EXIT_OK


COMMANDS = {
    'optimize': cmd_optimize,
    'compare': cmd_compare,
    'sim': cmd_sim,
    'bench': cmd_bench,
}


def main(argv=None):
    """Parse arguments, run the subcommand and map failures to exit codes"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG

    settings = Config()
    try:
        configure_logging(args.log_level or settings.log_level, settings.log_file)
    except ValueError as e:
        print(f"biorobots: error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.command](args, settings)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        print(f"biorobots: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EvaluatorFailure as e:
        logger.error("Evaluator failure: %s", e)
        print(f"biorobots: evaluator failure: {e}", file=sys.stderr)
        return EXIT_EVALUATOR
    except OptimizationError as e:
        logger.error("%s", e)
        print(f"biorobots: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
