"""
Paired comparison runs.

Every comparison run draws one initial population and hands the same
genomes and the same root stream to each enabled algorithm, so the members
of a pair share generation 0 exactly and differ only in how they search.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

from src.core.diversity import diversity
from src.core.exceptions import ConfigError, RunAborted
from src.core.rng import INIT, RngStream
from src.optimizers.individual import Algorithm, rank_value
from src.optimizers.runner import RunLog, init_population, run
from src.services.experiment_config import ExperimentConfig


logger = logging.getLogger(__name__)

TIE = "tie"
PAIRED = (Algorithm.GA.value, Algorithm.DE.value)


@dataclass
class RunPair:
    run_index: int
    logs: Dict[str, RunLog] = field(default_factory=dict)
    errors: Dict[str, str] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return bool(self.errors)

    def winner(self) -> Optional[str]:
        """GA or DE, whichever reached the lower best-ever fitness; None for failed or unpaired runs."""
        paired = {alg: log for alg, log in self.logs.items() if alg in PAIRED}
        if self.failed or len(paired) < 2:
            return None
        return decide_winner({alg: log.best_fitness for alg, log in paired.items()})


def decide_winner(best: Dict[str, float]) -> Optional[str]:
    """Lowest value wins; equal lowest values make a tie. Non-finite values rank last."""
    if len(best) < 2:
        return None
    ranked = {alg: rank_value(v) for alg, v in best.items()}
    lowest = min(ranked.values())
    if math.isinf(lowest):
        return None
    leaders = sorted(alg for alg, v in ranked.items() if v == lowest)
    return leaders[0] if len(leaders) == 1 else TIE


@dataclass
class ComparisonReport:
    config: ExperimentConfig
    pairs: List[RunPair] = field(default_factory=list)

    @property
    def algorithms(self) -> List[str]:
        return [a.value for a in self.config.algorithms]

    def absent(self) -> List[str]:
        return sorted(a.value for a in (Algorithm.GA, Algorithm.DE) if a not in self.config.algorithms)

    def summary(self) -> dict:
        runs = []
        wins: Dict[str, int] = {alg: 0 for alg in self.algorithms}
        wins[TIE] = 0
        final_diversity: Dict[str, List[dict]] = {alg: [] for alg in self.algorithms}

        for pair in self.pairs:
            per_algorithm = {}
            for alg in (Algorithm.GA.value, Algorithm.DE.value, Algorithm.RANDOM.value):
                log = pair.logs.get(alg)
                if log is None:
                    if alg != Algorithm.RANDOM.value:
                        per_algorithm[alg] = None
                    continue
                stats = _run_summary(log)
                per_algorithm[alg] = stats
                if stats["final_diversity"] is not None and alg not in pair.errors:
                    final_diversity[alg].append(stats["final_diversity"])
            winner = pair.winner()
            if winner is not None:
                wins[winner] += 1
            runs.append({
                "run": pair.run_index,
                "status": "failed" if pair.failed else "ok",
                "errors": dict(pair.errors),
                "winner": winner,
                "algorithms": per_algorithm,
            })

        return {
            "algorithms": self.algorithms,
            "absent": self.absent(),
            "comparison_runs": self.config.comparison_runs,
            "master_seed": self.config.master_seed,
            "budget": {"unit": self.config.budget.unit.value, "max": self.config.budget.maximum},
            "runs": runs,
            "wins": wins,
            "final_diversity": {alg: _mean_diversity(items) for alg, items in final_diversity.items()},
        }


def _run_summary(log: RunLog) -> dict:
    final = log.records[-1] if log.records else None
    final_div = None
    if log.final_population:
        stats = diversity(log.space, [ind.genome for ind in log.final_population])
        final_div = {
            "mean_pairwise_distance": stats.mean_pairwise_distance,
            "duplicate_count": stats.duplicate_count,
        }
    return {
        "best_fitness": log.best_fitness,
        "initial_avg_fitness": log.records[0].avg_fitness if log.records else None,
        "final_avg_fitness": final.avg_fitness if final else None,
        "generations": final.generation if final else 0,
        "design_evals_used": log.ledger.design_evals_used if log.ledger else 0,
        "sim_runs_used": log.ledger.sim_runs_used if log.ledger else 0,
        "final_diversity": final_div,
    }


def _mean_diversity(items: List[dict]) -> Optional[dict]:
    if not items:
        return None
    return {
        "mean_pairwise_distance": math.fsum(i["mean_pairwise_distance"] for i in items) / len(items),
        "duplicate_count": math.fsum(i["duplicate_count"] for i in items) / len(items),
    }


@contextmanager
def evaluation_pool(jobs: int) -> Iterator[Optional[Executor]]:
    """A process pool for replicate fan-out, or None to evaluate in-process."""
    if jobs is None or jobs <= 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield pool


class ComparisonService:
    """Service for paired comparison runs of one experiment"""

    def __init__(self, experiment: ExperimentConfig, jobs: int = 1):
        self.experiment = experiment
        self.jobs = jobs

    def population_size(self) -> int:
        sizes = {self.experiment.population_size(a) for a in self.experiment.algorithms}
        if len(sizes) != 1:
            raise ConfigError(f"paired algorithms need equal population sizes, got {sorted(sizes)}")
        return sizes.pop()

    def run_pair(self, run_index: int, executor: Optional[Executor] = None) -> RunPair:
        """One comparison run: shared initial population, one log per enabled algorithm."""
        experiment = self.experiment
        P = self.population_size()

        root = RngStream(experiment.master_seed, (run_index,))
        min_size = experiment.de.min_population if experiment.de is not None else 1
        initial = init_population(experiment.space, P, root.child(INIT), min_size=min_size)

        pair = RunPair(run_index)
        for algorithm in experiment.algorithms:
            logger.info("Comparison run %d: starting %s", run_index, algorithm.value.upper())
            try:
                pair.logs[algorithm.value] = run(
                    algorithm,
                    experiment.objective,
                    experiment.budget,
                    root,
                    initial_population=initial,
                    de_config=experiment.de,
                    ga_config=experiment.ga,
                    population_size=experiment.random_population,
                    executor=executor,
                )
            except RunAborted as e:
                logger.error("Comparison run %d: %s aborted: %s", run_index, algorithm.value.upper(), e)
                pair.errors[algorithm.value] = str(e)
                if e.partial_log is not None:
                    pair.logs[algorithm.value] = e.partial_log
        return pair

    def compare(self, executor: Optional[Executor] = None) -> ComparisonReport:
        """Run every comparison pair. A failed run invalidates only its own pair."""
        report = ComparisonReport(self.experiment)
        with evaluation_pool(self.jobs if executor is None else 1) as pool:
            active = executor or pool
            for run_index in range(self.experiment.comparison_runs):
                pair = self.run_pair(run_index, active)
                report.pairs.append(pair)
                logger.info("Comparison run %d finished: winner %s", run_index, pair.winner())
        failed = [p.run_index for p in report.pairs if p.failed]
        if failed:
            logger.warning("Comparison runs %s failed; their pairs are marked invalid", failed)
        return report
