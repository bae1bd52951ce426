"""
Run one optimizer to budget exhaustion and keep a complete log.

Random streams for a run hang off a single root stream: the initial
population comes from INIT, every design evaluation from
(EVALUATION, generation, index) and every variation draw from
(VARIATION, algorithm, generation, index). Evaluation streams carry no
algorithm tag, so two algorithms started from the same population and
root see the same generation-0 fitness.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from src.core.diversity import DiversityStats, diversity
from src.core.exceptions import (
    AuditFailure,
    ConfigError,
    DimensionMismatch,
    EmptyPopulation,
    EvaluatorFailure,
    OutOfBoundsGenome,
    PopulationTooSmall,
    RunAborted,
)
from src.core.rng import EVALUATION, INIT, RngLike, RngStream, as_generator
from src.core.search_space import Genome, SearchSpace, make_genome, sample_uniform
from src.objectives.evaluation import BudgetLedger, BudgetUnit, LedgerSnapshot, ObjectiveSpec, evaluate_batch
from src.optimizers.differential_evolution import DEConfig, de_generation
from src.optimizers.genetic_algorithm import GAConfig, ga_generation
from src.optimizers.individual import Algorithm, EvaluatedIndividual, MutationEvent, OptimizerState, rank_value
from src.optimizers.random_search import random_generation


logger = logging.getLogger(__name__)

DEFAULT_POPULATION_SIZE = 20


@dataclass(frozen=True)
class Budget:
    maximum: int
    unit: BudgetUnit = BudgetUnit.DESIGN_EVALS

    def ledger(self, replicates: int) -> BudgetLedger:
        return BudgetLedger.from_budget(self.unit, self.maximum, replicates)


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    avg_fitness: float
    best_fitness: float
    current_best: float
    diversity: DiversityStats
    evaluations: int
    partial: bool = False


@dataclass
class RunLog:
    algorithm: str
    space: SearchSpace
    population_size: int
    replicates: int
    records: List[GenerationRecord] = field(default_factory=list)
    history: List[EvaluatedIndividual] = field(default_factory=list)
    final_population: List[EvaluatedIndividual] = field(default_factory=list)
    mutation_events: List[MutationEvent] = field(default_factory=list)
    ledger: Optional[LedgerSnapshot] = None

    @property
    def best(self) -> Optional[EvaluatedIndividual]:
        if not self.history:
            return None
        return min(self.history, key=lambda ind: ind.rank)

    @property
    def best_fitness(self) -> float:
        best = self.best
        return best.value if best is not None else math.nan

    def initial_population(self) -> List[EvaluatedIndividual]:
        return [ind for ind in self.history if ind.generation == 0]

    def record(self, state: OptimizerState, ledger: BudgetLedger, partial: bool = False) -> GenerationRecord:
        values = state.fitness_values()
        best = state.population[state.best_index()]
        entry = GenerationRecord(
            generation=state.generation,
            avg_fitness=population_mean(values),
            best_fitness=state.best_ever.value,
            current_best=best.value,
            diversity=diversity(self.space, state.genome_matrix()),
            evaluations=ledger.snapshot().design_evals_used,
            partial=partial,
        )
        self.records.append(entry)
        logger.info(
            "%s gen %d%s: avg %.6g best %.6g diversity %.4f dup %d (%d evals)",
            self.algorithm.upper(), entry.generation, " (partial)" if partial else "",
            entry.avg_fitness, entry.best_fitness, entry.diversity.mean_pairwise_distance,
            entry.diversity.duplicate_count, entry.evaluations,
        )
        return entry

    def finalize(self, state: Optional[OptimizerState], ledger: BudgetLedger) -> "RunLog":
        if state is not None:
            self.history = list(state.history)
            self.final_population = list(state.population)
            self.mutation_events = list(state.mutation_events)
        self.ledger = ledger.snapshot()
        return self


def population_mean(values: Sequence[float]) -> float:
    arr = np.asarray(values, dtype=np.float64)
    if np.all(np.isfinite(arr)):
        return math.fsum(arr.tolist()) / arr.size
    return float(np.mean(arr))


def init_population(space: SearchSpace, P: int, rng: RngLike, min_size: int = 4) -> List[Genome]:
    """P genomes sampled uniformly inside the box."""
    if P < min_size:
        raise PopulationTooSmall(f"population of {P} is below the minimum of {min_size}")
    gen = as_generator(rng)
    return [sample_uniform(space, gen) for _ in range(P)]


def _adopt(space: SearchSpace, genomes: Sequence[Sequence[float]]) -> List[Genome]:
    if len(genomes) == 0:
        raise EmptyPopulation("initial population is empty")
    adopted = []
    for i, g in enumerate(genomes):
        v = make_genome(g)
        if v.size != space.D:
            raise DimensionMismatch(f"genome {i} has {v.size} genes, space has {space.D} dimensions")
        if not space.contains(v):
            raise OutOfBoundsGenome(f"genome {i} {v.tolist()} lies outside the search space")
        adopted.append(v)
    return adopted


def init_from(genomes: Sequence[Sequence[float]], objective: ObjectiveSpec, ledger: BudgetLedger, rng: RngStream,
              algorithm: Algorithm, executor: Optional[Executor] = None) -> OptimizerState:
    """Evaluate a supplied population as generation 0, order preserved."""
    adopted = _adopt(objective.space, genomes)
    streams = [rng.child(EVALUATION, 0, i) for i in range(len(adopted))]
    fitnesses = evaluate_batch(objective, adopted, streams, ledger, executor)
    population = [
        EvaluatedIndividual(g, f, 0, i, algorithm.value)
        for i, (g, f) in enumerate(zip(adopted, fitnesses))
    ]
    state = OptimizerState(population=population, algorithm=algorithm)
    state.record(population)
    return state


def _population_size(algorithm: Algorithm, de_config: DEConfig, ga_config: GAConfig,
                     population_size: Optional[int]) -> int:
    if algorithm is Algorithm.DE:
        return de_config.population_size
    if algorithm is Algorithm.GA:
        return ga_config.population_size
    return population_size or DEFAULT_POPULATION_SIZE


def run(algorithm: Union[Algorithm, str], objective: ObjectiveSpec, budget: Union[Budget, int],
        master_seed: Union[int, RngStream], initial_population: Optional[Sequence[Sequence[float]]] = None,
        de_config: Optional[DEConfig] = None, ga_config: Optional[GAConfig] = None,
        population_size: Optional[int] = None, executor: Optional[Executor] = None,
        audit: bool = True) -> RunLog:
    """
    Iterate generations until the budget is spent. Generation 0 is the
    initial population and is charged to the budget.
    """
    algorithm = Algorithm(algorithm)
    budget = budget if isinstance(budget, Budget) else Budget(int(budget))
    root = master_seed if isinstance(master_seed, RngStream) else RngStream(int(master_seed))
    de_config = de_config or DEConfig()
    ga_config = ga_config or GAConfig()
    P = _population_size(algorithm, de_config, ga_config, population_size)

    ledger = budget.ledger(objective.replicates)
    log = RunLog(algorithm.value, objective.space, P, objective.replicates)
    if ledger.design_evals_max == 0:
        logger.info("%s: zero budget, nothing to run", algorithm.value.upper())
        return log.finalize(None, ledger)
    if ledger.design_evals_max < P:
        raise ConfigError(
            f"budget of {ledger.design_evals_max} design evaluations cannot cover an initial population of {P}"
        )

    if initial_population is None:
        min_size = de_config.min_population if algorithm is Algorithm.DE else 1
        initial_population = init_population(objective.space, P, root.child(INIT), min_size=min_size)
    elif len(initial_population) != P:
        raise ConfigError(f"initial population has {len(initial_population)} members, expected {P}")

    logger.info("%s: population %d, budget %d design evaluations (%d replicates each)",
                algorithm.value.upper(), P, ledger.design_evals_max, objective.replicates)
    state: Optional[OptimizerState] = None
    try:
        state = init_from(initial_population, objective, ledger, root, algorithm, executor)
        log.record(state, ledger)
        while ledger.remaining > 0:
            partial = ledger.remaining < P
            if algorithm is Algorithm.DE:
                de_generation(state, objective, ledger, root, de_config, executor)
            elif algorithm is Algorithm.GA:
                ga_generation(state, objective, ledger, root, ga_config, executor)
            else:
                random_generation(state, objective, ledger, root, executor)
            log.record(state, ledger, partial=partial)
    except EvaluatorFailure as e:
        log.finalize(state, ledger)
        logger.error("%s run aborted after %d design evaluations: %s",
                     algorithm.value.upper(), len(log.history), e)
        raise RunAborted(f"{algorithm.value} run aborted: {e}", partial_log=log) from e

    log.finalize(state, ledger)
    if audit:
        audit_run_log(log)
    return log


def audit_run_log(log: RunLog) -> None:
    """Check the bookkeeping invariants every completed run log must satisfy."""
    best = [rank_value(r.best_fitness) for r in log.records]
    for prev, cur in zip(best, best[1:]):
        if cur > prev:
            raise AuditFailure(f"{log.algorithm}: best-ever fitness increased from {prev} to {cur}")

    for ind in log.history:
        if not log.space.contains(ind.genome):
            raise AuditFailure(f"{log.algorithm}: genome {ind.genome.tolist()} outside the search space")
        f = ind.fitness
        if len(f.replicate_values) != log.replicates:
            raise AuditFailure(f"{log.algorithm}: {len(f.replicate_values)} replicates, expected {log.replicates}")
        if f.is_finite and f.value != math.fsum(f.replicate_values) / len(f.replicate_values):
            raise AuditFailure(f"{log.algorithm}: fitness {f.value} is not the mean of its replicates")

    if log.ledger is not None:
        if len(log.history) != log.ledger.design_evals_used:
            raise AuditFailure(
                f"{log.algorithm}: {len(log.history)} individuals tested, "
                f"ledger charged {log.ledger.design_evals_used}"
            )
        if log.ledger.sim_runs_used != log.ledger.design_evals_used * log.replicates:
            raise AuditFailure(f"{log.algorithm}: simulator-run count disagrees with design evaluations")

    for event in log.mutation_events:
        indices = (event.target,) + event.donors
        if len(set(indices)) != len(indices):
            raise AuditFailure(f"{log.algorithm}: mutation indices {indices} are not distinct")