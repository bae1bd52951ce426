"""
DE/rand/1 with binomial crossover and one-to-one selection.

Generations are synchronous: all trials of a generation are built from the
same parent population, evaluated (possibly concurrently), and only then
compared with their targets.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import BudgetExhausted, ConfigError, DimensionMismatch, PopulationTooSmall
from src.core.rng import EVALUATION, VARIATION, RngLike, RngStream, as_generator
from src.core.search_space import Genome, SearchSpace, make_genome, repair_clamp, repair_reflect
from src.objectives.evaluation import BudgetLedger, ObjectiveSpec, evaluate_batch
from src.optimizers.individual import Algorithm, EvaluatedIndividual, MutationEvent, OptimizerState


logger = logging.getLogger(__name__)


class DEStrategy(Enum):
    """DE/base/num variants. Only rand/1 is registered."""

    RAND_1 = "rand_1"


class MutationStrategy(NamedTuple):
    donor_count: int
    combine: Callable[[np.ndarray, np.ndarray, float], np.ndarray]


def _rand_1(pop: np.ndarray, donors: np.ndarray, F: float) -> np.ndarray:
    r1, r2, r3 = donors
    return pop[r1] + F * (pop[r2] - pop[r3])


MUTATION_STRATEGIES: Dict[DEStrategy, MutationStrategy] = {
    DEStrategy.RAND_1: MutationStrategy(donor_count=3, combine=_rand_1),
}

REPAIRS: Dict[str, Callable[[SearchSpace, Sequence[float]], Genome]] = {
    "clamp": repair_clamp,
    "reflect": repair_reflect,
}


@dataclass(frozen=True)
class DEConfig:
    population_size: int = 20
    scaling_factor: float = 0.5
    crossover_rate: float = 0.9
    strategy: DEStrategy = DEStrategy.RAND_1
    accept_equal: bool = False
    repair: str = "clamp"
    audit_mutations: bool = False

    def __post_init__(self):
        if self.strategy not in MUTATION_STRATEGIES:
            raise ConfigError(f"DE strategy {self.strategy.value!r} is not implemented")
        minimum = MUTATION_STRATEGIES[self.strategy].donor_count + 1
        if self.population_size < minimum:
            raise PopulationTooSmall(
                f"DE/{self.strategy.value} needs a population of at least {minimum}, got {self.population_size}"
            )
        if self.scaling_factor < 0:
            raise ConfigError(f"scaling_factor must be >= 0, got {self.scaling_factor}")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError(f"crossover_rate must lie in [0, 1], got {self.crossover_rate}")
        if self.repair not in REPAIRS:
            raise ConfigError(f"unknown repair {self.repair!r}; choose one of {sorted(REPAIRS)}")

    @property
    def min_population(self) -> int:
        return MUTATION_STRATEGIES[self.strategy].donor_count + 1


def draw_donors(population_size: int, target_index: int, count: int, rng: RngLike) -> np.ndarray:
    """Mutually distinct indices drawn uniformly from the population minus the target."""
    if population_size < count + 1:
        raise PopulationTooSmall(f"need at least {count + 1} individuals, got {population_size}")
    candidates = np.delete(np.arange(population_size), target_index)
    return as_generator(rng).choice(candidates, size=count, replace=False)


def _mutate(pop: np.ndarray, target_index: int, F: float, gen: np.random.Generator,
            strategy: DEStrategy) -> Tuple[np.ndarray, np.ndarray]:
    spec = MUTATION_STRATEGIES[strategy]
    donors = draw_donors(pop.shape[0], target_index, spec.donor_count, gen)
    return spec.combine(pop, donors, F), donors


def de_mutate(pop: Sequence[Sequence[float]], target_index: int, F: float, rng: RngLike,
              space: Optional[SearchSpace] = None, strategy: DEStrategy = DEStrategy.RAND_1) -> Genome:
    """
    v = x_r1 + F * (x_r2 - x_r3) with r1, r2, r3, target mutually distinct.
    The mutant is clamped into `space` when one is given.
    """
    arr = np.asarray(pop, dtype=np.float64)
    mutant, _ = _mutate(arr, target_index, F, as_generator(rng), strategy)
    if space is not None:
        return repair_clamp(space, mutant)
    return make_genome(mutant)


def de_crossover_binomial(target: Sequence[float], mutant: Sequence[float], CR: float, rng: RngLike) -> Genome:
    """Take each gene from the mutant with probability CR; gene j_rand always comes from the mutant."""
    t = np.asarray(target, dtype=np.float64)
    m = np.asarray(mutant, dtype=np.float64)
    if t.shape != m.shape:
        raise DimensionMismatch(f"target has shape {t.shape}, mutant {m.shape}")
    gen = as_generator(rng)
    D = t.size
    j_rand = gen.integers(D)
    take_mutant = gen.random(D) < CR
    take_mutant[j_rand] = True
    return make_genome(np.where(take_mutant, m, t))


def de_select(target: EvaluatedIndividual, trial: EvaluatedIndividual, accept_equal: bool = False) -> EvaluatedIndividual:
    """The trial replaces its target only when it is better (or equal, if allowed)."""
    if not math.isfinite(trial.value):
        logger.warning("Trial %d/%d has non-finite fitness %r; target retained",
                       trial.generation, trial.index, trial.value)
        return target
    if accept_equal:
        return trial if trial.rank <= target.rank else target
    return trial if trial.rank < target.rank else target


def de_generation(state: OptimizerState, objective: ObjectiveSpec, ledger: BudgetLedger, rng: RngStream,
                  config: Optional[DEConfig] = None, executor: Optional[Executor] = None) -> OptimizerState:
    """
    One generation: mutate, cross over and evaluate a trial per target, then
    select. With fewer than P evaluations left only the first k targets get
    a trial (partial generation).
    """
    config = config or DEConfig(population_size=state.size)
    P = state.size
    if P < config.min_population:
        raise PopulationTooSmall(f"DE needs at least {config.min_population} individuals, got {P}")
    k = min(P, ledger.remaining)
    if k <= 0:
        raise BudgetExhausted("no design evaluations left for a DE generation")

    generation = state.generation + 1
    space = objective.space
    repair = REPAIRS[config.repair]
    pop = state.genome_matrix()

    trials = []
    for i in range(k):
        gen = rng.child(VARIATION, Algorithm.DE.code, generation, i).generator()
        mutant, donors = _mutate(pop, i, config.scaling_factor, gen, config.strategy)
        if config.audit_mutations or logger.isEnabledFor(logging.DEBUG):
            event = MutationEvent(generation, i, tuple(int(d) for d in donors))
            state.mutation_events.append(event)
            logger.debug("DE gen %d target %d donors %s", generation, i, event.donors)
        trials.append(de_crossover_binomial(pop[i], repair(space, mutant), config.crossover_rate, gen))

    streams = [rng.child(EVALUATION, generation, i) for i in range(k)]
    fitnesses = evaluate_batch(objective, trials, streams, ledger, executor)

    evaluated = [
        EvaluatedIndividual(trial, fitness, generation, i, Algorithm.DE.value)
        for i, (trial, fitness) in enumerate(zip(trials, fitnesses))
    ]
    state.record(evaluated)
    new_population = list(state.population)
    for i, trial in enumerate(evaluated):
        new_population[i] = de_select(state.population[i], trial, config.accept_equal)
    state.population = new_population
    state.generation = generation
    state.steps += k
    if k < P:
        logger.info("DE generation %d partial: %d of %d targets challenged", generation, k, P)
    return state
