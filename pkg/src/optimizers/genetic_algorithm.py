"""
Steady-state GA: one offspring per step.

Two select-tournaments pick the parents, uniform crossover and per-allele
mutation build the child, and a replace-tournament that never draws the
current best member chooses which individual the child overwrites.
"""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.exceptions import BudgetExhausted, ConfigError, DimensionMismatch, PopulationTooSmall
from src.core.rng import EVALUATION, VARIATION, RngLike, RngStream, as_generator
from src.core.search_space import Genome, SearchSpace, make_genome, repair_clamp
from src.objectives.evaluation import BudgetLedger, ObjectiveSpec, evaluate_mean
from src.optimizers.individual import Algorithm, EvaluatedIndividual, OptimizerState, rank_value


logger = logging.getLogger(__name__)


class TournamentMode(Enum):
    SELECT = "select"
    REPLACE = "replace"


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 20
    tournament_size: int = 2
    crossover_probability: float = 0.8
    mutation_rate: float = 0.2
    mutation_step: Tuple[float, float] = (-0.05, 0.05)
    elitism: bool = True

    def __post_init__(self):
        if self.tournament_size < 1:
            raise ConfigError(f"tournament_size must be >= 1, got {self.tournament_size}")
        minimum = self.tournament_size + (1 if self.elitism else 0)
        if self.population_size < max(2, minimum):
            raise PopulationTooSmall(
                f"GA with T={self.tournament_size} needs a population of at least {max(2, minimum)}, "
                f"got {self.population_size}"
            )
        for name in ("crossover_probability", "mutation_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        lo, hi = self.mutation_step
        if lo > hi:
            raise ConfigError(f"mutation_step must be an interval (lo <= hi), got {self.mutation_step}")
        object.__setattr__(self, "mutation_step", (float(lo), float(hi)))


def ga_tournament(fitness: Sequence[float], T: int, rng: RngLike,
                  mode: Union[TournamentMode, str] = TournamentMode.SELECT,
                  exclude: Optional[Collection[int]] = None) -> int:
    """
    Draw T distinct candidates and return the best (select) or worst
    (replace) of them. Ties go to the earliest drawn candidate.
    """
    mode = TournamentMode(mode)
    if T < 1:
        raise ConfigError(f"tournament size must be >= 1, got {T}")
    excluded = set(exclude or ())
    candidates = np.array([i for i in range(len(fitness)) if i not in excluded], dtype=np.int64)
    if T > candidates.size:
        raise PopulationTooSmall(f"tournament of {T} from {candidates.size} candidates")

    picks = as_generator(rng).choice(candidates, size=T, replace=False)
    ranks = np.array([rank_value(float(fitness[i])) for i in picks])
    winner = np.argmin(ranks) if mode is TournamentMode.SELECT else np.argmax(ranks)
    return int(picks[winner])


def ga_uniform_crossover(p1: Sequence[float], p2: Sequence[float], X: float, rng: RngLike) -> Genome:
    """With probability X mix genes half-and-half, otherwise copy p1."""
    a = np.asarray(p1, dtype=np.float64)
    b = np.asarray(p2, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"parents have shapes {a.shape} and {b.shape}")
    gen = as_generator(rng)
    if gen.random() >= X:
        return make_genome(a)
    from_second = gen.random(a.size) < 0.5
    return make_genome(np.where(from_second, b, a))


def ga_mutate(g: Sequence[float], mu: float, s: Tuple[float, float], space: SearchSpace, rng: RngLike) -> Genome:
    """Per allele with probability mu add a step uniform in s times the dimension's range; clamp."""
    v = np.asarray(g, dtype=np.float64)
    if v.size != space.D:
        raise DimensionMismatch(f"genome has {v.size} genes, space has {space.D} dimensions")
    gen = as_generator(rng)
    mutate = gen.random(v.size) < mu
    steps = gen.uniform(s[0], s[1], v.size) * space.width
    return repair_clamp(space, np.where(mutate, v + steps, v))


def ga_step(state: OptimizerState, objective: ObjectiveSpec, ledger: BudgetLedger, rng: RngStream,
            config: Optional[GAConfig] = None, executor: Optional[Executor] = None) -> OptimizerState:
    """Produce, evaluate and install one child. Only the child's replicates use the executor."""
    config = config or GAConfig(population_size=state.size)
    if ledger.remaining < 1:
        raise BudgetExhausted("no design evaluations left for a GA step")

    P = state.size
    generation = state.steps // P + 1
    slot = state.steps % P
    gen = rng.child(VARIATION, Algorithm.GA.code, generation, slot).generator()
    fitness = state.fitness_values()

    a = ga_tournament(fitness, config.tournament_size, gen, TournamentMode.SELECT)
    b = ga_tournament(fitness, config.tournament_size, gen, TournamentMode.SELECT)
    child = ga_uniform_crossover(state.population[a].genome, state.population[b].genome,
                                 config.crossover_probability, gen)
    child = ga_mutate(child, config.mutation_rate, config.mutation_step, objective.space, gen)

    result = evaluate_mean(objective, child, rng.child(EVALUATION, generation, slot), ledger, executor)
    offspring = EvaluatedIndividual(child, result, generation, slot, Algorithm.GA.value)
    state.record([offspring])

    exclude = {state.best_index()} if config.elitism else None
    victim = ga_tournament(fitness, config.tournament_size, gen, TournamentMode.REPLACE, exclude=exclude)
    population = list(state.population)
    population[victim] = offspring
    state.population = population
    state.steps += 1
    state.generation = (state.steps + P - 1) // P
    logger.debug("GA step %d: parents %d,%d -> %r replaces %d", state.steps, a, b, result.value, victim)
    return state


def ga_generation(state: OptimizerState, objective: ObjectiveSpec, ledger: BudgetLedger, rng: RngStream,
                  config: Optional[GAConfig] = None, executor: Optional[Executor] = None) -> OptimizerState:
    """P steps, or as many as the budget allows."""
    steps = min(state.size, ledger.remaining)
    if steps <= 0:
        raise BudgetExhausted("no design evaluations left for a GA generation")
    for _ in range(steps):
        ga_step(state, objective, ledger, rng, config, executor)
    if steps < state.size:
        logger.info("GA generation %d partial: %d of %d steps", state.generation, steps, state.size)
    return state
