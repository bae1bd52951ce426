"""Uniform random sampling baseline under the same budget accounting."""

from __future__ import annotations

import logging
from concurrent.futures import Executor
from typing import Optional

from src.core.exceptions import BudgetExhausted
from src.core.rng import EVALUATION, VARIATION, RngStream
from src.core.search_space import sample_uniform
from src.objectives.evaluation import BudgetLedger, ObjectiveSpec, evaluate_batch
from src.optimizers.individual import Algorithm, EvaluatedIndividual, OptimizerState


logger = logging.getLogger(__name__)


def random_generation(state: OptimizerState, objective: ObjectiveSpec, ledger: BudgetLedger, rng: RngStream,
                      executor: Optional[Executor] = None) -> OptimizerState:
    """Sample up to P fresh genomes; they replace the population slot for slot."""
    P = state.size
    k = min(P, ledger.remaining)
    if k <= 0:
        raise BudgetExhausted("no design evaluations left for random sampling")

    generation = state.generation + 1
    genomes = [
        sample_uniform(objective.space, rng.child(VARIATION, Algorithm.RANDOM.code, generation, i))
        for i in range(k)
    ]
    streams = [rng.child(EVALUATION, generation, i) for i in range(k)]
    fitnesses = evaluate_batch(objective, genomes, streams, ledger, executor)
    sampled = [
        EvaluatedIndividual(g, f, generation, i, Algorithm.RANDOM.value)
        for i, (g, f) in enumerate(zip(genomes, fitnesses))
    ]
    state.record(sampled)
    population = list(state.population)
    population[:k] = sampled
    state.population = population
    state.generation = generation
    state.steps += k
    return state
