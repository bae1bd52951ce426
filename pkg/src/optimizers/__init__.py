# Differential evolution, steady-state GA, random baseline and the run loop

from .individual import Algorithm, EvaluatedIndividual, MutationEvent, OptimizerState, rank_value
from .differential_evolution import (
    DEConfig,
    DEStrategy,
    MUTATION_STRATEGIES,
    draw_donors,
    de_mutate,
    de_crossover_binomial,
    de_select,
    de_generation,
)
from .genetic_algorithm import (
    GAConfig,
    TournamentMode,
    ga_tournament,
    ga_uniform_crossover,
    ga_mutate,
    ga_step,
    ga_generation,
)
from .random_search import random_generation
from .runner import (
    Budget,
    GenerationRecord,
    RunLog,
    init_population,
    init_from,
    population_mean,
    run,
    audit_run_log,
)

__all__ = [
    'Algorithm',
    'EvaluatedIndividual',
    'MutationEvent',
    'OptimizerState',
    'rank_value',
    'DEConfig',
    'DEStrategy',
    'MUTATION_STRATEGIES',
    'draw_donors',
    'de_mutate',
    'de_crossover_binomial',
    'de_select',
    'de_generation',
    'GAConfig',
    'TournamentMode',
    'ga_tournament',
    'ga_uniform_crossover',
    'ga_mutate',
    'ga_step',
    'ga_generation',
    'random_generation',
    'Budget',
    'GenerationRecord',
    'RunLog',
    'init_population',
    'init_from',
    'population_mean',
    'run',
    'audit_run_log',
]
