# Search space, genome arithmetic, random streams and diversity metrics

from .exceptions import (
    OptimizationError,
    ConfigError,
    BoundsError,
    EmptySpaceError,
    DimensionMismatch,
    EmptyPopulation,
    PopulationTooSmall,
    OutOfBoundsGenome,
    BudgetExhausted,
    EvaluatorFailure,
    ProtocolError,
    EvaluatorTimeout,
    NonZeroExit,
    NumericalInstability,
    DomainTooSmall,
    RunAborted,
    AuditFailure,
    ExportError,
)
from .rng import RngStream, as_generator
from .search_space import (
    Dimension,
    Genome,
    SearchSpace,
    space_new,
    make_genome,
    sample_uniform,
    repair_clamp,
    repair_reflect,
    normalized_distance,
)
from .diversity import DiversityStats, diversity, DEFAULT_DUP_TOL

__all__ = [
    'OptimizationError',
    'ConfigError',
    'BoundsError',
    'EmptySpaceError',
    'DimensionMismatch',
    'EmptyPopulation',
    'PopulationTooSmall',
    'OutOfBoundsGenome',
    'BudgetExhausted',
    'EvaluatorFailure',
    'ProtocolError',
    'EvaluatorTimeout',
    'NonZeroExit',
    'NumericalInstability',
    'DomainTooSmall',
    'RunAborted',
    'AuditFailure',
    'ExportError',
    'RngStream',
    'as_generator',
    'Dimension',
    'Genome',
    'SearchSpace',
    'space_new',
    'make_genome',
    'sample_uniform',
    'repair_clamp',
    'repair_reflect',
    'normalized_distance',
    'DiversityStats',
    'diversity',
    'DEFAULT_DUP_TOL',
]
