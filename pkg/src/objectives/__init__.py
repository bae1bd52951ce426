# Objective contract, replicate averaging, benchmarks and the external evaluator

from .benchmarks import sphere, rastrigin, benchmark_space, BENCHMARK_BOUND
from .evaluation import (
    ObjectiveKind,
    ObjectiveSpec,
    Fitness,
    BudgetUnit,
    BudgetLedger,
    LedgerSnapshot,
    evaluate_once,
    evaluate_mean,
    evaluate_batch,
    DEFAULT_REPLICATES,
)
from .external_evaluator import ExternalEvaluatorConfig, ExternalEvaluator, external_evaluate

__all__ = [
    'sphere',
    'rastrigin',
    'benchmark_space',
    'BENCHMARK_BOUND',
    'ObjectiveKind',
    'ObjectiveSpec',
    'Fitness',
    'BudgetUnit',
    'BudgetLedger',
    'LedgerSnapshot',
    'evaluate_once',
    'evaluate_mean',
    'evaluate_batch',
    'DEFAULT_REPLICATES',
    'ExternalEvaluatorConfig',
    'ExternalEvaluator',
    'external_evaluate',
]
