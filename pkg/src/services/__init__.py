# Services layer: experiment loading, paired comparisons, result export

from .experiment_config import ExperimentConfig, ExperimentService, parse_budget_unit
from .comparison_service import ComparisonReport, ComparisonService, RunPair, decide_winner, evaluation_pool
from .export_service import (
    ExportService,
    convergence_frame,
    history_frame,
    final_population_frame,
)

__all__ = [
    'ExperimentConfig',
    'ExperimentService',
    'parse_budget_unit',
    'ComparisonReport',
    'ComparisonService',
    'RunPair',
    'decide_winner',
    'evaluation_pool',
    'ExportService',
    'convergence_frame',
    'history_frame',
    'final_population_frame',
]
