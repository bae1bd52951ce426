"""
Experiment files: one JSON document describing space, objective, both
optimizers, budget and schedule. Keys starting with "_" are comments.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Optional

from src.biorobots.parameters import Schedule, SimConstants, SimulationSetup, TissueSettings, design_space
from src.core.exceptions import ConfigError
from src.core.search_space import SearchSpace, space_new
from src.objectives.benchmarks import BENCHMARK_BOUND, benchmark_space
from src.objectives.evaluation import DEFAULT_REPLICATES, BudgetUnit, ObjectiveKind, ObjectiveSpec
from src.objectives.external_evaluator import ExternalEvaluatorConfig
from src.optimizers.differential_evolution import DEConfig, DEStrategy
from src.optimizers.genetic_algorithm import GAConfig
from src.optimizers.individual import Algorithm
from src.optimizers.runner import DEFAULT_POPULATION_SIZE, Budget
from src.utils.config_loader import Config


logger = logging.getLogger(__name__)

DEFAULT_COMPARISON_RUNS = 3
DEFAULT_BENCHMARK_DIMENSIONS = 6
BUDGET_UNIT_ALIASES = {
    "design": BudgetUnit.DESIGN_EVALS,
    "design_evals": BudgetUnit.DESIGN_EVALS,
    "sim": BudgetUnit.SIM_RUNS,
    "sim_runs": BudgetUnit.SIM_RUNS,
}


@dataclass(frozen=True)
class ExperimentConfig:
    space: SearchSpace
    objective: ObjectiveSpec
    de: Optional[DEConfig]
    ga: Optional[GAConfig]
    budget: Budget
    comparison_runs: int = DEFAULT_COMPARISON_RUNS
    master_seed: int = 0
    output_dir: str = "results"
    preset: str = "desk"
    random_population: Optional[int] = None

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("at least one algorithm must be enabled")
        if self.comparison_runs < 1:
            raise ConfigError(f"comparison_runs must be >= 1, got {self.comparison_runs}")
        if self.budget.maximum < 0:
            raise ConfigError(f"budget must be >= 0, got {self.budget.maximum}")

    @property
    def algorithms(self) -> List[Algorithm]:
        enabled = []
        if self.ga is not None:
            enabled.append(Algorithm.GA)
        if self.de is not None:
            enabled.append(Algorithm.DE)
        if self.random_population is not None:
            enabled.append(Algorithm.RANDOM)
        return enabled

    def population_size(self, algorithm: Algorithm) -> int:
        if algorithm is Algorithm.DE:
            return self.de.population_size
        if algorithm is Algorithm.GA:
            return self.ga.population_size
        return self.random_population

    def with_overrides(self, master_seed: Optional[int] = None, budget: Optional[int] = None,
                       budget_unit: Optional[str] = None, output_dir: Optional[str] = None) -> "ExperimentConfig":
        """Apply command-line overrides."""
        changes: Dict[str, Any] = {}
        if master_seed is not None:
            changes["master_seed"] = int(master_seed)
        if budget is not None or budget_unit is not None:
            unit = parse_budget_unit(budget_unit) if budget_unit is not None else self.budget.unit
            maximum = int(budget) if budget is not None else self.budget.maximum
            changes["budget"] = Budget(maximum, unit)
        if output_dir is not None:
            changes["output_dir"] = output_dir
        return replace(self, **changes) if changes else self

    def to_dict(self) -> dict:
        objective = {"kind": self.objective.kind.value, "replicates": self.objective.replicates,
                     "retries": self.objective.retries}
        params = self.objective.params
        if isinstance(params, SimulationSetup):
            objective.update(constants=params.constants.to_dict(), schedule=params.schedule.to_dict(),
                             tissue=params.tissue.to_dict())
        elif isinstance(params, ExternalEvaluatorConfig):
            objective.update(command=list(params.command), timeout_s=params.timeout_s)
        return {
            "space": self.space.to_dict(),
            "objective": objective,
            "de": _dataclass_dict(self.de),
            "ga": _dataclass_dict(self.ga),
            "random": {"population_size": self.random_population} if self.random_population else None,
            "budget": {"unit": self.budget.unit.value, "max": self.budget.maximum},
            "comparison_runs": self.comparison_runs,
            "master_seed": self.master_seed,
            "preset": self.preset,
        }


def _dataclass_dict(obj) -> Optional[dict]:
    if obj is None:
        return None
    out = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, DEStrategy):
            value = value.value
        elif isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def parse_budget_unit(value: str) -> BudgetUnit:
    try:
        return BUDGET_UNIT_ALIASES[str(value).lower()]
    except KeyError:
        raise ConfigError(f"unknown budget unit {value!r}; use design or sim") from None


def _strip_comments(data: Any) -> Any:
    if isinstance(data, dict):
        return {k: _strip_comments(v) for k, v in data.items() if not str(k).startswith("_")}
    if isinstance(data, list):
        return [_strip_comments(v) for v in data]
    return data


def _section(data: dict, name: str) -> Optional[dict]:
    """None when the section is null or carries enabled=false; {} when missing."""
    if name not in data:
        return {}
    section = data[name]
    if section is None:
        return None
    if not isinstance(section, dict):
        raise ConfigError(f"section {name!r} must be an object or null")
    section = dict(section)
    if not section.pop("enabled", True):
        return None
    return section


def _build(cls, section: dict, name: str, **converters):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {', '.join(unknown)}")
    try:
        kwargs = {k: converters[k](v) if k in converters else v for k, v in section.items()}
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {name!r} section: {e}") from e


def _parse_space(section: Any, kind: ObjectiveKind) -> SearchSpace:
    if section is None or section == {}:
        if kind is ObjectiveKind.BIOROBOTS:
            return design_space()
        if kind in (ObjectiveKind.SPHERE, ObjectiveKind.RASTRIGIN):
            return benchmark_space(DEFAULT_BENCHMARK_DIMENSIONS)
        raise ConfigError("an external objective needs an explicit 'space' section")
    if isinstance(section, list):
        return space_new(section)
    dims = section.get("dimensions")
    if isinstance(dims, int):
        return benchmark_space(dims, float(section.get("bound", BENCHMARK_BOUND)))
    if isinstance(dims, list):
        return space_new(dims)
    raise ConfigError("'space' needs a 'dimensions' list or count")


class ExperimentService:
    """Service for loading and validating experiment files"""

    def __init__(self, settings: Optional[Config] = None):
        self.config = settings or Config()

    def load(self, path: str, preset: Optional[str] = None) -> ExperimentConfig:
        """Read and validate an experiment file."""
        if not os.path.isfile(path):
            raise ConfigError(f"experiment file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}") from e
        experiment = self.from_dict(data, preset=preset)
        logger.info("Loaded experiment %s: %s objective, algorithms %s, budget %d %s",
                    path, experiment.objective.kind.value, [a.value for a in experiment.algorithms],
                    experiment.budget.maximum, experiment.budget.unit.value)
        return experiment

    def from_dict(self, data: dict, preset: Optional[str] = None) -> ExperimentConfig:
        """Build an ExperimentConfig from a parsed experiment document."""
        if not isinstance(data, dict):
            raise ConfigError("experiment file must contain a JSON object")
        data = _strip_comments(data)

        preset = preset or data.get("preset", "desk")
        schedule = Schedule.preset(preset).with_overrides(data.get("schedule") or {})

        objective_section = data.get("objective") or {}
        try:
            kind = ObjectiveKind(objective_section.get("kind", ObjectiveKind.BIOROBOTS.value))
        except ValueError as e:
            raise ConfigError(f"unknown objective kind: {e}") from e
        space = _parse_space(data.get("space"), kind)
        objective = self.parse_objective(objective_section, space, schedule)

        de_section = _section(data, "de")
        de = None if de_section is None else _build(DEConfig, de_section, "de", strategy=DEStrategy)
        ga_section = _section(data, "ga")
        ga = None if ga_section is None else _build(GAConfig, ga_section, "ga", mutation_step=tuple)
        random_section = _section(data, "random") if "random" in data else None
        random_population = None
        if random_section is not None:
            random_population = int(random_section.get("population_size", DEFAULT_POPULATION_SIZE))

        budget_section = data.get("budget") or {}
        budget = Budget(
            int(budget_section.get("max", 200)),
            parse_budget_unit(budget_section.get("unit", BudgetUnit.DESIGN_EVALS.value)),
        )
        return ExperimentConfig(
            space=space,
            objective=objective,
            de=de,
            ga=ga,
            budget=budget,
            comparison_runs=int(data.get("comparison_runs", DEFAULT_COMPARISON_RUNS)),
            master_seed=int(data.get("master_seed", 0)),
            output_dir=str(data.get("output_dir", self.config.output_dir)),
            preset=preset,
            random_population=random_population,
        )

    def parse_objective(self, section: dict, space: SearchSpace, schedule: Schedule) -> ObjectiveSpec:
        """Objective section; evaluator timeout and retries default to the application settings"""
        section = dict(section or {})
        try:
            kind = ObjectiveKind(section.pop("kind", ObjectiveKind.BIOROBOTS.value))
        except ValueError as e:
            raise ConfigError(f"unknown objective kind: {e}") from e
        replicates = int(section.pop("replicates", DEFAULT_REPLICATES))
        retries = int(section.pop("retries", self.config.retry_attempts))

        params: Any = None
        if kind is ObjectiveKind.BIOROBOTS:
            constants = SimConstants().with_overrides(section.pop("constants", {}) or {})
            tissue = TissueSettings().with_overrides(section.pop("tissue", {}) or {})
            params = SimulationSetup(constants=constants, schedule=schedule, tissue=tissue)
        elif kind is ObjectiveKind.EXTERNAL:
            section.setdefault("timeout_s", self.config.evaluator_timeout)
            params = ExternalEvaluatorConfig.from_dict(section)
            section = {}
        if section:
            raise ConfigError(f"unknown keys in 'objective': {', '.join(sorted(section))}")
        return ObjectiveSpec(kind=kind, space=space, replicates=replicates, params=params, retries=retries)
