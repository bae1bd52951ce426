"""
Objective contract, replicate averaging and evaluation-budget accounting.

A design evaluation runs R replicates of the objective, each with its own
seed derived from the caller's stream, and reports their arithmetic mean.
Replicates may fan out to an executor; results are always aggregated in
replicate-index order so the outcome never depends on the worker count.
"""

from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import Executor
from dataclasses import dataclass
from enum import Enum
from itertools import repeat
from typing import Any, List, Optional, Sequence, Tuple

from src.biorobots.parameters import DesignParams, SimulationSetup
from src.biorobots.simulator import simulate
from src.core.exceptions import BudgetExhausted, ConfigError, EvaluatorFailure, OutOfBoundsGenome
from src.core.rng import RETRY, RngStream
from src.core.search_space import SearchSpace
from src.objectives.benchmarks import rastrigin, sphere
from src.objectives.external_evaluator import ExternalEvaluatorConfig, external_evaluate


logger = logging.getLogger(__name__)

DEFAULT_REPLICATES = 5


class ObjectiveKind(Enum):
    SPHERE = "sphere"
    RASTRIGIN = "rastrigin"
    BIOROBOTS = "biorobots"
    EXTERNAL = "external"


class BudgetUnit(Enum):
    DESIGN_EVALS = "design_evals"
    SIM_RUNS = "sim_runs"


@dataclass(frozen=True)
class ObjectiveSpec:
    """What to evaluate and how many replicates make one design evaluation."""

    kind: ObjectiveKind
    space: SearchSpace
    replicates: int = DEFAULT_REPLICATES
    params: Any = None
    retries: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if self.retries < 0:
            raise ConfigError(f"retries must be >= 0, got {self.retries}")
        if self.kind is ObjectiveKind.BIOROBOTS:
            if not isinstance(self.params, SimulationSetup):
                raise ConfigError("biorobots objective needs a SimulationSetup")
            if self.space.D != len(DesignParams.field_names()):
                raise ConfigError(
                    f"biorobots objective needs a {len(DesignParams.field_names())}-D space, got {self.space.D}-D"
                )
        if self.kind is ObjectiveKind.EXTERNAL and not isinstance(self.params, ExternalEvaluatorConfig):
            raise ConfigError("external objective needs an ExternalEvaluatorConfig")


@dataclass(frozen=True)
class Fitness:
    value: float
    replicate_values: Tuple[float, ...] = ()
    replicate_seeds: Tuple[int, ...] = ()

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass(frozen=True)
class LedgerSnapshot:
    design_evals_used: int
    design_evals_max: int
    sim_runs_used: int
    replicates: int
    unit: str

    def to_dict(self) -> dict:
        return {
            "design_evals_used": self.design_evals_used,
            "design_evals_max": self.design_evals_max,
            "sim_runs_used": self.sim_runs_used,
            "replicates": self.replicates,
            "unit": self.unit,
        }


class BudgetLedger:
    """
    Thread-safe evaluation budget.

    Callers reserve design evaluations before evaluating, then commit on
    success or release on failure, so a failed evaluation consumes nothing
    and concurrent evaluations can never overrun the maximum.
    """

    def __init__(self, design_evals_max: int, replicates: int = DEFAULT_REPLICATES,
                 unit: BudgetUnit = BudgetUnit.DESIGN_EVALS):
        if design_evals_max < 0:
            raise ConfigError(f"budget must be >= 0, got {design_evals_max}")
        self.design_evals_max = int(design_evals_max)
        self.replicates = int(replicates)
        self.unit = unit
        self.design_evals_used = 0
        self.sim_runs_used = 0
        self._pending = 0
        self.lock = threading.Lock()

    @classmethod
    def from_budget(cls, unit: BudgetUnit, maximum: int, replicates: int) -> "BudgetLedger":
        """Convert a budget in either unit into design evaluations (sim runs round down)."""
        if unit is BudgetUnit.SIM_RUNS:
            return cls(int(maximum) // int(replicates), replicates, unit)
        return cls(int(maximum), replicates, unit)

    @property
    def remaining(self) -> int:
        with self.lock:
            return self.design_evals_max - self.design_evals_used - self._pending

    def reserve(self, n: int = 1) -> None:
        with self.lock:
            available = self.design_evals_max - self.design_evals_used - self._pending
            if n > available:
                raise BudgetExhausted(
                    f"requested {n} design evaluation(s), {available} left of {self.design_evals_max}"
                )
            self._pending += n

    def commit(self, n: int = 1) -> None:
        with self.lock:
            self._pending -= n
            self.design_evals_used += n
            self.sim_runs_used += n * self.replicates

    def release(self, n: int = 1) -> None:
        with self.lock:
            self._pending -= n

    def snapshot(self) -> LedgerSnapshot:
        with self.lock:
            return LedgerSnapshot(
                design_evals_used=self.design_evals_used,
                design_evals_max=self.design_evals_max,
                sim_runs_used=self.sim_runs_used,
                replicates=self.replicates,
                unit=self.unit.value,
            )


def evaluate_once(spec: ObjectiveSpec, g: Sequence[float], seed: RngStream) -> float:
    """One replicate of the objective; deterministic given (g, seed)."""
    if not spec.space.contains(g):
        raise OutOfBoundsGenome(f"genome {list(g)} lies outside the search space")

    if spec.kind is ObjectiveKind.SPHERE:
        return sphere(g)
    if spec.kind is ObjectiveKind.RASTRIGIN:
        return rastrigin(g)
    if spec.kind is ObjectiveKind.BIOROBOTS:
        setup: SimulationSetup = spec.params
        design = DesignParams.from_genome(g)
        return float(simulate(design, setup.constants, setup.schedule, seed, tissue=setup.tissue))
    if spec.kind is ObjectiveKind.EXTERNAL:
        return external_evaluate(spec.params, g, seed.seed_int())
    raise ConfigError(f"unknown objective kind {spec.kind!r}")


def run_replicate(spec: ObjectiveSpec, g: Sequence[float], stream: RngStream) -> Tuple[float, int]:
    """Evaluate one replicate, retrying on a fresh derived seed. Returns (value, seed used)."""
    attempt_stream = stream
    for attempt in range(spec.retries + 1):
        try:
            return evaluate_once(spec, g, attempt_stream), attempt_stream.seed_int()
        except EvaluatorFailure as e:
            if attempt == spec.retries:
                raise
            logger.warning("Replicate %s failed (%s); retrying with a fresh seed", stream.stream_id, e)
            attempt_stream = attempt_stream.child(RETRY)
    raise AssertionError("unreachable")


def _aggregate(results: Sequence[Tuple[float, int]]) -> Fitness:
    values = tuple(float(v) for v, _ in results)
    seeds = tuple(int(s) for _, s in results)
    return Fitness(value=math.fsum(values) / len(values), replicate_values=values, replicate_seeds=seeds)


def evaluate_mean(spec: ObjectiveSpec, g: Sequence[float], rng: RngStream, ledger: BudgetLedger,
                  executor: Optional[Executor] = None) -> Fitness:
    """One design evaluation: R replicates averaged, charged to the ledger."""
    return evaluate_batch(spec, [g], [rng], ledger, executor)[0]


def evaluate_batch(spec: ObjectiveSpec, genomes: Sequence[Sequence[float]], streams: Sequence[RngStream],
                   ledger: BudgetLedger, executor: Optional[Executor] = None) -> List[Fitness]:
    """
    Evaluate several designs at once. All replicates of all designs may run
    concurrently; the ledger is charged only after every design succeeded.
    """
    if len(genomes) != len(streams):
        raise ValueError("one stream per genome is required")
    n = len(genomes)
    if n == 0:
        return []
    ledger.reserve(n)
    try:
        jobs_g = [g for g in genomes for _ in range(spec.replicates)]
        jobs_s = [s.child(r) for s in streams for r in range(spec.replicates)]
        if executor is None:
            results = [run_replicate(spec, g, s) for g, s in zip(jobs_g, jobs_s)]
        else:
            results = list(executor.map(run_replicate, repeat(spec), jobs_g, jobs_s))
    except BaseException:
        ledger.release(n)
        raise
    ledger.commit(n)

    R = spec.replicates
    fitnesses = [_aggregate(results[i * R:(i + 1) * R]) for i in range(n)]
    for s, f in zip(streams, fitnesses):
        logger.debug("Evaluated %s -> %r (replicates %s)", s.stream_id, f.value, f.replicate_values)
    return fitnesses
