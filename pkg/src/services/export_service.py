"""
CSV and JSON export of run logs, comparison reports and single simulations.

Column schema (one file per algorithm and comparison run):

convergence_<alg>_<run>.csv
    generation, avg_fitness, best_fitness, current_best,
    mean_pairwise_distance, duplicate_count, evaluations, partial
history_<alg>_<run>.csv
    individual, algorithm, generation, index, <one column per dimension>,
    fitness, rep_<k>..., seed_<k>...
final_population_<alg>_<run>.csv
    slot, generation, index, <one column per dimension>, fitness

Floats are written in shortest round-trip form; read them back with
pandas.read_csv(..., float_precision="round_trip").
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import asdict
from typing import Any, List, Optional

import numpy as np
import pandas as pd

from src.biorobots.parameters import DesignParams
from src.biorobots.simulator import SimulationResult
from src.core.exceptions import ExportError
from src.optimizers.runner import RunLog


logger = logging.getLogger(__name__)

CONVERGENCE_COLUMNS = [
    "generation", "avg_fitness", "best_fitness", "current_best",
    "mean_pairwise_distance", "duplicate_count", "evaluations", "partial",
]


def convergence_frame(log: RunLog) -> pd.DataFrame:
    rows = [
        {
            "generation": r.generation,
            "avg_fitness": r.avg_fitness,
            "best_fitness": r.best_fitness,
            "current_best": r.current_best,
            "mean_pairwise_distance": r.diversity.mean_pairwise_distance,
            "duplicate_count": r.diversity.duplicate_count,
            "evaluations": r.evaluations,
            "partial": int(r.partial),
        }
        for r in log.records
    ]
    return pd.DataFrame(rows, columns=CONVERGENCE_COLUMNS)


def history_columns(log: RunLog) -> List[str]:
    reps = [f"rep_{k}" for k in range(log.replicates)]
    seeds = [f"seed_{k}" for k in range(log.replicates)]
    return ["individual", "algorithm", "generation", "index"] + log.space.names + ["fitness"] + reps + seeds


def history_frame(log: RunLog) -> pd.DataFrame:
    names = log.space.names
    rows = []
    for n, ind in enumerate(log.history):
        row = {"individual": n, "algorithm": ind.algorithm, "generation": ind.generation, "index": ind.index}
        row.update(zip(names, ind.genome.tolist()))
        row["fitness"] = ind.value
        for k, (value, seed) in enumerate(zip(ind.fitness.replicate_values, ind.fitness.replicate_seeds)):
            row[f"rep_{k}"] = value
            row[f"seed_{k}"] = seed
        rows.append(row)
    return pd.DataFrame(rows, columns=history_columns(log))


def final_population_frame(log: RunLog) -> pd.DataFrame:
    names = log.space.names
    rows = []
    for slot, ind in enumerate(log.final_population):
        row = {"slot": slot, "generation": ind.generation, "index": ind.index}
        row.update(zip(names, ind.genome.tolist()))
        row["fitness"] = ind.value
        rows.append(row)
    return pd.DataFrame(rows, columns=["slot", "generation", "index"] + names + ["fitness"])


def json_safe(obj: Any) -> Any:
    """Replace non-finite floats with null and numpy scalars with Python numbers."""
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path: str, data: Any) -> str:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(json_safe(data), f, sort_keys=True, indent=2, allow_nan=False)
            f.write("\n")
    except OSError as e:
        raise ExportError(f"could not write {path}: {e}") from e
    return path


def _write_csv(frame: pd.DataFrame, path: str) -> str:
    try:
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise ExportError(f"could not write {path}: {e}") from e
    return path


def trajectory_frame(result: SimulationResult) -> pd.DataFrame:
    rows = [
        {"t": p.t, "live_cells": p.live_cells, "released_cargo": p.released_cargo, "phase": p.phase}
        for p in result.trajectory
    ]
    return pd.DataFrame(rows, columns=["t", "live_cells", "released_cargo", "phase"])


class ExportService:
    """Service for writing results into one output directory"""

    def __init__(self, output_dir: str):
        self.output_dir = output_dir

    def _path(self, name: str) -> str:
        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except OSError as e:
            raise ExportError(f"could not create output directory {self.output_dir}: {e}") from e
        return os.path.join(self.output_dir, name)

    def export_run_log(self, log: RunLog, run_index: int = 0) -> List[str]:
        """Write the three per-run CSV files."""
        tag = f"{log.algorithm}_{run_index}"
        paths = [
            _write_csv(convergence_frame(log), self._path(f"convergence_{tag}.csv")),
            _write_csv(history_frame(log), self._path(f"history_{tag}.csv")),
            _write_csv(final_population_frame(log), self._path(f"final_population_{tag}.csv")),
        ]
        logger.info("Exported %s run %d (%d individuals) to %s",
                    log.algorithm, run_index, len(log.history), self.output_dir)
        return paths

    def export_report(self, report) -> List[str]:
        """Write every run log of a comparison plus report.json."""
        paths: List[str] = []
        for pair in report.pairs:
            for alg in sorted(pair.logs):
                paths.extend(self.export_run_log(pair.logs[alg], pair.run_index))
        document = {"summary": report.summary(), "config": report.config.to_dict()}
        paths.append(write_json(self._path("report.json"), document))
        logger.info("Wrote comparison report with %d runs to %s", len(report.pairs), self.output_dir)
        return paths

    def export_single_run(self, log: RunLog, config: Optional[dict] = None) -> List[str]:
        """CSV files of one optimize run plus a small run.json summary."""
        paths = self.export_run_log(log, 0)
        summary = {
            "algorithm": log.algorithm,
            "best_fitness": log.best_fitness,
            "best_genome": dict(zip(log.space.names, log.best.genome.tolist())) if log.best is not None else None,
            "generations": log.records[-1].generation if log.records else 0,
            "ledger": log.ledger.to_dict() if log.ledger is not None else None,
            "config": config,
        }
        paths.append(write_json(self._path("run.json"), summary))
        return paths

    def export_simulation(self, result: SimulationResult, design: DesignParams, seed: int) -> List[str]:
        """Per-step trajectory CSV and a JSON summary of one replicate."""
        summary = result.to_dict()
        summary.update(design=asdict(design), seed=seed)
        return [
            _write_csv(trajectory_frame(result), self._path("simulation.csv")),
            write_json(self._path("simulation.json"), summary),
        ]
