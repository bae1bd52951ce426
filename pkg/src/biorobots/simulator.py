"""
One biorobots replicate: tumour growth, agent injection, treatment.

The objective value is the number of live cancer cells at the end of the
treatment phase.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.biorobots.parameters import DesignParams, Schedule, SimConstants, TissueSettings
from src.biorobots.world import BiorobotWorld, step, world_init
from src.core.rng import RngStream


logger = logging.getLogger(__name__)

# Sub-streams of a replicate seed
CANCER_STREAM = 0
WORKER_STREAM = 1
INJECTION_STREAM = 2


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    live_cells: int
    released_cargo: int
    phase: str


@dataclass
class SimulationResult:
    live_cells: int
    cells_created: int
    drug_deaths: int
    apoptosis_deaths: int
    divisions: int
    released_cargo: int
    growth_live_cells: int
    clock: float
    min_oxygen: float
    max_oxygen: float
    trajectory: List[TrajectoryPoint] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "live_cells": self.live_cells,
            "cells_created": self.cells_created,
            "drug_deaths": self.drug_deaths,
            "apoptosis_deaths": self.apoptosis_deaths,
            "divisions": self.divisions,
            "released_cargo": self.released_cargo,
            "growth_live_cells": self.growth_live_cells,
            "clock": self.clock,
            "min_oxygen": self.min_oxygen,
            "max_oxygen": self.max_oxygen,
        }


def inject_agents(world: BiorobotWorld, schedule: Schedule, rng: np.random.Generator) -> None:
    """Scatter workers and cargo over a strip along the left domain edge."""
    tissue = world.tissue
    band = min(tissue.injection_band, tissue.domain_size)

    def strip(count: int) -> np.ndarray:
        x = rng.uniform(0.0, band, count)
        y = rng.uniform(0.0, tissue.domain_size, count)
        return np.column_stack([x, y])

    world.add_workers(strip(schedule.worker_count), rng)
    world.add_cargo(strip(schedule.cargo_count))


def _run_phase(world: BiorobotWorld, design: DesignParams, consts: SimConstants, duration: float,
               dt_mechanics: float, phase: str, trajectory: Optional[List[TrajectoryPoint]],
               oxygen_range: List[float]) -> None:
    end = world.clock + duration
    while end - world.clock > 1e-9:
        dt = min(dt_mechanics, end - world.clock)
        step(world, design, consts, dt)
        interior = world.oxygen_interior()
        oxygen_range[0] = min(oxygen_range[0], float(interior.min()))
        oxygen_range[1] = max(oxygen_range[1], float(interior.max()))
        if trajectory is not None:
            trajectory.append(TrajectoryPoint(world.clock, world.live_cells, world.released_cargo, phase))


def run_simulation(design: DesignParams, consts: SimConstants, schedule: Schedule, seed: RngStream,
                   tissue: Optional[TissueSettings] = None, record: bool = False) -> SimulationResult:
    """Run growth then treatment; deterministic given seed."""
    tissue = tissue or TissueSettings()
    world = world_init(
        schedule, seed.child(CANCER_STREAM), tissue=tissue, worker_seed=seed.child(WORKER_STREAM)
    )
    trajectory: Optional[List[TrajectoryPoint]] = [] if record else None
    if trajectory is not None:
        trajectory.append(TrajectoryPoint(0.0, world.live_cells, 0, "init"))
    oxygen_range = [math.inf, -math.inf]

    _run_phase(world, design, consts, schedule.growth_duration, schedule.dt_mechanics, "growth",
               trajectory, oxygen_range)
    growth_live = world.live_cells

    if schedule.treatment_duration > 0:
        inject_agents(world, schedule, seed.child(INJECTION_STREAM).generator())
        _run_phase(world, design, consts, schedule.treatment_duration, schedule.dt_mechanics, "treatment",
                   trajectory, oxygen_range)

    if not math.isfinite(oxygen_range[0]):
        interior = world.oxygen_interior()
        oxygen_range = [float(interior.min()), float(interior.max())]

    result = SimulationResult(
        live_cells=world.live_cells,
        cells_created=world.cells_created,
        drug_deaths=world.drug_deaths,
        apoptosis_deaths=world.apoptosis_deaths,
        divisions=world.divisions,
        released_cargo=world.released_cargo,
        growth_live_cells=growth_live,
        clock=world.clock,
        min_oxygen=oxygen_range[0],
        max_oxygen=oxygen_range[1],
        trajectory=trajectory or [],
    )
    logger.debug(
        "Replicate %s: %d live cells (%d drug deaths, %d released cargo)",
        seed.stream_id, result.live_cells, result.drug_deaths, result.released_cargo,
    )
    return result


def simulate(design: DesignParams, consts: SimConstants, schedule: Schedule, seed: RngStream,
             tissue: Optional[TissueSettings] = None) -> int:
    """Live cancer cells remaining after growth and treatment."""
    return run_simulation(design, consts, schedule, seed, tissue=tissue).live_cells


