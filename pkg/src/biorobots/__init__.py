# Agent-based surrogate of the anti-cancer biorobots scenario

from .parameters import (
    DESIGN_BOUNDS,
    DesignParams,
    SimConstants,
    Schedule,
    TissueSettings,
    SimulationSetup,
    design_space,
)
from .world import BiorobotWorld, world_init, step
from .simulator import SimulationResult, TrajectoryPoint, run_simulation, simulate

__all__ = [
    'DESIGN_BOUNDS',
    'DesignParams',
    'SimConstants',
    'Schedule',
    'TissueSettings',
    'SimulationSetup',
    'design_space',
    'BiorobotWorld',
    'world_init',
    'step',
    'SimulationResult',
    'TrajectoryPoint',
    'run_simulation',
    'simulate',
]
