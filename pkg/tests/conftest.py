import os
import sys

import numpy as np
import pytest

# Add project root to path
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from src.biorobots import DesignParams, Schedule, SimConstants, SimulationSetup, TissueSettings  # noqa: E402
from src.objectives import ObjectiveKind, ObjectiveSpec, benchmark_space  # noqa: E402
from src.objectives.external_evaluator import ExternalEvaluatorConfig  # noqa: E402


ECHO_EVALUATOR = os.path.join(ROOT, 'scripts', 'echo_evaluator.py')


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_tissue():
    """A 400 µm domain on a 20x20 grid."""
    return TissueSettings(domain_size=400.0)


@pytest.fixture
def tiny_schedule():
    return Schedule(
        growth_duration=60.0,
        treatment_duration=60.0,
        initial_tumor_radius=60.0,
        worker_count=10,
        cargo_count=10,
    )


@pytest.fixture
def tiny_setup(tiny_schedule, tiny_tissue):
    return SimulationSetup(constants=SimConstants(), schedule=tiny_schedule, tissue=tiny_tissue)


@pytest.fixture
def mid_design():
    return DesignParams(0.5, 0.5, 5.0, 5.0, 5.0, 10.0)


def make_sphere(dimensions=6, replicates=1):
    return ObjectiveSpec(ObjectiveKind.SPHERE, benchmark_space(dimensions), replicates=replicates)


@pytest.fixture
def sphere6():
    return make_sphere()


@pytest.fixture
def echo_config():
    def build(*flags, timeout_s=30.0):
        return ExternalEvaluatorConfig(command=(sys.executable, ECHO_EVALUATOR) + tuple(flags), timeout_s=timeout_s)
    return build
