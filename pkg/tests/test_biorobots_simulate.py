from dataclasses import replace

import pytest

from src.biorobots import Schedule, SimConstants, TissueSettings, run_simulation, simulate, world_init
from src.core import ConfigError, RngStream
from src.core.rng import SIMULATION


def seed(i=0):
    return RngStream(2024, (SIMULATION, i))


def test_simulate_is_deterministic(tiny_setup, mid_design):
    counts = {simulate(mid_design, tiny_setup.constants, tiny_setup.schedule, seed(), tissue=tiny_setup.tissue)
              for _ in range(3)}
    assert len(counts) == 1
    assert counts.pop() > 0


def test_seeds_change_the_outcome(tiny_setup, mid_design):
    results = [
        run_simulation(mid_design, tiny_setup.constants, tiny_setup.schedule, seed(i), tissue=tiny_setup.tissue)
        for i in range(5)
    ]
    assert len({(r.live_cells, r.divisions, r.apoptosis_deaths) for r in results}) > 1


def test_no_treatment_returns_growth_count(tiny_setup, mid_design):
    schedule = replace(tiny_setup.schedule, treatment_duration=0.0)
    result = run_simulation(mid_design, tiny_setup.constants, schedule, seed(), tissue=tiny_setup.tissue)
    assert result.live_cells == result.growth_live_cells
    assert result.released_cargo == 0
    assert result.drug_deaths == 0
    assert result.clock == pytest.approx(schedule.growth_duration)


def test_cell_bookkeeping(tiny_setup, mid_design):
    result = run_simulation(mid_design, tiny_setup.constants, tiny_setup.schedule, seed(1), tissue=tiny_setup.tissue)
    assert result.live_cells + result.drug_deaths + result.apoptosis_deaths == result.cells_created
    assert 0 <= result.released_cargo <= tiny_setup.schedule.cargo_count
    assert 0.0 <= result.min_oxygen <= result.max_oxygen <= tiny_setup.tissue.far_field_o2


def test_drug_death_off_matches_damage_off(tiny_setup, mid_design):
    no_kill = replace(tiny_setup.constants, drug_death_rate=0.0)
    no_damage = replace(tiny_setup.constants, damage_rate=0.0)
    a = run_simulation(mid_design, no_kill, tiny_setup.schedule, seed(2), tissue=tiny_setup.tissue)
    b = run_simulation(mid_design, no_damage, tiny_setup.schedule, seed(2), tissue=tiny_setup.tissue)
    assert a.drug_deaths == b.drug_deaths == 0
    assert a.to_dict() == b.to_dict()


def test_inactive_constant_leaves_result_unchanged(tiny_setup, mid_design):
    # Receptor level 1 clears both thresholds, so attachment behaves the same
    low = replace(tiny_setup.constants, attachment_receptor_threshold=0.1)
    high = replace(tiny_setup.constants, attachment_receptor_threshold=0.5)
    a = run_simulation(mid_design, low, tiny_setup.schedule, seed(3), tissue=tiny_setup.tissue)
    b = run_simulation(mid_design, high, tiny_setup.schedule, seed(3), tissue=tiny_setup.tissue)
    assert a.to_dict() == b.to_dict()


def test_trajectory_recording(tiny_setup, mid_design):
    result = run_simulation(mid_design, tiny_setup.constants, tiny_setup.schedule, seed(),
                            tissue=tiny_setup.tissue, record=True)
    steps = int(round((tiny_setup.schedule.growth_duration + tiny_setup.schedule.treatment_duration)
                      / tiny_setup.schedule.dt_mechanics))
    assert len(result.trajectory) == steps + 1
    assert result.trajectory[0].phase == 'init'
    assert {p.phase for p in result.trajectory[1:]} == {'growth', 'treatment'}
    assert result.trajectory[-1].live_cells == result.live_cells


def test_constants_reject_unknown_override():
    with pytest.raises(ConfigError):
        SimConstants().with_overrides({'no_such_rate': 1.0})


def test_desk_injection_strip_lies_far_left_of_tumour():
    # cargo has to be carried across the gap before any drug reaches a cell
    tissue = TissueSettings()
    world = world_init(Schedule.desk(), RngStream(0), tissue=tissue)
    gap = world.cell_pos[:, 0].min() - tissue.injection_band
    assert gap > 200.0
