import json
import math
import os

import numpy as np
import pandas as pd
import pytest

from src.biorobots import run_simulation
from src.core import ExportError, RngStream
from src.objectives import ObjectiveKind, ObjectiveSpec, benchmark_space
from src.optimizers import RunLog, run
from src.services import ComparisonService, ExperimentService, ExportService
from src.services.comparison_service import ComparisonReport, RunPair
from src.services.export_service import json_safe
from tests.conftest import make_sphere


def read(path):
    return pd.read_csv(path, float_precision='round_trip')


def test_empty_log_writes_headers_only(tmp_path):
    log = run('de', make_sphere(replicates=2), 0, 1)
    paths = ExportService(str(tmp_path)).export_run_log(log)
    convergence, history, final = (read(p) for p in paths)
    assert len(convergence) == len(history) == len(final) == 0
    assert list(convergence.columns)[:3] == ['generation', 'avg_fitness', 'best_fitness']
    assert list(history.columns) == (['individual', 'algorithm', 'generation', 'index']
                                     + [f'x{d}' for d in range(6)]
                                     + ['fitness', 'rep_0', 'rep_1', 'seed_0', 'seed_1'])


def test_history_round_trips(tmp_path):
    log = run('de', make_sphere(replicates=2), 40, 5)
    _, history_path, final_path = ExportService(str(tmp_path)).export_run_log(log, run_index=3)
    assert os.path.basename(history_path) == 'history_de_3.csv'
    history = read(history_path)
    assert len(history) == log.ledger.design_evals_used == 40
    genomes = history[[f'x{d}' for d in range(6)]].to_numpy()
    np.testing.assert_array_equal(genomes, np.vstack([ind.genome for ind in log.history]))
    assert history['fitness'].tolist() == [ind.value for ind in log.history]
    assert history['seed_1'].tolist() == [ind.fitness.replicate_seeds[1] for ind in log.history]


def test_convergence_matches_final_population(tmp_path):
    log = run('ga', make_sphere(), 60, 6)
    convergence_path, _, final_path = ExportService(str(tmp_path)).export_run_log(log)
    convergence = read(convergence_path)
    final = read(final_path)
    assert convergence['generation'].tolist() == [0, 1, 2]
    assert abs(convergence['avg_fitness'].iloc[-1] - math.fsum(final['fitness']) / len(final)) <= 1e-12
    assert convergence['best_fitness'].is_monotonic_decreasing


def test_report_json(tmp_path):
    config = ExperimentService().from_dict({
        'comparison_runs': 1,
        'objective': {'kind': 'sphere', 'replicates': 1},
        'de': {'population_size': 4}, 'ga': {'population_size': 4},
        'budget': {'max': 8},
    })
    report = ComparisonService(config).compare()
    paths = ExportService(str(tmp_path)).export_report(report)
    assert len(paths) == 7
    with open(tmp_path / 'report.json', encoding='utf-8') as f:
        document = json.load(f)
    assert set(document) == {'summary', 'config'}
    assert document['summary']['runs'][0]['status'] == 'ok'
    assert document['config']['budget'] == {'unit': 'design_evals', 'max': 8}


def test_non_finite_values_become_null():
    cleaned = json_safe({'a': math.nan, 'b': [math.inf, 1.5], 'c': np.float64(2.0), 'd': np.int64(3)})
    assert cleaned == {'a': None, 'b': [None, 1.5], 'c': 2.0, 'd': 3}
    json.dumps(cleaned, allow_nan=False)


def test_single_run_summary(tmp_path):
    log = run('de', make_sphere(), 40, 2)
    ExportService(str(tmp_path)).export_single_run(log, {'note': 'x'})
    with open(tmp_path / 'run.json', encoding='utf-8') as f:
        summary = json.load(f)
    assert summary['best_fitness'] == log.best_fitness
    assert summary['ledger']['design_evals_used'] == 40
    assert list(summary['best_genome']) == [f'x{d}' for d in range(6)]


def test_simulation_export(tmp_path, tiny_setup, mid_design):
    result = run_simulation(mid_design, tiny_setup.constants, tiny_setup.schedule, RngStream(1),
                            tissue=tiny_setup.tissue, record=True)
    ExportService(str(tmp_path)).export_simulation(result, mid_design, 1)
    trajectory = read(tmp_path / 'simulation.csv')
    assert len(trajectory) == len(result.trajectory)
    assert trajectory['live_cells'].iloc[-1] == result.live_cells
    with open(tmp_path / 'simulation.json', encoding='utf-8') as f:
        summary = json.load(f)
    assert summary['seed'] == 1
    assert summary['design']['cargo_release_o2_threshold'] == 10.0


def test_unwritable_directory_raises_export_error(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('x')
    log = RunLog('de', benchmark_space(2), 4, 1)
    with pytest.raises(ExportError):
        ExportService(str(blocker / 'sub')).export_run_log(log)


def test_failed_pair_still_exports(tmp_path):
    log = run('de', ObjectiveSpec(ObjectiveKind.SPHERE, benchmark_space(6), replicates=1), 20, 0)
    config = ExperimentService().from_dict({
        'comparison_runs': 1, 'objective': {'kind': 'sphere', 'replicates': 1}, 'ga': None,
    })
    report = ComparisonReport(config, [RunPair(0, {'de': log}, {'de': 'crash'})])
    ExportService(str(tmp_path)).export_report(report)
    with open(tmp_path / 'report.json', encoding='utf-8') as f:
        document = json.load(f)
    assert document['summary']['runs'][0]['status'] == 'failed'
