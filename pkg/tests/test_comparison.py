import math

import pytest

import src.objectives.evaluation as evaluation
from scripts import recompute_winners
from src.core import ConfigError, NonZeroExit
from src.services import ComparisonService, ExperimentService, ExportService
from src.services.comparison_service import TIE, decide_winner


def sphere_experiment(**extra):
    data = {
        'master_seed': 11,
        'comparison_runs': 3,
        'objective': {'kind': 'sphere', 'replicates': 5},
        'space': {'dimensions': 6},
        'de': {'population_size': 20},
        'ga': {'population_size': 20},
        'budget': {'unit': 'sim_runs', 'max': 1000},
    }
    data.update(extra)
    return ExperimentService().from_dict(data)


TINY_BIOROBOTS = {
    'master_seed': 3,
    'comparison_runs': 1,
    'objective': {'kind': 'biorobots', 'replicates': 2, 'tissue': {'domain_size': 400}},
    'schedule': {'growth_duration': 60, 'treatment_duration': 60, 'initial_tumor_radius': 60,
                 'worker_count': 10, 'cargo_count': 10},
    'de': {'population_size': 4},
    'ga': {'population_size': 4},
    'budget': {'unit': 'design_evals', 'max': 8},
}


def test_pairs_share_generation_zero():
    report = ComparisonService(sphere_experiment()).compare()
    assert len(report.pairs) == 3
    for pair in report.pairs:
        ga, de = pair.logs['ga'], pair.logs['de']
        assert [i.genome.tolist() for i in ga.initial_population()] == [i.genome.tolist() for i in de.initial_population()]
        assert ga.records[0].avg_fitness == de.records[0].avg_fitness
        assert ga.ledger.sim_runs_used == de.ledger.sim_runs_used == 1000


def test_biorobots_pair_shares_generation_zero():
    pair = ComparisonService(ExperimentService().from_dict(TINY_BIOROBOTS)).run_pair(0)
    ga, de = pair.logs['ga'], pair.logs['de']
    assert [i.fitness for i in ga.initial_population()] == [i.fitness for i in de.initial_population()]
    assert ga.ledger.design_evals_used == de.ledger.design_evals_used == 8
    assert ga.ledger.sim_runs_used == 16
    assert pair.winner() in ('ga', 'de', TIE)


def test_runs_use_different_initial_populations():
    report = ComparisonService(sphere_experiment()).compare()
    first = [p.logs['de'].initial_population()[0].genome.tolist() for p in report.pairs]
    assert len({tuple(g) for g in first}) == 3


def test_missing_ga_is_reported_absent():
    report = ComparisonService(sphere_experiment(ga={'enabled': False}, comparison_runs=1)).compare()
    summary = report.summary()
    assert summary['absent'] == ['ga']
    assert summary['runs'][0]['algorithms']['ga'] is None
    assert summary['runs'][0]['winner'] is None
    assert report.pairs[0].winner() is None


def test_unequal_population_sizes_rejected():
    config = sphere_experiment(ga={'population_size': 10})
    with pytest.raises(ConfigError):
        ComparisonService(config).run_pair(0)


def test_failed_run_invalidates_only_its_pair(monkeypatch):
    real = evaluation.evaluate_once

    def crash_run_one(spec, g, seed):
        # stream ids start with the comparison run index
        if seed.stream_id[0] == 1 and seed.stream_id[2] >= 1:
            raise NonZeroExit('node lost')
        return real(spec, g, seed)

    monkeypatch.setattr(evaluation, 'evaluate_once', crash_run_one)
    report = ComparisonService(sphere_experiment()).compare()
    status = [entry['status'] for entry in report.summary()['runs']]
    assert status == ['ok', 'failed', 'ok']
    failed = report.pairs[1]
    assert set(failed.errors) == {'ga', 'de'}
    assert failed.winner() is None
    assert [r.generation for r in failed.logs['de'].records] == [0]
    assert report.pairs[0].winner() is not None


@pytest.mark.parametrize('best, winner', [
    ({'ga': 3.0, 'de': 2.0}, 'de'),
    ({'ga': 1.0, 'de': 2.0}, 'ga'),
    ({'ga': 2.0, 'de': 2.0}, TIE),
    ({'ga': math.nan, 'de': 5.0}, 'de'),
    ({'ga': math.nan, 'de': math.inf}, None),
    ({'de': 1.0}, None),
])
def test_decide_winner(best, winner):
    assert decide_winner(best) == winner


def test_summary_counts_wins():
    report = ComparisonService(sphere_experiment()).compare()
    summary = report.summary()
    assert sum(summary['wins'].values()) == 3
    assert summary['budget'] == {'unit': 'sim_runs', 'max': 1000}
    assert summary['final_diversity']['de']['mean_pairwise_distance'] >= 0.0


def test_winners_recomputed_from_csv(tmp_path):
    report = ComparisonService(sphere_experiment(comparison_runs=4)).compare()
    ExportService(str(tmp_path)).export_report(report)
    results = recompute_winners.recompute(str(tmp_path))
    assert len(results) == 4
    for run, expected, recomputed in results:
        assert expected == recomputed
    assert recompute_winners.main([str(tmp_path)]) == 0
