import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import src.objectives.evaluation as evaluation
from src.core import AuditFailure, ConfigError, NonZeroExit, OutOfBoundsGenome, RngStream, RunAborted
from src.core.rng import INIT
from src.objectives import BudgetUnit, ObjectiveKind, ObjectiveSpec, benchmark_space
from src.optimizers import Budget, DEConfig, GAConfig, audit_run_log, init_population, run
from tests.conftest import make_sphere


def rastrigin6():
    return ObjectiveSpec(ObjectiveKind.RASTRIGIN, benchmark_space(6), replicates=1)


def log_fingerprint(log):
    return (
        [(ind.genome.tolist(), ind.value, ind.generation, ind.index) for ind in log.history],
        [(r.generation, r.avg_fitness, r.best_fitness, r.diversity.mean_pairwise_distance) for r in log.records],
    )


@pytest.mark.parametrize('algorithm', ['de', 'ga'])
def test_budget_of_two_populations_gives_generation_zero_and_one(algorithm):
    log = run(algorithm, make_sphere(), Budget(40), 1)
    assert [r.generation for r in log.records] == [0, 1]
    assert log.ledger.design_evals_used == 40


@pytest.mark.parametrize('algorithm', ['de', 'ga'])
def test_budget_equal_to_population_only_evaluates_generation_zero(algorithm):
    log = run(algorithm, make_sphere(), Budget(20), 1)
    assert [r.generation for r in log.records] == [0]
    assert log.ledger.design_evals_used == 20
    assert len(log.final_population) == 20
    assert all(ind.generation == 0 for ind in log.history)


def test_zero_budget_gives_empty_log(sphere6):
    log = run('de', sphere6, 0, 1)
    assert log.records == [] and log.history == []
    assert math.isnan(log.best_fitness)


def test_budget_below_population_is_a_config_error(sphere6):
    with pytest.raises(ConfigError):
        run('de', sphere6, 10, 1)


def test_sim_run_budget_is_converted(sphere6):
    objective = make_sphere(replicates=5)
    log = run('de', objective, Budget(1000, BudgetUnit.SIM_RUNS), 3)
    assert log.ledger.design_evals_used == 200
    assert log.ledger.sim_runs_used == 1000
    assert log.records[-1].generation == 9


def test_partial_last_generation_is_flagged(sphere6):
    log = run('de', sphere6, 50, 2)
    assert [r.partial for r in log.records] == [False, False, True]
    assert log.records[-1].evaluations == 50
    assert len(log.history) == 50


def test_shared_population_gives_identical_generation_zero():
    objective = make_sphere(replicates=3)
    root = RngStream(42, (0,))
    initial = init_population(objective.space, 20, root.child(INIT))
    de = run('de', objective, 100, root, initial_population=initial)
    ga = run('ga', objective, 100, root, initial_population=initial)
    rnd = run('random', objective, 100, root, initial_population=initial)
    assert de.records[0].avg_fitness == ga.records[0].avg_fitness == rnd.records[0].avg_fitness
    for a, b in zip(de.initial_population(), ga.initial_population()):
        assert a.genome.tolist() == b.genome.tolist()
        assert a.fitness.replicate_seeds == b.fitness.replicate_seeds


def test_initial_population_size_must_match(sphere6):
    initial = init_population(sphere6.space, 10, RngStream(0))
    with pytest.raises(ConfigError):
        run('de', sphere6, 100, 0, initial_population=initial)


def test_initial_population_must_be_feasible(sphere6):
    initial = [np.full(6, 6.0)] * 20
    with pytest.raises(OutOfBoundsGenome):
        run('de', sphere6, 100, 0, initial_population=initial)


@pytest.mark.parametrize('algorithm', ['de', 'ga', 'random'])
@pytest.mark.parametrize('objective', [make_sphere(), rastrigin6()], ids=['sphere', 'rastrigin'])
def test_best_fitness_never_increases(algorithm, objective):
    for seed in range(20):
        log = run(algorithm, objective, 200, seed)
        best = [r.best_fitness for r in log.records]
        assert all(b <= a for a, b in zip(best, best[1:]))
        assert best[-1] == log.best_fitness
        assert len(log.history) == log.ledger.design_evals_used == 200


def test_de_improves_on_its_initial_population():
    for seed in range(20):
        log = run('de', make_sphere(), 200, seed)
        assert log.records[-1].best_fitness < log.records[0].best_fitness


def test_de_beats_random_sampling_on_sphere():
    de_best, random_best = [], []
    for seed in range(20):
        root = RngStream(seed, (0,))
        initial = init_population(benchmark_space(6), 20, root.child(INIT))
        de_best.append(run('de', make_sphere(), 200, root, initial_population=initial).best_fitness)
        random_best.append(run('random', make_sphere(), 200, root, initial_population=initial).best_fitness)
    assert np.median(de_best) < np.median(random_best)


@pytest.mark.parametrize('algorithm', ['de', 'ga'])
def test_replay_is_bit_identical(algorithm):
    objective = make_sphere(replicates=2)
    first = run(algorithm, objective, 220, 77)
    second = run(algorithm, objective, 220, 77)
    assert log_fingerprint(first) == log_fingerprint(second)


def test_concurrent_evaluation_matches_serial():
    objective = make_sphere(replicates=4)
    serial = run('de', objective, 100, 5)
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = run('de', objective, 100, 5, executor=pool)
    assert log_fingerprint(serial) == log_fingerprint(threaded)


def test_failure_mid_run_keeps_partial_log(monkeypatch):
    real = evaluation.evaluate_once

    def fail_from_generation_two(spec, g, seed):
        # evaluation stream ids are (EVALUATION, generation, index, replicate, ...)
        if seed.stream_id[1] >= 2:
            raise NonZeroExit('simulated crash')
        return real(spec, g, seed)

    monkeypatch.setattr(evaluation, 'evaluate_once', fail_from_generation_two)
    with pytest.raises(RunAborted) as excinfo:
        run('de', make_sphere(), 200, 8)
    partial = excinfo.value.partial_log
    assert [r.generation for r in partial.records] == [0, 1]
    assert len(partial.history) == 40
    assert partial.ledger.design_evals_used == 40


def test_audit_detects_inconsistent_log(sphere6):
    log = run('de', sphere6, 60, 4)
    audit_run_log(log)
    log.history.pop()
    with pytest.raises(AuditFailure):
        audit_run_log(log)


def test_custom_configs_are_honoured():
    objective = make_sphere()
    log = run('ga', objective, 60, 1, ga_config=GAConfig(population_size=10))
    assert log.population_size == 10
    assert [r.generation for r in log.records] == list(range(6))
    log = run('de', objective, 60, 1, de_config=DEConfig(population_size=6, repair='reflect'))
    assert [r.generation for r in log.records] == list(range(10))
