from collections import Counter

import numpy as np
import pytest
from scipy import stats

from src.core import BudgetExhausted, ConfigError, DimensionMismatch, PopulationTooSmall, RngStream, space_new
from src.objectives import BudgetLedger
from src.optimizers import (
    Algorithm,
    GAConfig,
    TournamentMode,
    ga_generation,
    ga_mutate,
    ga_step,
    ga_tournament,
    ga_uniform_crossover,
    init_from,
)
from tests.conftest import make_sphere


def test_select_tournament_returns_best_candidate(rng):
    assert ga_tournament([3.0, 1.0, 2.0], 2, rng, TournamentMode.SELECT, exclude={2}) == 1


def test_replace_tournament_returns_worst_candidate(rng):
    assert ga_tournament([3.0, 1.0, 2.0], 2, rng, 'replace', exclude={2}) == 0


def test_tournament_non_finite_ranks_last(rng):
    fitness = [float('nan'), 1.0]
    assert ga_tournament(fitness, 2, rng, 'select') == 1
    assert ga_tournament(fitness, 2, rng, 'replace') == 0


def test_single_candidate_tournament_is_uniform():
    gen = np.random.default_rng(9)
    fitness = np.arange(20.0)
    counts = Counter(ga_tournament(fitness, 1, gen) for _ in range(100_000))
    observed = np.array([counts[i] for i in range(20)])
    assert stats.chisquare(observed).pvalue > 0.001


def test_tournament_larger_than_population(rng):
    with pytest.raises(PopulationTooSmall):
        ga_tournament([1.0, 2.0], 3, rng)
    with pytest.raises(PopulationTooSmall):
        ga_tournament([1.0, 2.0], 2, rng, exclude={0})


def test_tournament_size_must_be_positive(rng):
    with pytest.raises(ConfigError):
        ga_tournament([1.0, 2.0], 0, rng)


def test_no_crossover_copies_first_parent(rng):
    p1, p2 = np.zeros(6), np.ones(6)
    for _ in range(50):
        assert ga_uniform_crossover(p1, p2, 0.0, rng).tolist() == p1.tolist()


def test_identical_parents(rng):
    p = np.arange(6.0)
    assert ga_uniform_crossover(p, p, 1.0, rng).tolist() == p.tolist()


def test_mixed_children_fraction():
    gen = np.random.default_rng(5)
    D, X, n = 6, 0.8, 100_000
    p1, p2 = np.zeros(D), np.ones(D)
    mixed = 0
    for _ in range(n):
        child = ga_uniform_crossover(p1, p2, X, gen)
        if 0 < child.sum() < D:
            mixed += 1
    lo, hi = stats.binom.interval(0.999, n, X * (1 - 2 * 0.5 ** D))
    assert lo <= mixed <= hi


def test_crossover_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        ga_uniform_crossover([0.0], [0.0, 1.0], 0.5, rng)


def test_zero_rate_mutation_is_identity(rng):
    space = space_new([(0, 10)] * 6)
    g = np.full(6, 4.0)
    assert ga_mutate(g, 0.0, (-0.05, 0.05), space, rng).tolist() == g.tolist()


def test_full_mutation_at_upper_bound_is_clamped(rng):
    space = space_new([(0, 1), (0, 10), (0, 20)])
    for _ in range(200):
        child = ga_mutate(space.upper, 1.0, (-0.05, 0.05), space, rng)
        assert np.all(child <= space.upper)
        assert np.all(child >= space.upper - 0.05 * space.width)


def test_mutation_rate_matches_binomial():
    gen = np.random.default_rng(6)
    space = space_new([(0, 1)] * 10)
    g = np.full(10, 0.5)
    n = 10_000
    changed = sum(int(np.count_nonzero(ga_mutate(g, 0.2, (-0.05, 0.05), space, gen) != g)) for _ in range(n))
    lo, hi = stats.binom.interval(0.999, n * 10, 0.2)
    assert lo <= changed <= hi


def test_mutation_steps_scale_with_range(rng):
    space = space_new([(0, 1), (0, 100)])
    g = np.array([0.5, 50.0])
    for _ in range(200):
        delta = np.abs(ga_mutate(g, 1.0, (-0.05, 0.05), space, rng) - g)
        assert delta[0] <= 0.05 + 1e-12 and delta[1] <= 5.0 + 1e-9


def test_config_validation():
    with pytest.raises(PopulationTooSmall):
        GAConfig(population_size=2, tournament_size=2)
    with pytest.raises(ConfigError):
        GAConfig(mutation_rate=1.2)
    with pytest.raises(ConfigError):
        GAConfig(mutation_step=(0.05, -0.05))


def ga_state(P, seed, budget):
    objective = make_sphere()
    ledger = BudgetLedger(budget, replicates=1)
    gen = np.random.default_rng(seed)
    genomes = [gen.uniform(objective.space.lower, objective.space.upper) for _ in range(P)]
    state = init_from(genomes, objective, ledger, RngStream(seed), Algorithm.GA)
    return objective, ledger, state


def test_generation_of_steps_consumes_p_evaluations():
    objective, ledger, state = ga_state(20, 1, 60)
    ga_generation(state, objective, ledger, RngStream(1), GAConfig())
    assert ledger.design_evals_used == 40
    assert state.steps == 20
    assert state.generation == 1
    assert len(state.history) == 40
    assert [ind.index for ind in state.history[20:]] == list(range(20))


def test_elitism_keeps_best_in_population():
    objective, ledger, state = ga_state(20, 2, 20 + 400)
    root = RngStream(2)
    best = [state.fitness_values().min()]
    for _ in range(400):
        ga_step(state, objective, ledger, root, GAConfig())
        best.append(state.fitness_values().min())
        assert state.best_ever.value == best[-1]
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_better_child_does_not_raise_mean():
    objective, ledger, state = ga_state(20, 3, 20 + 200)
    root = RngStream(3)
    for _ in range(200):
        before = list(state.population)
        ga_step(state, objective, ledger, root, GAConfig())
        changed = [i for i, (a, b) in enumerate(zip(before, state.population)) if a is not b]
        assert len(changed) == 1
        slot = changed[0]
        if state.population[slot].value < before[slot].value:
            assert state.fitness_values().mean() <= np.mean([ind.value for ind in before])


def test_step_without_budget():
    objective, ledger, state = ga_state(4, 4, 4)
    with pytest.raises(BudgetExhausted):
        ga_step(state, objective, ledger, RngStream(4), GAConfig(population_size=4))
