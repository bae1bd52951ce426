import math
import sys
import textwrap

import pytest

from src.core import ConfigError, EvaluatorTimeout, NonZeroExit, ProtocolError, RngStream, space_new
from src.objectives import BudgetLedger, ObjectiveKind, ObjectiveSpec, evaluate_mean
from src.objectives.external_evaluator import (
    ExternalEvaluator,
    ExternalEvaluatorConfig,
    decode_response,
    encode_request,
    external_evaluate,
)


@pytest.fixture
def identity_evaluator(tmp_path):
    """A script answering with the first gene, or under a misspelt key when asked to."""
    script = tmp_path / 'identity.py'
    script.write_text(textwrap.dedent('''
        import json, os, sys
        request = json.loads(sys.stdin.readline())
        key = os.environ.get("FITNESS_KEY", "fitness")
        print(json.dumps({key: request["genome"][0], "seed": request["seed"]}))
    '''))

    def build(**env):
        return ExternalEvaluatorConfig(command=(sys.executable, str(script)), timeout_s=30.0,
                                       env=tuple(env.items()) or None)
    return build


def test_identity_evaluator(identity_evaluator):
    assert external_evaluate(identity_evaluator(), [7.5], 1) == 7.5


def test_misspelt_key_is_a_protocol_error(identity_evaluator):
    with pytest.raises(ProtocolError):
        external_evaluate(identity_evaluator(FITNESS_KEY='fitnes'), [7.5], 1)


def test_echo_evaluator_returns_sphere(echo_config):
    assert external_evaluate(echo_config(), [1.0, 2.0], 0) == 5.0


def test_noise_is_seeded(echo_config):
    cfg = echo_config('--noise', '1.0')
    a = external_evaluate(cfg, [1.0], 123)
    assert a == external_evaluate(cfg, [1.0], 123)
    assert a != external_evaluate(cfg, [1.0], 124)


def test_malformed_output(echo_config):
    with pytest.raises(ProtocolError):
        external_evaluate(echo_config('--malformed'), [1.0], 0)


def test_non_zero_exit(echo_config):
    with pytest.raises(NonZeroExit):
        external_evaluate(echo_config('--exit-code', '3'), [1.0], 0)


def test_timeout(echo_config):
    with pytest.raises(EvaluatorTimeout):
        external_evaluate(echo_config('--sleep', '5', timeout_s=0.5), [1.0], 0)


def test_nan_fitness_is_passed_through(echo_config):
    assert math.isnan(external_evaluate(echo_config('--nan'), [1.0], 0))


def test_missing_command():
    with pytest.raises(NonZeroExit):
        ExternalEvaluator(ExternalEvaluatorConfig(command=('/nonexistent/evaluator',))).evaluate([0.0], 0)


def test_failed_evaluation_consumes_no_budget(echo_config):
    spec = ObjectiveSpec(ObjectiveKind.EXTERNAL, space_new([(0, 1)]), replicates=2,
                         params=echo_config('--sleep', '5', timeout_s=0.5), retries=0)
    ledger = BudgetLedger(4, replicates=2)
    with pytest.raises(EvaluatorTimeout):
        evaluate_mean(spec, [0.5], RngStream(0), ledger)
    assert ledger.design_evals_used == 0
    assert ledger.sim_runs_used == 0


def test_external_objective_averages_replicates(echo_config):
    spec = ObjectiveSpec(ObjectiveKind.EXTERNAL, space_new([(0, 1), (0, 1)]), replicates=2, params=echo_config())
    fit = evaluate_mean(spec, [0.5, 0.5], RngStream(0), BudgetLedger(1, replicates=2))
    assert fit.value == 0.5
    assert fit.replicate_values == (0.5, 0.5)


def test_request_encoding():
    assert encode_request([1, 2.5], 7) == '{"genome": [1.0, 2.5], "seed": 7}\n'


@pytest.mark.parametrize('text', ['', '\n\n', 'nope', '[1, 2]', '{"fitness": "low"}', '{"fitness": true}'])
def test_bad_responses(text):
    with pytest.raises(ProtocolError):
        decode_response(text)


def test_first_non_empty_line_wins():
    assert decode_response('\n{"fitness": 3}\n{"fitness": 4}\n') == 3.0


def test_config_from_dict():
    cfg = ExternalEvaluatorConfig.from_dict({'command': 'python eval.py --fast', 'timeout_s': 5,
                                             'env': {'B': 2, 'A': 1}})
    assert cfg.command == ('python', 'eval.py', '--fast')
    assert cfg.env == (('A', '1'), ('B', '2'))
    with pytest.raises(ConfigError):
        ExternalEvaluatorConfig.from_dict({'command': ''})
    with pytest.raises(ConfigError):
        ExternalEvaluatorConfig.from_dict({'command': 'x', 'timeout_s': 0})
