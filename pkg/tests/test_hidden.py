import numpy as np
import pytest

from src.core import Outcome, observable_from_angles
from src.errors import InvalidArgumentError
from src.models.hidden import SIGN_RULE, HiddenVariable, get_outcome_rule, hv_outcome


class TestSignRule:
    def test_sign_of_projection(self, obs_z):
        assert hv_outcome(HiddenVariable((0.0, 0.6, 0.8)), obs_z) is Outcome.PLUS
        assert hv_outcome(HiddenVariable((0.0, 0.6, -0.8)), obs_z) is Outcome.MINUS

    def test_tie_resolves_to_plus(self, obs_z):
        assert hv_outcome(HiddenVariable((1.0, 0.0, 0.0)), obs_z) is Outcome.PLUS

    def test_deterministic(self, obs_x):
        hv = HiddenVariable((0.48, 0.6, 0.64))
        assert len({hv_outcome(hv, obs_x) for _ in range(10)}) == 1

    def test_vectorised_matches_scalar(self):
        rng = np.random.default_rng(3)
        lambdas = rng.standard_normal((200, 3))
        lambdas /= np.linalg.norm(lambdas, axis=1)[:, None]
        obs = observable_from_angles(1.1, 0.4, "B")
        expected = [int(SIGN_RULE.outcome(HiddenVariable(tuple(row)), obs)) for row in lambdas]
        assert SIGN_RULE.outcomes(lambdas, obs.direction).tolist() == expected


def test_hidden_variable_must_be_unit():
    with pytest.raises(InvalidArgumentError):
        HiddenVariable((0.0, 0.0, 2.0))


def test_outcome_rule_registry():
    assert get_outcome_rule("sign") is SIGN_RULE
    with pytest.raises(InvalidArgumentError):
        get_outcome_rule("cubic")
