import math

import pytest

from src.analysis.survival import qm_survival_oracle, survival_curve
from src.errors import InvalidArgumentError
from src.simulate import ModelSpec, run_ensemble


class TestSurvival:
    def test_starts_with_the_first_pass(self, transmissive_protocol, qm_model):
        curve = survival_curve(run_ensemble(qm_model, transmissive_protocol, 500, 3))
        assert len(curve) == 22
        assert curve[0].fraction == 1.0
        assert curve[0].std_error == 0.0

    def test_non_increasing(self, transmissive_protocol, qm_model):
        curve = survival_curve(run_ensemble(qm_model, transmissive_protocol, 500, 3))
        fractions = [point.fraction for point in curve]
        assert fractions == sorted(fractions, reverse=True)

    def test_noiseless_hidden_variable_is_flat_after_both_observables(self, transmissive_protocol):
        curve = survival_curve(run_ensemble(ModelSpec.hidden_variable(math.inf), transmissive_protocol, 2000, 8))
        assert len({point.fraction for point in curve[1:]}) == 1
        assert curve[1].fraction == pytest.approx(0.25, abs=0.05)

    def test_requires_transmissive(self, orthogonal_protocol, qm_model):
        with pytest.raises(InvalidArgumentError):
            survival_curve(run_ensemble(qm_model, orthogonal_protocol, 10, 3))


def test_oracle():
    assert qm_survival_oracle(math.pi / 2, 1.0, 3) == pytest.approx(0.125)
    assert qm_survival_oracle(0.0, 0.5, 4) == 0.5
