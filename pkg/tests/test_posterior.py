import numpy as np
import pytest

from src.analysis.posterior import constraints_from_record, posterior_mean_direction, posterior_samples, \
    posterior_support_fraction
from src.core import Outcome, observable_from_angles
from src.errors import InvalidArgumentError
from src.simulate import run_sequence

N_SAMPLES = 200000


@pytest.fixture
def obs_y():
    return observable_from_angles(np.pi / 2, np.pi / 2, "C")


class TestSupportFraction:
    def test_one_outcome_halves(self, obs_z):
        estimate = posterior_support_fraction([(obs_z, Outcome.PLUS)], N_SAMPLES, np.random.default_rng(1))
        assert estimate.fraction == pytest.approx(0.5, abs=0.01)
        assert estimate.std_error == pytest.approx(np.sqrt(0.25 / N_SAMPLES), rel=0.05)

    def test_orthogonal_outcomes_quarter(self, obs_z, obs_x):
        constraints = [(obs_z, Outcome.PLUS), (obs_x, Outcome.MINUS)]
        estimate = posterior_support_fraction(constraints, N_SAMPLES, np.random.default_rng(2))
        assert estimate.fraction == pytest.approx(0.25, abs=0.01)

    def test_three_axes_eighth(self, obs_z, obs_x, obs_y):
        constraints = [(obs_z, Outcome.PLUS), (obs_x, Outcome.PLUS), (obs_y, Outcome.PLUS)]
        estimate = posterior_support_fraction(constraints, N_SAMPLES, np.random.default_rng(3))
        assert estimate.fraction == pytest.approx(0.125, abs=0.01)

    def test_repeated_outcome_changes_nothing(self, obs_z):
        constraints = [(obs_z, Outcome.PLUS), (obs_z, Outcome.PLUS)]
        estimate = posterior_support_fraction(constraints, N_SAMPLES, np.random.default_rng(1))
        assert estimate.fraction == pytest.approx(0.5, abs=0.01)

    def test_contradiction_is_empty(self, obs_z):
        estimate = posterior_support_fraction([(obs_z, Outcome.PLUS), (obs_z, Outcome.MINUS)], 100,
                                              np.random.default_rng(0))
        assert estimate.fraction == 0.0
        assert estimate.empty_region

    def test_antipodal_contradiction(self, obs_z):
        estimate = posterior_support_fraction([(obs_z, Outcome.PLUS), (obs_z.negated(), Outcome.PLUS)], 100,
                                              np.random.default_rng(0))
        assert estimate.empty_region

    def test_requires_constraints(self):
        with pytest.raises(InvalidArgumentError):
            posterior_support_fraction([], 100, np.random.default_rng(0))


class TestPosteriorSamples:
    def test_samples_satisfy_constraints(self, obs_z, obs_x):
        samples = posterior_samples([(obs_z, Outcome.MINUS), (obs_x, Outcome.PLUS)], 5000, np.random.default_rng(4))
        assert len(samples) > 0
        assert np.all(samples[:, 2] < 0)
        assert np.all(samples[:, 0] >= 0)

    def test_mean_direction_of_hemisphere(self, obs_z):
        mean = posterior_mean_direction([(obs_z, Outcome.MINUS)], N_SAMPLES, np.random.default_rng(5))
        assert mean == pytest.approx([0.0, 0.0, -0.5], abs=0.01)

    def test_record_constraints(self, orthogonal_protocol, qm_model):
        record = run_sequence(qm_model, orthogonal_protocol, (0, 0))
        constraints = constraints_from_record(record, orthogonal_protocol)
        assert len(constraints) == 22
        assert constraints[0] == (orthogonal_protocol.obs_a, Outcome(int(record.values[0])))
        assert constraints[1][0] == orthogonal_protocol.obs_b
