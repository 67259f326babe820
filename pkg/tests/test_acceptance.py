"""Statistical studies of the simulator and the analysis against closed-form predictions."""
import math

import numpy as np
import pytest

from src.analysis.autocorrelation import estimate_autocorrelation
from src.analysis.fitting import FitMethod, fit_exponential_decay
from src.analysis.hypothesis import Verdict, qm_vs_superdet_test
from src.analysis.survival import qm_survival_oracle, survival_curve
from src.core import observable_from_angles
from src.models.quantum import QubitState, qm_same_observable_autocorr_analytic
from src.noise import DisturbanceKernel, hidden_variable_autocorrelation
from src.simulate import ModelSpec, Protocol, run_ensemble

pytestmark = pytest.mark.slow

N_SIGMA = 4.0
LARGE = 100000
MEDIUM = 10000
META_TRIALS = 100


def assert_within_errors(series, expected):
    for estimate, std_error, target in zip(series.estimates, series.std_errors, expected):
        assert abs(estimate - target) <= N_SIGMA * std_error + 1e-12


class TestQuantumPredictions:
    @pytest.mark.parametrize("theta", [0.0, math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2])
    def test_autocorrelation(self, obs_z, theta):
        protocol = Protocol(obs_z, observable_from_angles(theta, 0.0, "B"), 1.0, 22, allow_parallel=theta == 0.0)
        ens = run_ensemble(ModelSpec.quantum(QubitState.eigenstate(obs_z)), protocol, LARGE, 101, workers=4)
        series = estimate_autocorrelation(ens, "A", 10)
        assert_within_errors(series, [qm_same_observable_autocorr_analytic(protocol.theta, k) for k in series.kappas])

    @pytest.mark.parametrize("theta", [math.pi / 2, math.pi / 3])
    def test_survival(self, obs_z, theta):
        protocol = Protocol(obs_z, observable_from_angles(theta, 0.0, "B"), 1.0, 22, mode="transmissive")
        ens = run_ensemble(ModelSpec.quantum(QubitState.eigenstate(obs_z)), protocol, LARGE, 102, workers=4)
        for point in survival_curve(ens)[:11]:
            expected = qm_survival_oracle(theta, 1.0, point.kappa)
            assert abs(point.fraction - expected) <= N_SIGMA * point.std_error + 1e-12


class TestHiddenVariablePredictions:
    @pytest.mark.parametrize("tau_steps", [2.0, 10.0])
    def test_redraw_autocorrelation(self, orthogonal_protocol, tau_steps):
        model = ModelSpec.hidden_variable(tau_steps, DisturbanceKernel("redraw"))
        ens = run_ensemble(model, orthogonal_protocol, MEDIUM, 103, workers=4)
        series = estimate_autocorrelation(ens, "A", 10)
        assert_within_errors(series, [hidden_variable_autocorrelation(t, tau_steps) for t in series.lag_times])

    @pytest.mark.parametrize("method", list(FitMethod))
    def test_fit_recovers_tau(self, orthogonal_protocol, hv_model, method):
        series = estimate_autocorrelation(run_ensemble(hv_model, orthogonal_protocol, 20000, 104, workers=4), "A", 10)
        fit = fit_exponential_decay(series, method, n_bootstrap=200, seed=5)
        assert fit.tau_hat == pytest.approx(10.0, rel=0.1)
        assert fit.ci_low <= fit.tau_hat <= fit.ci_high

    def test_fit_interval_coverage(self, orthogonal_protocol, hv_model):
        covered = 0
        for seed in range(META_TRIALS):
            series = estimate_autocorrelation(run_ensemble(hv_model, orthogonal_protocol, MEDIUM, seed), "A", 10)
            covered += fit_exponential_decay(series, seed=seed).contains(10.0)
        assert covered >= 90

    def test_fast_noise_reproduces_quantum_statistics(self, orthogonal_protocol):
        model = ModelSpec.hidden_variable(1e-3, DisturbanceKernel("redraw"))
        series = estimate_autocorrelation(run_ensemble(model, orthogonal_protocol, MEDIUM, 105), "A", 5)
        assert_within_errors(series, [1.0] + [0.0] * 5)

    def test_noiseless_transmissive_survival(self, transmissive_protocol):
        ens = run_ensemble(ModelSpec.hidden_variable(math.inf), transmissive_protocol, MEDIUM, 106)
        curve = survival_curve(ens)
        assert len({point.fraction for point in curve[1:]}) == 1
        assert curve[1].fraction == pytest.approx(0.25, abs=0.02)

    def test_diffusion_decays_slower_than_redraw(self, orthogonal_protocol):
        redraw = ModelSpec.hidden_variable(5.0, DisturbanceKernel("redraw"))
        diffusion = ModelSpec.hidden_variable(5.0, DisturbanceKernel("diffusion", 0.2))
        slow = estimate_autocorrelation(run_ensemble(diffusion, orthogonal_protocol, 5000, 107), "A", 4)
        fast = estimate_autocorrelation(run_ensemble(redraw, orthogonal_protocol, 5000, 107), "A", 4)
        assert slow.estimates[4] > fast.estimates[4]


def verdicts(model, protocol, runs=MEDIUM, trials=META_TRIALS, **kwargs):
    return [qm_vs_superdet_test(run_ensemble(model, protocol, runs, seed), seed=seed, **kwargs)
            for seed in range(trials)]


class TestHypothesisCalibration:
    def test_false_rejection_rate(self, orthogonal_protocol, qm_model):
        results = verdicts(qm_model, orthogonal_protocol)
        rejections = sum(result.verdict is not Verdict.CONSISTENT_WITH_QM for result in results)
        assert rejections / META_TRIALS <= 0.1

    def test_power(self, orthogonal_protocol, hv_model):
        results = verdicts(hv_model, orthogonal_protocol)
        assert sum(result.p_value < 1e-3 for result in results) >= 99
        assert all(result.verdict is Verdict.FAVORS_SUPERDETERMINISM for result in results if result.p_value < 1e-3)

    def test_fast_noise_is_consistent_with_qm(self, orthogonal_protocol):
        model = ModelSpec.hidden_variable(0.01, DisturbanceKernel("redraw"))
        results = verdicts(model, orthogonal_protocol)
        assert sum(result.verdict is Verdict.CONSISTENT_WITH_QM for result in results) >= 90

    def test_rejection_rate_grows_with_tau(self, orthogonal_protocol):
        rates = []
        for tau_steps in (0.01, 0.1, 1.0, 10.0, 100.0):
            model = ModelSpec.hidden_variable(tau_steps, DisturbanceKernel("redraw"))
            results = verdicts(model, orthogonal_protocol, runs=100, n_bootstrap=200)
            rates.append(sum(result.p_value < 0.05 for result in results) / META_TRIALS)
        # the two fastest settings are both indistinguishable from quantum statistics
        for slower, faster in zip(rates[1:], rates):
            assert slower >= faster - 0.1
        assert rates[-1] == 1.0

    def test_p_values_are_roughly_uniform(self, orthogonal_protocol, qm_model):
        p_values = [result.p_value for result in verdicts(qm_model, orthogonal_protocol, runs=100, trials=200,
                                                          n_bootstrap=100)]
        assert np.mean(np.asarray(p_values) < 0.5) == pytest.approx(0.5, abs=0.15)
