import math

import numpy as np
import pytest

from src.analysis.autocorrelation import CorrSeries, estimate_autocorrelation
from src.analysis.fitting import FitMethod, fit_exponential_decay
from src.errors import InadequateDataError, NoDecaySignalError
from src.simulate import run_ensemble


def exact_series(tau, n=11, spacing=1.0):
    return CorrSeries.from_values([math.exp(-k * spacing / tau) for k in range(n)], spacing=spacing)


class TestExactCurves:
    @pytest.mark.parametrize("method", list(FitMethod))
    def test_recovers_tau(self, method):
        fit = fit_exponential_decay(exact_series(5.0), method)
        assert fit.tau_hat == pytest.approx(5.0, rel=1e-6)
        assert fit.ci_low <= fit.tau_hat <= fit.ci_high
        assert not fit.degenerate

    def test_physical_units(self):
        fit = fit_exponential_decay(exact_series(20.0, spacing=2.0), FitMethod.LOG_LINEAR)
        assert fit.tau_hat == pytest.approx(20.0)
        assert fit.tau_in_kappa == pytest.approx(10.0)

    @pytest.mark.parametrize("method", list(FitMethod))
    def test_flat_series_is_degenerate(self, method):
        fit = fit_exponential_decay(CorrSeries.from_values([1.0] * 6), method)
        assert fit.degenerate
        assert math.isinf(fit.tau_hat)
        assert fit.predict([0.0, 5.0]).tolist() == [1.0, 1.0]


class TestFailures:
    def test_no_positive_estimate(self):
        with pytest.raises(NoDecaySignalError):
            fit_exponential_decay(CorrSeries.from_values([-0.1, -0.2, -0.3]))

    def test_too_few_positive_estimates(self):
        with pytest.raises(InadequateDataError):
            fit_exponential_decay(CorrSeries.from_values([1.0, 0.5, -0.1]), FitMethod.LOG_LINEAR)


class TestBootstrap:
    def test_interval_brackets_estimate(self, orthogonal_protocol, hv_model):
        series = estimate_autocorrelation(run_ensemble(hv_model, orthogonal_protocol, 2000, 6), "A", 8)
        fit = fit_exponential_decay(series, n_bootstrap=200, seed=3)
        assert fit.ci_low <= fit.tau_hat <= fit.ci_high
        assert fit.ci_low < fit.ci_high
        assert fit.n_bootstrap == 200

    def test_seeded(self, orthogonal_protocol, hv_model):
        series = estimate_autocorrelation(run_ensemble(hv_model, orthogonal_protocol, 500, 6), "A", 8)
        assert fit_exponential_decay(series, n_bootstrap=100, seed=1) == fit_exponential_decay(series, n_bootstrap=100, seed=1)

    def test_gaussian_errors(self):
        series = CorrSeries.from_values([math.exp(-k / 4.0) for k in range(8)], [0.01] * 8)
        fit = fit_exponential_decay(series, FitMethod.MLE, n_bootstrap=200, seed=2)
        assert fit.tau_hat == pytest.approx(4.0, rel=1e-4)
        assert fit.contains(4.0)


class TestLogLinearCut:
    def test_stops_at_first_insignificant_estimate(self):
        series = CorrSeries.from_values([1.0, 0.5, 0.25, 0.01, 0.2], [0.0, 0.01, 0.01, 0.01, 0.01])
        fit = fit_exponential_decay(series, FitMethod.LOG_LINEAR, n_bootstrap=0)
        assert fit.tau_hat == pytest.approx(1.0 / math.log(2.0))

    def test_uncorrelated_data_has_no_fit(self, orthogonal_protocol, qm_model):
        series = estimate_autocorrelation(run_ensemble(qm_model, orthogonal_protocol, 2000, 1), "A", 10)
        with pytest.raises(InadequateDataError):
            fit_exponential_decay(series, FitMethod.LOG_LINEAR)

    def test_default_fit_of_uncorrelated_data_is_short(self, orthogonal_protocol, qm_model):
        series = estimate_autocorrelation(run_ensemble(qm_model, orthogonal_protocol, 2000, 1), "A", 10)
        fit = fit_exponential_decay(series, n_bootstrap=200)
        assert fit.method is FitMethod.MLE
        assert fit.tau_hat < series.spacing


@pytest.mark.slow
def test_interval_coverage():
    rng = np.random.default_rng(2024)
    kappas = np.arange(21)
    covered = 0
    for _ in range(100):
        values = np.exp(-kappas / 5.0) + np.where(kappas > 0, rng.normal(0.0, 0.01, len(kappas)), 0.0)
        series = CorrSeries.from_values(values, [0.0] + [0.01] * 20)
        covered += fit_exponential_decay(series, n_bootstrap=1000, seed=int(rng.integers(2 ** 32))).contains(5.0)
    assert covered >= 90
