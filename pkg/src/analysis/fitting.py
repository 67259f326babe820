"""Exponential-decay fits Corr = exp(-t / tau) with parametric-bootstrap confidence intervals."""
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from src.analysis.autocorrelation import CorrSeries, Estimator
from src.errors import InadequateDataError, NoDecaySignalError, SuperdetError
from src.logger import logger

DEFAULT_BOOTSTRAP = 1000
FLAT_TOLERANCE = 1e-12
SIGNIFICANCE = 2.0


class FitMethod(str, Enum):
    LOG_LINEAR = "log_linear"
    MLE = "mle"


@dataclass(frozen=True)
class Goodness:
    """Residual summary of a fit."""
    chi_square: float
    dof: int
    rms_residual: float


@dataclass(frozen=True)
class FitResult:
    """
    Fitted autocorrelation time in the units of `kappa * spacing` (seconds for protocol data).

    `degenerate` is set when the data show no decay, in which case tau_hat is +inf.
    """
    tau_hat: float
    ci_low: float
    ci_high: float
    method: FitMethod
    goodness: Goodness
    degenerate: bool = False
    confidence: float = 0.95
    n_bootstrap: int = DEFAULT_BOOTSTRAP
    n_bootstrap_failed: int = 0
    spacing: float = 1.0

    @property
    def tau_in_kappa(self) -> float:
        """tau_hat in units of repetitions of the observable."""
        return self.tau_hat / self.spacing

    def contains(self, tau: float) -> bool:
        return self.ci_low <= tau <= self.ci_high

    def predict(self, lag_times) -> np.ndarray:
        t = np.asarray(lag_times, dtype=np.float64)
        if math.isinf(self.tau_hat):
            return np.ones_like(t)
        return np.exp(-t / self.tau_hat)


def _is_flat(y: np.ndarray) -> bool:
    return bool(np.all(np.abs(y - 1.0) <= FLAT_TOLERANCE))


def _relative_weights(y: np.ndarray, se: np.ndarray) -> np.ndarray:
    relative = se / y
    positive = relative[relative > 0]
    if len(positive) == 0:
        return np.ones_like(y)
    relative = np.where(relative > 0, relative, positive.min())
    return 1.0 / relative ** 2


def _significant_length(y: np.ndarray, se: np.ndarray) -> int:
    """Length of the leading run of estimates more than SIGNIFICANCE standard errors above zero."""
    weak = np.flatnonzero(y <= SIGNIFICANCE * se)
    return int(weak[0]) if len(weak) else len(y)


def _fit_log_linear(x: np.ndarray, y: np.ndarray, se: np.ndarray) -> float:
    if not np.any(y > 0):
        raise NoDecaySignalError("all correlation estimates are non-positive")
    # only the leading run of significant estimates enters the regression
    keep = _significant_length(y, se)
    if keep < 3:
        raise InadequateDataError(f"log-linear fit needs at least 3 leading significantly positive estimates "
                                  f"(got {keep})")
    x, y, se = x[:keep], y[:keep], se[:keep]
    if _is_flat(y):
        return math.inf

    use = x > 0
    log_y = np.log(y[use])
    weights = _relative_weights(y[use], se[use])
    slope = np.sum(weights * x[use] * log_y) / np.sum(weights * x[use] ** 2)
    if slope >= 0:
        return math.inf
    return float(-1.0 / slope)


def _decay(x, rate):
    return np.exp(-rate * x)


def _fit_mle(x: np.ndarray, y: np.ndarray, se: np.ndarray) -> float:
    if not np.any(y > 0):
        raise NoDecaySignalError("all correlation estimates are non-positive")
    if _is_flat(y):
        return math.inf

    positive_se = se[se > 0]
    sigma = np.where(se > 0, se, positive_se.min()) if len(positive_se) else None
    try:
        rate0 = 1.0 / _fit_log_linear(x, y, se)
    except SuperdetError:
        rate0 = 1.0 / max(float(np.max(x)), 1e-300)
    if not rate0 > 0:
        rate0 = 1.0 / max(float(np.max(x)), 1e-300)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            params, _ = curve_fit(_decay, x, y, p0=[rate0], sigma=sigma, absolute_sigma=True,
                                  bounds=(0.0, np.inf), method="trf")
    except (RuntimeError, ValueError) as err:
        raise NoDecaySignalError(f"maximum-likelihood fit did not converge: {err}") from err

    rate = float(params[0])
    if rate * float(np.max(x)) <= FLAT_TOLERANCE:
        return math.inf
    return 1.0 / rate


_FITTERS = {FitMethod.LOG_LINEAR: _fit_log_linear, FitMethod.MLE: _fit_mle}


def _goodness(x: np.ndarray, y: np.ndarray, se: np.ndarray, tau: float) -> Goodness:
    model = np.ones_like(x) if math.isinf(tau) else np.exp(-x / tau)
    residuals = y - model
    weighted = residuals[se > 0] / se[se > 0]
    return Goodness(float(np.sum(weighted ** 2)), max(len(x) - 1, 0), float(np.sqrt(np.mean(residuals ** 2))))


def _bootstrap_noise(series: CorrSeries, x: np.ndarray, se: np.ndarray, tau: float, rms: float,
                     n_bootstrap: int, rng: np.random.Generator):
    if series.binary and series.estimator is Estimator.FIRST and all(n > 0 for n in series.n_samples):
        # covariance of first-measurement products for a sign-persistence chain with correlation rho per repetition
        rho = 1.0 if math.isinf(tau) else math.exp(-series.spacing / tau)
        k = np.asarray(series.kappas, dtype=np.float64)
        n = np.asarray(series.n_samples, dtype=np.float64)
        cov = rho ** np.abs(k[:, None] - k[None, :]) - rho ** (k[:, None] + k[None, :])
        cov /= np.sqrt(n[:, None] * n[None, :])
        if not np.any(cov > 0):
            return None
        return rng.multivariate_normal(np.zeros(len(k)), cov, size=n_bootstrap, method="eigh")
    if np.any(se > 0):
        return rng.standard_normal((n_bootstrap, len(x))) * se
    if rms > 0:
        return rng.standard_normal((n_bootstrap, len(x))) * rms
    return None


def fit_exponential_decay(series: CorrSeries, method: FitMethod = FitMethod.MLE,
                          n_bootstrap: int = DEFAULT_BOOTSTRAP, confidence: float = 0.95,
                          seed: int = 0) -> FitResult:
    """
    Fits Corr = exp(-kappa * spacing / tau).

    log_linear is weighted least squares of ln(Corr) on the lag through the origin, using the leading
    estimates that lie more than two standard errors above zero;
    mle maximises the Gaussian likelihood given the standard errors. The confidence interval is
    the percentile interval of refits on `n_bootstrap` parametric resamples drawn around the
    fitted curve.

    Raises:
        NoDecaySignalError: If every estimate is non-positive.
        InadequateDataError: If log_linear gets fewer than 3 leading significant estimates.
    """
    method = FitMethod(method)
    fitter = _FITTERS[method]
    x = np.asarray(series.kappas, dtype=np.float64) * series.spacing
    y = np.asarray(series.estimates, dtype=np.float64)
    se = np.asarray(series.std_errors, dtype=np.float64)

    tau = fitter(x, y, se)
    goodness = _goodness(x, y, se, tau)
    degenerate = math.isinf(tau)
    if degenerate:
        logger.warning("[ANALYZE][FIT] No decay in the %s series: tau is infinite.", series.label)

    rng = np.random.default_rng(seed)
    noise = _bootstrap_noise(series, x, se, tau, goodness.rms_residual, n_bootstrap, rng) if n_bootstrap > 0 else None
    if noise is None:
        return FitResult(tau, tau, tau, method, goodness, degenerate, confidence, 0, 0, series.spacing)

    model = np.ones_like(x) if degenerate else np.exp(-x / tau)
    taus, failed = [], 0
    for resample in model + noise:
        try:
            taus.append(fitter(x, resample, se))
        except SuperdetError:
            failed += 1

    if not taus:
        logger.warning("[ANALYZE][FIT] Every bootstrap refit failed; the interval collapses to tau_hat.")
        return FitResult(tau, tau, tau, method, goodness, degenerate, confidence, n_bootstrap, failed, series.spacing)
    if failed:
        logger.debug("[ANALYZE][FIT] %d of %d bootstrap refits failed.", failed, n_bootstrap)

    tail = (1.0 - confidence) / 2.0
    low, high = np.quantile(np.asarray(taus), [tail, 1.0 - tail], method="inverted_cdf")
    return FitResult(tau, min(float(low), tau), max(float(high), tau), method, goodness, degenerate,
                     confidence, n_bootstrap, failed, series.spacing)
