"""Autocorrelation of the outcomes of one observable across its repeated measurements."""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import InvalidArgumentError
from src.logger import logger
from src.models.quantum import qm_same_observable_autocorr_analytic
from src.simulate import EnsembleResult, Mode


class Estimator(str, Enum):
    FIRST = "first"
    LAGGED = "lagged"


@dataclass(frozen=True)
class CorrSeries:
    """
    Corr_kappa for kappa repetitions of one observable.

    `spacing` is the time between two repetitions (2 dt for an alternating protocol), so that
    kappa * spacing is the elapsed time. `binary` marks estimates computed from +/-1 outcomes.
    """
    kappas: Tuple[int, ...]
    estimates: Tuple[float, ...]
    std_errors: Tuple[float, ...]
    n_samples: Tuple[int, ...]
    label: str = "O"
    spacing: float = 1.0
    estimator: Estimator = Estimator.FIRST
    binary: bool = False
    conditioned_on_survival: bool = False
    theta: Optional[float] = None
    omitted_kappas: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for name in ("kappas", "estimates", "std_errors", "n_samples", "omitted_kappas"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(self, "estimator", Estimator(self.estimator))
        lengths = {len(self.kappas), len(self.estimates), len(self.std_errors), len(self.n_samples)}
        if len(lengths) != 1:
            raise InvalidArgumentError("kappas, estimates, std_errors and n_samples must have equal lengths")
        if any(k < 0 for k in self.kappas) or list(self.kappas) != sorted(set(self.kappas)):
            raise InvalidArgumentError("kappas must be distinct, non-negative and increasing")
        if any(not se >= 0 for se in self.std_errors):
            raise InvalidArgumentError("std_errors must be non-negative")
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise InvalidArgumentError(f"spacing must be strictly positive (got {self.spacing!r})")

    @classmethod
    def from_values(cls, estimates: Sequence[float], std_errors: Sequence[float] = None,
                    kappas: Sequence[int] = None, spacing: float = 1.0) -> "CorrSeries":
        """A series from given numbers, e.g. an analytic curve or external data."""
        kappas = list(range(len(estimates))) if kappas is None else list(kappas)
        std_errors = [0.0] * len(estimates) if std_errors is None else list(std_errors)
        return cls(tuple(int(k) for k in kappas), tuple(float(e) for e in estimates),
                   tuple(float(s) for s in std_errors), tuple(0 for _ in estimates), spacing=spacing)

    def __len__(self):
        return len(self.kappas)

    @property
    def lag_times(self) -> Tuple[float, ...]:
        return tuple(k * self.spacing for k in self.kappas)

    def with_spacing(self, spacing: float) -> "CorrSeries":
        return CorrSeries(self.kappas, self.estimates, self.std_errors, self.n_samples, self.label, spacing,
                          self.estimator, self.binary, self.conditioned_on_survival, self.theta, self.omitted_kappas)

    def qm_prediction(self) -> Optional[Tuple[float, ...]]:
        """cos(theta)^(2 kappa) at every kappa, when the series came from a protocol."""
        if self.theta is None:
            return None
        return tuple(qm_same_observable_autocorr_analytic(self.theta, k) for k in self.kappas)


def estimate_autocorrelation(ens: EnsembleResult, label: str, max_kappa: int,
                             estimator: Estimator = Estimator.FIRST,
                             accept_survivorship_bias: bool = False) -> CorrSeries:
    """
    Estimates Corr_kappa = E(s_0 s_kappa) / E(s_0^2) over the runs of an ensemble.

    kappa counts repetitions of the observable `label`; the other observable's measurements in
    between are implicit. The default estimator correlates every repetition with the first one,
    "lagged" averages s_j s_(j+kappa) over all start positions j. Standard errors come from the
    sample variance across runs. A kappa with fewer than 2 samples is omitted with a warning.

    Raises:
        InvalidArgumentError: For an empty ensemble, an unknown label, a negative max_kappa,
            or transmissive data without `accept_survivorship_bias`.
    """
    if len(ens) == 0:
        raise InvalidArgumentError("cannot estimate an autocorrelation from an empty ensemble")
    if max_kappa < 0:
        raise InvalidArgumentError(f"max_kappa must be non-negative (got {max_kappa!r})")
    estimator = Estimator(estimator)

    conditioned = ens.protocol.mode is Mode.TRANSMISSIVE
    if conditioned:
        if not accept_survivorship_bias:
            raise InvalidArgumentError("transmissive ensembles are post-selected; pass accept_survivorship_bias=True "
                                       "to estimate correlations conditioned on survival")
        logger.warning("[ANALYZE] Transmissive data: correlations for %s are conditioned on survival.", label)

    matrix = ens.observable_matrix(label).astype(np.float64)
    kappas, estimates, std_errors, n_samples, omitted = [], [], [], [], []

    for kappa in range(max_kappa + 1):
        if estimator is Estimator.FIRST:
            estimate, std_error, n = _first_estimate(matrix, kappa)
        else:
            estimate, std_error, n = _lagged_estimate(matrix, kappa)

        if n < 2:
            omitted.append(kappa)
            continue
        kappas.append(kappa)
        estimates.append(estimate)
        std_errors.append(std_error)
        n_samples.append(n)

    if omitted:
        logger.warning("[ANALYZE] Omitted kappa %s for %s: fewer than 2 samples.", omitted, label)

    return CorrSeries(tuple(kappas), tuple(estimates), tuple(std_errors), tuple(n_samples), label,
                      ens.protocol.spacing, estimator, True, conditioned, ens.protocol.theta, tuple(omitted))


def _first_estimate(matrix: np.ndarray, kappa: int):
    if kappa >= matrix.shape[1]:
        return math.nan, math.nan, 0
    first = matrix[:, 0]
    valid = (first != 0) & (matrix[:, kappa] != 0)
    n = int(valid.sum())
    if n < 2:
        return math.nan, math.nan, n

    products = first[valid] * matrix[valid, kappa]
    normalization = np.mean(first[valid] ** 2)
    estimate = float(np.mean(products) / normalization)
    std_error = float(np.std(products / normalization, ddof=1) / math.sqrt(n))
    return max(-1.0, min(1.0, estimate)), std_error, n


def _lagged_estimate(matrix: np.ndarray, kappa: int):
    width = matrix.shape[1]
    if kappa >= width:
        return math.nan, math.nan, 0
    left, right = matrix[:, :width - kappa], matrix[:, kappa:]
    valid = (left != 0) & (right != 0)
    pairs = valid.sum(axis=1)
    runs = pairs > 0
    n = int(runs.sum())
    if n < 2:
        return math.nan, math.nan, n

    products = np.where(valid, left * right, 0.0)
    squares = np.where(matrix != 0, matrix ** 2, 0.0)
    normalization = squares.sum() / np.count_nonzero(matrix)
    per_run = products[runs].sum(axis=1) / pairs[runs] / normalization
    estimate = float(products.sum() / pairs.sum() / normalization)
    std_error = float(np.std(per_run, ddof=1) / math.sqrt(n))
    return max(-1.0, min(1.0, estimate)), std_error, n
