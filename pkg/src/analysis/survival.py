"""Pass probability of a particle in the transmissive setup as a function of the step index."""
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from src.errors import InvalidArgumentError
from src.simulate import EnsembleResult, Mode


@dataclass(frozen=True)
class SurvivalPoint:
    kappa: int
    fraction: float
    std_error: float


def survival_curve(ens: EnsembleResult) -> List[SurvivalPoint]:
    """
    Fraction of runs still travelling after step kappa, for kappa = 0 .. max_steps - 1.

    A run survives step kappa when it is never absorbed or absorbed strictly later; the
    error is the binomial standard error sqrt(p (1 - p) / n).

    Raises:
        InvalidArgumentError: For recording-mode or empty ensembles.
    """
    if ens.protocol.mode is not Mode.TRANSMISSIVE:
        raise InvalidArgumentError("survival curves need a transmissive ensemble; recording runs are never absorbed")
    if len(ens) == 0:
        raise InvalidArgumentError("cannot compute a survival curve from an empty ensemble")

    steps = ens.protocol.max_steps
    absorbed = np.array([steps if r.absorbed_at is None else r.absorbed_at for r in ens.records])
    n = len(absorbed)

    curve = []
    for kappa in range(steps):
        p = float(np.count_nonzero(absorbed > kappa)) / n
        curve.append(SurvivalPoint(kappa, p, math.sqrt(p * (1.0 - p) / n)))
    return curve


def qm_survival_oracle(theta: float, first_pass: float, kappa: int) -> float:
    """Quantum prediction for survival after step kappa: P(first pass) * cos^2(theta / 2)^kappa."""
    return first_pass * math.cos(theta / 2.0) ** (2 * kappa)
