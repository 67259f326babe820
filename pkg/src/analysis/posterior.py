"""
Restriction of the hidden variables by observed outcomes.

Under the sign rule every outcome s along n confines lambda to the hemisphere s (lambda . n) >= 0.
A sequence of outcomes leaves the intersection of those hemispheres; its solid-angle fraction
is estimated by Monte Carlo over lambda uniform on the sphere.
"""
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.core import Observable, Outcome, dot
from src.errors import InvalidArgumentError
from src.logger import logger
from src.models.hidden import SIGN_RULE, OutcomeRule
from src.simulate import MeasurementRecord, Protocol

Constraint = Tuple[Observable, Outcome]

PARALLEL_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PosteriorEstimate:
    fraction: float
    std_error: float
    n_samples: int
    empty_region: bool = False


def _contradictory(constraints: Sequence[Constraint]) -> bool:
    for i, (obs_i, s_i) in enumerate(constraints):
        for obs_j, s_j in constraints[i + 1:]:
            alignment = dot(obs_i.direction, obs_j.direction)
            if alignment >= 1.0 - PARALLEL_TOLERANCE and s_i != s_j:
                return True
            if alignment <= -1.0 + PARALLEL_TOLERANCE and s_i == s_j:
                return True
    return False


def _uniform_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    normals = rng.standard_normal((n, 3))
    return normals / np.sqrt(np.sum(normals ** 2, axis=1))[:, None]


def _accepted(lambdas: np.ndarray, constraints: Sequence[Constraint], rule: OutcomeRule) -> np.ndarray:
    mask = np.ones(len(lambdas), dtype=bool)
    for obs, outcome in constraints:
        mask &= rule.outcomes(lambdas, obs.direction) == int(outcome)
    return mask


def _check(constraints: Sequence[Constraint], n_samples: int):
    if not constraints:
        raise InvalidArgumentError("at least one (observable, outcome) constraint is required")
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be positive (got {n_samples!r})")


def posterior_support_fraction(constraints: Sequence[Constraint], n_samples: int, rng: np.random.Generator,
                               rule: OutcomeRule = SIGN_RULE) -> PosteriorEstimate:
    """
    Fraction of the sphere of hidden variables compatible with every observed outcome.

    Contradictory constraints (opposite outcomes along one axis, equal outcomes along
    antipodal axes) return 0 with `empty_region` set.
    """
    constraints = [(obs, Outcome(outcome)) for obs, outcome in constraints]
    _check(constraints, n_samples)
    if _contradictory(constraints):
        logger.info("[ANALYZE][POSTERIOR] Constraints are contradictory; no hidden variable survives.")
        return PosteriorEstimate(0.0, 0.0, n_samples, True)

    accepted = _accepted(_uniform_sphere(n_samples, rng), constraints, rule)
    p = float(np.count_nonzero(accepted)) / n_samples
    return PosteriorEstimate(p, math.sqrt(p * (1.0 - p) / n_samples), n_samples, p == 0.0)


def posterior_samples(constraints: Sequence[Constraint], n_samples: int, rng: np.random.Generator,
                      rule: OutcomeRule = SIGN_RULE) -> np.ndarray:
    """Hidden variables drawn uniformly from the surviving region (rejection sampling of n_samples proposals)."""
    constraints = [(obs, Outcome(outcome)) for obs, outcome in constraints]
    _check(constraints, n_samples)
    lambdas = _uniform_sphere(n_samples, rng)
    return lambdas[_accepted(lambdas, constraints, rule)]


def posterior_mean_direction(constraints: Sequence[Constraint], n_samples: int, rng: np.random.Generator,
                             rule: OutcomeRule = SIGN_RULE) -> np.ndarray:
    """
    Mean of lambda over the surviving region; for one constraint (n, s) it is s * n / 2.

    Raises:
        InvalidArgumentError: If no proposal survives.
    """
    samples = posterior_samples(constraints, n_samples, rng, rule)
    if len(samples) == 0:
        raise InvalidArgumentError("no hidden variable survives the constraints")
    return samples.mean(axis=0)


def constraints_from_record(record: MeasurementRecord, protocol: Protocol) -> List[Constraint]:
    """The (observable, outcome) pairs observed in one run, in measurement order."""
    return [(protocol.observable_at(step), outcome) for step, _, outcome in record.outcomes]
