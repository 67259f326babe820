"""Born-rule quantum mechanics for a single qubit with ideal projective measurement."""
import math
from dataclasses import dataclass
from typing import Tuple

from src.core import Observable, Outcome, Vector, _as_vector, dot, norm
from src.errors import InvalidArgumentError

BLOCH_TOLERANCE = 1e-12


@dataclass(frozen=True)
class QubitState:
    """A qubit state as a Bloch vector; |bloch| = 1 for pure states, 0 for the maximally mixed state."""
    bloch: Vector

    def __post_init__(self):
        object.__setattr__(self, "bloch", _as_vector(self.bloch))
        if norm(self.bloch) > 1.0 + BLOCH_TOLERANCE:
            raise InvalidArgumentError(f"Bloch vector length must not exceed 1 (got {norm(self.bloch)!r})")

    @classmethod
    def eigenstate(cls, obs: Observable, outcome: Outcome = Outcome.PLUS) -> "QubitState":
        """The state that yields `outcome` with certainty when `obs` is measured."""
        s = int(outcome)
        d = obs.direction
        return cls((s * d[0], s * d[1], s * d[2]))

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls((0.0, 0.0, 0.0))

    @property
    def is_pure(self) -> bool:
        return abs(norm(self.bloch) - 1.0) <= BLOCH_TOLERANCE


def born_plus_probability(state: QubitState, obs: Observable) -> float:
    """P(+1) = (1 + r.n) / 2, clipped to [0, 1] against rounding."""
    p = 0.5 * (1.0 + dot(state.bloch, obs.direction))
    return min(1.0, max(0.0, p))


def qm_measure(state: QubitState, obs: Observable, u: float) -> Tuple[Outcome, QubitState]:
    """
    Measures `obs` on `state` using the uniform variate `u` in [0, 1).

    The outcome is +1 iff u < P(+1); the state collapses to the eigenstate of the outcome,
    which is pure even when the input was mixed.
    """
    if not 0.0 <= u < 1.0:
        raise InvalidArgumentError(f"u must lie in [0, 1) (got {u!r})")

    outcome = Outcome.PLUS if u < born_plus_probability(state, obs) else Outcome.MINUS
    return outcome, QubitState.eigenstate(obs, outcome)


def qm_same_observable_autocorr_analytic(theta: float, kappa: int) -> float:
    """
    Exact autocorrelation of the outcomes of one observable when two observables at angle
    `theta` are measured alternately (recording mode): cos(theta)^(2 kappa).

    Between consecutive measurements of the same observable the sign is kept with probability
    cos^4(theta/2) + sin^4(theta/2) = (1 + cos^2 theta) / 2, so each repetition multiplies the
    correlation by cos^2 theta.
    """
    if not 0.0 <= theta <= math.pi:
        raise InvalidArgumentError(f"theta must lie in [0, pi] (got {theta!r})")
    if kappa < 0:
        raise InvalidArgumentError(f"kappa must be non-negative (got {kappa!r})")

    return math.cos(theta) ** (2 * kappa)
