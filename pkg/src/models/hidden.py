"""Deterministic hidden-variable outcome rules."""
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from src.core import UNIT_TOLERANCE, Observable, Outcome, Vector, _as_vector, dot, norm
from src.errors import InvalidArgumentError


@dataclass(frozen=True)
class HiddenVariable:
    """The hidden parameter lambda, a unit vector fixing every outcome."""
    direction: Vector

    def __post_init__(self):
        object.__setattr__(self, "direction", _as_vector(self.direction))
        if abs(norm(self.direction) - 1.0) > UNIT_TOLERANCE:
            raise InvalidArgumentError(f"hidden variable must be a unit vector (|lambda| = {norm(self.direction)!r})")


class OutcomeRule(Protocol):
    """
    Maps a hidden variable and a measurement direction to a definite outcome.

    The simulator only calls `outcomes`, so any rule implementing both methods can
    replace the default without changes elsewhere.
    """
    name: str

    def outcome(self, hv: HiddenVariable, obs: Observable) -> Outcome:
        ...

    def outcomes(self, lambdas: np.ndarray, direction: Vector) -> np.ndarray:
        ...


class SignOutcomeRule:
    """outcome = sign(lambda . n), with lambda . n = 0 resolved to +1."""
    name = "sign"

    def outcome(self, hv: HiddenVariable, obs: Observable) -> Outcome:
        return Outcome.PLUS if dot(hv.direction, obs.direction) >= 0.0 else Outcome.MINUS

    def outcomes(self, lambdas: np.ndarray, direction: Vector) -> np.ndarray:
        projection = lambdas[:, 0] * direction[0] + lambdas[:, 1] * direction[1] + lambdas[:, 2] * direction[2]
        return np.where(projection >= 0.0, 1, -1).astype(np.int8)


SIGN_RULE = SignOutcomeRule()

OUTCOME_RULES = {SIGN_RULE.name: SIGN_RULE}


def get_outcome_rule(name: str) -> OutcomeRule:
    try:
        return OUTCOME_RULES[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown outcome rule {name!r}; known rules: {sorted(OUTCOME_RULES)}") from None


def hv_outcome(hv: HiddenVariable, obs: Observable, rule: OutcomeRule = SIGN_RULE) -> Outcome:
    """Deterministic outcome of measuring `obs` on a system carrying hidden variable `hv`."""
    return rule.outcome(hv, obs)
