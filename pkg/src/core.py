"""Domain primitives shared by every module: observables, outcomes, angles and physical constants.

Units are fixed across the package: radians, seconds, eV and kelvin.
"""
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Tuple

from scipy import constants as sc

from src.errors import InvalidArgumentError

Vector = Tuple[float, float, float]

UNIT_TOLERANCE = 1e-12


class Outcome(IntEnum):
    """A two-valued measurement result."""
    PLUS = 1
    MINUS = -1

    @classmethod
    def from_value(cls, value) -> "Outcome":
        """Accepts +1/-1 integers or the characters '+'/'-'."""
        if value in ("+", "+1", 1):
            return cls.PLUS
        if value in ("-", "-1", -1):
            return cls.MINUS
        raise InvalidArgumentError(f"outcome must be +1 or -1 (got {value!r})")

    @property
    def symbol(self) -> str:
        return "+" if self is Outcome.PLUS else "-"


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants used by the thermal and cavity estimates."""
    boltzmann_eV_per_K: float = sc.physical_constants["Boltzmann constant in eV/K"][0]
    speed_of_light: float = sc.speed_of_light


CONSTANTS = PhysicalConstants()


def dot(a: Vector, b: Vector) -> float:
    """Three-term dot product with a fixed summation order."""
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def norm(v: Vector) -> float:
    return math.sqrt(dot(v, v))


def _as_vector(values) -> Vector:
    vector = tuple(float(x) for x in values)
    if len(vector) != 3:
        raise InvalidArgumentError(f"expected a 3-vector, got {len(vector)} components")
    if not all(math.isfinite(x) for x in vector):
        raise InvalidArgumentError(f"vector components must be finite (got {vector})")
    return vector


def unit_vector(values) -> Vector:
    """Normalises a non-zero 3-vector."""
    vector = _as_vector(values)
    length = norm(vector)
    if length == 0.0:
        raise InvalidArgumentError("cannot normalise the zero vector")
    return (vector[0] / length, vector[1] / length, vector[2] / length)


@dataclass(frozen=True)
class Observable:
    """A two-outcome measurement along a direction in Bloch space."""
    direction: Vector
    label: str

    def __post_init__(self):
        object.__setattr__(self, "direction", _as_vector(self.direction))
        if abs(norm(self.direction) - 1.0) > UNIT_TOLERANCE:
            raise InvalidArgumentError(f"observable direction must be a unit vector (|n| = {norm(self.direction)!r})")
        if not self.label:
            raise InvalidArgumentError("observable label must be non-empty")

    @classmethod
    def along(cls, direction, label: str) -> "Observable":
        """Builds an observable from any non-zero direction."""
        return cls(unit_vector(direction), label)

    def negated(self, label: str = None) -> "Observable":
        d = self.direction
        return Observable((-d[0], -d[1], -d[2]), label or f"-{self.label}")


def observable_from_angles(polar: float, azimuth: float, label: str) -> Observable:
    """
    Builds the observable with direction (sin(polar) cos(azimuth), sin(polar) sin(azimuth), cos(polar)).

    Raises:
        InvalidArgumentError: If an angle is not finite.
    """
    if not (math.isfinite(polar) and math.isfinite(azimuth)):
        raise InvalidArgumentError(f"angles must be finite (polar={polar!r}, azimuth={azimuth!r})")

    sin_polar = math.sin(polar)
    direction = (sin_polar * math.cos(azimuth), sin_polar * math.sin(azimuth), math.cos(polar))
    return Observable(direction, label)


def angles_of(obs: Observable) -> Tuple[float, float]:
    """Returns (polar, azimuth) of an observable's direction; azimuth in (-pi, pi]."""
    x, y, z = obs.direction
    polar = math.acos(max(-1.0, min(1.0, z)))
    azimuth = math.atan2(y, x)
    return polar, azimuth


def angle_between(a: Observable, b: Observable) -> float:
    """Angle in [0, pi] between two measurement directions."""
    return math.acos(max(-1.0, min(1.0, dot(a.direction, b.direction))))
