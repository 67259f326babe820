"""
Environmental noise acting on the hidden variables.

Two ingredients: the thermal timescale of a photodetector, exp(dE / (k_B T)) * tau_r / N,
and a homogeneous Poisson process of disturbances that perturbs lambda between measurements.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from src.core import CONSTANTS
from src.errors import InvalidArgumentError, OutOfRangeError
from src.models.hidden import HiddenVariable

MAX_BOLTZMANN_EXPONENT = 700.0


@dataclass(frozen=True)
class DetectorParams:
    """Photodetector parameters: atom count, band gap (eV), temperature (K), recombination time (s)."""
    n_atoms: float
    band_gap: float
    temperature: float
    recombination_time: float

    def __post_init__(self):
        for name in ("n_atoms", "band_gap", "temperature", "recombination_time"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f"{name} must be finite and strictly positive (got {value!r})")
        if self.n_atoms < 1:
            raise InvalidArgumentError(f"n_atoms must be at least 1 (got {self.n_atoms!r})")


class KernelKind(str, Enum):
    REDRAW = "redraw"
    DIFFUSION = "diffusion"


@dataclass(frozen=True)
class DisturbanceKernel:
    """
    What a single disturbance does to lambda.

    redraw replaces lambda by a fresh uniform direction; diffusion rotates it by
    `diffusion_angle` about a uniformly random axis.
    """
    kind: KernelKind = KernelKind.REDRAW
    diffusion_angle: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind is KernelKind.DIFFUSION and not 0.0 < self.diffusion_angle <= math.pi:
            raise InvalidArgumentError(f"diffusion_angle must lie in (0, pi] (got {self.diffusion_angle!r})")

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Standard normals consumed by `count` disturbances: one row for redraw, `count` rows for diffusion."""
        if count <= 0:
            return np.empty((0, 3))
        rows = 1 if self.kind is KernelKind.REDRAW else count
        return rng.standard_normal((rows, 3))

    def apply(self, direction: Tuple[float, float, float], normals: np.ndarray) -> Tuple[float, float, float]:
        """Applies the disturbances encoded by `normals` (as produced by `draw`) to a unit vector."""
        if len(normals) == 0:
            return direction
        if self.kind is KernelKind.REDRAW:
            return normalize(normals[-1])

        cos_a = math.cos(self.diffusion_angle)
        sin_a = math.sin(self.diffusion_angle)
        for row in normals:
            direction = rotate(direction, normalize(row), cos_a, sin_a)
        return direction


def normalize(values) -> Tuple[float, float, float]:
    x, y, z = float(values[0]), float(values[1]), float(values[2])
    length = math.sqrt(x * x + y * y + z * z)
    return (x / length, y / length, z / length)


def rotate(v, axis, cos_a: float, sin_a: float) -> Tuple[float, float, float]:
    """Rodrigues rotation of `v` about the unit vector `axis`."""
    kx, ky, kz = axis
    vx, vy, vz = v
    k_dot_v = kx * vx + ky * vy + kz * vz
    cx, cy, cz = ky * vz - kz * vy, kz * vx - kx * vz, kx * vy - ky * vx
    c = k_dot_v * (1.0 - cos_a)
    return (
        vx * cos_a + cx * sin_a + kx * c,
        vy * cos_a + cy * sin_a + ky * c,
        vz * cos_a + cz * sin_a + kz * c,
    )


def boltzmann_exponent(det: DetectorParams) -> float:
    return det.band_gap / (CONSTANTS.boltzmann_eV_per_K * det.temperature)


def thermal_autocorrelation_time(det: DetectorParams) -> float:
    """
    Time for N detector atoms to undergo a statistical change: exp(dE / (k_B T)) * tau_r / N.

    Raises:
        OutOfRangeError: If dE / (k_B T) exceeds 700, where exp overflows double precision.
    """
    exponent = boltzmann_exponent(det)
    if exponent > MAX_BOLTZMANN_EXPONENT:
        raise OutOfRangeError(
            f"Boltzmann exponent dE/(k_B T) = {exponent:.6g} exceeds {MAX_BOLTZMANN_EXPONENT:g}; "
            "raise the temperature or lower the band gap"
        )
    return math.exp(exponent) * det.recombination_time / det.n_atoms


def _check_interval(dt: float, tau: float):
    if not dt >= 0:
        raise InvalidArgumentError(f"dt must be non-negative (got {dt!r})")
    if not tau > 0:
        raise InvalidArgumentError(f"tau must be strictly positive (got {tau!r})")


def no_disturbance_probability(dt: float, tau: float) -> float:
    """Poisson survival exp(-dt / tau); tau = inf means no noise."""
    _check_interval(dt, tau)
    if math.isinf(tau):
        return 1.0
    return math.exp(-dt / tau)


def hidden_variable_autocorrelation(elapsed: float, tau: float) -> float:
    """E[lambda(0) . lambda(elapsed)] under the redraw kernel, equal to the no-disturbance probability."""
    return no_disturbance_probability(elapsed, tau)


def sample_disturbance_count(dt: float, tau: float, rng: np.random.Generator) -> int:
    """Number of disturbances in an interval of length dt, Poisson with mean dt / tau."""
    _check_interval(dt, tau)
    if math.isinf(tau) or dt == 0:
        return 0
    return int(rng.poisson(dt / tau))


def apply_disturbances(hv: HiddenVariable, count: int, kernel: DisturbanceKernel,
                       rng: np.random.Generator) -> HiddenVariable:
    """Applies `count` disturbances of the given kernel; count = 0 returns `hv` itself."""
    if count < 0:
        raise InvalidArgumentError(f"count must be non-negative (got {count!r})")
    if count == 0:
        return hv
    return HiddenVariable(kernel.apply(hv.direction, kernel.draw(count, rng)))
