"""
Experimental-design arithmetic: thermal autocorrelation time of the detector against the photon
bounce time of the cavity.
"""
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import List, Sequence

from src.core import CONSTANTS
from src.errors import InvalidArgumentError, TooLargeError
from src.logger import logger
from src.noise import DetectorParams, thermal_autocorrelation_time
from src.util import convert_seconds

DEFAULT_THRESHOLD = 100.0
DEFAULT_MAX_ROWS = 1000000

QUOTED_ESTIMATE_NOTE = (
    "The quoted order-of-magnitude estimate for N = 1e15, dE = 1 eV, T = 300 K, tau_r = 1 ns is 1e-6 s; "
    "evaluating exp(dE / (k_B T)) * tau_r / N with CODATA k_B gives 6.30e-8 s, about 1.2 orders of magnitude lower."
)


@dataclass(frozen=True)
class CavityParams:
    """Mirror separation L in meters."""
    mirror_separation: float

    def __post_init__(self):
        if not (math.isfinite(self.mirror_separation) and self.mirror_separation > 0):
            raise InvalidArgumentError(f"mirror_separation must be strictly positive (got {self.mirror_separation!r})")


@dataclass(frozen=True)
class FeasibilityReport:
    tau_tilde: float
    bounce_time: float
    margin: float
    measurable: bool
    threshold: float
    notes: str = QUOTED_ESTIMATE_NOTE

    @property
    def tau_in_steps(self) -> float:
        """tau_tilde in units of the bounce time, i.e. the simulator's tau for dt = bounce time."""
        return self.margin


@dataclass(frozen=True)
class SweepGrid:
    """Axis values of a parameter sweep, evaluated as a Cartesian product in field order."""
    n_atoms: Sequence[float]
    band_gap: Sequence[float]
    temperature: Sequence[float]
    recombination_time: Sequence[float]
    mirror_separation: Sequence[float]

    AXES = ("n_atoms", "band_gap", "temperature", "recombination_time", "mirror_separation")

    def __post_init__(self):
        for axis in self.AXES:
            values = tuple(float(v) for v in getattr(self, axis))
            if not values:
                raise InvalidArgumentError(f"sweep axis {axis} is empty")
            object.__setattr__(self, axis, values)

    @property
    def size(self) -> int:
        return math.prod(len(getattr(self, axis)) for axis in self.AXES)


@dataclass(frozen=True)
class SweepRow:
    detector: DetectorParams
    cavity: CavityParams
    report: FeasibilityReport

    def as_dict(self) -> dict:
        row = asdict(self.detector)
        row.update(asdict(self.cavity))
        row.update(tau_tilde=self.report.tau_tilde, bounce_time=self.report.bounce_time,
                   margin=self.report.margin, measurable=self.report.measurable)
        return row


@dataclass(frozen=True)
class SweepTable:
    grid: SweepGrid
    threshold: float
    rows: List[SweepRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)


def bounce_time(cavity: CavityParams) -> float:
    """Photon round trip between the mirrors, 2 L / c."""
    return 2.0 * cavity.mirror_separation / CONSTANTS.speed_of_light


def _check_threshold(threshold: float):
    if not (math.isfinite(threshold) and threshold >= 1):
        raise InvalidArgumentError(f"threshold must be at least 1 (got {threshold!r})")


def feasibility_report(det: DetectorParams, cavity: CavityParams, threshold: float = DEFAULT_THRESHOLD) -> FeasibilityReport:
    """
    Compares the detector's thermal autocorrelation time with the bounce time.

    The setup is measurable when tau_tilde / bounce_time >= threshold.

    Raises:
        OutOfRangeError: From thermal_autocorrelation_time when the Boltzmann factor overflows.
    """
    _check_threshold(threshold)
    tau_tilde = thermal_autocorrelation_time(det)
    t_bounce = bounce_time(cavity)
    margin = tau_tilde / t_bounce
    return FeasibilityReport(tau_tilde, t_bounce, margin, margin >= threshold, threshold)


def critical_temperature(det: DetectorParams, cavity: CavityParams, threshold: float = DEFAULT_THRESHOLD) -> float:
    """
    Highest temperature at which the setup is still measurable (the detector's own temperature is ignored).

    Returns +inf when the margin exceeds the threshold at any temperature.
    """
    _check_threshold(threshold)
    # margin(T) = exp(dE / (k_B T)) * tau_r / (N * t_b) >= threshold
    log_required = math.log(threshold * det.n_atoms * bounce_time(cavity) / det.recombination_time)
    if log_required <= 0:
        return math.inf
    return det.band_gap / (CONSTANTS.boltzmann_eV_per_K * log_required)


def max_atoms(det: DetectorParams, cavity: CavityParams, threshold: float = DEFAULT_THRESHOLD) -> float:
    """Largest atom count for which the setup is still measurable (the detector's own N is ignored)."""
    _check_threshold(threshold)
    single_atom = DetectorParams(1.0, det.band_gap, det.temperature, det.recombination_time)
    return thermal_autocorrelation_time(single_atom) / (threshold * bounce_time(cavity))


def parameter_sweep(grid: SweepGrid, threshold: float = DEFAULT_THRESHOLD,
                    max_rows: int = DEFAULT_MAX_ROWS) -> SweepTable:
    """
    Evaluates feasibility_report on every point of the grid.

    Rows are ordered lexicographically in axis order (n_atoms slowest, mirror_separation fastest).

    Raises:
        TooLargeError: If the grid has more than `max_rows` points.
    """
    _check_threshold(threshold)
    if grid.size > max_rows:
        raise TooLargeError(f"sweep grid has {grid.size} rows, above the cap of {max_rows}")

    rows = []
    for n_atoms, band_gap, temperature, recombination_time, separation in itertools.product(
            *(getattr(grid, axis) for axis in SweepGrid.AXES)):
        det = DetectorParams(n_atoms, band_gap, temperature, recombination_time)
        cavity = CavityParams(separation)
        rows.append(SweepRow(det, cavity, feasibility_report(det, cavity, threshold)))

    measurable = sum(row.report.measurable for row in rows)
    logger.info("[SWEEP] %d rows evaluated, %d measurable at threshold %g.", len(rows), measurable, threshold)
    return SweepTable(grid, threshold, rows)


def describe(report: FeasibilityReport) -> str:
    return (f"tau_tilde = {report.tau_tilde:.2e} s ({convert_seconds(report.tau_tilde)}), "
            f"bounce time = {report.bounce_time:.4g} s, margin = {report.margin:.3g}, "
            f"measurable = {str(report.measurable).lower()}")
