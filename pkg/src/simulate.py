"""
Alternating-measurement runs and reproducible ensembles.

A run measures obs_a at even steps and obs_b at odd steps. In transmissive mode the particle is
absorbed at the first outcome differing from the pass outcome; in recording mode every step
is recorded.

Every run owns a Philox stream derived from (master_seed, run_index). Within a run the draws
happen in blocks, in this order:

1. initial lambda (hidden-variable model with a uniform initial policy), 3 normals;
2. disturbance counts, max_steps Poisson draws (hidden-variable model, finite tau);
3. kernel randomness: max_steps x 3 normals for redraw, sum(counts) x 3 normals for diffusion;
4. measurement uniforms, max_steps draws (quantum model).

Blocks always have full length, so early absorption never shifts later draws, and runs are
computed elementwise across a batch, so a record never depends on which batch or worker
produced it.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.core import Observable, Outcome, angle_between
from src.errors import InvalidArgumentError
from src.logger import logger
from src.models.hidden import SIGN_RULE, HiddenVariable, OutcomeRule
from src.models.quantum import QubitState
from src.noise import DisturbanceKernel, KernelKind, normalize
from src.util import convert_seconds

SeedPath = Tuple[int, int]

DEFAULT_CHUNK_SIZE = 4096


class Mode(str, Enum):
    TRANSMISSIVE = "transmissive"
    RECORDING = "recording"


class ModelKind(str, Enum):
    QM = "qm"
    HIDDEN_VARIABLE = "hidden_variable"


@dataclass(frozen=True)
class Protocol:
    """The alternating measurement schedule of one experiment."""
    obs_a: Observable
    obs_b: Observable
    dt: float
    max_steps: int
    mode: Mode = Mode.RECORDING
    pass_outcome: Outcome = Outcome.PLUS
    allow_parallel: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "pass_outcome", Outcome(self.pass_outcome))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgumentError(f"dt must be finite and strictly positive (got {self.dt!r})")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise InvalidArgumentError(f"max_steps must be a positive integer (got {self.max_steps!r})")
        if self.obs_a.label == self.obs_b.label:
            raise InvalidArgumentError(f"observables need distinct labels (both are {self.obs_a.label!r})")
        if self.obs_a.direction == self.obs_b.direction and not self.allow_parallel:
            raise InvalidArgumentError("obs_a and obs_b share a direction; set allow_parallel to test theta = 0")

    @property
    def theta(self) -> float:
        return angle_between(self.obs_a, self.obs_b)

    @property
    def labels(self) -> Tuple[str, str]:
        return self.obs_a.label, self.obs_b.label

    @property
    def spacing(self) -> float:
        """Time between consecutive measurements of the same observable."""
        return 2.0 * self.dt

    def observable_at(self, step: int) -> Observable:
        return self.obs_a if step % 2 == 0 else self.obs_b

    def label_offset(self, label: str) -> int:
        """First step at which `label` is measured."""
        if label == self.obs_a.label:
            return 0
        if label == self.obs_b.label:
            return 1
        raise InvalidArgumentError(f"unknown observable label {label!r}; protocol measures {self.labels}")


@dataclass(frozen=True)
class ModelSpec:
    """Which physics generates the outcomes, with its initial condition and noise."""
    kind: ModelKind
    initial_state: Optional[QubitState] = None
    initial_lambda: Optional[HiddenVariable] = None
    tau: float = math.inf
    kernel: DisturbanceKernel = field(default_factory=DisturbanceKernel)
    outcome_rule: OutcomeRule = SIGN_RULE

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not self.tau > 0:
            raise InvalidArgumentError(f"tau must be strictly positive (got {self.tau!r})")
        if self.kind is ModelKind.QM and self.initial_state is None:
            raise InvalidArgumentError("the quantum model needs an initial_state")

    @classmethod
    def quantum(cls, initial_state: QubitState) -> "ModelSpec":
        return cls(ModelKind.QM, initial_state=initial_state)

    @classmethod
    def hidden_variable(cls, tau: float = math.inf, kernel: DisturbanceKernel = None,
                        initial_lambda: Optional[HiddenVariable] = None,
                        outcome_rule: OutcomeRule = SIGN_RULE) -> "ModelSpec":
        """initial_lambda = None draws lambda uniformly on the sphere for every run."""
        return cls(ModelKind.HIDDEN_VARIABLE, initial_lambda=initial_lambda, tau=tau,
                   kernel=kernel or DisturbanceKernel(), outcome_rule=outcome_rule)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """The outcomes of one run; step k measured labels[k % 2]."""
    values: np.ndarray
    labels: Tuple[str, str]
    absorbed_at: Optional[int]
    seed_path: SeedPath

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int8)
        if values.ndim != 1 or len(values) == 0:
            raise InvalidArgumentError("a record needs at least one outcome")
        if not np.all((values == 1) | (values == -1)):
            raise InvalidArgumentError("record outcomes must be +1 or -1")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, MeasurementRecord):
            return NotImplemented
        return (self.labels == other.labels and self.absorbed_at == other.absorbed_at
                and self.seed_path == other.seed_path and np.array_equal(self.values, other.values))

    def __len__(self):
        return len(self.values)

    @property
    def outcomes(self) -> Tuple[Tuple[int, str, Outcome], ...]:
        """(step, observable label, outcome) for every recorded step."""
        return tuple((step, self.labels[step % 2], Outcome(int(v))) for step, v in enumerate(self.values))

    @property
    def outcome_string(self) -> str:
        return "".join("+" if v > 0 else "-" for v in self.values)

    def values_for(self, label: str) -> np.ndarray:
        """The subsequence of outcomes of one observable."""
        return self.values[self.labels.index(label)::2]


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Independent runs of one model under one protocol."""
    protocol: Protocol
    model: ModelSpec
    records: Tuple[MeasurementRecord, ...]
    master_seed: int

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for index, record in enumerate(self.records):
            if record.seed_path != (self.master_seed, index):
                raise InvalidArgumentError(f"record {index} has seed path {record.seed_path}, "
                                           f"expected {(self.master_seed, index)}")

    def __eq__(self, other):
        if not isinstance(other, EnsembleResult):
            return NotImplemented
        return (self.protocol == other.protocol and self.model == other.model
                and self.master_seed == other.master_seed and self.records == other.records)

    def __len__(self):
        return len(self.records)

    def __iter__(self) -> Iterator[MeasurementRecord]:
        return iter(self.records)

    def outcome_matrix(self) -> np.ndarray:
        """(runs, max_steps) int8 matrix of outcomes, 0 where a run had already been absorbed."""
        matrix = np.zeros((len(self.records), self.protocol.max_steps), dtype=np.int8)
        for row, record in zip(matrix, self.records):
            row[:len(record)] = record.values
        return matrix

    def observable_matrix(self, label: str) -> np.ndarray:
        """Columns of outcome_matrix belonging to one observable."""
        return self.outcome_matrix()[:, self.protocol.label_offset(label)::2]


def run_stream(master_seed: int, run_index: int) -> np.random.Generator:
    """The counter-based random stream owned by run `run_index` of ensemble `master_seed`."""
    if master_seed < 0 or run_index < 0:
        raise InvalidArgumentError(f"seed path must be non-negative (got {(master_seed, run_index)})")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(run_index,))))


def _simulate_quantum(model: ModelSpec, protocol: Protocol, streams: List[np.random.Generator]):
    steps = protocol.max_steps
    uniforms = np.stack([rng.random(steps) for rng in streams])
    n = len(streams)
    bx, by, bz = (np.full(n, c) for c in model.initial_state.bloch)

    def step(k, d, alive):
        nonlocal bx, by, bz
        p = 0.5 * (1.0 + (bx * d[0] + by * d[1] + bz * d[2]))
        p = np.minimum(1.0, np.maximum(0.0, p))
        s = np.where(uniforms[:, k] < p, 1, -1).astype(np.int8)
        bx, by, bz = s * d[0], s * d[1], s * d[2]
        return s

    return _run_steps(protocol, n, step)


def _simulate_hidden(model: ModelSpec, protocol: Protocol, streams: List[np.random.Generator]):
    steps = protocol.max_steps
    n = len(streams)
    kernel = model.kernel
    mean_count = 0.0 if math.isinf(model.tau) else protocol.dt / model.tau

    lambdas = np.empty((n, 3))
    counts = np.zeros((n, steps), dtype=np.int64)
    normals = []
    for row, rng in enumerate(streams):
        if model.initial_lambda is None:
            lambdas[row] = normalize(rng.standard_normal(3))
        else:
            lambdas[row] = model.initial_lambda.direction
        if mean_count > 0:
            counts[row] = rng.poisson(mean_count, steps)
        if kernel.kind is KernelKind.REDRAW:
            normals.append(rng.standard_normal((steps, 3)) if mean_count > 0 else None)
        else:
            normals.append(rng.standard_normal((int(counts[row].sum()), 3)))

    redraw_normals = None
    if kernel.kind is KernelKind.REDRAW and mean_count > 0:
        redraw_normals = np.stack(normals)
    offsets = np.zeros(n, dtype=np.int64)

    def step(k, d, alive):
        hit = counts[:, k] > 0
        if hit.any():
            if redraw_normals is not None:
                x, y, z = redraw_normals[hit, k, 0], redraw_normals[hit, k, 1], redraw_normals[hit, k, 2]
                length = np.sqrt(x * x + y * y + z * z)
                lambdas[hit] = np.column_stack((x / length, y / length, z / length))
            elif kernel.kind is KernelKind.DIFFUSION:
                for row in np.flatnonzero(hit):
                    c = counts[row, k]
                    block = normals[row][offsets[row]:offsets[row] + c]
                    lambdas[row] = kernel.apply(tuple(lambdas[row]), block)
                    offsets[row] += c
        return model.outcome_rule.outcomes(lambdas, d)

    return _run_steps(protocol, n, step)


def _run_steps(protocol: Protocol, n: int, step):
    values = np.zeros((n, protocol.max_steps), dtype=np.int8)
    absorbed = np.full(n, -1, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    transmissive = protocol.mode is Mode.TRANSMISSIVE
    pass_value = int(protocol.pass_outcome)

    for k in range(protocol.max_steps):
        s = step(k, protocol.observable_at(k).direction, alive)
        values[alive, k] = s[alive]
        if transmissive:
            failed = alive & (s != pass_value)
            absorbed[failed] = k
            alive &= ~failed
            if not alive.any():
                break

    return values, absorbed


def _simulate_batch(model: ModelSpec, protocol: Protocol, master_seed: int,
                    run_indices: Sequence[int]) -> List[MeasurementRecord]:
    streams = [run_stream(master_seed, i) for i in run_indices]
    if model.kind is ModelKind.QM:
        values, absorbed = _simulate_quantum(model, protocol, streams)
    else:
        values, absorbed = _simulate_hidden(model, protocol, streams)

    records = []
    for row, run_index in enumerate(run_indices):
        absorbed_at = int(absorbed[row]) if absorbed[row] >= 0 else None
        length = protocol.max_steps if absorbed_at is None else absorbed_at + 1
        records.append(MeasurementRecord(values[row, :length], protocol.labels, absorbed_at, (master_seed, run_index)))
    return records


def run_sequence(model: ModelSpec, protocol: Protocol, seed_path: SeedPath) -> MeasurementRecord:
    """Simulates one run; the result depends only on (model, protocol, seed_path)."""
    master_seed, run_index = seed_path
    return _simulate_batch(model, protocol, master_seed, [run_index])[0]


def run_ensemble(model: ModelSpec, protocol: Protocol, size: int, master_seed: int,
                 workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE) -> EnsembleResult:
    """
    Simulates `size` independent runs, run i on seed path (master_seed, i).

    The result is identical for any worker count and chunk size.
    """
    if int(size) != size or size < 1:
        raise InvalidArgumentError(f"ensemble size must be a positive integer (got {size!r})")
    if workers < 1 or chunk_size < 1:
        raise InvalidArgumentError(f"workers and chunk_size must be positive (got {workers}, {chunk_size})")

    started = time.perf_counter()
    chunks = [range(start, min(start + chunk_size, size)) for start in range(0, size, chunk_size)]

    if workers == 1 or len(chunks) == 1:
        batches = [_simulate_batch(model, protocol, master_seed, chunk) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda chunk: _simulate_batch(model, protocol, master_seed, chunk), chunks))

    records = [record for batch in batches for record in batch]
    logger.info("[SIMULATE] %s model, %s mode, theta = %.6g rad, dt = %s, tau = %s: %d runs in %.2f s.",
                model.kind.value, protocol.mode.value, protocol.theta, convert_seconds(protocol.dt),
                convert_seconds(model.tau), size, time.perf_counter() - started)
    return EnsembleResult(protocol, model, tuple(records), master_seed)
