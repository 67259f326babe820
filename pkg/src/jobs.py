"""
This module contains the JobRunner class,
which is responsible for running one subcommand and writing its output files.
"""
import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from src import __version__
from src.analysis.autocorrelation import estimate_autocorrelation
from src.analysis.fitting import fit_exponential_decay
from src.analysis.hypothesis import qm_vs_superdet_test
from src.analysis.survival import survival_curve
from src.config import Config, load_sweep_grid
from src.core import Outcome, observable_from_angles, unit_vector
from src.errors import ConfigError
from src.feasibility import CavityParams, critical_temperature, describe, feasibility_report, max_atoms, \
    parameter_sweep
from src.logger import logger
from src.models.hidden import HiddenVariable
from src.models.quantum import QubitState
from src.noise import DetectorParams, DisturbanceKernel
from src.serialization import corr_series_to_dict, ensemble_to_dict, feasibility_to_dict, fit_result_to_dict, \
    hypothesis_result_to_dict, read_ensemble_json, write_corr_series_csv, write_ensemble_csv, write_json, \
    write_plot_csv, write_survival_csv, write_sweep_csv, write_sweep_json
from src.simulate import Mode, ModelSpec, Protocol, run_ensemble
from src.util import convert_seconds, encode_float


@dataclass
class RunManifest:
    """Everything needed to repeat one invocation."""
    tool_version: str
    subcommand: str
    resolved_config: Dict[str, Any]
    master_seed: Optional[int]
    output_paths: List[str] = field(default_factory=list)
    wall_time: float = 0.0


def _parse_direction(value: str, protocol: Protocol):
    """
    Resolves an initial-condition name to a Bloch vector.

    +a, -a, +b, -b are the eigen-directions of the two observables, pass is the direction halfway
    between +a and +b, mixed is the origin and x,y,z an explicit vector.
    """
    named = {
        "+a": protocol.obs_a.direction,
        "-a": protocol.obs_a.negated().direction,
        "+b": protocol.obs_b.direction,
        "-b": protocol.obs_b.negated().direction,
    }
    if value in named:
        return named[value]
    if value == "pass":
        return unit_vector([a + b for a, b in zip(protocol.obs_a.direction, protocol.obs_b.direction)])
    if value == "mixed":
        return (0.0, 0.0, 0.0)
    try:
        components = [float(c) for c in value.split(",")]
    except ValueError:
        components = []
    if len(components) != 3:
        raise ConfigError(f"initial must be +a, -a, +b, -b, pass, mixed, uniform or x,y,z (got {value!r})")
    return tuple(components)


class JobRunner:
    """
    Class for running the job of one subcommand.
    """
    def __init__(self, config: Config):
        self.config = config
        self.output_dir = Path(config.general.output_dir)
        self.workers = config.general.workers

    def run(self) -> RunManifest:
        """
        Runs the configured job and writes `<subcommand>_manifest.json` next to its outputs.
        """
        started = time.perf_counter()
        os.makedirs(self.output_dir, exist_ok=True)

        job = getattr(self, f"{self.config.subcommand}_job")
        outputs, master_seed = job(self.config.job)

        manifest = RunManifest(__version__, self.config.subcommand, self.config.resolved(), master_seed,
                               [str(path) for path in outputs], time.perf_counter() - started)
        manifest_path = write_json(asdict(manifest), self._output(f"{self.config.subcommand}_manifest.json"))
        logger.info("[JOB] %s finished in %.2f s. Manifest written to %s.",
                    self.config.subcommand, manifest.wall_time, manifest_path)
        return manifest

    def _output(self, name: str) -> Path:
        return self.output_dir / name

    def simulate_job(self, settings):
        protocol = Protocol(
            observable_from_angles(0.0, 0.0, "A"),
            observable_from_angles(math.radians(settings.theta_deg), 0.0, "B"),
            settings.dt,
            settings.max_steps,
            Mode(settings.mode),
            Outcome.from_value(settings.pass_outcome),
            allow_parallel=settings.theta_deg % 360 == 0,
        )

        if settings.model == "qm":
            initial = settings.initial or "+a"
            if initial == "uniform":
                raise ConfigError("initial = uniform only applies to the hidden-variable model")
            model = ModelSpec.quantum(QubitState(_parse_direction(initial, protocol)))
        else:
            tau = settings.tau if settings.tau_steps is None else settings.tau_steps * settings.dt
            kernel = DisturbanceKernel(settings.kernel, math.radians(settings.diffusion_angle_deg))
            initial = settings.initial or "uniform"
            initial_lambda = None if initial == "uniform" else HiddenVariable(_parse_direction(initial, protocol))
            model = ModelSpec.hidden_variable(tau, kernel, initial_lambda)

        ens = run_ensemble(model, protocol, settings.runs, settings.seed, workers=self.workers)

        outputs = [write_json(ensemble_to_dict(ens), self._output("ensemble.json")),
                   write_ensemble_csv(ens, self._output("ensemble_steps.csv"))]
        if protocol.mode is Mode.TRANSMISSIVE:
            curve = survival_curve(ens)
            outputs.append(write_survival_csv(curve, self._output("survival.csv")))
            logger.info("[SIMULATE] %.4g of %d runs pass every step.", curve[-1].fraction, len(ens))
        return outputs, settings.seed

    def analyze_job(self, settings):
        ens = read_ensemble_json(settings.input)
        series = estimate_autocorrelation(ens, settings.label, settings.max_kappa, settings.estimator,
                                          settings.accept_survivorship_bias)
        fit = fit_exponential_decay(series, settings.fit_method, settings.bootstrap, settings.confidence, settings.seed)

        logger.info("[ANALYZE] tau_hat = %s (%s lags), %g%% interval [%s, %s].",
                    convert_seconds(fit.tau_hat), f"{fit.tau_in_kappa:.4g}", 100 * fit.confidence,
                    convert_seconds(fit.ci_low), convert_seconds(fit.ci_high))
        print(f"tau_hat = {encode_float(fit.tau_hat)} s, interval = [{encode_float(fit.ci_low)}, "
              f"{encode_float(fit.ci_high)}] s")

        outputs = [
            write_json({"series": corr_series_to_dict(series), "fit": fit_result_to_dict(fit)},
                       self._output("correlation.json")),
            write_corr_series_csv(series, self._output("correlation.csv")),
            write_plot_csv(series, fit, self._output("correlation_plot.csv")),
        ]
        if ens.protocol.mode is Mode.TRANSMISSIVE:
            outputs.append(write_survival_csv(survival_curve(ens), self._output("survival.csv")))
        return outputs, ens.master_seed

    def test_job(self, settings):
        ens = read_ensemble_json(settings.input)
        result = qm_vs_superdet_test(ens, settings.alpha, settings.label, settings.bootstrap, settings.seed)
        print(f"verdict = {result.verdict.value}, p_value = {result.p_value:.4g}, statistic = {result.statistic:.4g}")
        return [write_json(hypothesis_result_to_dict(result), self._output("test.json"))], ens.master_seed

    def feasibility_job(self, settings):
        det = DetectorParams(settings.n_atoms, settings.band_gap_ev, settings.temperature_k,
                             settings.recombination_ns * 1e-9)
        cavity = CavityParams(settings.mirror_separation_um * 1e-6)
        report = feasibility_report(det, cavity, settings.threshold)
        logger.info("[FEASIBILITY] %s", report.notes)
        print(describe(report))

        data = feasibility_to_dict(report)
        data["critical_temperature_k"] = encode_float(critical_temperature(det, cavity, settings.threshold))
        data["max_atoms"] = encode_float(max_atoms(det, cavity, settings.threshold))
        return [write_json(data, self._output("feasibility.json"))], None

    def sweep_job(self, settings):
        grid = load_sweep_grid(settings.grid)
        table = parameter_sweep(grid, settings.threshold, settings.max_rows)
        outputs = [write_sweep_csv(table, self._output("sweep.csv")),
                   write_sweep_json(table, self._output("sweep.json"))]
        print(f"{sum(row.report.measurable for row in table.rows)} of {len(table)} grid points are measurable")
        return outputs, None
