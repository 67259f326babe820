"""
JSON and CSV forms of ensembles, analysis results and feasibility tables.

JSON floats keep Python's shortest round-trip repr, so reading a file back gives bit-identical
numbers; +inf is written as the string "inf". CSV floats use 6 significant digits.
"""
import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List

from src.analysis.autocorrelation import CorrSeries
from src.analysis.fitting import FitResult
from src.analysis.hypothesis import TestResult
from src.analysis.survival import SurvivalPoint
from src.core import Observable, Outcome
from src.errors import InvalidArgumentError
from src.feasibility import FeasibilityReport, SweepTable
from src.models.hidden import HiddenVariable, get_outcome_rule
from src.models.quantum import QubitState
from src.noise import DisturbanceKernel
from src.simulate import EnsembleResult, MeasurementRecord, ModelKind, ModelSpec, Protocol
from src.util import decode_float, encode_float, format_sci

ENSEMBLE_FORMAT = "superdet-ensemble"
FORMAT_VERSION = 1

ENSEMBLE_CSV_COLUMNS = ["run_index", "step", "observable_label", "outcome", "absorbed"]
CORR_CSV_COLUMNS = ["kappa", "lag_time", "estimate", "std_error", "n_samples"]
PLOT_CSV_COLUMNS = ["kappa", "lag_time", "estimate", "std_error", "qm_prediction", "fit_prediction"]
SWEEP_CSV_COLUMNS = ["n_atoms", "band_gap_ev", "temperature_k", "recombination_time_s", "mirror_separation_m",
                     "tau_tilde_s", "bounce_time_s", "margin", "measurable"]


def write_json(data: Dict[str, Any], path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        json.dump(data, file, indent=2, allow_nan=False)
        file.write("\n")
    return path


def read_json(path) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as file:
        try:
            return json.load(file)
        except json.JSONDecodeError as err:
            raise InvalidArgumentError(f"malformed JSON in {path}: {err}") from err


def _write_csv(path, columns: List[str], rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
    return path


def _csv_float(value) -> str:
    if value is None:
        return ""
    return format_sci(float(value))


def observable_to_dict(obs: Observable) -> Dict[str, Any]:
    return {"label": obs.label, "direction": [encode_float(c) for c in obs.direction]}


def observable_from_dict(data: Dict[str, Any]) -> Observable:
    return Observable(tuple(decode_float(c) for c in data["direction"]), data["label"])


def protocol_to_dict(protocol: Protocol) -> Dict[str, Any]:
    return {
        "obs_a": observable_to_dict(protocol.obs_a),
        "obs_b": observable_to_dict(protocol.obs_b),
        "dt": encode_float(protocol.dt),
        "max_steps": protocol.max_steps,
        "mode": protocol.mode.value,
        "pass_outcome": int(protocol.pass_outcome),
        "allow_parallel": protocol.allow_parallel,
    }


def protocol_from_dict(data: Dict[str, Any]) -> Protocol:
    return Protocol(observable_from_dict(data["obs_a"]), observable_from_dict(data["obs_b"]),
                    decode_float(data["dt"]), int(data["max_steps"]), data["mode"],
                    Outcome.from_value(data["pass_outcome"]), bool(data.get("allow_parallel", False)))


def model_to_dict(model: ModelSpec) -> Dict[str, Any]:
    data = {"kind": model.kind.value}
    if model.kind is ModelKind.QM:
        data["initial_state"] = [encode_float(c) for c in model.initial_state.bloch]
    else:
        data["initial_lambda"] = ("uniform" if model.initial_lambda is None
                                  else [encode_float(c) for c in model.initial_lambda.direction])
        data["tau"] = encode_float(model.tau)
        data["kernel"] = {"kind": model.kernel.kind.value, "diffusion_angle": encode_float(model.kernel.diffusion_angle)}
        data["outcome_rule"] = model.outcome_rule.name
    return data


def model_from_dict(data: Dict[str, Any]) -> ModelSpec:
    if data["kind"] == ModelKind.QM.value:
        return ModelSpec.quantum(QubitState(tuple(decode_float(c) for c in data["initial_state"])))

    initial = data.get("initial_lambda", "uniform")
    initial_lambda = None if initial == "uniform" else HiddenVariable(tuple(decode_float(c) for c in initial))
    kernel = DisturbanceKernel(data["kernel"]["kind"], decode_float(data["kernel"]["diffusion_angle"]))
    return ModelSpec.hidden_variable(decode_float(data["tau"]), kernel, initial_lambda,
                                     get_outcome_rule(data.get("outcome_rule", "sign")))


def ensemble_to_dict(ens: EnsembleResult) -> Dict[str, Any]:
    return {
        "format": ENSEMBLE_FORMAT,
        "format_version": FORMAT_VERSION,
        "protocol": protocol_to_dict(ens.protocol),
        "model": model_to_dict(ens.model),
        "master_seed": ens.master_seed,
        "size": len(ens),
        "records": [
            {"run_index": index, "outcomes": record.outcome_string, "absorbed_at": record.absorbed_at}
            for index, record in enumerate(ens.records)
        ],
    }


def ensemble_from_dict(data: Dict[str, Any]) -> EnsembleResult:
    if data.get("format") != ENSEMBLE_FORMAT:
        raise InvalidArgumentError(f"not an ensemble file (format = {data.get('format')!r})")

    protocol = protocol_from_dict(data["protocol"])
    model = model_from_dict(data["model"])
    master_seed = int(data["master_seed"])
    records = []
    for index, entry in enumerate(data["records"]):
        if int(entry["run_index"]) != index:
            raise InvalidArgumentError(f"record {index} is stored out of order (run_index = {entry['run_index']})")
        values = [int(Outcome.from_value(c)) for c in entry["outcomes"]]
        records.append(MeasurementRecord(values, protocol.labels, entry["absorbed_at"], (master_seed, index)))
    return EnsembleResult(protocol, model, tuple(records), master_seed)


def write_ensemble_json(ens: EnsembleResult, path) -> Path:
    return write_json(ensemble_to_dict(ens), path)


def read_ensemble_json(path) -> EnsembleResult:
    """
    Reads an ensemble file written by `simulate`.

    Raises:
        InvalidArgumentError: If the file is not valid JSON or not a complete ensemble.
    """
    data = read_json(path)
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"{path} is not an ensemble file")
    try:
        return ensemble_from_dict(data)
    except InvalidArgumentError as err:
        raise InvalidArgumentError(f"{path}: {err}") from err
    except KeyError as err:
        raise InvalidArgumentError(f"ensemble file {path} is missing key {err.args[0]!r}") from err
    except (AttributeError, TypeError, ValueError) as err:
        raise InvalidArgumentError(f"malformed ensemble file {path}: {err}") from err


def write_ensemble_csv(ens: EnsembleResult, path) -> Path:
    """One row per (run, step); `absorbed` is 1 on the step that absorbed the particle."""
    def rows():
        for index, record in enumerate(ens.records):
            for step, label, outcome in record.outcomes:
                yield [index, step, label, int(outcome), int(record.absorbed_at == step)]

    return _write_csv(path, ENSEMBLE_CSV_COLUMNS, rows())


def corr_series_to_dict(series: CorrSeries) -> Dict[str, Any]:
    return {
        "label": series.label,
        "estimator": series.estimator.value,
        "spacing": encode_float(series.spacing),
        "theta": None if series.theta is None else encode_float(series.theta),
        "binary": series.binary,
        "conditioned_on_survival": series.conditioned_on_survival,
        "omitted_kappas": list(series.omitted_kappas),
        "kappas": list(series.kappas),
        "estimates": [encode_float(v) for v in series.estimates],
        "std_errors": [encode_float(v) for v in series.std_errors],
        "n_samples": list(series.n_samples),
    }


def corr_series_from_dict(data: Dict[str, Any]) -> CorrSeries:
    theta = data.get("theta")
    return CorrSeries(tuple(data["kappas"]), tuple(decode_float(v) for v in data["estimates"]),
                      tuple(decode_float(v) for v in data["std_errors"]), tuple(data["n_samples"]),
                      data.get("label", "O"), decode_float(data.get("spacing", 1.0)), data.get("estimator", "first"),
                      bool(data.get("binary", False)), bool(data.get("conditioned_on_survival", False)),
                      None if theta is None else decode_float(theta), tuple(data.get("omitted_kappas", ())))


def write_corr_series_csv(series: CorrSeries, path) -> Path:
    rows = ([k, _csv_float(t), _csv_float(e), _csv_float(s), n] for k, t, e, s, n in
            zip(series.kappas, series.lag_times, series.estimates, series.std_errors, series.n_samples))
    return _write_csv(path, CORR_CSV_COLUMNS, rows)


def write_plot_csv(series: CorrSeries, fit: FitResult, path) -> Path:
    """kappa, lag time, estimate, error and the quantum and fitted predictions, ready for plotting."""
    qm = series.qm_prediction() or [None] * len(series)
    fitted = fit.predict(series.lag_times) if fit is not None else [None] * len(series)
    rows = ([k, _csv_float(t), _csv_float(e), _csv_float(s), _csv_float(q), _csv_float(f)] for k, t, e, s, q, f in
            zip(series.kappas, series.lag_times, series.estimates, series.std_errors, qm, fitted))
    return _write_csv(path, PLOT_CSV_COLUMNS, rows)


def fit_result_to_dict(fit: FitResult) -> Dict[str, Any]:
    return {
        "method": fit.method.value,
        "tau_hat": encode_float(fit.tau_hat),
        "ci_low": encode_float(fit.ci_low),
        "ci_high": encode_float(fit.ci_high),
        "tau_in_kappa": encode_float(fit.tau_in_kappa),
        "confidence": fit.confidence,
        "degenerate": fit.degenerate,
        "n_bootstrap": fit.n_bootstrap,
        "n_bootstrap_failed": fit.n_bootstrap_failed,
        "goodness": {k: encode_float(v) if isinstance(v, float) else v for k, v in asdict(fit.goodness).items()},
    }


def hypothesis_result_to_dict(result: TestResult) -> Dict[str, Any]:
    data = asdict(result)
    data["verdict"] = result.verdict.value
    return {k: encode_float(v) if isinstance(v, float) else v for k, v in data.items()}


def survival_to_rows(curve: List[SurvivalPoint]) -> List[List[str]]:
    return [[p.kappa, _csv_float(p.fraction), _csv_float(p.std_error)] for p in curve]


def write_survival_csv(curve: List[SurvivalPoint], path) -> Path:
    return _write_csv(path, ["kappa", "survival", "std_error"], survival_to_rows(curve))


def feasibility_to_dict(report: FeasibilityReport) -> Dict[str, Any]:
    data = {k: encode_float(v) if isinstance(v, float) else v for k, v in asdict(report).items()}
    data["tau_in_steps"] = encode_float(report.tau_in_steps)
    return data


def write_sweep_csv(table: SweepTable, path) -> Path:
    rows = ([_csv_float(row.detector.n_atoms), _csv_float(row.detector.band_gap), _csv_float(row.detector.temperature),
             _csv_float(row.detector.recombination_time), _csv_float(row.cavity.mirror_separation),
             _csv_float(row.report.tau_tilde), _csv_float(row.report.bounce_time), _csv_float(row.report.margin),
             str(row.report.measurable).lower()] for row in table.rows)
    return _write_csv(path, SWEEP_CSV_COLUMNS, rows)


def write_sweep_json(table: SweepTable, path) -> Path:
    data = {
        "threshold": encode_float(table.threshold),
        "axes": {axis: [encode_float(v) for v in getattr(table.grid, axis)] for axis in table.grid.AXES},
        "rows": [{k: encode_float(v) if isinstance(v, float) else v for k, v in row.as_dict().items()}
                 for row in table.rows],
    }
    return write_json(data, path)
