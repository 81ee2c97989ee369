"""Batch Monte Carlo experiments with CSV/JSON persistence.

Each experiment sweeps trajectory lengths, derives every random stream
from the master seed, and emits a CSV table plus a JSON manifest holding
the full configuration, so any output file can be regenerated bit-for-bit.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import NamedTuple

import numpy as np

from .gof import (
    FixedAlpha,
    RadiusEstimate,
    SampledAlpha,
    TestConfig,
    dn_estimate,
    sampling_radius_estimate,
    statistic_samples,
    test_dynamic_graph,
    with_fixed_radius,
)
from .models import (
    KIND_PA,
    KIND_UNIFORM,
    ModelSpec,
    replay,
    sample_trajectory,
    step_distribution,
)
from .rng import TAG_EXPERIMENT, TAG_TAIL, derive_seed

EXPERIMENT_SUCCESS = "success-rate"
EXPERIMENT_CONCENTRATION = "concentration"
EXPERIMENT_TAIL = "tail-exponent"
EXPERIMENT_RADIUS_SCAN = "radius-scan"
EXPERIMENT_CALIBRATION = "calibration"

EXPERIMENTS = (
    EXPERIMENT_SUCCESS,
    EXPERIMENT_CONCENTRATION,
    EXPERIMENT_TAIL,
    EXPERIMENT_RADIUS_SCAN,
    EXPERIMENT_CALIBRATION,
)

EXCEEDANCE_LEVELS = (0.01, 0.02, 0.05)

# Tail fits start at the probability a degree-10 vertex would receive,
# excluding small-degree lattice artifacts.
TAIL_FIT_MIN_DEGREE = 10
TAIL_BINS = 32
MIN_TAIL_BINS = 5


class Table(NamedTuple):
    header: list[str]
    rows: list[list]


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    null_model: ModelSpec
    alt_model: ModelSpec | None
    n_values: tuple[int, ...]
    replications: int
    test_config: TestConfig
    output_path: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ValueError("n_values must be increasing")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")


@dataclass(frozen=True)
class TailDiagnostic:
    """Binned spectrum of a model's conditional probabilities at one time.

    counts[i] is the mean number of vertices whose probability falls in
    bin i, averaged over replications; fitted_gamma is the log-log slope
    of the per-bin density over the tail region. A single-atom spectrum
    (uniform attachment) is flagged degenerate with an undefined exponent.
    """

    t: int
    q_bins: np.ndarray
    counts: np.ndarray
    fitted_gamma: float
    degenerate: bool
    populated_tail_bins: int


@dataclass(frozen=True)
class CalibrationResult:
    """Measured separation between two models on the statistic's scale."""

    D_suggested: float
    radius_null: RadiusEstimate
    radius_alt: RadiusEstimate
    cross_mean: float
    dn: float
    n: int
    replications: int


def _effective_test_config(cfg: ExperimentConfig) -> TestConfig:
    if cfg.test_config.null_model == cfg.null_model:
        return cfg.test_config
    return TestConfig(
        null_model=cfg.null_model,
        D=cfg.test_config.D,
        width_fraction=cfg.test_config.width_fraction,
        probe_fraction=cfg.test_config.probe_fraction,
        alpha_mode=cfg.test_config.alpha_mode,
        seed=cfg.test_config.seed,
    )


def _radius_for(tc: TestConfig, n: int, seed: int) -> RadiusEstimate:
    if isinstance(tc.alpha_mode, FixedAlpha):
        return RadiusEstimate(mean=tc.alpha_mode.radius, std=0.0, replications=0, n=n)
    return sampling_radius_estimate(tc.null_model, n, tc, tc.alpha_mode.replications, seed)


def run_success_experiment(cfg: ExperimentConfig) -> Table:
    """Accuracy of the test on trajectories from both hypotheses.

    Per n, the threshold radius is estimated once from the null model and
    shared by all tested trajectories; success combines the per-hypothesis
    accuracies with equal priors.
    """
    if cfg.alt_model is None or cfg.alt_model == cfg.null_model:
        raise ValueError("degenerate config: alternative must differ from the null model")
    tc = _effective_test_config(cfg)
    seed = tc.seed
    header = ["n", "acc_M0", "acc_M1", "success", "mean_S_M0", "mean_S_M1", "alpha"]
    rows = []
    for k, n in enumerate(cfg.n_values):
        radius = _radius_for(tc, n, derive_seed(seed, TAG_EXPERIMENT, k, 0))
        tcn = with_fixed_radius(tc, radius.mean)
        alpha = radius.mean + tc.D / 2
        stats = {0: [], 1: []}
        correct = {0: 0, 1: 0}
        for hyp, model in ((0, cfg.null_model), (1, cfg.alt_model)):
            for i in range(cfg.replications):
                traj = sample_trajectory(model, n, derive_seed(seed, TAG_EXPERIMENT, k, 1 + hyp, i))
                report = test_dynamic_graph(traj, tcn, seed=derive_seed(seed, TAG_EXPERIMENT, k, 3 + hyp, i))
                stats[hyp].append(report.S)
                correct[hyp] += int(report.decision == hyp)
        acc0 = correct[0] / cfg.replications
        acc1 = correct[1] / cfg.replications
        rows.append(
            [n, acc0, acc1, (acc0 + acc1) / 2,
             float(np.mean(stats[0])), float(np.mean(stats[1])), alpha]
        )
    return Table(header, rows)


def run_concentration_experiment(cfg: ExperimentConfig) -> Table:
    """Spread of the statistic under the null model across trajectory lengths."""
    if cfg.replications < 10:
        raise ValueError("concentration needs at least 10 replications")
    tc = _effective_test_config(cfg)
    header = ["n", "mean_S", "std_S", "cv"] + [f"exceed_{c:g}" for c in EXCEEDANCE_LEVELS]
    rows = []
    for k, n in enumerate(cfg.n_values):
        values = statistic_samples(
            cfg.null_model, cfg.null_model, n, tc, cfg.replications,
            derive_seed(tc.seed, TAG_EXPERIMENT, k),
        )
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1))
        cv = std / mean if mean > 0 else float("nan")
        exceed = [float(np.mean(np.abs(values - mean) > c * n)) for c in EXCEEDANCE_LEVELS]
        rows.append([n, mean, std, cv] + exceed)
    return Table(header, rows)


def _degree_probability(model: ModelSpec, degree: int, t: int) -> float:
    """Probability a degree-`degree` vertex receives one choice at state time t."""
    if model.kind == KIND_PA:
        return degree / (2 * model.m * t)
    if model.kind == KIND_UNIFORM:
        return 1.0 / t
    return (degree + model.a) / (2 * model.m * t + model.a * t)


def tail_exponent_diagnostic(
    model: ModelSpec, n: int, replications: int, seed: int, bins: int = TAIL_BINS
) -> TailDiagnostic:
    """Fit the power-law exponent of the conditional probability spectrum.

    Histograms the conditional probabilities at the end of simulated
    trajectories into log-spaced bins, averages counts over replications,
    and fits the log-log slope of the per-bin density over the region at
    and above the degree-10 probability.
    """
    if n < 1000:
        raise ValueError("tail diagnostic needs n >= 1000")
    if replications < 1:
        raise ValueError("need at least one replication")
    spectra = []
    for i in range(replications):
        traj = sample_trajectory(model, n, derive_seed(seed, TAG_TAIL, i))
        state = replay(traj, n - 1)
        spectra.append(step_distribution(model, state).mass)
    qmin = min(float(s.min()) for s in spectra)
    qmax = max(float(s.max()) for s in spectra)
    if qmin == qmax:
        edges = np.array([qmin * (1 - 1e-9), qmax * (1 + 1e-9)])
        counts = np.array([float(spectra[0].size)])
        return TailDiagnostic(
            t=n, q_bins=edges, counts=counts,
            fitted_gamma=float("nan"), degenerate=True, populated_tail_bins=0,
        )
    edges = np.geomspace(qmin, qmax, bins + 1)
    edges[0] *= 1 - 1e-12
    edges[-1] *= 1 + 1e-12
    counts = np.mean([np.histogram(s, bins=edges)[0] for s in spectra], axis=0)
    centers = np.sqrt(edges[:-1] * edges[1:])
    density = counts / np.diff(edges)
    q_fit_min = _degree_probability(model, TAIL_FIT_MIN_DEGREE, n - 1)
    sel = (centers >= q_fit_min) & (counts > 0)
    populated = int(np.count_nonzero(sel))
    if populated < MIN_TAIL_BINS:
        raise ValueError("insufficient tail: fewer than 5 populated bins")
    slope = float(np.polyfit(np.log(centers[sel]), np.log(density[sel]), 1)[0])
    return TailDiagnostic(
        t=n, q_bins=edges, counts=counts,
        fitted_gamma=slope, degenerate=False, populated_tail_bins=populated,
    )


def calibrate_D(
    m0: ModelSpec,
    m1: ModelSpec,
    n: int,
    replications: int,
    seed: int,
    width_fraction: float = 0.1,
    probe_fraction: float = 0.5,
) -> CalibrationResult:
    """Suggest a separation constant from the measured statistic gap.

    Estimates both models' expected statistics against themselves and the
    alternative's statistic against the null; the suggestion is the gap
    between the cross mean and the null radius, which places the threshold
    radius + D/2 exactly halfway between the two statistic means at this n.
    The directed model distance is estimated alongside for reporting.
    """
    if replications < 10:
        raise ValueError("calibration needs at least 10 replications")
    if m0 == m1:
        raise ValueError("models not separated at this n: identical mechanisms")
    tc = TestConfig(
        null_model=m0, D=1.0,
        width_fraction=width_fraction, probe_fraction=probe_fraction, seed=seed,
    )
    radius_null = sampling_radius_estimate(m0, n, tc, replications, derive_seed(seed, TAG_EXPERIMENT, 0))
    radius_alt = sampling_radius_estimate(m1, n, tc, replications, derive_seed(seed, TAG_EXPERIMENT, 1))
    cross = statistic_samples(m1, m0, n, tc, replications, derive_seed(seed, TAG_EXPERIMENT, 2))
    cross_mean = float(np.mean(cross))
    suggested = cross_mean - radius_null.mean
    if suggested <= 0:
        raise ValueError("models not separated at this n")
    dn = dn_estimate(m0, m1, n, replications, derive_seed(seed, TAG_EXPERIMENT, 3))
    return CalibrationResult(
        D_suggested=suggested,
        radius_null=radius_null,
        radius_alt=radius_alt,
        cross_mean=cross_mean,
        dn=dn,
        n=n,
        replications=replications,
    )


def run_tail_experiment(cfg: ExperimentConfig) -> Table:
    header = ["n", "fitted_gamma", "populated_tail_bins", "degenerate"]
    rows = []
    for k, n in enumerate(cfg.n_values):
        diag = tail_exponent_diagnostic(
            cfg.null_model, n, cfg.replications, derive_seed(cfg.test_config.seed, TAG_EXPERIMENT, k)
        )
        rows.append([n, diag.fitted_gamma, diag.populated_tail_bins, int(diag.degenerate)])
    return Table(header, rows)


def run_radius_scan(cfg: ExperimentConfig) -> Table:
    tc = _effective_test_config(cfg)
    header = ["n", "radius_mean", "radius_std", "replications"]
    rows = []
    for k, n in enumerate(cfg.n_values):
        est = sampling_radius_estimate(
            cfg.null_model, n, tc, cfg.replications, derive_seed(tc.seed, TAG_EXPERIMENT, k)
        )
        rows.append([n, est.mean, est.std, est.replications])
    return Table(header, rows)


def run_calibration_experiment(cfg: ExperimentConfig) -> Table:
    if cfg.alt_model is None or cfg.alt_model == cfg.null_model:
        raise ValueError("degenerate config: alternative must differ from the null model")
    tc = _effective_test_config(cfg)
    header = ["n", "D_suggested", "radius_M0_mean", "radius_M0_std",
              "radius_M1_mean", "radius_M1_std", "cross_mean", "dn"]
    rows = []
    for k, n in enumerate(cfg.n_values):
        cal = calibrate_D(
            cfg.null_model, cfg.alt_model, n, cfg.replications,
            derive_seed(tc.seed, TAG_EXPERIMENT, 100 + k),
            width_fraction=tc.width_fraction, probe_fraction=tc.probe_fraction,
        )
        rows.append(
            [n, cal.D_suggested, cal.radius_null.mean, cal.radius_null.std,
             cal.radius_alt.mean, cal.radius_alt.std, cal.cross_mean, cal.dn]
        )
    return Table(header, rows)


_RUNNERS = {
    EXPERIMENT_SUCCESS: run_success_experiment,
    EXPERIMENT_CONCENTRATION: run_concentration_experiment,
    EXPERIMENT_TAIL: run_tail_experiment,
    EXPERIMENT_RADIUS_SCAN: run_radius_scan,
    EXPERIMENT_CALIBRATION: run_calibration_experiment,
}


# --- persistence ---


def write_csv(path: str, table: Table) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.header)
        writer.writerows(table.rows)


def _parse_cell(cell: str):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_csv(path: str) -> Table:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[_parse_cell(cell) for cell in row] for row in reader]
    return Table(header, rows)


def model_to_dict(model: ModelSpec) -> dict:
    return {"kind": model.kind, "m": model.m, "a": model.a, "label": model.label}


def model_from_dict(d: dict) -> ModelSpec:
    return ModelSpec(kind=d["kind"], m=d.get("m", 1), a=d.get("a", 0.0), label=d.get("label", ""))


def test_config_to_dict(tc: TestConfig) -> dict:
    if isinstance(tc.alpha_mode, FixedAlpha):
        alpha = {"mode": "fixed", "radius": tc.alpha_mode.radius}
    else:
        alpha = {"mode": "sampled", "replications": tc.alpha_mode.replications}
    return {
        "null_model": model_to_dict(tc.null_model),
        "D": tc.D,
        "width_fraction": tc.width_fraction,
        "probe_fraction": tc.probe_fraction,
        "alpha_mode": alpha,
        "seed": tc.seed,
    }


def test_config_from_dict(d: dict) -> TestConfig:
    alpha = d.get("alpha_mode", {"mode": "sampled", "replications": 32})
    if alpha["mode"] == "fixed":
        mode = FixedAlpha(radius=float(alpha["radius"]))
    else:
        mode = SampledAlpha(replications=int(alpha.get("replications", 32)))
    return TestConfig(
        null_model=model_from_dict(d["null_model"]),
        D=float(d["D"]),
        width_fraction=float(d.get("width_fraction", 0.1)),
        probe_fraction=float(d.get("probe_fraction", 0.5)),
        alpha_mode=mode,
        seed=int(d.get("seed", 0)),
    )


def experiment_config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "experiment": cfg.experiment,
        "null_model": model_to_dict(cfg.null_model),
        "alt_model": model_to_dict(cfg.alt_model) if cfg.alt_model is not None else None,
        "n_values": list(cfg.n_values),
        "replications": cfg.replications,
        "test_config": test_config_to_dict(cfg.test_config),
        "output_path": cfg.output_path,
    }


def experiment_config_from_dict(d: dict) -> ExperimentConfig:
    alt = d.get("alt_model")
    return ExperimentConfig(
        experiment=d["experiment"],
        null_model=model_from_dict(d["null_model"]),
        alt_model=model_from_dict(alt) if alt else None,
        n_values=tuple(d["n_values"]),
        replications=int(d["replications"]),
        test_config=test_config_from_dict(d["test_config"]),
        output_path=d.get("output_path", ""),
    )


class ExperimentResult(NamedTuple):
    table: Table
    csv_path: str
    manifest_path: str


def _default_output_path(cfg: ExperimentConfig) -> str:
    alt = cfg.alt_model.label if cfg.alt_model is not None else "none"
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    return f"{cfg.experiment}_{cfg.null_model.label}_{alt}_{stamp}.csv"


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run the configured experiment, writing the CSV and its JSON manifest.

    An explicit output_path is used verbatim (reruns are byte-identical);
    otherwise a timestamped name is generated.
    """
    table = _RUNNERS[cfg.experiment](cfg)
    csv_path = cfg.output_path or _default_output_path(cfg)
    write_csv(csv_path, table)
    manifest_path = os.path.splitext(csv_path)[0] + ".json"
    manifest = {
        "experiment_config": experiment_config_to_dict(cfg),
        "seed": cfg.test_config.seed,
        "csv": os.path.basename(csv_path),
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return ExperimentResult(table=table, csv_path=csv_path, manifest_path=manifest_path)
