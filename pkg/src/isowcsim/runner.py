"""Scenario execution: the full waveform chain, run pooling, parameter sweeps."""
from __future__ import annotations

import dataclasses
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, channel, receiver, transmitter
from .errors import InvalidParameterError, SimulationError
from .scenario import Scenario, apply_override, parse_sweep_value, scenario_to_text


@dataclass(frozen=True)
class MetricsRecord:
    """Measured outcome of one scenario (waveform path)."""

    label: str
    q_factor: float
    ber: float
    eye_height_a: float
    rms_jitter_s: float
    rx_optical_dbm: float
    electrical_dbm: float
    saturated: bool
    decision_instant: int
    threshold_a: float
    runs_pooled: int


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    record: MetricsRecord
    delta_db: float


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    param: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class SweepResult:
    param: str
    rows: tuple[SweepRow, ...]
    failed_index: int | None = None
    failure_message: str | None = None

    @property
    def ok(self) -> bool:
        return self.failed_index is None


def _run_streams(base_seed: int, run_index: int):
    """Three independent generators (laser phase, ASE, APD) for one run."""
    root = np.random.SeedSequence(entropy=base_seed, spawn_key=(run_index,))
    return [np.random.default_rng(child) for child in root.spawn(3)]


def _simulate_once(s: Scenario, run_index: int):
    """One pass through the block chain; returns (eye, rx power W, elec signal)."""
    phase_rng, ase_rng, apd_rng = _run_streams(s.rng_seed, run_index)
    flags = s.noise_flags()
    stage = "setup"
    try:
        stage = "prbs_generate"
        bits = s.bits()
        grid = s.grid()
        stage = "nrz_drive"
        drive = transmitter.nrz_drive(bits, grid, s.nrz_rise_fraction)
        stage = "cw_laser"
        field = transmitter.cw_laser(grid, s.laser_params(), phase_rng)
        stage = "mzm_modulate"
        field = transmitter.mzm_modulate(field, drive, s.mzm_params())
        stage = "edfa_amplify"
        field = transmitter.edfa_amplify(field, s.edfa_params(), ase_rng, flags.ase)
        stage = "propagate"
        field = channel.propagate(field, s.owc_params())
        rx_power_w = float(np.mean(field.power))
        stage = "apd_detect"
        current = receiver.apd_detect(field, s.apd_params(), apd_rng, flags)
        stage = "bessel_lowpass"
        filtered = receiver.bessel_lowpass(current, s.filter_params())
        stage = "fold_eye"
        eye = analysis.fold_eye(filtered, bits, s.excluded_bits)
    except Exception as exc:
        raise SimulationError(stage, str(exc)) from exc
    return eye, rx_power_w, filtered


def simulate_pooled(s: Scenario) -> tuple[analysis.EyeDiagram, float, float]:
    """Pooled eye over ``runs_to_pool`` independent runs, plus power probes.

    Returns (eye, mean received optical power in W, mean squared current in A^2).
    Deterministic for a fixed rng_seed: each run draws from generators spawned
    off (seed, run_index), so results do not depend on execution order.
    """
    s.validate()
    eyes = []
    rx_powers = []
    elec_means = []
    for run_index in range(s.runs_to_pool):
        eye, rx_power_w, filtered = _simulate_once(s, run_index)
        eyes.append(eye)
        rx_powers.append(rx_power_w)
        elec_means.append(float(np.mean(filtered.samples ** 2)))
    pooled = analysis.pool_eyes(eyes)
    return pooled, float(np.mean(rx_powers)), float(np.mean(elec_means))


def run_scenario(s: Scenario) -> MetricsRecord:
    """Execute the chain ``runs_to_pool`` times and report pooled eye metrics."""
    pooled, rx_mean_w, elec_mean = simulate_pooled(s)
    try:
        q = analysis.estimate_q(pooled)
    except Exception as exc:
        raise SimulationError("estimate_q", str(exc)) from exc
    return MetricsRecord(
        label=s.label,
        q_factor=q.q_factor,
        ber=q.ber_estimate,
        eye_height_a=q.eye_height,
        rms_jitter_s=q.rms_jitter,
        rx_optical_dbm=(
            10.0 * np.log10(rx_mean_w / 1e-3) if rx_mean_w > 0 else float("-inf")
        ),
        electrical_dbm=(
            10.0 * np.log10(elec_mean / 1e-3) if elec_mean > 0 else float("-inf")
        ),
        saturated=q.saturated,
        decision_instant=q.decision_instant,
        threshold_a=q.threshold,
        runs_pooled=s.runs_to_pool,
    )


def row_seed(base_seed: int, param: str, value: float) -> int:
    """Derived per-row seed bound to the parameter value, not its position.

    Permuting the sweep values therefore permutes rows without changing any
    row's content.
    """
    digest = hashlib.blake2b(
        f"{base_seed}|{param}|{value!r}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def make_sweep(base: Scenario, param: str, raw_values) -> SweepSpec:
    """Validate a sweep request: known numeric parameter, nonempty values."""
    values = tuple(parse_sweep_value(param, v) for v in raw_values)
    if not values:
        raise InvalidParameterError("sweep needs at least one value")
    return SweepSpec(base=base, param=param, values=values)


def _row_scenario(spec: SweepSpec, value: float) -> Scenario:
    s = apply_override(spec.base, spec.param, value)
    return dataclasses.replace(
        s, rng_seed=row_seed(spec.base.rng_seed, spec.param, value)
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run one metrics row per sweep value, concurrently up to ``workers``.

    Rows are pre-validated before any execution starts, carry derived seeds,
    and are assembled in input order whatever the completion order.  A row
    that fails at runtime aborts the sweep but the rows that succeeded are
    returned so callers can persist partial results.
    """
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    scenarios = [_row_scenario(spec, v) for v in spec.values]

    results: list[MetricsRecord | None] = [None] * len(scenarios)
    failed_index: int | None = None
    failure_message: str | None = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_scenario, s) for s in scenarios]
        for i, future in enumerate(futures):
            try:
                results[i] = future.result()
            except Exception as exc:
                if failed_index is None:
                    failed_index = i
                    failure_message = str(exc)
    rows = []
    reference_db: float | None = None
    for value, record in zip(spec.values, results):
        if record is None:
            break
        if reference_db is None:
            reference_db = record.electrical_dbm
        rows.append(
            SweepRow(
                param_value=value,
                record=record,
                delta_db=record.electrical_dbm - reference_db,
            )
        )
    return SweepResult(
        param=spec.param,
        rows=tuple(rows),
        failed_index=failed_index,
        failure_message=failure_message,
    )


def scenario_overrides(s: Scenario) -> list[str]:
    """Normalized echo of every deviation from the reference scenario."""
    text = scenario_to_text(s, only_overrides=True)
    return [line for line in text.splitlines() if line]
