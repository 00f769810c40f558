"""Request/response models of the simulation service.

Infinite Q factors (zero-spread eyes) travel as ``null``; the ``saturated``
flag marks any result whose BER underflowed to exactly zero.
"""
from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field

from ..linkbudget import BudgetReport
from ..runner import MetricsRecord, SweepResult


def _wire_float(value: float) -> Optional[float]:
    import math

    return None if math.isinf(value) else value


class ScenarioRequest(BaseModel):
    scenario_text: str = ""


class MetricsModel(BaseModel):
    label: str
    q_factor: Optional[float] = Field(None, description="null when infinite")
    saturated: bool
    ber: float
    eye_height_a: float
    rms_jitter_s: float
    rx_optical_dbm: float
    electrical_dbm: float
    decision_instant: int
    threshold_a: float
    runs_pooled: int

    @classmethod
    def from_record(cls, record: MetricsRecord) -> "MetricsModel":
        return cls(
            label=record.label,
            q_factor=_wire_float(record.q_factor),
            saturated=record.saturated,
            ber=record.ber,
            eye_height_a=record.eye_height_a,
            rms_jitter_s=record.rms_jitter_s,
            rx_optical_dbm=record.rx_optical_dbm,
            electrical_dbm=record.electrical_dbm,
            decision_instant=record.decision_instant,
            threshold_a=record.threshold_a,
            runs_pooled=record.runs_pooled,
        )

    def q_value(self) -> float:
        return float("inf") if self.q_factor is None else self.q_factor

    def to_record(self) -> MetricsRecord:
        return MetricsRecord(
            label=self.label,
            q_factor=self.q_value(),
            ber=self.ber,
            eye_height_a=self.eye_height_a,
            rms_jitter_s=self.rms_jitter_s,
            rx_optical_dbm=self.rx_optical_dbm,
            electrical_dbm=self.electrical_dbm,
            saturated=self.saturated,
            decision_instant=self.decision_instant,
            threshold_a=self.threshold_a,
            runs_pooled=self.runs_pooled,
        )


class RunResponse(BaseModel):
    metrics: MetricsModel
    overrides: list[str]


class SweepRequest(ScenarioRequest):
    param: str
    values: list[Union[float, str]]
    workers: int = Field(1, ge=1, le=64)


class SweepRowModel(BaseModel):
    param_value: float
    delta_db: float
    metrics: MetricsModel


class SweepFailureModel(BaseModel):
    row_index: int
    message: str


class SweepResponse(BaseModel):
    param: str
    rows: list[SweepRowModel]
    failed: Optional[SweepFailureModel] = None

    @classmethod
    def from_result(cls, result: SweepResult) -> "SweepResponse":
        failed = None
        if result.failed_index is not None:
            failed = SweepFailureModel(
                row_index=result.failed_index,
                message=result.failure_message or "row failed",
            )
        return cls(
            param=result.param,
            rows=[
                SweepRowModel(
                    param_value=row.param_value,
                    delta_db=row.delta_db,
                    metrics=MetricsModel.from_record(row.record),
                )
                for row in result.rows
            ],
            failed=failed,
        )


class BudgetResponse(BaseModel):
    rx_optical_dbm: float
    mark_power_w: float
    space_power_w: float
    signal_current_mark_a: float
    signal_current_space_a: float
    shot_variance_mark_a2: float
    shot_variance_space_a2: float
    thermal_variance_a2: float
    signal_ase_beat_variance_a2: float
    q_analytic: Optional[float] = Field(None, description="null when infinite")
    ber_analytic: float
    noise_equivalent_bandwidth_hz: float

    @classmethod
    def from_report(cls, report: BudgetReport) -> "BudgetResponse":
        return cls(
            rx_optical_dbm=report.rx_optical_power,
            mark_power_w=report.mark_power,
            space_power_w=report.space_power,
            signal_current_mark_a=report.signal_current_mark,
            signal_current_space_a=report.signal_current_space,
            shot_variance_mark_a2=report.shot_variance_mark,
            shot_variance_space_a2=report.shot_variance_space,
            thermal_variance_a2=report.thermal_variance,
            signal_ase_beat_variance_a2=report.signal_ase_beat_variance,
            q_analytic=_wire_float(report.q_analytic),
            ber_analytic=report.ber_analytic,
            noise_equivalent_bandwidth_hz=report.noise_equivalent_bandwidth,
        )

    def q_value(self) -> float:
        return float("inf") if self.q_analytic is None else self.q_analytic


class CalibrateRequest(ScenarioRequest):
    target_q: float


class CalibrateResponse(BaseModel):
    thermal_noise_psd: float
    override_line: str
    budget: BudgetResponse


class EyeRequest(ScenarioRequest):
    time_bins: int = Field(64, ge=1, le=4096)
    amp_bins: int = Field(128, ge=1, le=4096)


class EyeResponse(BaseModel):
    offsets_s: list[float]
    labels: list[int]
    traces: list[list[float]]
    raster: list[list[int]]
    time_bin_centers_s: list[float]
    amp_bin_centers_a: list[float]
