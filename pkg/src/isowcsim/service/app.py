"""HTTP facade over the simulator core.

Endpoints accept scenario text (the same flat key = value format the CLI
reads from disk), parse and validate it server-side, and return metrics as
JSON.  Validation failures map to 422, runtime/numeric failures to 400.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import export
from ..errors import (
    CalibrationError,
    InvalidParameterError,
    IsowcError,
    NumericError,
    ScenarioParseError,
    SimulationError,
    error_kind,
)
from ..linkbudget import analytic_metrics, calibrate_thermal
from ..runner import make_sweep, run_scenario, run_sweep, scenario_overrides, simulate_pooled
from ..scenario import parse_scenario
from .schemas import (
    BudgetResponse,
    CalibrateRequest,
    CalibrateResponse,
    EyeRequest,
    EyeResponse,
    MetricsModel,
    RunResponse,
    ScenarioRequest,
    SweepRequest,
    SweepResponse,
)


def _error_payload(exc: IsowcError) -> dict:
    payload: dict = {"kind": error_kind(exc), "message": str(exc)}
    if isinstance(exc, ScenarioParseError):
        payload["key"] = exc.key
        payload["line"] = exc.line_no
    if isinstance(exc, SimulationError):
        payload["stage"] = exc.stage
    return payload


def create_app() -> FastAPI:
    app = FastAPI(
        title="isowcsim",
        description="Inter-satellite optical link physical-layer simulator",
    )

    @app.exception_handler(IsowcError)
    async def _handle_isowc_error(request, exc: IsowcError):
        status = 422 if error_kind(exc) == "validation" else 400
        return JSONResponse(status_code=status, content={"detail": _error_payload(exc)})

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/run", response_model=RunResponse)
    def run(req: ScenarioRequest) -> RunResponse:
        scenario = parse_scenario(req.scenario_text)
        record = run_scenario(scenario)
        return RunResponse(
            metrics=MetricsModel.from_record(record),
            overrides=scenario_overrides(scenario),
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        base = parse_scenario(req.scenario_text)
        spec = make_sweep(base, req.param, req.values)
        result = run_sweep(spec, workers=req.workers)
        return SweepResponse.from_result(result)

    @app.post("/budget", response_model=BudgetResponse)
    def budget(req: ScenarioRequest) -> BudgetResponse:
        scenario = parse_scenario(req.scenario_text)
        return BudgetResponse.from_report(analytic_metrics(scenario))

    @app.post("/calibrate", response_model=CalibrateResponse)
    def calibrate(req: CalibrateRequest) -> CalibrateResponse:
        scenario = parse_scenario(req.scenario_text)
        psd = calibrate_thermal(scenario, req.target_q)
        calibrated = dataclasses.replace(scenario, thermal_noise_psd=psd)
        return CalibrateResponse(
            thermal_noise_psd=psd,
            override_line=f"thermal_noise_psd = {psd!r}",
            budget=BudgetResponse.from_report(analytic_metrics(calibrated)),
        )

    @app.post("/eye", response_model=EyeResponse)
    def eye(req: EyeRequest) -> EyeResponse:
        scenario = parse_scenario(req.scenario_text)
        pooled, _, _ = simulate_pooled(scenario)
        counts, time_edges, amp_edges = export.eye_raster(
            pooled, req.time_bins, req.amp_bins
        )
        spb = pooled.grid.samples_per_bit
        offsets = np.arange(spb) * pooled.grid.sample_interval
        return EyeResponse(
            offsets_s=offsets.tolist(),
            labels=pooled.labels.tolist(),
            traces=pooled.traces.tolist(),
            raster=counts.tolist(),
            time_bin_centers_s=((time_edges[:-1] + time_edges[1:]) / 2.0).tolist(),
            amp_bin_centers_a=((amp_edges[:-1] + amp_edges[1:]) / 2.0).tolist(),
        )

    return app


app = create_app()
