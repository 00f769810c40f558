"""Command-line client for the simulation service.

The CLI is a thin client: every command posts to the HTTP API.  By default it
mounts the service in-process (no network, fully reproducible batch runs);
pass --server to target a running instance instead.

Exit codes: 0 success, 2 parse/validation, 3 runtime/numeric, 4 I/O.
"""
from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path

import httpx

from . import export

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_IO = 4

PRESETS = {
    "fig4": ("wavelength", ["860 nm", "1340 nm", "1450 nm", "1550 nm", "1650 nm"]),
    "fig5": ("aperture", ["20 cm", "15 cm", "30 cm"]),
    "fig6": ("range", ["40000 km", "50000 km", "60000 km"]),
}


class ServiceClient:
    """POSTs JSON to either an in-process app or a remote server."""

    def __init__(self, server: str | None = None):
        self._server = server
        self._app = None
        if server is None:
            from .service.app import create_app

            self._app = create_app()

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        if self._server is not None:
            with httpx.Client(base_url=self._server, timeout=600.0) as client:
                response = client.post(path, json=payload)
                return response.status_code, _body_json(response)
        return asyncio.run(self._post_local(path, payload))

    async def _post_local(self, path: str, payload: dict) -> tuple[int, dict]:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://isowcsim.local", timeout=600.0
        ) as client:
            response = await client.post(path, json=payload)
            return response.status_code, _body_json(response)


def _body_json(response: httpx.Response) -> dict:
    try:
        return response.json()
    except ValueError:
        return {"detail": {"kind": "runtime", "message": response.text}}


def _report_error(status: int, data: dict) -> int:
    detail = data.get("detail", data)
    if isinstance(detail, dict):
        kind = detail.get("kind", "validation" if status == 422 else "runtime")
        message = detail.get("message", str(detail))
    else:
        kind = "validation" if status == 422 else "runtime"
        message = str(detail)
    print(f"error ({kind}): {message}", file=sys.stderr)
    return EXIT_VALIDATION if kind == "validation" else EXIT_RUNTIME


def _read_scenario(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IoFailure(f"cannot read scenario file '{path}': {exc}") from exc


def _write_text(path: str, content: str) -> None:
    try:
        Path(path).write_bytes(content.encode("utf-8"))
    except OSError as exc:
        raise _IoFailure(f"cannot write '{path}': {exc}") from exc


class _IoFailure(Exception):
    pass


def _fmt_q(metrics: dict) -> str:
    q = metrics["q_factor"]
    rendered = "inf" if q is None else f"{q:.6g}"
    if metrics["saturated"]:
        rendered += " (saturated)"
    return rendered


def _print_metrics(metrics: dict) -> None:
    print(f"label           = {metrics['label']}")
    print(f"q_factor        = {_fmt_q(metrics)}")
    print(f"ber             = {metrics['ber']:.6g}")
    print(f"eye_height_a    = {metrics['eye_height_a']:.6g}")
    print(f"rms_jitter_s    = {metrics['rms_jitter_s']:.6g}")
    print(f"rx_optical_dbm  = {metrics['rx_optical_dbm']:.6g}")
    print(f"electrical_dbm  = {metrics['electrical_dbm']:.6g}")
    print(f"runs_pooled     = {metrics['runs_pooled']}")


def _record_from_wire(metrics: dict):
    from .service.schemas import MetricsModel

    return MetricsModel(**metrics).to_record()


def cmd_run(args) -> int:
    client = ServiceClient(args.server)
    status, data = client.post("/run", {"scenario_text": _read_scenario(args.scenario)})
    if status != 200:
        return _report_error(status, data)
    metrics = data["metrics"]
    _print_metrics(metrics)
    if data["overrides"]:
        print("overrides:")
        for line in data["overrides"]:
            print(f"  {line}")
    if args.out:
        record = _record_from_wire(metrics)
        _write_text(args.out, export.metrics_table_csv([(record.label, None, record, None)]))
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.preset:
        param, values = PRESETS[args.preset]
    else:
        if not args.param or not args.values:
            print("error (validation): sweep needs --param and --values, or --preset",
                  file=sys.stderr)
            return EXIT_VALIDATION
        param = args.param
        values = [v.strip() for v in args.values.split(",") if v.strip()]
    client = ServiceClient(args.server)
    status, data = client.post(
        "/sweep",
        {
            "scenario_text": _read_scenario(args.scenario),
            "param": param,
            "values": values,
            "workers": args.workers,
        },
    )
    if status != 200:
        return _report_error(status, data)
    rows = [
        (
            row["metrics"]["label"],
            row["param_value"],
            _record_from_wire(row["metrics"]),
            row["delta_db"],
        )
        for row in data["rows"]
    ]
    csv_text = export.metrics_table_csv(rows)
    if args.out:
        _write_text(args.out, csv_text)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(csv_text)
    if data.get("failed"):
        failed = data["failed"]
        print(
            f"error (runtime): sweep row {failed['row_index']} failed: "
            f"{failed['message']}; partial results kept",
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_budget(args) -> int:
    client = ServiceClient(args.server)
    status, data = client.post(
        "/budget", {"scenario_text": _read_scenario(args.scenario)}
    )
    if status != 200:
        return _report_error(status, data)
    q = data["q_analytic"]
    print(f"rx_optical_dbm               = {data['rx_optical_dbm']:.6g}")
    print(f"mark_power_w                 = {data['mark_power_w']:.6g}")
    print(f"space_power_w                = {data['space_power_w']:.6g}")
    print(f"signal_current_mark_a        = {data['signal_current_mark_a']:.6g}")
    print(f"signal_current_space_a       = {data['signal_current_space_a']:.6g}")
    print(f"shot_variance_mark_a2        = {data['shot_variance_mark_a2']:.6g}")
    print(f"shot_variance_space_a2       = {data['shot_variance_space_a2']:.6g}")
    print(f"thermal_variance_a2          = {data['thermal_variance_a2']:.6g}")
    print(f"signal_ase_beat_variance_a2  = {data['signal_ase_beat_variance_a2']:.6g}")
    print(f"noise_equivalent_bandwidth   = {data['noise_equivalent_bandwidth_hz']:.6g}")
    print(f"q_analytic                   = {'inf' if q is None else f'{q:.6g}'}")
    print(f"ber_analytic                 = {data['ber_analytic']:.6g}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    client = ServiceClient(args.server)
    status, data = client.post(
        "/calibrate",
        {"scenario_text": _read_scenario(args.scenario), "target_q": args.target_q},
    )
    if status != 200:
        return _report_error(status, data)
    q = data["budget"]["q_analytic"]
    print(f"thermal_noise_psd = {export.fmt(data['thermal_noise_psd'])} A^2/Hz")
    print(f"analytic Q at calibrated PSD = {'inf' if q is None else f'{q:.6g}'}")
    print("scenario override line:")
    print(f"  {data['override_line']}")
    return EXIT_OK


def cmd_eye(args) -> int:
    client = ServiceClient(args.server)
    status, data = client.post(
        "/eye",
        {
            "scenario_text": _read_scenario(args.scenario),
            "time_bins": args.time_bins,
            "amp_bins": args.amp_bins,
        },
    )
    if status != 200:
        return _report_error(status, data)
    traces_csv = export.eye_traces_csv(data["offsets_s"], data["traces"])
    out = args.out
    raster_path = (out[:-4] if out.endswith(".csv") else out) + ".raster.csv"
    lines = ["time_s," + ",".join(export.fmt(a) for a in data["amp_bin_centers_a"])]
    for t_center, row in zip(data["time_bin_centers_s"], data["raster"]):
        lines.append(export.fmt(t_center) + "," + ",".join(str(c) for c in row))
    _write_text(out, traces_csv)
    _write_text(raster_path, "\n".join(lines) + "\n")
    print(f"wrote {out} ({len(data['traces'])} traces) and {raster_path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isowc",
        description="Inter-satellite optical link simulator (thin client over the "
        "simulation service; runs in-process unless --server is given)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("scenario", help="scenario file (flat key = value)")
        p.add_argument("--server", default=None, help="base URL of a running service")

    p_run = sub.add_parser("run", help="simulate one scenario and report metrics")
    add_common(p_run)
    p_run.add_argument("--out", default=None, help="write metrics CSV here")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="one metrics row per parameter value")
    add_common(p_sweep)
    p_sweep.add_argument("--param", default=None, help="scenario key to sweep")
    p_sweep.add_argument(
        "--values", default=None,
        help="comma-separated values, unit suffixes allowed (e.g. '40000 km,50000 km')",
    )
    p_sweep.add_argument(
        "--preset", choices=sorted(PRESETS), default=None,
        help="install a published sweep: fig4 wavelengths, fig5 apertures, fig6 ranges",
    )
    p_sweep.add_argument("--workers", type=int, default=1, help="concurrent rows")
    p_sweep.add_argument("--out", default=None, help="write the CSV table here")
    p_sweep.set_defaults(func=cmd_sweep)

    p_budget = sub.add_parser("budget", help="closed-form link budget prediction")
    add_common(p_budget)
    p_budget.set_defaults(func=cmd_budget)

    p_cal = sub.add_parser("calibrate", help="fit thermal_noise_psd to a target Q")
    add_common(p_cal)
    p_cal.add_argument("--target-q", type=float, required=True)
    p_cal.set_defaults(func=cmd_calibrate)

    p_eye = sub.add_parser("eye", help="export eye traces and occupancy raster")
    add_common(p_eye)
    p_eye.add_argument("--out", required=True, help="traces CSV path")
    p_eye.add_argument("--time-bins", type=int, default=64)
    p_eye.add_argument("--amp-bins", type=int, default=128)
    p_eye.set_defaults(func=cmd_eye)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _IoFailure as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return EXIT_IO
    except httpx.HTTPError as exc:
        print(f"error (runtime): service request failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main_entry() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
