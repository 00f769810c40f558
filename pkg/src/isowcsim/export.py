"""Deterministic CSV rendering of metrics tables and eye diagrams.

All floats are rendered with 17 significant digits so output bytes are an
exact function of the inputs and seeds.
"""
from __future__ import annotations

import numpy as np

from .analysis import EyeDiagram
from .errors import InvalidParameterError

METRICS_COLUMNS = (
    "label", "param_value", "q", "ber", "eye_height_a", "jitter_s",
    "rx_optical_dbm", "electrical_dbm", "delta_db",
)


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def metrics_table_csv(rows) -> str:
    """Render metrics rows in the documented column order.

    Each row is (label, param_value | None, record, delta_db | None); single
    runs leave the sweep-only columns empty.
    """
    lines = [",".join(METRICS_COLUMNS)]
    for label, param_value, record, delta_db in rows:
        lines.append(
            ",".join(
                (
                    label,
                    fmt(param_value),
                    fmt(record.q_factor),
                    fmt(record.ber),
                    fmt(record.eye_height_a),
                    fmt(record.rms_jitter_s),
                    fmt(record.rx_optical_dbm),
                    fmt(record.electrical_dbm),
                    fmt(delta_db),
                )
            )
        )
    return "\n".join(lines) + "\n"


def eye_traces_csv(offsets_s, traces) -> str:
    """One row per bit trace; the header carries the time offsets within a bit."""
    lines = [",".join(fmt(t) for t in offsets_s)]
    for row in traces:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def eye_raster(
    eye: EyeDiagram, time_bins: int = 64, amp_bins: int = 128
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """2-D occupancy histogram of the eye: counts[time_bin, amp_bin].

    Every sample lands in exactly one cell, so the counts sum to
    n_rows * samples_per_bit.  A constant signal collapses all the mass onto
    a single amplitude bin.
    """
    if time_bins < 1 or amp_bins < 1:
        raise InvalidParameterError("raster bins must be >= 1")
    spb = eye.grid.samples_per_bit
    traces = eye.traces
    lo = float(traces.min())
    hi = float(traces.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    amp_edges = np.linspace(lo, hi, amp_bins + 1)
    time_edges = np.linspace(0.0, spb * eye.grid.sample_interval, time_bins + 1)
    counts = np.zeros((time_bins, amp_bins), dtype=np.int64)
    sample_bins = np.minimum((np.arange(spb) * time_bins) // spb, time_bins - 1)
    for t_bin in range(time_bins):
        column = traces[:, sample_bins == t_bin].ravel()
        idx = np.clip(
            np.searchsorted(amp_edges, column, side="right") - 1, 0, amp_bins - 1
        )
        counts[t_bin] = np.bincount(idx, minlength=amp_bins)
    return counts, time_edges, amp_edges


def eye_raster_csv(counts: np.ndarray, time_edges, amp_edges) -> str:
    """Raster as CSV: header of amplitude bin centers, lead column of time centers."""
    amp_centers = (np.asarray(amp_edges)[:-1] + np.asarray(amp_edges)[1:]) / 2.0
    time_centers = (np.asarray(time_edges)[:-1] + np.asarray(time_edges)[1:]) / 2.0
    lines = ["time_s," + ",".join(fmt(a) for a in amp_centers)]
    for t_center, row in zip(time_centers, counts):
        lines.append(fmt(t_center) + "," + ",".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"
