"""Eye-diagram construction and metric extraction (Q, BER, eye height, jitter)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import InvalidParameterError
from .signals import BitSequence, ElectricalSignal, SimulationGrid


@dataclass(frozen=True, eq=False)
class EyeDiagram:
    """Per-bit trace rows of an electrical signal, labeled by the source bit.

    ``prev_rows[i]`` indexes the row that physically precedes row i in time
    (circular within each folded pattern), or -1 when the predecessor was
    dropped by exclusion; it drives threshold-crossing jitter measurement.
    """

    traces: np.ndarray
    labels: np.ndarray
    prev_rows: np.ndarray
    grid: SimulationGrid
    excluded_bits: int = 0

    def __post_init__(self):
        traces = np.asarray(self.traces, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        prev_rows = np.asarray(self.prev_rows, dtype=np.int64)
        if traces.ndim != 2 or traces.shape[1] != self.grid.samples_per_bit:
            raise InvalidParameterError("trace rows must be samples_per_bit wide")
        if labels.shape != (traces.shape[0],) or prev_rows.shape != (traces.shape[0],):
            raise InvalidParameterError("labels/prev_rows must match the row count")
        for arr in (traces, labels, prev_rows):
            arr.setflags(write=False)
        object.__setattr__(self, "traces", traces)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "prev_rows", prev_rows)

    @property
    def n_rows(self) -> int:
        return int(self.traces.shape[0])


@dataclass(frozen=True)
class QResult:
    """Eye metrics at the best sampling instant."""

    q_factor: float
    decision_instant: int
    threshold: float
    mu1: float
    mu0: float
    sigma1: float
    sigma0: float
    eye_height: float
    ber_estimate: float
    rms_jitter: float

    @property
    def saturated(self) -> bool:
        """True when the estimated BER underflows to exactly zero."""
        return self.ber_estimate == 0.0


def fold_eye(
    sig: ElectricalSignal, bits: BitSequence, excluded_bits: int = 0
) -> EyeDiagram:
    """Cut the signal into bit-aligned rows, dropping guard bits at both ends."""
    grid = sig.grid
    if len(bits) != grid.seq_len_bits:
        raise InvalidParameterError(
            f"bit sequence length {len(bits)} does not match grid seq_len_bits "
            f"{grid.seq_len_bits}"
        )
    if excluded_bits < 0 or 2 * excluded_bits >= grid.seq_len_bits:
        raise InvalidParameterError(
            f"excluded_bits={excluded_bits} leaves no rows for {grid.seq_len_bits} bits"
        )
    n = grid.seq_len_bits
    rows = sig.samples.reshape(n, grid.samples_per_bit)
    keep = slice(excluded_bits, n - excluded_bits)
    labels = bits.bits[keep]
    kept_rows = np.arange(n)[keep]
    # Physical predecessor of bit i is bit (i-1) mod n on the periodic grid;
    # it survives only if it was kept.
    kept_index = {int(b): j for j, b in enumerate(kept_rows)}
    prev_rows = np.array(
        [kept_index.get((int(b) - 1) % n, -1) for b in kept_rows], dtype=np.int64
    )
    return EyeDiagram(rows[keep], labels, prev_rows, grid, excluded_bits)


def pool_eyes(eyes: list[EyeDiagram]) -> EyeDiagram:
    """Stack rows of independently generated eyes of the same scenario."""
    if not eyes:
        raise InvalidParameterError("cannot pool an empty list of eyes")
    grid = eyes[0].grid
    for eye in eyes[1:]:
        if eye.grid != grid:
            raise InvalidParameterError("pooled eyes must share a grid")
    traces = np.vstack([eye.traces for eye in eyes])
    labels = np.concatenate([eye.labels for eye in eyes])
    prev_rows = []
    offset = 0
    for eye in eyes:
        shifted = np.where(eye.prev_rows >= 0, eye.prev_rows + offset, -1)
        prev_rows.append(shifted)
        offset += eye.n_rows
    return EyeDiagram(
        traces, labels, np.concatenate(prev_rows), grid, eyes[0].excluded_bits
    )


def ber_from_q(q: float) -> float:
    """Gaussian tail estimate (1/2) * erfc(q / sqrt(2)).

    erfc keeps full precision well below 1e-300; beyond the representable range
    the result underflows to exactly 0.0, which callers treat as saturation.
    """
    if q < 0:
        raise InvalidParameterError(f"q must be >= 0, got {q}")
    if np.isinf(q):
        return 0.0
    return float(0.5 * erfc(q / np.sqrt(2.0)))


def estimate_q(eye: EyeDiagram) -> QResult:
    """Sweep sampling offsets for the best Q = (mu1 - mu0)/(sigma1 + sigma0).

    Mark/space statistics come from the known bit labels.  The reported
    threshold is the Gaussian-optimal (sigma0*mu1 + sigma1*mu0)/(sigma0+sigma1),
    eye height uses the 3-sigma convention, and rms jitter is the pooled
    standard deviation of threshold-crossing times with rising and falling
    edges centered separately.
    """
    marks = eye.traces[eye.labels == 1]
    spaces = eye.traces[eye.labels == 0]
    if marks.shape[0] < 2 or spaces.shape[0] < 2:
        raise InvalidParameterError(
            "eye needs at least 2 rows of each bit label, got "
            f"{marks.shape[0]} marks / {spaces.shape[0]} spaces"
        )
    mu1 = marks.mean(axis=0)
    mu0 = spaces.mean(axis=0)
    s1 = marks.std(axis=0, ddof=1)
    s0 = spaces.std(axis=0, ddof=1)
    denom = s1 + s0
    swing = mu1 - mu0
    # Spreads at the double-precision rounding floor count as zero: circular
    # FFT filtering leaves ~1e-16 relative jitter on noise-free patterns.
    degenerate = denom <= np.abs(swing) * 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        q_curve = np.where(
            degenerate,
            np.where(swing > 0.0, np.inf, 0.0),
            swing / np.where(degenerate, 1.0, denom),
        )
    best = int(np.argmax(q_curve))
    q_best = float(q_curve[best])
    if np.isinf(q_best):
        # Noise-free degenerate eye: zero spread at the decision instant.
        threshold = float((mu1[best] + mu0[best]) / 2.0)
        q_out = float("inf")
        ber = 0.0
    else:
        q_out = max(q_best, 0.0)
        threshold = float(
            (s0[best] * mu1[best] + s1[best] * mu0[best]) / (s0[best] + s1[best])
        )
        ber = ber_from_q(q_out)
    eye_height = float((mu1[best] - 3.0 * s1[best]) - (mu0[best] + 3.0 * s0[best]))
    jitter = _rms_crossing_jitter(eye, threshold)
    return QResult(
        q_factor=q_out,
        decision_instant=best,
        threshold=threshold,
        mu1=float(mu1[best]),
        mu0=float(mu0[best]),
        sigma1=float(s1[best]),
        sigma0=float(s0[best]),
        eye_height=eye_height,
        ber_estimate=ber,
        rms_jitter=jitter,
    )


def _rms_crossing_jitter(eye: EyeDiagram, threshold: float) -> float:
    """Std of threshold-crossing times across transitions, in seconds.

    For every row whose label differs from its predecessor, the crossing is
    located by linear interpolation in the window from half a bit before the
    boundary to the end of the row.  Rising and falling groups are centered
    separately before pooling so asymmetric settling does not count as jitter.
    """
    spb = eye.grid.samples_per_bit
    dt = eye.grid.sample_interval
    rising: list[float] = []
    falling: list[float] = []
    half = spb // 2
    for i in range(eye.n_rows):
        prev = int(eye.prev_rows[i])
        if prev < 0 or eye.labels[prev] == eye.labels[i]:
            continue
        segment = np.concatenate([eye.traces[prev, spb - half:], eye.traces[i]])
        delta = segment - threshold
        sign_change = np.nonzero(delta[:-1] * delta[1:] < 0.0)[0]
        exact = np.nonzero(delta == 0.0)[0]
        candidates = []
        for k in sign_change:
            frac = delta[k] / (delta[k] - delta[k + 1])
            candidates.append(k + frac)
        candidates.extend(float(k) for k in exact)
        if not candidates:
            continue
        t_cross = (min(candidates) - half) * dt
        (rising if eye.labels[i] == 1 else falling).append(t_cross)
    deviations: list[float] = []
    for group in (rising, falling):
        if len(group) >= 2:
            arr = np.asarray(group)
            deviations.extend(arr - arr.mean())
    if len(deviations) < 2:
        return 0.0
    return float(np.std(np.asarray(deviations), ddof=1))


def electrical_power_dbm(sig: ElectricalSignal) -> float:
    """Mean-square signal power into a 1 ohm reference, in dBm.

    Only deltas of this probe are meaningful across tools; the 1 ohm / 1 mW
    convention is fixed so deltas are comparable.
    """
    mean_sq = float(np.mean(sig.samples ** 2))
    if mean_sq == 0.0:
        return float("-inf")
    return 10.0 * np.log10(mean_sq / 1e-3)
