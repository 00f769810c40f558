"""Time grids, bit sequences and sampled-signal containers.

Everything downstream (transmitter, channel, receiver, analyzer) works on
these types.  All containers are immutable after construction; the sample
arrays are set read-only so signals can be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

# Feedback taps of maximal-length Fibonacci LFSRs, one primitive polynomial
# per register order (x^n + x^t2 [+ ...] + 1).  Order 7 is x^7 + x^6 + 1.
LFSR_TAPS: dict[int, tuple[int, ...]] = {
    3: (3, 2), 4: (4, 3), 5: (5, 3), 6: (6, 5), 7: (7, 6),
    8: (8, 6, 5, 4), 9: (9, 5), 10: (10, 7), 11: (11, 9),
    12: (12, 6, 4, 1), 13: (13, 4, 3, 1), 14: (14, 5, 3, 1), 15: (15, 14),
    16: (16, 15, 13, 4), 17: (17, 14), 18: (18, 11), 19: (19, 6, 2, 1),
    20: (20, 17), 21: (21, 19), 22: (22, 21), 23: (23, 18),
    24: (24, 23, 22, 17), 25: (25, 22), 26: (26, 6, 2, 1), 27: (27, 5, 2, 1),
    28: (28, 25), 29: (29, 27), 30: (30, 6, 4, 1), 31: (31, 28),
}


@dataclass(frozen=True)
class SimulationGrid:
    """Uniform time discretization of one simulated bit pattern."""

    bit_rate: float
    seq_len_bits: int
    samples_per_bit: int

    @property
    def sample_interval(self) -> float:
        """Seconds between consecutive samples, 1/(bit_rate * samples_per_bit)."""
        return 1.0 / (self.bit_rate * self.samples_per_bit)

    @property
    def sample_rate(self) -> float:
        return self.bit_rate * self.samples_per_bit

    @property
    def total_samples(self) -> int:
        return self.seq_len_bits * self.samples_per_bit

    @property
    def duration(self) -> float:
        return self.seq_len_bits / self.bit_rate


def make_grid(bit_rate: float, seq_len_bits: int, samples_per_bit: int) -> SimulationGrid:
    """Build a grid, rejecting nonpositive arguments."""
    if not bit_rate > 0:
        raise InvalidParameterError(f"bit_rate must be positive, got {bit_rate}")
    if seq_len_bits < 1 or samples_per_bit < 1:
        raise InvalidParameterError(
            f"counts must be >= 1, got seq_len_bits={seq_len_bits}, "
            f"samples_per_bit={samples_per_bit}"
        )
    return SimulationGrid(float(bit_rate), int(seq_len_bits), int(samples_per_bit))


@dataclass(frozen=True, eq=False)
class BitSequence:
    """Ordered 0/1 payload pattern."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidParameterError("bit sequence must be a nonempty 1-D array")
        if not np.isin(arr, (0, 1)).all():
            raise InvalidParameterError("bit sequence elements must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def ones_density(self) -> float:
        return float(self.bits.mean())


@dataclass(frozen=True, eq=False)
class OpticalSignal:
    """Complex optical field envelope in sqrt(W); |e|^2 is instantaneous power."""

    envelope: np.ndarray
    center_wavelength: float
    grid: SimulationGrid

    def __post_init__(self):
        env = np.asarray(self.envelope, dtype=np.complex128)
        if env.shape != (self.grid.total_samples,):
            raise InvalidParameterError(
                f"envelope has {env.size} samples, grid expects {self.grid.total_samples}"
            )
        if not self.center_wavelength > 0:
            raise InvalidParameterError("center_wavelength must be positive")
        env.setflags(write=False)
        object.__setattr__(self, "envelope", env)

    @property
    def power(self) -> np.ndarray:
        """Instantaneous optical power in watts."""
        return np.abs(self.envelope) ** 2


@dataclass(frozen=True, eq=False)
class ElectricalSignal:
    """Real photocurrent samples in amperes."""

    samples: np.ndarray
    grid: SimulationGrid

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.shape != (self.grid.total_samples,):
            raise InvalidParameterError(
                f"signal has {arr.size} samples, grid expects {self.grid.total_samples}"
            )
        if not np.isfinite(arr).all():
            raise InvalidParameterError("electrical signal contains non-finite samples")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class NoiseFlags:
    """Per-source noise toggles for the full chain."""

    ase: bool = True
    shot: bool = True
    thermal: bool = True
    dark: bool = True

    @classmethod
    def none(cls) -> "NoiseFlags":
        return cls(ase=False, shot=False, thermal=False, dark=False)


def prbs_generate(register_order: int, seed: int, n_bits: int) -> BitSequence:
    """Generate a maximal-length LFSR bit stream, truncated to ``n_bits``.

    The register steps in Fibonacci form: the new bit is the XOR of the tap
    positions, is emitted as output, and is shifted into the register.  A
    zero seed would lock the register at all-zeros and is rejected.
    """
    if register_order not in LFSR_TAPS:
        raise InvalidParameterError(
            f"register_order must be in [3, 31], got {register_order}"
        )
    if n_bits < 1:
        raise InvalidParameterError(f"n_bits must be >= 1, got {n_bits}")
    mask = (1 << register_order) - 1
    state = seed & mask
    if state == 0:
        raise InvalidParameterError("LFSR seed must be nonzero (all-zeros state locks)")
    taps = LFSR_TAPS[register_order]
    out = np.empty(n_bits, dtype=np.int64)
    for i in range(n_bits):
        fb = 0
        for t in taps:
            fb ^= state >> (t - 1)
        fb &= 1
        out[i] = fb
        state = ((state << 1) | fb) & mask
    return BitSequence(out)


def mean_optical_power_dbm(sig: OpticalSignal) -> float:
    """Mean optical power in dBm; an identically dark signal reports -inf."""
    mean_w = float(np.mean(sig.power))
    if mean_w == 0.0:
        return float("-inf")
    return 10.0 * np.log10(mean_w / 1e-3)
