"""Optical transmitter chain: CW laser, NRZ driver, MZM, EDFA booster."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import h as PLANCK

from .errors import InvalidParameterError
from .signals import BitSequence, ElectricalSignal, OpticalSignal, SimulationGrid

# EDFA noise figures below the 3.01 dB quantum limit are accepted but flagged.
QUANTUM_LIMIT_NF_DB = 10.0 * np.log10(2.0)


@dataclass(frozen=True)
class LaserParams:
    """CW source: mean power in dBm, Lorentzian linewidth in Hz, wavelength in m."""

    power: float = 15.0
    linewidth: float = 10e6
    center_wavelength: float = 860e-9

    def __post_init__(self):
        if self.linewidth < 0:
            raise InvalidParameterError(f"linewidth must be >= 0, got {self.linewidth}")
        if not 400e-9 <= self.center_wavelength <= 2000e-9:
            raise InvalidParameterError(
                f"wavelength must lie in [400e-9, 2000e-9] m, got {self.center_wavelength}"
            )


@dataclass(frozen=True)
class MzmParams:
    """Chirp-free intensity modulator described by its extinction ratio in dB."""

    extinction_ratio: float = 30.0

    def __post_init__(self):
        if not self.extinction_ratio > 0:
            raise InvalidParameterError(
                f"extinction_ratio must be positive, got {self.extinction_ratio}"
            )


@dataclass(frozen=True)
class EdfaParams:
    """Booster amplifier: gain and noise figure in dB."""

    gain: float = 30.0
    noise_figure: float = 4.0

    def __post_init__(self):
        if self.gain < 0:
            raise InvalidParameterError(f"gain must be >= 0 dB, got {self.gain}")
        if self.noise_figure < QUANTUM_LIMIT_NF_DB:
            warnings.warn(
                f"noise figure {self.noise_figure} dB is below the {QUANTUM_LIMIT_NF_DB:.2f} dB "
                "quantum limit",
                UserWarning,
                stacklevel=2,
            )


def cw_laser(
    grid: SimulationGrid, p: LaserParams, phase_rng: np.random.Generator
) -> OpticalSignal:
    """Constant-power field with Wiener phase noise.

    |e_k|^2 equals the configured power for every sample.  The phase walks
    with per-step variance 2*pi*linewidth*dt; zero linewidth yields a
    constant zero phase and consumes no random numbers.
    """
    power_w = 10.0 ** (p.power / 10.0) * 1e-3
    amplitude = np.sqrt(power_w)
    n = grid.total_samples
    if p.linewidth == 0.0:
        envelope = np.full(n, amplitude, dtype=np.complex128)
    else:
        step_std = np.sqrt(2.0 * np.pi * p.linewidth * grid.sample_interval)
        phase = np.cumsum(phase_rng.normal(0.0, step_std, n))
        envelope = amplitude * np.exp(1j * phase)
    return OpticalSignal(envelope, p.center_wavelength, grid)


def nrz_drive(
    bits: BitSequence, grid: SimulationGrid, rise_fraction: float = 0.0
) -> ElectricalSignal:
    """Rectangular NRZ drive in [0, 1], one bit held over samples_per_bit samples.

    With ``rise_fraction`` r > 0 each transition is linearly interpolated over
    the first round(r * samples_per_bit) samples of the new bit slot: sample j
    of the edge takes value prev + (new - prev) * (j + 1) / (n_edge + 1).  The
    pattern is treated as circular, matching the periodic filtering downstream.
    """
    if len(bits) != grid.seq_len_bits:
        raise InvalidParameterError(
            f"bit sequence length {len(bits)} does not match grid seq_len_bits "
            f"{grid.seq_len_bits}"
        )
    if not 0.0 <= rise_fraction <= 0.5:
        raise InvalidParameterError(
            f"rise_fraction must lie in [0, 0.5], got {rise_fraction}"
        )
    spb = grid.samples_per_bit
    values = bits.bits.astype(np.float64)
    drive = np.repeat(values, spb)
    n_edge = int(round(rise_fraction * spb))
    if n_edge > 0:
        ramp = np.arange(1, n_edge + 1) / (n_edge + 1)
        for i in range(grid.seq_len_bits):
            prev = values[i - 1]
            cur = values[i]
            if prev != cur:
                j = i * spb
                drive[j: j + n_edge] = prev + (cur - prev) * ramp
    return ElectricalSignal(drive, grid)


def mzm_modulate(
    carrier: OpticalSignal, drive: ElectricalSignal, p: MzmParams
) -> OpticalSignal:
    """Drive-dependent field transmission e_out = e_in * sin(theta(v)).

    theta(v) = (pi/2) * (alpha + v * (1 - alpha)) with
    alpha = (2/pi) * asin(10^(-ER/20)), so the off state transmits exactly
    10^(-ER/10) of the input power, the on state transmits all of it, and the
    mark/space power ratio equals the extinction ratio exactly.
    """
    if carrier.grid is not drive.grid and carrier.grid != drive.grid:
        raise InvalidParameterError("carrier and drive must share a grid")
    v = drive.samples
    if v.min() < 0.0 or v.max() > 1.0:
        raise InvalidParameterError(
            f"drive values must lie in [0, 1], got range [{v.min()}, {v.max()}]"
        )
    alpha = (2.0 / np.pi) * np.arcsin(10.0 ** (-p.extinction_ratio / 20.0))
    theta = (np.pi / 2.0) * (alpha + v * (1.0 - alpha))
    return OpticalSignal(
        carrier.envelope * np.sin(theta), carrier.center_wavelength, carrier.grid
    )


def ase_psd(p: EdfaParams, wavelength: float) -> float:
    """Single-polarization ASE power spectral density in W/Hz.

    S_ASE = n_sp * h * nu * (G - 1) with n_sp = NF_lin * G / (2 * (G - 1)).
    A transparent amplifier (G = 1) emits nothing.
    """
    gain_lin = 10.0 ** (p.gain / 10.0)
    if gain_lin == 1.0:
        return 0.0
    nf_lin = 10.0 ** (p.noise_figure / 10.0)
    n_sp = nf_lin * gain_lin / (2.0 * (gain_lin - 1.0))
    nu = SPEED_OF_LIGHT / wavelength
    return n_sp * PLANCK * nu * (gain_lin - 1.0)


def edfa_amplify(
    sig: OpticalSignal,
    p: EdfaParams,
    ase_rng: np.random.Generator,
    include_ase: bool = True,
) -> OpticalSignal:
    """Amplify the field by sqrt(G) and add circular-Gaussian ASE.

    The noise is white over the full simulation bandwidth f_s, so the
    per-sample complex variance is S_ASE * f_s, split evenly between the
    quadratures.  With ``include_ase`` false the block is a pure gain.
    """
    gain_lin = 10.0 ** (p.gain / 10.0)
    envelope = sig.envelope * np.sqrt(gain_lin)
    if include_ase:
        f_s = sig.grid.sample_rate
        sigma = np.sqrt(ase_psd(p, sig.center_wavelength) * f_s / 2.0)
        if sigma > 0.0:
            n = sig.grid.total_samples
            noise = ase_rng.normal(0.0, sigma, n) + 1j * ase_rng.normal(0.0, sigma, n)
            envelope = envelope + noise
    return OpticalSignal(envelope, sig.center_wavelength, sig.grid)
