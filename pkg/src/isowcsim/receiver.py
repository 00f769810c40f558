"""Receiver chain: APD photodetection with full noise model, Bessel low-pass."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.constants import elementary_charge as ELEMENTARY_CHARGE
from scipy.optimize import brentq

from .errors import InvalidParameterError
from .signals import ElectricalSignal, NoiseFlags, OpticalSignal

MAX_FILTER_ORDER = 8


@dataclass(frozen=True)
class ApdParams:
    """Avalanche photodiode plus front-end noise constants.

    thermal_noise_psd is the one-sided input-referred current noise density
    in A^2/Hz; it is the calibratable receiver constant.
    """

    responsivity: float = 1.0
    multiplication_gain: float = 3.0
    ionization_ratio: float = 0.9
    dark_current: float = 10e-9
    thermal_noise_psd: float = 1.0e-22

    def __post_init__(self):
        if not self.responsivity > 0:
            raise InvalidParameterError(
                f"responsivity must be positive, got {self.responsivity}"
            )
        if self.multiplication_gain < 1:
            raise InvalidParameterError(
                f"multiplication gain must be >= 1, got {self.multiplication_gain}"
            )
        if not 0.0 <= self.ionization_ratio <= 1.0:
            raise InvalidParameterError(
                f"ionization ratio must lie in [0, 1], got {self.ionization_ratio}"
            )
        if self.dark_current < 0:
            raise InvalidParameterError("dark current must be >= 0")
        if self.thermal_noise_psd < 0:
            raise InvalidParameterError("thermal noise PSD must be >= 0")


@dataclass(frozen=True)
class BesselFilterParams:
    order: int = 4
    cutoff: float = 7.5e9

    def __post_init__(self):
        if self.order < 1:
            raise InvalidParameterError(f"filter order must be >= 1, got {self.order}")
        if not self.cutoff > 0:
            raise InvalidParameterError(f"cutoff must be positive, got {self.cutoff}")


def excess_noise_factor(k: float, m: float) -> float:
    """McIntyre excess noise factor F = k*M + (1 - k)*(2 - 1/M)."""
    if not 0.0 <= k <= 1.0:
        raise InvalidParameterError(f"ionization ratio must lie in [0, 1], got {k}")
    if m < 1:
        raise InvalidParameterError(f"multiplication gain must be >= 1, got {m}")
    return k * m + (1.0 - k) * (2.0 - 1.0 / m)


def apd_detect(
    sig: OpticalSignal,
    p: ApdParams,
    noise_rng: np.random.Generator,
    flags: NoiseFlags = NoiseFlags(),
) -> ElectricalSignal:
    """Square-law detection with multiplied shot noise and thermal noise.

    i(t) = M*R*|e|^2 [+ M*I_d] + n_shot(t) + n_thermal(t).  Shot noise is
    signal-dependent Gaussian with per-sample variance
    2*q*M^2*F*(R*|e|^2 + I_d)*(f_s/2); thermal noise has per-sample variance
    thermal_noise_psd*(f_s/2).  Dark current enters the mean and the shot
    variance only when the dark flag is on.  Each disabled source skips its
    random draw so streams stay independent.
    """
    grid = sig.grid
    power = sig.power
    m = p.multiplication_gain
    dark = p.dark_current if flags.dark else 0.0
    current = m * (p.responsivity * power + dark)
    f_s = grid.sample_rate
    n = grid.total_samples
    if flags.shot:
        f = excess_noise_factor(p.ionization_ratio, m)
        var_shot = (
            2.0 * ELEMENTARY_CHARGE * m ** 2 * f
            * (p.responsivity * power + dark) * (f_s / 2.0)
        )
        current = current + noise_rng.standard_normal(n) * np.sqrt(var_shot)
    if flags.thermal and p.thermal_noise_psd > 0.0:
        sigma_th = np.sqrt(p.thermal_noise_psd * f_s / 2.0)
        current = current + noise_rng.normal(0.0, sigma_th, n)
    return ElectricalSignal(current, grid)


@lru_cache(maxsize=None)
def reverse_bessel_coefficients(order: int) -> tuple[int, ...]:
    """Coefficients of the reverse Bessel polynomial, ascending powers of s.

    Order 4 gives (105, 105, 45, 10, 1), i.e. s^4 + 10s^3 + 45s^2 + 105s + 105.
    """
    if not 1 <= order <= MAX_FILTER_ORDER:
        raise InvalidParameterError(
            f"filter order must lie in [1, {MAX_FILTER_ORDER}], got {order}"
        )
    return tuple(
        factorial(2 * order - k) // (2 ** (order - k) * factorial(k) * factorial(order - k))
        for k in range(order + 1)
    )


def _denominator(order: int, s: np.ndarray | complex) -> np.ndarray | complex:
    coeffs = reverse_bessel_coefficients(order)
    den = coeffs[-1]
    for ck in reversed(coeffs[:-1]):
        den = den * s + ck
    return den


@lru_cache(maxsize=None)
def half_power_constant(order: int) -> float:
    """Normalization constant c_n placing the -3 dB point at f = cutoff.

    Root of |B_n(0)/B_n(j*c)|^2 = 1/2; c_4 = 2.1139177 for the default filter.
    """
    b0 = reverse_bessel_coefficients(order)[0]

    def excess(w: float) -> float:
        return abs(b0 / _denominator(order, 1j * w)) ** 2 - 0.5

    return brentq(excess, 1e-6, 20.0, xtol=1e-15, rtol=8.9e-16)


def bessel_response(order: int, cutoff: float, f):
    """Complex low-pass transfer value H(f) = B_n(0)/B_n(j*(f/cutoff)*c_n).

    Accepts scalars or arrays; H(0) is exactly 1 and |H(cutoff)|^2 = 1/2.
    """
    if not cutoff > 0:
        raise InvalidParameterError(f"cutoff must be positive, got {cutoff}")
    coeffs = reverse_bessel_coefficients(order)
    s = 1j * (np.asarray(f, dtype=np.float64) / cutoff) * half_power_constant(order)
    return coeffs[0] / _denominator(order, s)


def bessel_lowpass(sig: ElectricalSignal, p: BesselFilterParams) -> ElectricalSignal:
    """Apply the Bessel response over the periodic grid in the frequency domain."""
    grid = sig.grid
    nyquist = grid.sample_rate / 2.0
    if p.cutoff >= nyquist:
        raise InvalidParameterError(
            f"cutoff {p.cutoff} Hz must be below the Nyquist frequency {nyquist} Hz"
        )
    n = grid.total_samples
    freqs = np.fft.rfftfreq(n, grid.sample_interval)
    spectrum = np.fft.rfft(sig.samples) * bessel_response(p.order, p.cutoff, freqs)
    return ElectricalSignal(np.fft.irfft(spectrum, n=n), grid)
