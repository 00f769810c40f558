"""Vacuum free-space channel: telescope gains, Friis geometric loss, pointing.

The channel is deterministic by construction: no fading, no added noise, no
propagation delay.  Everything reduces to a single scalar power factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .signals import OpticalSignal


@dataclass(frozen=True)
class OwcParams:
    """Link geometry and optics of a single inter-satellite hop."""

    range: float = 4.0e7
    tx_aperture: float = 0.2
    rx_aperture: float = 0.2
    tx_optics_efficiency: float = 1.0
    rx_optics_efficiency: float = 1.0
    tx_extra_gain: float = 0.0
    rx_extra_gain: float = 0.0
    tx_pointing_error: float = 0.0
    rx_pointing_error: float = 0.0
    additional_loss: float = 0.0

    def __post_init__(self):
        if not self.range > 0:
            raise InvalidParameterError(f"range must be positive, got {self.range}")
        if not (self.tx_aperture > 0 and self.rx_aperture > 0):
            raise InvalidParameterError("apertures must be positive")
        for name in ("tx_optics_efficiency", "rx_optics_efficiency"):
            eff = getattr(self, name)
            if not 0.0 < eff <= 1.0:
                raise InvalidParameterError(f"{name} must lie in (0, 1], got {eff}")
        if self.tx_pointing_error < 0 or self.rx_pointing_error < 0:
            raise InvalidParameterError("pointing errors must be >= 0")


def telescope_gain(aperture: float, wavelength: float) -> float:
    """Diffraction-limited aperture gain (pi * D / lambda)^2, linear."""
    if not (aperture > 0 and wavelength > 0):
        raise InvalidParameterError("aperture and wavelength must be positive")
    return (np.pi * aperture / wavelength) ** 2


def pointing_loss(gain: float, error: float) -> float:
    """Far-field mispointing factor exp(-G * theta^2), in (0, 1]."""
    if gain < 1:
        raise InvalidParameterError(f"gain must be >= 1, got {gain}")
    if error < 0:
        raise InvalidParameterError(f"pointing error must be >= 0, got {error}")
    return float(np.exp(-gain * error ** 2))


def geometric_factor_linear(p: OwcParams, wavelength: float) -> float:
    """Received/transmitted power ratio of the vacuum hop, linear.

    eta_T * eta_R * G_T * G_R * (lambda / (4 pi L))^2 * L_pt * L_pr, with any
    extra gains and additional losses applied in dB.  For unit efficiencies
    and perfect pointing this collapses to (pi D_T D_R / (4 lambda L))^2.
    """
    if not wavelength > 0:
        raise InvalidParameterError(f"wavelength must be positive, got {wavelength}")
    g_t = telescope_gain(p.tx_aperture, wavelength)
    g_r = telescope_gain(p.rx_aperture, wavelength)
    spreading = (wavelength / (4.0 * np.pi * p.range)) ** 2
    factor = (
        p.tx_optics_efficiency
        * p.rx_optics_efficiency
        * g_t
        * g_r
        * spreading
        * pointing_loss(g_t, p.tx_pointing_error)
        * pointing_loss(g_r, p.rx_pointing_error)
    )
    extra_db = p.tx_extra_gain + p.rx_extra_gain - p.additional_loss
    return factor * 10.0 ** (extra_db / 10.0)


def geometric_loss_db(p: OwcParams, wavelength: float) -> float:
    """Total channel factor in dB (negative values are loss)."""
    return 10.0 * np.log10(geometric_factor_linear(p, wavelength))


def propagate(sig: OpticalSignal, p: OwcParams) -> OpticalSignal:
    """Scale the field by the root of the channel power factor.

    Deterministic: no RNG is consumed, the grid and wavelength pass through
    unchanged, and no delay is applied.
    """
    factor = geometric_factor_linear(p, sig.center_wavelength)
    return OpticalSignal(
        sig.envelope * np.sqrt(factor), sig.center_wavelength, sig.grid
    )
