"""Closed-form link-budget oracle: received power, noise variances, Q, BER.

This module never touches sampled waveforms.  It predicts the same metrics
the waveform chain measures, so the two paths cross-validate each other, and
it hosts the thermal-noise calibration that fixes the one receiver constant
the reference result does not disclose.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import elementary_charge as ELEMENTARY_CHARGE
from scipy.integrate import quad

from .analysis import ber_from_q
from .channel import geometric_factor_linear
from .errors import CalibrationError, InvalidParameterError, NumericError
from .receiver import excess_noise_factor, bessel_response, reverse_bessel_coefficients, half_power_constant
from .scenario import Scenario
from .transmitter import ase_psd

CALIBRATION_PSD_BOUNDS = (1e-30, 1e-15)
CALIBRATION_MAX_ITERATIONS = 200
CALIBRATION_REL_TOL = 1e-3


@dataclass(frozen=True)
class BudgetReport:
    """Analytic counterparts of the waveform-measured eye metrics."""

    rx_optical_power: float
    mark_power: float
    space_power: float
    signal_current_mark: float
    signal_current_space: float
    shot_variance_mark: float
    shot_variance_space: float
    thermal_variance: float
    signal_ase_beat_variance: float
    q_analytic: float
    ber_analytic: float
    noise_equivalent_bandwidth: float


def noise_equivalent_bandwidth(order: int, cutoff: float) -> float:
    """One-sided integral of |H(f)|^2 over [0, inf), by adaptive quadrature.

    Integration runs in the normalized variable u = f/cutoff up to U = 200
    with the small |H| ~ b0/(c_n u)^n tail added in closed form.  For the
    order-4 filter the result is 1.0463689 * cutoff.
    """
    if not cutoff > 0:
        raise InvalidParameterError(f"cutoff must be positive, got {cutoff}")
    upper = 200.0
    value, abserr = quad(
        lambda u: np.abs(bessel_response(order, 1.0, u)) ** 2,
        0.0,
        upper,
        limit=400,
    )
    if not np.isfinite(value) or abserr > 1e-9 * max(value, 1.0):
        raise NumericError(
            f"noise bandwidth quadrature did not converge: value={value}, "
            f"abserr={abserr}"
        )
    b0 = reverse_bessel_coefficients(order)[0]
    c_n = half_power_constant(order)
    tail = b0 ** 2 / (c_n ** (2 * order) * (2 * order - 1) * upper ** (2 * order - 1))
    return float(cutoff * (value + tail))


def analytic_metrics(scenario: Scenario) -> BudgetReport:
    """Evaluate the textbook direct-detection Q model for the configured chain.

    The mark level is laser power + EDFA gain + geometric loss (the modulator
    passes marks unattenuated); the space level sits one extinction ratio
    below.  The reported average received power corrects the mark/space split
    by the actual ones density of the configured bit pattern.  ASE travels
    through the channel with the signal, so beat noise is co-attenuated.
    """
    scenario.validate()
    flags = scenario.noise_flags()
    loss_lin = geometric_factor_linear(scenario.owc_params(), scenario.wavelength)
    laser_w = 10.0 ** (scenario.laser_power / 10.0) * 1e-3
    gain_lin = 10.0 ** (scenario.edfa_gain / 10.0)
    er_lin = 10.0 ** (scenario.mzm_extinction / 10.0)

    p_mark = laser_w * gain_lin * loss_lin
    p_space = p_mark / er_lin
    rho = scenario.bits().ones_density
    p_avg = rho * p_mark + (1.0 - rho) * p_space

    s_ase_rx = 0.0
    if flags.ase:
        s_ase_rx = ase_psd(scenario.edfa_params(), scenario.wavelength) * loss_lin
        # Received ASE over the simulation bandwidth adds to the average power.
        p_avg += s_ase_rx * scenario.grid().sample_rate

    m = scenario.apd_gain
    r = scenario.apd_responsivity
    dark = scenario.apd_dark_current if flags.dark else 0.0
    i_mark = m * (r * p_mark + dark)
    i_space = m * (r * p_space + dark)

    bandwidth = noise_equivalent_bandwidth(scenario.filter_order, scenario.filter_cutoff)
    f_excess = excess_noise_factor(scenario.apd_ionization_ratio, m)

    def shot_variance(power: float) -> float:
        if not flags.shot:
            return 0.0
        return (
            2.0 * ELEMENTARY_CHARGE * m ** 2 * f_excess
            * (r * power + dark) * bandwidth
        )

    def beat_variance(power: float) -> float:
        return 2.0 * (m * r) ** 2 * power * s_ase_rx * bandwidth

    thermal_var = scenario.thermal_noise_psd * bandwidth if flags.thermal else 0.0
    var_mark = shot_variance(p_mark) + thermal_var + beat_variance(p_mark)
    var_space = shot_variance(p_space) + thermal_var + beat_variance(p_space)

    sigma_sum = np.sqrt(var_mark) + np.sqrt(var_space)
    if sigma_sum == 0.0:
        q_val = float("inf")
        ber = 0.0
    else:
        q_val = float((i_mark - i_space) / sigma_sum)
        ber = ber_from_q(q_val)

    return BudgetReport(
        rx_optical_power=10.0 * np.log10(p_avg / 1e-3),
        mark_power=p_mark,
        space_power=p_space,
        signal_current_mark=i_mark,
        signal_current_space=i_space,
        shot_variance_mark=shot_variance(p_mark),
        shot_variance_space=shot_variance(p_space),
        thermal_variance=thermal_var,
        signal_ase_beat_variance=beat_variance(p_mark),
        q_analytic=q_val,
        ber_analytic=ber,
        noise_equivalent_bandwidth=bandwidth,
    )


def calibrate_thermal(scenario: Scenario, target_q: float) -> float:
    """Bisect thermal_noise_psd until the analytic Q meets ``target_q``.

    Q decreases monotonically in the PSD, so plain bisection over
    [1e-30, 1e-15] A^2/Hz converges; iteration stops when Q matches within
    0.1%.  An unreachable target reports the zero-thermal Q ceiling.
    """
    if not target_q > 0:
        raise InvalidParameterError(f"target_q must be positive, got {target_q}")
    if not scenario.noise_thermal:
        raise CalibrationError(
            "thermal noise is disabled in this scenario; nothing to calibrate"
        )

    def q_at(psd: float) -> float:
        report = analytic_metrics(replace(scenario, thermal_noise_psd=psd))
        return report.q_analytic

    ceiling = q_at(0.0)
    if target_q > ceiling:
        raise CalibrationError(
            f"target Q {target_q} exceeds the zero-thermal ceiling {ceiling}"
        )
    if abs(target_q - ceiling) <= CALIBRATION_REL_TOL * target_q:
        return 0.0
    lo, hi = CALIBRATION_PSD_BOUNDS
    q_hi = q_at(hi)
    if q_hi > target_q:
        raise CalibrationError(
            f"target Q {target_q} is below the Q {q_hi} reached at the "
            f"{hi} A^2/Hz calibration bound"
        )
    for _ in range(CALIBRATION_MAX_ITERATIONS):
        mid = np.sqrt(lo * hi)  # bisect in log space: the bounds span 15 decades
        q_mid = q_at(mid)
        if abs(q_mid - target_q) <= CALIBRATION_REL_TOL * target_q:
            return float(mid)
        if q_mid > target_q:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"calibration failed to converge within {CALIBRATION_MAX_ITERATIONS} iterations"
    )
