import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad

from isowcsim.analysis import ber_from_q
from isowcsim.channel import geometric_loss_db
from isowcsim.errors import CalibrationError, InvalidParameterError
from isowcsim.linkbudget import analytic_metrics, calibrate_thermal, noise_equivalent_bandwidth


class TestNoiseEquivalentBandwidth:
    def test_brickwall_quadrature_sanity(self):
        # Oracle check of the quadrature approach itself: a unit rectangle of
        # width B integrates to B.
        b = 7.5e9
        val, _ = quad(lambda f: 1.0 if f < b else 0.0, 0.0, 2 * b, points=[b], limit=200)
        assert val == pytest.approx(b, rel=1e-9)

    def test_order4_regression(self):
        # Frozen from the numeric integral of |H_4|^2: NEB = 1.0463689 * cutoff.
        neb = noise_equivalent_bandwidth(4, 7.5e9)
        assert neb / 7.5e9 == pytest.approx(1.0463688869863819, rel=1e-6)

    def test_linear_scaling_in_cutoff(self):
        a = noise_equivalent_bandwidth(4, 7.5e9)
        b = noise_equivalent_bandwidth(4, 15e9)
        assert b == pytest.approx(2 * a, rel=1e-9)

    def test_rejects_bad_cutoff(self):
        with pytest.raises(InvalidParameterError):
            noise_equivalent_bandwidth(4, 0.0)


class TestAnalyticMetrics:
    def test_all_noise_off_saturates(self, noise_free):
        report = analytic_metrics(noise_free)
        assert math.isinf(report.q_analytic)
        assert report.ber_analytic == 0.0

    def test_reference_rx_power_composition(self, reference):
        # Oracle: laser dBm + EDFA gain dB + geometric loss dB + the pattern
        # factor 10*log10(rho + (1-rho)/ER) with rho the PRBS ones density.
        rho = reference.bits().ones_density
        assert rho == pytest.approx(0.3125)
        pattern_db = 10 * math.log10(rho + (1 - rho) / 1e3)
        expected = 15.0 + 30.0 + geometric_loss_db(reference.owc_params(), 860e-9) + pattern_db
        no_ase = dataclasses.replace(reference, noise_ase=False)
        assert analytic_metrics(no_ase).rx_optical_power == pytest.approx(expected, abs=1e-9)
        # With ASE on, the received power grows by the tiny co-attenuated ASE.
        assert analytic_metrics(reference).rx_optical_power == pytest.approx(expected, abs=1e-4)

    def test_reference_regression(self, reference):
        report = analytic_metrics(reference)
        assert report.rx_optical_power == pytest.approx(-20.8301, abs=1e-3)
        assert report.mark_power == pytest.approx(2.6374e-5, rel=1e-3)
        assert report.signal_current_mark == pytest.approx(
            3 * (report.mark_power + 10e-9), rel=1e-12
        )
        assert report.mark_power / report.space_power == pytest.approx(1e3, rel=1e-12)

    def test_mark_space_split_respects_extinction(self, reference):
        report = analytic_metrics(reference)
        ratio_db = 10 * math.log10(report.mark_power / report.space_power)
        assert ratio_db == pytest.approx(reference.mzm_extinction, abs=1e-9)

    def test_ber_consistency_bit_exact(self, calibrated):
        report = analytic_metrics(calibrated)
        assert report.ber_analytic == ber_from_q(report.q_analytic)

    def test_beat_noise_negligible_at_reference(self, calibrated):
        # The ASE is co-attenuated by ~61 dB of channel loss, so beat noise
        # stays far below 10% of the total mark variance in every published
        # operating point; this underpins the shot/thermal bracket property.
        report = analytic_metrics(calibrated)
        total = (
            report.shot_variance_mark
            + report.thermal_variance
            + report.signal_ase_beat_variance
        )
        assert report.signal_ase_beat_variance / total < 0.005

    def test_q_range_ratio_in_shot_thermal_bracket(self, calibrated):
        q40 = analytic_metrics(calibrated).q_analytic
        q50 = analytic_metrics(dataclasses.replace(calibrated, range=5e7)).q_analytic
        ratio = q50 / q40
        assert (4 / 5) ** 2 <= ratio <= 4 / 5
        # The published 21.80 / 30 = 0.727 sits inside the same bracket.
        assert (4 / 5) ** 2 <= 21.80 / 30.0 <= 4 / 5

    def test_monotonicity_on_grid(self, calibrated):
        def q_at(**overrides):
            return analytic_metrics(dataclasses.replace(calibrated, **overrides)).q_analytic

        for l1, l2 in [(4e7, 5e7), (5e7, 6e7)]:
            assert q_at(range=l2) < q_at(range=l1)
        for w1, w2 in [(860e-9, 1340e-9), (1340e-9, 1550e-9)]:
            assert q_at(wavelength=w2) < q_at(wavelength=w1)
        for d1, d2 in [(0.15, 0.2), (0.2, 0.3)]:
            assert q_at(tx_aperture=d1, rx_aperture=d1) < q_at(tx_aperture=d2, rx_aperture=d2)
        assert q_at(laser_power=10.0) < q_at(laser_power=15.0)


class TestCalibrateThermal:
    def test_reference_calibration(self, reference, calibrated_psd):
        # Frozen anchor from the reference chain; the bisection stops at 0.1%
        # on Q, which pins the PSD to within ~1%.
        assert calibrated_psd == pytest.approx(1.253e-22, rel=0.01)
        q = analytic_metrics(
            dataclasses.replace(reference, thermal_noise_psd=calibrated_psd)
        ).q_analytic
        assert q == pytest.approx(30.0, rel=1e-3)

    def test_zero_thermal_ceiling_regression(self, reference):
        ceiling = analytic_metrics(
            dataclasses.replace(reference, thermal_noise_psd=0.0)
        ).q_analytic
        assert ceiling == pytest.approx(58.2367, rel=1e-4)

    def test_unreachable_target_reports_ceiling(self, reference):
        with pytest.raises(CalibrationError, match="ceiling"):
            calibrate_thermal(reference, 1000.0)

    def test_target_equal_to_ceiling_gives_zero(self, reference):
        ceiling = analytic_metrics(
            dataclasses.replace(reference, thermal_noise_psd=0.0)
        ).q_analytic
        assert calibrate_thermal(reference, ceiling) == 0.0

    def test_thermal_disabled_rejected(self, reference):
        off = dataclasses.replace(reference, noise_thermal=False)
        with pytest.raises(CalibrationError):
            calibrate_thermal(off, 30.0)

    def test_invalid_target_rejected(self, reference):
        with pytest.raises(InvalidParameterError):
            calibrate_thermal(reference, -1.0)
