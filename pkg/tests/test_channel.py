import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isowcsim.channel import (
    OwcParams,
    geometric_factor_linear,
    geometric_loss_db,
    pointing_loss,
    propagate,
    telescope_gain,
)
from isowcsim.errors import InvalidParameterError
from isowcsim.signals import OpticalSignal, make_grid, mean_optical_power_dbm

REF = OwcParams()
LAMBDA = 860e-9


class TestTelescopeGain:
    def test_reference_aperture(self):
        gain = telescope_gain(0.2, LAMBDA)
        assert gain == pytest.approx(5.337e11, rel=1e-3)
        assert 10 * math.log10(gain) == pytest.approx(117.27, abs=5e-3)

    def test_unity_gain_aperture(self):
        assert telescope_gain(LAMBDA / math.pi, LAMBDA) == pytest.approx(1.0, rel=1e-12)

    def test_doubling_diameter_adds_6db(self):
        delta = 10 * math.log10(telescope_gain(0.4, LAMBDA) / telescope_gain(0.2, LAMBDA))
        assert delta == pytest.approx(20 * math.log10(2), abs=1e-9)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            telescope_gain(0.0, LAMBDA)


class TestPointingLoss:
    def test_zero_error_is_unity(self):
        assert pointing_loss(1e12, 0.0) == 1.0

    def test_formula_point(self):
        assert pointing_loss(1e12, 1e-6) == pytest.approx(math.exp(-1.0), rel=1e-12)

    @given(st.floats(min_value=0, max_value=1e-5), st.floats(min_value=0, max_value=1e-5))
    def test_monotone_nonincreasing(self, e1, e2):
        lo, hi = sorted((e1, e2))
        assert pointing_loss(1e11, hi) <= pointing_loss(1e11, lo)

    def test_gain_below_one_rejected(self):
        with pytest.raises(InvalidParameterError):
            pointing_loss(0.5, 0.0)


class TestGeometricLoss:
    def test_reference_value(self):
        assert geometric_loss_db(REF, LAMBDA) == pytest.approx(-60.79, abs=5e-3)
        assert geometric_factor_linear(REF, LAMBDA) == pytest.approx(8.34e-7, rel=1e-3)

    def test_closed_form_identity(self):
        # Independent oracle: with unit efficiencies and perfect pointing the
        # composed gain/spreading product must equal (pi D_T D_R / (4 L w))^2.
        for wavelength in (860e-9, 1550e-9):
            for rng in (4e7, 5e7):
                p = OwcParams(range=rng)
                direct = (math.pi * 0.2 * 0.2 / (4 * wavelength * rng)) ** 2
                composed = geometric_factor_linear(p, wavelength)
                assert 10 * math.log10(composed / direct) == pytest.approx(0.0, abs=1e-9)

    def test_wavelength_squared_law(self):
        delta = geometric_loss_db(REF, 1550e-9) - geometric_loss_db(REF, 860e-9)
        assert delta == pytest.approx(-20 * math.log10(1550 / 860), abs=1e-9)
        assert geometric_loss_db(REF, 1550e-9) == pytest.approx(-65.91, abs=0.01)

    def test_inverse_square_law(self):
        doubled = OwcParams(range=8e7)
        delta = geometric_loss_db(doubled, LAMBDA) - geometric_loss_db(REF, LAMBDA)
        assert delta == pytest.approx(-20 * math.log10(2), abs=1e-9)

    def test_aperture_product_law(self):
        p = OwcParams(tx_aperture=0.15, rx_aperture=0.3)
        expected = 20 * math.log10((0.15 * 0.3) / (0.2 * 0.2))
        delta = geometric_loss_db(p, LAMBDA) - geometric_loss_db(REF, LAMBDA)
        assert delta == pytest.approx(expected, abs=1e-9)

    def test_extra_gains_and_losses(self):
        p = OwcParams(tx_extra_gain=3.0, rx_extra_gain=2.0, additional_loss=1.5)
        delta = geometric_loss_db(p, LAMBDA) - geometric_loss_db(REF, LAMBDA)
        assert delta == pytest.approx(3.5, abs=1e-9)

    def test_efficiency_validation(self):
        with pytest.raises(InvalidParameterError):
            OwcParams(tx_optics_efficiency=0.0)
        with pytest.raises(InvalidParameterError):
            OwcParams(rx_optics_efficiency=1.5)
        with pytest.raises(InvalidParameterError):
            OwcParams(range=-1.0)


class TestPropagate:
    def _signal(self, grid=None):
        grid = grid or make_grid(10e9, 4, 16)
        env = np.full(grid.total_samples, 0.01 + 0.003j)
        return OpticalSignal(env, LAMBDA, grid)

    def test_unity_factor_leaves_signal_unchanged(self):
        # Range chosen so (pi D^2 / (4 w L)) == 1 exactly.
        unity_range = math.pi * 0.2 * 0.2 / (4 * LAMBDA)
        p = OwcParams(range=unity_range)
        sig = self._signal()
        out = propagate(sig, p)
        np.testing.assert_allclose(out.envelope, sig.envelope, rtol=1e-12)

    def test_reference_attenuation(self):
        sig = self._signal()
        out = propagate(sig, REF)
        delta = mean_optical_power_dbm(out) - mean_optical_power_dbm(sig)
        assert delta == pytest.approx(geometric_loss_db(REF, LAMBDA), abs=1e-9)

    def test_cascade_doubles_decibels(self):
        sig = self._signal()
        once = propagate(sig, REF)
        twice = propagate(once, REF)
        single_db = mean_optical_power_dbm(once) - mean_optical_power_dbm(sig)
        cascade_db = mean_optical_power_dbm(twice) - mean_optical_power_dbm(sig)
        assert cascade_db == pytest.approx(2 * single_db, abs=1e-9)

    def test_no_rng_and_deterministic(self):
        sig = self._signal()
        a = propagate(sig, REF)
        b = propagate(sig, REF)
        assert np.array_equal(a.envelope, b.envelope)

    def test_grid_and_wavelength_pass_through(self):
        sig = self._signal()
        out = propagate(sig, REF)
        assert out.grid is sig.grid
        assert out.center_wavelength == sig.center_wavelength
