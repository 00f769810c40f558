import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from isowcsim.errors import InvalidParameterError, ScenarioParseError
from isowcsim.scenario import (
    Scenario,
    apply_override,
    parse_scenario,
    parse_sweep_value,
    scenario_to_text,
    sweepable_keys,
)


class TestDefaults:
    def test_empty_file_is_reference(self):
        s = parse_scenario("")
        assert s.wavelength == 860e-9
        assert s.range == 4.0e7
        assert s.bit_rate == 10e9
        assert s.seq_len_bits == 32
        assert s.samples_per_bit == 64
        assert s.mzm_extinction == 30.0
        assert s.apd_dark_current == 10e-9
        assert s.laser_power == 15.0
        assert s.laser_linewidth == 10e6
        assert s.edfa_gain == 30.0 and s.edfa_noise_figure == 4.0
        assert s.tx_aperture == 0.2 and s.rx_aperture == 0.2
        assert s.filter_order == 4 and s.filter_cutoff == 7.5e9
        assert s.prbs_seed == 127
        assert s.grid().total_samples == 2048

    def test_comment_only_file(self):
        assert parse_scenario("# nothing but comments\n\n") == parse_scenario("")

    def test_derived_cutoff_follows_bit_rate(self):
        s = parse_scenario("bit_rate = 5 Gbps")
        assert s.filter_cutoff == pytest.approx(0.75 * 5e9)

    def test_derived_prbs_seed_follows_order(self):
        s = parse_scenario("prbs_order = 9")
        assert s.prbs_seed == 2 ** 9 - 1


class TestOverrides:
    def test_single_range_override(self):
        s = parse_scenario("range = 50000 km")
        assert s == dataclasses.replace(parse_scenario(""), range=5.0e7)

    def test_unit_suffixes(self):
        s = parse_scenario(
            "wavelength = 1550nm\n"
            "laser_linewidth = 10 MHz\n"
            "apd_dark_current = 10 nA\n"
            "filter_cutoff = 7.5 GHz\n"
            "tx_pointing_error = 2 urad\n"
        )
        assert s.wavelength == pytest.approx(1.55e-6)
        assert s.laser_linewidth == 10e6
        assert s.apd_dark_current == pytest.approx(1e-8)
        assert s.tx_pointing_error == pytest.approx(2e-6)

    def test_inline_comment(self):
        s = parse_scenario("range = 60000 km  # longest hop studied")
        assert s.range == 6.0e7

    def test_aperture_alias_sets_both(self):
        s = parse_scenario("aperture = 15 cm")
        assert s.tx_aperture == pytest.approx(0.15)
        assert s.rx_aperture == pytest.approx(0.15)

    def test_booleans(self):
        s = parse_scenario("noise_shot = false\nnoise_dark = off\n")
        assert not s.noise_shot and not s.noise_dark and s.noise_thermal


class TestParseErrors:
    def test_unknown_key_with_suggestion(self):
        with pytest.raises(ScenarioParseError) as err:
            parse_scenario("wavelenth = 860 nm")
        assert "wavelenth" in str(err.value)
        assert "wavelength" in str(err.value)
        assert err.value.line_no == 1

    def test_unit_mismatch_names_key_and_line(self):
        with pytest.raises(ScenarioParseError) as err:
            parse_scenario("# comment line\nrange = 30 dBm")
        assert err.value.key == "range"
        assert err.value.line_no == 2

    def test_duplicate_key(self):
        with pytest.raises(ScenarioParseError, match="duplicate"):
            parse_scenario("range = 1 km\nrange = 2 km")

    def test_missing_equals(self):
        with pytest.raises(ScenarioParseError, match="key = value"):
            parse_scenario("range 40000 km")

    def test_bad_boolean(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario("noise_shot = maybe")

    def test_invariant_violation_becomes_parse_error(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario("wavelength = 100 nm")  # outside [400, 2000] nm

    def test_cutoff_above_nyquist_rejected(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario("filter_cutoff = 400 GHz")


class TestRoundTrip:
    def test_reference_round_trip(self):
        s = parse_scenario("")
        assert parse_scenario(scenario_to_text(s)) == s

    def test_overrides_only_echo_round_trips(self):
        s = parse_scenario("range = 50000 km\nnoise_shot = false\nlabel = hop2")
        echo = scenario_to_text(s, only_overrides=True)
        assert "range" in echo and "label" in echo and "bit_rate" not in echo
        assert parse_scenario(echo) == s

    @given(
        wavelength=st.floats(min_value=500e-9, max_value=1900e-9),
        rng=st.floats(min_value=1e6, max_value=1e9),
        laser_power=st.floats(min_value=-10.0, max_value=30.0),
        runs=st.integers(min_value=1, max_value=8),
        seed=st.integers(min_value=0, max_value=2 ** 64 - 1),
        shot=st.booleans(),
    )
    @settings(max_examples=40, deadline=None)
    def test_round_trip_random_scenarios(self, wavelength, rng, laser_power, runs, seed, shot):
        s = dataclasses.replace(
            Scenario(),
            wavelength=wavelength,
            range=rng,
            laser_power=laser_power,
            runs_to_pool=runs,
            rng_seed=seed,
            noise_shot=shot,
        ).validate()
        assert parse_scenario(scenario_to_text(s)) == s


class TestSweepHelpers:
    def test_parse_sweep_value_with_units(self):
        assert parse_sweep_value("range", "50000 km") == 5.0e7
        assert parse_sweep_value("wavelength", 1.55e-6) == 1.55e-6
        assert parse_sweep_value("aperture", "15 cm") == pytest.approx(0.15)

    def test_unknown_sweep_param(self):
        with pytest.raises(InvalidParameterError, match="rnage"):
            parse_sweep_value("rnage", "1 km")

    def test_non_numeric_sweep_param(self):
        with pytest.raises(InvalidParameterError):
            parse_sweep_value("label", "x")
        with pytest.raises(InvalidParameterError):
            parse_sweep_value("noise_shot", "true")

    def test_sweepable_keys_exclude_text_and_bools(self):
        keys = sweepable_keys()
        assert "wavelength" in keys and "aperture" in keys
        assert "label" not in keys and "noise_shot" not in keys and "rng_seed" not in keys

    def test_apply_override_validates(self):
        s = parse_scenario("")
        with pytest.raises(InvalidParameterError):
            apply_override(s, "range", -5.0)
        assert apply_override(s, "aperture", 0.3).rx_aperture == 0.3
