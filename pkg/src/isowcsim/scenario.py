"""Scenario files: flat key = value format with unit suffixes.

An empty file yields the reference link: 860 nm / 15 dBm / 10 MHz laser,
30 dB MZM, 30 dB / 4 dB EDFA, 40,000 km vacuum hop with 20 cm apertures,
APD with gain 3 and ionization ratio 0.9, 4th-order Bessel filter cut at
0.75x the 10 Gbps bit rate, 32-bit PRBS-7 pattern at 64 samples per bit.
"""
from __future__ import annotations

import difflib
import re
from dataclasses import dataclass, fields, replace

from .channel import OwcParams
from .errors import InvalidParameterError, ScenarioParseError
from .receiver import MAX_FILTER_ORDER, ApdParams, BesselFilterParams
from .signals import (
    LFSR_TAPS,
    BitSequence,
    NoiseFlags,
    SimulationGrid,
    make_grid,
    prbs_generate,
)
from .transmitter import EdfaParams, LaserParams, MzmParams

_RATE_UNITS = {
    "": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12,
    "bps": 1.0, "kbps": 1e3, "Mbps": 1e6, "Gbps": 1e9,
}
_FREQ_UNITS = {"": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12}
_LENGTH_UNITS = {
    "": 1.0, "nm": 1e-9, "um": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0,
    "km": 1e3, "Mm": 1e6,
}
_DBM_UNITS = {"": 1.0, "dBm": 1.0}
_DB_UNITS = {"": 1.0, "dB": 1.0}
_CURRENT_UNITS = {"": 1.0, "nA": 1e-9, "uA": 1e-6, "mA": 1e-3, "A": 1.0}
_ANGLE_UNITS = {"": 1.0, "urad": 1e-6, "mrad": 1e-3, "rad": 1.0}
_BARE = {"": 1.0}

# key -> (unit table or "int"/"bool"/"text", default or None when derived)
_KEY_TABLE: dict[str, tuple] = {
    "bit_rate": (_RATE_UNITS, 10e9),
    "seq_len_bits": ("int", 32),
    "samples_per_bit": ("int", 64),
    "prbs_order": ("int", 7),
    "prbs_seed": ("int", None),          # derived: all-ones for prbs_order
    "nrz_rise_fraction": (_BARE, 0.0),
    "laser_power": (_DBM_UNITS, 15.0),
    "laser_linewidth": (_FREQ_UNITS, 10e6),
    "wavelength": (_LENGTH_UNITS, 860e-9),
    "mzm_extinction": (_DB_UNITS, 30.0),
    "edfa_gain": (_DB_UNITS, 30.0),
    "edfa_noise_figure": (_DB_UNITS, 4.0),
    "range": (_LENGTH_UNITS, 4.0e7),
    "tx_aperture": (_LENGTH_UNITS, 0.2),
    "rx_aperture": (_LENGTH_UNITS, 0.2),
    "tx_optics_efficiency": (_BARE, 1.0),
    "rx_optics_efficiency": (_BARE, 1.0),
    "tx_extra_gain": (_DB_UNITS, 0.0),
    "rx_extra_gain": (_DB_UNITS, 0.0),
    "tx_pointing_error": (_ANGLE_UNITS, 0.0),
    "rx_pointing_error": (_ANGLE_UNITS, 0.0),
    "additional_loss": (_DB_UNITS, 0.0),
    "apd_responsivity": (_BARE, 1.0),
    "apd_gain": (_BARE, 3.0),
    "apd_ionization_ratio": (_BARE, 0.9),
    "apd_dark_current": (_CURRENT_UNITS, 10e-9),
    "thermal_noise_psd": (_BARE, 1.0e-22),
    "filter_order": ("int", 4),
    "filter_cutoff": (_FREQ_UNITS, None),  # derived: 0.75 * bit_rate
    "excluded_bits": ("int", 0),
    "noise_ase": ("bool", True),
    "noise_shot": ("bool", True),
    "noise_thermal": ("bool", True),
    "noise_dark": ("bool", True),
    "rng_seed": ("int", 1),
    "runs_to_pool": ("int", 16),
    "label": ("text", "reference"),
}

# Convenience key writing both apertures at once (used by aperture sweeps).
_ALIASES = {"aperture": ("tx_aperture", "rx_aperture")}

_VALUE_RE = re.compile(r"^([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*([A-Za-z/]*)$")
_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


@dataclass(frozen=True)
class Scenario:
    """Complete description of one simulated link, flat by design."""

    bit_rate: float = 10e9
    seq_len_bits: int = 32
    samples_per_bit: int = 64
    prbs_order: int = 7
    prbs_seed: int = 127
    nrz_rise_fraction: float = 0.0
    laser_power: float = 15.0
    laser_linewidth: float = 10e6
    wavelength: float = 860e-9
    mzm_extinction: float = 30.0
    edfa_gain: float = 30.0
    edfa_noise_figure: float = 4.0
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
    apd_responsivity: float = 1.0
    apd_gain: float = 3.0
    apd_ionization_ratio: float = 0.9
    apd_dark_current: float = 10e-9
    thermal_noise_psd: float = 1.0e-22
    filter_order: int = 4
    filter_cutoff: float = 7.5e9
    excluded_bits: int = 0
    noise_ase: bool = True
    noise_shot: bool = True
    noise_thermal: bool = True
    noise_dark: bool = True
    rng_seed: int = 1
    runs_to_pool: int = 16
    label: str = "reference"

    def validate(self) -> "Scenario":
        """Check every module invariant; raises InvalidParameterError."""
        self.grid()
        if self.prbs_order not in LFSR_TAPS:
            raise InvalidParameterError(
                f"prbs_order must be in [3, 31], got {self.prbs_order}"
            )
        if self.prbs_seed & ((1 << self.prbs_order) - 1) == 0:
            raise InvalidParameterError("prbs_seed must be nonzero in the register")
        if not 0.0 <= self.nrz_rise_fraction <= 0.5:
            raise InvalidParameterError(
                f"nrz_rise_fraction must lie in [0, 0.5], got {self.nrz_rise_fraction}"
            )
        self.laser_params()
        self.mzm_params()
        self.edfa_params()
        self.owc_params()
        self.apd_params()
        if not 1 <= self.filter_order <= MAX_FILTER_ORDER:
            raise InvalidParameterError(
                f"filter_order must lie in [1, {MAX_FILTER_ORDER}], got {self.filter_order}"
            )
        nyquist = self.bit_rate * self.samples_per_bit / 2.0
        if not 0.0 < self.filter_cutoff < nyquist:
            raise InvalidParameterError(
                f"filter_cutoff must lie in (0, {nyquist}) Hz, got {self.filter_cutoff}"
            )
        if self.excluded_bits < 0 or 2 * self.excluded_bits >= self.seq_len_bits:
            raise InvalidParameterError(
                f"excluded_bits={self.excluded_bits} leaves no usable rows"
            )
        if not 0 <= self.rng_seed < 2 ** 64:
            raise InvalidParameterError("rng_seed must be a 64-bit unsigned integer")
        if self.runs_to_pool < 1:
            raise InvalidParameterError("runs_to_pool must be >= 1")
        if re.search(r"[,\r\n]", self.label):
            raise InvalidParameterError("label must not contain commas or newlines")
        return self

    # Builders for the per-block parameter objects.
    def grid(self) -> SimulationGrid:
        return make_grid(self.bit_rate, self.seq_len_bits, self.samples_per_bit)

    def bits(self) -> BitSequence:
        return prbs_generate(self.prbs_order, self.prbs_seed, self.seq_len_bits)

    def laser_params(self) -> LaserParams:
        return LaserParams(self.laser_power, self.laser_linewidth, self.wavelength)

    def mzm_params(self) -> MzmParams:
        return MzmParams(self.mzm_extinction)

    def edfa_params(self) -> EdfaParams:
        return EdfaParams(self.edfa_gain, self.edfa_noise_figure)

    def owc_params(self) -> OwcParams:
        return OwcParams(
            range=self.range,
            tx_aperture=self.tx_aperture,
            rx_aperture=self.rx_aperture,
            tx_optics_efficiency=self.tx_optics_efficiency,
            rx_optics_efficiency=self.rx_optics_efficiency,
            tx_extra_gain=self.tx_extra_gain,
            rx_extra_gain=self.rx_extra_gain,
            tx_pointing_error=self.tx_pointing_error,
            rx_pointing_error=self.rx_pointing_error,
            additional_loss=self.additional_loss,
        )

    def apd_params(self) -> ApdParams:
        return ApdParams(
            responsivity=self.apd_responsivity,
            multiplication_gain=self.apd_gain,
            ionization_ratio=self.apd_ionization_ratio,
            dark_current=self.apd_dark_current,
            thermal_noise_psd=self.thermal_noise_psd,
        )

    def filter_params(self) -> BesselFilterParams:
        return BesselFilterParams(self.filter_order, self.filter_cutoff)

    def noise_flags(self) -> NoiseFlags:
        return NoiseFlags(
            ase=self.noise_ase,
            shot=self.noise_shot,
            thermal=self.noise_thermal,
            dark=self.noise_dark,
        )


def _parse_value(key: str, raw: str, line_no: int):
    kind = _KEY_TABLE[key][0]
    if kind == "text":
        return raw
    if kind == "bool":
        word = raw.strip().lower()
        if word not in _BOOL_WORDS:
            raise ScenarioParseError(
                f"line {line_no}: key '{key}' expects a boolean, got '{raw}'",
                key=key, line_no=line_no,
            )
        return _BOOL_WORDS[word]
    if kind == "int":
        try:
            return int(raw.strip(), 0)
        except ValueError:
            raise ScenarioParseError(
                f"line {line_no}: key '{key}' expects an integer, got '{raw}'",
                key=key, line_no=line_no,
            ) from None
    match = _VALUE_RE.match(raw.strip())
    if match is None:
        raise ScenarioParseError(
            f"line {line_no}: cannot parse numeric value '{raw}' for key '{key}'",
            key=key, line_no=line_no,
        )
    number, unit = match.group(1), match.group(2)
    if unit not in kind:
        allowed = ", ".join(u for u in kind if u) or "none"
        raise ScenarioParseError(
            f"line {line_no}: unit '{unit}' not valid for key '{key}' "
            f"(allowed: {allowed})",
            key=key, line_no=line_no,
        )
    return float(number) * kind[unit]


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text, fill defaults, derive dependent keys, validate."""
    values: dict[str, object] = {}
    seen: set[str] = set()
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(
                f"line {line_no}: expected 'key = value', got '{line}'",
                line_no=line_no,
            )
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        targets = _ALIASES.get(key, (key,))
        if targets[0] not in _KEY_TABLE:
            hints = difflib.get_close_matches(
                key, list(_KEY_TABLE) + list(_ALIASES), n=1
            )
            hint = f" (did you mean '{hints[0]}'?)" if hints else ""
            raise ScenarioParseError(
                f"line {line_no}: unknown key '{key}'{hint}", key=key, line_no=line_no
            )
        for target in targets:
            if target in seen:
                raise ScenarioParseError(
                    f"line {line_no}: duplicate key '{target}'",
                    key=target, line_no=line_no,
                )
            seen.add(target)
            values[target] = _parse_value(target, raw_value, line_no)
    for key, (_, default) in _KEY_TABLE.items():
        if key not in values and default is not None:
            values[key] = default
    if "prbs_seed" not in values:
        values["prbs_seed"] = (1 << int(values["prbs_order"])) - 1
    if "filter_cutoff" not in values:
        values["filter_cutoff"] = 0.75 * float(values["bit_rate"])
    scenario = Scenario(**values)
    try:
        return scenario.validate()
    except ScenarioParseError:
        raise
    except InvalidParameterError as exc:
        raise ScenarioParseError(str(exc)) from exc


def scenario_to_text(s: Scenario, only_overrides: bool = False) -> str:
    """Normalized echo in canonical SI units; parse_scenario round-trips it."""
    defaults = Scenario()
    lines = []
    for f in fields(Scenario):
        value = getattr(s, f.name)
        if only_overrides and value == getattr(defaults, f.name):
            continue
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + ("\n" if lines else "")


def sweepable_keys() -> list[str]:
    """Scenario keys that hold a single numeric value (sweep targets)."""
    keys = [
        k for k, (kind, _) in _KEY_TABLE.items()
        if kind not in ("bool", "text") and k != "rng_seed"
    ]
    keys.extend(_ALIASES)
    return keys


def parse_sweep_value(param: str, raw: str | float) -> float:
    """Interpret one sweep value with the unit table of the swept key."""
    key = _ALIASES.get(param, (param,))[0]
    if key not in _KEY_TABLE:
        hints = difflib.get_close_matches(param, sweepable_keys(), n=1)
        hint = f" (did you mean '{hints[0]}'?)" if hints else ""
        raise InvalidParameterError(f"unknown sweep parameter '{param}'{hint}")
    kind = _KEY_TABLE[key][0]
    if kind in ("bool", "text") or param == "rng_seed":
        raise InvalidParameterError(f"'{param}' is not a numeric sweep parameter")
    if isinstance(raw, (int, float)):
        return float(raw)
    value = _parse_value(key, str(raw).strip(), 0)
    return float(value)


def apply_override(s: Scenario, param: str, value: float) -> Scenario:
    """Return a copy of ``s`` with one numeric parameter replaced."""
    targets = _ALIASES.get(param, (param,))
    updates = {}
    for target in targets:
        kind = _KEY_TABLE[target][0]
        updates[target] = int(value) if kind == "int" else float(value)
    return replace(s, **updates).validate()
