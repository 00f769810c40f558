"""Exception hierarchy shared by all simulator blocks."""
from __future__ import annotations


class IsowcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(IsowcError, ValueError):
    """A parameter or signal violates a documented precondition."""


class ScenarioParseError(InvalidParameterError):
    """Scenario text could not be parsed; carries the offending key and line."""

    def __init__(self, message: str, key: str | None = None, line_no: int | None = None):
        super().__init__(message)
        self.key = key
        self.line_no = line_no


class NumericError(IsowcError, RuntimeError):
    """A numeric routine failed to converge or produced unusable output."""


class CalibrationError(IsowcError, RuntimeError):
    """Thermal-noise calibration cannot reach the requested target."""


class SimulationError(IsowcError, RuntimeError):
    """Failure inside the waveform chain, attributed to the block that raised."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def error_kind(exc: BaseException) -> str:
    """Classify an exception as 'validation' or 'runtime' for exit-code mapping."""
    if isinstance(exc, InvalidParameterError):
        return "validation"
    if isinstance(exc, SimulationError) and isinstance(exc.__cause__, InvalidParameterError):
        return "validation"
    return "runtime"
