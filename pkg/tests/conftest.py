import dataclasses

import pytest

from isowcsim.linkbudget import calibrate_thermal
from isowcsim.scenario import Scenario, parse_scenario


@pytest.fixture(scope="session")
def reference() -> Scenario:
    """Table-1 reference scenario (empty scenario file)."""
    return parse_scenario("")


@pytest.fixture(scope="session")
def noise_free(reference) -> Scenario:
    return dataclasses.replace(
        reference,
        noise_ase=False,
        noise_shot=False,
        noise_thermal=False,
        noise_dark=False,
    )


@pytest.fixture(scope="session")
def calibrated_psd(reference) -> float:
    """Thermal PSD that puts the analytic reference Q at 30."""
    return calibrate_thermal(reference, 30.0)


@pytest.fixture(scope="session")
def calibrated(reference, calibrated_psd) -> Scenario:
    return dataclasses.replace(reference, thermal_noise_psd=calibrated_psd)
