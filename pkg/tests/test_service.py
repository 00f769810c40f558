import math

import pytest
from fastapi.testclient import TestClient

from isowcsim.linkbudget import analytic_metrics
from isowcsim.scenario import parse_scenario
from isowcsim.service import create_app

QUICK = "runs_to_pool = 2\n"
NOISE_FREE = (
    "noise_ase = false\nnoise_shot = false\nnoise_thermal = false\n"
    "noise_dark = false\nruns_to_pool = 1\n"
)


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}


class TestRunEndpoint:
    def test_reference_run(self, client):
        response = client.post("/run", json={"scenario_text": QUICK})
        assert response.status_code == 200
        body = response.json()
        metrics = body["metrics"]
        assert metrics["label"] == "reference"
        assert metrics["runs_pooled"] == 2
        assert metrics["q_factor"] > 5
        assert metrics["rx_optical_dbm"] == pytest.approx(-20.83, abs=0.05)
        assert body["overrides"] == ["runs_to_pool = 2"]

    def test_saturated_q_travels_as_null(self, client):
        response = client.post("/run", json={"scenario_text": NOISE_FREE})
        assert response.status_code == 200
        metrics = response.json()["metrics"]
        assert metrics["saturated"] is True
        assert metrics["ber"] == 0.0

    def test_parse_error_maps_to_422(self, client):
        response = client.post("/run", json={"scenario_text": "wavelenth = 860 nm"})
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert detail["kind"] == "validation"
        assert detail["line"] == 1
        assert "wavelength" in detail["message"]

    def test_determinism_across_requests(self, client):
        a = client.post("/run", json={"scenario_text": QUICK}).json()
        b = client.post("/run", json={"scenario_text": QUICK}).json()
        assert a == b


class TestSweepEndpoint:
    def test_aperture_sweep(self, client):
        response = client.post(
            "/sweep",
            json={
                "scenario_text": NOISE_FREE,
                "param": "aperture",
                "values": ["20 cm", "15 cm"],
                "workers": 2,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["param"] == "aperture"
        assert body["failed"] is None
        assert len(body["rows"]) == 2
        assert body["rows"][0]["delta_db"] == 0.0
        assert body["rows"][1]["delta_db"] == pytest.approx(-9.9951, abs=0.01)

    def test_unknown_param_rejected(self, client):
        response = client.post(
            "/sweep",
            json={"scenario_text": "", "param": "rnage", "values": [1.0]},
        )
        assert response.status_code == 422
        assert response.json()["detail"]["kind"] == "validation"

    def test_runtime_failure_returns_partial_rows(self, client):
        response = client.post(
            "/sweep",
            json={
                "scenario_text": "runs_to_pool = 1\n",
                "param": "seq_len_bits",
                "values": [32, 4],
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert body["failed"]["row_index"] == 1
        assert len(body["rows"]) == 1


class TestBudgetEndpoint:
    def test_matches_direct_call(self, client):
        response = client.post("/budget", json={"scenario_text": ""})
        assert response.status_code == 200
        body = response.json()
        report = analytic_metrics(parse_scenario(""))
        assert body["rx_optical_dbm"] == report.rx_optical_power
        assert body["q_analytic"] == report.q_analytic
        assert body["noise_equivalent_bandwidth_hz"] == report.noise_equivalent_bandwidth

    def test_noise_free_budget_saturates(self, client):
        response = client.post("/budget", json={"scenario_text": NOISE_FREE})
        body = response.json()
        assert body["q_analytic"] is None
        assert body["ber_analytic"] == 0.0


class TestCalibrateEndpoint:
    def test_reference_target(self, client):
        response = client.post("/calibrate", json={"scenario_text": "", "target_q": 30.0})
        assert response.status_code == 200
        body = response.json()
        assert body["thermal_noise_psd"] == pytest.approx(1.253e-22, rel=0.01)
        assert body["budget"]["q_analytic"] == pytest.approx(30.0, rel=1e-3)
        assert body["override_line"].startswith("thermal_noise_psd = ")

    def test_unreachable_target_maps_to_runtime_error(self, client):
        response = client.post("/calibrate", json={"scenario_text": "", "target_q": 1e6})
        assert response.status_code == 400
        assert response.json()["detail"]["kind"] == "runtime"


class TestEyeEndpoint:
    def test_dimensions_and_conservation(self, client):
        response = client.post(
            "/eye",
            json={"scenario_text": "runs_to_pool = 1\n", "time_bins": 64, "amp_bins": 128},
        )
        assert response.status_code == 200
        body = response.json()
        assert len(body["offsets_s"]) == 64
        assert len(body["traces"]) == 32
        assert len(body["labels"]) == 32
        assert len(body["raster"]) == 64
        assert all(len(row) == 128 for row in body["raster"])
        assert sum(sum(row) for row in body["raster"]) == 2048
