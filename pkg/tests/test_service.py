"""Tests for the HTTP facade: endpoint behavior, error mapping, and
bit-identical parity with the CLI's json artifacts."""

import json

import pytest
from fastapi.testclient import TestClient

from osmon import __version__
from osmon.artifacts import (
    deaths_payload,
    guideline_payload,
    oc_payload,
    simulate_payload,
)
from osmon.document import resolve_document
from osmon.service import SIM_REPS_CAP, app

from test_cli import SCENARIO, TABLE3, TABLE4, TABLE6


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def sim_doc(reps=200, seed=20260824):
    return dict(TABLE4, scenario=SCENARIO, sim={"reps": reps, "seed": seed})


class TestHealth:
    def test_reports_ok_and_version(self, client):
        r = client.get("/api/v1/health")
        assert r.status_code == 200
        assert r.json() == {"status": "ok", "version": __version__}

    def test_stable_across_requests(self, client):
        assert client.get("/api/v1/health").content == client.get("/api/v1/health").content


class TestGuideline:
    def test_add_on_design_rows(self, client):
        r = client.post("/api/v1/guideline", json=TABLE6)
        assert r.status_code == 200
        rows = r.json()["guideline"]["rows"]
        assert abs(rows[0]["threshold_hr"] - 1.209) < 1e-3
        assert abs(rows[0]["one_sided_fp_rate"] - 0.409) < 1e-3
        assert abs(rows[1]["threshold_hr"] - 0.999) < 1e-3
        assert abs(rows[1]["positivity_probs"][1] - 0.558) < 1e-3

    def test_repeated_request_identical(self, client):
        a = client.post("/api/v1/guideline", json=TABLE6)
        b = client.post("/api/v1/guideline", json=TABLE6)
        assert a.content == b.content

    def test_domain_bound_violation_is_400(self, client):
        r = client.post("/api/v1/guideline", json=dict(TABLE6, gamma_fa=0.6))
        assert r.status_code == 400
        body = r.json()
        assert body["code"] == "invalid_value"
        assert body["field_path"] == "gamma_fa"

    def test_malformed_body_is_400(self, client):
        r = client.post(
            "/api/v1/guideline",
            content=b"{not json",
            headers={"content-type": "application/json"},
        )
        assert r.status_code == 400
        assert r.json()["code"] == "invalid_json"


class TestOCEndpoint:
    def test_platform_design_final_fp_rate(self, client):
        r = client.post("/api/v1/oc", json=TABLE3)
        assert r.status_code == 200
        assert abs(r.json()["oc"]["fp_final"] - 0.025) < 1e-3

    def test_alt_probe_identity(self, client):
        r = client.post("/api/v1/oc", json=TABLE4)
        oc = r.json()["oc"]
        assert abs(oc["fn_primary"][0] - TABLE4["beta_pa"]) < 1e-10

    def test_malformed_k_is_400(self, client):
        r = client.post("/api/v1/oc", json=dict(TABLE4, k="two"))
        assert r.status_code == 400
        assert r.json()["field_path"] == "k"


class TestDeathsEndpoint:
    def test_timeline_starts_at_zero(self, client):
        r = client.post("/api/v1/deaths", json=dict(TABLE4, scenario=SCENARIO))
        assert r.status_code == 200
        first = r.json()["timeline"][0]
        assert first == {"months": 0.0, "expected_deaths": 0.0}

    def test_unreachable_is_422(self, client):
        doc = dict(
            TABLE4,
            scenario=dict(
                SCENARIO, n_patients=50, annual_dropout_prob=0.999, true_os_hr=1.0
            ),
        )
        r = client.post("/api/v1/deaths", json=doc)
        assert r.status_code == 422
        assert r.json()["code"] == "unreachable_target"

    def test_missing_scenario_is_400(self, client):
        r = client.post("/api/v1/deaths", json=TABLE4)
        assert r.status_code == 400
        assert r.json()["field_path"] == "scenario"

    def test_query_parameters_control_grid(self, client):
        r = client.post(
            "/api/v1/deaths?horizon_months=24&step_months=12",
            json=dict(TABLE4, scenario=SCENARIO),
        )
        months = [t["months"] for t in r.json()["timeline"]]
        assert months == [0.0, 12.0, 24.0]


class TestSimulateEndpoint:
    def test_deterministic_given_seed(self, client):
        a = client.post("/api/v1/simulate", json=sim_doc())
        b = client.post("/api/v1/simulate", json=sim_doc())
        assert a.status_code == 200
        assert a.content == b.content

    def test_agreement_flags_reported(self, client):
        r = client.post("/api/v1/simulate", json=sim_doc())
        miles = r.json()["simulation"]["milestones"]
        assert len(miles) == 3
        for m in miles:
            assert isinstance(m["agrees_within_3se"], bool)
            assert m["mc_std_err"] > 0.0

    def test_reps_over_cap_is_422(self, client):
        r = client.post("/api/v1/simulate", json=sim_doc(reps=SIM_REPS_CAP + 1))
        assert r.status_code == 422
        assert "cap" in r.json()["message"]

    def test_reps_under_minimum_is_422(self, client):
        r = client.post("/api/v1/simulate", json=sim_doc(reps=50))
        assert r.status_code == 422
        assert r.json()["code"] == "domain_error"


class TestCliParity:
    def test_payloads_match_cli_json_artifacts(self, client):
        resolved = resolve_document(sim_doc())
        cases = [
            ("/api/v1/guideline", guideline_payload(resolved)),
            ("/api/v1/oc", oc_payload(resolved)),
            ("/api/v1/deaths", deaths_payload(resolved)),
            ("/api/v1/simulate", simulate_payload(resolved)),
        ]
        for path, expected in cases:
            got = client.post(path, json=sim_doc()).json()
            assert got == json.loads(json.dumps(expected)), path
