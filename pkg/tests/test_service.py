"""HTTP facade: status mapping, envelopes, byte-deterministic responses."""

import json

import pytest
from fastapi.testclient import TestClient

from logsing.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": "1"}


def test_examples_listing(client):
    r = client.get("/examples")
    assert r.status_code == 200
    names = [e["name"] for e in r.json()["examples"]]
    assert "prototype" in names and "kdv-laurent" in names
    assert len(names) == 9


def test_solve_inline_input(client):
    r = client.post("/solve", json={
        "input": "order = 8\nD[t,2](u) = D[t,1](u)^2 + t",
    })
    assert r.status_code == 200
    doc = r.json()
    assert doc["mode"] == "series"
    assert doc["residual"]["certified_order"] == 8
    assert doc["leading"]["a"] == [{"alpha": [], "im": "0", "re": "-1"}]


def test_solve_example_with_override(client):
    r = client.post("/solve", json={"example": "m3-cubic", "order": 6,
                                    "max_deg": 2})
    assert r.status_code == 200
    doc = r.json()
    assert doc["config"]["order"] == 6
    assert doc["leading"]["roots"] == ["i", "-i"]


def test_analyze_reports_failing_assumptions_with_200(client):
    r = client.post("/analyze", json={"example": "m4-l1"})
    assert r.status_code == 200
    assert not r.json()["analysis"]["a2_holds"]


def test_parse_error_envelope_400(client):
    r = client.post("/solve", json={"input": "D[t,2](u) = D[t,1](u)^^2"})
    assert r.status_code == 400
    err = r.json()["error"]
    assert err["kind"] == "parse"
    assert err["line"] == 1
    assert err["col"] == 23
    assert "message" in err


def test_assumption_failure_422(client):
    r = client.post("/solve", json={"example": "m4-l1"})
    assert r.status_code == 422
    assert r.json()["error"]["kind"] == "assumptions"


def test_resonance_envelope_carries_exponent(client):
    r = client.post("/solve", json={
        "input": "D[t,2](u) = -4*D[t,1](u)^2 + 3*t*D[t,1](u)^3 + 1",
        "root_index": 1, "order": 6,
    })
    assert r.status_code == 422
    err = r.json()["error"]
    assert err["kind"] == "resonance"
    assert err["exponent"] == "2"


def test_input_xor_example_enforced(client):
    both = client.post("/solve", json={"input": "D[t,2](u) = D[t,1](u)^2",
                                       "example": "prototype"})
    neither = client.post("/solve", json={})
    assert both.status_code == 400
    assert neither.status_code == 400
    assert both.json()["error"]["kind"] == "config"


def test_unknown_example_400(client):
    r = client.post("/solve", json={"example": "missing"})
    assert r.status_code == 400


def test_byte_determinism(client):
    payload = {"example": "wave-quadratic"}
    r1 = client.post("/solve", json=payload)
    r2 = client.post("/solve", json=payload)
    assert r1.status_code == r2.status_code == 200
    assert r1.content == r2.content
    # canonical form: sorted keys, two-space indent, trailing newline
    assert r1.content.endswith(b"\n")
    assert json.dumps(json.loads(r1.content), sort_keys=True, indent=2) \
        == r1.content.decode().rstrip("\n")


def test_prescribed_solve_via_service(client):
    r = client.post("/solve", json={"example": "kdv-laurent"})
    assert r.status_code == 200
    doc = r.json()
    assert doc["mode"] == "prescribed"
    assert doc["prescribed"]["resonances"] == ["2", "4"]


def test_verify_endpoint(client):
    r = client.post("/verify", json={"example": "prototype"})
    assert r.status_code == 200
    ver = r.json()["verification"]
    assert ver["certified"] is True
    assert ver["exact_arithmetic"] is True


def test_majorant_endpoint(client):
    r = client.post("/majorant", json={
        "input": "order = 6\nD[t,2](u) = D[t,1](u)^2 + t"})
    assert r.status_code == 200
    maj = r.json()["majorant"]
    assert maj["verification"]["all_bounds_hold"] is True
    assert maj["cross_check"]["scaled_sequence_agrees"] is True
    assert maj["params"]["A1"] == "1/4"
