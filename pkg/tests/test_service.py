"""HTTP surface: request validation, handler wiring, error mapping."""

import pytest

from fastapi.testclient import TestClient

from galcert.newform import level27_record, parse_coefficient_file, record_to_file
from galcert.service import app, resolve_record


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok" and "version" in body


def test_coeffs_roundtrip(client):
    resp = client.post("/v1/coeffs", json={"builtin": "level27", "precision": 200})
    assert resp.status_code == 200
    doc = resp.json()
    rec = parse_coefficient_file(doc)
    assert rec.level == 27 and rec.weight == 3 and rec.max_n == 200


def test_analyze_builtin(client):
    resp = client.post("/v1/analyze", json={"builtin": "level27", "precision": 500})
    assert resp.status_code == 200
    body = resp.json()
    assert body["k_degree"] == 1 and body["L_equals_K"] is True


def test_analyze_inline_document(client):
    doc = record_to_file(level27_record(B=500, validate=False))
    resp = client.post("/v1/analyze", json={"document": doc, "validate": False})
    assert resp.status_code == 200
    assert resp.json()["k_degree"] == 1


def test_exceptional_set_with_choices(client):
    resp = client.post(
        "/v1/exceptional-set",
        json={
            "builtin": "level27",
            "precision": 500,
            "choices": {"q_primes": [109, 379], "p_primes": [5], "index_prime": 5},
        },
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["ell_level"] == [2, 3, 5, 7, 11]
    assert body["choices"]["q_primes"] == [109, 379]


def test_certify_level27(client):
    resp = client.post(
        "/v1/certify", json={"builtin": "level27", "precision": 500, "ell": 7}
    )
    assert resp.status_code == 200
    assert resp.json()["verdict"] == "PSL2(F_7)"


def test_scan_level27(client):
    resp = client.post(
        "/v1/scan",
        json={"builtin": "level27", "precision": 500, "min": 11, "max": 13},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["all_large_image"] is True
    assert set(body["verdicts"]) == {"11", "13"}


def test_oracle_endpoint(client):
    resp = client.post("/v1/oracle", json={"qs": [3], "even_qs": [2]})
    assert resp.status_code == 200
    assert resp.json()["ok"] is True


def test_unknown_builtin_is_400(client):
    resp = client.post("/v1/analyze", json={"builtin": "level99"})
    assert resp.status_code == 400
    assert "unknown builtin" in resp.json()["detail"]


def test_composite_ell_is_400(client):
    resp = client.post("/v1/certify", json={"builtin": "level27", "ell": 6, "precision": 500})
    assert resp.status_code == 400
    assert "not prime" in resp.json()["detail"]


def test_bad_document_is_400(client):
    resp = client.post("/v1/analyze", json={"document": {"format": "wrong"}})
    assert resp.status_code == 400


def test_ingest_offline_is_400(client):
    resp = client.post(
        "/v1/ingest", json={"label": "27.3.b.a", "offline": True}
    )
    assert resp.status_code == 400
    assert "offline" in resp.json()["detail"]


def test_resolve_record_requires_exactly_one_source():
    with pytest.raises(ValueError):
        resolve_record({})
    with pytest.raises(ValueError):
        resolve_record({"builtin": "level27", "document": {"format": "x"}})
