from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from src.sl2_endoscopy.config import settings
from src.sl2_endoscopy.main import app

client = TestClient(app)
API = settings.API_PREFIX
Q3 = "Qp:p=3,prec=12"


def test_root():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "running"


def test_health():
    response = client.get(f"{API}/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["arithmetic"] == "healthy"
    assert body["version"] == settings.APP_VERSION


def test_classify():
    response = client.post(f"{API}/classify", json={"field": Q3, "ext": "ramified"})
    assert response.status_code == 200
    body = response.json()
    assert body["kind"] == "ramified"
    assert body["epsilon_minus_one"] == -1
    assert body["config"]["field"] == Q3


@pytest.mark.parametrize("x, value", [("3", -1), ("2", 1), ("9", 1)])
def test_epsilon(x, value):
    response = client.post(f"{API}/epsilon", json={"field": Q3, "ext": "unramified", "x": x})
    assert response.status_code == 200
    assert response.json()["value"] == value


def test_orbital():
    response = client.post(f"{API}/orbital", json={"field": Q3, "ext": "unramified", "a": "3", "b": "2"})
    assert response.status_code == 200
    body = response.json()
    assert body["value"]["exact"] == "1"
    assert body["kappa"] == "1"


def test_kappa_orbital_of_an_unrelated_character_vanishes():
    payload = {"field": Q3, "ext": "unramified", "a": "3", "b": "2", "kappa": "ramified"}
    response = client.post(f"{API}/orbital", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["vanishing"]
    assert body["value"]["exact"] == "0"


def test_fl_check():
    response = client.post(f"{API}/fl-check", json={"field": Q3, "ext": "unramified", "depth": 3})
    assert response.status_code == 200
    body = response.json()
    assert body["fl_pass"]
    assert body["verdict"] == "passed"


@pytest.mark.parametrize(
    "payload, position",
    [
        ({"field": "Qp:p=3,prec=12", "ext": "bogus"}, 0),
        ({"field": "Qp:p=3,prec=12", "ext": "ext:t=0"}, 7),
    ],
)
def test_parse_errors_are_client_errors(payload, position):
    response = client.post(f"{API}/classify", json=payload)
    assert response.status_code == 400
    detail = response.json()["detail"]
    assert detail["error"] == "ParseError"
    assert detail["position"] == position


def test_non_regular_elements_are_rejected():
    response = client.post(f"{API}/orbital", json={"field": Q3, "ext": "unramified", "a": "1", "b": "0"})
    assert response.status_code == 422
    assert response.json()["error"] == "RegularityError"


def test_request_validation():
    response = client.post(f"{API}/fl-check", json={"field": Q3, "depth": 99})
    assert response.status_code == 422


@pytest.mark.slow
def test_verify_uses_the_request_id():
    response = client.post(
        f"{API}/verify",
        json={"quick": True, "orchestration_mode": "parallel", "seed": 1},
        headers={"X-Request-ID": "req-42"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["run_id"] == "req-42"
    assert body["verdict"] == "passed"
    assert len(body["check_results"]) == 13
    assert all(r["execution_time"] is not None for r in body["check_results"])
