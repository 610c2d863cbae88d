import pytest
from fastapi.testclient import TestClient

from riskwarden import registry
from riskwarden.core import Dynamics, Origin, Presence
from riskwarden.dynamics import build_risk
from riskwarden.scoring import inverse_probable
from riskwarden.service import create_app


@pytest.fixture
def register_path(tmp_path):
    path = str(tmp_path / "register.json")
    register = registry.create_register(
        path, registry.Horizon("operation", 12), ["macro", "firm"])
    existing = build_risk("A", "logistics cost overrun", "firm",
                          Origin.INTERNAL, Presence.EXISTING, 0.0)
    probable = build_risk("B", "supply disruption", "macro", Origin.EXTERNAL,
                          Presence.PROBABLE,
                          inverse_probable(0.8, Dynamics.GROWING))
    registry.add_risk(register, existing)
    registry.add_risk(register, probable)
    return path


@pytest.fixture
def client(register_path):
    return TestClient(create_app(register_path))


class TestBasics:
    def test_healthz(self, client):
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"

    def test_unknown_route_is_machine_readable(self, client):
        response = client.get("/definitely/not/here")
        assert response.status_code == 404
        assert response.json()["code"] == "not_found"

    def test_corrupt_register_aborts_startup(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        from riskwarden.errors import ParseError
        with pytest.raises(ParseError):
            create_app(str(path))


class TestRiskCrud:
    def test_list_and_get(self, client):
        risks = client.get("/risks").json()["risks"]
        assert {r["id"] for r in risks} == {"A", "B"}
        single = client.get("/risks/A").json()
        assert single["presence"] == "existing"

    def test_get_unknown_risk(self, client):
        response = client.get("/risks/nope")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_risk"

    def test_create_patch_retire(self, client):
        response = client.post("/risks", json={
            "id": "C", "name": "new risk", "sphere": "firm",
            "origin": "internal", "presence": "probable", "driver": 0.3,
        })
        assert response.status_code == 201
        response = client.patch("/risks/C", json={"name": "renamed"})
        assert response.json()["name"] == "renamed"
        response = client.post("/risks/C/retire")
        assert response.json()["status"] == "retired"

    def test_duplicate_id_conflict(self, client):
        response = client.post("/risks", json={
            "id": "A", "name": "dup", "origin": "internal",
            "presence": "probable", "driver": 0.3,
        })
        assert response.status_code == 409
        assert response.json()["code"] == "duplicate_id"


class TestObservations:
    def test_read_your_writes(self, client):
        before = client.get("/assessment").json()["e_p"]
        response = client.post("/risks/A/observations", json={
            "t": 1.0, "kind": "severity", "value": 0.5,
        })
        assert response.status_code == 200
        after = client.get("/assessment").json()["e_p"]
        assert after != before

    def test_transition_events_returned(self, client):
        response = client.post("/risks/B/observations", json={
            "t": 1.0, "kind": "probability", "value": 0.99,
        })
        kinds = [e["kind"] for e in response.json()["events"]]
        assert "probable_to_existing" in kinds

    def test_out_of_range_value(self, client):
        response = client.post("/risks/B/observations", json={
            "t": 1.0, "kind": "probability", "value": 1.5,
        })
        assert response.status_code == 400
        assert response.json()["code"] == "driver_out_of_domain"

    def test_csv_import(self, client):
        csv = ("risk_id,t,kind,value,note\n"
               "A,1,severity,0.2,\n"
               "A,2,severity,9.9,\n")
        response = client.post("/observations/import", content=csv)
        body = response.json()
        assert body["accepted"] == 1
        assert len(body["rejected"]) == 1


class TestAssessmentEndpoints:
    def test_assessment_fixture_values(self, client):
        body = client.get("/assessment").json()
        assert body["formatted"]["e_p"] == "0.400000000000"
        assert body["r"] == pytest.approx(1.3, abs=1e-12)

    def test_whatif_never_persists(self, client):
        live = client.get("/assessment").json()
        hypo = client.post("/whatif", json={
            "interventions": [{"risk_id": "B", "remove": True}],
        }).json()
        assert hypo["formatted"]["e_p"] == "0.500000000000"
        assert client.get("/assessment").json() == live

    def test_cycle(self, client):
        body = client.post("/cycle", json={}).json()
        assert body["complete"] is True
        assert len(body["stages"]) == 9

    def test_events_since(self, client):
        client.post("/risks/A/observations",
                    json={"t": 3.0, "kind": "severity", "value": 0.4})
        events = client.get("/events", params={"since": 3.0}).json()["events"]
        assert events
        assert all(e["t"] >= 3.0 for e in events)
