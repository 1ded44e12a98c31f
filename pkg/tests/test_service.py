import time

import pytest
from fastapi.testclient import TestClient

from tacnet import MessageTaskSpec, ResourceSpec, ScenarioSpec, attach_scenario, save
from tacnet.service import create_app, model_from_json, model_to_json
from helpers import build_company


def wait_done(client, run_id, timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        handle = client.get(f"/runs/{run_id}").json()
        if handle["status"] in ("done", "failed"):
            return handle
        time.sleep(0.01)
    raise AssertionError("run did not finish in time")


@pytest.fixture
def company_with_scenario():
    c = build_company()
    attach_scenario(
        c.m,
        ScenarioSpec(
            name="drill",
            duration=600.0,
            seed=5,
            resources=[ResourceSpec(object=c.router.id, capacity=1, delay=0.5)],
            tasks=[
                MessageTaskSpec(
                    source=c.terminal.id,
                    destination=c.data_network.id,
                    label="position",
                    repeats=8,
                    interval_mean=60.0,
                    interval_sigma=2.0,
                )
            ],
        ),
    )
    return c


@pytest.fixture
def client(company_with_scenario):
    app = create_app(company_with_scenario.m)
    with TestClient(app) as tc:
        yield tc


class TestModelEndpoint:
    def test_get_json_projection(self, client):
        body = client.get("/model").json()
        assert body["name"] == "Company Model"
        assert len(body["objects"]) == 6
        assert len(body["connections"]) == 3
        assert body["scenarios"][0]["name"] == "drill"
        assert body["version"] == 0

    def test_get_xml_negotiated(self, client):
        response = client.get("/model", headers={"accept": "application/xml"})
        assert response.headers["content-type"].startswith("application/xml")
        assert response.content.startswith(b"<?xml")

    def test_put_xml_replaces(self, client, company_with_scenario):
        blob = save(company_with_scenario.m)
        response = client.put(
            "/model", content=blob, headers={"content-type": "application/xml"}
        )
        assert response.status_code == 200
        assert response.json()["version"] == 1

    def test_put_invalid_lists_violations(self, client, company_with_scenario):
        blob = save(company_with_scenario.m).decode()
        broken = blob.replace('a-interface="i4"', 'a-interface="i99"')
        response = client.put(
            "/model", content=broken, headers={"content-type": "application/xml"}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["error"] == "integrity-error"
        assert body["violations"]
        # the failed replacement left the model unchanged
        assert len(client.get("/model").json()["objects"]) == 6

    def test_put_json_projection_round_trips(self, client):
        body = client.get("/model").json()
        response = client.put("/model", json=body)
        assert response.status_code == 200
        after = client.get("/model").json()
        body.pop("version"), after.pop("version")
        assert after == body


class TestEditing:
    def test_duplicate_name_gets_auto_renamed(self, client, company_with_scenario):
        response = client.post(
            "/objects",
            json={"parent": company_with_scenario.platoon.id, "kind": "composite", "name": "AFV"},
        )
        assert response.status_code == 201
        assert response.json()["name"] == "AFV.1"

    def test_unknown_parent_404(self, client):
        response = client.post(
            "/objects", json={"parent": "o99", "kind": "network", "name": "X"}
        )
        assert response.status_code == 404
        assert response.json()["error"] == "not-found"

    def test_illegal_parent_422(self, client, company_with_scenario):
        response = client.post(
            "/objects",
            json={"parent": company_with_scenario.terminal.id, "kind": "network", "name": "X"},
        )
        assert response.status_code == 422
        assert response.json()["error"] == "illegal-parent"

    def test_illegal_connection_names_rule(self, client, company_with_scenario):
        c = company_with_scenario
        response = client.post(
            "/connections",
            json={
                "a_interface": c.terminal.interface().id,
                "b_interface": c.platoon.interface().id,
            },
        )
        assert response.status_code == 422
        assert response.json()["error"] == "illegal-connection"

    def test_legal_connection_created(self, client, company_with_scenario):
        c = company_with_scenario
        response = client.post(
            "/connections",
            json={
                "a_interface": c.afv.interface().id,
                "b_interface": c.router.interface().id,
            },
        )
        assert response.status_code == 201
        assert response.json()["id"]

    def test_copy_returns_subtree_summary(self, client, company_with_scenario):
        response = client.post(f"/objects/{company_with_scenario.afv.id}/copy")
        assert response.status_code == 201
        body = response.json()
        assert body["name"] == "AFV.1"
        assert body["objects"] == 4
        assert body["connections"] == 3

    def test_delete(self, client, company_with_scenario):
        response = client.delete(f"/objects/{company_with_scenario.afv.id}")
        assert response.status_code == 204
        assert len(client.get("/model").json()["objects"]) == 2

    def test_delete_root_rejected(self, client):
        assert client.delete("/objects/root").status_code == 422

    def test_stale_version_conflicts(self, client, company_with_scenario):
        ok = client.post(
            "/objects",
            json={"parent": "root", "kind": "network", "name": "N1"},
            headers={"if-match": "0"},
        )
        assert ok.status_code == 201
        stale = client.post(
            "/objects",
            json={"parent": "root", "kind": "network", "name": "N2"},
            headers={"if-match": "0"},
        )
        assert stale.status_code == 409
        assert stale.json()["error"] == "conflict"

    def test_mutation_failure_leaves_version(self, client):
        before = client.get("/model").json()["version"]
        client.post("/objects", json={"parent": "o99", "kind": "network", "name": "X"})
        assert client.get("/model").json()["version"] == before


class TestRuns:
    def test_run_lifecycle(self, client):
        response = client.post("/runs", json={"scenario": "drill", "seed": 9})
        assert response.status_code == 202
        handle = response.json()
        assert handle["status"] in ("pending", "running", "done")
        done = wait_done(client, handle["run_id"])
        assert done["status"] == "done"
        summary = client.get(f"/runs/{handle['run_id']}/summary").json()
        assert summary["labels"]["position"]["sent"] == 9
        log = client.get(f"/runs/{handle['run_id']}/log", params={"format": "jsonl"})
        assert len(log.text.strip().splitlines()) == summary["total_records"]

    def test_unknown_scenario_404(self, client):
        assert client.post("/runs", json={"scenario": "nope"}).status_code == 404

    def test_unknown_run_404(self, client):
        assert client.get("/runs/run-99").status_code == 404

    def test_csv_export(self, client):
        handle = client.post("/runs", json={"scenario": "drill"}).json()
        wait_done(client, handle["run_id"])
        log = client.get(f"/runs/{handle['run_id']}/log", params={"format": "csv"})
        assert log.headers["content-type"].startswith("text/csv")
        assert log.text.startswith("time,kind,")

    def test_same_seed_same_log_as_fresh_run(self, client):
        first = client.post("/runs", json={"scenario": "drill", "seed": 3}).json()
        second = client.post("/runs", json={"scenario": "drill", "seed": 3}).json()
        wait_done(client, first["run_id"])
        wait_done(client, second["run_id"])
        log1 = client.get(f"/runs/{first['run_id']}/log").text
        log2 = client.get(f"/runs/{second['run_id']}/log").text
        assert log1 == log2

    def test_eviction_yields_410(self, company_with_scenario):
        app = create_app(company_with_scenario.m, max_kept_logs=1)
        with TestClient(app) as client:
            first = client.post("/runs", json={"scenario": "drill"}).json()
            wait_done(client, first["run_id"])
            second = client.post("/runs", json={"scenario": "drill"}).json()
            wait_done(client, second["run_id"])
            # give the eviction hook a moment; it runs in the worker thread
            deadline = time.time() + 5
            while time.time() < deadline:
                if client.get(f"/runs/{first['run_id']}/log").status_code == 410:
                    break
                time.sleep(0.01)
            assert client.get(f"/runs/{first['run_id']}/log").status_code == 410
            assert client.get(f"/runs/{second['run_id']}/log").status_code == 200

    def test_runs_do_not_block_editing(self, client):
        handle = client.post("/runs", json={"scenario": "drill", "duration": 36000.0}).json()
        response = client.post(
            "/objects", json={"parent": "root", "kind": "network", "name": "During"}
        )
        assert response.status_code == 201
        wait_done(client, handle["run_id"])

    def test_run_uses_snapshot_of_model(self, client, company_with_scenario):
        handle = client.post("/runs", json={"scenario": "drill"}).json()
        client.delete(f"/objects/{company_with_scenario.afv.id}")
        done = wait_done(client, handle["run_id"])
        assert done["status"] == "done"


def test_projection_round_trip_standalone(company_with_scenario):
    data = model_to_json(company_with_scenario.m)
    rebuilt = model_from_json(data)
    assert model_to_json(rebuilt) == data


def test_ui_mount_serves_static_files(company_with_scenario, tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>studio</title>")
    app = create_app(company_with_scenario.m, ui_dir=str(tmp_path))
    with TestClient(app) as client:
        response = client.get("/ui/")
        assert response.status_code == 200
        assert "studio" in response.text
