"""HTTP service endpoints, exercised in process."""
from __future__ import annotations

import asyncio
import os

import httpx
import pytest

from railcal import __version__
from railcal.service.app import create_app

APP = create_app()


def call(method: str, url: str, **kwargs) -> httpx.Response:
    async def go():
        transport = httpx.ASGITransport(app=APP)
        async with httpx.AsyncClient(transport=transport, base_url="http://svc") as client:
            return await client.request(method, url, **kwargs)

    return asyncio.run(go())


def test_health():
    r = call("GET", "/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["version"] == __version__
    assert body["algorithms"] == ["ga", "sa", "nmsa", "mads", "spsa", "byo", "cors"]


def test_scenarios_listing():
    r = call("GET", "/scenarios")
    assert r.status_code == 200
    names = [row["name"] for row in r.json()]
    assert names == sorted(names)
    assert "reference" in names and len(names) == 5


def test_fixture_endpoint(tmp_path):
    r = call("POST", "/fixture", json={"out_dir": str(tmp_path / "case")})
    assert r.status_code == 200
    body = r.json()
    assert body["passengers"] == 27650
    assert os.path.isdir(body["directory"])


def test_generate_from_existing_inputs(fixture_dir, tmp_path):
    out = str(tmp_path / "ds")
    r = call("POST", "/generate", json={
        "out_dir": out,
        "input_dir": fixture_dir,
        "scenario": "crowding_insensitive",
        "seed": 3,
    })
    assert r.status_code == 200
    manifest = r.json()["manifest"]
    assert manifest["scenario"] == "crowding_insensitive"
    assert manifest["seed"] == 3
    assert os.path.isfile(os.path.join(out, "manifest.json"))


def test_generate_builds_fixture_when_no_inputs(tmp_path):
    out = str(tmp_path / "ds_self")
    r = call("POST", "/generate", json={"out_dir": out})
    assert r.status_code == 200
    assert r.json()["manifest"]["counts"]["demand"] == 27650


def test_generate_rejects_unknown_scenario(fixture_dir, tmp_path):
    r = call("POST", "/generate", json={
        "out_dir": str(tmp_path / "x"),
        "input_dir": fixture_dir,
        "scenario": "rush_hour",
    })
    assert r.status_code == 400
    assert "unknown scenario" in r.json()["detail"]


def test_calibrate_and_report(dataset_dir, tmp_path):
    out = str(tmp_path / "exp")
    r = call("POST", "/calibrate", json={
        "dataset_dir": dataset_dir,
        "algorithm": "nmsa",
        "budget": 6,
        "replications": 1,
        "out_dir": out,
    })
    assert r.status_code == 200
    body = r.json()
    assert [s["algorithm"] for s in body["summary"]] == ["nmsa"]
    assert body["summary"][0]["replications"] == 1
    assert body["theta_true"][4] == 232.0
    assert os.path.isfile(os.path.join(out, "traces.csv"))

    rep = call("POST", "/report", json={"experiment_dir": out})
    assert rep.status_code == 200
    rep_body = rep.json()
    assert rep_body["digests_ok"] is True
    assert rep_body["summary"] == body["summary"]


def test_calibrate_without_out_dir_keeps_nothing(dataset_dir):
    r = call("POST", "/calibrate", json={
        "dataset_dir": dataset_dir,
        "algorithm": "nmsa",
        "budget": 4,
        "replications": 1,
    })
    assert r.status_code == 200
    body = r.json()
    assert body["out_dir"] is None
    assert body["manifest"]["digests"] == {}


def test_compare_runs_selected_algorithms(dataset_dir, tmp_path):
    r = call("POST", "/compare", json={
        "dataset_dir": dataset_dir,
        "algorithms": ["nmsa", "ga"],
        "budget": 5,
        "replications": 1,
        "out_dir": str(tmp_path / "cmp"),
    })
    assert r.status_code == 200
    assert [s["algorithm"] for s in r.json()["summary"]] == ["nmsa", "ga"]


def test_calibrate_missing_dataset(tmp_path):
    r = call("POST", "/calibrate", json={
        "dataset_dir": str(tmp_path / "nowhere"),
        "algorithm": "nmsa",
        "budget": 3,
        "replications": 1,
    })
    assert r.status_code == 400
    assert "railcal generate" in r.json()["detail"]


def test_report_missing_experiment(tmp_path):
    r = call("POST", "/report", json={"experiment_dir": str(tmp_path)})
    assert r.status_code == 400


@pytest.mark.parametrize("body", [
    {},
    {"dataset_dir": "x", "budget": 0},
    {"dataset_dir": "x", "replications": -1},
])
def test_malformed_bodies_are_422(body):
    r = call("POST", "/calibrate", json=body)
    assert r.status_code == 422
