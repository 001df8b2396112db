import json
import os
import pathlib
import socket
import subprocess
import time

import jsonschema
import pytest
import requests
from referencing import Registry, Resource

import elicit

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "schemas"
E2E = ROOT / "tests" / "fixtures" / "e2e"


def _registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resource = Resource.from_contents(doc)
        resources.append((doc["$id"], resource))
        resources.append((path.name, resource))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def validate(doc, schema_file, pointer=None):
    schema = json.loads((SCHEMAS / schema_file).read_text())
    if pointer:
        schema = {"$ref": f"{schema['$id']}#{pointer}"}
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(doc)


def test_fit_output_matches_schema():
    j = {"minimum": 0.1, "q25": 0.3, "median": 0.4, "q75": 0.5, "maximum": 0.8,
         "support": {"lower": 0, "upper": 1}}
    validate(j, "judgment.schema.json")
    validate(elicit.fit(j), "fit.schema.json")


def test_dataset_views_match_schema():
    full = elicit.dataset(E2E / "seeds.csv", facilitator=True)
    expert = elicit.dataset(E2E / "seeds.csv")
    validate(full, "seed_dataset.schema.json")
    validate(expert, "seed_dataset.schema.json", "/$defs/expert_view")
    with pytest.raises(jsonschema.ValidationError):
        validate(full, "seed_dataset.schema.json", "/$defs/expert_view")


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


@pytest.fixture
def server(tmp_path):
    cli = os.environ.get("ELICIT_CLI")
    if not cli:
        pytest.skip("ELICIT_CLI not set")
    port = _free_port()
    env = dict(os.environ, FACILITATOR_TOKEN="tok")
    proc = subprocess.Popen([cli, "serve", "--port", str(port), "--data-dir", str(tmp_path)], env=env,
                            stderr=subprocess.DEVNULL)
    base = f"http://127.0.0.1:{port}"
    for _ in range(100):
        try:
            requests.get(base + "/health", timeout=0.2)
            break
        except requests.ConnectionError:
            time.sleep(0.05)
    yield base
    proc.terminate()
    proc.wait(timeout=10)


def test_stored_sessions_match_schema(server):
    fac = {"X-Facilitator-Token": "tok"}
    body = {
        "session_id": "w1",
        "quantities": [{"quantity_id": "eta", "support": {"lower": 0, "upper": 1}, "trial_parameter": "eta"},
                       {"quantity_id": "n", "support": {"lower": 0, "upper": None}, "scale": "log"}],
        "experts": [{"expert_id": "e1", "self_assessment": {"ratings": {"MND": 4}}}, {"expert_id": "e2"}],
    }
    r = requests.post(server + "/sessions", json=body, headers=fac)
    assert r.status_code == 201
    validate(r.json(), "session.schema.json")
    for stage in ("training", "background", "individual"):
        assert requests.put(server + "/sessions/w1/stage", json={"stage": stage}, headers=fac).status_code == 200
    five = {"minimum": 0.1, "q25": 0.3, "median": 0.4, "q75": 0.5, "maximum": 0.8}
    r = requests.put(server + "/sessions/w1/judgments/e1/eta", json=five)
    validate(r.json(), "fit.schema.json")
    requests.put(server + "/sessions/w1/judgments/e2/n",
                 json={"minimum": 5, "q25": 20, "median": 30, "q75": 45, "maximum": 120, "family": "gamma"})
    for stage in ("review_checks", "group_discussion"):
        requests.put(server + "/sessions/w1/stage", json={"stage": stage}, headers=fac)
    assert requests.put(server + "/sessions/w1/consensus/eta", json=five, headers=fac).status_code == 200
    requests.post(server + "/sessions/w1/notes", json={"author": "f", "text": "agreed"})
    r = requests.get(server + "/sessions/w1")
    session = r.json()
    validate(session, "session.schema.json")
    assert session["stage"] == "consensus"
    assert r.headers["X-Session-Version"] == str(session["version"])
