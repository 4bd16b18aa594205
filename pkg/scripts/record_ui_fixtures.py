#!/usr/bin/env python3
"""Record API responses for the frontend contract tests.

Drives the in-process service over the models/ directory through the scripted
configurator scenario (select v2.3.1, then try v1.2) plus the read-only
endpoints, and snapshots every response as {status, body} JSON under
frontend/tests/fixtures/. The frontend test suite replays these with a
stubbed fetch, so it needs no network and no running server.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from fmcheck.service import create_app, load_model_dir

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = ROOT / "frontend" / "tests" / "fixtures"


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    models, failures = load_model_dir(ROOT / "models")
    assert not failures, failures
    client = TestClient(create_app(models=models))
    recorded = {}

    def snap(name, response):
        recorded[name] = {"status": response.status_code, "body": response.json()}

    snap("health", client.get("/api/health"))
    snap("models", client.get("/api/models"))
    snap("tree_cad_partial", client.get("/api/models/CADPartial/tree"))
    snap("analysis_cad_partial", client.get("/api/models/CADPartial/analysis?count=true"))
    snap("analysis_dead_feature", client.get("/api/models/DeadFeature/analysis?count=true"))
    snap("analysis_void", client.get("/api/models/Void/analysis"))
    snap("analysis_wide_count", client.get("/api/models/Wide/analysis?count=true"))

    created = client.post("/api/sessions", json={"model": "CADPartial"})
    snap("session_created", created)
    session_id = created.json()["session_id"]

    def decide(feature, decision):
        return client.post(f"/api/sessions/{session_id}/decide",
                           json={"feature": feature, "decision": decision})

    snap("decide_select_v2.3.1", decide("v2.3.1", "select"))
    snap("decide_select_v1.2_conflict", decide("v1.2", "select"))
    snap("decide_undecide_v2.3.1", decide("v2.3.1", "undecide"))

    for name, payload in recorded.items():
        path = FIXTURE_DIR / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
