"""HTTP API: endpoint contracts, error codes, snapshot byte-identity,
space-cache sharing, and commit serialization under concurrency."""

import json
import threading

import pytest
from fastapi.testclient import TestClient

from planspace import fixtures
from planspace.reasoning import NavSession, build_plan_space
from planspace.service import SessionStore, create_app
from planspace.wire import dumps_stable, snapshot_to_dict


@pytest.fixture()
def client():
    return TestClient(create_app(SessionStore()))


@pytest.fixture()
def talk_space(client, talk):
    r = client.post("/tasks", json=talk.to_dict())
    assert r.status_code == 200
    task_id = r.json()["task_id"]
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 4})
    assert r.status_code == 200
    return task_id, r.json()["space_id"]


def test_task_and_space_lifecycle(client, talk_space):
    _, space_id = talk_space
    r = client.get(f"/spaces/{space_id}")
    assert r.status_code == 200
    body = r.json()
    assert body["count"] == "2"
    assert body["brave"] == ["get-ready", "give-talk", "go-to-AAAI", "wake-up"]
    assert body["cautious"] == ["give-talk", "go-to-AAAI", "wake-up"]
    assert {(f["operator"], f["sign"]) for f in body["facets"]} == {
        ("get-ready", "include"),
        ("get-ready", "exclude"),
    }


def test_space_build_is_cached(client, talk_space):
    task_id, space_id = talk_space
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 4})
    assert r.json()["space_id"] == space_id


def test_malformed_task_is_422(client, talk):
    broken = talk.to_dict()
    del broken["init"]["awake"]
    r = client.post("/tasks", json=broken)
    assert r.status_code == 422
    assert "init" in r.json()["detail"]


def test_unknown_ids_are_404(client):
    assert client.get("/spaces/nope").status_code == 404
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/tasks/nope/spaces", json={"length": 2}).status_code == 404


def test_excessive_bound_is_422(client, talk_space):
    task_id, _ = talk_space
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 10_000})
    assert r.status_code == 422


def test_budget_exhaustion_is_503(talk):
    store = SessionStore(node_budget=5)
    client = TestClient(create_app(store))
    task_id = client.post("/tasks", json=talk.to_dict()).json()["task_id"]
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 4})
    assert r.status_code == 503


def test_probability_endpoint(client, talk_space):
    _, space_id = talk_space
    r = client.post(f"/spaces/{space_id}/prob", json={"query": "op:get-ready"})
    assert r.status_code == 200
    assert r.json() == {"num": "1", "den": "2"}
    r = client.post(f"/spaces/{space_id}/prob", json={"query": "op:warp"})
    assert r.status_code == 422


def test_sample_endpoint(client, talk_space, talk):
    _, space_id = talk_space
    r = client.post(f"/spaces/{space_id}/sample", json={"n": 4, "seed": 11})
    assert r.status_code == 200
    for plan in r.json()["plans"]:
        assert set(plan) <= set(talk.operator_index)


def test_sample_empty_space_is_409(client, talk_space, talk):
    task_id, _ = talk_space
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 2})
    empty_space = r.json()["space_id"]
    r = client.post(f"/spaces/{empty_space}/sample", json={"n": 1, "seed": 0})
    assert r.status_code == 409


def test_session_navigation_flow(client, talk_space):
    _, space_id = talk_space
    r = client.post(f"/spaces/{space_id}/sessions")
    assert r.status_code == 200
    session_id = r.json()["session_id"]
    assert len(session_id) == 32  # 128-bit hex token
    start = r.json()["snapshot"]
    assert start["count"] == "2"
    assert start["facet_count"] == 2

    r = client.post(
        f"/sessions/{session_id}/commit",
        json={"commitment": {"kind": "enforce", "operator": "get-ready"}},
    )
    assert r.status_code == 200
    assert r.json()["count"] == "1"
    assert r.json()["facets"] == []

    r = client.post(
        f"/sessions/{session_id}/commit",
        json={"commitment": {"kind": "enforce", "operator": "sleep"}},
    )
    assert r.status_code == 409
    assert "eliminate" in r.json()["detail"]
    assert r.json()["commitment"] == {"kind": "enforce", "operator": "sleep"}

    r = client.post(f"/sessions/{session_id}/undo")
    assert r.status_code == 200
    assert r.json() == start

    r = client.get(f"/sessions/{session_id}")
    assert r.json() == start


def test_malformed_commitment_is_409_or_422(client, talk_space):
    _, space_id = talk_space
    session_id = client.post(f"/spaces/{space_id}/sessions").json()["session_id"]
    r = client.post(
        f"/sessions/{session_id}/commit",
        json={"commitment": {"kind": "summon", "operator": "wake-up"}},
    )
    assert r.status_code == 409
    r = client.post(f"/sessions/{session_id}/commit", json={"bogus": 1})
    assert r.status_code == 422


def test_snapshot_bytes_match_reasoning_layer(client, talk_space, talk):
    _, space_id = talk_space
    r = client.post(f"/spaces/{space_id}/sessions")
    session_id = r.json()["session_id"]
    http_snapshot = client.get(f"/sessions/{session_id}").content

    space = build_plan_space(talk, 4)
    session = NavSession(space)
    expected = dumps_stable(snapshot_to_dict(talk, session.snapshot())).encode()
    assert http_snapshot == expected


def test_counts_travel_as_strings(client, talk):
    task = fixtures.ball_transport_task(7)
    task_id = client.post("/tasks", json=task.to_dict()).json()["task_id"]
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 7})
    assert r.json()["count"] == "5040"
    assert isinstance(r.json()["count"], str)


def test_concurrent_commits_serialize(client):
    task = fixtures.binary_choice_task(3)
    task_id = client.post("/tasks", json=task.to_dict()).json()["task_id"]
    space_id = client.post(f"/tasks/{task_id}/spaces", json={"length": 3}).json()["space_id"]
    session_id = client.post(f"/spaces/{space_id}/sessions").json()["session_id"]

    commitments = [
        {"kind": "enforce", "operator": "achieve-0-a"},
        {"kind": "forbid", "operator": "achieve-1-a"},
        {"kind": "enforce", "operator": "achieve-2-b"},
    ]
    outcomes = []

    def worker(c):
        r = client.post(f"/sessions/{session_id}/commit", json={"commitment": c})
        outcomes.append(r.status_code)

    threads = [threading.Thread(target=worker, args=(c,)) for c in commitments]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    final = client.get(f"/sessions/{session_id}").json()
    accepted = [code for code in outcomes if code == 200]
    assert len(final["commitments"]) == len(accepted)
    # The final count must equal a sequential application of the accepted
    # commitments (all three are individually compatible here).
    space = build_plan_space(task, 3)
    view = space
    from planspace.wire import commitment_from_dict

    for c in final["commitments"]:
        view = view.enforce(commitment_from_dict(task, c))
    assert final["count"] == str(view.count())


def test_nnf_disk_cache_restores_space(tmp_path, talk):
    store = SessionStore(nnf_dir=str(tmp_path))
    client = TestClient(create_app(store))
    task_id = client.post("/tasks", json=talk.to_dict()).json()["task_id"]
    r = client.post(f"/tasks/{task_id}/spaces", json={"length": 4})
    assert r.json()["count"] == "2"
    files = list(tmp_path.glob("*.nnf"))
    assert len(files) == 1

    # A fresh store (fresh process, conceptually) reads the snapshot back.
    store2 = SessionStore(nnf_dir=str(tmp_path))
    client2 = TestClient(create_app(store2))
    task_id2 = client2.post("/tasks", json=talk.to_dict()).json()["task_id"]
    r = client2.post(f"/tasks/{task_id2}/spaces", json={"length": 4})
    assert r.json()["count"] == "2"


def test_session_pruning(client, talk_space):
    _, space_id = talk_space
    app_store = client.app.state.store
    session_id = client.post(f"/spaces/{space_id}/sessions").json()["session_id"]
    assert app_store.prune_idle_sessions(max_idle_seconds=3600) == 0
    assert client.get(f"/sessions/{session_id}").status_code == 200
    assert app_store.prune_idle_sessions(max_idle_seconds=-1) >= 1
    assert client.get(f"/sessions/{session_id}").status_code == 404
