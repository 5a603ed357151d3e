from __future__ import annotations

import base64

import pytest
from fastapi.testclient import TestClient

from choralegen.app.service import create_app
from choralegen.document import chorale_from_document, document_bytes, document_from_chorale
from choralegen.ingest.musicxml import export_musicxml, parse_musicxml
from choralegen.models.training import TrainConfig, train
from choralegen.score import strip_spelling

from helpers import tiny_corpus

FAST = dict(delta_t=2, epochs=2, learning_rate=0.3, batch_size=16, hidden_size=16, seed=21)


@pytest.fixture(scope="module")
def client():
    model_set, _ = train(tiny_corpus(), TrainConfig(kind="maxent", **FAST))
    app = create_app(model_set, iteration_cap=5000)
    with TestClient(app) as test_client:
        yield test_client


def create_session(client, length=16, seed=11) -> tuple[str, dict]:
    response = client.post("/v1/sessions", json={"length": length, "seed": seed})
    assert response.status_code == 200, response.text
    body = response.json()
    return body["session_id"], body["score"]


class TestSessions:
    def test_create_from_length(self, client) -> None:
        _, score = create_session(client)
        chorale = chorale_from_document(score)
        assert chorale.length == 16

    def test_create_deterministic_given_seed(self, client) -> None:
        _, score_a = create_session(client, seed=33)
        _, score_b = create_session(client, seed=33)
        assert document_bytes(score_a) == document_bytes(score_b)

    def test_create_from_musicxml_and_export_round_trip(self, client) -> None:
        uploaded = tiny_corpus().chorales[0]
        payload = base64.b64encode(export_musicxml(uploaded)).decode()
        response = client.post("/v1/sessions", json={"musicxml_base64": payload})
        assert response.status_code == 200, response.text
        body = response.json()
        # The MIDI-mode model strips spellings on the way in.
        assert chorale_from_document(body["score"]) == uploaded

        export = client.get(f"/v1/sessions/{body['session_id']}/export?format=musicxml")
        assert export.status_code == 200
        assert strip_spelling(parse_musicxml(export.content)) == uploaded

    def test_create_needs_exactly_one_source(self, client) -> None:
        assert client.post("/v1/sessions", json={}).status_code == 422
        assert (
            client.post("/v1/sessions", json={"length": 8, "musicxml_base64": "AA=="}).status_code
            == 422
        )

    def test_unknown_session_404(self, client) -> None:
        assert client.get("/v1/sessions/nope/score").status_code == 404

    def test_midi_export(self, client) -> None:
        session_id, _ = create_session(client)
        response = client.get(f"/v1/sessions/{session_id}/export?format=midi")
        assert response.status_code == 200
        assert response.content[:4] == b"MThd"

    def test_model_info(self, client) -> None:
        info = client.get("/v1/model").json()
        assert info["kind"] == "maxent"
        assert info["encoding"] == "midi"
        assert info["delta_t"] == 2
        assert len(info["vocabularies"]) == 4
        assert info["vocabularies"][0][0] == "__"
        assert all(low <= high for low, high in info["ranges"])


class TestGenerate:
    def test_only_region_changes(self, client) -> None:
        session_id, before = create_session(client, seed=1)
        request = {
            "region": {"voices": [2, 3, 4], "start": 4, "end": 8},
            "iterations": 200,
            "seed": 5,
        }
        response = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert response.status_code == 200, response.text
        after = response.json()["score"]
        assert response.json()["seed"] == 5
        for voice in range(4):
            for tick0 in range(16):
                inside = voice + 1 in (2, 3, 4) and 4 <= tick0 < 8
                if not inside:
                    assert after["voices"][voice][tick0] == before["voices"][voice][tick0], (
                        voice,
                        tick0,
                    )

    def test_all_pinned_singleton_region(self, client) -> None:
        session_id, _ = create_session(client, seed=2)
        info = client.get("/v1/model").json()
        label = info["vocabularies"][0][3]  # first soprano pitch label
        request = {
            "region": {"cells": [[1, 4], [1, 5]]},
            "pins": [
                {"voice": 1, "tick": 4, "allowed": [label]},
                {"voice": 1, "tick": 5, "allowed": ["__"]},
            ],
            "iterations": 100,
            "seed": 9,
        }
        response = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert response.status_code == 200, response.text
        after = response.json()["score"]
        assert after["voices"][0][4]["label"] == label
        assert after["voices"][0][5]["kind"] == "hold"

    def test_server_assigns_seed_when_absent(self, client) -> None:
        session_id, _ = create_session(client, seed=3)
        request = {"region": {"voices": [2], "start": 0, "end": 4}, "iterations": 50}
        response = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert response.status_code == 200
        assert isinstance(response.json()["seed"], int)

    def test_replay_after_undo_is_byte_identical(self, client) -> None:
        session_id, _ = create_session(client, seed=4)
        request = {
            "region": {"voices": [3, 4], "start": 0, "end": 16},
            "iterations": 300,
            "seed": 77,
        }
        first = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert first.status_code == 200
        undo = client.post(f"/v1/sessions/{session_id}/undo")
        assert undo.status_code == 200
        again = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert again.status_code == 200
        assert document_bytes(first.json()["score"]) == document_bytes(again.json()["score"])

    def test_undo_restores_previous_score(self, client) -> None:
        session_id, before = create_session(client, seed=6)
        request = {"region": {"voices": [2], "start": 0, "end": 8}, "iterations": 100, "seed": 1}
        client.post(f"/v1/sessions/{session_id}/generate", json=request)
        undone = client.post(f"/v1/sessions/{session_id}/undo")
        assert undone.status_code == 200
        assert document_bytes(undone.json()["score"]) == document_bytes(before)
        assert undone.json()["undo_depth"] == 0

    def test_undo_empty_log(self, client) -> None:
        session_id, _ = create_session(client, seed=7)
        assert client.post(f"/v1/sessions/{session_id}/undo").status_code == 400

    def test_metadata_overrides_apply_and_persist(self, client) -> None:
        session_id, _ = create_session(client, seed=8)
        request = {
            "region": {"voices": [2], "start": 0, "end": 4},
            "metadata": {
                "fermata": [{"tick": 3, "value": True}],
                "key_signature": [{"bar": 0, "value": 2}],
            },
            "iterations": 50,
            "seed": 2,
        }
        response = client.post(f"/v1/sessions/{session_id}/generate", json=request)
        assert response.status_code == 200, response.text
        score = response.json()["score"]
        assert score["fermata"][3] is True
        assert set(score["key_signature"]) == {2}
        assert score["subdivision"][:4] == [1, 2, 3, 4]
        current = client.get(f"/v1/sessions/{session_id}/score").json()["score"]
        assert current["key_signature"][0] == 2

    def test_violations_and_atomicity(self, client) -> None:
        session_id, before = create_session(client, seed=9)
        bad_requests = [
            {"region": {"cells": []}, "seed": 1},
            {"region": {"voices": [1], "start": 12, "end": 4}, "seed": 1},
            {"region": {"cells": [[1, 99]]}, "seed": 1},
            {
                "region": {"cells": [[1, 2]]},
                "pins": [{"voice": 2, "tick": 2, "allowed": ["__"]}],
                "seed": 1,
            },
            {"region": {"cells": [[1, 2]]}, "pins": [{"voice": 1, "tick": 2, "allowed": ["nope"]}], "seed": 1},
            {"region": {"voices": [1], "start": 0, "end": 4}, "iterations": 100_000, "seed": 1},
        ]
        for request in bad_requests:
            response = client.post(f"/v1/sessions/{session_id}/generate", json=request)
            assert response.status_code == 422, request
            assert response.json()["violations"]
        unchanged = client.get(f"/v1/sessions/{session_id}/score").json()["score"]
        assert document_bytes(unchanged) == document_bytes(before)

    def test_busy_session_conflicts(self, client) -> None:
        session_id, _ = create_session(client, seed=10)
        session = client.app.state.sessions[session_id]
        assert session.lock.acquire(blocking=False)
        try:
            request = {"region": {"voices": [2], "start": 0, "end": 4}, "iterations": 10, "seed": 1}
            assert client.post(f"/v1/sessions/{session_id}/generate", json=request).status_code == 409
            assert client.post(f"/v1/sessions/{session_id}/undo").status_code == 409
        finally:
            session.lock.release()

    def test_replace_score_resets_log(self, client) -> None:
        session_id, _ = create_session(client, seed=12)
        replacement = document_from_chorale(tiny_corpus().chorales[1])
        response = client.post(f"/v1/sessions/{session_id}/score", json={"score": replacement})
        assert response.status_code == 200, response.text
        assert response.json()["undo_depth"] == 0
        current = client.get(f"/v1/sessions/{session_id}/score").json()["score"]
        assert document_bytes(current) == document_bytes(replacement)
