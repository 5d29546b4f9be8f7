import json
import shutil
import threading

import pytest
from fastapi.testclient import TestClient

from itgkit.service import create_app

TOKEN = "secret-token"


@pytest.fixture()
def data_dir(demo_project_dir, tmp_path):
    root = tmp_path / "data"
    root.mkdir()
    shutil.copytree(demo_project_dir, root / "demo")
    return root


@pytest.fixture()
def client(data_dir):
    app = create_app(data_dir, token=TOKEN)
    with TestClient(app) as c:
        c.headers["Authorization"] = f"Bearer {TOKEN}"
        yield c


class TestAuth:
    def test_missing_token_rejected(self, data_dir):
        app = create_app(data_dir, token=TOKEN)
        with TestClient(app) as anon:
            assert anon.get("/projects").status_code == 401

    def test_wrong_token_rejected(self, data_dir):
        app = create_app(data_dir, token=TOKEN)
        with TestClient(app) as c:
            c.headers["Authorization"] = "Bearer wrong"
            assert c.get("/projects").status_code == 401

    def test_no_token_configured_open(self, data_dir):
        app = create_app(data_dir, token=None)
        with TestClient(app) as c:
            assert c.get("/projects").status_code == 200


class TestProjectsAndDocuments:
    def test_list_projects(self, client):
        assert client.get("/projects").json() == {"projects": ["demo"]}

    def test_document_graph(self, client):
        response = client.get("/projects/demo/documents/paper1")
        assert response.status_code == 200
        graph = response.json()
        assert {d["id"] for d in graph["documents"]} == {"paper1"}

    def test_review_document(self, client):
        assert client.get("/projects/demo/documents/rev1").status_code == 200

    def test_unknown_project_404(self, client):
        assert client.get("/projects/nope").status_code == 404
        assert client.get("/projects/nope/documents/paper1").status_code == 404

    def test_unknown_document_404(self, client):
        assert client.get("/projects/demo/documents/ghost").status_code == 404


class TestSuggestions:
    def test_valid_review_sentence(self, client):
        response = client.get("/projects/demo/suggestions",
                              params={"sentence": "rev1:p1.s1"})
        assert response.status_code == 200
        body = response.json()
        assert body["review_sentence"] == "rev1:p1.s1"
        assert 0 < len(body["candidates"]) <= 5

    def test_repeat_call_identical_bytes(self, client):
        first = client.get("/projects/demo/suggestions",
                           params={"sentence": "rev1:p1.s1"})
        second = client.get("/projects/demo/suggestions",
                            params={"sentence": "rev1:p1.s1"})
        assert first.content == second.content

    def test_paper_sentence_400(self, client):
        response = client.get("/projects/demo/suggestions",
                              params={"sentence": "paper1:p1.s1"})
        assert response.status_code == 400

    def test_unknown_node_400(self, client):
        assert client.get("/projects/demo/suggestions",
                          params={"sentence": "ghost"}).status_code == 400


class TestLabels:
    def test_pragmatic_post_and_readback(self, client, data_dir):
        body = {"kind": "pragmatic", "node": "rev1:p1.s1", "label": "Recap",
                "annotator": "a1"}
        before = (data_dir / "demo" / "pragmatics.jsonl").read_text().count("\n")
        response = client.post("/projects/demo/labels", json=body)
        assert response.status_code == 201
        after = (data_dir / "demo" / "pragmatics.jsonl").read_text().count("\n")
        assert after == before + 1
        stored = client.get("/projects/demo/labels").json()
        live = [r for r in stored["pragmatics"]
                if r["node"] == "rev1:p1.s1" and r["annotator"] == "a1"]
        assert live and live[-1]["label"] == "Recap"

    def test_relabel_latest_wins(self, client):
        for label in ("Recap", "Weakness"):
            response = client.post("/projects/demo/labels", json={
                "kind": "pragmatic", "node": "rev1:p1.s2", "label": label,
                "annotator": "a1"})
            assert response.status_code == 201
        stored = client.get("/projects/demo/labels").json()
        live = [r for r in stored["pragmatics"]
                if r["node"] == "rev1:p1.s2" and r["annotator"] == "a1"]
        assert live[-1]["label"] == "Weakness"

    def test_nonexistent_node_400(self, client):
        response = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "ghost", "label": "Todo", "annotator": "a1"})
        assert response.status_code == 400

    def test_non_sentence_400(self, client):
        response = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "rev1:report", "label": "Todo",
            "annotator": "a1"})
        assert response.status_code == 400

    def test_bad_label_400(self, client):
        response = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "rev1:p1.s1", "label": "Praise",
            "annotator": "a1"})
        assert response.status_code == 400

    def test_link_label_roundtrip(self, client):
        response = client.post("/projects/demo/labels", json={
            "kind": "link", "review": "rev1:p1.s1", "paper": "paper1:p1.s1",
            "verdict": "linked", "annotator": "a1", "source": "manual"})
        assert response.status_code == 201
        assert response.json()["source"] == "manual"

    def test_link_label_wrong_side_400(self, client):
        response = client.post("/projects/demo/labels", json={
            "kind": "link", "review": "paper1:p1.s1", "paper": "rev1:p1.s1",
            "verdict": "linked", "annotator": "a1"})
        assert response.status_code == 400

    def test_stale_supersession_409(self, client):
        first = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "rev1:p2.s1", "label": "Todo",
            "annotator": "a9"})
        ts = first.json()["ts"]
        ok = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "rev1:p2.s1", "label": "Recap",
            "annotator": "a9", "supersedes_ts": ts})
        assert ok.status_code == 201
        stale = client.post("/projects/demo/labels", json={
            "kind": "pragmatic", "node": "rev1:p2.s1", "label": "Other",
            "annotator": "a9", "supersedes_ts": ts})
        assert stale.status_code == 409

    def test_concurrent_writes_all_recorded(self, client, data_dir):
        def post(i):
            client.post("/projects/demo/labels", json={
                "kind": "pragmatic", "node": "rev1:p3.s1", "label": "Todo",
                "annotator": f"w{i}"})
        threads = [threading.Thread(target=post, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        text = (data_dir / "demo" / "pragmatics.jsonl").read_text()
        lines = [json.loads(l) for l in text.splitlines() if l.strip()]
        writers = {r["annotator"] for r in lines if r["node"] == "rev1:p3.s1"}
        assert writers >= {f"w{i}" for i in range(8)}


class TestExplicitLinksEndpoint:
    def test_resolved_and_unresolved_rows(self, client):
        response = client.get("/projects/demo/links/explicit")
        assert response.status_code == 200
        links = response.json()["links"]
        assert any(l["type"] == "fig" and l["target"] for l in links)
        assert any(l["target"] is None and l["reason"] == "no-such-coordinate"
                   for l in links)

    def test_cached_identical(self, client):
        a = client.get("/projects/demo/links/explicit")
        b = client.get("/projects/demo/links/explicit")
        assert a.content == b.content


class TestAlignmentEndpoint:
    def test_matches_cli_bytes(self, client, data_dir):
        from itgkit.project import Project, alignment_bytes

        response = client.get("/projects/demo/alignment",
                              params={"from": "v1", "to": "v2"})
        assert response.status_code == 200
        expected = alignment_bytes(Project.load(data_dir / "demo"), 1, 2)
        assert response.content == expected

    def test_missing_version_404(self, client):
        response = client.get("/projects/demo/alignment",
                              params={"from": "v1", "to": "v9"})
        assert response.status_code == 404


class TestStatsEndpoint:
    def test_matches_cli_bytes(self, client, data_dir):
        from itgkit.project import Project, stats_bytes

        response = client.get("/projects/demo/stats")
        assert response.status_code == 200
        assert response.content == stats_bytes(Project.load(data_dir / "demo"))

    def test_missing_layer_409(self, client, data_dir):
        (data_dir / "demo" / "pragmatics.jsonl").write_text("")
        response = client.get("/projects/demo/stats")
        assert response.status_code == 409
        assert "pragmatics" in response.json()["detail"]

    def test_cache_invalidated_after_label_write(self, client):
        first = client.get("/projects/demo/stats")
        assert first.status_code == 200
        added = client.post("/projects/demo/labels", json={
            "kind": "link", "review": "rev1:p4.s3", "paper": "paper1:p12.s1",
            "verdict": "linked", "annotator": "a1"})
        assert added.status_code == 201
        added = client.post("/projects/demo/labels", json={
            "kind": "link", "review": "rev1:p4.s3", "paper": "paper1:p12.s1",
            "verdict": "linked", "annotator": "a2"})
        assert added.status_code == 201
        second = client.get("/projects/demo/stats")
        assert second.content != first.content
