"""HTTP/JSON annotation service over file-backed projects.

Serves graphs, suggestion sets, alignments and stats; records pragmatic
and link labels into per-project JSONL logs.  Reads are lock-free
snapshots; writes take a per-project lock and are flushed+fsynced before
the response, so a read after a 201 always sees the superseding record.
Pure computations return byte-identical payloads to the CLI because both
call the same functions in itgkit.project.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Literal

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .analysis import MissingLayerError
from .graph import NodeKind
from .pragmatics import PragmaticLabel, iter_jsonl
from .project import (
    Project,
    ProjectError,
    alignment_bytes,
    canonical_json_bytes,
    list_projects,
    stats_bytes,
    suggestion_bytes,
)
from .suggest import Bm25Index


class PragmaticLabelIn(BaseModel):
    kind: Literal["pragmatic"]
    node: str
    label: str
    annotator: str
    supersedes_ts: float | None = None


class LinkLabelIn(BaseModel):
    kind: Literal["link"]
    review: str
    paper: str
    verdict: Literal["linked", "not-linked"]
    annotator: str
    source: Literal["suggested", "manual"] = "suggested"
    supersedes_ts: float | None = None


LabelIn = PragmaticLabelIn | LinkLabelIn


class _State:
    """Per-process caches and per-project write locks."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        # cache key -> (mtime signature, value)
        self._cache: dict[tuple, tuple[tuple, object]] = {}

    def lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(project_id, threading.Lock())

    def cached(self, key: tuple, signature: tuple, compute):
        hit = self._cache.get(key)
        if hit is not None and hit[0] == signature:
            return hit[1]
        value = compute()
        self._cache[key] = (signature, value)
        return value


def create_app(data_dir: str | Path, token: str | None = None,
               cors_origin: str = "*") -> FastAPI:
    data_dir = Path(data_dir)
    state = _State(data_dir)
    app = FastAPI(title="itgkit annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def authed(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="invalid or missing token")

    def get_project(project_id: str) -> Project:
        try:
            return Project.load(data_dir / project_id)
        except ProjectError:
            raise HTTPException(status_code=404, detail=f"unknown project: {project_id}")

    def json_response(payload: bytes, status_code: int = 200) -> Response:
        return Response(content=payload, media_type="application/json",
                        status_code=status_code)

    @app.get("/projects")
    def projects(_: None = Depends(authed)) -> Response:
        return json_response(canonical_json_bytes({"projects": list_projects(data_dir)}))

    @app.get("/projects/{project_id}")
    def project_info(project_id: str, _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        return json_response(canonical_json_bytes({
            "id": project.id,
            "paper": project.paper,
            "versions": sorted(project.versions),
            "reviews": sorted(project.reviews),
            "annotators": project.annotators,
            "suggestion": {"methods": project.suggestion.get("methods", ["bm25"]),
                           "m": project.suggestion.get("m", 5)},
        }))

    @app.get("/projects/{project_id}/documents/{doc}")
    def document(project_id: str, doc: str, version: int | None = None,
                 _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        try:
            return json_response(project.document_graph_bytes(doc, version))
        except (ProjectError, KeyError):
            raise HTTPException(status_code=404, detail=f"unknown document: {doc}")

    def joint_and_index(project: Project):
        signature = project.mtime_signature()

        def compute():
            joint = project.joint_graph(with_explicit=False, with_implicit=False)
            return joint, Bm25Index(joint, project.paper)

        return state.cached(("joint", project.id), signature, compute)

    @app.get("/projects/{project_id}/suggestions")
    def suggestions(project_id: str, sentence: str,
                    _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        joint, index = joint_and_index(project)
        if not joint.has_node(sentence):
            raise HTTPException(status_code=400, detail=f"unknown node: {sentence}")
        node = joint.node(sentence)
        if node.doc not in project.reviews or node.kind is not NodeKind.SENTENCE:
            raise HTTPException(status_code=400,
                                detail=f"{sentence} is not a review sentence")
        payload = state.cached(
            ("suggestion", project.id, sentence), project.mtime_signature(),
            lambda: suggestion_bytes(project, sentence, joint=joint, index=index))
        return json_response(payload)

    @app.get("/projects/{project_id}/labels")
    def labels(project_id: str, _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        out = {"pragmatics": list(iter_jsonl(project.pragmatics_path)),
               "links": list(iter_jsonl(project.links_path))}
        return json_response(canonical_json_bytes(out))

    @app.post("/projects/{project_id}/labels", status_code=201)
    def post_label(project_id: str, body: LabelIn,
                   _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        joint, _index = joint_and_index(project)
        if isinstance(body, PragmaticLabelIn):
            try:
                PragmaticLabel.parse(body.label)
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            if not joint.has_node(body.node):
                raise HTTPException(status_code=400, detail=f"unknown node: {body.node}")
            if joint.node(body.node).kind is not NodeKind.SENTENCE:
                raise HTTPException(status_code=400,
                                    detail="pragmatic labels attach to sentence nodes")
            path = project.pragmatics_path
            key = {"node": body.node, "annotator": body.annotator}
            record = {"node": body.node, "label": body.label,
                      "annotator": body.annotator, "ts": time.time()}
        else:
            for nid in (body.review, body.paper):
                if not joint.has_node(nid):
                    raise HTTPException(status_code=400, detail=f"unknown node: {nid}")
            if joint.node(body.review).doc not in project.reviews:
                raise HTTPException(status_code=400,
                                    detail=f"{body.review} is not a review node")
            if joint.node(body.paper).doc != project.paper:
                raise HTTPException(status_code=400,
                                    detail=f"{body.paper} is not a paper node")
            path = project.links_path
            key = {"review": body.review, "paper": body.paper,
                   "annotator": body.annotator}
            record = {"review": body.review, "paper": body.paper,
                      "verdict": body.verdict, "annotator": body.annotator,
                      "ts": time.time(), "source": body.source}

        with state.lock(project.id):
            live_ts = None
            for obj in iter_jsonl(path):
                if all(obj.get(k) == v for k, v in key.items()):
                    live_ts = obj.get("ts")
            if body.supersedes_ts is not None and body.supersedes_ts != live_ts:
                raise HTTPException(
                    status_code=409,
                    detail="stale supersession token; reload the current record")
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        return json_response(canonical_json_bytes(record), status_code=201)

    @app.get("/projects/{project_id}/links/explicit")
    def explicit_links(project_id: str, _: None = Depends(authed)) -> Response:
        project = get_project(project_id)

        def compute() -> bytes:
            from .anchors import extract_explicit_links

            joint = project.joint_graph(with_explicit=False, with_implicit=False)
            out = []
            for doc in project.reviews:
                links, _edges = extract_explicit_links(joint, doc, project.paper)
                for link in links:
                    a = link.anchor
                    row = {"sentence": a.sentence, "start": a.start, "end": a.end,
                           "type": a.type.value, "surface": a.surface,
                           "normalized": a.normalized}
                    if link.resolved:
                        row["target"] = link.target
                    else:
                        row["target"] = None
                        row["reason"] = link.target.reason
                    out.append(row)
            return canonical_json_bytes({"links": out})

        payload = state.cached(("explicit", project.id),
                               project.mtime_signature(), compute)
        return json_response(payload)

    @app.get("/projects/{project_id}/alignment")
    def alignment(project_id: str,
                  frm: str = Query(alias="from", default="v1"),
                  to: str = Query(default="v2"),
                  metric: str = "levenshtein-ratio",
                  threshold: float = 0.3,
                  _: None = Depends(authed)) -> Response:
        project = get_project(project_id)

        def parse_version(value: str) -> int:
            try:
                return int(value.lstrip("v"))
            except ValueError:
                raise HTTPException(status_code=404, detail=f"unknown version: {value}")

        old_v, new_v = parse_version(frm), parse_version(to)
        for v in (old_v, new_v):
            if v not in project.versions:
                raise HTTPException(status_code=404, detail=f"missing version: v{v}")
        payload = state.cached(
            ("alignment", project.id, old_v, new_v, metric, threshold),
            project.mtime_signature(),
            lambda: alignment_bytes(project, old_v, new_v, metric, threshold))
        return json_response(payload)

    @app.get("/projects/{project_id}/stats")
    def stats(project_id: str, metric: str = "levenshtein-ratio",
              threshold: float = 0.3, _: None = Depends(authed)) -> Response:
        project = get_project(project_id)
        try:
            payload = state.cached(
                ("stats", project.id, metric, threshold), project.mtime_signature(),
                lambda: stats_bytes(project, metric, threshold))
        except MissingLayerError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return json_response(payload)

    return app
