"""Project layout and the computations shared by the CLI and the service.

A project is a directory of plain files, fully re-runnable and diffable:

    project.json          manifest (documents, annotators, suggestion config)
    graphs/*.json         one graph per document (papers by version, reviews)
    pragmatics.jsonl      pragmatic label log (append-only, supersession)
    links.jsonl           link label log (append-only, supersession)

The CLI and the HTTP service both call the byte-producing functions in
this module, so their outputs are identical on the same files.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .align import AlignmentProblem, AlignmentResult, align_versions, diff_report
from .analysis import JointBundle, MissingLayerError, add_implicit_edges, load_section_map, stats_report
from .anchors import extract_explicit_links
from .graph import IntertextualGraph, deserialize, merge
from .pragmatics import LabelStore, iter_jsonl
from .suggest import Bm25Index, EmbeddingTable, SuggestConfig, suggest


def canonical_json_bytes(obj) -> bytes:
    return (json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode("utf-8")


def atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


@dataclass
class LinkLabelRecord:
    review: str
    paper: str
    verdict: str            # linked | not-linked
    annotator: str
    ts: float
    source: str = "suggested"   # suggested | manual

    def to_obj(self) -> dict:
        return {"review": self.review, "paper": self.paper, "verdict": self.verdict,
                "annotator": self.annotator, "ts": self.ts, "source": self.source}


class LinkLabelStore:
    """Pair-verdict log; one live record per (review, paper, annotator)."""

    VERDICTS = ("linked", "not-linked")

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path else None
        self._records: dict[tuple[str, str, str], LinkLabelRecord] = {}

    def attach(self, review: str, paper: str, verdict: str, annotator: str,
               ts: float | None = None, source: str = "suggested") -> LinkLabelRecord:
        if verdict not in self.VERDICTS:
            raise ValueError(f"verdict must be one of {self.VERDICTS}")
        record = LinkLabelRecord(review=review, paper=paper, verdict=verdict,
                                 annotator=annotator,
                                 ts=time.time() if ts is None else ts, source=source)
        self._records[(review, paper, annotator)] = record
        if self._path is not None:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_obj(), ensure_ascii=False) + "\n")
        return record

    def records(self) -> list[LinkLabelRecord]:
        return list(self._records.values())

    def get(self, review: str, paper: str, annotator: str) -> LinkLabelRecord | None:
        return self._records.get((review, paper, annotator))

    def __len__(self) -> int:
        return len(self._records)

    def agreed_pairs(self, min_annotators: int = 2) -> set[tuple[str, str]]:
        """Pairs whose live 'linked' verdicts come from enough annotators."""
        votes: dict[tuple[str, str], set[str]] = {}
        for record in self._records.values():
            if record.verdict == "linked":
                votes.setdefault((record.review, record.paper), set()).add(record.annotator)
        return {pair for pair, who in votes.items() if len(who) >= min_annotators}

    @classmethod
    def load(cls, path: str | Path, append_to: bool = True) -> "LinkLabelStore":
        store = cls(path=path if append_to else None)
        for obj in iter_jsonl(path):
            record = LinkLabelRecord(
                review=obj["review"], paper=obj["paper"], verdict=obj["verdict"],
                annotator=obj["annotator"], ts=float(obj.get("ts", 0.0)),
                source=obj.get("source", "suggested"))
            store._records[(record.review, record.paper, record.annotator)] = record
        return store


class ProjectError(Exception):
    pass


@dataclass
class Project:
    path: Path
    id: str
    paper: str
    versions: dict[int, Path]          # version -> graph file
    reviews: dict[str, Path]           # review doc id -> graph file
    annotators: list[str] = field(default_factory=list)
    suggestion: dict = field(default_factory=dict)

    @property
    def pragmatics_path(self) -> Path:
        return self.path / "pragmatics.jsonl"

    @property
    def links_path(self) -> Path:
        return self.path / "links.jsonl"

    # ------------------------------------------------------------------

    def graph_files(self) -> list[Path]:
        return list(self.versions.values()) + list(self.reviews.values())

    def mtime_signature(self) -> tuple:
        """Changes whenever any underlying file changes; used for caching."""
        files = self.graph_files() + [self.pragmatics_path, self.links_path,
                                      self.path / "project.json"]
        return tuple((str(p), p.stat().st_mtime_ns if p.exists() else -1)
                     for p in sorted(files))

    def paper_graph(self, version: int = 1) -> IntertextualGraph:
        if version not in self.versions:
            raise ProjectError(f"unknown version: {version}")
        return deserialize(self.versions[version].read_bytes())

    def review_graph(self, doc: str) -> IntertextualGraph:
        if doc not in self.reviews:
            raise ProjectError(f"unknown review document: {doc}")
        return deserialize(self.reviews[doc].read_bytes())

    def document_graph_bytes(self, doc: str, version: int | None = None) -> bytes:
        if doc == self.paper:
            return self.versions[version or min(self.versions)].read_bytes()
        if doc in self.reviews:
            return self.reviews[doc].read_bytes()
        raise ProjectError(f"unknown document: {doc}")

    def joint_graph(self, *, with_explicit: bool = True,
                    with_implicit: bool = True) -> IntertextualGraph:
        """Paper (reviewed version) plus all reviews, link layers applied."""
        graphs = [self.paper_graph(min(self.versions))]
        graphs += [self.review_graph(doc) for doc in self.reviews]
        joint = merge(*graphs)
        if with_explicit:
            for doc in self.reviews:
                extract_explicit_links(joint, doc, self.paper)
        if with_implicit and self.links_path.exists():
            store = LinkLabelStore.load(self.links_path, append_to=False)
            add_implicit_edges(joint, store.agreed_pairs())
        return joint

    def suggest_config(self) -> SuggestConfig:
        methods = list(self.suggestion.get("methods", ["bm25"]))
        m = int(self.suggestion.get("m", 5))
        embeddings = {}
        for name, rel in self.suggestion.get("embeddings", {}).items():
            embeddings[name] = EmbeddingTable.load(self.path / rel)
        return SuggestConfig(methods=methods, m=m, embeddings=embeddings)

    @classmethod
    def load(cls, path: str | Path) -> "Project":
        path = Path(path)
        manifest_path = path / "project.json"
        if not manifest_path.exists():
            raise ProjectError(f"not a project directory (no project.json): {path}")
        manifest = json.loads(manifest_path.read_text("utf-8"))
        try:
            return cls(
                path=path,
                id=manifest["id"],
                paper=manifest["paper"],
                versions={int(v): path / rel for v, rel in manifest["versions"].items()},
                reviews={doc: path / rel for doc, rel in manifest.get("reviews", {}).items()},
                annotators=list(manifest.get("annotators", [])),
                suggestion=dict(manifest.get("suggestion", {})),
            )
        except KeyError as exc:
            raise ProjectError(f"project.json is missing key {exc}") from exc


def list_projects(data_dir: str | Path) -> list[str]:
    data_dir = Path(data_dir)
    if not data_dir.exists():
        return []
    return sorted(p.name for p in data_dir.iterdir()
                  if (p / "project.json").exists())


# ----------------------------------------------------------------------
# shared computations (single source of truth for CLI and service bytes)

def compute_alignment(project: Project, old_version: int, new_version: int,
                      metric: str = "levenshtein-ratio", threshold: float = 0.3
                      ) -> tuple[AlignmentResult, str]:
    old = project.paper_graph(old_version)
    new = project.paper_graph(new_version)
    result = align_versions(AlignmentProblem.from_graphs(new, old, metric, threshold))
    report = diff_report(result, old, new)
    return result, report.text


def alignment_bytes(project: Project, old_version: int, new_version: int,
                    metric: str = "levenshtein-ratio", threshold: float = 0.3) -> bytes:
    result, _ = compute_alignment(project, old_version, new_version, metric, threshold)
    return canonical_json_bytes(result.to_obj())


def suggestion_bytes(project: Project, sentence: str,
                     joint: IntertextualGraph | None = None,
                     index: Bm25Index | None = None) -> bytes:
    joint = joint if joint is not None else project.joint_graph(
        with_explicit=False, with_implicit=False)
    out = suggest(joint, sentence, project.paper, project.suggest_config(),
                  bm25_index=index)
    return canonical_json_bytes(out.to_obj())


def build_bundle(project: Project, metric: str = "levenshtein-ratio",
                 threshold: float = 0.3,
                 section_map_path: str | Path | None = None) -> JointBundle:
    joint = project.joint_graph()
    if not project.pragmatics_path.exists():
        raise MissingLayerError("pragmatics")
    store = LabelStore.load(project.pragmatics_path, joint, append_to=False)
    if not len(store):
        raise MissingLayerError("pragmatics")
    newer = [v for v in project.versions if v != min(project.versions)]
    if not newer:
        raise MissingLayerError("alignment")
    result, _ = compute_alignment(project, min(project.versions), min(newer),
                                  metric, threshold)
    section_map = load_section_map(section_map_path) if section_map_path else None
    return JointBundle.build(joint, project.paper, list(project.reviews), store,
                             alignment=result, section_map=section_map)


def stats_bytes(project: Project, metric: str = "levenshtein-ratio",
                threshold: float = 0.3,
                section_map_path: str | Path | None = None) -> bytes:
    bundle = build_bundle(project, metric, threshold, section_map_path)
    return canonical_json_bytes(stats_report([bundle]))
