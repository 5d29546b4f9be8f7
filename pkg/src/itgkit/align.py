"""Exact version alignment of two document revisions.

Paragraph and section-title nodes of the newer version are matched
one-to-one against the older version by maximizing the summed pair
scores; the assignment polytope is integral, so a maximum-weight
bipartite matching solves the program exactly.  A pair scores zero when
the node kinds differ or the similarity falls below the threshold, and
zero-score edges are never drawn.  Alignment edges run from the newer
version to the older one; new nodes without an outgoing edge count as
added, old nodes without an incoming edge as deleted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import IntertextualGraph, Node, NodeKind
from .textsim import levenshtein_ratio, word_overlap

METRICS = ("levenshtein-ratio", "word-overlap", "combined")
_ALIGN_KINDS = (NodeKind.PARAGRAPH, NodeKind.SECTION_TITLE)
_TIE_EPS = 1e-12  # diagonal preference among equal-objective optima


class AlignmentError(Exception):
    pass


def canonical_metric(name: str) -> str:
    aliases = {"levenshtein": "levenshtein-ratio", "overlap": "word-overlap"}
    name = aliases.get(name, name)
    if name not in METRICS:
        raise AlignmentError(f"unknown metric: {name!r} (choose from {METRICS})")
    return name


def similarity(a: Node | str, b: Node | str, metric: str = "levenshtein-ratio") -> float:
    """Symmetric text similarity in [0, 1]."""
    metric = canonical_metric(metric)
    ta = a.content if isinstance(a, Node) else a
    tb = b.content if isinstance(b, Node) else b
    if metric == "levenshtein-ratio":
        return levenshtein_ratio(ta, tb)
    if metric == "word-overlap":
        return word_overlap(ta, tb)
    return (levenshtein_ratio(ta, tb) + word_overlap(ta, tb)) / 2.0


def score(a: Node, b: Node, metric: str = "levenshtein-ratio",
          threshold: float = 0.3) -> float:
    """Pair score: 0 for kind mismatches and below-threshold similarity."""
    if a.kind != b.kind:
        return 0.0
    s = similarity(a, b, metric)
    return s if s >= threshold else 0.0


@dataclass
class AlignmentProblem:
    new_nodes: list[Node]
    old_nodes: list[Node]
    metric: str = "levenshtein-ratio"
    threshold: float = 0.3
    document: str | None = None
    new_version: int | None = None
    old_version: int | None = None

    @classmethod
    def from_graphs(cls, new_graph: IntertextualGraph, old_graph: IntertextualGraph,
                    metric: str = "levenshtein-ratio", threshold: float = 0.3
                    ) -> "AlignmentProblem":
        new_docs, old_docs = new_graph.documents, old_graph.documents
        if len(new_docs) != 1 or len(old_docs) != 1:
            raise AlignmentError("version alignment expects single-document graphs")
        new_doc, old_doc = new_docs[0], old_docs[0]
        if new_doc.id != old_doc.id:
            raise AlignmentError(
                f"document id mismatch: {new_doc.id!r} vs {old_doc.id!r}")
        return cls(
            new_nodes=_alignable(new_graph, new_doc.id),
            old_nodes=_alignable(old_graph, old_doc.id),
            metric=canonical_metric(metric),
            threshold=threshold,
            document=new_doc.id,
            new_version=new_doc.version,
            old_version=old_doc.version,
        )


def _alignable(graph: IntertextualGraph, doc: str) -> list[Node]:
    order = graph.structure_order(doc)
    return [graph.node(nid) for nid in order
            if graph.node(nid).kind in _ALIGN_KINDS]


@dataclass
class AlignmentEdge:
    new: str
    old: str
    score: float


@dataclass
class AlignmentResult:
    edges: list[AlignmentEdge]
    added: list[str]      # new-version nodes with no outgoing edge
    deleted: list[str]    # old-version nodes with no incoming edge
    modified: list[AlignmentEdge]
    unchanged: list[AlignmentEdge]
    objective: float
    metric: str
    threshold: float
    document: str | None = None
    new_version: int | None = None
    old_version: int | None = None

    def to_obj(self) -> dict:
        return {
            "document": self.document,
            "new_version": self.new_version,
            "old_version": self.old_version,
            "metric": self.metric,
            "threshold": self.threshold,
            "objective": self.objective,
            "edges": [{"new": e.new, "old": e.old, "score": e.score}
                      for e in self.edges],
            "added": self.added,
            "deleted": self.deleted,
            "modified": [{"new": e.new, "old": e.old, "score": e.score}
                         for e in self.modified],
            "unchanged": [{"new": e.new, "old": e.old, "score": e.score}
                          for e in self.unchanged],
        }


def score_matrix(problem: AlignmentProblem) -> np.ndarray:
    mat = np.zeros((len(problem.new_nodes), len(problem.old_nodes)))
    for i, a in enumerate(problem.new_nodes):
        for j, b in enumerate(problem.old_nodes):
            mat[i, j] = score(a, b, problem.metric, problem.threshold)
    return mat


def align_versions(problem: AlignmentProblem) -> AlignmentResult:
    """Maximum total score one-to-one alignment, solved exactly."""
    metric = canonical_metric(problem.metric)
    n_new, n_old = len(problem.new_nodes), len(problem.old_nodes)
    edges: list[AlignmentEdge] = []
    if n_new and n_old:
        scores = score_matrix(problem)
        ii, jj = np.meshgrid(np.arange(n_new), np.arange(n_old), indexing="ij")
        biased = scores + np.where(scores > 0, _TIE_EPS / (1 + np.abs(ii - jj)), 0.0)
        rows, cols = linear_sum_assignment(biased, maximize=True)
        pairs = sorted(zip(rows.tolist(), cols.tolist()))
        for i, j in pairs:
            if scores[i, j] > 0:
                edges.append(AlignmentEdge(new=problem.new_nodes[i].id,
                                           old=problem.old_nodes[j].id,
                                           score=float(scores[i, j])))
    aligned_new = {e.new for e in edges}
    aligned_old = {e.old for e in edges}
    return AlignmentResult(
        edges=edges,
        added=[n.id for n in problem.new_nodes if n.id not in aligned_new],
        deleted=[n.id for n in problem.old_nodes if n.id not in aligned_old],
        modified=[e for e in edges if e.score < 1.0],
        unchanged=[e for e in edges if e.score == 1.0],
        objective=float(sum(e.score for e in edges)),
        metric=metric,
        threshold=problem.threshold,
        document=problem.document,
        new_version=problem.new_version,
        old_version=problem.old_version,
    )


# ----------------------------------------------------------------------
# diff reporting

@dataclass
class DiffReport:
    counts: dict[str, int]
    node_delta: int
    per_section: dict[str, dict[str, list[str]]]
    text: str = field(default="", repr=False)

    def to_obj(self) -> dict:
        return {"counts": self.counts, "node_delta": self.node_delta,
                "per_section": self.per_section}


def _section_of(graph: IntertextualGraph, node_id: str) -> str:
    sec = graph.ancestor_at(node_id, NodeKind.SECTION_TITLE)
    if sec is None:
        return "(front matter)"
    return graph.node(sec).content or sec


def _excerpt(graph: IntertextualGraph, node_id: str, width: int = 46) -> str:
    node = graph.node(node_id)
    text = node.content or node.meta.get("label", "") or f"[{node.kind.value}]"
    return text if len(text) <= width else text[: width - 1] + "…"


def diff_report(result: AlignmentResult, old_graph: IntertextualGraph,
                new_graph: IntertextualGraph) -> DiffReport:
    """Structured change summary plus a side-by-side rendering."""
    for e in result.edges:
        if not new_graph.has_node(e.new) or not old_graph.has_node(e.old):
            raise AlignmentError("alignment result does not match the given graphs")
    for nid in result.added:
        if not new_graph.has_node(nid):
            raise AlignmentError("alignment result does not match the given graphs")
    for nid in result.deleted:
        if not old_graph.has_node(nid):
            raise AlignmentError("alignment result does not match the given graphs")
    counts = {"added": len(result.added), "deleted": len(result.deleted),
              "modified": len(result.modified), "unchanged": len(result.unchanged)}
    # new count = edges+added, old count = edges+deleted
    delta = len(result.added) - len(result.deleted)
    per_section: dict[str, dict[str, list[str]]] = {}

    def bucket(section: str, key: str, node_id: str):
        per_section.setdefault(section, {"added": [], "deleted": [], "modified": []})[key].append(node_id)

    for nid in result.added:
        bucket(_section_of(new_graph, nid), "added", nid)
    for nid in result.deleted:
        bucket(_section_of(old_graph, nid), "deleted", nid)
    for e in result.modified:
        bucket(_section_of(new_graph, e.new), "modified", e.new)

    lines = [f"alignment of {result.document or 'document'}"
             f" v{result.old_version} -> v{result.new_version}"
             f" ({result.metric}, threshold {result.threshold})",
             f"objective {result.objective:.6f} | "
             f"unchanged {counts['unchanged']}, modified {counts['modified']}, "
             f"added {counts['added']}, deleted {counts['deleted']}", ""]
    old_by_new = {e.new: e for e in result.edges}
    for nid in [n.id for n in _alignable(new_graph, new_graph.documents[0].id)]:
        if nid in old_by_new:
            e = old_by_new[nid]
            tag = "==" if e.score == 1.0 else "~~"
            lines.append(f"{tag} {_excerpt(old_graph, e.old):<48} | {_excerpt(new_graph, nid)}")
        elif nid in result.added:
            lines.append(f"++ {'':<48} | {_excerpt(new_graph, nid)}")
    for nid in result.deleted:
        lines.append(f"-- {_excerpt(old_graph, nid):<48} |")
    return DiffReport(counts=counts, node_delta=delta,
                      per_section=per_section, text="\n".join(lines) + "\n")
