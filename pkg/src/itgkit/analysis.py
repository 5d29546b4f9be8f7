"""Joint statistics over pragmatics, linking and version alignment.

A bundle combines one paper (first version), its reviews with pragmatic
labels, the review-to-paper link edges (implicit links restricted to
pairs both annotators marked linked), and the alignment of the first
revision back onto the paper.  Link edges are lifted to paragraph
granularity before any counting so the three layers interoperate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .align import AlignmentResult
from .graph import EdgeKind, IntertextualGraph, LinkSubtype, NodeKind
from .pragmatics import GOLD_ANNOTATOR, LabelStore, PragmaticLabel
from .textsim import fold_title


class SectionGroup(str, Enum):
    TITLE = "title"
    ABSTRACT = "abstract"
    INTRODUCTION = "introduction"
    METHODS = "methods"
    RESULTS = "results"
    DISCUSSION = "discussion"
    CONCLUSIONS = "conclusions"
    OTHER = "other"


class MissingLayerError(Exception):
    def __init__(self, layer: str):
        super().__init__(f"missing layer: {layer}")
        self.layer = layer


def load_section_map(path: str | Path | None = None) -> dict[str, str]:
    if path is None:
        raw = resources.files("itgkit.data").joinpath("section_groups.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    return {fold_title(k, drop_stopwords=False): v for k, v in json.loads(raw).items()}


_DEFAULT_MAP: dict[str, str] | None = None


def normalize_section_title(title: str, mapping: dict[str, str] | None = None
                            ) -> SectionGroup:
    """Keyword lookup after case/punctuation folding; unknown titles map to other."""
    global _DEFAULT_MAP
    if mapping is None:
        if _DEFAULT_MAP is None:
            _DEFAULT_MAP = load_section_map()
        mapping = _DEFAULT_MAP
    folded = fold_title(title, drop_stopwords=False)
    if folded in mapping:
        return SectionGroup(mapping[folded])
    # longest keyword contained as a token phrase
    for key in sorted(mapping, key=len, reverse=True):
        if f" {key} " in f" {folded} ":
            return SectionGroup(mapping[key])
    return SectionGroup.OTHER


CHANNELS = ("explicit", "implicit")


@dataclass
class ParagraphLink:
    """One review-sentence-to-paper-paragraph link after propagation."""
    sentence: str
    target: str          # paragraph-granularity node in the paper
    channel: str         # explicit | implicit


@dataclass
class JointBundle:
    graph: IntertextualGraph          # paper v1 + reviews, link edges included
    paper_doc: str
    review_docs: list[str]
    labels: dict[str, PragmaticLabel]  # review sentence -> adjudicated label
    alignment: AlignmentResult | None = None
    section_map: dict[str, str] | None = None
    paragraph_links: list[ParagraphLink] = field(default_factory=list)

    @classmethod
    def build(cls, graph: IntertextualGraph, paper_doc: str, review_docs: list[str],
              label_store: LabelStore, alignment: AlignmentResult | None = None,
              annotator: str = GOLD_ANNOTATOR,
              section_map: dict[str, str] | None = None) -> "JointBundle":
        labels = {r.node: r.label for r in label_store.records(annotator)}
        if not labels:  # fall back to any single annotator, deterministically
            annotators = label_store.annotators()
            if annotators:
                labels = {r.node: r.label for r in label_store.records(annotators[0])}
        bundle = cls(graph=graph, paper_doc=paper_doc, review_docs=review_docs,
                     labels=labels, alignment=alignment, section_map=section_map)
        bundle.paragraph_links = bundle._propagate()
        return bundle

    def _propagate(self) -> list[ParagraphLink]:
        """Lift review->paper link edges to paragraph granularity, per channel."""
        review_set = set(self.review_docs)
        seen: set[tuple[str, str, str]] = set()
        out: list[ParagraphLink] = []
        for e in self.graph.edges:
            if e.kind is not EdgeKind.LINK or e.subtype is LinkSubtype.DERIVED:
                continue
            if e.subtype is LinkSubtype.EXPLICIT:
                channel = "explicit"
            elif e.subtype is LinkSubtype.IMPLICIT:
                channel = "implicit"
            else:
                continue
            src, dst = self.graph.node(e.src), self.graph.node(e.dst)
            if src.doc not in review_set or dst.doc != self.paper_doc:
                continue
            para = self.graph.ancestor_at(e.dst, NodeKind.PARAGRAPH) or e.dst
            key = (e.src, para, channel)
            if key not in seen:
                seen.add(key)
                out.append(ParagraphLink(sentence=e.src, target=para, channel=channel))
        return out

    def review_sentences(self) -> list[str]:
        out = []
        for doc in self.review_docs:
            out.extend(n.id for n in self.graph.nodes_of(doc, NodeKind.SENTENCE))
        return out

    def section_group_of(self, node_id: str) -> SectionGroup:
        node = self.graph.node(node_id)
        root = self.graph.document(self.paper_doc).root
        if node_id == root:
            return SectionGroup.TITLE
        if self.graph.ancestor_at(node_id, NodeKind.ABSTRACT) is not None:
            return SectionGroup.ABSTRACT
        sec = self.graph.ancestor_at(node_id, NodeKind.SECTION_TITLE)
        if sec is None:
            return SectionGroup.TITLE if node.kind is NodeKind.ARTICLE_TITLE else SectionGroup.OTHER
        return normalize_section_title(self.graph.node(sec).content, self.section_map)


def add_implicit_edges(graph: IntertextualGraph, agreed_pairs: set[tuple[str, str]],
                       provenance: str = "annotation:dual") -> int:
    """Materialize dually-agreed implicit pairs as link/implicit edges."""
    existing = {(e.src, e.dst) for e in graph.edges
                if e.kind is EdgeKind.LINK and e.subtype is LinkSubtype.IMPLICIT}
    added = 0
    for src, dst in sorted(agreed_pairs):
        if (src, dst) not in existing and graph.has_node(src) and graph.has_node(dst):
            graph.add_edge(src, dst, "link", subtype=LinkSubtype.IMPLICIT,
                           provenance=provenance)
            added += 1
    return added


# ----------------------------------------------------------------------
# statistics

def linking_rate_by_pragmatics(bundle: JointBundle) -> dict[str, dict[str, float]]:
    """Per pragmatic class: share of review sentences linked per channel.

    Channels are counted independently; a sentence with both an explicit
    and an implicit link contributes to both rates.  ``unlinked`` is the
    share with no link in either channel.
    """
    if not bundle.labels:
        raise MissingLayerError("pragmatics")
    linked: dict[str, set[str]] = {ch: set() for ch in CHANNELS}
    for link in bundle.paragraph_links:
        linked[link.channel].add(link.sentence)
    out: dict[str, dict[str, float]] = {}
    for label in PragmaticLabel:
        sentences = [s for s in bundle.review_sentences()
                     if bundle.labels.get(s) is label]
        n = len(sentences)
        if n == 0:
            out[label.value] = {"explicit": 0.0, "implicit": 0.0, "unlinked": 0.0,
                                "sentences": 0}
            continue
        expl = sum(1 for s in sentences if s in linked["explicit"])
        impl = sum(1 for s in sentences if s in linked["implicit"])
        unlinked = sum(1 for s in sentences
                       if s not in linked["explicit"] and s not in linked["implicit"])
        out[label.value] = {"explicit": expl / n, "implicit": impl / n,
                            "unlinked": unlinked / n, "sentences": n}
    return out


def links_per_section(bundles: list[JointBundle]) -> dict[str, dict]:
    """Incoming links per section group, normalized by group occurrence,
    split by channel and by the pragmatic class of the linking sentence."""
    occurrences: dict[str, int] = {g.value: 0 for g in SectionGroup}
    counts: dict[str, dict[str, dict[str, int]]] = {
        g.value: {ch: {l.value: 0 for l in PragmaticLabel} for ch in CHANNELS}
        for g in SectionGroup}
    totals: dict[str, dict[str, int]] = {
        g.value: {ch: 0 for ch in CHANNELS} for g in SectionGroup}
    for bundle in bundles:
        occurrences[SectionGroup.TITLE.value] += 1
        if any(n.kind is NodeKind.ABSTRACT for n in bundle.graph.nodes_of(bundle.paper_doc)):
            occurrences[SectionGroup.ABSTRACT.value] += 1
        for node in bundle.graph.nodes_of(bundle.paper_doc, NodeKind.SECTION_TITLE):
            group = normalize_section_title(node.content, bundle.section_map)
            occurrences[group.value] += 1
        for link in bundle.paragraph_links:
            group = bundle.section_group_of(link.target).value
            totals[group][link.channel] += 1
            label = bundle.labels.get(link.sentence)
            if label is not None:
                counts[group][link.channel][label.value] += 1
    normalized: dict[str, dict] = {}
    for group in (g.value for g in SectionGroup):
        occ = occurrences[group]
        normalized[group] = {
            "occurrences": occ,
            "by_channel": {ch: (totals[group][ch] / occ if occ else 0.0)
                           for ch in CHANNELS},
            "by_channel_and_class": {
                ch: {lab: (counts[group][ch][lab] / occ if occ else 0.0)
                     for lab in (l.value for l in PragmaticLabel)}
                for ch in CHANNELS},
        }
    return normalized


def change_given_links(bundles: list[JointBundle]) -> dict:
    """P(paragraph changed | linked) vs P(changed | unlinked), plus the
    pragmatic-class distribution of sentences linked to changed paragraphs.

    A paragraph of the reviewed version counts as changed when the
    revision deleted it or aligned it with similarity below 1.  Purely
    added paragraphs have no prior state and are excluded.
    """
    linked_total = unlinked_total = 0
    linked_changed = unlinked_changed = 0
    class_hist = {l.value: 0 for l in PragmaticLabel}
    for bundle in bundles:
        if bundle.alignment is None:
            raise MissingLayerError("alignment")
        changed = set(bundle.alignment.deleted) | {e.old for e in bundle.alignment.modified}
        linked_paragraphs = {link.target for link in bundle.paragraph_links}
        for node in bundle.graph.nodes_of(bundle.paper_doc, NodeKind.PARAGRAPH):
            is_linked = node.id in linked_paragraphs
            is_changed = node.id in changed
            if is_linked:
                linked_total += 1
                linked_changed += is_changed
            else:
                unlinked_total += 1
                unlinked_changed += is_changed
        for link in bundle.paragraph_links:
            if link.target in changed:
                label = bundle.labels.get(link.sentence)
                if label is not None:
                    class_hist[label.value] += 1
    hist_total = sum(class_hist.values())
    return {
        "p_change_given_links": linked_changed / linked_total if linked_total else 0.0,
        "p_change_given_no_links": unlinked_changed / unlinked_total if unlinked_total else 0.0,
        "linked_paragraphs": linked_total,
        "unlinked_paragraphs": unlinked_total,
        "pragmatics_of_change": {lab: (v / hist_total if hist_total else 0.0)
                                 for lab, v in class_hist.items()},
    }


def stats_report(bundles: list[JointBundle]) -> dict:
    """All joint statistics plus the modeling choices that shaped them."""
    if not bundles:
        raise ValueError("no bundles given")
    rates = linking_rate_by_pragmatics(bundles[0]) if len(bundles) == 1 else \
        _merged_rates(bundles)
    return {
        "linking_rate_by_pragmatics": rates,
        "links_per_section": links_per_section(bundles),
        "change_given_links": change_given_links(bundles),
        "metadata": {
            "implicit_links": "dual-agreement only",
            "granularity": "links propagated to paragraph level",
            "channels": "explicit and implicit counted independently",
            "changed": "modified or deleted; purely-added paragraphs excluded",
            "papers": len(bundles),
        },
    }


def _merged_rates(bundles: list[JointBundle]) -> dict[str, dict[str, float]]:
    per_bundle = [linking_rate_by_pragmatics(b) for b in bundles]
    merged: dict[str, dict[str, float]] = {}
    for label in (l.value for l in PragmaticLabel):
        n = sum(r[label]["sentences"] for r in per_bundle)
        if n == 0:
            merged[label] = {"explicit": 0.0, "implicit": 0.0, "unlinked": 0.0,
                             "sentences": 0}
            continue
        merged[label] = {
            key: sum(r[label][key] * r[label]["sentences"] for r in per_bundle) / n
            for key in ("explicit", "implicit", "unlinked")}
        merged[label]["sentences"] = n
    return merged


def stats_csv_rows(report: dict) -> list[tuple[str, str, str, float]]:
    """Plot-ready rows: (statistic, class-or-section, channel, value)."""
    rows: list[tuple[str, str, str, float]] = []
    for label, vals in report["linking_rate_by_pragmatics"].items():
        for channel in ("explicit", "implicit", "unlinked"):
            rows.append(("linking_rate", label, channel, vals[channel]))
    for group, vals in report["links_per_section"].items():
        for channel, value in vals["by_channel"].items():
            rows.append(("links_per_section", group, channel, value))
    cgl = report["change_given_links"]
    rows.append(("change_probability", "linked", "any", cgl["p_change_given_links"]))
    rows.append(("change_probability", "unlinked", "any", cgl["p_change_given_no_links"]))
    for label, value in cgl["pragmatics_of_change"].items():
        rows.append(("pragmatics_of_change", label, "any", value))
    return rows
