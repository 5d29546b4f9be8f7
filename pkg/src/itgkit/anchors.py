"""Rule-based detection of explicit anchors in review sentences and
resolution against the paper graph.

Anchor types: lin (line), pag (page), col (column), par (paragraph
ordinal), quo (quotation), sec (section name), fig, tab, box, ref.
Patterns live in a JSON data file and can be replaced without touching
code.  Pages, lines and columns are detected but never resolve, because
those coordinates exist only in rendered exports, not in the source
structure.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

from .graph import Edge, IntertextualGraph, LinkSubtype, Node, NodeKind
from .textsim import fold_title, levenshtein_ratio, semiglobal_similarity

PROVENANCE = "rule-parser"
_ORDINALS = {"first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
             "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
             "last": -1}


class AnchorType(str, Enum):
    LIN = "lin"
    PAG = "pag"
    COL = "col"
    PAR = "par"
    QUO = "quo"
    SEC = "sec"
    FIG = "fig"
    TAB = "tab"
    BOX = "box"
    REF = "ref"


# target node kinds an anchor type may legally resolve to
COMPATIBLE_TARGET_KINDS: dict[AnchorType, frozenset[NodeKind]] = {
    AnchorType.SEC: frozenset({NodeKind.SECTION_TITLE}),
    AnchorType.FIG: frozenset({NodeKind.FIGURE}),
    AnchorType.TAB: frozenset({NodeKind.TABLE}),
    AnchorType.BOX: frozenset({NodeKind.TABLE}),
    AnchorType.QUO: frozenset({NodeKind.PARAGRAPH, NodeKind.SENTENCE}),
    AnchorType.PAR: frozenset({NodeKind.PARAGRAPH}),
    AnchorType.REF: frozenset({NodeKind.REFERENCE}),
    AnchorType.PAG: frozenset(),
    AnchorType.LIN: frozenset(),
    AnchorType.COL: frozenset(),
}


@dataclass
class ExplicitAnchor:
    sentence: str                 # node id of the review sentence
    start: int
    end: int
    type: AnchorType
    surface: str
    normalized: str

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass
class Unresolved:
    reason: str


@dataclass
class ExplicitLink:
    anchor: ExplicitAnchor
    target: str | Unresolved
    similarity: float | None = None

    @property
    def resolved(self) -> bool:
        return isinstance(self.target, str)


@dataclass
class AnchorPattern:
    type: AnchorType
    regex: re.Pattern
    normalization: str | None = None
    min_words: int = 0


@dataclass
class PatternSet:
    patterns: list[AnchorPattern]
    section_names: list[str] = field(default_factory=list)

    def with_sections(self, extra_names: list[str]) -> "PatternSet":
        names = list(dict.fromkeys(self.section_names + [n for n in extra_names if n]))
        return PatternSet(patterns=list(self.patterns), section_names=names)


def load_patterns(path: str | Path | None = None) -> PatternSet:
    if path is None:
        raw = resources.files("itgkit.data").joinpath("anchor_patterns.json").read_text("utf-8")
    else:
        raw = Path(path).read_text("utf-8")
    entries = json.loads(raw)
    patterns: list[AnchorPattern] = []
    section_names: list[str] = []
    for entry in entries:
        atype = AnchorType(entry["type"])
        if "names" in entry:
            section_names.extend(entry["names"])
            continue
        patterns.append(AnchorPattern(
            type=atype,
            regex=re.compile(entry["pattern"], re.IGNORECASE),
            normalization=entry.get("normalization"),
            min_words=int(entry.get("min_words", 0)),
        ))
    return PatternSet(patterns=patterns, section_names=section_names)


_DEFAULT_PATTERNS: PatternSet | None = None


def default_patterns() -> PatternSet:
    global _DEFAULT_PATTERNS
    if _DEFAULT_PATTERNS is None:
        _DEFAULT_PATTERNS = load_patterns()
    return _DEFAULT_PATTERNS


def _normalize_match(pattern: AnchorPattern, m: re.Match) -> str | None:
    groups = [g for g in m.groups() if g is not None]
    value = groups[0] if groups else m.group(0)
    if pattern.normalization == "number":
        return value
    if pattern.normalization == "ordinal":
        low = value.lower()
        return str(_ORDINALS.get(low, low))
    if pattern.normalization == "quote-text":
        if len(value.split()) < pattern.min_words:
            return None
        return value
    if pattern.normalization == "first-group":
        return value.lower()
    return value.lower()


def detect_anchors(sentence: Node | str, patterns: PatternSet | None = None,
                   section_names: list[str] | None = None,
                   sentence_id: str = "") -> list[ExplicitAnchor]:
    """Find explicit anchors in one sentence, longest match first,
    returned in span order with no overlaps."""
    if isinstance(sentence, Node):
        text = sentence.content
        sentence_id = sentence.id
    else:
        text = sentence
    pset = patterns or default_patterns()
    if section_names:
        pset = pset.with_sections(section_names)

    candidates: list[ExplicitAnchor] = []
    for pattern in pset.patterns:
        for m in pattern.regex.finditer(text):
            normalized = _normalize_match(pattern, m)
            if normalized is None:
                continue
            candidates.append(ExplicitAnchor(
                sentence=sentence_id, start=m.start(), end=m.end(),
                type=pattern.type, surface=m.group(0), normalized=normalized))
    if pset.section_names:
        names = sorted(pset.section_names, key=len, reverse=True)
        sec_re = re.compile(
            r"\b(" + "|".join(re.escape(n) for n in names) + r")\b", re.IGNORECASE)
        for m in sec_re.finditer(text):
            candidates.append(ExplicitAnchor(
                sentence=sentence_id, start=m.start(), end=m.end(),
                type=AnchorType.SEC, surface=m.group(0),
                normalized=m.group(1).lower()))

    # overlap resolution: longer spans win, then earlier start
    candidates.sort(key=lambda a: (-(a.end - a.start), a.start))
    kept: list[ExplicitAnchor] = []
    for cand in candidates:
        if all(cand.end <= k.start or cand.start >= k.end for k in kept):
            kept.append(cand)
    kept.sort(key=lambda a: a.start)
    return kept


# ----------------------------------------------------------------------
# resolution

_LABEL_NUM = re.compile(r"(\d+)")


def _label_number(node: Node) -> str | None:
    m = _LABEL_NUM.search(node.meta.get("label", ""))
    return m.group(1) if m else None


def _resolve_by_label(anchor: ExplicitAnchor, graph: IntertextualGraph, doc: str,
                      kind: NodeKind, want_box: bool) -> ExplicitLink:
    for node in graph.nodes_of(doc, kind):
        if (node.meta.get("box") == "true") != want_box:
            continue
        if _label_number(node) == anchor.normalized:
            return ExplicitLink(anchor, node.id)
    return ExplicitLink(anchor, Unresolved("not-found"))


def _resolve_section(anchor: ExplicitAnchor, graph: IntertextualGraph,
                     doc: str) -> ExplicitLink:
    wanted = fold_title(anchor.normalized)
    best: tuple[float, str] | None = None
    for node in graph.structure_order(doc, NodeKind.SECTION_TITLE):
        have = fold_title(graph.node(node).content)
        if not have:
            continue
        if have == wanted:
            return ExplicitLink(anchor, node, similarity=1.0)
        ratio = levenshtein_ratio(have, wanted)
        if ratio >= 0.85 and (best is None or ratio > best[0]):
            best = (ratio, node)
    if best is not None:
        return ExplicitLink(anchor, best[1], similarity=best[0])
    return ExplicitLink(anchor, Unresolved("not-found"))


def _resolve_quote(anchor: ExplicitAnchor, graph: IntertextualGraph, doc: str,
                   threshold: float) -> ExplicitLink:
    quote = anchor.normalized.casefold()
    best_sim, best_node = -1.0, None
    for nid in graph.reading_order(doc):
        node = graph.node(nid)
        if node.kind not in (NodeKind.SENTENCE, NodeKind.PARAGRAPH):
            continue
        sim = semiglobal_similarity(quote, node.content.casefold())
        if sim > best_sim:
            best_sim, best_node = sim, nid
    if best_node is not None and best_sim >= threshold:
        return ExplicitLink(anchor, best_node, similarity=best_sim)
    return ExplicitLink(anchor, Unresolved("below-threshold"))


def _resolve_paragraph(anchor: ExplicitAnchor, graph: IntertextualGraph, doc: str,
                       section: str | None) -> ExplicitLink:
    try:
        ordinal = int(anchor.normalized)
    except ValueError:
        return ExplicitLink(anchor, Unresolved("unparseable-ordinal"))
    if section is not None:
        scope = [nid for nid in graph.structure_order(doc, NodeKind.PARAGRAPH)
                 if graph.ancestor_at(nid, NodeKind.SECTION_TITLE) == section]
    else:
        scope = graph.structure_order(doc, NodeKind.PARAGRAPH)
    if not scope:
        return ExplicitLink(anchor, Unresolved("not-found"))
    if ordinal == -1:
        return ExplicitLink(anchor, scope[-1])
    if 1 <= ordinal <= len(scope):
        return ExplicitLink(anchor, scope[ordinal - 1])
    return ExplicitLink(anchor, Unresolved("not-found"))


def _resolve_reference(anchor: ExplicitAnchor, graph: IntertextualGraph,
                       doc: str) -> ExplicitLink:
    key = anchor.normalized
    for node in graph.nodes_of(doc, NodeKind.REFERENCE):
        if node.meta.get("label") == key or _label_number(node) == key:
            return ExplicitLink(anchor, node.id)
        author_year = f"{node.meta.get('first_author', '')} {node.meta.get('year', '')}"
        if key and key.lower() == author_year.strip().lower():
            return ExplicitLink(anchor, node.id)
    return ExplicitLink(anchor, Unresolved("not-found"))


def resolve_target(anchor: ExplicitAnchor, graph: IntertextualGraph, doc: str,
                   *, section_context: str | None = None,
                   quote_threshold: float = 0.8) -> ExplicitLink:
    """Resolve one anchor to a paper node, or an Unresolved value."""
    t = anchor.type
    if t in (AnchorType.PAG, AnchorType.LIN, AnchorType.COL):
        return ExplicitLink(anchor, Unresolved("no-such-coordinate"))
    if t is AnchorType.SEC:
        return _resolve_section(anchor, graph, doc)
    if t is AnchorType.FIG:
        return _resolve_by_label(anchor, graph, doc, NodeKind.FIGURE, want_box=False)
    if t is AnchorType.TAB:
        return _resolve_by_label(anchor, graph, doc, NodeKind.TABLE, want_box=False)
    if t is AnchorType.BOX:
        return _resolve_by_label(anchor, graph, doc, NodeKind.TABLE, want_box=True)
    if t is AnchorType.QUO:
        return _resolve_quote(anchor, graph, doc, quote_threshold)
    if t is AnchorType.PAR:
        return _resolve_paragraph(anchor, graph, doc, section_context)
    if t is AnchorType.REF:
        return _resolve_reference(anchor, graph, doc)
    raise ValueError(f"unhandled anchor type: {t}")


def check_kind_compatibility(link: ExplicitLink, graph: IntertextualGraph) -> bool:
    if not link.resolved:
        return True
    return graph.node(link.target).kind in COMPATIBLE_TARGET_KINDS[link.anchor.type]


def extract_explicit_links(graph: IntertextualGraph, review_doc: str, paper_doc: str,
                           *, patterns: PatternSet | None = None,
                           quote_threshold: float = 0.8) -> tuple[list[ExplicitLink], list[Edge]]:
    """Detect and resolve explicit anchors for every review sentence.

    Resolved links become ``link/explicit`` edges from the review
    sentence to the paper node, deduplicated per (sentence, target).
    Returns all links (resolved or not) and the edges actually added.
    """
    section_titles = [graph.node(nid).content
                      for nid in graph.structure_order(paper_doc, NodeKind.SECTION_TITLE)]
    existing = {(e.src, e.dst) for e in graph.edges
                if e.kind.value == "link" and e.subtype is LinkSubtype.EXPLICIT}
    links: list[ExplicitLink] = []
    edges: list[Edge] = []
    for nid in graph.reading_order(review_doc):
        node = graph.node(nid)
        if node.kind is not NodeKind.SENTENCE:
            continue
        anchors = detect_anchors(node, patterns, section_names=section_titles)
        sec_context: str | None = None
        resolved_here: list[ExplicitLink] = []
        for anchor in anchors:   # sec anchors first so par ordinals get scope
            if anchor.type is AnchorType.SEC:
                link = resolve_target(anchor, graph, paper_doc)
                if link.resolved and sec_context is None:
                    sec_context = link.target
                resolved_here.append(link)
        for anchor in anchors:
            if anchor.type is AnchorType.SEC:
                continue
            resolved_here.append(resolve_target(
                anchor, graph, paper_doc, section_context=sec_context,
                quote_threshold=quote_threshold))
        resolved_here.sort(key=lambda l: l.anchor.start)
        for link in resolved_here:
            links.append(link)
            if link.resolved and (nid, link.target) not in existing:
                eid = graph.add_edge(nid, link.target, "link",
                                     subtype=LinkSubtype.EXPLICIT,
                                     provenance=PROVENANCE)
                existing.add((nid, link.target))
                edges.append(graph.edge(eid))
    return links, edges


def links_tsv(links: list[ExplicitLink]) -> str:
    """Flat report: sentence id, span, type, target or unresolved reason."""
    rows = ["sentence\tstart\tend\ttype\tsurface\ttarget"]
    for link in links:
        a = link.anchor
        target = link.target if link.resolved else f"unresolved:{link.target.reason}"
        surface = a.surface.replace("\t", " ")
        rows.append(f"{a.sentence}\t{a.start}\t{a.end}\t{a.type.value}\t{surface}\t{target}")
    return "\n".join(rows) + "\n"
