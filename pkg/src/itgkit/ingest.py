"""Convert JATS XML articles and free-text reviews into intertextual graphs.

The converter flattens inline formatting, keeps figures/tables/equations
as payload nodes with their labels, splits paragraph text into sentence
nodes, and chains all leaf nodes with ``next`` edges in document order.
Review documents are plain text: blank-line paragraphs under a single
review-report root, after questionnaire-template cleanup.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources

from .graph import IntertextualGraph, NodeKind

_DATA = resources.files("itgkit.data")


class IngestError(Exception):
    pass


@dataclass
class SentenceSpan:
    """Character span of one sentence inside a paragraph."""
    start: int
    end: int
    text: str


@dataclass
class IngestReport:
    counts: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {"counts": dict(sorted(self.counts.items())), "warnings": self.warnings}


@dataclass
class IngestOptions:
    split_sentences: bool = True
    doc_id: str | None = None
    version: int = 1


# ----------------------------------------------------------------------
# sentence splitting

def _load_abbreviations() -> tuple[frozenset[str], tuple[str, ...]]:
    single, multi = set(), []
    for line in _DATA.joinpath("abbreviations.txt").read_text("utf-8").splitlines():
        line = line.strip().lower()
        if not line or line.startswith("#"):
            continue
        if " " in line:
            multi.append(line)
        else:
            single.add(line)
    return frozenset(single), tuple(multi)


_ABBREV_SINGLE, _ABBREV_MULTI = _load_abbreviations()
_TERMINAL = re.compile(r"[.!?]+[)\"'”’\]]*")
_SENT_START = re.compile(r"[\"'“‘(\[A-Z0-9]")


def _is_abbreviation(prefix: str) -> bool:
    # prefix ends right after the period; compare the trailing token(s)
    tail = prefix.lower()
    for abbr in _ABBREV_MULTI:
        if tail.endswith(abbr):
            return True
    token = tail.rsplit(None, 1)[-1] if tail.split() else tail
    return token in _ABBREV_SINGLE


def split_sentences(text: str) -> list[SentenceSpan]:
    """Rule-based splitter on terminal punctuation with an abbreviation list.

    Deterministic; spans are ordered, non-overlapping, and cover every
    non-whitespace character of the input.
    """
    boundaries: list[int] = []
    for m in _TERMINAL.finditer(text):
        end = m.end()
        if end >= len(text):
            continue
        rest = text[end:]
        stripped = rest.lstrip()
        if stripped == rest:  # no whitespace after the terminal run
            continue
        if stripped and not _SENT_START.match(stripped):
            continue
        if "!" not in m.group() and "?" not in m.group():
            if _is_abbreviation(text[:m.start() + m.group().index(".") + 1]):
                continue
        boundaries.append(end)
    spans: list[SentenceSpan] = []
    prev = 0
    for cut in boundaries + [len(text)]:
        chunk = text[prev:cut]
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk) - len(chunk.rstrip())
        if chunk.strip():
            start = prev + lead
            end = cut - trail
            spans.append(SentenceSpan(start=start, end=end, text=text[start:end]))
        prev = cut
    return spans


# ----------------------------------------------------------------------
# review cleanup

def load_questionnaire_templates() -> list[str]:
    return json.loads(_DATA.joinpath("questionnaire_templates.json").read_text("utf-8"))


def _norm_line(line: str) -> str:
    return " ".join(line.split())


def clean_review(text: str, templates: list[str] | None = None) -> str:
    """Drop questionnaire template lines; keep everything else verbatim.

    A line is removed iff its whitespace-normalized form equals a
    whitespace-normalized template line.
    """
    if templates is None:
        templates = load_questionnaire_templates()
    template_lines = {_norm_line(l) for t in templates for l in t.splitlines() if l.strip()}
    kept = [line for line in text.splitlines(keepends=True)
            if _norm_line(line) not in template_lines or not line.strip()]
    return "".join(kept)


# ----------------------------------------------------------------------
# JATS conversion

def _strip_ns(root: ET.Element) -> None:
    for el in root.iter():
        if isinstance(el.tag, str) and "}" in el.tag:
            el.tag = el.tag.split("}", 1)[1]


def _flatten(el: ET.Element | None) -> str:
    if el is None:
        return ""
    return " ".join("".join(el.itertext()).split())


_XREF_KINDS = {"bibr", "fig", "table", "sec"}


def _paragraph_text(el: ET.Element) -> tuple[str, list[tuple[int, int, str]]]:
    """Flatten a <p>, recording character spans of inline <xref> citations."""
    parts: list[str] = []
    marks: list[tuple[int, int, str]] = []
    pos = 0

    def emit(s: str | None):
        nonlocal pos
        if s:
            parts.append(s)
            pos += len(s)

    def walk(node: ET.Element):
        nonlocal pos
        emit(node.text)
        for child in node:
            if child.tag == "xref":
                start = pos
                emit("".join(child.itertext()))
                rid = child.get("rid") or ""
                kind = child.get("ref-type") or ""
                if kind in _XREF_KINDS or rid:
                    marks.append((start, pos, f"{kind}:{rid}"))
            elif child.tag in ("fig", "table-wrap", "disp-formula", "boxed-text"):
                pass  # payload elements become their own nodes
            else:
                walk(child)
            emit(child.tail)

    walk(el)
    raw = "".join(parts)
    # collapse whitespace while remapping citation offsets
    out: list[str] = []
    remap: list[int] = []
    in_ws = True
    for i, ch in enumerate(raw):
        if ch.isspace():
            if not in_ws:
                remap.append(len(out))
                out.append(" ")
                in_ws = True
            else:
                remap.append(len(out))
        else:
            remap.append(len(out))
            out.append(ch)
            in_ws = False
    remap.append(len(out))
    text = "".join(out).strip()
    offset_fix = len("".join(out)) - len("".join(out).lstrip())
    fixed_marks = []
    for s, e, tag in marks:
        fixed_marks.append((max(0, remap[s] - offset_fix),
                            max(0, remap[e] - offset_fix), tag))
    return text, fixed_marks


class _Builder:
    """Accumulates nodes for one document and chains leaves at the end."""

    def __init__(self, graph: IntertextualGraph, doc: str, options: IngestOptions):
        self.graph = graph
        self.doc = doc
        self.options = options
        self.warnings: list[str] = []
        self._counters: Counter[str] = Counter()

    def _next_id(self, stem: str) -> str:
        self._counters[stem] += 1
        return f"{self.doc}:{stem}{self._counters[stem]}"

    def add(self, kind: NodeKind, content: str = "", *, parent: str | None = None,
            payload: str | None = None, meta: dict[str, str] | None = None,
            stem: str | None = None, node_id: str | None = None) -> str:
        nid = node_id or self._next_id(stem or kind.value.replace("-", ""))
        self.graph.add_node(self.doc, kind, content, payload=payload, meta=meta,
                            node_id=nid, root=parent is None,
                            version=self.options.version)
        if parent is not None:
            self.graph.add_edge(nid, parent, "parent")
        return nid

    def add_paragraph(self, text: str, parent: str,
                      citations: list[tuple[int, int, str]] | None = None) -> str:
        pid = self.add(NodeKind.PARAGRAPH, text, parent=parent, stem="p")
        if self.options.split_sentences:
            for i, span in enumerate(split_sentences(text), start=1):
                meta: dict[str, str] = {"start": str(span.start), "end": str(span.end)}
                if citations:
                    hits = [tag for s, e, tag in citations if s < span.end and e > span.start]
                    if hits:
                        meta["citations"] = ";".join(hits)
                self.graph.add_node(self.doc, NodeKind.SENTENCE, span.text,
                                    meta=meta, node_id=f"{pid}.s{i}",
                                    version=self.options.version)
                self.graph.add_edge(f"{pid}.s{i}", pid, "parent")
        return pid

    def chain_leaves(self) -> None:
        order: list[str] = []
        stack = [self.graph.document(self.doc).root]
        while stack:
            cur = stack.pop()
            kids = self.graph.children_of(cur)
            if not kids:
                order.append(cur)
            else:
                stack.extend(reversed(kids))
        for a, b in zip(order, order[1:]):
            self.graph.add_edge(a, b, "next")


def parse_jats(xml: bytes | str, options: IngestOptions | None = None
               ) -> tuple[IntertextualGraph, IngestReport]:
    """Convert one JATS article into a finalized intertextual graph."""
    options = options or IngestOptions()
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise IngestError(f"malformed XML: {exc}") from exc
    _strip_ns(root)
    if root.tag != "article":
        raise IngestError(f"expected <article> root, found <{root.tag}>")
    body = root.find("body")
    if body is None or len(body) == 0:
        raise IngestError("article has an empty body")

    doc = options.doc_id or _flatten(root.find(".//article-meta/article-id")) or "article"
    graph = IntertextualGraph()
    b = _Builder(graph, doc, options)

    title = _flatten(root.find(".//article-meta/title-group/article-title"))
    root_id = b.add(NodeKind.ARTICLE_TITLE, title, node_id=f"{doc}:title")

    abstract = root.find(".//article-meta/abstract")
    if abstract is not None:
        abs_id = b.add(NodeKind.ABSTRACT, parent=root_id, node_id=f"{doc}:abstract")
        paras = abstract.findall(".//p") or []
        if paras:
            for p in paras:
                text, cites = _paragraph_text(p)
                if text:
                    b.add_paragraph(text, abs_id, cites)
        elif _flatten(abstract):
            b.add_paragraph(_flatten(abstract), abs_id)

    for child in body:
        _handle_block(b, child, root_id)

    back = root.find("back")
    if back is not None:
        for ref in back.iter("ref"):
            label = _flatten(ref.find("label"))
            meta = {}
            if label:
                meta["label"] = label
            year = ref.find(".//year")
            if year is not None and _flatten(year):
                meta["year"] = _flatten(year)
            surname = ref.find(".//surname")
            if surname is not None and _flatten(surname):
                meta["first_author"] = _flatten(surname)
            b.add(NodeKind.REFERENCE, _flatten(ref), parent=root_id,
                  meta=meta, stem="ref")

    b.chain_leaves()
    graph.finalize()
    report = IngestReport(
        counts=Counter(n.kind.value for n in graph.nodes_of(doc)),
        warnings=b.warnings,
    )
    report.counts = dict(report.counts)
    return graph, report


_PAYLOAD_KINDS = {
    "fig": (NodeKind.FIGURE, "fig"),
    "table-wrap": (NodeKind.TABLE, "tab"),
    "disp-formula": (NodeKind.EQUATION, "eq"),
}


def _handle_block(b: _Builder, el: ET.Element, parent: str) -> None:
    tag = el.tag
    if tag == "sec":
        title = _flatten(el.find("title"))
        sec_id = b.add(NodeKind.SECTION_TITLE, title, parent=parent, stem="sec")
        for child in el:
            if child.tag != "title":
                _handle_block(b, child, sec_id)
    elif tag == "p":
        text, cites = _paragraph_text(el)
        inner = [c for c in el if c.tag in _PAYLOAD_KINDS or c.tag == "boxed-text"]
        if text:
            b.add_paragraph(text, parent, cites)
        for child in inner:
            _handle_block(b, child, parent)
    elif tag in _PAYLOAD_KINDS:
        kind, stem = _PAYLOAD_KINDS[tag]
        meta = {}
        label = _flatten(el.find("label"))
        if label:
            meta["label"] = label
        caption = _flatten(el.find("caption"))
        if caption:
            meta["caption"] = caption
        b.add(kind, parent=parent, stem=stem, meta=meta,
              payload=ET.tostring(el, encoding="unicode"))
    elif tag == "boxed-text":
        meta = {"box": "true"}
        label = _flatten(el.find("label"))
        if label:
            meta["label"] = label
        b.add(NodeKind.TABLE, parent=parent, stem="box", meta=meta,
              payload=ET.tostring(el, encoding="unicode"))
    elif tag == "list":
        list_id = b.add(NodeKind.LIST, parent=parent, stem="list")
        for item in el.findall("list-item"):
            text = _flatten(item)
            if text:
                b.add(NodeKind.LIST_ITEM, text, parent=list_id, stem="li")
    elif tag in ("title", "label", "caption"):
        pass
    else:
        text = _flatten(el)
        if text:
            b.add_paragraph(text, parent)
            b.warnings.append(f"element <{tag}> treated as paragraph text")
        else:
            b.warnings.append(f"dropped empty/unrecognized element <{tag}>")


def ingest_review(text: str, doc_id: str, *, version: int = 1,
                  templates: list[str] | None = None,
                  options: IngestOptions | None = None
                  ) -> tuple[IntertextualGraph, IngestReport]:
    """Ingest a free-text review: report root, blank-line paragraphs, sentences."""
    options = options or IngestOptions()
    options.doc_id = doc_id
    options.version = version
    cleaned = clean_review(text, templates)
    graph = IntertextualGraph()
    b = _Builder(graph, doc_id, options)
    root_id = b.add(NodeKind.REVIEW_REPORT, node_id=f"{doc_id}:report")
    for block in re.split(r"\n\s*\n", cleaned):
        block = " ".join(block.split())
        if block:
            b.add_paragraph(block, root_id)
    b.chain_leaves()
    graph.finalize()
    return graph, IngestReport(
        counts=dict(Counter(n.kind.value for n in graph.nodes_of(doc_id))),
        warnings=b.warnings,
    )
