"""Intertextual graph data model.

A graph holds one or more documents as typed nodes connected by three
edge kinds:

* ``parent`` edges mirror the logical hierarchy of a document (sentence
  under paragraph under section, rooted at a single document root),
* ``next`` edges chain the leaf content nodes in reading order,
* ``link`` edges carry intertextual relations and may cross documents.

Graphs are build-then-read: a single writer constructs the graph, calls
:meth:`IntertextualGraph.finalize`, and from then on the document
structure is frozen.  Link edges remain addable after finalization so
annotation layers (explicit links, alignments) can accrete on frozen
documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum


class NodeKind(str, Enum):
    ARTICLE_TITLE = "article-title"
    ABSTRACT = "abstract"
    SECTION_TITLE = "section-title"
    PARAGRAPH = "paragraph"
    SENTENCE = "sentence"
    FIGURE = "figure"
    TABLE = "table"
    EQUATION = "equation"
    LIST = "list"
    LIST_ITEM = "list-item"
    REFERENCE = "reference"
    REVIEW_REPORT = "review-report"


class EdgeKind(str, Enum):
    NEXT = "next"
    PARENT = "parent"
    LINK = "link"


class LinkSubtype(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"
    VERSION_ALIGNMENT = "version-alignment"
    DERIVED = "derived"


class GraphError(Exception):
    """Base class for graph construction and validation errors."""


class DuplicateIdError(GraphError):
    pass


class UnknownDocumentError(GraphError):
    pass


class UnknownNodeError(GraphError):
    pass


class InvariantViolation(GraphError):
    pass


class BrokenChainError(GraphError):
    pass


class GraphFinalizedError(GraphError):
    pass


class SerializationError(GraphError):
    """Raised for malformed graph JSON; message carries position info."""


@dataclass
class Node:
    id: str
    doc: str
    kind: NodeKind
    content: str = ""
    payload: str | None = None
    meta: dict[str, str] = field(default_factory=dict)


@dataclass
class Edge:
    id: str
    src: str
    dst: str
    kind: EdgeKind
    subtype: LinkSubtype | None = None
    provenance: str | None = None


@dataclass
class Document:
    id: str
    version: int
    root: str


def _coerce(value, enum_cls, what: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError:
        raise GraphError(f"unknown {what}: {value!r}") from None


class IntertextualGraph:
    """Mutable-until-finalized store of documents, nodes and edges."""

    def __init__(self) -> None:
        self._documents: dict[str, Document] = {}
        self._nodes: dict[str, Node] = {}
        self._edges: dict[str, Edge] = {}
        # structural indexes, maintained on every insert
        self._parent_edge: dict[str, str] = {}    # child node -> parent edge id
        self._children: dict[str, list[str]] = {}  # parent node -> child ids
        self._next_out: dict[str, str] = {}        # node -> outgoing next edge id
        self._next_in: dict[str, str] = {}         # node -> incoming next edge id
        self._links_out: dict[str, list[str]] = {}
        self._links_in: dict[str, list[str]] = {}
        self._node_seq = 0
        self._edge_seq = 0
        self._finalized = False

    # ------------------------------------------------------------------
    # construction

    def add_node(
        self,
        doc: str,
        kind: NodeKind | str,
        content: str = "",
        *,
        payload: str | None = None,
        meta: dict[str, str] | None = None,
        node_id: str | None = None,
        root: bool = False,
        version: int = 1,
    ) -> str:
        """Add a node; pass ``root=True`` to declare a new document.

        The first node of a document is its root.  Sentence nodes must
        carry non-empty content.
        """
        if self._finalized:
            raise GraphFinalizedError("graph is finalized")
        kind = _coerce(kind, NodeKind, "node kind")
        if node_id is None:
            node_id = self._fresh_node_id()
        elif node_id in self._nodes:
            raise DuplicateIdError(f"duplicate node id: {node_id}")
        if kind is NodeKind.SENTENCE and not content.strip():
            raise InvariantViolation("sentence nodes require non-empty content")
        if root:
            if doc in self._documents:
                raise DuplicateIdError(f"document already exists: {doc}")
            self._documents[doc] = Document(id=doc, version=version, root=node_id)
        elif doc not in self._documents:
            raise UnknownDocumentError(f"unknown document: {doc}")
        self._nodes[node_id] = Node(
            id=node_id, doc=doc, kind=kind, content=content,
            payload=payload, meta=dict(meta or {}),
        )
        return node_id

    def add_edge(
        self,
        src: str,
        dst: str,
        kind: EdgeKind | str,
        *,
        subtype: LinkSubtype | str | None = None,
        provenance: str | None = None,
        edge_id: str | None = None,
    ) -> str:
        """Add an edge, rejecting insertions that would break invariants.

        ``parent``: one parent per node, acyclic, same document.
        ``next``: out-degree and in-degree at most one, acyclic, same
        document.  ``link``: unrestricted, may cross documents.
        """
        kind = _coerce(kind, EdgeKind, "edge kind")
        if self._finalized and kind is not EdgeKind.LINK:
            raise GraphFinalizedError("structural edges cannot be added after finalization")
        if subtype is not None:
            subtype = _coerce(subtype, LinkSubtype, "link subtype")
        for n in (src, dst):
            if n not in self._nodes:
                raise UnknownNodeError(f"unknown node: {n}")
        if src == dst:
            raise InvariantViolation("self-loop edges are not allowed")
        if edge_id is None:
            edge_id = self._fresh_edge_id()
        elif edge_id in self._edges:
            raise DuplicateIdError(f"duplicate edge id: {edge_id}")

        if kind is EdgeKind.PARENT:
            self._check_same_doc(src, dst, "parent")
            if src in self._parent_edge:
                raise InvariantViolation(f"multiple parents for node {src}")
            if self._would_cycle_parent(src, dst):
                raise InvariantViolation("parent edge would create a cycle")
        elif kind is EdgeKind.NEXT:
            self._check_same_doc(src, dst, "next")
            if src in self._next_out:
                raise InvariantViolation(f"reading-order branch at node {src}")
            if dst in self._next_in:
                raise InvariantViolation(f"reading-order branch into node {dst}")
            if self._would_cycle_next(src, dst):
                raise InvariantViolation("next edge would create a cycle")

        edge = Edge(id=edge_id, src=src, dst=dst, kind=kind,
                    subtype=subtype, provenance=provenance)
        self._edges[edge_id] = edge
        if kind is EdgeKind.PARENT:
            self._parent_edge[src] = edge_id
            self._children.setdefault(dst, []).append(src)
        elif kind is EdgeKind.NEXT:
            self._next_out[src] = edge_id
            self._next_in[dst] = edge_id
        else:
            self._links_out.setdefault(src, []).append(edge_id)
            self._links_in.setdefault(dst, []).append(edge_id)
        return edge_id

    def _check_same_doc(self, src: str, dst: str, kind: str) -> None:
        if self._nodes[src].doc != self._nodes[dst].doc:
            raise InvariantViolation(f"{kind} edges may not cross document boundaries")

    def _would_cycle_parent(self, src: str, dst: str) -> bool:
        cur: str | None = dst
        while cur is not None:
            if cur == src:
                return True
            cur = self.parent_of(cur)
        return False

    def _would_cycle_next(self, src: str, dst: str) -> bool:
        cur: str | None = dst
        while cur is not None:
            if cur == src:
                return True
            eid = self._next_out.get(cur)
            cur = self._edges[eid].dst if eid else None
        return False

    def _fresh_node_id(self) -> str:
        while True:
            self._node_seq += 1
            cand = f"n{self._node_seq}"
            if cand not in self._nodes:
                return cand

    def _fresh_edge_id(self) -> str:
        while True:
            self._edge_seq += 1
            cand = f"e{self._edge_seq}"
            if cand not in self._edges:
                return cand

    # ------------------------------------------------------------------
    # access

    @property
    def documents(self) -> list[Document]:
        return list(self._documents.values())

    def document(self, doc: str) -> Document:
        if doc not in self._documents:
            raise UnknownDocumentError(f"unknown document: {doc}")
        return self._documents[doc]

    def has_document(self, doc: str) -> bool:
        return doc in self._documents

    def node(self, node_id: str) -> Node:
        if node_id not in self._nodes:
            raise UnknownNodeError(f"unknown node: {node_id}")
        return self._nodes[node_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def edge(self, edge_id: str) -> Edge:
        if edge_id not in self._edges:
            raise GraphError(f"unknown edge: {edge_id}")
        return self._edges[edge_id]

    @property
    def nodes(self) -> list[Node]:
        return list(self._nodes.values())

    @property
    def edges(self) -> list[Edge]:
        return list(self._edges.values())

    def nodes_of(self, doc: str, kind: NodeKind | str | None = None) -> list[Node]:
        """Nodes of one document in insertion (document) order."""
        if kind is not None:
            kind = _coerce(kind, NodeKind, "node kind")
        return [n for n in self._nodes.values()
                if n.doc == doc and (kind is None or n.kind == kind)]

    def parent_of(self, node_id: str) -> str | None:
        eid = self._parent_edge.get(node_id)
        return self._edges[eid].dst if eid else None

    def children_of(self, node_id: str) -> list[str]:
        return list(self._children.get(node_id, ()))

    def is_leaf(self, node_id: str) -> bool:
        return node_id not in self._children

    def leaves(self, doc: str) -> list[str]:
        self.document(doc)
        return [n.id for n in self._nodes.values()
                if n.doc == doc and self.is_leaf(n.id)]

    def links_from(self, node_id: str) -> list[Edge]:
        return [self._edges[e] for e in self._links_out.get(node_id, ())]

    def links_to(self, node_id: str) -> list[Edge]:
        return [self._edges[e] for e in self._links_in.get(node_id, ())]

    # ------------------------------------------------------------------
    # traversal

    def reading_order(self, doc: str) -> list[str]:
        """The unique next-edge path over the document's leaf nodes."""
        leaves = self.leaves(doc)
        if not leaves:
            return []
        if len(leaves) == 1 and leaves[0] not in self._next_out and leaves[0] not in self._next_in:
            return leaves
        heads = [n for n in leaves if n not in self._next_in]
        if len(heads) != 1:
            raise BrokenChainError(
                f"document {doc}: expected a single reading-order head, found {len(heads)}")
        order: list[str] = []
        seen: set[str] = set()
        cur: str | None = heads[0]
        leaf_set = set(leaves)
        while cur is not None:
            if cur in seen:
                raise BrokenChainError(f"document {doc}: reading order revisits {cur}")
            if cur not in leaf_set:
                raise BrokenChainError(f"document {doc}: reading order touches non-leaf {cur}")
            order.append(cur)
            seen.add(cur)
            eid = self._next_out.get(cur)
            cur = self._edges[eid].dst if eid else None
        if len(order) != len(leaves):
            raise BrokenChainError(
                f"document {doc}: reading order covers {len(order)} of {len(leaves)} leaves")
        return order

    def ancestor_at(self, node_id: str, kind: NodeKind | str) -> str | None:
        """Nearest ancestor of the given kind, the node itself included."""
        kind = _coerce(kind, NodeKind, "node kind")
        cur: str | None = node_id
        self.node(node_id)
        while cur is not None:
            if self._nodes[cur].kind == kind:
                return cur
            cur = self.parent_of(cur)
        return None

    def structure_order(self, doc: str, kind: NodeKind | str | None = None) -> list[str]:
        """Depth-first pre-order over the parent tree, children in insertion order."""
        if kind is not None:
            kind = _coerce(kind, NodeKind, "node kind")
        root = self.document(doc).root
        out: list[str] = []
        stack = [root]
        while stack:
            cur = stack.pop()
            if kind is None or self._nodes[cur].kind == kind:
                out.append(cur)
            stack.extend(reversed(self.children_of(cur)))
        return out

    def propagate_links(self, target_kind: NodeKind | str) -> list[Edge]:
        """Lift link edges to the requested granularity.

        Every link edge whose destination has a strict ancestor of
        ``target_kind`` yields one ``derived`` edge from the same source
        to that ancestor; links already at (or without) that granularity
        pass through unchanged.  Duplicates collapse, originals are left
        untouched, and repeated calls add nothing new.
        """
        target_kind = _coerce(target_kind, NodeKind, "node kind")
        existing_derived: dict[tuple[str, str], Edge] = {
            (e.src, e.dst): e for e in self._edges.values()
            if e.kind is EdgeKind.LINK and e.subtype is LinkSubtype.DERIVED
        }
        out: list[Edge] = []
        seen: set[tuple[str, str]] = set()
        for e in list(self._edges.values()):
            if e.kind is not EdgeKind.LINK or e.subtype is LinkSubtype.DERIVED:
                continue
            anc = self.ancestor_at(e.dst, target_kind)
            if anc is not None and anc != e.dst:
                key = (e.src, anc)
                if key in seen:
                    continue
                seen.add(key)
                if key in existing_derived:
                    out.append(existing_derived[key])
                else:
                    eid = self.add_edge(e.src, anc, EdgeKind.LINK,
                                        subtype=LinkSubtype.DERIVED,
                                        provenance=f"derived:{e.id}")
                    derived = self._edges[eid]
                    existing_derived[key] = derived
                    out.append(derived)
            else:
                key = (e.src, e.dst)
                if key in seen:
                    continue
                seen.add(key)
                out.append(e)
        return out

    # ------------------------------------------------------------------
    # validation / finalization

    def validate(self) -> list[str]:
        """Full-graph invariant check; returns violation messages."""
        problems: list[str] = []
        for doc in self._documents.values():
            members = [n for n in self._nodes.values() if n.doc == doc.id]
            if doc.root not in self._nodes:
                problems.append(f"document {doc.id}: missing root node {doc.root}")
                continue
            if self.parent_of(doc.root) is not None:
                problems.append(f"document {doc.id}: root {doc.root} has a parent")
            for n in members:
                if n.id == doc.root:
                    continue
                cur: str | None = n.id
                hops = 0
                while cur is not None and cur != doc.root:
                    cur = self.parent_of(cur)
                    hops += 1
                    if hops > len(members):
                        cur = None
                if cur != doc.root:
                    problems.append(f"document {doc.id}: node {n.id} is not rooted")
            try:
                self.reading_order(doc.id)
            except BrokenChainError as exc:
                problems.append(str(exc))
        for n in self._nodes.values():
            if n.kind is NodeKind.SENTENCE and not n.content.strip():
                problems.append(f"sentence node {n.id} has empty content")
        return problems

    def finalize(self) -> "IntertextualGraph":
        problems = self.validate()
        if problems:
            raise InvariantViolation("; ".join(problems))
        self._finalized = True
        return self

    @property
    def finalized(self) -> bool:
        return self._finalized

    # ------------------------------------------------------------------
    # (de)serialization

    def to_obj(self) -> dict:
        nodes = []
        for n in self._nodes.values():
            item: dict = {"id": n.id, "doc": n.doc, "kind": n.kind.value,
                          "content": n.content, "meta": n.meta}
            if n.payload is not None:
                item["payload"] = n.payload
            nodes.append(item)
        edges = []
        for e in self._edges.values():
            item = {"id": e.id, "src": e.src, "dst": e.dst, "kind": e.kind.value}
            if e.subtype is not None:
                item["subtype"] = e.subtype.value
            if e.provenance is not None:
                item["provenance"] = e.provenance
            edges.append(item)
        return {
            "documents": [{"id": d.id, "version": d.version} for d in self._documents.values()],
            "nodes": nodes,
            "edges": edges,
        }


def serialize(graph: IntertextualGraph) -> bytes:
    return json.dumps(graph.to_obj(), ensure_ascii=False, indent=2).encode("utf-8")


def _require(obj: dict, key: str, types, where: str):
    if key not in obj:
        raise SerializationError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, types):
        raise SerializationError(f"{where}: key {key!r} has wrong type {type(val).__name__}")
    return val


def deserialize(data: bytes | str) -> IntertextualGraph:
    """Parse graph JSON; malformed input raises SerializationError with position."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SerializationError(f"not valid UTF-8 at byte {exc.start}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SerializationError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise SerializationError("top level: expected a JSON object")
    docs = _require(obj, "documents", list, "top level")
    nodes = _require(obj, "nodes", list, "top level")
    edges = _require(obj, "edges", list, "top level")

    graph = IntertextualGraph()
    versions: dict[str, int] = {}
    for i, d in enumerate(docs):
        if not isinstance(d, dict):
            raise SerializationError(f"documents[{i}]: expected an object")
        did = _require(d, "id", str, f"documents[{i}]")
        versions[did] = _require(d, "version", int, f"documents[{i}]")
    seen_docs: set[str] = set()
    for i, n in enumerate(nodes):
        if not isinstance(n, dict):
            raise SerializationError(f"nodes[{i}]: expected an object")
        where = f"nodes[{i}]"
        nid = _require(n, "id", str, where)
        doc = _require(n, "doc", str, where)
        kind = _require(n, "kind", str, where)
        content = _require(n, "content", str, where)
        meta = n.get("meta", {})
        if not isinstance(meta, dict):
            raise SerializationError(f"{where}: key 'meta' has wrong type")
        payload = n.get("payload")
        if payload is not None and not isinstance(payload, str):
            raise SerializationError(f"{where}: key 'payload' has wrong type")
        if doc not in versions:
            raise SerializationError(f"{where}: node references undeclared document {doc!r}")
        try:
            graph.add_node(doc, kind, content, payload=payload, meta=meta,
                           node_id=nid, root=doc not in seen_docs,
                           version=versions[doc])
        except GraphError as exc:
            raise SerializationError(f"{where}: {exc}") from exc
        seen_docs.add(doc)
    for i, e in enumerate(edges):
        if not isinstance(e, dict):
            raise SerializationError(f"edges[{i}]: expected an object")
        where = f"edges[{i}]"
        try:
            graph.add_edge(
                _require(e, "src", str, where),
                _require(e, "dst", str, where),
                _require(e, "kind", str, where),
                subtype=e.get("subtype"),
                provenance=e.get("provenance"),
                edge_id=_require(e, "id", str, where),
            )
        except GraphError as exc:
            raise SerializationError(f"{where}: {exc}") from exc
    return graph


def structurally_equal(a: IntertextualGraph, b: IntertextualGraph) -> bool:
    """Identity up to structure: same documents, nodes and edges by id."""
    return a.to_obj() == b.to_obj()


def merge(*graphs: IntertextualGraph) -> IntertextualGraph:
    """Combine graphs with disjoint documents into one joint graph.

    Node ids must not collide; edge ids are reassigned.
    """
    joint = IntertextualGraph()
    for g in graphs:
        for doc in g.documents:
            if joint.has_document(doc.id):
                raise GraphError(f"duplicate document across graphs: {doc.id}")
            for n in g.nodes_of(doc.id):
                if joint.has_node(n.id):
                    raise GraphError(f"duplicate node id across graphs: {n.id}")
                joint.add_node(n.doc, n.kind, n.content, payload=n.payload,
                               meta=n.meta, node_id=n.id,
                               root=n.id == doc.root, version=doc.version)
        for e in g.edges:
            joint.add_edge(e.src, e.dst, e.kind, subtype=e.subtype,
                           provenance=e.provenance)
    return joint
