"""Suggestion engine for implicit-link annotation.

For one review sentence, paper sentences are ranked by several
similarity methods (lexical BM25, cosine over precomputed vectors) and
the per-method rankings are merged round-robin: each method in turn
contributes its highest-ranked sentence not yet selected, until ``m``
candidates are collected.  Dense encoders are external; vectors arrive
as precomputed tables keyed by node id.  A deterministic hashing
bag-of-words vectorizer is included so the multi-method path works
without any model runtime.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import IntertextualGraph, NodeKind

BM25_K1 = 1.2
BM25_B = 0.75

_TOKEN = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass
class Ranking:
    """Candidates ordered by score descending; ties keep reading order."""
    method: str
    items: list[tuple[str, float]]

    def ids(self) -> list[str]:
        return [nid for nid, _ in self.items]


@dataclass
class SuggestionSet:
    review_sentence: str
    candidates: list[str]
    m: int
    methods: dict[str, list[str]] = field(default_factory=dict)  # candidate -> methods
    method_order: list[str] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "review_sentence": self.review_sentence,
            "m": self.m,
            "candidates": [{"node": c, "methods": self.methods.get(c, [])}
                           for c in self.candidates],
            "method_order": self.method_order,
        }


class EmbeddingError(Exception):
    pass


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        for nid, vec in self.vectors.items():
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (self.dim,):
                raise EmbeddingError(f"vector for {nid} has dimension {vec.shape}, "
                                     f"expected ({self.dim},)")
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"vector for {nid} contains non-finite values")
            self.vectors[nid] = vec

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingTable":
        obj = json.loads(Path(path).read_text("utf-8"))
        return cls(dim=int(obj["dim"]),
                   vectors={k: np.asarray(v, dtype=float)
                            for k, v in obj["vectors"].items()})

    def save(self, path: str | Path) -> None:
        obj = {"dim": self.dim,
               "vectors": {k: [float(x) for x in v] for k, v in self.vectors.items()}}
        Path(path).write_text(json.dumps(obj, ensure_ascii=False, indent=2), "utf-8")


def hashing_vectorizer(text: str, dim: int = 64) -> np.ndarray:
    """Trivial deterministic bag-of-words embedding (token hash buckets)."""
    vec = np.zeros(dim, dtype=float)
    for token in tokenize(text):
        h = int.from_bytes(hashlib.sha1(token.encode("utf-8")).digest()[:4], "big")
        vec[h % dim] += 1.0
    return vec


def embed_graph_sentences(graph: IntertextualGraph, docs: list[str],
                          dim: int = 64) -> EmbeddingTable:
    vectors = {}
    for doc in docs:
        for node in graph.nodes_of(doc, NodeKind.SENTENCE):
            vectors[node.id] = hashing_vectorizer(node.content, dim)
    return EmbeddingTable(dim=dim, vectors=vectors)


# ----------------------------------------------------------------------
# rankers

class Bm25Index:
    """Okapi BM25 over one paper's sentences (k1=1.2, b=0.75).

    idf uses the always-positive variant ln(1 + (N - df + 0.5)/(df + 0.5))
    so scores stay non-negative.
    """

    def __init__(self, graph: IntertextualGraph, paper_doc: str):
        self.candidates = [nid for nid in graph.reading_order(paper_doc)
                           if graph.node(nid).kind is NodeKind.SENTENCE]
        self._tf = [Counter(tokenize(graph.node(nid).content)) for nid in self.candidates]
        self._len = [sum(tf.values()) for tf in self._tf]
        n = len(self.candidates)
        self._avgdl = sum(self._len) / n if n else 0.0
        df: Counter[str] = Counter()
        for tf in self._tf:
            df.update(tf.keys())
        self._idf = {t: math.log(1.0 + (n - d + 0.5) / (d + 0.5)) for t, d in df.items()}

    def scores(self, query: str) -> list[tuple[str, float]]:
        terms = tokenize(query)
        if not terms:
            return []
        out = []
        for nid, tf, dl in zip(self.candidates, self._tf, self._len):
            norm = BM25_K1 * (1.0 - BM25_B + BM25_B * dl / self._avgdl) if self._avgdl else 0.0
            s = 0.0
            for t in terms:
                f = tf.get(t, 0)
                if f:
                    s += self._idf[t] * f * (BM25_K1 + 1.0) / (f + norm)
            out.append((nid, s))
        return out


def _to_ranking(method: str, scored: list[tuple[str, float]]) -> Ranking:
    # stable sort keeps reading order among ties
    return Ranking(method=method, items=sorted(scored, key=lambda kv: -kv[1]))


def bm25_rank(query: str, graph: IntertextualGraph, paper_doc: str,
              index: Bm25Index | None = None) -> Ranking:
    index = index or Bm25Index(graph, paper_doc)
    return _to_ranking("bm25", index.scores(query))


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def cosine_rank(query_vector: np.ndarray, table: EmbeddingTable,
                candidates: list[str] | None = None,
                method: str = "cosine") -> Ranking:
    query_vector = np.asarray(query_vector, dtype=float)
    if query_vector.shape != (table.dim,):
        raise EmbeddingError(f"query vector has dimension {query_vector.shape}, "
                             f"expected ({table.dim},)")
    ids = candidates if candidates is not None else list(table.vectors)
    scored = [(nid, cosine_similarity(query_vector, table.vectors[nid]))
              for nid in ids if nid in table.vectors]
    return _to_ranking(method, scored)


def aggregate_rankings(rankings: list[Ranking], m: int) -> list[tuple[str, str]]:
    """Round-robin merge; returns (node, contributing method) pairs.

    Methods take turns in the given order; each turn contributes the
    method's best not-yet-selected candidate.  Stops at ``m`` picks or
    when every ranking is exhausted.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not rankings:
        raise ValueError("at least one ranking is required")
    cursors = [0] * len(rankings)
    selected: list[tuple[str, str]] = []
    chosen: set[str] = set()
    while len(selected) < m:
        progressed = False
        for i, ranking in enumerate(rankings):
            if len(selected) >= m:
                break
            ids = ranking.ids()
            while cursors[i] < len(ids) and ids[cursors[i]] in chosen:
                cursors[i] += 1
            if cursors[i] < len(ids):
                node = ids[cursors[i]]
                selected.append((node, ranking.method))
                chosen.add(node)
                cursors[i] += 1
                progressed = True
        if not progressed:
            break
    return selected


@dataclass
class SuggestConfig:
    methods: list[str] = field(default_factory=lambda: ["bm25"])
    m: int = 5
    embeddings: dict[str, EmbeddingTable] = field(default_factory=dict)

    def validate(self) -> None:
        if self.m < 1:
            raise ValueError("m must be at least 1")
        for method in self.methods:
            if method != "bm25" and method not in self.embeddings:
                raise EmbeddingError(
                    f"method {method!r} requires an embedding table")


def suggest(graph: IntertextualGraph, review_sentence: str, paper_doc: str,
            config: SuggestConfig | None = None,
            bm25_index: Bm25Index | None = None) -> SuggestionSet:
    """Build the suggestion set for one review sentence."""
    config = config or SuggestConfig()
    config.validate()
    node = graph.node(review_sentence)
    if node.kind is not NodeKind.SENTENCE:
        raise ValueError(f"{review_sentence} is not a sentence node")
    if node.doc == paper_doc:
        raise ValueError("review sentence must come from a different document "
                         "than the paper it is linked to")
    candidates = [nid for nid in graph.reading_order(paper_doc)
                  if graph.node(nid).kind is NodeKind.SENTENCE]
    rankings: list[Ranking] = []
    for method in config.methods:
        if method == "bm25":
            index = bm25_index or Bm25Index(graph, paper_doc)
            rankings.append(bm25_rank(node.content, graph, paper_doc, index))
        else:
            table = config.embeddings[method]
            if review_sentence not in table.vectors:
                raise EmbeddingError(
                    f"no vector for review sentence {review_sentence} "
                    f"in table {method!r}")
            rankings.append(cosine_rank(table.vectors[review_sentence], table,
                                        candidates=candidates, method=method))
    picks = aggregate_rankings(rankings, config.m) if any(r.items for r in rankings) else []
    methods: dict[str, list[str]] = {}
    for nid, method in picks:
        methods.setdefault(nid, []).append(method)
    return SuggestionSet(
        review_sentence=review_sentence,
        candidates=[nid for nid, _ in picks],
        m=config.m,
        methods=methods,
        method_order=list(config.methods),
    )
