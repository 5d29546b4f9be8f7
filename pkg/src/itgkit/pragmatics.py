"""Six-class pragmatic tagging of review sentences.

Review statements are classified by communicative purpose: Recap
(neutral summary of the work), Weakness / Strength (negative or positive
evaluation), Todo (requests and questions), Structure (headers the
reviewer added), and the catch-all Other.  Labels attach to sentence
nodes; one live record per (sentence, annotator), later writes win.
Adjudicated gold is stored under the reserved annotator id ``gold``.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .graph import IntertextualGraph, NodeKind

GOLD_ANNOTATOR = "gold"


class PragmaticLabel(str, Enum):
    RECAP = "Recap"
    WEAKNESS = "Weakness"
    STRENGTH = "Strength"
    TODO = "Todo"
    STRUCTURE = "Structure"
    OTHER = "Other"

    @classmethod
    def parse(cls, value: str) -> "PragmaticLabel":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown pragmatic label: {value!r}")


@dataclass
class PragmaticLabelRecord:
    node: str
    label: PragmaticLabel
    annotator: str
    ts: float

    def to_obj(self) -> dict:
        return {"node": self.node, "label": self.label.value,
                "annotator": self.annotator, "ts": self.ts}


class NotASentenceError(Exception):
    pass


class LabelStore:
    """Live view of pragmatic labels with append-superseding semantics.

    If ``path`` is set, every attach appends one JSON line; loading
    folds the log so the latest record per (node, annotator) wins.
    """

    def __init__(self, graph: IntertextualGraph | None = None,
                 path: str | Path | None = None):
        self._graph = graph
        self._path = Path(path) if path else None
        self._records: dict[tuple[str, str], PragmaticLabelRecord] = {}

    def attach(self, node: str, label: PragmaticLabel | str, annotator: str,
               ts: float | None = None) -> PragmaticLabelRecord:
        if isinstance(label, str):
            label = PragmaticLabel.parse(label)
        if self._graph is not None:
            n = self._graph.node(node)
            if n.kind is not NodeKind.SENTENCE:
                raise NotASentenceError(
                    f"pragmatic labels attach to sentences, not {n.kind.value}")
        record = PragmaticLabelRecord(node=node, label=label, annotator=annotator,
                                      ts=time.time() if ts is None else ts)
        self._records[(node, annotator)] = record
        if self._path is not None:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_obj(), ensure_ascii=False) + "\n")
        return record

    def records(self, annotator: str | None = None) -> list[PragmaticLabelRecord]:
        recs = self._records.values()
        if annotator is not None:
            recs = (r for r in recs if r.annotator == annotator)
        return list(recs)

    def annotators(self) -> list[str]:
        return sorted({r.annotator for r in self._records.values()})

    def get(self, node: str, annotator: str) -> PragmaticLabelRecord | None:
        return self._records.get((node, annotator))

    def __len__(self) -> int:
        return len(self._records)

    @classmethod
    def load(cls, path: str | Path, graph: IntertextualGraph | None = None,
             append_to: bool = True) -> "LabelStore":
        store = cls(graph, path=path if append_to else None)
        for obj in iter_jsonl(path):
            record = PragmaticLabelRecord(
                node=obj["node"], label=PragmaticLabel.parse(obj["label"]),
                annotator=obj["annotator"], ts=float(obj.get("ts", 0.0)))
            store._records[(record.node, record.annotator)] = record
        return store


def iter_jsonl(path: str | Path):
    """Yield JSON objects per line; a truncated final line is ignored."""
    path = Path(path)
    if not path.exists():
        return
    lines = path.read_text("utf-8").split("\n")
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError:
            if i >= len(lines) - 2:  # last (possibly unterminated) record
                return
            raise


def attach_label(store: LabelStore, node: str, label: PragmaticLabel | str,
                 annotator: str) -> PragmaticLabelRecord:
    return store.attach(node, label, annotator)


def label_distribution(records: list[PragmaticLabelRecord],
                       annotator: str | None = None) -> dict[PragmaticLabel, float]:
    """Proportion of each class over the given records; sums to 1."""
    if annotator is not None:
        records = [r for r in records if r.annotator == annotator]
    if not records:
        raise ValueError("label distribution of an empty record set is undefined")
    total = len(records)
    return {label: sum(1 for r in records if r.label is label) / total
            for label in PragmaticLabel}
