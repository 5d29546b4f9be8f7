"""Agreement and evaluation metrics.

Krippendorff's alpha is computed on the coincidence matrix so that
missing values are handled naturally: every item with at least two
values contributes each ordered value pair with weight 1/(m_u - 1).
With nominal distance (0 iff equal, else 1):

    D_o = sum_{c != k} o_ck / n
    D_e = sum_{c != k} n_c * n_k / (n * (n - 1))
    alpha = 1 - D_o / D_e
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence


class DegenerateDataWarning(UserWarning):
    """Metric value is defined by convention, not by the data."""


@dataclass
class ReliabilityData:
    """Items-by-annotators matrix of optional categorical values."""
    values: list[list[Hashable | None]]
    annotators: list[str] | None = None

    def __post_init__(self) -> None:
        widths = {len(row) for row in self.values}
        if len(widths) > 1:
            raise ValueError("all items must cover the same annotator columns")
        ncols = widths.pop() if widths else 0
        if ncols < 2:
            raise ValueError("reliability data needs at least 2 annotators")
        if not any(sum(v is not None for v in row) >= 2 for row in self.values):
            raise ValueError("reliability data needs at least one item with 2+ values")
        if self.annotators is not None and len(self.annotators) != ncols:
            raise ValueError("annotator names do not match column count")


def krippendorff_alpha(data: ReliabilityData | Sequence[Sequence[Hashable | None]],
                       metric: str = "nominal") -> float:
    """Chance-corrected agreement; 1.0 is perfect, 0 is chance level.

    Items with fewer than two values are excluded.  If the expected
    disagreement is zero (every pairable value identical) the result is
    1.0 by convention and a DegenerateDataWarning is emitted.
    """
    if metric != "nominal":
        raise ValueError(f"unsupported metric: {metric!r} (only 'nominal')")
    if not isinstance(data, ReliabilityData):
        data = ReliabilityData([list(row) for row in data])

    pair_disagreement = 0.0   # sum_{c != k} o_ck
    totals: Counter[Hashable] = Counter()   # n_c
    n = 0.0
    for row in data.values:
        vals = [v for v in row if v is not None]
        m = len(vals)
        if m < 2:
            continue
        w = 1.0 / (m - 1)
        counts = Counter(vals)
        for c, cnt in counts.items():
            totals[c] += cnt
            # ordered pairs within the item: cnt * (m - cnt) disagree
            pair_disagreement += w * cnt * (m - cnt)
        n += m
    d_o = pair_disagreement / n
    d_e = (n * n - sum(v * v for v in totals.values())) / (n * (n - 1))
    if d_e == 0.0:
        warnings.warn("zero expected disagreement; alpha defined as 1.0",
                      DegenerateDataWarning, stacklevel=2)
        return 1.0
    return 1.0 - d_o / d_e


def reliability_from_labels(records: Iterable[tuple[str, str, Hashable]]
                            ) -> ReliabilityData:
    """Build an items-by-annotators matrix from (item, annotator, value) triples."""
    annotators = sorted({a for _, a, _ in records})
    by_item: dict[str, dict[str, Hashable]] = {}
    for item, annotator, value in records:
        by_item.setdefault(item, {})[annotator] = value
    rows = [[cells.get(a) for a in annotators] for _, cells in sorted(by_item.items())]
    return ReliabilityData(rows, annotators=annotators)


@dataclass
class PRF:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    degenerate: bool = False

    def to_obj(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1,
                "tp": self.tp, "fp": self.fp, "fn": self.fn,
                "degenerate": self.degenerate}


def prf(predicted: Iterable[Hashable], gold: Iterable[Hashable]) -> PRF:
    """Set-based precision/recall/F1 over comparable items."""
    pred, ref = set(predicted), set(gold)
    tp = len(pred & ref)
    fp = len(pred - ref)
    fn = len(ref - pred)
    if not pred and not ref:
        warnings.warn("both sets empty; P/R/F1 defined as 1.0",
                      DegenerateDataWarning, stacklevel=2)
        return PRF(1.0, 1.0, 1.0, 0, 0, 0, degenerate=True)
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return PRF(precision, recall, f1, tp, fp, fn)
