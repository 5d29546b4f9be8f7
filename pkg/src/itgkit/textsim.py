"""String similarity primitives shared by alignment and anchor resolution."""

from __future__ import annotations

import re
import warnings


class EmptyTextWarning(UserWarning):
    """Similarity of two empty inputs is defined as 1.0 and flagged."""


def levenshtein_distance(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_ratio(a: str, b: str) -> float:
    """1 - dist/max(len); identical empties score 1.0 with a warning."""
    if not a and not b:
        warnings.warn("similarity of two empty strings defined as 1.0",
                      EmptyTextWarning, stacklevel=2)
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


def word_overlap(a: str, b: str) -> float:
    """Jaccard overlap of lowercased whitespace token sets."""
    ta, tb = set(a.lower().split()), set(b.lower().split())
    if not ta and not tb:
        warnings.warn("similarity of two token-empty strings defined as 1.0",
                      EmptyTextWarning, stacklevel=2)
        return 1.0
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def semiglobal_similarity(needle: str, hay: str) -> float:
    """Substring-tolerant edit similarity of ``needle`` against ``hay``.

    Leading and trailing characters of ``hay`` are skippable for free;
    the best-window edit distance is normalized by the needle length, so
    a verbatim excerpt scores 1.0 regardless of how long ``hay`` is.
    """
    if not needle:
        return 1.0
    if not hay:
        return 0.0
    prev = [0] * (len(hay) + 1)  # free prefix skip
    for i, cn in enumerate(needle, start=1):
        cur = [i]
        for j, ch in enumerate(hay, start=1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (cn != ch)))
        prev = cur
    best = min(prev)  # free suffix skip
    return max(0.0, 1.0 - best / len(needle))


_PUNCT = re.compile(r"[^\w\s]+", re.UNICODE)
_STOPWORDS = frozenset({"the", "a", "an", "of", "and", "or", "for", "in", "on", "to"})


def fold_title(text: str, drop_stopwords: bool = True) -> str:
    """Casefold, strip punctuation, collapse whitespace, drop stopwords."""
    folded = _PUNCT.sub(" ", text.casefold())
    tokens = folded.split()
    if drop_stopwords:
        kept = [t for t in tokens if t not in _STOPWORDS]
        if kept:
            tokens = kept
    return " ".join(tokens)
