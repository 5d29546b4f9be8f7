#!/usr/bin/env python3
"""Build a self-contained demo project from the test fixtures.

Creates <out>/<name>/ with both paper versions, one review, seeded gold
pragmatic labels, dual-annotator link labels, and a project manifest.
The result is servable (itgkit serve) and analyzable (itgkit stats).

Usage: python3 scripts/demo_project.py OUT_DIR [--name demo] [--no-labels]
"""

import argparse
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))
FIXTURES = REPO / "tests" / "fixtures"

from itgkit.graph import serialize                      # noqa: E402
from itgkit.ingest import IngestOptions, ingest_review, parse_jats  # noqa: E402

# hand-assigned gold labels for the fixture review, by sentence id
GOLD_LABELS = {
    "rev1:p1.s1": "Recap",
    "rev1:p1.s2": "Recap",
    "rev1:p2.s1": "Strength",
    "rev1:p2.s2": "Todo",
    "rev1:p2.s3": "Weakness",
    "rev1:p3.s1": "Weakness",
    "rev1:p3.s2": "Todo",
    "rev1:p3.s3": "Recap",
    "rev1:p4.s1": "Weakness",
    "rev1:p4.s2": "Weakness",
    "rev1:p4.s3": "Strength",
}

# dual-annotator implicit link verdicts (review sentence, paper sentence)
LINK_VOTES = [
    ("rev1:p1.s2", "paper1:p3.s1", "linked", "a1"),      # little R expertise
    ("rev1:p1.s2", "paper1:p3.s1", "linked", "a2"),
    ("rev1:p3.s2", "paper1:p4.s2", "linked", "a1"),      # CellProfiler images
    ("rev1:p3.s2", "paper1:p4.s2", "linked", "a2"),
    ("rev1:p2.s2", "paper1:p5.s1", "linked", "a1"),      # annotators disagree
    ("rev1:p2.s2", "paper1:p5.s1", "not-linked", "a2"),
]


def build(out_dir: Path, name: str = "demo", seed_labels: bool = True) -> Path:
    project_dir = out_dir / name
    graphs = project_dir / "graphs"
    graphs.mkdir(parents=True, exist_ok=True)

    v1, _ = parse_jats((FIXTURES / "article_v1.xml").read_bytes(),
                       IngestOptions(doc_id="paper1", version=1))
    v2, _ = parse_jats((FIXTURES / "article_v2.xml").read_bytes(),
                       IngestOptions(doc_id="paper1", version=2))
    rev, _ = ingest_review((FIXTURES / "review1.txt").read_text("utf-8"), "rev1")
    (graphs / "paper_v1.json").write_bytes(serialize(v1))
    (graphs / "paper_v2.json").write_bytes(serialize(v2))
    (graphs / "rev1.json").write_bytes(serialize(rev))

    manifest = {
        "id": name,
        "paper": "paper1",
        "versions": {"1": "graphs/paper_v1.json", "2": "graphs/paper_v2.json"},
        "reviews": {"rev1": "graphs/rev1.json"},
        "annotators": ["a1", "a2", "gold"],
        "suggestion": {"methods": ["bm25"], "m": 5, "embeddings": {}},
    }
    (project_dir / "project.json").write_text(
        json.dumps(manifest, indent=2) + "\n", "utf-8")

    pragmatics = project_dir / "pragmatics.jsonl"
    links = project_dir / "links.jsonl"
    if seed_labels:
        with open(pragmatics, "w", encoding="utf-8") as fh:
            for i, (node, label) in enumerate(GOLD_LABELS.items()):
                fh.write(json.dumps({"node": node, "label": label,
                                     "annotator": "gold", "ts": float(i)}) + "\n")
        with open(links, "w", encoding="utf-8") as fh:
            for i, (review, paper, verdict, annotator) in enumerate(LINK_VOTES):
                fh.write(json.dumps({"review": review, "paper": paper,
                                     "verdict": verdict, "annotator": annotator,
                                     "ts": float(i), "source": "suggested"}) + "\n")
    else:
        pragmatics.touch()
        links.touch()
    return project_dir


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--name", default="demo")
    parser.add_argument("--no-labels", action="store_true")
    args = parser.parse_args()
    path = build(args.out_dir, args.name, seed_labels=not args.no_labels)
    print(f"demo project written to {path}")


if __name__ == "__main__":
    main()
