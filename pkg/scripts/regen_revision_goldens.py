#!/usr/bin/env python3
"""Regenerate the revision-pair alignment goldens under tests/fixtures/revisions/.

Five pairs cover the common revision shapes: untouched resubmission,
incremental growth, section deletion, paragraph reordering, and a heavy
rewrite.  Outputs (old/new graph JSON plus one golden alignment per
metric) are committed after a manual review of every pairing, so this
script only needs to run again if the alignment output format changes.
"""

import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from itgkit.align import AlignmentProblem, align_versions         # noqa: E402
from itgkit.graph import IntertextualGraph, serialize             # noqa: E402
from itgkit.project import canonical_json_bytes                   # noqa: E402

OUT = REPO / "tests" / "fixtures" / "revisions"


def build(doc, version, sections):
    g = IntertextualGraph()
    g.add_node(doc, "article-title", f"{doc} title", node_id=f"{doc}.v{version}:t",
               root=True, version=version)
    leaves = []
    for s, (title, paragraphs) in enumerate(sections, start=1):
        sid = f"{doc}.v{version}:sec{s}"
        g.add_node(doc, "section-title", title, node_id=sid)
        g.add_edge(sid, f"{doc}.v{version}:t", "parent")
        for p, text in enumerate(paragraphs, start=1):
            pid = f"{sid}.p{p}"
            g.add_node(doc, "paragraph", text, node_id=pid)
            g.add_edge(pid, sid, "parent")
            leaves.append(pid)
    for a, b in zip(leaves, leaves[1:]):
        g.add_edge(a, b, "next")
    return g


BASE = [
    ("Introduction", [
        "Wearable sensors promise continuous monitoring of gait in daily life, "
        "but validation against laboratory systems remains scarce.",
        "We compare a low-cost inertial unit against an optical motion capture "
        "system in twenty healthy adults.",
    ]),
    ("Methods", [
        "Participants walked on a treadmill at three speeds while wearing the "
        "sensor on the lower back.",
        "Stride segmentation used a peak-detection algorithm on the vertical "
        "acceleration signal.",
        "Agreement was quantified with Bland-Altman limits and intraclass "
        "correlation coefficients.",
    ]),
    ("Results", [
        "Stride time estimates differed from the optical system by less than "
        "twelve milliseconds on average.",
        "Agreement degraded at the slowest walking speed, where heel strikes "
        "produce weaker acceleration peaks.",
    ]),
    ("Discussion", [
        "The sensor is adequate for stride timing in healthy gait but should "
        "be used with caution at very slow speeds.",
        "Future work should include clinical populations with irregular gait "
        "patterns.",
    ]),
]


def pairs():
    # pair1: untouched resubmission
    yield "pair1_identity", BASE, BASE

    # pair2: incremental growth with small edits
    grown = [
        ("Introduction", [
            BASE[0][1][0],
            "We compare a low-cost inertial unit against an optical motion "
            "capture reference in twenty healthy adults.",
        ]),
        ("Methods", [
            BASE[1][1][0],
            BASE[1][1][1],
            BASE[1][1][2],
            "A sensitivity analysis over the peak-detection threshold is now "
            "included to address reviewer concerns.",
        ]),
        ("Results", [
            BASE[2][1][0],
            BASE[2][1][1],
            "The sensitivity analysis shows that results hold across a wide "
            "threshold range.",
        ]),
        ("Discussion", list(BASE[3][1])),
    ]
    yield "pair2_growth", BASE, grown

    # pair3: a section deleted, one paragraph modified
    trimmed = [
        ("Introduction", list(BASE[0][1])),
        ("Methods", [
            BASE[1][1][0],
            "Stride segmentation used a refined peak-detection algorithm on "
            "the vertical acceleration signal.",
            BASE[1][1][2],
        ]),
        ("Discussion", list(BASE[3][1])),
    ]
    yield "pair3_deleted_section", BASE, trimmed

    # pair4: paragraphs reordered within and across sections
    reordered = [
        ("Introduction", [BASE[0][1][1], BASE[0][1][0]]),
        ("Methods", [BASE[1][1][2], BASE[1][1][0], BASE[1][1][1]]),
        ("Results", list(BASE[2][1])),
        ("Discussion", [BASE[3][1][1], BASE[3][1][0]]),
    ]
    yield "pair4_reordered", BASE, reordered

    # pair5: heavy rewrite, most paragraphs replaced
    rewritten = [
        ("Introduction", [
            "Continuous gait monitoring outside the laboratory requires "
            "affordable sensing hardware with validated accuracy.",
            BASE[0][1][1],
        ]),
        ("Methods", [
            "Twenty adults completed treadmill trials at three belt speeds "
            "with the unit fixed over the sacrum.",
            "Strides were segmented with an adaptive threshold detector "
            "operating on the vertical axis.",
        ]),
        ("Results", [
            "Average stride-time error stayed below twelve milliseconds "
            "across conditions.",
        ]),
        ("Discussion", [
            "We conclude that consumer-grade inertial units can time strides "
            "reliably in healthy gait.",
        ]),
    ]
    yield "pair5_rewrite", BASE, rewritten


def main() -> None:
    for name, old_secs, new_secs in pairs():
        pair_dir = OUT / name
        pair_dir.mkdir(parents=True, exist_ok=True)
        doc = name.split("_")[0]
        old = build(doc, 1, old_secs)
        new = build(doc, 2, new_secs)
        (pair_dir / "old.json").write_bytes(serialize(old))
        (pair_dir / "new.json").write_bytes(serialize(new))
        for metric in ("levenshtein-ratio", "word-overlap"):
            result = align_versions(AlignmentProblem.from_graphs(new, old, metric))
            out = pair_dir / f"golden.{metric}.json"
            out.write_bytes(canonical_json_bytes(result.to_obj()))
        print(f"{name}: regenerated")


if __name__ == "__main__":
    main()
