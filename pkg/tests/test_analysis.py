import pytest

from itgkit.align import AlignmentEdge, AlignmentResult
from itgkit.analysis import (
    JointBundle,
    MissingLayerError,
    SectionGroup,
    add_implicit_edges,
    change_given_links,
    linking_rate_by_pragmatics,
    links_per_section,
    normalize_section_title,
    stats_csv_rows,
    stats_report,
)
from itgkit.graph import IntertextualGraph, LinkSubtype, merge
from itgkit.pragmatics import LabelStore


class TestNormalizeSectionTitle:
    def test_keyword_mapping(self):
        assert normalize_section_title("Materials and Methods") is SectionGroup.METHODS

    def test_exact(self):
        assert normalize_section_title("Discussion") is SectionGroup.DISCUSSION
        assert normalize_section_title("Conclusions") is SectionGroup.CONCLUSIONS

    def test_fallback_other(self):
        assert normalize_section_title("Supplementary stuff") is SectionGroup.OTHER

    def test_folding(self):
        assert normalize_section_title("RESULTS:") is SectionGroup.RESULTS
        assert normalize_section_title("3. Methods") is SectionGroup.METHODS


def build_paper():
    g = IntertextualGraph()
    g.add_node("pp", "article-title", "T", node_id="pp:t", root=True)
    leaves = []
    for s, title in enumerate(["Methods", "Results"], start=1):
        sid = f"pp:sec{s}"
        g.add_node("pp", "section-title", title, node_id=sid)
        g.add_edge(sid, "pp:t", "parent")
        for p in range(1, 3 if s == 1 else 2):
            pid = f"{sid}.p{p}"
            g.add_node("pp", "paragraph", f"paragraph {s}.{p} text", node_id=pid)
            g.add_edge(pid, sid, "parent")
            nid = f"{pid}.s1"
            g.add_node("pp", "sentence", f"sentence in {s}.{p}.", node_id=nid)
            g.add_edge(nid, pid, "parent")
            leaves.append(nid)
    for a, b in zip(leaves, leaves[1:]):
        g.add_edge(a, b, "next")
    return g


def build_review():
    g = IntertextualGraph()
    g.add_node("rv", "review-report", "", node_id="rv:r", root=True)
    g.add_node("rv", "paragraph", "r", node_id="rv:p")
    g.add_edge("rv:p", "rv:r", "parent")
    for i in range(1, 4):
        g.add_node("rv", "sentence", f"review sentence {i}.", node_id=f"rv:s{i}")
        g.add_edge(f"rv:s{i}", "rv:p", "parent")
    g.add_edge("rv:s1", "rv:s2", "next")
    g.add_edge("rv:s2", "rv:s3", "next")
    return g


def fabricated_alignment(deleted, modified_old):
    return AlignmentResult(
        edges=[AlignmentEdge(new=f"v2:{o}", old=o, score=0.9) for o in modified_old],
        added=[], deleted=list(deleted),
        modified=[AlignmentEdge(new=f"v2:{o}", old=o, score=0.9) for o in modified_old],
        unchanged=[], objective=0.0, metric="levenshtein-ratio", threshold=0.3,
        document="pp", new_version=2, old_version=1)


@pytest.fixture()
def bundle():
    joint = merge(build_paper(), build_review())
    joint.add_edge("rv:s1", "pp:sec1.p1.s1", "link", subtype=LinkSubtype.EXPLICIT)
    joint.add_edge("rv:s2", "pp:sec1.p2.s1", "link", subtype=LinkSubtype.IMPLICIT)
    store = LabelStore(joint)
    store.attach("rv:s1", "Weakness", "gold")
    store.attach("rv:s2", "Strength", "gold")
    store.attach("rv:s3", "Todo", "gold")
    alignment = fabricated_alignment(deleted=["pp:sec1.p1"],
                                     modified_old=["pp:sec2.p1"])
    return JointBundle.build(joint, "pp", ["rv"], store, alignment)


class TestLinkingRates:
    def test_channels_and_unlinked(self, bundle):
        rates = linking_rate_by_pragmatics(bundle)
        assert rates["Weakness"] == {"explicit": 1.0, "implicit": 0.0,
                                     "unlinked": 0.0, "sentences": 1}
        assert rates["Strength"]["implicit"] == 1.0
        assert rates["Todo"]["unlinked"] == 1.0

    def test_no_links_all_unlinked(self):
        joint = merge(build_paper(), build_review())
        store = LabelStore(joint)
        for i in range(1, 4):
            store.attach(f"rv:s{i}", "Recap", "gold")
        b = JointBundle.build(joint, "pp", ["rv"], store)
        rates = linking_rate_by_pragmatics(b)
        assert rates["Recap"]["unlinked"] == 1.0

    def test_half_linked(self):
        joint = merge(build_paper(), build_review())
        joint.add_edge("rv:s1", "pp:sec1.p1.s1", "link", subtype=LinkSubtype.IMPLICIT)
        store = LabelStore(joint)
        store.attach("rv:s1", "Weakness", "gold")
        store.attach("rv:s2", "Weakness", "gold")
        b = JointBundle.build(joint, "pp", ["rv"], store)
        assert linking_rate_by_pragmatics(b)["Weakness"]["implicit"] == 0.5

    def test_missing_labels_layer(self):
        joint = merge(build_paper(), build_review())
        b = JointBundle.build(joint, "pp", ["rv"], LabelStore(joint))
        with pytest.raises(MissingLayerError, match="pragmatics"):
            linking_rate_by_pragmatics(b)

    def test_rates_in_unit_interval(self, bundle):
        for vals in linking_rate_by_pragmatics(bundle).values():
            for key in ("explicit", "implicit", "unlinked"):
                assert 0.0 <= vals[key] <= 1.0


class TestLinksPerSection:
    def test_single_link_normalized(self, bundle):
        table = links_per_section([bundle])
        assert table["methods"]["occurrences"] == 1
        assert table["methods"]["by_channel"]["explicit"] == 1.0
        assert table["methods"]["by_channel"]["implicit"] == 1.0
        assert table["results"]["by_channel"]["explicit"] == 0.0

    def test_no_links_all_zero(self):
        joint = merge(build_paper(), build_review())
        store = LabelStore(joint)
        store.attach("rv:s1", "Recap", "gold")
        b = JointBundle.build(joint, "pp", ["rv"], store)
        table = links_per_section([b])
        for group in table.values():
            for value in group["by_channel"].values():
                assert value == 0.0

    def test_split_by_class(self, bundle):
        table = links_per_section([bundle])
        assert table["methods"]["by_channel_and_class"]["explicit"]["Weakness"] == 1.0
        assert table["methods"]["by_channel_and_class"]["implicit"]["Strength"] == 1.0


class TestChangeGivenLinks:
    def test_mixed_case(self, bundle):
        out = change_given_links([bundle])
        # linked: p1 (deleted -> changed), p2 (unchanged) ; unlinked: sec2.p1 (modified)
        assert out["p_change_given_links"] == 0.5
        assert out["p_change_given_no_links"] == 1.0
        assert out["pragmatics_of_change"]["Weakness"] == 1.0

    def test_all_linked_changed_none_unlinked(self):
        joint = merge(build_paper(), build_review())
        joint.add_edge("rv:s1", "pp:sec1.p1.s1", "link", subtype=LinkSubtype.EXPLICIT)
        store = LabelStore(joint)
        store.attach("rv:s1", "Todo", "gold")
        alignment = fabricated_alignment(deleted=["pp:sec1.p1"], modified_old=[])
        b = JointBundle.build(joint, "pp", ["rv"], store, alignment)
        out = change_given_links([b])
        assert out["p_change_given_links"] == 1.0
        assert out["p_change_given_no_links"] == 0.0

    def test_no_changes_anywhere(self):
        joint = merge(build_paper(), build_review())
        joint.add_edge("rv:s1", "pp:sec1.p1.s1", "link", subtype=LinkSubtype.EXPLICIT)
        store = LabelStore(joint)
        store.attach("rv:s1", "Todo", "gold")
        alignment = fabricated_alignment(deleted=[], modified_old=[])
        b = JointBundle.build(joint, "pp", ["rv"], store, alignment)
        out = change_given_links([b])
        assert out["p_change_given_links"] == 0.0
        assert out["p_change_given_no_links"] == 0.0

    def test_missing_alignment(self, bundle):
        bundle.alignment = None
        with pytest.raises(MissingLayerError, match="alignment"):
            change_given_links([bundle])

    def test_histogram_sums_to_one(self, bundle):
        out = change_given_links([bundle])
        assert sum(out["pragmatics_of_change"].values()) == pytest.approx(1.0)


class TestDualAgreement:
    def test_restriction_monotone(self):
        all_pairs = {("rv:s1", "pp:sec1.p1.s1"), ("rv:s2", "pp:sec1.p2.s1")}
        agreed = {("rv:s1", "pp:sec1.p1.s1")}

        joint_all = merge(build_paper(), build_review())
        added_all = add_implicit_edges(joint_all, all_pairs)
        joint_agreed = merge(build_paper(), build_review())
        added_agreed = add_implicit_edges(joint_agreed, agreed)
        assert added_agreed <= added_all

    def test_idempotent(self):
        joint = merge(build_paper(), build_review())
        pairs = {("rv:s1", "pp:sec1.p1.s1")}
        assert add_implicit_edges(joint, pairs) == 1
        assert add_implicit_edges(joint, pairs) == 0


class TestStatsReport:
    def test_shape_and_csv(self, bundle):
        report = stats_report([bundle])
        assert set(report) == {"linking_rate_by_pragmatics", "links_per_section",
                               "change_given_links", "metadata"}
        rows = stats_csv_rows(report)
        assert ("change_probability", "linked", "any", 0.5) in rows
        for _, _, _, value in rows:
            assert 0.0 <= value <= 1.0

    def test_order_invariance_across_bundles(self, bundle):
        joint = merge(build_paper(), build_review())
        store = LabelStore(joint)
        store.attach("rv:s1", "Todo", "gold")
        other = JointBundle.build(joint, "pp", ["rv"], store,
                                  fabricated_alignment([], []))
        a = stats_report([bundle, other])
        b = stats_report([other, bundle])
        assert a["change_given_links"] == b["change_given_links"]
        assert a["links_per_section"] == b["links_per_section"]
