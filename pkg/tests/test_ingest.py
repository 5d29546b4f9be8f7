import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from itgkit.graph import NodeKind
from itgkit.ingest import (
    IngestError,
    IngestOptions,
    clean_review,
    ingest_review,
    parse_jats,
    split_sentences,
)


class TestSplitSentences:
    def test_unambiguous_terminals(self):
        spans = split_sentences("A. B? C!")
        assert [s.text for s in spans] == ["A.", "B?", "C!"]

    def test_empty(self):
        assert split_sentences("") == []
        assert split_sentences("   ") == []

    def test_abbreviation_does_not_split(self):
        spans = split_sentences("Fig. 4 shows results. See below.")
        assert [s.text for s in spans] == ["Fig. 4 shows results.", "See below."]

    def test_eg_and_et_al(self):
        spans = split_sentences("Methods follow prior work, e.g. Smith et al. 2019. Results differ.")
        assert len(spans) == 2

    def test_no_terminal(self):
        spans = split_sentences("no terminal punctuation here")
        assert len(spans) == 1

    def test_offsets_slice_input(self):
        text = "  First one.   Second one!  "
        for span in split_sentences(text):
            assert text[span.start:span.end] == span.text

    @given(st.text(alphabet=st.sampled_from("aA .?!\n"), max_size=80))
    def test_spans_cover_all_non_whitespace(self, text):
        spans = split_sentences(text)
        joined = "".join(s.text for s in spans)
        assert sorted(c for c in joined if not c.isspace()) == \
            sorted(c for c in text if not c.isspace())
        # ordered and non-overlapping
        for a, b in zip(spans, spans[1:]):
            assert a.end <= b.start


class TestCleanReview:
    TEMPLATES = ["Is the cake a lie?", "Competing Interests: none."]

    def test_block_removed_rest_intact(self):
        body = "Actual review content.\nSecond line stays.\n"
        text = body + "Is the cake a lie?\nCompeting Interests: none.\n"
        assert clean_review(text, self.TEMPLATES) == body

    def test_no_template_is_identity(self):
        text = "Just a review.\n\nWith two paragraphs.\n"
        assert clean_review(text, self.TEMPLATES) == text

    def test_template_twice_removed_twice(self):
        text = "Is the cake a lie?\nkeep\nIs the cake a lie?\n"
        assert clean_review(text, self.TEMPLATES) == "keep\n"

    def test_whitespace_normalized_matching(self):
        text = "  Is  the cake   a lie? \nkeep\n"
        assert clean_review(text, self.TEMPLATES) == "keep\n"


class TestParseJats:
    def test_minimal_forced_structure(self):
        xml = b"""<article><front><article-meta>
            <title-group><article-title>T</article-title></title-group>
            </article-meta></front>
            <body><sec><title>S</title><p>Hello there world.</p></sec></body></article>"""
        graph, report = parse_jats(xml, IngestOptions(doc_id="d", split_sentences=False))
        kinds = sorted(n.kind.value for n in graph.nodes)
        assert kinds == ["article-title", "paragraph", "section-title"]
        assert report.counts == {"article-title": 1, "paragraph": 1, "section-title": 1}
        assert not graph.validate()

    def test_figure_label_passthrough(self):
        xml = b"""<article><front><article-meta>
            <title-group><article-title>T</article-title></title-group></article-meta></front>
            <body><sec><title>S</title>
            <fig id="f4"><label>Figure 4</label><caption><p>c</p></caption></fig>
            <p>One sentence.</p></sec></body></article>"""
        graph, _ = parse_jats(xml, IngestOptions(doc_id="d"))
        figs = graph.nodes_of("d", NodeKind.FIGURE)
        assert len(figs) == 1
        assert figs[0].meta["label"] == "Figure 4"
        assert figs[0].payload and "<fig" in figs[0].payload

    def test_malformed_xml(self):
        with pytest.raises(IngestError, match="malformed"):
            parse_jats(b"<article><body>")

    def test_empty_body(self):
        with pytest.raises(IngestError, match="empty body"):
            parse_jats(b"<article><body/></article>")

    def test_nesting_depth_matches_xml(self, paper_graph):
        # hand-counted from the fixture: top-level <sec> titles sit at
        # depth 1 under the root, <sec><sec> titles at depth 2
        def depth(nid):
            d = 0
            cur = paper_graph.parent_of(nid)
            while cur is not None:
                d += 1
                cur = paper_graph.parent_of(cur)
            return d

        depths = {paper_graph.node(nid).content: depth(nid)
                  for nid in paper_graph.structure_order("paper1", NodeKind.SECTION_TITLE)}
        assert depths["Introduction"] == 1
        assert depths["Methods"] == 1
        assert depths["Image analysis"] == 2
        assert depths["Statistical analysis"] == 2

    def test_fixture_invariants_and_chain(self, paper_graph):
        assert paper_graph.validate() == []
        order = paper_graph.reading_order("paper1")
        assert sorted(order) == sorted(paper_graph.leaves("paper1"))

    def test_payload_nodes_present(self, paper_graph):
        assert len(paper_graph.nodes_of("paper1", NodeKind.FIGURE)) == 1
        tables = paper_graph.nodes_of("paper1", NodeKind.TABLE)
        assert len(tables) == 2  # Table 3 plus Box 1
        assert any(t.meta.get("box") == "true" for t in tables)
        assert len(paper_graph.nodes_of("paper1", NodeKind.EQUATION)) == 1
        assert len(paper_graph.nodes_of("paper1", NodeKind.REFERENCE)) == 2
        assert len(paper_graph.nodes_of("paper1", NodeKind.LIST_ITEM)) == 2

    def test_sentence_meta_carries_citation(self, paper_graph):
        cited = [n for n in paper_graph.nodes_of("paper1", NodeKind.SENTENCE)
                 if "citations" in n.meta]
        assert any("bibr:r1" in n.meta["citations"] for n in cited)

    def test_body_text_reproduced(self, paper_graph, article_xml):
        import xml.etree.ElementTree as ET

        def norm(s):
            return " ".join(s.split())

        root = ET.fromstring(article_xml)
        xml_parts = [" ".join("".join(p.itertext()).split())
                     for p in root.find("body").iter("p")]
        got = []
        for nid in paper_graph.reading_order("paper1"):
            node = paper_graph.node(nid)
            if node.kind in (NodeKind.SENTENCE, NodeKind.PARAGRAPH):
                sec = paper_graph.ancestor_at(nid, NodeKind.ABSTRACT)
                if sec is None:  # abstract text is front matter, not body
                    got.append(node.content)
        body_text = norm(" ".join(t for t in xml_parts
                                  if "Workflow overview" not in t
                                  and "Per-condition counts" not in t
                                  and "Checklist for applying" not in t
                                  and "Agreement is highest" not in t
                                  and "Runtime stays below" not in t))
        assert norm(" ".join(got)) == body_text


class TestIngestReview:
    def test_structure(self, review_graph):
        assert review_graph.validate() == []
        root = review_graph.document("rev1").root
        assert review_graph.node(root).kind is NodeKind.REVIEW_REPORT
        paragraphs = review_graph.nodes_of("rev1", NodeKind.PARAGRAPH)
        assert len(paragraphs) == 4  # questionnaire block removed

    def test_questionnaire_removed(self, review_graph):
        texts = " ".join(n.content for n in review_graph.nodes_of("rev1"))
        assert "Competing Interests" not in texts
        assert "software tool clearly explained" not in texts

    def test_counts_match_graph(self, review_text):
        graph, report = ingest_review(review_text, "r9")
        for kind, count in report.counts.items():
            assert count == len(graph.nodes_of("r9", kind))
