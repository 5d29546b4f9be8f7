import pytest

from itgkit.pragmatics import (
    LabelStore,
    NotASentenceError,
    PragmaticLabel,
    label_distribution,
)


@pytest.fixture()
def store(review_graph):
    return LabelStore(review_graph)


def first_sentences(graph, n):
    return [nid for nid in graph.reading_order("rev1")][:n]


class TestAttachLabel:
    def test_first_label(self, store, review_graph):
        s = first_sentences(review_graph, 1)[0]
        store.attach(s, "Todo", "A")
        assert len(store) == 1

    def test_supersession(self, store, review_graph):
        s = first_sentences(review_graph, 1)[0]
        store.attach(s, "Todo", "A")
        store.attach(s, "Weakness", "A")
        assert len(store) == 1
        assert store.get(s, "A").label is PragmaticLabel.WEAKNESS

    def test_two_annotators_coexist(self, store, review_graph):
        s = first_sentences(review_graph, 1)[0]
        store.attach(s, "Todo", "A")
        store.attach(s, "Todo", "B")
        assert len(store) == 2

    def test_non_sentence_rejected(self, store, review_graph):
        root = review_graph.document("rev1").root
        with pytest.raises(NotASentenceError):
            store.attach(root, "Todo", "A")

    def test_idempotent(self, store, review_graph):
        s = first_sentences(review_graph, 1)[0]
        r1 = store.attach(s, "Recap", "A", ts=1.0)
        r2 = store.attach(s, "Recap", "A", ts=1.0)
        assert len(store) == 1
        assert r1 == r2

    def test_label_round_trip(self):
        for label in PragmaticLabel:
            assert PragmaticLabel.parse(label.value) is label
        with pytest.raises(ValueError):
            PragmaticLabel.parse("Praise")


class TestDistribution:
    def test_all_todo(self, store, review_graph):
        for s in first_sentences(review_graph, 4):
            store.attach(s, "Todo", "A")
        dist = label_distribution(store.records())
        assert dist[PragmaticLabel.TODO] == 1.0
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)

    def test_half_half(self, store, review_graph):
        sents = first_sentences(review_graph, 4)
        store.attach(sents[0], "Recap", "A")
        store.attach(sents[1], "Recap", "A")
        store.attach(sents[2], "Other", "A")
        store.attach(sents[3], "Other", "A")
        dist = label_distribution(store.records())
        assert dist[PragmaticLabel.RECAP] == 0.5
        assert dist[PragmaticLabel.OTHER] == 0.5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            label_distribution([])

    def test_nonnegative_sums_to_one(self, store, review_graph):
        labels = ["Recap", "Weakness", "Strength", "Todo", "Structure", "Other"]
        for s, lab in zip(first_sentences(review_graph, 6), labels):
            store.attach(s, lab, "A")
        dist = label_distribution(store.records(), annotator="A")
        assert all(v >= 0 for v in dist.values())
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


class TestPersistence:
    def test_jsonl_round_trip(self, review_graph, tmp_path):
        path = tmp_path / "labels.jsonl"
        store = LabelStore(review_graph, path=path)
        sents = first_sentences(review_graph, 2)
        store.attach(sents[0], "Todo", "A", ts=1.0)
        store.attach(sents[0], "Recap", "A", ts=2.0)   # supersedes on load
        store.attach(sents[1], "Other", "B", ts=3.0)
        loaded = LabelStore.load(path, review_graph)
        assert len(loaded) == 2
        assert loaded.get(sents[0], "A").label is PragmaticLabel.RECAP

    def test_truncated_final_line_ignored(self, review_graph, tmp_path):
        path = tmp_path / "labels.jsonl"
        store = LabelStore(review_graph, path=path)
        s = first_sentences(review_graph, 1)[0]
        store.attach(s, "Todo", "A", ts=1.0)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write('{"node": "x", "label": "To')  # crash mid-write
        loaded = LabelStore.load(path, review_graph)
        assert len(loaded) == 1
