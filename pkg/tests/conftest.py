import sys
from pathlib import Path

import pytest

from itgkit.graph import merge
from itgkit.ingest import IngestOptions, ingest_review, parse_jats

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent.parent / "scripts"))


@pytest.fixture(scope="session")
def article_xml() -> bytes:
    return (FIXTURES / "article_v1.xml").read_bytes()


@pytest.fixture(scope="session")
def paper_graph(article_xml):
    graph, _ = parse_jats(article_xml, IngestOptions(doc_id="paper1"))
    return graph


@pytest.fixture(scope="session")
def review_text() -> str:
    return (FIXTURES / "review1.txt").read_text("utf-8")


@pytest.fixture(scope="session")
def review_graph(review_text):
    graph, _ = ingest_review(review_text, "rev1")
    return graph


@pytest.fixture()
def joint_graph(paper_graph, review_graph):
    return merge(paper_graph, review_graph)


@pytest.fixture(scope="session")
def demo_project_dir(tmp_path_factory) -> Path:
    import demo_project

    return demo_project.build(tmp_path_factory.mktemp("data"), "demo")
