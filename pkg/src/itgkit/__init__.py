"""itgkit: intertextual graphs for peer review analysis.

Documents and their peer reviews live in one graph substrate; on top of
it the toolkit provides pragmatic tagging plumbing, explicit and
implicit review-to-paper linking, exact revision alignment, agreement
metrics, joint statistics, a CLI and an annotation HTTP service.
"""

from .graph import (
    Edge,
    EdgeKind,
    GraphError,
    IntertextualGraph,
    LinkSubtype,
    Node,
    NodeKind,
    deserialize,
    merge,
    serialize,
    structurally_equal,
)
from .ingest import IngestOptions, IngestReport, SentenceSpan, clean_review, ingest_review, parse_jats, split_sentences
from .pragmatics import LabelStore, PragmaticLabel, PragmaticLabelRecord, label_distribution
from .metrics import PRF, ReliabilityData, krippendorff_alpha, prf
from .anchors import AnchorType, ExplicitAnchor, ExplicitLink, Unresolved, detect_anchors, extract_explicit_links, resolve_target
from .suggest import Bm25Index, EmbeddingTable, Ranking, SuggestConfig, SuggestionSet, aggregate_rankings, bm25_rank, cosine_rank, suggest
from .align import AlignmentProblem, AlignmentResult, align_versions, diff_report, score, similarity
from .analysis import JointBundle, SectionGroup, change_given_links, linking_rate_by_pragmatics, links_per_section, normalize_section_title

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
