"""Citation-graph recommendation: direction-aware random walks and Katz
measures over a paper citation network, with venue/expert aggregation,
relevance feedback, an evaluation harness, and an HTTP service."""

from .errors import (
    CiterankError,
    DomainError,
    FeedbackOverlapError,
    IntegrityError,
    ParseError,
    TimeBudgetExceeded,
)
from .graph import (
    CitationGraph,
    GraphMask,
    PaperMeta,
    clustering_coefficient,
    degrees,
    distances_from,
    prune_after_year,
    shortest_distance,
)
from .ingest import (
    BuildReport,
    MetaRecord,
    RefRecord,
    TitleIndex,
    build_graph,
    load_edgelist,
    match_record,
    normalize_title,
    parse_bibliography,
    save_edgelist,
    synth_corpus,
)
from .rankers import (
    ALGORITHMS,
    RankerParams,
    ScoreVector,
    ccidf,
    cocitation,
    cocoupling,
    dakatz,
    darwr,
    katz,
    pagerank,
    paperrank,
    run_ranker,
    top_k,
)
from .recommend import (
    FeedbackSession,
    Query,
    apply_feedback,
    next_page,
    recommend_experts,
    recommend_papers,
    recommend_venues,
)

__version__ = "0.1.0"
