"""Model and analyze post/comment interactions as a weighted user graph."""

__version__ = "0.1.0"

from .analytics import (
    concentration,
    interaction_heatmap,
    overlap,
    rank_users,
    sentiment_summary,
)
from .cluster import (
    ClusterConfig,
    ClusterSet,
    TiePair,
    cluster_census,
    ctup_pairs,
    strong_clusters,
    tarjan_scc,
    tie_score,
    weak_clusters,
)
from .community import CommunityPartition, detect_communities, edge_betweenness, modularity
from .graph import UserInteractionGraph, build_uig, export_graph, influencer, slice_by_month
from .ingest import (
    InteractionRecord,
    IngestReport,
    SchemaError,
    parse_records,
    read_dump,
    resolve_parents,
    validate_dataset,
)
from .keywords import extract_keywords

__all__ = [
    "ClusterConfig", "ClusterSet", "CommunityPartition", "IngestReport",
    "InteractionRecord", "SchemaError", "TiePair", "UserInteractionGraph",
    "build_uig", "cluster_census", "concentration", "ctup_pairs",
    "detect_communities", "edge_betweenness", "export_graph",
    "extract_keywords", "influencer", "interaction_heatmap", "modularity",
    "overlap", "parse_records", "rank_users", "read_dump", "resolve_parents",
    "sentiment_summary", "slice_by_month", "strong_clusters", "tarjan_scc",
    "tie_score", "validate_dataset", "weak_clusters",
]
