"""Full-pipeline summary report."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

from . import __version__
from .analytics import (
    concentration,
    downvote_metric,
    interaction_heatmap,
    overlap,
    rank_users,
    sentiment_summary,
)
from .cluster import ClusterConfig, cluster_census, ctup_pairs, strong_clusters, weak_clusters
from .community import detect_communities
from .graph import build_uig, influencer, slice_by_month
from .ingest import InteractionRecord, ParseResult, resolve_parents, validate_dataset
from .keywords import extract_keywords

DEFAULT_CONCENTRATION = (0.25, 0.5)
RANKING_LABELS = {"upvotes": "upvoted", "activity": "active", "downvotes": "downvoted"}


@dataclass
class ReportConfig:
    top_k: int = 10
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    months: tuple[str, ...] = ()
    concentration_p: tuple[float, ...] = DEFAULT_CONCENTRATION
    upvote_metric: str = "upvotes"
    keywords_k: int = 10
    max_removals: int = 0
    columns: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "top_k": self.top_k,
            "cluster": self.cluster.to_dict(),
            "months": list(self.months),
            "concentration_p": list(self.concentration_p),
            "upvote_metric": self.upvote_metric,
            "keywords_k": self.keywords_k,
            "max_removals": self.max_removals,
            "columns": dict(sorted(self.columns.items())),
        }

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def round_floats(obj, ndigits: int = 4):
    if isinstance(obj, float):
        return round(obj, ndigits)
    if isinstance(obj, dict):
        return {k: round_floats(v, ndigits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, ndigits) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(round_floats(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def filter_months(records: Sequence[InteractionRecord], months: Sequence[str]) -> list[InteractionRecord]:
    if not months:
        return list(records)
    keep = set(months)
    return [r for r in records if r.month_key in keep]


def ranking_table(records: Sequence[InteractionRecord], k: int, upvote_metric: str = "upvotes") -> dict:
    """Top-k lists keyed by upvotes/activity/downvotes, with the metric actually used."""
    if not records:
        return {name: {"metric": name, "entries": []} for name in RANKING_LABELS}
    metrics = {
        "upvotes": upvote_metric,
        "activity": "activity",
        "downvotes": downvote_metric(records),
    }
    return {
        name: {
            "metric": metric,
            "entries": [
                {"rank": e.rank, "user": e.user, "value": e.value}
                for e in rank_users(records, metric, k)
            ],
        }
        for name, metric in metrics.items()
    }


def build_report(parsed: ParseResult, config: ReportConfig, input_digests: Sequence[str] = ()) -> dict:
    records = filter_months(parsed.records, config.months)
    ingest = validate_dataset(records, parsed.dropped)
    pairs, unresolved = resolve_parents(records)
    graph = build_uig(pairs)

    weak = weak_clusters(graph, config.cluster)
    strong = strong_clusters(graph, config.cluster)
    census = cluster_census(weak, strong, ingest.active_users, ingest.total_users)
    tied = ctup_pairs(graph, config.cluster)

    influencers = {}
    for month, g in slice_by_month(pairs).items():
        d = influencer(g)
        influencers[month] = {
            "user": d.user,
            "in_weight": d.in_weight,
            "out_weight": d.out_weight,
            "total_weight": d.total_weight,
        }

    rankings = ranking_table(records, config.top_k, config.upvote_metric)
    lists = {name: [e["user"] for e in r["entries"]] for name, r in rankings.items()}
    overlaps = {
        a: {b: overlap(lists[a], lists[b]) if lists[a] and lists[b] else 0.0 for b in lists}
        for a in lists
    }
    heatmaps = {}
    for name, users in lists.items():
        if users:
            hm = interaction_heatmap(graph, users)
            heatmaps[name] = {"off_diagonal": hm.off_diagonal_mass(),
                              "diagonal": sum(hm.cells[i][i] for i in range(len(users)))}

    conc = []
    for p in config.concentration_p:
        if records:
            c = concentration(records, p)
            conc.append({"p": p, "prefix_size": c.prefix_size, "fraction": c.fraction})

    corpus = [f"{r.title}. {r.body}" if r.title else r.body for r in records]
    keywords = [
        {"phrase": kw.phrase, "score": kw.score, "frequency": kw.frequency}
        for kw in extract_keywords(corpus, config.keywords_k)
    ]

    communities = None
    if config.max_removals > 0:
        part = detect_communities(graph, config.max_removals)
        communities = {
            "count": len(part),
            "modularity": part.modularity,
            "removals": len(part.removal_trace),
            "largest": max((len(c) for c in part.communities), default=0),
        }

    ingest_d = ingest.to_dict()
    ingest_d["unresolved_parents"] = len(unresolved)
    return {
        "tool": {"name": "uigkit", "version": __version__},
        "config": config.to_dict(),
        "config_hash": config.digest(),
        "inputs_sha256": list(input_digests),
        "ingest": ingest_d,
        "graph": {
            "nodes": len(graph),
            "edges": graph.number_of_edges(),
            "total_weight": graph.total_weight(),
            "self_loops": sum(1 for u, v, _ in graph.iter_edges() if u == v),
        },
        "clusters": dict(census.to_dict(), ctup_count=len(tied)),
        "largest_wc_share": census.largest_wc_share,
        "unclustered_share": census.unclustered_share,
        "concentration": conc,
        "influencers": influencers,
        "rankings": rankings,
        "ranking_overlap": overlaps,
        "heatmaps": heatmaps,
        "sentiment": sentiment_summary(records),
        "keywords": keywords,
        "communities": communities,
        "notes": [
            "tie_score clamps |c_ij - c_ji| to at least 1",
            "shares are relative to active users (authors of at least one record)",
        ],
    }
