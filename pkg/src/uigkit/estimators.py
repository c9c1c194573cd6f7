"""scikit-learn style wrappers.

The functional API in :mod:`uigkit.graph`, :mod:`uigkit.cluster` and
friends does the work; these classes hold hyperparameters, expose
``get_params``/``set_params`` and store results in trailing-underscore
attributes so they behave like any other estimator (cloning, grid
search over ``ctup_threshold``, pipelines ending in a clusterer).
"""

from __future__ import annotations

from typing import Iterable

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .analytics import METRICS, rank_users
from .cluster import ClusterConfig, ctup_pairs, strong_clusters, weak_clusters
from .community import detect_communities
from .graph import UserInteractionGraph, build_uig
from .ingest import InteractionRecord, resolve_parents
from .keywords import STOPWORDS, extract_keywords


def check_records(records) -> list[InteractionRecord]:
    """Materialize and type-check a record collection."""
    records = list(records)
    for r in records:
        if not isinstance(r, InteractionRecord):
            raise TypeError(f"expected InteractionRecord, got {type(r).__name__}")
    return records


def check_graph(X) -> UserInteractionGraph:
    """Accept a graph, a records sequence, or an ``{(u, v): weight}`` mapping."""
    if isinstance(X, UserInteractionGraph):
        return X
    if isinstance(X, dict):
        return UserInteractionGraph(X)
    return build_uig(resolve_parents(check_records(X))[0])


def _check_positive_int(name: str, value, minimum: int = 1) -> None:
    if not isinstance(value, (int, np.integer)) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")


class InteractionGraphBuilder(TransformerMixin, BaseEstimator):
    """Records -> :class:`UserInteractionGraph`.

    Parameters
    ----------
    month : str or None
        Keep only interactions from this ``YYYY-MM`` month.
    """

    def __init__(self, month=None):
        self.month = month

    def fit(self, X, y=None):
        records = check_records(X)
        self.graph_ = self.transform(records)
        self.n_records_ = len(records)
        return self

    def transform(self, X):
        pairs, _ = resolve_parents(check_records(X))
        return build_uig(pairs, self.month)


class InteractionClusterer(ClusterMixin, BaseEstimator):
    """Weak/strong cluster extraction with closely tied pair scoring.

    After ``fit``, ``nodes_`` lists users in sorted order and ``labels_``
    gives each one's weak-cluster index (``-1`` when unclustered);
    ``strong_labels_`` does the same for strong clusters.
    """

    def __init__(self, ctup_threshold=3, diff_coefficient=0.4, min_cluster_size=2):
        self.ctup_threshold = ctup_threshold
        self.diff_coefficient = diff_coefficient
        self.min_cluster_size = min_cluster_size

    def fit(self, X, y=None):
        _check_positive_int("ctup_threshold", self.ctup_threshold)
        _check_positive_int("min_cluster_size", self.min_cluster_size)
        graph = check_graph(X)
        config = ClusterConfig(self.ctup_threshold, self.diff_coefficient, self.min_cluster_size)
        self.weak_clusters_ = weak_clusters(graph, config)
        self.strong_clusters_ = strong_clusters(graph, config)
        self.tie_pairs_ = ctup_pairs(graph, config)
        self.nodes_ = np.array(sorted(graph.nodes), dtype=object)
        weak = self.weak_clusters_.labels()
        strong = self.strong_clusters_.labels()
        self.labels_ = np.array([weak[u] for u in self.nodes_], dtype=int)
        self.strong_labels_ = np.array([strong[u] for u in self.nodes_], dtype=int)
        return self


class EdgeBetweennessCommunities(ClusterMixin, BaseEstimator):
    """Girvan-Newman community detection stopped at peak modularity."""

    def __init__(self, max_removals=None):
        self.max_removals = max_removals

    def fit(self, X, y=None):
        if self.max_removals is not None:
            _check_positive_int("max_removals", self.max_removals, minimum=0)
        graph = check_graph(X)
        part = detect_communities(graph, self.max_removals)
        self.communities_ = part.communities
        self.modularity_ = part.modularity
        self.removal_trace_ = part.removal_trace
        self.nodes_ = np.array(sorted(graph.nodes), dtype=object)
        labels = part.labels()
        self.labels_ = np.array([labels[u] for u in self.nodes_], dtype=int)
        return self


class UserRanker(BaseEstimator):
    def __init__(self, metric="upvotes", k=10):
        self.metric = metric
        self.k = k

    def fit(self, X, y=None):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        _check_positive_int("k", self.k)
        self.ranking_ = rank_users(check_records(X), self.metric, self.k)
        return self

    def predict(self, X=None):
        """Ranked usernames."""
        check_is_fitted(self, "ranking_")
        return [e.user for e in self.ranking_]


class KeywordExtractor(TransformerMixin, BaseEstimator):
    """Corpus of strings -> top-k keyphrases."""

    def __init__(self, k=10, max_ngram=3, stopwords=None, deduplicate=True):
        self.k = k
        self.max_ngram = max_ngram
        self.stopwords = stopwords
        self.deduplicate = deduplicate

    def fit(self, X: Iterable[str], y=None):
        _check_positive_int("k", self.k)
        _check_positive_int("max_ngram", self.max_ngram)
        stop = STOPWORDS if self.stopwords is None else self.stopwords
        self.keywords_ = extract_keywords(list(X), self.k, self.max_ngram, stop, self.deduplicate)
        return self

    def transform(self, X=None):
        check_is_fitted(self, "keywords_")
        return [kw.phrase for kw in self.keywords_]
