"""Weak clusters, closely tied user pairs and strong clusters.

A weak cluster (WC) is a strongly connected component of the full
interaction graph with at least ``min_cluster_size`` users.  A closely
tied user pair (CTUP) is an unordered pair where one user commented on
the other at least ``ctup_threshold`` times.  Strong clusters (SC) are
the strongly connected components once every edge between non-CTUP
users has been removed.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Hashable, Iterable, TypeVar

from .graph import UserInteractionGraph

N = TypeVar("N", bound=Hashable)

WC, SC = "WC", "SC"


def tarjan_scc(
    nodes: Iterable[N],
    successors: Callable[[N], Iterable[N]],
) -> list[list[N]]:
    """Strongly connected components, iteratively (no recursion limit).

    Components come out in reverse topological order of the condensation,
    each listed in the order its members were popped off Tarjan's stack.
    """
    index: dict[N, int] = {}
    lowlink: dict[N, int] = {}
    on_stack: set[N] = set()
    stack: list[N] = []
    components: list[list[N]] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    break
                if w in on_stack and index[w] < lowlink[v]:
                    lowlink[v] = index[w]
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    if lowlink[v] < lowlink[parent]:
                        lowlink[parent] = lowlink[v]
                if lowlink[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    components.append(comp)
    return components


def graph_scc(graph: UserInteractionGraph) -> list[list[str]]:
    return tarjan_scc(sorted(graph.nodes), lambda u: sorted(graph.successors(u)))


@dataclass(frozen=True)
class ClusterConfig:
    ctup_threshold: int = 3
    diff_coefficient: Fraction = Fraction(2, 5)
    min_cluster_size: int = 2

    def __post_init__(self):
        if self.ctup_threshold < 1:
            raise ValueError("ctup_threshold must be >= 1")
        coeff = self.diff_coefficient
        if not isinstance(coeff, Rational):
            coeff = Fraction(str(coeff))
            object.__setattr__(self, "diff_coefficient", coeff)
        if coeff <= 0:
            raise ValueError("diff_coefficient must be positive")
        if self.min_cluster_size < 1:
            raise ValueError("min_cluster_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "ctup_threshold": self.ctup_threshold,
            "diff_coefficient": str(self.diff_coefficient),
            "min_cluster_size": self.min_cluster_size,
        }


def tie_score(c_ij: int, c_ji: int, diff_coefficient: Rational = Fraction(2, 5)) -> Fraction:
    """Pair engagement: total comments over ``coefficient * |c_ij - c_ji|``.

    A zero difference is clamped to 1 so balanced pairs score highest
    instead of dividing by zero.
    """
    if not isinstance(diff_coefficient, Rational):
        diff_coefficient = Fraction(str(diff_coefficient))
    diff = max(abs(c_ij - c_ji), 1)
    return Fraction(c_ij + c_ji) / (Fraction(diff_coefficient) * diff)


@dataclass(frozen=True)
class TiePair:
    user_i: str
    user_j: str
    c_ij: int
    c_ji: int
    tie_score: Fraction

    def as_row(self) -> list:
        return [self.user_i, self.user_j, self.c_ij, self.c_ji, f"{float(self.tie_score):.4f}"]


@dataclass
class ClusterSet:
    kind: str
    clusters: list[frozenset[str]]
    unclustered: frozenset[str] = field(default_factory=frozenset)

    def __len__(self) -> int:
        return len(self.clusters)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def members(self) -> frozenset[str]:
        return frozenset().union(*self.clusters)

    def labels(self) -> dict[str, int]:
        """user -> cluster index, ``-1`` for unclustered users."""
        out = {u: -1 for u in self.unclustered}
        for i, c in enumerate(self.clusters):
            for u in c:
                out[u] = i
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "clusters": [sorted(c) for c in self.clusters],
            "unclustered": sorted(self.unclustered),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _cluster_set(kind: str, graph: UserInteractionGraph, comps, min_size: int) -> ClusterSet:
    kept = [frozenset(c) for c in comps if len(c) >= min_size]
    # largest first, then by smallest member for a stable order
    kept.sort(key=lambda c: (-len(c), min(c)))
    inside = frozenset().union(*kept)
    return ClusterSet(kind, kept, graph.nodes - inside)


def weak_clusters(graph: UserInteractionGraph, config: ClusterConfig = ClusterConfig()) -> ClusterSet:
    return _cluster_set(WC, graph, graph_scc(graph), config.min_cluster_size)


def _directed_counts(graph: UserInteractionGraph) -> dict[tuple[str, str], tuple[int, int]]:
    pairs: dict[tuple[str, str], tuple[int, int]] = {}
    for u, v, w in graph.iter_edges():
        if u == v:
            continue
        if u < v:
            key, fwd = (u, v), True
        else:
            key, fwd = (v, u), False
        a, b = pairs.get(key, (0, 0))
        pairs[key] = (a + w, b) if fwd else (a, b + w)
    return pairs


def ctup_pairs(graph: UserInteractionGraph, config: ClusterConfig = ClusterConfig()) -> list[TiePair]:
    """Closely tied pairs, highest tie score first."""
    out = [
        TiePair(i, j, a, b, tie_score(a, b, config.diff_coefficient))
        for (i, j), (a, b) in _directed_counts(graph).items()
        if max(a, b) >= config.ctup_threshold
    ]
    out.sort(key=lambda p: (-p.tie_score, p.user_i, p.user_j))
    return out


def ctup_graph(graph: UserInteractionGraph, config: ClusterConfig = ClusterConfig()) -> UserInteractionGraph:
    """Keep only edges between CTUP members, in both directions where present."""
    tied = {
        key for key, (a, b) in _directed_counts(graph).items()
        if max(a, b) >= config.ctup_threshold
    }
    return graph.restrict_edges(lambda u, v, w: u != v and (min(u, v), max(u, v)) in tied)


def strong_clusters(graph: UserInteractionGraph, config: ClusterConfig = ClusterConfig()) -> ClusterSet:
    restricted = ctup_graph(graph, config)
    return _cluster_set(SC, graph, graph_scc(restricted), config.min_cluster_size)


def write_tiepairs_csv(pairs: Iterable[TiePair], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["user_i", "user_j", "c_ij", "c_ji", "tie_score"])
    for p in pairs:
        w.writerow(p.as_row())


@dataclass
class ClusterCensus:
    sizes: dict[int, dict[str, int]]
    wc_count: int
    sc_count: int
    largest_wc: int
    largest_sc: int
    wc_members: int
    sc_members: int
    active_users: int
    total_users: int
    largest_wc_share: float
    unclustered_share: float
    unclustered_share_total: float

    def to_dict(self) -> dict:
        return {
            "sizes": {str(k): v for k, v in sorted(self.sizes.items())},
            "wc_count": self.wc_count,
            "sc_count": self.sc_count,
            "largest_wc": self.largest_wc,
            "largest_sc": self.largest_sc,
            "wc_members": self.wc_members,
            "sc_members": self.sc_members,
            "active_users": self.active_users,
            "total_users": self.total_users,
            "largest_wc_share": self.largest_wc_share,
            "unclustered_share": self.unclustered_share,
            "unclustered_share_total": self.unclustered_share_total,
        }


def _share(num: int, den: int) -> float:
    return num / den if den else 0.0


def cluster_census(
    weak: ClusterSet,
    strong: ClusterSet,
    active_users: int | None = None,
    total_users: int | None = None,
) -> ClusterCensus:
    """Size histogram of both cluster sets plus coverage shares.

    Shares are measured against ``active_users`` (defaults to the graph's
    node count); ``unclustered_share_total`` uses ``total_users`` instead.
    """
    nodes = len(weak.members()) + len(weak.unclustered)
    active = nodes if active_users is None else active_users
    total = nodes if total_users is None else total_users
    wc_sizes = Counter(weak.sizes())
    sc_sizes = Counter(strong.sizes())
    hist = {s: {"wc": wc_sizes.get(s, 0), "sc": sc_sizes.get(s, 0)}
            for s in sorted(set(wc_sizes) | set(sc_sizes))}
    wc_members = len(weak.members())
    largest_wc = max(weak.sizes(), default=0)
    return ClusterCensus(
        sizes=hist,
        wc_count=len(weak),
        sc_count=len(strong),
        largest_wc=largest_wc,
        largest_sc=max(strong.sizes(), default=0),
        wc_members=wc_members,
        sc_members=len(strong.members()),
        active_users=active,
        total_users=total,
        largest_wc_share=_share(largest_wc, active),
        unclustered_share=_share(active - wc_members, active),
        unclustered_share_total=_share(total - wc_members, total),
    )
