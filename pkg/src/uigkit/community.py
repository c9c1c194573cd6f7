"""Edge-betweenness (Girvan-Newman) community detection.

Works on the undirected projection of the interaction graph: the weight
of ``{u, v}`` is the sum of both directed weights, self-loops dropped.
Shortest paths count hops only; weights enter through modularity.
"""

from __future__ import annotations

import csv
import json
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .graph import UserInteractionGraph

Adjacency = Mapping[str, Mapping[str, int]]
Edge = tuple[str, str]

# relative slack when comparing float betweenness values for ties
_TIE_RTOL = 1e-9


def undirected_projection(graph: UserInteractionGraph | Adjacency) -> dict[str, dict[str, int]]:
    if not isinstance(graph, UserInteractionGraph):
        return {u: {v: w for v, w in nbrs.items() if v != u} for u, nbrs in graph.items()}
    adj: dict[str, dict[str, int]] = {u: {} for u in graph.nodes}
    for u, v, w in graph.iter_edges():
        if u == v:
            continue
        adj[u][v] = adj[u].get(v, 0) + w
        adj[v][u] = adj[v].get(u, 0) + w
    return adj


def _edge(u: str, v: str) -> Edge:
    return (u, v) if u < v else (v, u)


def _accumulate(adj: Adjacency, sources: Iterable[str], out: dict, exact: bool) -> None:
    one = Fraction(1) if exact else 1.0
    for s in sources:
        order = []
        preds: dict[str, list[str]] = {s: []}
        sigma = {s: 1}
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dv
                    sigma[w] = 0
                    preds[w] = []
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(order, 0 * one)
        for w in reversed(order):
            coeff = (one + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                e = _edge(v, w)
                out[e] = out.get(e, 0 * one) + c
                delta[v] += c


def edge_betweenness(
    graph: UserInteractionGraph | Adjacency,
    nodes: Iterable[str] | None = None,
    exact: bool = False,
) -> dict[Edge, Union[float, Fraction]]:
    """Shortest-path betweenness of every undirected edge.

    Each unordered node pair spreads one unit evenly over its shortest
    paths.  ``nodes`` limits the computation to a node set closed under
    adjacency (a connected component).  ``exact=True`` returns Fractions.
    """
    adj = undirected_projection(graph)
    if nodes is None:
        nodes = adj
    nodes = sorted(nodes)
    raw: dict[Edge, Union[float, Fraction]] = {}
    for u in nodes:
        for v in adj[u]:
            if u < v:
                raw[(u, v)] = Fraction(0) if exact else 0.0
    _accumulate(adj, nodes, raw, exact)
    return {e: val / 2 for e, val in raw.items()}


def modularity(graph: UserInteractionGraph | Adjacency, partition: Iterable[Iterable[str]]) -> float:
    """Newman modularity of a node partition on the weighted undirected projection."""
    adj = undirected_projection(graph)
    communities = [set(c) for c in partition]
    covered = set().union(*communities) if communities else set()
    if covered != set(adj) or sum(len(c) for c in communities) != len(covered):
        raise ValueError("partition must cover every node exactly once")
    total = sum(w for u in adj for w in adj[u].values()) / 2
    if total == 0:
        return 0.0
    return sum(_contribution(adj, c, total) for c in communities)


def _contribution(adj: Adjacency, members: set[str], total: float) -> float:
    inner = 0
    degree = 0
    for u in members:
        for v, w in adj[u].items():
            degree += w
            if v in members:
                inner += w
    inner /= 2
    return inner / total - (degree / (2 * total)) ** 2


@dataclass
class CommunityPartition:
    communities: list[list[str]]
    modularity: float
    removal_trace: list[Edge] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.communities)

    def labels(self) -> dict[str, int]:
        return {u: i for i, c in enumerate(self.communities) for u in c}

    def to_dict(self) -> dict:
        return {
            "communities": {str(i): c for i, c in enumerate(self.communities)},
            "modularity": round(self.modularity, 4),
            "removals": [list(e) for e in self.removal_trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def size_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(len(c) for c in self.communities).items()))

    def write_size_histogram(self, stream) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["size", "count"])
        w.writerows(self.size_histogram().items())


def _component(adj: Adjacency, start: str) -> set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _sorted_partition(parts: Iterable[Iterable[str]]) -> list[list[str]]:
    out = [sorted(p) for p in parts]
    out.sort(key=lambda c: (-len(c), c[0]))
    return out


def _best_edge(scores: Mapping[Edge, float]) -> tuple[float, Edge] | None:
    if not scores:
        return None
    top = max(scores.values())
    floor = top - abs(top) * _TIE_RTOL
    edge = min(e for e, s in scores.items() if s >= floor)
    return top, edge


def detect_communities(
    graph: UserInteractionGraph | Adjacency,
    max_removals: int | None = None,
) -> CommunityPartition:
    """Remove highest-betweenness edges one at a time; keep the best-modularity split.

    Betweenness is recomputed only inside the component that lost an edge,
    since other components are unaffected.  Ties between edges go to the
    lexicographically smallest; ties in modularity keep the earliest
    partition.  ``max_removals`` caps the number of removals.
    """
    original = undirected_projection(graph)
    if not original:
        return CommunityPartition([], 0.0, [])
    adj = {u: dict(nbrs) for u, nbrs in original.items()}
    total = sum(w for u in adj for w in adj[u].values()) / 2

    comp_of: dict[str, int] = {}
    comps: dict[int, set[str]] = {}
    for u in sorted(adj):
        if u not in comp_of:
            members = _component(adj, u)
            cid = len(comps)
            comps[cid] = members
            for m in members:
                comp_of[m] = cid
    next_id = len(comps)

    def contribution(members):
        return _contribution(original, members, total) if total else 0.0

    contrib = {cid: contribution(m) for cid, m in comps.items()}
    scores = {cid: edge_betweenness(adj, m) for cid, m in comps.items() if len(m) > 1}
    best_q = sum(contrib.values())
    best_parts = list(comps.values())
    trace: list[Edge] = []

    while scores and (max_removals is None or len(trace) < max_removals):
        candidates = [b for b in (_best_edge(s) for s in scores.values()) if b is not None]
        if not candidates:
            break
        top = max(v for v, _ in candidates)
        floor = top - abs(top) * _TIE_RTOL
        u, v = min(e for val, e in candidates if val >= floor)
        trace.append((u, v))
        del adj[u][v]
        del adj[v][u]

        cid = comp_of[u]
        side = _component(adj, u)
        if v in side:
            scores[cid] = edge_betweenness(adj, comps[cid])
            continue
        rest = comps.pop(cid) - side
        del contrib[cid]
        del scores[cid]
        for members in (side, rest):
            new = next_id
            next_id += 1
            comps[new] = members
            for m in members:
                comp_of[m] = new
            contrib[new] = contribution(members)
            if len(members) > 1:
                scores[new] = edge_betweenness(adj, members)
        scores = {k: s for k, s in scores.items() if s}
        q = sum(contrib.values())
        if q > best_q + 1e-12:
            best_q = q
            best_parts = list(comps.values())

    return CommunityPartition(_sorted_partition(best_parts), best_q if total else 0.0, trace)


def communities_by_component(
    graph: UserInteractionGraph | Adjacency,
    max_removals: int | None = None,
) -> CommunityPartition:
    """Run detection separately on each connected component and merge.

    ``max_removals`` applies per component.  Modularity of the merged
    result is evaluated on the whole graph.
    """
    adj = undirected_projection(graph)
    seen: set[str] = set()
    parts: list[list[str]] = []
    trace: list[Edge] = []
    for u in sorted(adj):
        if u in seen:
            continue
        members = _component(adj, u)
        seen |= members
        sub = {m: adj[m] for m in members}
        result = detect_communities(sub, max_removals)
        parts.extend(result.communities)
        trace.extend(result.removal_trace)
    parts = _sorted_partition(parts)
    return CommunityPartition(parts, modularity(adj, parts) if parts else 0.0, trace)
