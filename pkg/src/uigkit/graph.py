"""The user interaction graph and its monthly slices.

Nodes are usernames.  An edge ``u -> v`` with weight ``w`` means ``u``
commented ``w`` times directly on content authored by ``v``.  Only the
immediate parent counts, so a reply to a reply never links back to the
thread's post author, and @-mentions in comment text are never read.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .ingest import Interaction

EXPORT_FORMATS = ("dot", "adjacency-json", "edge-csv")
SNAPSHOT_MAGIC = b"UIG1"
SNAPSHOT_VERSION = 1
_EDGE_STRUCT = struct.Struct(">III")


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeSummary:
    user: str
    in_weight: int
    out_weight: int

    @property
    def total_weight(self) -> int:
        return self.in_weight + self.out_weight


class UserInteractionGraph:
    """Directed graph with positive integer edge weights.

    Instances are not mutated after construction; build them with
    :func:`build_uig` or :meth:`from_edges`.
    """

    __slots__ = ("_succ", "_pred", "_nodes", "slice_label")

    def __init__(self, edges: Mapping[tuple[str, str], int] | None = None,
                 nodes: Iterable[str] = (), slice_label: str | None = None):
        succ: dict[str, dict[str, int]] = defaultdict(dict)
        pred: dict[str, dict[str, int]] = defaultdict(dict)
        node_set = set(nodes)
        for (u, v), w in (edges or {}).items():
            w = int(w)
            if w < 1:
                raise ValueError(f"edge {u}->{v} has non-positive weight {w}")
            succ[u][v] = w
            pred[v][u] = w
            node_set.add(u)
            node_set.add(v)
        self._succ = dict(succ)
        self._pred = dict(pred)
        self._nodes = frozenset(node_set)
        self.slice_label = slice_label

    @classmethod
    def from_edges(cls, edges: Mapping[tuple[str, str], int], **kw) -> "UserInteractionGraph":
        return cls(edges, **kw)

    @property
    def nodes(self) -> frozenset[str]:
        return self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, user: object) -> bool:
        return user in self._nodes

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UserInteractionGraph):
            return NotImplemented
        return self._nodes == other._nodes and self.edges() == other.edges()

    def __repr__(self) -> str:
        return (f"UserInteractionGraph(nodes={len(self._nodes)}, "
                f"edges={self.number_of_edges()}, slice={self.slice_label!r})")

    def edges(self) -> dict[tuple[str, str], int]:
        return {(u, v): w for u, nbrs in self._succ.items() for v, w in nbrs.items()}

    def iter_edges(self) -> Iterator[tuple[str, str, int]]:
        for u, nbrs in self._succ.items():
            for v, w in nbrs.items():
                yield u, v, w

    def number_of_edges(self) -> int:
        return sum(len(n) for n in self._succ.values())

    def total_weight(self) -> int:
        return sum(sum(n.values()) for n in self._succ.values())

    def weight(self, u: str, v: str) -> int:
        return self._succ.get(u, {}).get(v, 0)

    def successors(self, u: str) -> Mapping[str, int]:
        return self._succ.get(u, {})

    def predecessors(self, u: str) -> Mapping[str, int]:
        return self._pred.get(u, {})

    def in_weight(self, u: str) -> int:
        return sum(self._pred.get(u, {}).values())

    def out_weight(self, u: str) -> int:
        return sum(self._succ.get(u, {}).values())

    def degree_summary(self, u: str) -> DegreeSummary:
        return DegreeSummary(u, self.in_weight(u), self.out_weight(u))

    def subgraph(self, keep: Iterable[str]) -> "UserInteractionGraph":
        keep = set(keep)
        edges = {(u, v): w for u, v, w in self.iter_edges() if u in keep and v in keep}
        return UserInteractionGraph(edges, nodes=keep & self._nodes, slice_label=self.slice_label)

    def restrict_edges(self, predicate) -> "UserInteractionGraph":
        """Same node set, only the edges ``(u, v, w)`` for which ``predicate`` holds."""
        edges = {(u, v): w for u, v, w in self.iter_edges() if predicate(u, v, w)}
        return UserInteractionGraph(edges, nodes=self._nodes, slice_label=self.slice_label)


def build_uig(pairs: Iterable[Interaction | tuple], month: str | None = None) -> UserInteractionGraph:
    """Count parallel interactions into weighted edges.

    ``pairs`` are ``(source, target)`` or ``(source, target, month_key)``
    tuples; with ``month`` set, only pairs from that month are kept.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for p in pairs:
        if month is not None and p[2] != month:
            continue
        counts[(p[0], p[1])] += 1
    return UserInteractionGraph(counts, slice_label=month or "ALL")


def slice_by_month(pairs: Iterable[Interaction]) -> dict[str, UserInteractionGraph]:
    by_month: dict[str, Counter] = defaultdict(Counter)
    for source, target, month in pairs:
        by_month[month][(source, target)] += 1
    return {m: UserInteractionGraph(by_month[m], slice_label=m) for m in sorted(by_month)}


def degree_table(graph: UserInteractionGraph) -> list[DegreeSummary]:
    return [graph.degree_summary(u) for u in sorted(graph.nodes)]


def influencer(graph: UserInteractionGraph) -> DegreeSummary:
    """The user with the highest weighted in+out degree; ties go to the smallest name."""
    if not graph.nodes:
        raise EmptyGraphError("influencer of an empty graph")
    return min(degree_table(graph), key=lambda d: (-d.total_weight, d.user))


# -- export / import -------------------------------------------------------

def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_graph(graph: UserInteractionGraph, fmt: str) -> bytes:
    edges = sorted(graph.iter_edges())
    if fmt == "edge-csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "target", "weight"])
        w.writerows(edges)
        return buf.getvalue().encode("utf-8")
    if fmt == "adjacency-json":
        adj = {u: [] for u in sorted(graph.nodes)}
        for u, v, wt in edges:
            adj[u].append({"target": v, "weight": wt})
        return (json.dumps(adj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    if fmt == "dot":
        name = _dot_quote(graph.slice_label or "UIG")
        lines = [f"digraph {name} {{"]
        linked = {u for u, _, _ in edges} | {v for _, v, _ in edges}
        for u in sorted(graph.nodes - linked):
            lines.append(f"  {_dot_quote(u)};")
        for u, v, wt in edges:
            lines.append(f'  {_dot_quote(u)} -> {_dot_quote(v)} [weight={wt}, label="{wt}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown export format {fmt!r}; expected one of {', '.join(EXPORT_FORMATS)}")


def import_graph(data: bytes, fmt: str) -> UserInteractionGraph:
    """Inverse of :func:`export_graph` for the two tabular formats."""
    text = data.decode("utf-8")
    if fmt == "edge-csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["source", "target", "weight"]:
            raise ValueError("edge-csv needs a source,target,weight header")
        return UserInteractionGraph({(s, t): int(w) for s, t, w in rows[1:]})
    if fmt == "adjacency-json":
        adj = json.loads(text)
        edges = {(u, e["target"]): e["weight"] for u, lst in adj.items() for e in lst}
        return UserInteractionGraph(edges, nodes=adj)
    raise ValueError(f"cannot import format {fmt!r}")


def write_snapshot(graph: UserInteractionGraph, stream) -> None:
    """Binary snapshot: magic, length-prefixed JSON header, fixed-width edge triples."""
    names = sorted(graph.nodes)
    index = {n: i for i, n in enumerate(names)}
    edges = sorted(graph.iter_edges())
    meta = json.dumps({
        "version": SNAPSHOT_VERSION,
        "slice_label": graph.slice_label,
        "nodes": names,
        "edge_count": len(edges),
    }, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    stream.write(SNAPSHOT_MAGIC)
    stream.write(struct.pack(">I", len(meta)))
    stream.write(meta)
    for u, v, w in edges:
        stream.write(_EDGE_STRUCT.pack(index[u], index[v], w))


def read_snapshot(stream) -> UserInteractionGraph:
    if stream.read(4) != SNAPSHOT_MAGIC:
        raise ValueError("not a UIG snapshot (bad magic)")
    (n,) = struct.unpack(">I", stream.read(4))
    meta = json.loads(stream.read(n).decode("utf-8"))
    if meta.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {meta.get('version')}")
    names = meta["nodes"]
    raw = stream.read(_EDGE_STRUCT.size * meta["edge_count"])
    if len(raw) != _EDGE_STRUCT.size * meta["edge_count"]:
        raise ValueError("truncated snapshot")
    edges = {(names[u], names[v]): w for u, v, w in _EDGE_STRUCT.iter_unpack(raw)}
    return UserInteractionGraph(edges, nodes=names, slice_label=meta["slice_label"])
