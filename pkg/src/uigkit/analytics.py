"""User rankings, interaction heatmaps and content statistics."""

from __future__ import annotations

import csv
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import UserInteractionGraph
from .ingest import NEGATIVE, NEUTRAL, POSITIVE, InteractionRecord

logger = logging.getLogger(__name__)

METRICS = ("upvotes", "activity", "downvotes", "score", "lowest_score")


@dataclass(frozen=True)
class RankingEntry:
    user: str
    metric: str
    value: int
    rank: int


def user_totals(records: Iterable[InteractionRecord], metric: str) -> dict[str, int]:
    """Per-user metric value over posts and comments together."""
    totals: dict[str, int] = defaultdict(int)
    if metric == "upvotes":
        for r in records:
            totals[r.author] += r.ups
    elif metric == "activity":
        for r in records:
            totals[r.author] += 1
    elif metric == "downvotes":
        for r in records:
            totals[r.author] += r.downs
    elif metric == "score":
        for r in records:
            totals[r.author] += r.score
    elif metric == "lowest_score":
        # negated so the usual descending order puts the lowest score first
        for r in records:
            totals[r.author] -= r.score
    else:
        raise ValueError(f"unknown metric {metric!r}; expected one of {', '.join(METRICS)}")
    return dict(totals)


def rank_users(records: Iterable[InteractionRecord], metric: str, k: int = 10) -> list[RankingEntry]:
    if k <= 0:
        raise ValueError("k must be positive")
    totals = user_totals(records, metric)
    ordered = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return [RankingEntry(u, metric, v, i) for i, (u, v) in enumerate(ordered, start=1)]


def downvote_metric(records: Sequence[InteractionRecord]) -> str:
    """``downvotes`` unless the dump never populated it, then ``lowest_score``."""
    if any(r.downs for r in records):
        return "downvotes"
    logger.warning("downs column is all zero; ranking downvoted users by lowest total score")
    return "lowest_score"


def write_ranking_csv(entries: Iterable[RankingEntry], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["rank", "user", "metric", "value"])
    for e in entries:
        w.writerow([e.rank, e.user, e.metric, e.value])


@dataclass
class HeatmapMatrix:
    users: list[str]
    cells: list[list[int]]
    missing: list[str]

    def off_diagonal_mass(self) -> int:
        return sum(self.cells[a][b] for a in range(len(self.users))
                   for b in range(len(self.users)) if a != b)

    def write_csv(self, stream) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow([""] + self.users)
        for user, row in zip(self.users, self.cells):
            w.writerow([user] + row)


def interaction_heatmap(graph: UserInteractionGraph, users: Sequence[str]) -> HeatmapMatrix:
    """``cells[a][b]``: comments by ``users[a]`` on content of ``users[b]``."""
    if not users:
        raise ValueError("heatmap needs at least one user")
    users = list(users)
    missing = [u for u in users if u not in graph]
    if missing:
        logger.warning("heatmap users absent from graph: %s", ", ".join(missing))
    cells = [[graph.weight(a, b) for b in users] for a in users]
    return HeatmapMatrix(users, cells, missing)


def overlap(a: Sequence[str], b: Sequence[str]) -> float:
    """Shared fraction of two lists, ``|A & B| / max(|A|, |B|)``."""
    if not a or not b:
        raise ValueError("overlap of an empty list")
    return len(set(a) & set(b)) / max(len(set(a)), len(set(b)))


@dataclass(frozen=True)
class Concentration:
    p: float
    prefix_size: int
    active_users: int

    @property
    def fraction(self) -> float:
        return self.prefix_size / self.active_users


def concentration(records: Iterable[InteractionRecord], p: float) -> Concentration:
    """Fewest most-active users whose records cover at least ``p`` of all records."""
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    counts = Counter(r.author for r in records)
    if not counts:
        raise ValueError("concentration of an empty record set")
    need = Fraction(str(p)) * sum(counts.values())
    covered = 0
    for n, c in enumerate(sorted(counts.values(), reverse=True), start=1):
        covered += c
        if covered >= need:
            return Concentration(p, n, len(counts))
    raise AssertionError("unreachable: full prefix covers everything")


def sentiment_summary(records: Iterable[InteractionRecord]) -> dict:
    counts = Counter(r.sentiment for r in records)
    labeled = counts[POSITIVE] + counts[NEGATIVE] + counts[NEUTRAL]

    def frac(label):
        return counts[label] / labeled if labeled else 0.0

    return {
        "positive_fraction": frac(POSITIVE),
        "negative_fraction": frac(NEGATIVE),
        "neutral_fraction": frac(NEUTRAL),
        "labeled": labeled,
        "unknown": sum(counts.values()) - labeled,
    }
