"""Parsing and validation of post/comment dumps.

A dump is a CSV file with one row per post or comment.  Rows become
:class:`InteractionRecord` objects; rows that cannot anchor a graph node
(deleted authors, bad timestamps, missing ids) are dropped and logged.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable, Mapping, NamedTuple

logger = logging.getLogger(__name__)

POSITIVE, NEGATIVE, NEUTRAL, UNKNOWN = "positive", "negative", "neutral", "unknown"
SENTIMENTS = (POSITIVE, NEGATIVE, NEUTRAL, UNKNOWN)

DELETED_AUTHORS = frozenset({"", "[deleted]", "[removed]"})

# field name -> column name in the dump
DEFAULT_COLUMNS: dict[str, str] = {
    "author": "Author",
    "author_id": "author_fullname",
    "created": "created",
    "downs": "downs",
    "ups": "ups",
    "item_id": "post_id",
    "parent_id": "parent_id",
    "permalink": "permalink",
    "score": "Score",
    "body": "post",
    "title": "title",
    "parent_author": "Parent_post_author",
    "month_key": "group_per_month",
    "sentiment": "sentiment",
}
REQUIRED_FIELDS = ("author", "created", "item_id", "parent_id")

# Column order used when writing records back out.
DUMP_HEADER = [
    "Author", "author_fullname", "created", "downs", "ups", "post_id",
    "parent_id", "permalink", "Score", "post", "title",
    "subreddit_subscribers", "upvote_ratio", "post_name",
    "Parent_post_author", "group_per_month", "sentiment",
]

_TYPE_PREFIX = re.compile(r"^t\d_")

_SENTIMENT_ALIASES = {
    "positive": POSITIVE, "pos": POSITIVE, "1": POSITIVE,
    "negative": NEGATIVE, "neg": NEGATIVE, "-1": NEGATIVE,
    "neutral": NEUTRAL, "neu": NEUTRAL, "0": NEUTRAL,
}


class SchemaError(ValueError):
    """The dump header lacks columns the parser needs."""

    def __init__(self, missing: Iterable[str]):
        self.missing = sorted(missing)
        super().__init__("missing required columns: " + ", ".join(self.missing))


@dataclass(frozen=True, slots=True)
class InteractionRecord:
    author: str
    author_id: str
    created: int
    ups: int
    downs: int
    score: int
    item_id: str
    parent_id: str
    permalink: str
    body: str
    title: str
    parent_author: str
    month_key: str
    sentiment: str

    @property
    def is_post(self) -> bool:
        return not self.parent_id

    @property
    def is_comment(self) -> bool:
        return bool(self.parent_id)


class Interaction(NamedTuple):
    """One resolved comment: ``source`` commented on ``target``'s content."""

    source: str
    target: str
    month_key: str


@dataclass(frozen=True)
class DroppedRow:
    row_number: int
    reason: str


@dataclass
class ParseResult:
    records: list[InteractionRecord]
    dropped: list[DroppedRow] = field(default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.records) + len(self.dropped)


@dataclass
class IngestReport:
    total_users: int = 0
    active_users: int = 0
    post_count: int = 0
    comment_count: int = 0
    dropped_rows: int = 0
    dropped_reasons: dict[str, int] = field(default_factory=dict)
    date_range: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dropped_reasons"] = dict(sorted(self.dropped_reasons.items()))
        d["date_range"] = list(self.date_range) if self.date_range else None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def strip_type_prefix(item_id: str) -> str:
    """``t1_abc`` -> ``abc``; ids without a prefix pass through."""
    return _TYPE_PREFIX.sub("", item_id, count=1)


def month_of(created: int) -> str:
    return datetime.fromtimestamp(created, tz=timezone.utc).strftime("%Y-%m")


def _parse_timestamp(raw: str) -> int:
    raw = raw.strip()
    try:
        return int(float(raw))
    except ValueError:
        pass
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _parse_count(raw: str | None) -> int:
    if raw is None or not raw.strip():
        return 0
    return int(float(raw))


def normalize_sentiment(raw: str | None) -> str:
    if raw is None:
        return UNKNOWN
    return _SENTIMENT_ALIASES.get(raw.strip().lower(), UNKNOWN)


def _resolve_columns(header: list[str], columns: Mapping[str, str]) -> dict[str, int]:
    exact = {name.strip(): i for i, name in enumerate(header)}
    folded = {name.strip().lower(): i for i, name in enumerate(header)}
    positions = {}
    for fname, col in columns.items():
        col = col.strip()
        if col in exact:
            positions[fname] = exact[col]
        elif col.lower() in folded:
            positions[fname] = folded[col.lower()]
    missing = [columns.get(f, f) for f in REQUIRED_FIELDS if f not in positions]
    if missing:
        raise SchemaError(missing)
    return positions


def parse_records(
    stream: IO[str] | IO[bytes],
    columns: Mapping[str, str] | None = None,
    seen_ids: set[str] | None = None,
) -> ParseResult:
    """Parse a CSV dump into records, dropping rows that fail validation.

    ``columns`` maps record field names onto dump column names and is
    merged over :data:`DEFAULT_COLUMNS`.  Row numbers in the dropped log
    count data rows from 1 (the header is row 0).  Pass the same
    ``seen_ids`` set to several calls to drop duplicates across files.
    """
    if not isinstance(stream, io.TextIOBase):
        stream = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    mapping = dict(DEFAULT_COLUMNS)
    if columns:
        mapping.update(columns)

    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(mapping[f] for f in REQUIRED_FIELDS) from None
    pos = _resolve_columns(header, mapping)

    def cell(row: list[str], name: str) -> str:
        i = pos.get(name)
        if i is None or i >= len(row):
            return ""
        return row[i].strip()

    records: list[InteractionRecord] = []
    dropped: list[DroppedRow] = []
    if seen_ids is None:
        seen_ids = set()
    for n, row in enumerate(reader, start=1):
        if not any(c.strip() for c in row):
            dropped.append(DroppedRow(n, "blank_row"))
            continue
        author = cell(row, "author")
        if author in DELETED_AUTHORS:
            dropped.append(DroppedRow(n, "deleted_author"))
            continue
        item_id = strip_type_prefix(cell(row, "item_id"))
        if not item_id:
            dropped.append(DroppedRow(n, "missing_item_id"))
            continue
        try:
            created = _parse_timestamp(cell(row, "created"))
        except (ValueError, OverflowError, OSError):
            dropped.append(DroppedRow(n, "bad_timestamp"))
            continue
        try:
            ups = _parse_count(cell(row, "ups"))
            downs = _parse_count(cell(row, "downs"))
            score = _parse_count(cell(row, "score"))
        except (ValueError, OverflowError):
            dropped.append(DroppedRow(n, "bad_number"))
            continue
        if ups < 0 or downs < 0:
            dropped.append(DroppedRow(n, "bad_number"))
            continue
        if item_id in seen_ids:
            dropped.append(DroppedRow(n, "duplicate_id"))
            continue
        seen_ids.add(item_id)

        parent_author = cell(row, "parent_author")
        if parent_author in DELETED_AUTHORS:
            parent_author = ""
        records.append(
            InteractionRecord(
                author=author,
                author_id=cell(row, "author_id"),
                created=created,
                ups=ups,
                downs=downs,
                score=score,
                item_id=item_id,
                parent_id=cell(row, "parent_id"),
                permalink=cell(row, "permalink"),
                body=cell(row, "body"),
                title=cell(row, "title"),
                parent_author=parent_author,
                month_key=month_of(created),
                sentiment=normalize_sentiment(cell(row, "sentiment")),
            )
        )
    if dropped:
        logger.info("dropped %d of %d rows", len(dropped), len(records) + len(dropped))
    return ParseResult(records, dropped)


def read_dump(path, columns: Mapping[str, str] | None = None) -> ParseResult:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_records(fh, columns)


def write_records(records: Iterable[InteractionRecord], stream: IO[str]) -> None:
    """Write records with the default dump header; ``parse_records`` reads it back."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(DUMP_HEADER)
    for r in records:
        writer.writerow([
            r.author, r.author_id, r.created, r.downs, r.ups, r.item_id,
            r.parent_id, r.permalink, r.score, r.body, r.title,
            "", "", "", r.parent_author, r.month_key, r.sentiment,
        ])


def write_dropped_log(dropped: Iterable[DroppedRow], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["row_number", "reason"])
    for d in dropped:
        writer.writerow([d.row_number, d.reason])


def resolve_parents(
    records: Iterable[InteractionRecord],
) -> tuple[list[Interaction], list[InteractionRecord]]:
    """Pair each comment with the author of its immediate parent.

    The record's own ``parent_author`` wins; otherwise ``parent_id`` (type
    prefix stripped) is looked up among the records' item ids.  Returns
    the resolved interactions in input order and the comments that could
    not be resolved.
    """
    records = list(records)
    author_of = {r.item_id: r.author for r in records}
    pairs: list[Interaction] = []
    unresolved: list[InteractionRecord] = []
    for r in records:
        if r.is_post:
            continue
        target = r.parent_author or author_of.get(strip_type_prefix(r.parent_id), "")
        if not target:
            unresolved.append(r)
            continue
        pairs.append(Interaction(r.author, target, r.month_key))
    if unresolved:
        logger.info("%d comments with unresolved parents", len(unresolved))
    return pairs, unresolved


def validate_dataset(
    records: Iterable[InteractionRecord],
    dropped: Iterable[DroppedRow] = (),
) -> IngestReport:
    """Dataset summary counts; ``dropped`` feeds the reason histogram."""
    authors: set[str] = set()
    everyone: set[str] = set()
    posts = comments = 0
    lo = hi = None
    for r in records:
        authors.add(r.author)
        if r.parent_author:
            everyone.add(r.parent_author)
        if r.is_post:
            posts += 1
        else:
            comments += 1
        lo = r.created if lo is None else min(lo, r.created)
        hi = r.created if hi is None else max(hi, r.created)
    everyone |= authors
    reasons = Counter(d.reason for d in dropped)
    return IngestReport(
        total_users=len(everyone),
        active_users=len(authors),
        post_count=posts,
        comment_count=comments,
        dropped_rows=sum(reasons.values()),
        dropped_reasons=dict(reasons),
        date_range=(lo, hi) if lo is not None else None,
    )
