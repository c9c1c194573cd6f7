"""``uigkit`` command line.

Every subcommand reads one or more dumps, applies the month filter and
writes its artifacts under ``--out`` with fixed file names.  Settings
resolve as: command-line flag, then ``UIGKIT_*`` environment variable,
then ``--config`` JSON file, then built-in default.

Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .analytics import downvote_metric, interaction_heatmap, rank_users, write_ranking_csv
from .cluster import (
    ClusterConfig,
    cluster_census,
    ctup_pairs,
    strong_clusters,
    weak_clusters,
    write_tiepairs_csv,
)
from .community import detect_communities
from .graph import EmptyGraphError, build_uig, export_graph, influencer, slice_by_month, write_snapshot
from .ingest import (
    DroppedRow,
    ParseResult,
    SchemaError,
    parse_records,
    resolve_parents,
    validate_dataset,
    write_dropped_log,
)
from .keywords import extract_keywords, write_keywords_csv
from .report import (
    RANKING_LABELS,
    ReportConfig,
    build_report,
    dumps_report,
    filter_months,
    round_floats,
)

logger = logging.getLogger("uigkit")

SUBCOMMANDS = ("validate", "build", "clusters", "ctup", "communities", "rank",
               "heatmap", "topics", "slice", "report")
FORMATS = ("json", "csv", "dot")
GRAPH_FILES = {"json": ("adjacency-json", "graph_adjacency.json"),
               "csv": ("edge-csv", "graph_edges.csv"),
               "dot": ("dot", "graph.dot")}
ENV_PREFIX = "UIGKIT_"

# option name -> (parser for env/config values, default)
SETTINGS = {
    "input": (lambda v: v if isinstance(v, list) else [v], None),
    "out": (str, "."),
    "months": (lambda v: ",".join(v) if isinstance(v, list) else str(v), ""),
    "top_k": (int, 10),
    "ctup_threshold": (int, 3),
    "diff_coeff": (str, "0.4"),
    "min_cluster_size": (int, 2),
    "metric": (str, None),
    "format": (str, "json,csv"),
    "max_removals": (int, None),
    "keywords_k": (int, 10),
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", help="dump CSV (repeatable)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--config", help="JSON settings file; keys match flag names")
    common.add_argument("--columns", help="JSON file mapping record fields to dump columns")
    common.add_argument("--months", help="YYYY-MM list or range, e.g. 2022-01..2022-06")
    common.add_argument("--top-k", type=int)
    common.add_argument("--ctup-threshold", type=int)
    common.add_argument("--diff-coeff")
    common.add_argument("--min-cluster-size", type=int)
    common.add_argument("--metric", help="ranking metric (upvotes, activity, downvotes, score, lowest_score)")
    common.add_argument("--format", help="comma list from json,csv,dot")
    common.add_argument("--max-removals", type=int, help="edge removals for community detection")
    common.add_argument("--keywords-k", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="uigkit", description="User interaction graph analysis.")
    parser.add_argument("--version", action="version", version=f"uigkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "validate": "dataset summary counts and dropped-row log",
        "build": "build the interaction graph and export it",
        "clusters": "weak and strong clusters with a size census",
        "ctup": "closely tied user pairs ranked by tie score",
        "communities": "edge-betweenness community detection",
        "rank": "top-k user rankings",
        "heatmap": "pairwise interaction matrix among top-k users",
        "topics": "top keyphrases from titles and bodies",
        "slice": "monthly graphs and their influencers",
        "report": "run everything and write summary_report.json",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def expand_months(spec: str) -> tuple[str, ...]:
    if not spec:
        return ()
    out: list[str] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            y, m = _month_tuple(lo)
            ey, em = _month_tuple(hi)
            if (y, m) > (ey, em):
                raise UsageError(f"empty month range {part!r}")
            while (y, m) <= (ey, em):
                out.append(f"{y:04d}-{m:02d}")
                y, m = (y + 1, 1) if m == 12 else (y, m + 1)
        elif part:
            y, m = _month_tuple(part)
            out.append(f"{y:04d}-{m:02d}")
    return tuple(sorted(set(out)))


def _month_tuple(s: str) -> tuple[int, int]:
    try:
        y, m = s.strip().split("-")
        y, m = int(y), int(m)
    except ValueError:
        raise UsageError(f"bad month {s!r}; expected YYYY-MM") from None
    if not 1 <= m <= 12:
        raise UsageError(f"bad month {s!r}")
    return y, m


@dataclass
class RunConfig:
    command: str
    inputs: list[Path]
    out: Path
    columns: dict[str, str] = field(default_factory=dict)
    months: tuple[str, ...] = ()
    top_k: int = 10
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    metric: str | None = None
    formats: tuple[str, ...] = ("json", "csv")
    max_removals: int | None = None
    keywords_k: int = 10

    def report_config(self) -> ReportConfig:
        return ReportConfig(
            top_k=self.top_k,
            cluster=self.cluster,
            months=self.months,
            upvote_metric="score" if self.metric == "score" else "upvotes",
            keywords_k=self.keywords_k,
            max_removals=self.max_removals or 0,
            columns=self.columns,
        )


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    file_settings: dict = {}
    if args.config:
        try:
            file_settings = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from None
        file_settings = {k.replace("-", "_"): v for k, v in file_settings.items()}

    values = {}
    for name, (conv, default) in SETTINGS.items():
        raw = getattr(args, name)
        env = environ.get(ENV_PREFIX + name.upper())
        try:
            if raw is not None:
                values[name] = raw
            elif env is not None:
                values[name] = conv(env) if name != "input" else env.split(os.pathsep)
            elif name in file_settings:
                values[name] = conv(file_settings[name])
            else:
                values[name] = default
        except (TypeError, ValueError):
            raise UsageError(f"bad value for {name}") from None

    if not values["input"]:
        raise UsageError("--input is required")
    if values["top_k"] < 1:
        raise UsageError("--top-k must be >= 1")
    formats = tuple(f.strip() for f in values["format"].split(",") if f.strip())
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise UsageError(f"unknown format(s): {', '.join(bad)}")
    try:
        cluster = ClusterConfig(values["ctup_threshold"], values["diff_coeff"], values["min_cluster_size"])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None
    if values["max_removals"] is not None and values["max_removals"] < 0:
        raise UsageError("--max-removals must be >= 0")

    columns = dict(file_settings.get("columns") or {})
    if args.columns:
        try:
            columns.update(json.loads(Path(args.columns).read_text(encoding="utf-8")))
        except FileNotFoundError:
            raise DataError(f"column mapping not found: {args.columns}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"column mapping is not valid JSON: {exc}") from None

    return RunConfig(
        command=args.command,
        inputs=[Path(p) for p in values["input"]],
        out=Path(values["out"]),
        columns=columns,
        months=expand_months(values["months"]),
        top_k=values["top_k"],
        cluster=cluster,
        metric=values["metric"],
        formats=formats,
        max_removals=values["max_removals"],
        keywords_k=values["keywords_k"],
    )


def load_inputs(cfg: RunConfig) -> tuple[ParseResult, list[str]]:
    """Parse every input; row numbers in the dropped log run on across files."""
    records, dropped, digests = [], [], []
    seen: set[str] = set()
    offset = 0
    for path in cfg.inputs:
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise DataError(f"input not found: {path}") from None
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from None
        digests.append(hashlib.sha256(data).hexdigest())
        try:
            parsed = parse_records(io.StringIO(data.decode("utf-8"), newline=""), cfg.columns, seen)
        except UnicodeDecodeError as exc:
            raise DataError(f"{path} is not UTF-8: {exc}") from None
        except SchemaError as exc:
            raise DataError(f"{path}: {exc}") from None
        records.extend(parsed.records)
        dropped.extend(DroppedRow(d.row_number + offset, d.reason) for d in parsed.dropped)
        offset += parsed.row_count
    return ParseResult(records, dropped), digests


def _write(path: Path, text: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(text, bytes):
        path.write_bytes(text)
    else:
        path.write_text(text, encoding="utf-8", newline="")


def _write_csv(path: Path, writer, *args) -> None:
    buf = io.StringIO()
    writer(*args, buf)
    _write(path, buf.getvalue())


def _dump_json(obj) -> str:
    return json.dumps(round_floats(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run(cfg: RunConfig) -> list[Path]:
    """Execute one subcommand and return the files written."""
    parsed, digests = load_inputs(cfg)
    records = filter_months(parsed.records, cfg.months)
    out = cfg.out
    written: list[Path] = []

    def emit(name: str, payload: str | bytes) -> None:
        path = out / name
        _write(path, payload)
        written.append(path)

    def emit_csv(name: str, writer, *args) -> None:
        path = out / name
        _write_csv(path, writer, *args)
        written.append(path)

    cmd = cfg.command
    if cmd == "report":
        report = build_report(parsed, cfg.report_config(), digests)
        emit("summary_report.json", dumps_report(report))
        return written

    if cmd == "validate":
        report = validate_dataset(records, parsed.dropped)
        emit("ingest_report.json", report.to_json() + "\n")
        emit_csv("dropped_rows.csv", write_dropped_log, parsed.dropped)
        return written

    pairs, _ = resolve_parents(records)
    graph = build_uig(pairs)
    if cfg.months:
        graph.slice_label = ",".join(cfg.months)

    if cmd == "build":
        buf = io.BytesIO()
        write_snapshot(graph, buf)
        emit("graph.uig", buf.getvalue())
        for f in cfg.formats:
            fmt, name = GRAPH_FILES[f]
            emit(name, export_graph(graph, fmt))
    elif cmd == "clusters":
        ingest = validate_dataset(records)
        weak = weak_clusters(graph, cfg.cluster)
        strong = strong_clusters(graph, cfg.cluster)
        census = cluster_census(weak, strong, ingest.active_users, ingest.total_users)
        emit("clusters_wc.json", weak.to_json() + "\n")
        emit("clusters_sc.json", strong.to_json() + "\n")
        emit("cluster_census.json", _dump_json(census.to_dict()))
    elif cmd == "ctup":
        emit_csv("tiepairs.csv", write_tiepairs_csv, ctup_pairs(graph, cfg.cluster))
    elif cmd == "communities":
        part = detect_communities(graph, cfg.max_removals)
        emit("communities.json", part.to_json() + "\n")
        emit_csv("community_sizes.csv", lambda s: part.write_size_histogram(s))
    elif cmd in ("rank", "heatmap"):
        for name, metric in _ranking_metrics(cfg, records):
            entries = rank_users(records, metric, cfg.top_k) if records else []
            if cmd == "rank":
                emit_csv(f"rank_{name}.csv", write_ranking_csv, entries)
            elif entries:
                hm = interaction_heatmap(graph, [e.user for e in entries])
                emit_csv(f"heatmap_{RANKING_LABELS.get(name, name)}.csv", hm.write_csv)
    elif cmd == "topics":
        corpus = [f"{r.title}. {r.body}" if r.title else r.body for r in records]
        emit_csv("keywords.csv", write_keywords_csv, extract_keywords(corpus, cfg.keywords_k))
    elif cmd == "slice":
        rows = []
        for month, g in slice_by_month(pairs).items():
            emit(f"slices/{month}.edges.csv", export_graph(g, "edge-csv"))
            d = influencer(g)
            rows.append([month, d.user, d.in_weight, d.out_weight, d.total_weight, len(g)])

        def write_rows(rows, stream):
            w = csv.writer(stream, lineterminator="\n")
            w.writerow(["month", "user", "in_weight", "out_weight", "total_weight", "nodes"])
            w.writerows(rows)

        emit_csv("influencers.csv", write_rows, rows)
    return written


def _ranking_metrics(cfg: RunConfig, records) -> list[tuple[str, str]]:
    if cfg.metric:
        if cfg.metric not in ("upvotes", "activity", "downvotes", "score", "lowest_score"):
            raise UsageError(f"unknown metric {cfg.metric!r}")
        metric = cfg.metric
        if metric == "downvotes" and records:
            metric = downvote_metric(records)
        return [(cfg.metric, metric)]
    down = downvote_metric(records) if records else "downvotes"
    return [("upvotes", "upvotes"), ("activity", "activity"), ("downvotes", down)]


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        written = run(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"uigkit: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, EmptyGraphError) as exc:
        print(f"uigkit: {exc}", file=sys.stderr)
        return 2
    for path in written:
        logger.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
