from __future__ import annotations

import csv
import io
import sys
from pathlib import Path

import pytest

from uigkit.ingest import InteractionRecord, month_of

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

JAN_2022 = 1641038400  # 2022-01-01 12:00 UTC


def rec(author, item_id, parent_id="", parent_author="", *, created=JAN_2022,
        ups=0, downs=0, score=None, body="", title="", sentiment="positive"):
    return InteractionRecord(
        author=author, author_id=f"t2_{author}", created=created, ups=ups,
        downs=downs, score=ups - downs if score is None else score,
        item_id=item_id, parent_id=parent_id, permalink="", body=body,
        title=title, parent_author=parent_author, month_key=month_of(created),
        sentiment=sentiment,
    )


def csv_text(header, *rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@pytest.fixture
def fixture_dump() -> Path:
    return DATA / "fixture_dump.csv"


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
