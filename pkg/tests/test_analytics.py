import io
import random
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rec
from uigkit.analytics import (
    concentration,
    downvote_metric,
    interaction_heatmap,
    overlap,
    rank_users,
    sentiment_summary,
    write_ranking_csv,
)
from uigkit.graph import UserInteractionGraph, build_uig
from uigkit.ingest import resolve_parents


def test_upvote_sum():
    records = [rec("u", "p1", ups=5), rec("u", "p2", ups=2), rec("u", "p3", ups=1),
               rec("u", "c1", "p9", "v", ups=2)]
    (entry,) = rank_users(records, "upvotes", 10)
    assert (entry.user, entry.value, entry.rank) == ("u", 10, 1)


def test_ranking_hand_order():
    records = (
        [rec("eve", f"e{i}", ups=1) for i in range(4)]
        + [rec("bob", "b1", ups=4)]
        + [rec("amy", "a1", ups=4)]
        + [rec("dan", "d1", ups=9, downs=3)]
        + [rec("cat", "c1", ups=0, downs=5)]
    )
    assert [(e.user, e.value) for e in rank_users(records, "upvotes", 5)] == [
        ("dan", 9), ("amy", 4), ("bob", 4), ("eve", 4), ("cat", 0)]
    assert [(e.user, e.value) for e in rank_users(records, "activity", 2)] == [("eve", 4), ("amy", 1)]
    assert [e.user for e in rank_users(records, "downvotes", 2)] == ["cat", "dan"]
    assert [e.rank for e in rank_users(records, "upvotes", 5)] == [1, 2, 3, 4, 5]


def test_lowest_score_fallback():
    records = [rec("a", "1", ups=5), rec("b", "2", ups=0, score=-4), rec("c", "3", ups=1)]
    assert downvote_metric(records) == "lowest_score"
    assert [(e.user, e.value) for e in rank_users(records, "lowest_score", 2)] == [("b", 4), ("c", -1)]
    records.append(rec("d", "4", downs=1))
    assert downvote_metric(records) == "downvotes"


def test_rank_usage_errors():
    with pytest.raises(ValueError):
        rank_users([rec("a", "1")], "upvotes", 0)
    with pytest.raises(ValueError):
        rank_users([rec("a", "1")], "karma", 3)


def test_ranking_csv():
    buf = io.StringIO()
    write_ranking_csv(rank_users([rec("a", "1", ups=3)], "upvotes"), buf)
    assert buf.getvalue() == "rank,user,metric,value\n1,a,upvotes,3\n"


records_strategy = st.lists(
    st.builds(lambda a, i, u, d: rec(a, str(i), ups=u, downs=d),
              st.sampled_from(["ann", "bob", "cy", "dee", "eli", "fay"]),
              st.integers(), st.integers(0, 20), st.integers(0, 5)),
    max_size=40)


@settings(max_examples=150, deadline=None)
@given(records_strategy, st.sampled_from(["upvotes", "activity", "downvotes"]), st.integers(1, 8))
def test_rank_matches_groupby(records, metric, k):
    totals = defaultdict(int)
    for r in records:
        totals[r.author] += {"upvotes": r.ups, "activity": 1, "downvotes": r.downs}[metric]
    expected = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    got = rank_users(records, metric, k)
    assert [(e.user, e.value) for e in got] == expected
    assert all(a.value >= b.value for a, b in zip(got, got[1:]))


def test_heatmap_cells():
    g = UserInteractionGraph({("A", "B"): 4})
    hm = interaction_heatmap(g, ["A", "B"])
    assert hm.cells == [[0, 4], [0, 0]]


def test_heatmap_missing_user_warns(caplog):
    hm = interaction_heatmap(UserInteractionGraph({("A", "B"): 1}), ["A", "Z"])
    assert hm.missing == ["Z"] and hm.cells == [[0, 0], [0, 0]]
    assert "Z" in caplog.text


def test_heatmap_empty_users():
    with pytest.raises(ValueError):
        interaction_heatmap(UserInteractionGraph(), [])


def test_heatmap_csv():
    hm = interaction_heatmap(UserInteractionGraph({("A", "B"): 4, ("B", "B"): 1}), ["A", "B"])
    buf = io.StringIO()
    hm.write_csv(buf)
    assert buf.getvalue() == ",A,B\nA,0,4\nB,0,1\n"


def test_heatmap_matches_raw_recount():
    rng = random.Random(1)
    users = [f"u{i}" for i in range(8)]
    records, items = [], []
    for i in range(300):
        author = rng.choice(users)
        if items and rng.random() < 0.8:
            pid, pauthor = rng.choice(items)
            records.append(rec(author, f"i{i}", f"t1_{pid}", "" if rng.random() < 0.5 else pauthor))
        else:
            records.append(rec(author, f"i{i}"))
        items.append((f"i{i}", author))
    chosen = users[:5]
    hm = interaction_heatmap(build_uig(resolve_parents(records)[0]), chosen)
    author_of = dict(items)
    expect = [[0] * 5 for _ in range(5)]
    for r in records:
        if r.parent_id:
            target = author_of[r.parent_id[3:]]
            if r.author in chosen and target in chosen:
                expect[chosen.index(r.author)][chosen.index(target)] += 1
    assert hm.cells == expect


def test_heatmap_row_sums_bounded_by_out_weight():
    g = UserInteractionGraph({("A", "B"): 2, ("A", "C"): 5, ("A", "A"): 1, ("B", "A"): 3})
    hm = interaction_heatmap(g, ["A", "B"])
    assert sum(hm.cells[0]) == 3 <= g.out_weight("A")


@pytest.mark.parametrize("a,b,expected", [
    (list("abc"), list("abc"), 1.0),
    (list("abc"), list("xyz"), 0.0),
    (list("abcdefghij"), list("abcdefghxy"), 0.8),
    (list("ab"), list("abcd"), 0.5),
])
def test_overlap(a, b, expected):
    assert overlap(a, b) == expected


def test_overlap_empty():
    with pytest.raises(ValueError):
        overlap([], ["a"])


def test_concentration_uniform():
    records = [rec(f"u{i}", str(i)) for i in range(10)]
    c = concentration(records, 0.5)
    assert (c.prefix_size, c.fraction) == (5, 0.5)
    c = concentration(records, 0.3)  # 0.3 * 10 must not round up to 4
    assert c.prefix_size == 3


def test_concentration_single_author():
    records = [rec("boss", str(i)) for i in range(20)] + [rec("x", "x"), rec("y", "y")]
    c = concentration(records[:20], 0.9)
    assert c.fraction == 1.0
    c = concentration(records, 0.9)
    assert (c.prefix_size, c.active_users) == (1, 3)


def test_concentration_errors():
    with pytest.raises(ValueError):
        concentration([], 0.5)
    with pytest.raises(ValueError):
        concentration([rec("a", "1")], 0)


def test_concentration_power_law_prefix_scan():
    rng = random.Random(6)
    records = []
    for i in range(60):
        for j in range(int(200 / (i + 1) ** 1.3) + 1):
            records.append(rec(f"u{i:02d}", f"{i}-{j}"))
    rng.shuffle(records)
    counts = sorted((sum(1 for r in records if r.author == u) for u in {r.author for r in records}),
                    reverse=True)
    for p in (0.1, 0.25, 0.5, 0.8, 0.99, 1.0):
        brute = next(n for n in range(1, len(counts) + 1) if sum(counts[:n]) * 100 >= p * 100 * len(records))
        assert concentration(records, p).prefix_size == brute


@settings(max_examples=100, deadline=None)
@given(records_strategy.filter(bool), st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_concentration_monotone(records, p, q):
    lo, hi = sorted((p, q))
    assert concentration(records, lo).fraction <= concentration(records, hi).fraction


def test_sentiment_all_neutral():
    s = sentiment_summary([rec("a", str(i), sentiment="neutral") for i in range(4)])
    assert s["neutral_fraction"] == 1.0 and s["positive_fraction"] == 0.0


def test_sentiment_negative_share():
    records = ([rec("a", f"n{i}", sentiment="negative") for i in range(1759)]
               + [rec("a", f"p{i}", sentiment="positive") for i in range(8241)]
               + [rec("a", f"u{i}", sentiment="unknown") for i in range(7)])
    s = sentiment_summary(records)
    assert s["negative_fraction"] == 0.1759
    assert s["positive_fraction"] == 0.8241
    assert (s["labeled"], s["unknown"]) == (10000, 7)


def test_sentiment_empty():
    assert sentiment_summary([])["positive_fraction"] == 0.0
