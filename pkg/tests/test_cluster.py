import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles.brute import reachability_partition
from uigkit.cluster import (
    ClusterConfig,
    cluster_census,
    ctup_graph,
    ctup_pairs,
    strong_clusters,
    tarjan_scc,
    tie_score,
    weak_clusters,
    write_tiepairs_csv,
)
from uigkit.graph import UserInteractionGraph


def scc_sets(nodes, edges):
    succ = {u: [] for u in nodes}
    for u, v in edges:
        succ[u].append(v)
    return {frozenset(c) for c in tarjan_scc(nodes, succ.__getitem__)}


def random_digraph(rng, n, p):
    nodes = list(range(n))
    edges = [(u, v) for u in nodes for v in nodes if rng.random() < p]
    return nodes, edges


def test_cycle():
    assert scc_sets("ABC", [("A", "B"), ("B", "C"), ("C", "A")]) == {frozenset("ABC")}


def test_chain():
    assert scc_sets("ABC", [("A", "B"), ("B", "C")]) == {frozenset(x) for x in "ABC"}


def test_reverse_topological_order():
    comps = tarjan_scc("ABC", {"A": ["B"], "B": ["C"], "C": []}.__getitem__)
    assert comps == [["C"], ["B"], ["A"]]


def test_deep_graph_no_recursion_limit():
    n = 200_000
    succ = {i: [(i + 1) % n] for i in range(n)}
    (comp,) = tarjan_scc(range(n), succ.__getitem__)
    assert len(comp) == n


def test_matches_warshall_random():
    rng = random.Random(11)
    for _ in range(500):
        nodes, edges = random_digraph(rng, rng.randint(0, 9), rng.choice([0.1, 0.3, 0.5]))
        assert scc_sets(nodes, edges) == reachability_partition(nodes, edges)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 7).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, max(n - 1, 0)),
                                                        st.integers(0, max(n - 1, 0))), max_size=25))))
def test_matches_warshall_hypothesis(case):
    n, edges = case
    edges = edges if n else []
    assert scc_sets(list(range(n)), edges) == reachability_partition(range(n), edges)


def test_tie_score_values():
    assert tie_score(3, 7) == Fraction(25, 4) == 6.25
    assert tie_score(5, 5) == 25
    assert tie_score(0, 3) == Fraction(3) / Fraction(6, 5)
    assert tie_score(3, 7, 0.4) == Fraction(25, 4)
    assert tie_score(3, 7, Fraction(1, 2)) == 5


@settings(max_examples=300)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_tie_score_symmetric(a, b):
    assert tie_score(a, b) == tie_score(b, a)


@settings(max_examples=300)
@given(st.integers(0, 1000), st.integers(0, 1000), st.integers(1, 50))
def test_tie_score_monotone_at_fixed_diff(a, d, bump):
    # (a, a + d) -> (a + bump, a + bump + d): same difference, larger sum
    assert tie_score(a + bump, a + bump + d) > tie_score(a, a + d)


def test_fig_wc_shape():
    g = UserInteractionGraph({("A", "C"): 1, ("C", "A"): 1, ("C", "B"): 1, ("B", "D"): 1, ("D", "A"): 1})
    wc = weak_clusters(g)
    assert wc.clusters == [frozenset("ABCD")] and not wc.unclustered


def test_one_way_edges_no_wc():
    g = UserInteractionGraph({("A", "B"): 5, ("B", "C"): 5, ("C", "C"): 2})
    wc = weak_clusters(g)
    assert len(wc) == 0 and wc.unclustered == frozenset("ABC")


def test_ctup_spot_values():
    g = UserInteractionGraph({("B", "C"): 7, ("C", "B"): 3, ("D", "E"): 5, ("E", "D"): 5,
                              ("F", "G"): 2, ("G", "F"): 2, ("H", "H"): 9})
    pairs = ctup_pairs(g)
    assert [(p.user_i, p.user_j, p.c_ij, p.c_ji, p.tie_score) for p in pairs] == [
        ("D", "E", 5, 5, 25),
        ("B", "C", 7, 3, Fraction(25, 4)),
    ]


def test_ctup_threshold_configurable():
    g = UserInteractionGraph({("F", "G"): 2})
    assert ctup_pairs(g, ClusterConfig(ctup_threshold=2))[0].tie_score == Fraction(2) / Fraction(2, 5) / 2


def test_tiepairs_csv():
    g = UserInteractionGraph({("B", "C"): 7, ("C", "B"): 3, ("A", "Z"): 3})
    buf = io.StringIO()
    write_tiepairs_csv(ctup_pairs(g), buf)
    assert buf.getvalue() == (
        "user_i,user_j,c_ij,c_ji,tie_score\nB,C,7,3,6.2500\nA,Z,3,0,2.5000\n")


def test_fig_sc_shape():
    edges = {}
    for a, b in [("A", "B"), ("A", "D"), ("B", "C"), ("C", "D")]:
        edges[(a, b)] = 3
        edges[(b, a)] = 4
    g = UserInteractionGraph(edges)
    assert strong_clusters(g).clusters == [frozenset("ABCD")]


def test_ctup_restriction_keeps_weak_direction():
    # A->B 3 makes {A,B} a CTUP; the single B->A comment stays in the restricted graph
    g = UserInteractionGraph({("A", "B"): 3, ("B", "A"): 1, ("B", "C"): 1, ("C", "B"): 1})
    assert ctup_graph(g).edges() == {("A", "B"): 3, ("B", "A"): 1}
    assert strong_clusters(g).clusters == [frozenset("AB")]
    assert weak_clusters(g).clusters == [frozenset("ABC")]


def test_no_ctup_no_sc():
    g = UserInteractionGraph({("A", "B"): 2, ("B", "A"): 2})
    assert len(strong_clusters(g)) == 0
    assert len(weak_clusters(g)) == 1


def test_two_cycle_census():
    for w, expect_sc in ((2, 0), (3, 1)):
        g = UserInteractionGraph({("A", "B"): w, ("B", "A"): w})
        census = cluster_census(weak_clusters(g), strong_clusters(g))
        assert census.sizes == {2: {"wc": 1, "sc": expect_sc}}


def test_census_shares():
    g = UserInteractionGraph({("A", "B"): 1, ("B", "A"): 1, ("B", "C"): 1, ("C", "B"): 1, ("D", "E"): 1})
    census = cluster_census(weak_clusters(g), strong_clusters(g), active_users=10, total_users=20)
    assert census.largest_wc == 3
    assert census.largest_wc_share == 0.3
    assert census.unclustered_share == 0.7
    assert census.unclustered_share_total == 17 / 20


def test_census_empty():
    g = UserInteractionGraph()
    census = cluster_census(weak_clusters(g), strong_clusters(g))
    assert census.wc_count == census.sc_count == 0
    assert census.largest_wc_share == 0.0


def test_labels():
    g = UserInteractionGraph({("A", "B"): 1, ("B", "A"): 1, ("C", "A"): 1})
    assert weak_clusters(g).labels() == {"A": 0, "B": 0, "C": -1}


def test_config_validation():
    with pytest.raises(ValueError):
        ClusterConfig(ctup_threshold=0)
    with pytest.raises(ValueError):
        ClusterConfig(diff_coefficient=0)
    assert ClusterConfig(diff_coefficient="0.4").diff_coefficient == Fraction(2, 5)


weighted_graphs = st.dictionaries(
    st.tuples(st.sampled_from("abcdefg"), st.sampled_from("abcdefg")),
    st.integers(1, 6), max_size=30).map(UserInteractionGraph)


@settings(max_examples=200, deadline=None)
@given(weighted_graphs, st.integers(1, 5))
def test_refinement(g, tau):
    cfg = ClusterConfig(ctup_threshold=tau)
    weak = weak_clusters(g, cfg)
    for sc in strong_clusters(g, cfg).clusters:
        assert sum(sc <= wc for wc in weak.clusters) == 1


@settings(max_examples=200, deadline=None)
@given(weighted_graphs)
def test_cluster_sets_partition_nodes(g):
    for cs in (weak_clusters(g), strong_clusters(g)):
        seen = set()
        for c in cs.clusters:
            assert len(c) >= 2 and seen.isdisjoint(c)
            seen |= c
        assert seen | cs.unclustered == g.nodes and seen.isdisjoint(cs.unclustered)


@settings(max_examples=200, deadline=None)
@given(weighted_graphs, st.permutations("abcdefg"))
def test_ctup_relabeling(g, perm):
    mapping = dict(zip("abcdefg", perm))
    renamed = UserInteractionGraph({(mapping[u], mapping[v]): w for (u, v), w in g.edges().items()})

    def canon(pairs, f=lambda x: x):
        out = set()
        for p in pairs:
            i, j = f(p.user_i), f(p.user_j)
            counts = (p.c_ij, p.c_ji) if i < j else (p.c_ji, p.c_ij)
            out.add((min(i, j), max(i, j), counts, p.tie_score))
        return out

    assert canon(ctup_pairs(g), mapping.__getitem__) == canon(ctup_pairs(renamed))


@settings(max_examples=200, deadline=None)
@given(weighted_graphs)
def test_ctup_sorted(g):
    scores = [p.tie_score for p in ctup_pairs(g)]
    assert scores == sorted(scores, reverse=True)
    for p in ctup_pairs(g):
        assert p.user_i < p.user_j and max(p.c_ij, p.c_ji) >= 3
