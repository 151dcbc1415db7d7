import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import minimal_sets, naive_era, naive_gqk
from patterncode.errors import BudgetExceeded, InfeasibleK
from patterncode.hypergraph import (
    Hypergraph,
    complement_edges,
    complete_uniform,
    cycle,
    err_to_era,
    err_to_era_sources,
    feasibility,
    generate,
    gqk,
    gqk_vertex_count,
    gqk_vertices,
    lift_era_to_err,
    lifted_era_sources,
    load_graph,
    random_hypergraph,
    save_graph,
)
from patterncode.rng import make_rng


def edge_sets(n, max_edges=8):
    edge = st.lists(st.integers(0, n - 1), max_size=n).map(lambda e: tuple(sorted(set(e))))
    return st.lists(edge, max_size=max_edges)


@st.composite
def graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    return Hypergraph(n, draw(edge_sets(n)))


def test_constructor_dedups_and_sorts():
    g = Hypergraph(4, [[3, 1], [0, 1], [1, 3], [2]])
    assert g.edges == ((0, 1), (1, 3), (2,))
    with pytest.raises(ValueError):
        Hypergraph(3, [[0, 3]])


def test_complete_uniform():
    assert complete_uniform(4, 2).edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert complete_uniform(6, 3).num_edges == 20


def test_cycle():
    g = cycle(6)
    assert g.n == 6 and g.num_edges == 6
    assert (0, 5) in g.edges and (2, 3) in g.edges
    with pytest.raises(ValueError):
        cycle(2)


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_canonical_order_matches_python_sort(g):
    assert list(g.edges) == sorted(set(g.edges))


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_complement_is_involution(g):
    assert complement_edges(complement_edges(g)) == g


def test_complement_examples():
    assert (2, 3, 4, 5) in complement_edges(cycle(6)).edges
    comp = complement_edges(complete_uniform(4, 2))
    assert comp == complete_uniform(4, 2)


@settings(max_examples=120, deadline=None)
@given(graphs(max_n=8))
def test_err_to_era_against_reference(g):
    era, sources = err_to_era_sources(g)
    assert list(era.edges) == naive_era(g.edges, g.n)
    m = g.num_edges
    assert era.num_edges <= m * (m + 1) // 2
    for e, (i, j) in zip(era.edges, sources):
        u = set(g.edge(i)) | set(g.edge(j))
        assert e == tuple(v for v in range(g.n) if v not in u)
    pruned = err_to_era(g, prune=True)
    assert list(pruned.edges) == minimal_sets(naive_era(g.edges, g.n))


def test_err_to_era_examples():
    assert (2, 5) in err_to_era(cycle(6)).edges
    assert err_to_era(Hypergraph(3, [[0]])).edges == ((1, 2),)
    era = err_to_era(complete_uniform(6, 2))
    assert min(len(e) for e in era.edges) == 2
    assert sorted({len(e) for e in era.edges}) == [2, 3, 4]
    assert err_to_era(cycle(6), prune=True).edges == (
        (0, 1), (0, 3), (0, 5), (1, 2), (1, 4), (2, 3), (2, 5), (3, 4), (4, 5),
    )


def test_gqk_small_against_reference():
    for q, k in [(2, 2), (2, 3)]:
        verts, edges = naive_gqk(q, k)
        g = gqk(q, k)
        assert [tuple(v) for v in gqk_vertices(q, k).tolist()] == verts
        assert list(g.edges) == edges


def test_gqk22_octahedron():
    g = gqk(2, 2)
    assert g.n == 6 and g.num_edges == 12
    assert (g.degrees == 4).all()
    verts = gqk_vertices(2, 2)
    for u in range(6):
        comp = [w for w in range(6) if ((verts[u] + verts[w]) == 1).all()]
        assert len(comp) == 1 and (min(u, comp[0]), max(u, comp[0])) not in g.edges


def test_gqk32_counts():
    g = gqk(3, 2)
    assert g.n == 1680 == math.factorial(9) // math.factorial(3) ** 3
    assert g.num_edges == 181440
    assert (g.degrees == 216).all()
    verts = gqk_vertices(3, 2)
    tuples = verts[g.edge_array()[:, 0]] * 3 + verts[g.edge_array()[:, 1]]
    assert (np.sort(tuples, axis=1) == np.arange(9)).all()


def test_gqk_vertex_budget():
    assert gqk_vertex_count(2, 4) == math.factorial(16) // math.factorial(8) ** 2
    with pytest.raises(BudgetExceeded):
        gqk(3, 3)


def test_generate_dispatch():
    assert generate("cycle", n=5) == cycle(5)
    assert generate("complete_uniform", n=4, k=3) == complete_uniform(4, 3)
    with pytest.raises(ValueError):
        generate("petersen")


def test_lift_examples():
    g, info = lift_era_to_err(Hypergraph(4, [[0, 1], [2, 3]]), 2)
    assert info.N == 6 and info.special_edge == (4, 5)
    assert g.edges == ((0, 1), (2, 3), (4, 5))
    g, info = lift_era_to_err(gqk(2, 2), 2)
    assert g.n == 10 and info.special_edge == (6, 7, 8, 9)
    assert g.num_edges == 13 and set(g.edge_sizes.tolist()) == {4}
    with pytest.raises(InfeasibleK):
        lift_era_to_err(Hypergraph(4, [[0]]), 2)
    with pytest.raises(InfeasibleK):
        lift_era_to_err(Hypergraph(3, [[0, 1]]), 2)


def test_lifted_era_shortcut_matches_generic():
    for seed in range(120):
        rng = make_rng(seed)
        n = int(rng.integers(4, 8))
        g0 = random_hypergraph(n, int(rng.integers(1, 6)), 2, n, rng)
        fast, fsrc = lifted_era_sources(g0, 2)
        g_lift, _ = lift_era_to_err(g0, 2)
        slow, _ = err_to_era_sources(g_lift, prune=True)
        assert fast == slow
        for e, (i, j) in zip(fast.edges, fsrc):
            u = set(g_lift.edge(i)) | set(g_lift.edge(j))
            assert e == tuple(v for v in range(g_lift.n) if v not in u)


def test_feasibility_examples():
    f = feasibility(Hypergraph(3, [[0]]), 2, "erasure")
    assert not f and f.witness == ((0,),)
    f = feasibility(Hypergraph(3, [[0]]), 2, "error")
    assert f and f.size_cutoff_ok is False and f.note
    assert feasibility(cycle(6), 2, "detect")
    assert not feasibility(Hypergraph(4, [[0, 1, 2]]), 2, "detect")
    f = feasibility(Hypergraph(6, [[0, 1], [2, 3]]), 3, "error")
    assert not f and set(f.witness) == {(0, 1), (2, 3)}


@settings(max_examples=100, deadline=None)
@given(graphs(max_n=8), st.integers(1, 3))
def test_error_feasibility_equals_era_sizes(g, k):
    era = naive_era(g.edges, g.n)
    assert bool(feasibility(g, k, "error")) == all(len(e) >= k for e in era)


def test_json_round_trip(tmp_path):
    g = cycle(7)
    path = tmp_path / "g.json"
    save_graph(g, path)
    h = load_graph(path)
    assert h == g and h.label == "cycle(7)"
    assert Hypergraph.from_json({"n": 3, "edges": [[2, 1], [1, 2]]}).edges == ((1, 2),)
    with pytest.raises(ValueError):
        Hypergraph.from_json({"edges": []})


def test_empty_and_zero_vertex_graphs():
    g = Hypergraph(0, [])
    assert g.num_edges == 0
    g = Hypergraph(3, [[]])
    assert g.edges == ((),) and not feasibility(g, 1, "erasure")
