import json
import math

import numpy as np
import pytest

from qgscatter.graph import (
    CATALOG,
    GraphBuilder,
    GraphError,
    ScatteringGraph,
    build_named,
    degree,
    degree_histogram,
    dump_graph,
    graph_from_dict,
    graph_to_dict,
    linear_chain,
    load_graph,
    validate,
)


def test_add_vertex_alpha_passthrough():
    b = GraphBuilder()
    v0 = b.add_vertex(0.0)
    v1 = b.add_vertex(2.5)
    b.add_edge(v0, v1)
    g = b.set_leads(v0, v1).build()
    assert g.alpha(v0) == 0.0
    assert g.alpha(v1) == 2.5
    assert not g.is_neumann_kirchhoff()


def test_add_vertex_rejects_nan():
    with pytest.raises(GraphError):
        GraphBuilder().add_vertex(math.nan)


def test_parallel_edges_allowed():
    b = GraphBuilder()
    u, v = b.add_vertex(), b.add_vertex()
    e0 = b.add_edge(u, v, 1)
    e1 = b.add_edge(u, v, 1)
    g = b.set_leads(u, v).build()
    assert e0 != e1
    assert len(g.edges) == 2
    assert degree(g, u) == 3


def test_self_loop_rejected():
    b = GraphBuilder()
    u = b.add_vertex()
    with pytest.raises(GraphError):
        b.add_edge(u, u, 1)


def test_unknown_vertex_rejected():
    b = GraphBuilder()
    u = b.add_vertex()
    with pytest.raises(GraphError):
        b.add_edge(u, "nope")


@pytest.mark.parametrize("mult", [0, -1, 1.5])
def test_bad_multiplier(mult):
    b = GraphBuilder()
    u, v = b.add_vertex(), b.add_vertex()
    with pytest.raises(GraphError):
        b.add_edge(u, v, mult)


def test_degree_d_graph():
    g = build_named("D")
    assert degree(g, "L") == 3
    assert degree(g, "R") == 3
    assert degree(g, "a") == 2
    assert degree(g, "c") == 2


def test_degree_isolated_vertex():
    b = GraphBuilder()
    u, v, w = b.add_vertex(), b.add_vertex(), b.add_vertex()
    b.add_edge(u, v)
    g = b.set_leads(u, v).build()
    assert degree(g, w) == 0
    with pytest.raises(GraphError):
        degree(g, "missing")


def test_degree_independent_of_insertion_order(rng):
    g = build_named("Q")
    edges = list(g.edges)
    order = rng.permutation(len(edges))
    b = GraphBuilder()
    for v in reversed(g.vertices):
        b.add_vertex(v.alpha, id=v.id)
    for i in order:
        b.add_edge(edges[i].u, edges[i].v, edges[i].mult)
    h = b.set_leads(g.entrance, g.exit).build()
    assert h.degrees() == g.degrees()


def test_validate_q_all_degree_three():
    r = validate(build_named("Q"))
    assert r.ok and r.connected and r.n_leads == 2
    assert r.all_degree_3


def test_validate_d_not_all_degree_three():
    r = validate(build_named("D"))
    assert r.ok
    assert not r.all_degree_3
    assert sorted(r.degrees.values()) == [2, 2, 3, 3]


def test_validate_edgeless_two_leads_one_vertex():
    b = GraphBuilder()
    v = b.add_vertex()
    g = b.set_leads(v, v).build()
    r = validate(g)
    assert r.connected
    assert r.degree_set == {2}


def test_validate_reports_disconnected():
    b = GraphBuilder()
    u, v, w, x = (b.add_vertex() for _ in range(4))
    b.add_edge(u, v)
    b.add_edge(w, x)
    r = validate(b.set_leads(u, v).build())
    assert not r.connected
    assert not r.ok


def test_validate_reports_missing_lead():
    b = GraphBuilder()
    u, v = b.add_vertex(), b.add_vertex()
    b.add_edge(u, v)
    r = validate(b.set_leads(u, None).build())
    assert r.n_leads == 1
    assert not r.ok


@pytest.mark.parametrize(
    "name,nv,ne,deg3",
    [("D", 4, 4, False), ("H", 6, 6, False), ("Dtilde", 4, 5, True), ("Q", 6, 8, True), ("X", 6, 8, True)],
)
def test_catalog_counts(name, nv, ne, deg3):
    g = build_named(name)
    assert len(g.vertices) == nv
    assert len(g.edges) == ne
    assert g.n_leads == 2
    r = validate(g)
    assert r.ok
    assert r.all_degree_3 is deg3
    assert all(e.mult == 1 for e in g.edges)
    assert g.is_neumann_kirchhoff()


def test_catalog_order():
    assert CATALOG == ("D", "H", "Dtilde", "Q", "X")


def test_build_named_unknown():
    with pytest.raises(GraphError):
        build_named("foo")


def test_adjacency_matrix_matches_degrees():
    g = build_named("X")
    A = g.adjacency_matrix()
    assert np.array_equal(A, A.T)
    ids = g.vertex_ids
    deg = g.degrees()
    # leads count toward degree but not toward A
    for i, v in enumerate(ids):
        assert A[i].sum() + (v in (g.entrance, g.exit)) == deg[v]


def test_linear_chain():
    g = linear_chain(2)
    assert len(g.vertices) == 2 and len(g.edges) == 1
    assert set(g.degrees().values()) == {2}


def test_swapped_leads():
    g = build_named("Q")
    s = g.swapped()
    assert (s.entrance, s.exit) == (g.exit, g.entrance)


def test_dict_round_trip(catalog_graph):
    doc = graph_to_dict(catalog_graph)
    h = graph_from_dict(json.loads(json.dumps(doc)))
    assert h == catalog_graph


def test_load_graph_round_trip(tmp_path):
    b = GraphBuilder()
    u, v = b.add_vertex(0.0), b.add_vertex(1.25)
    b.add_edge(u, v, 2)
    b.add_edge(u, v, 1)
    g = b.set_leads(u, v).build()
    p = tmp_path / "g.json"
    p.write_text(dump_graph(g))
    assert load_graph(p) == g


def test_load_graph_errors(tmp_path):
    with pytest.raises(GraphError):
        load_graph(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(GraphError):
        load_graph(bad)
    incomplete = tmp_path / "inc.json"
    incomplete.write_text('{"vertices": [{"id": 1}]}')
    with pytest.raises(GraphError):
        load_graph(incomplete)


def test_graph_is_hashable_and_immutable():
    g = build_named("D")
    assert hash(g) == hash(build_named("D"))
    with pytest.raises(AttributeError):
        g.entrance = "a"


def test_degree_histogram():
    assert degree_histogram(build_named("H")) == {2: 4, 3: 2}


def test_direct_construction_validates():
    from qgscatter.graph import Edge, Vertex

    with pytest.raises(GraphError):
        ScatteringGraph((Vertex(0, 0.0),), (Edge(0, 0, 0, 1),), 0, 0)
    with pytest.raises(GraphError):
        ScatteringGraph((Vertex(0, 0.0),), (), 0, 5)
