import math

import numpy as np
import pytest

from qgscatter.composer import Leaf, Parallel, Series, build_circuit, parallel, parse_circuit, resolve_source, series
from qgscatter.graph import GraphError, build_named, dump_graph, validate
from qgscatter.scattering import coefficient, transmission

KL = np.linspace(0.01, 2 * math.pi - 0.01, 97)


def t2(g):
    return coefficient(transmission(g, KL))


def test_series_counts_and_leads():
    q, x = build_named("Q"), build_named("X")
    g = series(q, x)
    assert len(g.vertices) == 12
    assert len(g.edges) == 17
    assert g.entrance == "s0.L" and g.exit == "s1.R"
    assert validate(g).all_degree_3


def test_series_order_symmetry():
    q, x = build_named("Q"), build_named("X")
    assert np.max(np.abs(t2(series(q, x)) - t2(series(x, q)))) < 1e-10


def test_series_preserves_junction_degree():
    d = build_named("D")
    g = series(d, d)
    deg = g.degrees()
    assert deg["s0.R"] == 3 and deg["s1.L"] == 3
    assert sorted(deg.values()) == [2, 2, 2, 2, 3, 3, 3, 3]


def test_series_rejects_missing_lead():
    d = build_named("D")
    with pytest.raises(GraphError):
        series(d.with_leads("L", None), d)


def test_parallel_counts_and_degrees():
    g = parallel(build_named("Q"), build_named("X"))
    assert len(g.vertices) == 14 and len(g.edges) == 20
    assert validate(g).all_degree_3
    assert g.degrees()["p.hL"] == 3


def test_parallel_dd():
    g = parallel(build_named("D"), build_named("D"))
    assert (len(g.vertices), len(g.edges)) == (10, 12)


def test_parallel_order_symmetry():
    q, x = build_named("Q"), build_named("X")
    assert np.max(np.abs(t2(parallel(q, x)) - t2(parallel(x, q)))) < 1e-10


def test_operands_not_mutated():
    q = build_named("Q")
    before = dump_graph(q)
    series(q, q)
    parallel(q, q)
    assert dump_graph(q) == before


@pytest.mark.parametrize(
    "expr,nv,ne",
    [("S(QXQ)", 18, 26), ("S(Q,X,Q)", 18, 26), ("P(P(QX)P(XQ))", 30, 44), ("P(P(Q,X),P(X,Q))", 30, 44),
     ("S(P(QQ)P(XX)P(QQ))", 42, 62), (" S ( Q , X ) ", 12, 17), ("Dtilde", 4, 5)],
)
def test_build_circuit_counts(expr, nv, ne):
    g = build_circuit(expr)
    assert (len(g.vertices), len(g.edges)) == (nv, ne)
    r = validate(g)
    assert r.ok and r.all_degree_3


def test_parse_tree():
    tree = parse_circuit("S(Q,P(X,D),Dtilde)")
    assert tree == Series((Leaf("Q"), Parallel((Leaf("X"), Leaf("D"))), Leaf("Dtilde")))
    assert str(tree) == "S(Q,P(X,D),Dtilde)"


def test_juxtaposed_names():
    assert parse_circuit("S(DtildeD)") == Series((Leaf("Dtilde"), Leaf("D")))


@pytest.mark.parametrize("bad", ["S()", "S(Q)", "P(Q)", "P(QXQ)", "S(Q,X", "S(Q,Y)", "", "   ", "Q X", "s(Q,X)", "@"])
def test_malformed_expressions(bad):
    with pytest.raises(GraphError):
        build_circuit(bad)


def test_fold_left_equals_nested():
    a = build_circuit("S(Q,X,Q)")
    b = build_circuit("S(S(Q,X),Q)")
    assert np.max(np.abs(t2(a) - t2(b))) < 1e-10


def test_file_leaf(tmp_path):
    p = tmp_path / "q.json"
    p.write_text(dump_graph(build_named("Q")))
    g = build_circuit(f"S(@{p},X)")
    ref = build_circuit("S(Q,X)")
    assert np.max(np.abs(t2(g) - t2(ref))) < 1e-10
    loaded = resolve_source(f"@{p}")
    assert (loaded.vertices, loaded.edges) == (build_named("Q").vertices, build_named("Q").edges)


def test_explicit_graph_leaf():
    g = build_circuit(Series((Leaf(build_named("X")), Leaf("X"))))
    assert len(g.vertices) == 12


def test_series_width_connecting_edge():
    # the connecting edge has unit length, so S(X,X) has edge count 17
    g = build_circuit("S(X,X)")
    assert len(g.edges) == 17
    assert all(e.mult == 1 for e in g.edges)
