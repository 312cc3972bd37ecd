"""Metric scattering graphs: data model, validation and the named catalog.

A graph is an undirected multigraph with integer edge-length multipliers
(edge length = ``mult * ell``) and at most two semi-infinite leads, stored
as entrance/exit attributes of vertices rather than as edges.
"""
from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Mapping

import numpy as np

__all__ = [
    "GraphError",
    "Vertex",
    "Edge",
    "ScatteringGraph",
    "GraphBuilder",
    "ValidationReport",
    "degree",
    "validate",
    "build_named",
    "CATALOG",
    "linear_chain",
    "graph_to_dict",
    "graph_from_dict",
    "load_graph",
    "dump_graph",
]

VertexId = Hashable


class GraphError(ValueError):
    """Malformed graph or invalid graph operation."""


@dataclass(frozen=True)
class Vertex:
    id: VertexId
    alpha: float = 0.0


@dataclass(frozen=True)
class Edge:
    id: int
    u: VertexId
    v: VertexId
    mult: int = 1


@dataclass(frozen=True)
class ScatteringGraph:
    """Immutable metric graph with entrance/exit leads.

    ``entrance``/``exit`` may be ``None`` for graphs under construction;
    the solver requires both.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    entrance: VertexId | None = None
    exit: VertexId | None = None
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate vertex id")
        known = set(ids)
        for e in self.edges:
            if e.u not in known or e.v not in known:
                raise GraphError(f"edge {e.id} references an unknown vertex")
            if e.u == e.v:
                raise GraphError(f"edge {e.id} is a self-loop")
            if not isinstance(e.mult, (int, np.integer)) or e.mult < 1:
                raise GraphError(f"edge {e.id} has invalid length multiplier {e.mult!r}")
        for lead in (self.entrance, self.exit):
            if lead is not None and lead not in known:
                raise GraphError(f"lead attached to unknown vertex {lead!r}")

    @property
    def vertex_ids(self) -> list[VertexId]:
        return [v.id for v in self.vertices]

    def alpha(self, v: VertexId) -> float:
        return self._alphas[v]

    @property
    def _alphas(self) -> dict:
        return {v.id: v.alpha for v in self.vertices}

    @property
    def n_leads(self) -> int:
        return (self.entrance is not None) + (self.exit is not None)

    def is_neumann_kirchhoff(self) -> bool:
        return all(v.alpha == 0 for v in self.vertices)

    def degrees(self) -> dict[VertexId, int]:
        deg = {v.id: 0 for v in self.vertices}
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        for lead in (self.entrance, self.exit):
            if lead is not None:
                deg[lead] += 1
        return deg

    def adjacency_matrix(self) -> np.ndarray:
        """0/1 adjacency matrix in vertex order; only defined for simple graphs."""
        index = {vid: i for i, vid in enumerate(self.vertex_ids)}
        A = np.zeros((len(index), len(index)), dtype=int)
        for e in self.edges:
            i, j = index[e.u], index[e.v]
            if A[i, j]:
                raise GraphError("adjacency matrix undefined for graphs with parallel edges")
            A[i, j] = A[j, i] = 1
        return A

    def with_leads(self, entrance: VertexId | None, exit: VertexId | None) -> "ScatteringGraph":
        return ScatteringGraph(self.vertices, self.edges, entrance, exit, self.name)

    def swapped(self) -> "ScatteringGraph":
        """Same graph with entrance and exit exchanged."""
        return self.with_leads(self.exit, self.entrance)


class GraphBuilder:
    """Mutable helper that accumulates vertices and edges.

    >>> b = GraphBuilder()
    >>> a, c = b.add_vertex(), b.add_vertex()
    >>> b.add_edge(a, c)
    0
    >>> g = b.set_leads(a, c).build()
    """

    def __init__(self, name: str | None = None):
        self.name = name
        self._vertices: dict[VertexId, float] = {}
        self._edges: list[Edge] = []
        self._entrance = None
        self._exit = None

    def add_vertex(self, alpha: float = 0.0, id: VertexId | None = None) -> VertexId:
        alpha = float(alpha)
        if not math.isfinite(alpha):
            raise GraphError(f"vertex strength must be finite, got {alpha!r}")
        if id is None:
            id = len(self._vertices)
            while id in self._vertices:
                id += 1
        if id in self._vertices:
            raise GraphError(f"duplicate vertex id {id!r}")
        self._vertices[id] = alpha
        return id

    def add_edge(self, u: VertexId, v: VertexId, mult: int = 1) -> int:
        if u == v:
            raise GraphError("self-loops are not supported")
        for w in (u, v):
            if w not in self._vertices:
                raise GraphError(f"unknown vertex {w!r}")
        if isinstance(mult, bool) or not isinstance(mult, (int, np.integer)) or mult < 1:
            raise GraphError(f"length multiplier must be a positive integer, got {mult!r}")
        eid = len(self._edges)
        self._edges.append(Edge(eid, u, v, int(mult)))
        return eid

    def set_leads(self, entrance: VertexId | None, exit: VertexId | None) -> "GraphBuilder":
        for w in (entrance, exit):
            if w is not None and w not in self._vertices:
                raise GraphError(f"unknown vertex {w!r}")
        self._entrance, self._exit = entrance, exit
        return self

    def build(self) -> ScatteringGraph:
        return ScatteringGraph(
            tuple(Vertex(k, a) for k, a in self._vertices.items()),
            tuple(self._edges),
            self._entrance,
            self._exit,
            self.name,
        )


def degree(g: ScatteringGraph, v: VertexId) -> int:
    """Incident edge-ends plus attached leads at ``v``."""
    deg = g.degrees()
    if v not in deg:
        raise GraphError(f"unknown vertex {v!r}")
    return deg[v]


@dataclass(frozen=True)
class ValidationReport:
    connected: bool
    n_leads: int
    degrees: Mapping[VertexId, int]
    all_degree_3: bool
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """Usable by the scattering solver."""
        return not self.problems

    @property
    def degree_set(self) -> set[int]:
        return set(self.degrees.values())


def _is_connected(g: ScatteringGraph) -> bool:
    ids = g.vertex_ids
    if not ids:
        return False
    nbrs: dict = {v: [] for v in ids}
    for e in g.edges:
        nbrs[e.u].append(e.v)
        nbrs[e.v].append(e.u)
    start = g.entrance if g.entrance is not None else ids[0]
    seen = {start}
    queue = deque([start])
    while queue:
        for w in nbrs[queue.popleft()]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(ids)


def validate(g: ScatteringGraph) -> ValidationReport:
    """Report connectivity, lead count and degrees; never raises."""
    degs = g.degrees()
    connected = _is_connected(g)
    problems = []
    if not connected:
        problems.append("graph is not connected")
    if g.n_leads != 2:
        problems.append(f"expected 2 leads, found {g.n_leads}")
    return ValidationReport(
        connected=connected,
        n_leads=g.n_leads,
        degrees=degs,
        all_degree_3=bool(degs) and all(d == 3 for d in degs.values()),
        problems=tuple(problems),
    )


# Hexagon perimeter: L-a-b-R on top, L-c-d-R at the bottom.
_HEX = [("L", "a"), ("a", "b"), ("b", "R"), ("L", "c"), ("c", "d"), ("d", "R")]
_DIAMOND = [("L", "a"), ("a", "R"), ("L", "c"), ("c", "R")]

_TOPOLOGIES: dict[str, tuple[list[str], list[tuple[str, str]]]] = {
    "D": (["L", "a", "c", "R"], _DIAMOND),
    "H": (["L", "a", "b", "R", "d", "c"], _HEX),
    "Dtilde": (["L", "a", "c", "R"], _DIAMOND + [("a", "c")]),
    "Q": (["L", "a", "b", "R", "d", "c"], _HEX + [("a", "c"), ("b", "d")]),
    "X": (["L", "a", "b", "R", "d", "c"], _HEX + [("a", "d"), ("b", "c")]),
}

CATALOG: tuple[str, ...] = tuple(_TOPOLOGIES)


def build_named(name: str) -> ScatteringGraph:
    """Catalog graph by name (``D``, ``H``, ``Dtilde``, ``Q``, ``X``)."""
    try:
        verts, edges = _TOPOLOGIES[name]
    except KeyError:
        raise GraphError(f"unknown catalog graph {name!r}; choose from {', '.join(CATALOG)}") from None
    b = GraphBuilder(name)
    for v in verts:
        b.add_vertex(0.0, id=v)
    for u, v in edges:
        b.add_edge(u, v)
    return b.set_leads("L", "R").build()


def linear_chain(n_vertices: int, alpha: float = 0.0) -> ScatteringGraph:
    """Leads at both ends of a path of ``n_vertices`` vertices."""
    if n_vertices < 1:
        raise GraphError("a chain needs at least one vertex")
    b = GraphBuilder(f"chain{n_vertices}")
    ids = [b.add_vertex(alpha) for _ in range(n_vertices)]
    for u, v in zip(ids, ids[1:]):
        b.add_edge(u, v)
    return b.set_leads(ids[0], ids[-1]).build()


# -- graph-definition documents ---------------------------------------------

def graph_to_dict(g: ScatteringGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "alpha": v.alpha} for v in g.vertices],
        "edges": [{"u": e.u, "v": e.v, "mult": e.mult} for e in g.edges],
        "leads": {"entrance": g.entrance, "exit": g.exit},
    }


def graph_from_dict(doc: Mapping, name: str | None = None) -> ScatteringGraph:
    if "graph" in doc and "vertices" not in doc:
        doc = doc["graph"]
    try:
        b = GraphBuilder(name)
        for v in doc["vertices"]:
            b.add_vertex(v.get("alpha", 0.0), id=v["id"])
        for e in doc["edges"]:
            b.add_edge(e["u"], e["v"], e.get("mult", 1))
        leads = doc.get("leads", {})
        b.set_leads(leads.get("entrance"), leads.get("exit"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from exc
    return b.build()


def load_graph(path: str | Path) -> ScatteringGraph:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise GraphError(f"graph file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"cannot parse {path}: {exc}") from exc
    return graph_from_dict(doc, name=path.stem)


def dump_graph(g: ScatteringGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2)


def degree_histogram(g: ScatteringGraph) -> Counter:
    return Counter(g.degrees().values())
