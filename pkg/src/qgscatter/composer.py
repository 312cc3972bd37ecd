"""Series and parallel composition of two-lead graphs.

Both operators splice leads into edges, so every vertex keeps its degree:

* ``series(a, b)`` drops a's exit lead and b's entrance lead and joins the
  two vertices with a unit edge.
* ``parallel(a, b)`` adds an entrance hub and an exit hub (each carrying
  the new lead) wired to both operands' lead vertices by unit edges.

Circuit expressions use ``S(...)`` / ``P(...)`` with catalog names or
``@path`` leaves, e.g. ``S(Q,X,Q)`` or ``P(P(QX)P(XQ))``.  Commas between
arguments are optional.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

from .graph import CATALOG, GraphBuilder, GraphError, ScatteringGraph, build_named, load_graph, validate

__all__ = [
    "series",
    "parallel",
    "Leaf",
    "Series",
    "Parallel",
    "Circuit",
    "parse_circuit",
    "build_circuit",
    "resolve_source",
]


def _check_operand(g: ScatteringGraph, which: str):
    report = validate(g)
    if not report.ok:
        raise GraphError(f"invalid {which} operand: {'; '.join(report.problems)}")


def _copy_into(b: GraphBuilder, g: ScatteringGraph, tag: str) -> dict:
    ids = {}
    for v in g.vertices:
        ids[v.id] = b.add_vertex(v.alpha, id=f"{tag}{v.id}")
    for e in g.edges:
        b.add_edge(ids[e.u], ids[e.v], e.mult)
    return ids


def series(a: ScatteringGraph, b: ScatteringGraph) -> ScatteringGraph:
    _check_operand(a, "left")
    _check_operand(b, "right")
    out = GraphBuilder(f"S({a.name or '?'},{b.name or '?'})")
    ia = _copy_into(out, a, "s0.")
    ib = _copy_into(out, b, "s1.")
    out.add_edge(ia[a.exit], ib[b.entrance])
    return out.set_leads(ia[a.entrance], ib[b.exit]).build()


def parallel(a: ScatteringGraph, b: ScatteringGraph) -> ScatteringGraph:
    _check_operand(a, "upper")
    _check_operand(b, "lower")
    out = GraphBuilder(f"P({a.name or '?'},{b.name or '?'})")
    ia = _copy_into(out, a, "p0.")
    ib = _copy_into(out, b, "p1.")
    hl = out.add_vertex(0.0, id="p.hL")
    hr = out.add_vertex(0.0, id="p.hR")
    out.add_edge(hl, ia[a.entrance])
    out.add_edge(hl, ib[b.entrance])
    out.add_edge(ia[a.exit], hr)
    out.add_edge(ib[b.exit], hr)
    return out.set_leads(hl, hr).build()


# -- circuit expressions ------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    """Catalog name, ``@path`` reference, or an explicit graph."""

    ref: Union[str, ScatteringGraph]

    def __str__(self) -> str:
        return self.ref if isinstance(self.ref, str) else (self.ref.name or "<graph>")


@dataclass(frozen=True)
class Series:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise GraphError("S(...) needs at least two children")

    def __str__(self) -> str:
        return f"S({','.join(map(str, self.children))})"


@dataclass(frozen=True)
class Parallel:
    children: tuple

    def __post_init__(self):
        if len(self.children) != 2:
            raise GraphError("P(...) takes exactly two children")

    def __str__(self) -> str:
        return f"P({','.join(map(str, self.children))})"


Circuit = Union[Leaf, Series, Parallel]

_NAMES = sorted(CATALOG, key=len, reverse=True)
_PATH = re.compile(r"@([^,()\s]+)")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> GraphError:
        return GraphError(f"{msg} at position {self.pos} in {self.text!r}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Circuit:
        node = self.expr()
        if self.peek():
            raise self.error("trailing input")
        return node

    def expr(self) -> Circuit:
        self.skip()
        rest = self.text[self.pos:]
        if rest.startswith("@"):
            m = _PATH.match(rest)
            if not m:
                raise self.error("empty file reference")
            self.pos += m.end()
            return Leaf("@" + m.group(1))
        if rest[:1] in ("S", "P"):
            self.pos += 1
            if self.peek() == "(":
                return self.call(rest[0])
            self.pos -= 1
        for name in _NAMES:
            if rest.startswith(name):
                self.pos += len(name)
                return Leaf(name)
        raise self.error("expected a catalog name, @file or S(...)/P(...)")

    def call(self, op: str) -> Circuit:
        self.pos += 1  # '('
        children = []
        while True:
            c = self.peek()
            if c == ")":
                self.pos += 1
                break
            if not c:
                raise self.error("unbalanced parenthesis")
            if c == "," and children:
                self.pos += 1
                continue
            children.append(self.expr())
        return Series(tuple(children)) if op == "S" else Parallel(tuple(children))


def parse_circuit(text: str) -> Circuit:
    """Parse ``S(Q,X,Q)``-style expressions into a :data:`Circuit` tree."""
    if not text or not text.strip():
        raise GraphError("empty circuit expression")
    return _Parser(text).parse()


def _leaf_graph(ref, loader: Callable[[str], ScatteringGraph]) -> ScatteringGraph:
    if isinstance(ref, ScatteringGraph):
        return ref
    if ref.startswith("@"):
        return loader(ref[1:])
    return build_named(ref)


def build_circuit(expr: Union[Circuit, str], loader: Callable[[str], ScatteringGraph] = load_graph) -> ScatteringGraph:
    """Flatten a circuit into one graph; n-ary S folds left to right."""
    if isinstance(expr, str):
        expr = parse_circuit(expr)
    if isinstance(expr, Leaf):
        return _leaf_graph(expr.ref, loader)
    graphs = [build_circuit(c, loader) for c in expr.children]
    if isinstance(expr, Parallel):
        g = parallel(*graphs)
    elif isinstance(expr, Series):
        g = graphs[0]
        for nxt in graphs[1:]:
            g = series(g, nxt)
    else:
        raise GraphError(f"malformed circuit node {expr!r}")
    return ScatteringGraph(g.vertices, g.edges, g.entrance, g.exit, str(expr))


def resolve_source(source: str) -> ScatteringGraph:
    """Graph from a catalog name, circuit expression or ``@path``."""
    source = source.strip()
    if source.startswith("@"):
        return load_graph(source[1:])
    return build_circuit(source)
