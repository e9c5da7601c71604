"""Edge-labeled directed graphs with endogenous/exogenous partitions.

Graphs are immutable after construction.  At most one edge is allowed per
ordered (source, target) pair, so an edge id can be (and is) derived from its
endpoints.  Vertices referenced only by edge lines default to endogenous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvalidPlayerSet, MalformedGraph


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    label: str
    target: str


def edge_id(source: str, target: str) -> str:
    return f"{source}->{target}"


class LabeledGraph:
    """Immutable labeled directed graph with player partitions."""

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Iterable[Edge],
        endo_edges: Iterable[str],
        endo_vertices: Iterable[str],
    ):
        self.vertices = frozenset(vertices)
        self.edges = tuple(sorted(edges, key=lambda e: e.id))
        self.edges_by_id = {e.id: e for e in self.edges}
        self.endo_edges = frozenset(endo_edges)
        self.exo_edges = frozenset(self.edges_by_id) - self.endo_edges
        self.endo_vertices = frozenset(endo_vertices)
        self.exo_vertices = self.vertices - self.endo_vertices
        self._check()
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        self._out = out

    def _check(self) -> None:
        if len(self.edges_by_id) != len(self.edges):
            dup = len(self.edges) - len(self.edges_by_id)
            raise MalformedGraph(f"{dup} duplicate (source, target) pair(s)")
        for e in self.edges:
            if e.source not in self.vertices or e.target not in self.vertices:
                raise MalformedGraph(f"edge {e.id} references an undeclared vertex")
            if not e.label:
                raise MalformedGraph(f"edge {e.id} has an empty label")
        if not self.endo_edges <= set(self.edges_by_id):
            raise MalformedGraph("endogenous edge partition references unknown edges")
        if not self.endo_vertices <= self.vertices:
            raise MalformedGraph("endogenous vertex partition references unknown vertices")

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(e.label for e in self.edges)

    def out_edges(self, v: str) -> list[Edge]:
        return self._out[v]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.endo_edges == other.endo_edges
            and self.endo_vertices == other.endo_vertices
        )

    def __repr__(self) -> str:
        return f"LabeledGraph(|V|={len(self.vertices)}, |E|={len(self.edges)})"


def load_graph(text: str) -> LabeledGraph:
    """Parse the whitespace-separated graph format.

    Edge lines are ``<src> <label> <dst> <n|x>``; vertex lines are
    ``v <id> <n|x>``.  Lines starting with ``#`` and blank lines are ignored.
    """
    vertices: set[str] = set()
    vertex_class: dict[str, str] = {}
    edges: list[Edge] = []
    seen_pairs: set[str] = set()
    endo_edges: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "v":
            if len(fields) != 3:
                raise MalformedGraph(f"line {lineno}: vertex line needs 'v <id> <n|x>'")
            _, vid, tag = fields
            if tag not in ("n", "x"):
                raise MalformedGraph(f"line {lineno}: unknown classification {tag!r}")
            if vertex_class.get(vid, tag) != tag:
                raise MalformedGraph(f"line {lineno}: vertex {vid} reclassified")
            vertex_class[vid] = tag
            vertices.add(vid)
        else:
            if len(fields) != 4:
                raise MalformedGraph(f"line {lineno}: edge line needs '<src> <label> <dst> <n|x>'")
            src, label, dst, tag = fields
            if tag not in ("n", "x"):
                raise MalformedGraph(f"line {lineno}: unknown classification {tag!r}")
            eid = edge_id(src, dst)
            if eid in seen_pairs:
                raise MalformedGraph(f"line {lineno}: parallel edge for pair ({src}, {dst})")
            seen_pairs.add(eid)
            edges.append(Edge(eid, src, label, dst))
            if tag == "n":
                endo_edges.add(eid)
            vertices.update((src, dst))
    endo_vertices = {v for v in vertices if vertex_class.get(v, "n") == "n"}
    return LabeledGraph(vertices, edges, endo_edges, endo_vertices)


def serialize(g: LabeledGraph) -> str:
    """Emit the graph in the same format load_graph accepts (sorted blocks)."""
    lines = []
    for v in sorted(g.vertices):
        tag = "n" if v in g.endo_vertices else "x"
        lines.append(f"v {v} {tag}")
    for e in g.edges:
        tag = "n" if e.id in g.endo_edges else "x"
        lines.append(f"{e.source} {e.label} {e.target} {tag}")
    return "\n".join(lines) + "\n"


def edge_subgraph(g: LabeledGraph, coalition: Iterable[str]) -> LabeledGraph:
    """Keep the coalition's edges plus all exogenous edges; all vertices stay."""
    b = frozenset(coalition)
    bad = b - g.endo_edges
    if bad:
        raise InvalidPlayerSet(f"not endogenous edges: {sorted(bad)}")
    keep = b | g.exo_edges
    return LabeledGraph(
        g.vertices,
        (e for e in g.edges if e.id in keep),
        b,
        g.endo_vertices,
    )


def vertex_subgraph(g: LabeledGraph, coalition: Iterable[str]) -> LabeledGraph:
    """Induced subgraph on the coalition's vertices plus all exogenous vertices."""
    b = frozenset(coalition)
    bad = b - g.endo_vertices
    if bad:
        raise InvalidPlayerSet(f"not endogenous vertices: {sorted(bad)}")
    keep = b | g.exo_vertices
    edges = [e for e in g.edges if e.source in keep and e.target in keep]
    return LabeledGraph(
        keep,
        edges,
        {e.id for e in edges} & g.endo_edges,
        b,
    )
