"""Multipartite edges, hypergraphs, cluster structure, and classification.

An edge is an r-set of vertices touching each part at most once.  Two
edges are "linked" when they share at least two vertices; the connected
components with two or more edges in that relation are the clusters.  A
hypergraph is "plus-classified" with t clusters when every cluster is a
pair of edges sharing exactly two vertices and t stays below the cluster
expansion threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

from .errors import DomainError
from .partitions import PartitionVector, sigma

OVERLAP_GE3 = "overlap_ge3"
CLUSTER_GT2_EDGES = "cluster_gt2_edges"
TOO_MANY_CLUSTERS = "too_many_clusters"


class Edge(NamedTuple):
    """Sorted vertex tuple plus the (derived) tuple of part indices."""

    vertices: tuple[int, ...]
    parts: tuple[int, ...]


def make_edge(pv: PartitionVector, vertices: Iterable[int]) -> Edge:
    """Validate and build an edge: distinct vertices, one per part at most."""
    vs = tuple(sorted(int(v) for v in vertices))
    if len(set(vs)) != len(vs):
        raise DomainError(f"repeated vertex in edge {vs}")
    parts = tuple(pv.part_of(v) for v in vs)
    if len(set(parts)) != len(parts):
        raise DomainError(f"edge {vs} uses a part twice")
    return Edge(vs, parts)


@dataclass(frozen=True)
class Hypergraph:
    """An m-subset of the edge space over a fixed partition vector."""

    pv: PartitionVector
    r: int
    edges: frozenset[Edge]

    @property
    def m(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=lambda e: e.vertices))


def hypergraph(pv: PartitionVector, r: int, vertex_sets: Iterable[Iterable[int]]) -> Hypergraph:
    """Build a hypergraph from vertex collections, rejecting duplicates."""
    if not 0 <= r <= pv.k:
        raise DomainError(f"edge size {r} outside 0..{pv.k}")
    edges = []
    seen = set()
    for vs in vertex_sets:
        e = make_edge(pv, vs)
        if len(e.vertices) != r:
            raise DomainError(f"edge {e.vertices} has size {len(e.vertices)}, expected {r}")
        if e.vertices in seen:
            raise DomainError(f"duplicate edge {e.vertices}")
        seen.add(e.vertices)
        edges.append(e)
    return Hypergraph(pv, r, frozenset(edges))


def edge_space(pv: PartitionVector, r: int) -> Iterator[Edge]:
    """All edges in lexicographic order of their sorted vertex tuples.

    The stream has sigma(pv, r) members and is the canonical enumeration
    order used everywhere else in the package.
    """
    if not 0 <= r <= pv.k:
        raise DomainError(f"edge size {r} outside 0..{pv.k}")
    sizes = pv.sizes
    k = pv.k

    def rec(part: int, chosen_v: tuple[int, ...], chosen_p: tuple[int, ...]) -> Iterator[Edge]:
        need = r - len(chosen_v)
        if need == 0:
            yield Edge(chosen_v, chosen_p)
            return
        for p in range(part, k - need + 1):
            for v in pv.part_vertices(p):
                yield from rec(p + 1, chosen_v + (v,), chosen_p + (p,))

    return rec(0, (), ())


@dataclass(frozen=True)
class ClusterDecomposition:
    """Link structure of a hypergraph.

    edge_order fixes the indexing: adjacency[i] lists the edges sharing
    at least two vertices with edge_order[i], links collects every vertex
    pair contained in two or more edges, and clusters are the connected
    components of the linked-edges graph with at least two members.
    """

    edge_order: tuple[Edge, ...]
    links: frozenset[tuple[int, int]]
    adjacency: tuple[frozenset[int], ...]
    clusters: tuple[frozenset[int], ...]

    def cluster_edges(self, i: int) -> tuple[Edge, ...]:
        return tuple(self.edge_order[j] for j in sorted(self.clusters[i]))


def decompose(h: Hypergraph) -> ClusterDecomposition:
    """Compute links, the linked-edges graph, and its clusters."""
    order = h.sorted_edges()
    m = len(order)
    vsets = [frozenset(e.vertices) for e in order]
    links: set[tuple[int, int]] = set()
    adj: list[set[int]] = [set() for _ in range(m)]
    for i, j in combinations(range(m), 2):
        inter = vsets[i] & vsets[j]
        if len(inter) >= 2:
            adj[i].add(j)
            adj[j].add(i)
            links.update(combinations(sorted(inter), 2))
    seen: set[int] = set()
    clusters = []
    for i in range(m):
        if i in seen or not adj[i]:
            continue
        comp = {i}
        stack = [i]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        clusters.append(frozenset(comp))
    clusters.sort(key=min)
    return ClusterDecomposition(
        edge_order=order,
        links=frozenset(links),
        adjacency=tuple(frozenset(a) for a in adj),
        clusters=tuple(clusters),
    )


def is_linear(h: Hypergraph) -> bool:
    """True when every pair of edges shares at most one vertex."""
    vsets = [frozenset(e.vertices) for e in h.edges]
    return all(len(a & b) <= 1 for a, b in combinations(vsets, 2))


def cluster_threshold(pv: PartitionVector, r: int, m: int) -> int:
    """Cap on the cluster count for plus-classification.

    ceil(ln n + 56 sigma_{r-2}^2 sigma_2 m^2 / sigma_r^2), with the
    rational part kept exact and only ln n in floating point, so the
    ceiling cannot drift.
    """
    if not 2 <= r <= pv.k:
        raise DomainError(f"need 2 <= r <= k, got r={r}, k={pv.k}")
    if m < 0:
        raise DomainError(f"need m >= 0, got {m}")
    s_r = sigma(pv, r)
    if s_r == 0:
        raise DomainError("empty edge space")
    rational = Fraction(56 * sigma(pv, r - 2) ** 2 * sigma(pv, 2) * m * m, s_r * s_r)
    return math.ceil(rational + Fraction(math.log(pv.n)))


@dataclass(frozen=True)
class Classification:
    """Outcome of the plus test: cluster count, or the failure reason."""

    in_plus: bool
    clusters: int | None
    reason: str | None


def classify(h: Hypergraph, cap: int) -> Classification:
    """Plus-classify a hypergraph against a cluster-count cap.

    Failure reasons, checked in this order: a pair of edges overlapping
    in three or more vertices, a cluster with more than two edges, more
    than cap clusters.
    """
    order = h.sorted_edges()
    vsets = [frozenset(e.vertices) for e in order]
    for a, b in combinations(vsets, 2):
        if len(a & b) >= 3:
            return Classification(False, None, OVERLAP_GE3)
    dec = decompose(h)
    if any(len(c) > 2 for c in dec.clusters):
        return Classification(False, None, CLUSTER_GT2_EDGES)
    t = len(dec.clusters)
    if t > cap:
        return Classification(False, None, TOO_MANY_CLUSTERS)
    return Classification(True, t, None)


def to_text(h: Hypergraph) -> str:
    """Canonical text form: a parts header then one sorted edge per line."""
    lines = ["parts: " + ",".join(str(s) for s in h.pv.sizes)]
    for e in h.sorted_edges():
        lines.append(",".join(str(v) for v in e.vertices))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Hypergraph:
    """Parse the canonical text form back into a hypergraph."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("parts:"):
        raise DomainError("expected a 'parts:' header line")
    sizes = tuple(int(x) for x in lines[0].split(":", 1)[1].split(","))
    pv = PartitionVector(sizes)
    vertex_sets = [[int(x) for x in ln.split(",")] for ln in lines[1:]]
    if vertex_sets:
        r = len(vertex_sets[0])
    else:
        r = 0
    return hypergraph(pv, r, vertex_sets)
