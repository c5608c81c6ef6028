"""One-mode projections of the affiliation graph.

Projecting onto individuals yields the comembership network (people linked
when they share a club); projecting onto clubs links clubs that share a
member. Nodes that end up with no projection edges are kept, matching how the
downstream density and clustering statistics are defined.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

from .errors import DegenerateGraph, EmptyGraph, EmptyPartition
from .graph import AffiliationGraph, Partition

DENSITY_CONVENTIONS = ("standard", "paper")


class ProjectionGraph:
    """Simple undirected graph over the labels of a single partition."""

    __slots__ = ("_partition", "_nodes", "_adj", "_adj_set", "_num_edges")

    def __init__(
        self, partition: Partition, nodes: Iterable[str], edges: Iterable[tuple[str, str]]
    ) -> None:
        self._partition = partition
        self._nodes = tuple(sorted(set(nodes)))
        node_set = set(self._nodes)
        adj: dict[str, set[str]] = {n: set() for n in self._nodes}
        count = 0
        for u, v in edges:
            if u not in node_set or v not in node_set:
                raise ValueError(f"projection edge ({u!r}, {v!r}) references unknown node")
            if u == v:
                raise ValueError("projection edges cannot be self-loops")
            if v not in adj[u]:
                adj[u].add(v)
                adj[v].add(u)
                count += 1
        self._adj = {n: tuple(sorted(s)) for n, s in adj.items()}
        self._adj_set = {n: frozenset(s) for n, s in adj.items()}
        self._num_edges = count

    @property
    def partition(self) -> Partition:
        return self._partition

    @property
    def node_labels(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def num_nodes(self) -> int:
        return len(self._nodes)

    @property
    def num_edges(self) -> int:
        return self._num_edges

    def neighbors(self, label: str) -> tuple[str, ...]:
        return self._adj[label]

    def degree(self, label: str) -> int:
        return len(self._adj[label])

    def edges(self) -> Iterator[tuple[str, str]]:
        """Edges as (smaller, larger) label pairs in sorted order."""
        for u in self._nodes:
            for v in self._adj[u]:
                if u < v:
                    yield (u, v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectionGraph):
            return NotImplemented
        return (
            self._partition == other._partition
            and self._nodes == other._nodes
            and self._adj == other._adj
        )

    def __repr__(self) -> str:
        return (
            f"ProjectionGraph({self._partition.value}, |V|={self.num_nodes}, "
            f"|E|={self.num_edges})"
        )


def project(g: AffiliationGraph, onto: Partition) -> ProjectionGraph:
    """One-mode projection: two nodes are linked iff they share a neighbor."""
    nodes = g.labels(onto)
    if not nodes:
        raise EmptyPartition(f"graph has no {onto.value} nodes to project onto")
    other = Partition.CLUB if onto is Partition.INDIV else Partition.INDIV
    edges: set[tuple[str, str]] = set()
    for hub in g.labels(other):
        shared = g.members_of(hub) if other is Partition.CLUB else g.clubs_of(hub)
        for u, v in combinations(shared, 2):
            edges.add((u, v) if u < v else (v, u))
    return ProjectionGraph(onto, nodes, edges)


def projection_density(p: ProjectionGraph, convention: str = "standard") -> float:
    """Edge density of a projection.

    "standard" is 2|E| / (|V| (|V|-1)), the fraction of possible undirected
    edges. "paper" drops the factor of 2. Raises :class:`DegenerateGraph`
    when fewer than 2 nodes exist.
    """
    if convention not in DENSITY_CONVENTIONS:
        raise ValueError(f"unknown density convention {convention!r}")
    n = p.num_nodes
    if n < 2:
        raise DegenerateGraph("density needs at least 2 nodes")
    possible = n * (n - 1)
    density = p.num_edges / possible
    return 2 * density if convention == "standard" else density


def _triangles_at(p: ProjectionGraph, label: str) -> int:
    nbrs = p.neighbors(label)
    count = 0
    for i, u in enumerate(nbrs):
        adj_u = p._adj_set[u]
        for v in nbrs[i + 1 :]:
            if v in adj_u:
                count += 1
    return count


def avg_clustering(p: ProjectionGraph) -> float:
    """Mean local clustering coefficient over all nodes.

    c_v = 2 T(v) / (deg(v) (deg(v)-1)) with c_v = 0 for degree < 2, averaged
    over every node including isolated ones.
    """
    if p.num_nodes == 0:
        raise EmptyGraph("clustering needs at least one node")
    total = 0.0
    for label in p.node_labels:
        d = p.degree(label)
        if d < 2:
            continue
        total += 2 * _triangles_at(p, label) / (d * (d - 1))
    return total / p.num_nodes
