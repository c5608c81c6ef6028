"""Bipartite affiliation graph: people on one side, clubs on the other.

The graph is immutable once built. Node identity is (partition, normalized
label); edges are undirected person-club pairs with set semantics, so feeding
the same membership tuple twice changes nothing. All iteration orders are
sorted by label to keep every downstream computation deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import Enum

from .errors import EmptyAfterNormalization, EmptyInput, MalformedTuple, NodeNotFound
from .normalize import NormalizationConfig, normalize_label


class Partition(str, Enum):
    INDIV = "indiv"
    CLUB = "club"


_PARTITION_RANK = {Partition.INDIV: 0, Partition.CLUB: 1}


@dataclass(frozen=True, slots=True)
class NodeId:
    """A node is identified by its partition plus its normalized label."""

    partition: Partition
    label: str

    def sort_key(self) -> tuple[str, int]:
        # Label first so "lexicographically smallest member" reads naturally;
        # partition only breaks exact label collisions across sides.
        return (self.label, _PARTITION_RANK[self.partition])

    def __lt__(self, other: "NodeId") -> bool:
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True, slots=True)
class EdgeTuple:
    """One extracted membership statement: person --relation--> club."""

    person: str
    relation: str
    club: str
    source_index: int | None = None


class AffiliationGraph:
    """Immutable bipartite graph over individual and club labels.

    ``indiv_labels`` and ``club_labels`` may include isolated nodes. Edges are
    (indiv_label, club_label) pairs; endpoints must exist in the node sets.
    """

    __slots__ = ("_indiv", "_club", "_edges", "_adj_indiv", "_adj_club")

    def __init__(
        self,
        indiv_labels: Iterable[str],
        club_labels: Iterable[str],
        edges: Iterable[tuple[str, str]],
    ) -> None:
        indiv = tuple(sorted(set(indiv_labels)))
        club = tuple(sorted(set(club_labels)))
        for label in indiv + club:
            if not label:
                raise ValueError("node labels must be non-empty")
        indiv_set = set(indiv)
        club_set = set(club)
        edge_set = frozenset(edges)
        adj_indiv: dict[str, set[str]] = {p: set() for p in indiv}
        adj_club: dict[str, set[str]] = {c: set() for c in club}
        for person, clb in edge_set:
            if person not in indiv_set:
                raise ValueError(f"edge endpoint {person!r} is not an individual node")
            if clb not in club_set:
                raise ValueError(f"edge endpoint {clb!r} is not a club node")
            adj_indiv[person].add(clb)
            adj_club[clb].add(person)
        self._indiv = indiv
        self._club = club
        self._edges = edge_set
        self._adj_indiv = {p: tuple(sorted(s)) for p, s in adj_indiv.items()}
        self._adj_club = {c: tuple(sorted(s)) for c, s in adj_club.items()}

    @property
    def indiv_labels(self) -> tuple[str, ...]:
        return self._indiv

    @property
    def club_labels(self) -> tuple[str, ...]:
        return self._club

    @property
    def num_indiv(self) -> int:
        return len(self._indiv)

    @property
    def num_club(self) -> int:
        return len(self._club)

    @property
    def num_nodes(self) -> int:
        return len(self._indiv) + len(self._club)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def edge_set(self) -> frozenset[tuple[str, str]]:
        return self._edges

    def edges(self) -> Iterator[tuple[str, str]]:
        """Edges as (person, club), sorted by person then club."""
        for person in self._indiv:
            for clb in self._adj_indiv[person]:
                yield (person, clb)

    def labels(self, partition: Partition) -> tuple[str, ...]:
        return self._indiv if partition is Partition.INDIV else self._club

    def nodes(self) -> Iterator[NodeId]:
        for person in self._indiv:
            yield NodeId(Partition.INDIV, person)
        for clb in self._club:
            yield NodeId(Partition.CLUB, clb)

    def has_node(self, v: NodeId) -> bool:
        adj = self._adj_indiv if v.partition is Partition.INDIV else self._adj_club
        return v.label in adj

    def has_edge(self, person: str, club: str) -> bool:
        return (person, club) in self._edges

    def neighbor_labels(self, v: NodeId) -> tuple[str, ...]:
        adj = self._adj_indiv if v.partition is Partition.INDIV else self._adj_club
        try:
            return adj[v.label]
        except KeyError:
            raise NodeNotFound(f"{v.partition.value} node {v.label!r} not in graph") from None

    def neighbors(self, v: NodeId) -> tuple[NodeId, ...]:
        other = Partition.CLUB if v.partition is Partition.INDIV else Partition.INDIV
        return tuple(NodeId(other, lab) for lab in self.neighbor_labels(v))

    def members_of(self, club: str) -> tuple[str, ...]:
        return self.neighbor_labels(NodeId(Partition.CLUB, club))

    def clubs_of(self, person: str) -> tuple[str, ...]:
        return self.neighbor_labels(NodeId(Partition.INDIV, person))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffiliationGraph):
            return NotImplemented
        return (
            self._indiv == other._indiv
            and self._club == other._club
            and self._edges == other._edges
        )

    def __repr__(self) -> str:
        return (
            f"AffiliationGraph(|indiv|={self.num_indiv}, |club|={self.num_club}, "
            f"|edges|={self.num_edges})"
        )


def build_graph(
    tuples: Sequence[EdgeTuple], cfg: NormalizationConfig | None = None
) -> AffiliationGraph:
    """Construct the affiliation graph from membership tuples.

    Person and club labels are normalized; duplicate memberships collapse to a
    single edge. The relation field does not affect the edge (the graph has a
    single relation type). Raises :class:`EmptyInput` for an empty tuple list
    and :class:`MalformedTuple` for tuples whose person or club is empty,
    either as given or after normalization.
    """
    if not tuples:
        raise EmptyInput("no tuples to build a graph from")
    cfg = cfg or NormalizationConfig()
    edges: set[tuple[str, str]] = set()
    for index, t in enumerate(tuples):
        if not t.person or not t.person.strip():
            raise MalformedTuple(index, "empty person field")
        if not t.club or not t.club.strip():
            raise MalformedTuple(index, "empty club field")
        try:
            person = normalize_label(t.person, cfg)
            club = normalize_label(t.club, cfg)
        except EmptyAfterNormalization as exc:
            raise MalformedTuple(index, str(exc)) from exc
        edges.add((person, club))
    indiv = {p for p, _ in edges}
    clubs = {c for _, c in edges}
    return AffiliationGraph(indiv, clubs, edges)


def degree(g: AffiliationGraph, v: NodeId) -> int:
    """Number of edges incident to ``v``; raises :class:`NodeNotFound` if absent."""
    return len(g.neighbor_labels(v))


def connected_components(g: AffiliationGraph) -> list[set[NodeId]]:
    """Connected components as node sets.

    Sorted by descending size, ties broken by the lexicographically smallest
    member. Isolated nodes form singleton components. An empty graph yields
    an empty list.
    """
    seen: set[NodeId] = set()
    components: list[set[NodeId]] = []
    for start in g.nodes():
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        frontier = [start]
        while frontier:
            nxt: list[NodeId] = []
            for node in frontier:
                for nb in g.neighbors(node):
                    if nb not in comp:
                        comp.add(nb)
                        seen.add(nb)
                        nxt.append(nb)
            frontier = nxt
        components.append(comp)
    components.sort(key=lambda c: (-len(c), min(n.sort_key() for n in c)))
    return components
