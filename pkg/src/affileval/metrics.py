"""Whole-graph statistics computed on affiliation graphs.

Everything here is deterministic: node order is always the graph's sorted
order, and the greedy modularity merge uses exact integer gain comparisons so
ties never depend on floating-point noise.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, asdict

from .errors import (
    DegenerateComponent,
    EmptyGraph,
    EmptyPartition,
)
from .graph import AffiliationGraph, NodeId, Partition, connected_components


def degree_stats(g: AffiliationGraph, partition: Partition) -> tuple[float, float]:
    """Mean and population standard deviation of degrees in one partition."""
    labels = g.labels(partition)
    if not labels:
        raise EmptyPartition(f"graph has no {partition.value} nodes")
    degrees = [len(g.neighbor_labels(NodeId(partition, lab))) for lab in labels]
    return statistics.fmean(degrees), statistics.pstdev(degrees)


def bipartite_density(g: AffiliationGraph) -> float:
    """|E| / (|V_indiv| * |V_club|), the fraction of possible memberships present."""
    if g.num_indiv == 0 or g.num_club == 0:
        raise EmptyPartition("bipartite density needs nodes in both partitions")
    return g.num_edges / (g.num_indiv * g.num_club)


def rmae_club_degrees(
    truth: AffiliationGraph,
    extracted: AffiliationGraph,
    top_k: int | None = None,
) -> float:
    """Relative mean absolute error of club degrees, extracted vs truth.

    Clubs are aligned by label equality. A truth club absent from the
    extracted graph contributes its full degree as error (extracted degree 0);
    clubs that exist only in the extracted graph are ignored. With ``top_k``
    the scope is the k truth clubs of largest degree, ties broken by label
    order. Truth clubs with degree 0 carry no defined relative error and are
    skipped (they cannot arise from tuple ingestion).
    """
    if truth.num_club == 0:
        raise EmptyPartition("truth graph has no clubs")
    degrees = {c: len(truth.members_of(c)) for c in truth.club_labels}
    scored = [c for c in truth.club_labels if degrees[c] > 0]
    if not scored:
        raise EmptyGraph("every truth club has degree zero")
    if top_k is not None:
        scored = sorted(scored, key=lambda c: (-degrees[c], c))[:top_k]
    extracted_clubs = set(extracted.club_labels)
    total = 0.0
    for club in scored:
        ext = len(extracted.members_of(club)) if club in extracted_clubs else 0
        total += abs(ext - degrees[club]) / degrees[club]
    return total / len(scored)


@dataclass(frozen=True)
class ComponentMetrics:
    num_components: int
    prop_largest: float
    avg_size_rest: float


def component_metrics(g: AffiliationGraph) -> ComponentMetrics:
    """Component count, share of nodes in the largest, mean size of the rest.

    ``avg_size_rest`` is 0.0 when the graph is a single component.
    """
    if g.num_nodes == 0:
        raise EmptyGraph("graph has no nodes")
    comps = connected_components(g)
    largest = len(comps[0])
    rest = [len(c) for c in comps[1:]]
    return ComponentMetrics(
        num_components=len(comps),
        prop_largest=largest / g.num_nodes,
        avg_size_rest=statistics.fmean(rest) if rest else 0.0,
    )


@dataclass(frozen=True)
class PathMetrics:
    diameter: int
    avg_shortest_path: float


def _bfs_distances(g: AffiliationGraph, start: NodeId) -> dict[NodeId, int]:
    dist = {start: 0}
    frontier = [start]
    d = 0
    while frontier:
        d += 1
        nxt: list[NodeId] = []
        for node in frontier:
            for nb in g.neighbors(node):
                if nb not in dist:
                    dist[nb] = d
                    nxt.append(nb)
        frontier = nxt
    return dist


def path_metrics(g: AffiliationGraph) -> PathMetrics:
    """Diameter and mean shortest-path length inside the largest component.

    The average runs over unordered node pairs of that component. Raises
    :class:`DegenerateComponent` when the largest component is a single node.
    """
    if g.num_nodes == 0:
        raise EmptyGraph("graph has no nodes")
    comps = connected_components(g)
    component = comps[0]
    n = len(component)
    if n < 2:
        raise DegenerateComponent("largest component has a single node")
    total = 0
    diameter = 0
    for node in sorted(component):
        dist = _bfs_distances(g, node)
        total += sum(dist.values())
        ecc = max(dist.values())
        if ecc > diameter:
            diameter = ecc
    pairs = n * (n - 1) // 2
    return PathMetrics(diameter=diameter, avg_shortest_path=total / 2 / pairs)


def greedy_modularity_communities(g: AffiliationGraph) -> list[set[NodeId]]:
    """Agglomerative modularity maximization (CNM style) at resolution 1.

    Starts from singleton communities and repeatedly merges the connected
    pair with the largest modularity gain, stopping when no merge strictly
    improves modularity. The gain comparison uses the integer score
    2m*e_ij - d_i*d_j (a positive multiple of the real gain), so merge order
    and stopping are exact; ties pick the smallest community index pair.
    Isolated nodes stay singleton communities.
    """
    if g.num_edges == 0:
        raise EmptyGraph("modularity communities need at least one edge")
    nodes = list(g.nodes())
    index_of = {node: i for i, node in enumerate(nodes)}
    m = g.num_edges
    deg = [0] * len(nodes)
    between: dict[int, dict[int, int]] = {i: {} for i in range(len(nodes))}
    for person, club in g.edges():
        i = index_of[NodeId(Partition.INDIV, person)]
        j = index_of[NodeId(Partition.CLUB, club)]
        deg[i] += 1
        deg[j] += 1
        between[i][j] = between[i].get(j, 0) + 1
        between[j][i] = between[j].get(i, 0) + 1
    members: dict[int, list[NodeId]] = {i: [node] for i, node in enumerate(nodes)}

    while True:
        best_score = 0
        best_pair: tuple[int, int] | None = None
        # pairs are visited in ascending (i, j) order, so the first strict
        # maximum is the smallest index pair among ties
        for i in sorted(between):
            row = between[i]
            for j in sorted(row):
                if j <= i:
                    continue
                score = 2 * m * row[j] - deg[i] * deg[j]
                if score > best_score:
                    best_score = score
                    best_pair = (i, j)
        if best_pair is None:
            break
        i, j = best_pair
        members[i].extend(members.pop(j))
        deg[i] += deg[j]
        for k, cnt in between.pop(j).items():
            if k == i:
                continue
            between[k].pop(j)
            between[i][k] = between[i].get(k, 0) + cnt
            between[k][i] = between[k].get(i, 0) + cnt
        between[i].pop(j, None)

    return [set(members[i]) for i in sorted(members)]


def count_communities(g: AffiliationGraph) -> int:
    """Number of communities found by greedy modularity maximization."""
    return len(greedy_modularity_communities(g))


@dataclass(frozen=True)
class MetricSuite:
    """Flat bundle of every whole-graph metric; None marks undefined values."""

    degree_mean_indiv: float
    degree_std_indiv: float
    degree_mean_club: float
    degree_std_club: float
    bipartite_density: float
    num_connected_components: int
    prop_largest_cc: float
    avg_size_rest_components: float
    diameter_largest_cc: int | None
    avg_shortest_path_largest_cc: float | None
    num_communities: int | None
    rmae_all_clubs: float | None
    rmae_top10_clubs: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def compute_metric_suite(
    g: AffiliationGraph,
    truth: AffiliationGraph | None = None,
    top_k: int = 10,
) -> MetricSuite:
    """Compute the full metric bundle for one graph.

    ``truth`` enables the degree-RMAE fields (comparing ``g`` against it).
    Path metrics are None when the largest component is a single node and the
    community count is None for edgeless graphs.
    """
    mean_i, std_i = degree_stats(g, Partition.INDIV)
    mean_c, std_c = degree_stats(g, Partition.CLUB)
    comp = component_metrics(g)
    try:
        paths = path_metrics(g)
        diameter: int | None = paths.diameter
        avg_path: float | None = paths.avg_shortest_path
    except DegenerateComponent:
        diameter = None
        avg_path = None
    if g.num_edges > 0:
        communities = count_communities(g)
        # merges never span components, so this always holds
        assert communities >= comp.num_components
    else:
        communities = None
    rmae_all = rmae_top = None
    if truth is not None:
        rmae_all = rmae_club_degrees(truth, g)
        rmae_top = rmae_club_degrees(truth, g, top_k=top_k)
    return MetricSuite(
        degree_mean_indiv=mean_i,
        degree_std_indiv=std_i,
        degree_mean_club=mean_c,
        degree_std_club=std_c,
        bipartite_density=bipartite_density(g),
        num_connected_components=comp.num_components,
        prop_largest_cc=comp.prop_largest,
        avg_size_rest_components=comp.avg_size_rest,
        diameter_largest_cc=diameter,
        avg_shortest_path_largest_cc=avg_path,
        num_communities=communities,
        rmae_all_clubs=rmae_all,
        rmae_top10_clubs=rmae_top,
    )
