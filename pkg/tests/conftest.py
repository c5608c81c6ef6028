"""Shared fixtures and graph generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from affileval import AffiliationGraph, NodeId, Partition


@pytest.fixture
def g0() -> AffiliationGraph:
    """The 5-node path p1-c1-p2-c2-p3: 3 individuals, 2 clubs, 4 edges."""
    return AffiliationGraph(
        ["p1", "p2", "p3"],
        ["c1", "c2"],
        [("p1", "c1"), ("p2", "c1"), ("p2", "c2"), ("p3", "c2")],
    )


def graph_adjacency(g: AffiliationGraph) -> dict[NodeId, set[NodeId]]:
    """Bipartite adjacency over NodeIds, for the brute-force oracles."""
    adj: dict[NodeId, set[NodeId]] = {v: set() for v in g.nodes()}
    for person, club in g.edges():
        u = NodeId(Partition.INDIV, person)
        v = NodeId(Partition.CLUB, club)
        adj[u].add(v)
        adj[v].add(u)
    return adj


def projection_adjacency(p) -> dict[str, set[str]]:
    return {label: set(p.neighbors(label)) for label in p.node_labels}


def random_bipartite(
    rng: np.random.Generator,
    n_indiv: int,
    n_club: int,
    n_edges: int,
    isolated: int = 0,
) -> AffiliationGraph:
    """Uniform bipartite graph with exactly ``n_edges`` distinct edges.

    ``isolated`` extra zero-degree nodes are appended to each partition to
    exercise the isolated-node paths.
    """
    assert n_edges <= n_indiv * n_club
    people = [f"p{i:04d}" for i in range(n_indiv + isolated)]
    clubs = [f"c{j:04d}" for j in range(n_club + isolated)]
    chosen = rng.choice(n_indiv * n_club, size=n_edges, replace=False)
    edges = [(people[k // n_club], clubs[k % n_club]) for k in chosen]
    return AffiliationGraph(people, clubs, edges)


def heavy_tailed_graph(
    seed: int, n_indiv: int = 500, n_club: int = 100
) -> AffiliationGraph:
    """Membership graph with strongly skewed club sizes.

    Club attractiveness follows a power law, so a handful of clubs are huge
    and the tail is thin; each person joins one to a few clubs.
    """
    rng = np.random.default_rng(seed)
    people = [f"p{i:04d}" for i in range(n_indiv)]
    clubs = [f"c{j:03d}" for j in range(n_club)]
    weights = 1.0 / np.arange(1, n_club + 1) ** 0.8
    weights /= weights.sum()
    edges = set()
    for person in people:
        count = 1 + rng.poisson(1.5)
        count = min(count, n_club)
        for club_idx in rng.choice(n_club, size=count, replace=False, p=weights):
            edges.add((person, clubs[club_idx]))
    return AffiliationGraph(people, clubs, edges)
