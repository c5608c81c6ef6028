import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affileval import (
    AffiliationGraph,
    DegenerateGraph,
    EmptyPartition,
    Partition,
    ProjectionGraph,
    avg_clustering,
    project,
    projection_density,
)
from conftest import projection_adjacency, random_bipartite
from oracles import oracle_avg_clustering, oracle_projection_edges


def _k4_minus_edge() -> ProjectionGraph:
    return ProjectionGraph(
        Partition.INDIV,
        ["a", "b", "c", "d"],
        [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    )


class TestProject:
    def test_g0_comembership(self, g0):
        p = project(g0, Partition.INDIV)
        assert p.node_labels == ("p1", "p2", "p3")
        assert set(p.edges()) == {("p1", "p2"), ("p2", "p3")}

    def test_g0_shared_member(self, g0):
        p = project(g0, Partition.CLUB)
        assert set(p.edges()) == {("c1", "c2")}

    def test_zero_degree_nodes_retained(self):
        g = AffiliationGraph(["a", "b", "loner"], ["c"], [("a", "c"), ("b", "c")])
        p = project(g, Partition.INDIV)
        assert "loner" in p.node_labels
        assert p.degree("loner") == 0

    def test_empty_partition(self):
        with pytest.raises(EmptyPartition):
            project(AffiliationGraph(["a"], [], []), Partition.CLUB)

    def test_clique_from_shared_club(self):
        g = AffiliationGraph(
            [f"p{i}" for i in range(4)], ["hub"], [(f"p{i}", "hub") for i in range(4)]
        )
        p = project(g, Partition.INDIV)
        assert p.num_edges == 6  # K4


class TestProjectionDensity:
    def test_complete_k4(self):
        p = ProjectionGraph(
            Partition.INDIV, list("abcd"), [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]
        )
        assert projection_density(p) == 1.0

    def test_g0_indiv(self, g0):
        p = project(g0, Partition.INDIV)
        assert projection_density(p) == pytest.approx(2 * 2 / (3 * 2))

    def test_edgeless(self):
        p = ProjectionGraph(Partition.INDIV, ["a", "b"], [])
        assert projection_density(p) == 0.0

    def test_paper_convention_halves(self, g0):
        p = project(g0, Partition.INDIV)
        assert projection_density(p, "paper") == pytest.approx(projection_density(p) / 2)

    def test_unknown_convention(self, g0):
        with pytest.raises(ValueError):
            projection_density(project(g0, Partition.INDIV), "bogus")

    def test_single_node(self):
        with pytest.raises(DegenerateGraph):
            projection_density(ProjectionGraph(Partition.INDIV, ["a"], []))


class TestAvgClustering:
    def test_triangle(self):
        p = ProjectionGraph(Partition.INDIV, list("abc"), [("a", "b"), ("b", "c"), ("a", "c")])
        assert avg_clustering(p) == 1.0

    def test_path(self):
        p = ProjectionGraph(Partition.INDIV, list("abc"), [("a", "b"), ("b", "c")])
        assert avg_clustering(p) == 0.0

    def test_k4_minus_edge(self):
        # the two degree-3 nodes each sit on both triangles (c_v = 2/3); the
        # degree-2 nodes close their only pair (c_v = 1), giving 5/6 overall
        p = _k4_minus_edge()
        want = oracle_avg_clustering(projection_adjacency(p))
        assert want == pytest.approx(5 / 6)
        assert avg_clustering(p) == pytest.approx(5 / 6)

    def test_low_degree_nodes_count_as_zero_in_mean(self):
        p = ProjectionGraph(
            Partition.INDIV, list("abcd"), [("a", "b"), ("b", "c"), ("a", "c")]
        )
        # triangle plus isolated d: (1+1+1+0)/4
        assert avg_clustering(p) == pytest.approx(3 / 4)


class TestProjectionGraphValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            ProjectionGraph(Partition.INDIV, ["a"], [("a", "a")])

    def test_rejects_unknown_node(self):
        with pytest.raises(ValueError):
            ProjectionGraph(Partition.INDIV, ["a"], [("a", "b")])


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_projection_matches_pair_enumeration_oracle(seed):
    rng = np.random.default_rng(seed)
    n_i = int(rng.integers(1, 10))
    n_c = int(rng.integers(1, 10))
    n_e = int(rng.integers(0, n_i * n_c + 1))
    g = random_bipartite(rng, n_i, n_c, n_e, isolated=1)
    for onto in Partition:
        p = project(g, onto)
        # build neighbor sets straight from the edge list
        neighbor_sets = {label: set() for label in g.labels(onto)}
        for person, club in g.edges():
            if onto is Partition.INDIV:
                neighbor_sets[person].add(club)
            else:
                neighbor_sets[club].add(person)
        want = oracle_projection_edges(g.labels(onto), neighbor_sets)
        assert set(p.edges()) == want
        assert 0.0 <= avg_clustering(p) <= 1.0
        if p.num_nodes >= 2:
            assert 0.0 <= projection_density(p) <= 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_adding_bipartite_edge_never_removes_projection_edges(seed):
    rng = np.random.default_rng(seed)
    n_i = int(rng.integers(2, 8))
    n_c = int(rng.integers(2, 8))
    n_e = int(rng.integers(1, n_i * n_c))
    g = random_bipartite(rng, n_i, n_c, n_e)
    non_edges = [
        (p, c) for p in g.indiv_labels for c in g.club_labels if not g.has_edge(p, c)
    ]
    extra = non_edges[int(rng.integers(0, len(non_edges)))]
    bigger = AffiliationGraph(g.indiv_labels, g.club_labels, list(g.edge_set()) + [extra])
    for onto in Partition:
        assert set(project(g, onto).edges()) <= set(project(bigger, onto).edges())


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_avg_clustering_matches_triangle_oracle(seed):
    rng = np.random.default_rng(seed)
    n_i = int(rng.integers(2, 9))
    n_c = int(rng.integers(2, 9))
    n_e = int(rng.integers(1, n_i * n_c + 1))
    g = random_bipartite(rng, n_i, n_c, n_e)
    for onto in Partition:
        p = project(g, onto)
        assert avg_clustering(p) == pytest.approx(
            oracle_avg_clustering(projection_adjacency(p)), rel=1e-12
        )


def test_disjoint_union_projects_to_disjoint_union(g0):
    shifted = AffiliationGraph(
        [f"q{p}" for p in g0.indiv_labels],
        [f"d{c}" for c in g0.club_labels],
        [(f"q{p}", f"d{c}") for p, c in g0.edges()],
    )
    union = AffiliationGraph(
        list(g0.indiv_labels) + list(shifted.indiv_labels),
        list(g0.club_labels) + list(shifted.club_labels),
        list(g0.edges()) + list(shifted.edges()),
    )
    for onto in Partition:
        want = set(project(g0, onto).edges()) | set(project(shifted, onto).edges())
        assert set(project(union, onto).edges()) == want
