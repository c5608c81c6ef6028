import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from affileval import (
    AffiliationGraph,
    BudgetUnderflow,
    EdgeBudget,
    ErrorModel,
    PerturbationSpec,
    SamplingStalled,
    SaturatedGraph,
    bipartite_density,
    compute_budget,
    overestimation_pct,
    perturb,
    perturb_node_addition,
    perturb_node_disaggregation,
    perturb_preferential,
    perturb_random_edge,
)
from affileval.error_models import STALL_FACTOR, degree_weighted_draw
from affileval.io import graph_to_obj
from conftest import random_bipartite

ALL_MODELS = list(ErrorModel)


def spec_for(model, p, r, seed=0):
    return PerturbationSpec(model=model, precision=p, recall=r, seed=seed)


class TestComputeBudget:
    @pytest.mark.parametrize(
        "num_edges,p,r,want",
        [
            (10, 1.0, 1.0, (10, 0)),
            (10, 0.8, 0.8, (8, 2)),
            (10, 0.5, 0.6, (6, 6)),
            (20, 0.9, 0.9, (18, 2)),
            (20, 0.9, 0.6, (12, 1)),
        ],
    )
    def test_worked_examples(self, num_edges, p, r, want):
        assert compute_budget(num_edges, p, r) == EdgeBudget(*want)

    def test_underflow(self):
        with pytest.raises(BudgetUnderflow):
            compute_budget(10, 0.9, 0.05)

    def test_achieved_precision_at_least_target(self):
        rng = np.random.default_rng(3)
        for _ in range(500):
            n = int(rng.integers(1, 2000))
            p = float(rng.uniform(0.05, 1.0))
            r = float(rng.uniform(1.0 / n if n > 1 else 1.0, 1.0))
            try:
                budget = compute_budget(n, p, r)
            except BudgetUnderflow:
                continue
            achieved = budget.e_keep / (budget.e_keep + budget.e_add)
            assert achieved >= p - 1e-12

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            compute_budget(10, 0.0, 0.5)
        with pytest.raises(ValueError):
            compute_budget(10, 0.5, 1.2)


class TestPerturbationSpec:
    def test_model_coercion_from_string(self):
        spec = PerturbationSpec(model="random", precision=0.9, recall=0.9, seed=1)
        assert spec.model is ErrorModel.RANDOM_EDGE

    def test_rate_bounds(self):
        with pytest.raises(ValueError):
            PerturbationSpec(model="random", precision=0.0, recall=0.9, seed=1)
        with pytest.raises(ValueError):
            PerturbationSpec(model="random", precision=0.9, recall=1.0001, seed=1)

    def test_wrapper_rejects_mismatched_model(self, g0):
        with pytest.raises(ValueError):
            perturb_random_edge(g0, spec_for(ErrorModel.NODE_ADDITION, 0.9, 0.9))


@pytest.fixture
def medium_graph():
    return random_bipartite(np.random.default_rng(11), 8, 6, 20)


class TestIdentityPerturbation:
    @pytest.mark.parametrize("model", ALL_MODELS)
    def test_p1_r1_is_identity(self, medium_graph, model):
        result = perturb(medium_graph, spec_for(model, 1.0, 1.0, seed=5))
        assert result.graph == medium_graph
        assert result.metadata["e_add"] == 0
        assert result.metadata["synthetic_indiv_nodes"] == 0
        assert result.metadata["synthetic_club_nodes"] == 0


class TestRandomEdge:
    def test_budget_shape(self):
        g = random_bipartite(np.random.default_rng(0), 5, 4, 10)
        out = perturb_random_edge(g, spec_for(ErrorModel.RANDOM_EDGE, 0.8, 0.8, seed=9))
        assert out.num_edges == 10
        assert len(out.edge_set() & g.edge_set()) == 8

    def test_added_edges_avoid_all_original_edges(self, medium_graph):
        for seed in range(100):
            out = perturb_random_edge(
                medium_graph, spec_for(ErrorModel.RANDOM_EDGE, 0.7, 0.7, seed=seed)
            )
            added = out.edge_set() - medium_graph.edge_set()
            assert added.isdisjoint(medium_graph.edge_set())
            assert len(added) == out.num_edges - len(out.edge_set() & medium_graph.edge_set())

    def test_node_set_unchanged(self, medium_graph):
        out = perturb_random_edge(
            medium_graph, spec_for(ErrorModel.RANDOM_EDGE, 0.6, 0.6, seed=2)
        )
        assert out.indiv_labels == medium_graph.indiv_labels
        assert out.club_labels == medium_graph.club_labels

    def test_saturated_graph(self):
        # complete bipartite graph: no room for false edges
        g = AffiliationGraph(["a", "b"], ["x", "y"], [(p, c) for p in "ab" for c in "xy"])
        with pytest.raises(SaturatedGraph):
            perturb_random_edge(g, spec_for(ErrorModel.RANDOM_EDGE, 0.5, 1.0))

    def test_removal_stream_unaffected_by_precision(self, medium_graph):
        kept_sets = []
        for p in (1.0, 0.5):
            out = perturb_random_edge(
                medium_graph, spec_for(ErrorModel.RANDOM_EDGE, p, 0.8, seed=77)
            )
            kept_sets.append(out.edge_set() & medium_graph.edge_set())
        assert kept_sets[0] == kept_sets[1]


class TestPreferential:
    def test_star_stalls(self):
        n = 10
        g = AffiliationGraph(["hub"], [f"c{i}" for i in range(n)], [("hub", f"c{i}") for i in range(n)])
        with pytest.raises(SamplingStalled) as err:
            perturb_preferential(g, spec_for(ErrorModel.PREFERENTIAL_ATTACHMENT, 0.5, 1.0))
        assert err.value.attempts >= STALL_FACTOR

    def test_added_edges_avoid_original(self, medium_graph):
        for seed in range(50):
            out = perturb_preferential(
                medium_graph, spec_for(ErrorModel.PREFERENTIAL_ATTACHMENT, 0.7, 0.8, seed=seed)
            )
            added = out.edge_set() - medium_graph.edge_set()
            assert added.isdisjoint(medium_graph.edge_set())
            assert out.indiv_labels == medium_graph.indiv_labels
            assert out.club_labels == medium_graph.club_labels

    def test_endpoint_draws_follow_degree_weights(self):
        # raw pre-rejection draws: club degrees (3, 1) -> 75% / 25%
        labels = ["cA", "cB"]
        cumulative = np.cumsum([3, 1])
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(123)))
        draws = [degree_weighted_draw(rng, labels, cumulative) for _ in range(10_000)]
        freq_a = draws.count("cA") / len(draws)
        assert abs(freq_a - 0.75) <= 0.02
        counts = [draws.count("cA"), draws.count("cB")]
        chi = stats.chisquare(counts, f_exp=[7500, 2500])
        assert chi.pvalue > 1e-3

    def test_zero_weight_labels_never_drawn(self):
        labels = ["zero", "all"]
        cumulative = np.cumsum([0, 5])
        rng = np.random.default_rng(1)
        assert all(
            degree_weighted_draw(rng, labels, cumulative) == "all" for _ in range(200)
        )


class TestNodeAddition:
    def test_synthetic_counts_and_degrees(self):
        g = random_bipartite(np.random.default_rng(4), 5, 4, 10)
        result = perturb(g, spec_for(ErrorModel.NODE_ADDITION, 0.8, 0.8, seed=3))
        out = result.graph
        assert out.num_nodes - g.num_nodes == 2
        synth = [
            lab
            for lab in out.indiv_labels + out.club_labels
            if lab.startswith("synthetic:")
        ]
        assert len(synth) == 2
        meta = result.metadata
        assert meta["synthetic_indiv_nodes"] + meta["synthetic_club_nodes"] == 2
        for lab in out.indiv_labels:
            if lab.startswith("synthetic:"):
                assert len(out.clubs_of(lab)) == 1
        for lab in out.club_labels:
            if lab.startswith("synthetic:"):
                assert len(out.members_of(lab)) == 1

    def test_originals_retained_even_when_isolated(self):
        g = random_bipartite(np.random.default_rng(8), 6, 5, 12)
        out = perturb_node_addition(g, spec_for(ErrorModel.NODE_ADDITION, 0.9, 0.5, seed=1))
        assert set(g.indiv_labels) <= set(out.indiv_labels)
        assert set(g.club_labels) <= set(out.club_labels)

    def test_density_strictly_decreases(self):
        g = random_bipartite(np.random.default_rng(15), 10, 8, 30)
        base = bipartite_density(g)
        for seed in range(20):
            out = perturb_node_addition(
                g, spec_for(ErrorModel.NODE_ADDITION, 0.8, 0.9, seed=seed)
            )
            assert bipartite_density(out) < base

    def test_synthetic_prefix_extends_on_collision(self):
        g = AffiliationGraph(
            ["synthetic:indiv:000000", "b"], ["c1", "c2"],
            [("synthetic:indiv:000000", "c1"), ("b", "c2")],
        )
        out = perturb_node_addition(g, spec_for(ErrorModel.NODE_ADDITION, 0.5, 1.0, seed=0))
        fresh = set(out.indiv_labels + out.club_labels) - set(g.indiv_labels + g.club_labels)
        assert fresh
        assert all(lab.startswith("_synthetic:") for lab in fresh)


class TestNodeDisaggregation:
    def test_balanced_example(self):
        g = random_bipartite(np.random.default_rng(21), 8, 6, 20)
        result = perturb(g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.9, 0.9, seed=5))
        out = result.graph
        tp = len(out.edge_set() & g.edge_set())
        fp = out.num_edges - tp
        assert (tp, fp) == (18, 2)
        assert result.metadata["achieved_precision"] == pytest.approx(0.9)
        assert result.metadata["achieved_recall"] == pytest.approx(0.9)

    def test_overflow_path_deletes_excess_redirects(self):
        g = random_bipartite(np.random.default_rng(22), 8, 6, 20)
        result = perturb(g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.9, 0.6, seed=5))
        out = result.graph
        tp = len(out.edge_set() & g.edge_set())
        fp = out.num_edges - tp
        assert (tp, fp) == (12, 1)
        assert result.metadata["reconciliation_deletions"] == 1
        assert result.metadata["achieved_precision"] == pytest.approx(12 / 13)

    def test_padding_path_tops_up_false_edges(self):
        g = random_bipartite(np.random.default_rng(23), 8, 6, 20)
        result = perturb(g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.5, 0.9, seed=5))
        out = result.graph
        tp = len(out.edge_set() & g.edge_set())
        fp = out.num_edges - tp
        assert (tp, fp) == (18, 18)
        assert result.metadata["padding_edges"] == 16
        assert result.metadata["achieved_precision"] == pytest.approx(0.5)

    def test_redirected_edges_keep_one_real_endpoint(self):
        g = random_bipartite(np.random.default_rng(24), 8, 6, 20)
        out = perturb_node_disaggregation(
            g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.8, 0.8, seed=2)
        )
        for person, club in out.edge_set() - g.edge_set():
            p_synth = person.startswith("synthetic:")
            c_synth = club.startswith("synthetic:")
            assert p_synth != c_synth  # exactly one synthetic endpoint

    def test_requires_two_edges(self):
        g = AffiliationGraph(["a"], ["c"], [("a", "c")])
        with pytest.raises(ValueError):
            perturb_node_disaggregation(
                g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.9, 0.9)
            )

    def test_originals_never_removed(self):
        g = random_bipartite(np.random.default_rng(25), 8, 6, 20)
        out = perturb_node_disaggregation(
            g, spec_for(ErrorModel.NODE_DISAGGREGATION, 0.7, 0.7, seed=9)
        )
        assert set(g.indiv_labels) <= set(out.indiv_labels)
        assert set(g.club_labels) <= set(out.club_labels)


class TestOverestimation:
    def test_plus_ten_percent(self):
        truth = AffiliationGraph([f"p{i}" for i in range(60)], [f"c{i}" for i in range(40)], [])
        bigger = AffiliationGraph(
            [f"p{i}" for i in range(70)], [f"c{i}" for i in range(40)], []
        )
        assert overestimation_pct(truth, bigger, "nodes") == pytest.approx(10.0)

    def test_identity(self, g0):
        assert overestimation_pct(g0, g0, "nodes") == 0.0
        assert overestimation_pct(g0, g0, "edges") == 0.0

    def test_unknown_kind(self, g0):
        with pytest.raises(ValueError):
            overestimation_pct(g0, g0, "clubs")


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=0, max_value=10_000),
    st.sampled_from(ALL_MODELS),
    st.floats(min_value=0.4, max_value=1.0),
    st.floats(min_value=0.4, max_value=1.0),
)
def test_budget_invariants_hold_for_every_model(seed, model, p, r):
    rng = np.random.default_rng(seed)
    n_i = int(rng.integers(4, 12))
    n_c = int(rng.integers(4, 12))
    max_edges = n_i * n_c
    n_e = int(rng.integers(5, max(6, max_edges // 3)))
    g = random_bipartite(rng, n_i, n_c, n_e)
    try:
        budget = compute_budget(g.num_edges, p, r)
        result = perturb(g, spec_for(model, p, r, seed=seed))
    except (BudgetUnderflow, SaturatedGraph, SamplingStalled):
        return
    out = result.graph
    tp = len(out.edge_set() & g.edge_set())
    fp = out.num_edges - tp
    assert tp == budget.e_keep
    assert fp == budget.e_add
    # synthetic labels never collide with originals
    synth = set(out.indiv_labels + out.club_labels) - set(g.indiv_labels + g.club_labels)
    assert all(lab.startswith("synthetic:") for lab in synth)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.sampled_from(ALL_MODELS))
def test_determinism_byte_for_byte(seed, model):
    rng = np.random.default_rng(seed)
    g = random_bipartite(rng, 8, 6, 18)
    spec = spec_for(model, 0.75, 0.85, seed=seed)
    a = perturb(g, spec)
    b = perturb(g, spec)
    assert a.graph == b.graph
    assert json.dumps(graph_to_obj(a.graph), sort_keys=True) == json.dumps(
        graph_to_obj(b.graph), sort_keys=True
    )
    assert a.metadata == b.metadata
