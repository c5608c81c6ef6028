"""Seeded perturbation of a ground-truth graph to target precision/recall.

Four single-error-type models degrade a graph: uniformly random false edges,
degree-preferential false edges, spurious-node additions, and node
disaggregation ("misspelled" duplicates that siphon off real edges). All of
them share one budget rule: keep ``e_keep = floor(recall * |E|)`` true edges
and introduce ``e_add = floor((1/precision - 1) * e_keep)`` false edges, so
exact-match recall equals ``e_keep/|E|`` and precision is at least the target.

Randomness: every run derives three independent substreams from the
``PerturbationSpec.seed`` with ``numpy.random.SeedSequence(seed).spawn(3)``
over the Philox counter-based generator, one per phase:

* stream 0 (removal): which true edges survive, including the disaggregation
  intact-set draw and its trim to ``e_keep``;
* stream 1 (addition): which false edges appear (non-edge picks, preferential
  endpoint draws, disaggregation budget reconciliation and padding);
* stream 2 (endpoint): per-edge partition coins and uniform node picks for
  the node-creating models.

Identical (graph, spec) inputs therefore produce identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import BudgetUnderflow, SamplingStalled, SaturatedGraph
from .graph import AffiliationGraph, Partition


class ErrorModel(str, Enum):
    RANDOM_EDGE = "random"
    PREFERENTIAL_ATTACHMENT = "pref"
    NODE_ADDITION = "node-add"
    NODE_DISAGGREGATION = "node-split"


# Preferential attachment gives up after this many consecutive rejections
# per budgeted edge.
STALL_FACTOR = 100

# Above this many candidate pairs the uniform non-edge sampler switches from
# full enumeration to rejection sampling.
_ENUMERATION_LIMIT = 4_000_000


@dataclass(frozen=True)
class PerturbationSpec:
    """Which model to run, the target rates, and the seed."""

    model: ErrorModel
    precision: float
    recall: float
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", ErrorModel(self.model))
        if not (0.0 < self.precision <= 1.0):
            raise ValueError("target precision must be in (0, 1]")
        if not (0.0 < self.recall <= 1.0):
            raise ValueError("target recall must be in (0, 1]")


@dataclass(frozen=True)
class EdgeBudget:
    e_keep: int
    e_add: int


def compute_budget(num_edges: int, precision: float, recall: float) -> EdgeBudget:
    """Edge budgets from the floor formulas.

    Uses plain IEEE double products, so decimal-looking targets behave the way
    the formulas read on paper (e.g. ``floor(0.6 * 10) == 6``). Raises
    :class:`BudgetUnderflow` when no true edge would survive.
    """
    if num_edges < 1:
        raise ValueError("num_edges must be >= 1")
    if not (0.0 < precision <= 1.0) or not (0.0 < recall <= 1.0):
        raise ValueError("precision and recall must be in (0, 1]")
    e_keep = math.floor(recall * num_edges)
    if e_keep == 0:
        raise BudgetUnderflow(
            f"recall {recall} keeps zero of {num_edges} edges"
        )
    e_add = math.floor((1.0 / precision - 1.0) * e_keep)
    return EdgeBudget(e_keep=e_keep, e_add=e_add)


@dataclass(frozen=True)
class PerturbationResult:
    """A perturbed graph plus everything a run log should know about it."""

    graph: AffiliationGraph
    metadata: dict


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(3)
    removal, addition, endpoint = (np.random.Generator(np.random.Philox(s)) for s in children)
    return removal, addition, endpoint


def _keep_subset(edges: Sequence[tuple[str, str]], e_keep: int, rng: np.random.Generator) -> list[tuple[str, str]]:
    """Uniformly selected e_keep edges, in the input (sorted) order."""
    if e_keep >= len(edges):
        return list(edges)
    picked = rng.choice(len(edges), size=e_keep, replace=False)
    return [edges[i] for i in sorted(picked)]


def degree_weighted_draw(
    rng: np.random.Generator, labels: Sequence[str], cumulative: np.ndarray
) -> str:
    """One label drawn with probability proportional to its weight.

    ``cumulative`` is the inclusive running sum of the weights aligned with
    ``labels``. Zero-weight labels are never drawn.
    """
    r = rng.random() * cumulative[-1]
    return labels[int(np.searchsorted(cumulative, r, side="right"))]


def _synthetic_prefix(g: AffiliationGraph) -> str:
    prefix = "synthetic:"
    labels = g.indiv_labels + g.club_labels
    while any(lab.startswith(prefix) for lab in labels):
        prefix = "_" + prefix
    return prefix


class _SyntheticLabels:
    """Fresh labels guaranteed not to collide with any original label."""

    def __init__(self, g: AffiliationGraph):
        self._prefix = _synthetic_prefix(g)
        self._count = 0

    def next(self, partition: Partition) -> str:
        self._count += 1
        return f"{self._prefix}{partition.value}:{self._count:06d}"

    def is_synthetic(self, label: str) -> bool:
        return label.startswith(self._prefix)


def _sample_non_edges(
    g: AffiliationGraph, e_add: int, rng: np.random.Generator
) -> list[tuple[str, str]]:
    """Uniform sample without replacement from all absent person-club pairs."""
    total_pairs = g.num_indiv * g.num_club
    available = total_pairs - g.num_edges
    if e_add > available:
        raise SaturatedGraph(
            f"need {e_add} false edges but only {available} non-edges exist"
        )
    if e_add == 0:
        return []
    existing = g.edge_set()
    if total_pairs <= _ENUMERATION_LIMIT:
        candidates = [
            (p, c)
            for p in g.indiv_labels
            for c in g.club_labels
            if (p, c) not in existing
        ]
        picked = rng.choice(len(candidates), size=e_add, replace=False)
        return [candidates[i] for i in sorted(picked)]
    chosen: set[tuple[str, str]] = set()
    out: list[tuple[str, str]] = []
    while len(out) < e_add:
        p = g.indiv_labels[int(rng.integers(g.num_indiv))]
        c = g.club_labels[int(rng.integers(g.num_club))]
        pair = (p, c)
        if pair in existing or pair in chosen:
            continue
        chosen.add(pair)
        out.append(pair)
    return out


def _require_model(spec: PerturbationSpec, model: ErrorModel) -> None:
    if spec.model is not model:
        raise ValueError(f"spec requests model {spec.model.value!r}, not {model.value!r}")


def _base_metadata(g: AffiliationGraph, spec: PerturbationSpec, budget: EdgeBudget) -> dict:
    return {
        "model": spec.model.value,
        "target_precision": spec.precision,
        "target_recall": spec.recall,
        "seed": spec.seed,
        "truth_edges": g.num_edges,
        "e_keep": budget.e_keep,
        "e_add": budget.e_add,
        "removed_true_edges": g.num_edges - budget.e_keep,
        "achieved_recall": budget.e_keep / g.num_edges,
        "synthetic_indiv_nodes": 0,
        "synthetic_club_nodes": 0,
        "reconciliation_deletions": 0,
        "padding_edges": 0,
    }


def _finish_metadata(meta: dict, false_edges: int) -> dict:
    e_keep = meta["e_keep"]
    meta["false_edges"] = false_edges
    meta["achieved_precision"] = e_keep / (e_keep + false_edges) if e_keep + false_edges else 0.0
    return meta


def _random_edge(g: AffiliationGraph, spec: PerturbationSpec) -> PerturbationResult:
    budget = compute_budget(g.num_edges, spec.precision, spec.recall)
    removal_rng, addition_rng, _ = _streams(spec.seed)
    kept = _keep_subset(list(g.edges()), budget.e_keep, removal_rng)
    added = _sample_non_edges(g, budget.e_add, addition_rng)
    out = AffiliationGraph(g.indiv_labels, g.club_labels, kept + added)
    meta = _finish_metadata(_base_metadata(g, spec, budget), len(added))
    return PerturbationResult(out, meta)


def _preferential(g: AffiliationGraph, spec: PerturbationSpec) -> PerturbationResult:
    budget = compute_budget(g.num_edges, spec.precision, spec.recall)
    removal_rng, addition_rng, _ = _streams(spec.seed)
    kept = _keep_subset(list(g.edges()), budget.e_keep, removal_rng)

    indiv = g.indiv_labels
    club = g.club_labels
    cum_indiv = np.cumsum([len(g.clubs_of(p)) for p in indiv])
    cum_club = np.cumsum([len(g.members_of(c)) for c in club])
    existing = g.edge_set()
    added: list[tuple[str, str]] = []
    added_set: set[tuple[str, str]] = set()
    cap = STALL_FACTOR * budget.e_add
    consecutive = 0
    while len(added) < budget.e_add:
        person = degree_weighted_draw(addition_rng, indiv, cum_indiv)
        clb = degree_weighted_draw(addition_rng, club, cum_club)
        pair = (person, clb)
        if pair in existing or pair in added_set:
            consecutive += 1
            if consecutive >= cap:
                raise SamplingStalled(consecutive)
            continue
        consecutive = 0
        added.append(pair)
        added_set.add(pair)
    out = AffiliationGraph(indiv, club, kept + added)
    meta = _finish_metadata(_base_metadata(g, spec, budget), len(added))
    return PerturbationResult(out, meta)


def _node_addition(g: AffiliationGraph, spec: PerturbationSpec) -> PerturbationResult:
    budget = compute_budget(g.num_edges, spec.precision, spec.recall)
    removal_rng, _, endpoint_rng = _streams(spec.seed)
    kept = _keep_subset(list(g.edges()), budget.e_keep, removal_rng)

    labels = _SyntheticLabels(g)
    new_indiv: list[str] = []
    new_club: list[str] = []
    added: list[tuple[str, str]] = []
    for _ in range(budget.e_add):
        # coin 0: existing individual gains a synthetic club; coin 1: the reverse
        if int(endpoint_rng.integers(2)) == 0:
            person = g.indiv_labels[int(endpoint_rng.integers(g.num_indiv))]
            clb = labels.next(Partition.CLUB)
            new_club.append(clb)
        else:
            clb = g.club_labels[int(endpoint_rng.integers(g.num_club))]
            person = labels.next(Partition.INDIV)
            new_indiv.append(person)
        added.append((person, clb))
    out = AffiliationGraph(
        g.indiv_labels + tuple(new_indiv),
        g.club_labels + tuple(new_club),
        kept + added,
    )
    meta = _base_metadata(g, spec, budget)
    meta["synthetic_indiv_nodes"] = len(new_indiv)
    meta["synthetic_club_nodes"] = len(new_club)
    meta = _finish_metadata(meta, len(added))
    return PerturbationResult(out, meta)


def _node_disaggregation(g: AffiliationGraph, spec: PerturbationSpec) -> PerturbationResult:
    budget = compute_budget(g.num_edges, spec.precision, spec.recall)
    removal_rng, addition_rng, endpoint_rng = _streams(spec.seed)
    edges = list(g.edges())
    num = len(edges)

    n_intact = math.floor(max(spec.precision, spec.recall) * num)
    intact_idx = sorted(
        int(i) for i in (
            removal_rng.choice(num, size=n_intact, replace=False) if n_intact < num else range(num)
        )
    )
    intact_set = set(intact_idx)
    misspelled = [edges[i] for i in range(num) if i not in intact_set]

    # each redirected edge keeps one endpoint; coin 0 keeps the person
    redirects: list[tuple[tuple[str, str], Partition]] = []
    for edge in misspelled:
        keep_person = int(endpoint_rng.integers(2)) == 0
        redirects.append((edge, Partition.CLUB if keep_person else Partition.INDIV))

    intact = [edges[i] for i in intact_idx]
    if n_intact > budget.e_keep:
        picked = removal_rng.choice(n_intact, size=budget.e_keep, replace=False)
        intact = [intact[i] for i in sorted(int(j) for j in picked)]

    deletions = 0
    padding: list[tuple[str, Partition]] = []
    if len(redirects) > budget.e_add:
        deletions = len(redirects) - budget.e_add
        picked = addition_rng.choice(len(redirects), size=budget.e_add, replace=False)
        redirects = [redirects[i] for i in sorted(int(j) for j in picked)]
    elif len(redirects) < budget.e_add:
        # pad with extra synthetic attachments, original node drawn uniformly
        # over the pooled node set
        all_labels = g.indiv_labels + g.club_labels
        for _ in range(budget.e_add - len(redirects)):
            idx = int(addition_rng.integers(len(all_labels)))
            part = Partition.INDIV if idx < g.num_indiv else Partition.CLUB
            padding.append((all_labels[idx], part))

    labels = _SyntheticLabels(g)
    new_indiv: list[str] = []
    new_club: list[str] = []
    false_edges: list[tuple[str, str]] = []
    for (person, clb), replaced in redirects:
        fresh = labels.next(replaced)
        if replaced is Partition.CLUB:
            new_club.append(fresh)
            false_edges.append((person, fresh))
        else:
            new_indiv.append(fresh)
            false_edges.append((fresh, clb))
    for original, partition in padding:
        # an original individual gains a synthetic club and vice versa
        if partition is Partition.INDIV:
            fresh = labels.next(Partition.CLUB)
            new_club.append(fresh)
            false_edges.append((original, fresh))
        else:
            fresh = labels.next(Partition.INDIV)
            new_indiv.append(fresh)
            false_edges.append((fresh, original))

    out = AffiliationGraph(
        g.indiv_labels + tuple(new_indiv),
        g.club_labels + tuple(new_club),
        intact + false_edges,
    )
    meta = _base_metadata(g, spec, budget)
    meta["synthetic_indiv_nodes"] = len(new_indiv)
    meta["synthetic_club_nodes"] = len(new_club)
    meta["reconciliation_deletions"] = deletions
    meta["padding_edges"] = len(padding)
    meta = _finish_metadata(meta, len(false_edges))
    return PerturbationResult(out, meta)


def perturb(g: AffiliationGraph, spec: PerturbationSpec) -> PerturbationResult:
    """Run the model named by ``spec`` and return the graph with run metadata."""
    impl = {
        ErrorModel.RANDOM_EDGE: _random_edge,
        ErrorModel.PREFERENTIAL_ATTACHMENT: _preferential,
        ErrorModel.NODE_ADDITION: _node_addition,
        ErrorModel.NODE_DISAGGREGATION: _node_disaggregation,
    }[spec.model]
    if spec.model is ErrorModel.NODE_DISAGGREGATION and g.num_edges < 2:
        raise ValueError("node disaggregation needs a graph with at least 2 edges")
    return impl(g, spec)


def perturb_random_edge(g: AffiliationGraph, spec: PerturbationSpec) -> AffiliationGraph:
    """Uniform edge removal plus uniformly sampled false edges; V unchanged."""
    _require_model(spec, ErrorModel.RANDOM_EDGE)
    return _random_edge(g, spec).graph


def perturb_preferential(g: AffiliationGraph, spec: PerturbationSpec) -> AffiliationGraph:
    """False edges drawn endpoint-wise proportional to original degree, with rejection."""
    _require_model(spec, ErrorModel.PREFERENTIAL_ATTACHMENT)
    return _preferential(g, spec).graph


def perturb_node_addition(g: AffiliationGraph, spec: PerturbationSpec) -> AffiliationGraph:
    """Every false edge connects an existing node to a fresh synthetic node."""
    _require_model(spec, ErrorModel.NODE_ADDITION)
    return _node_addition(g, spec).graph


def perturb_node_disaggregation(g: AffiliationGraph, spec: PerturbationSpec) -> AffiliationGraph:
    """Redirect non-intact edges to fresh synthetic duplicates, then reconcile budgets."""
    _require_model(spec, ErrorModel.NODE_DISAGGREGATION)
    if g.num_edges < 2:
        raise ValueError("node disaggregation needs a graph with at least 2 edges")
    return _node_disaggregation(g, spec).graph


def overestimation_pct(
    truth: AffiliationGraph, extracted: AffiliationGraph, what: str = "nodes"
) -> float:
    """Signed percentage by which extracted node or edge counts exceed truth."""
    if what not in ("nodes", "edges"):
        raise ValueError(f"unknown count kind {what!r}")
    if what == "nodes":
        t, e = truth.num_nodes, extracted.num_nodes
    else:
        t, e = truth.num_edges, extracted.num_edges
    if t == 0:
        raise ValueError("truth graph is empty")
    return 100.0 * (e - t) / t
