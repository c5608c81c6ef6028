"""Batch perturbation experiments.

An experiment perturbs one truth graph many times (several error models,
several precision/recall targets, several replicate seeds), measures the
same metric battery on the truth and on every perturbed graph, and folds
the per-run relative biases into one :class:`~affileval.analysis.BiasTable`.

Everything a run produces lands under the output directory:

    truth_metrics.json
    runs/<run_id>/graph.json      perturbed graph
    runs/<run_id>/metrics.json    metric values plus perturbation metadata
    records.jsonl                 all bias records, sorted by run id
    bias_table.csv / bias_table.json
    manifest.json                 config echo plus per-run status

A failed run is recorded in the manifest and the experiment continues; the
caller decides what to do when every run failed. All randomness flows from
the per-run seeds (base seed + replicate index), so re-running a config
reproduces every artifact byte for byte.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .analysis import BiasRecord, BiasTable, aggregate, bias_record
from .error_models import ErrorModel, PerturbationSpec, perturb
from .errors import AffilEvalError
from .graph import AffiliationGraph, Partition
from .io import load_graph, save_graph, write_records
from .metrics import compute_metric_suite
from .projections import DENSITY_CONVENTIONS, avg_clustering, project, projection_density

log = logging.getLogger(__name__)

# Suite fields compared between truth and perturbed graphs. The two RMAE
# fields are omitted: they are already truth-relative, so their "truth value"
# is identically zero and a ratio to it is undefined.
DEFAULT_BIAS_METRICS = (
    "degree_mean_indiv",
    "degree_std_indiv",
    "degree_mean_club",
    "degree_std_club",
    "bipartite_density",
    "num_connected_components",
    "prop_largest_cc",
    "avg_size_rest_components",
    "diameter_largest_cc",
    "avg_shortest_path_largest_cc",
    "num_communities",
    "projection_density_indiv",
    "projection_density_club",
    "avg_clustering_indiv",
    "avg_clustering_club",
)

F1_MODES = ("target", "achieved")


def full_metric_report(
    g: AffiliationGraph,
    truth: AffiliationGraph | None = None,
    top_k: int = 10,
    density_convention: str = "standard",
) -> dict[str, float | None]:
    """Metric suite plus one-mode projection metrics, as a flat dict.

    Fields that are undefined for the given graph (a single-node largest
    component, an edgeless graph) come back as None rather than raising.
    """
    report: dict[str, float | None] = compute_metric_suite(g, truth=truth, top_k=top_k).to_dict()
    for partition in (Partition.INDIV, Partition.CLUB):
        tag = partition.value
        density: float | None = None
        clustering: float | None = None
        try:
            proj = project(g, partition)
        except AffilEvalError:
            proj = None
        if proj is not None:
            try:
                density = projection_density(proj, density_convention)
            except AffilEvalError:
                density = None
            try:
                clustering = avg_clustering(proj)
            except AffilEvalError:
                clustering = None
        report[f"projection_density_{tag}"] = density
        report[f"avg_clustering_{tag}"] = clustering
    return report


@dataclass(frozen=True)
class RunSpec:
    """One row of the experiment grid: a model at a (P, R) target."""

    model: ErrorModel
    precision: float
    recall: float
    replicates: int
    base_seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", ErrorModel(self.model))
        if self.replicates < 1:
            raise ValueError("replicate count must be at least 1")
        if not (0.0 < self.precision <= 1.0 and 0.0 < self.recall <= 1.0):
            raise ValueError("precision and recall targets must be in (0, 1]")


@dataclass(frozen=True)
class ExperimentConfig:
    truth_graph: Path
    out_dir: Path
    runs: tuple[RunSpec, ...]
    metrics: tuple[str, ...] = DEFAULT_BIAS_METRICS
    top_k: int = 10
    density_convention: str = "standard"
    f1_mode: str = "target"
    jobs: int = 1
    figures: bool = True
    graph_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "truth_graph", Path(self.truth_graph))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "runs", tuple(self.runs))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not self.runs:
            raise ValueError("experiment needs at least one run spec")
        if self.f1_mode not in F1_MODES:
            raise ValueError(f"f1_mode must be one of {F1_MODES}")
        if self.density_convention not in DENSITY_CONVENTIONS:
            raise ValueError(f"density_convention must be one of {DENSITY_CONVENTIONS}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if not self.graph_id:
            object.__setattr__(self, "graph_id", self.truth_graph.stem)

    @classmethod
    def from_json(cls, path: str | Path, overrides: dict | None = None) -> "ExperimentConfig":
        """Load a config file; ``overrides`` (from CLI flags) win over the file.

        Relative paths in the file resolve against the file's directory, so a
        config checked in next to its data keeps working from anywhere.
        """
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(obj, dict):
            raise ValueError("experiment config must be a JSON object")
        if overrides:
            obj.update({k: v for k, v in overrides.items() if v is not None})
        base = path.parent
        runs = tuple(
            RunSpec(
                model=ErrorModel(r["model"]),
                precision=float(r["precision"]),
                recall=float(r["recall"]),
                replicates=int(r.get("replicates", 1)),
                base_seed=int(r.get("base_seed", 0)),
            )
            for r in obj.get("runs", [])
        )
        kwargs = dict(
            truth_graph=base / obj["truth_graph"],
            out_dir=base / obj["out_dir"],
            runs=runs,
        )
        for key in ("metrics", "top_k", "density_convention", "f1_mode", "jobs", "figures", "graph_id"):
            if key in obj:
                kwargs[key] = tuple(obj[key]) if key == "metrics" else obj[key]
        if overrides and overrides.get("truth_graph") is not None:
            kwargs["truth_graph"] = Path(overrides["truth_graph"])
        if overrides and overrides.get("out_dir") is not None:
            kwargs["out_dir"] = Path(overrides["out_dir"])
        return cls(**kwargs)


@dataclass(frozen=True)
class _RunTask:
    """Everything one worker needs; kept to plain data so it pickles cheaply."""

    run_id: str
    truth_graph_path: str
    out_dir: str
    model: str
    precision: float
    recall: float
    replicate: int
    seed: int
    top_k: int
    density_convention: str
    f1_mode: str
    metrics: tuple[str, ...]
    truth_metrics: dict
    graph_id: str


@dataclass(frozen=True)
class _RunOutcome:
    run_id: str
    status: str
    records: tuple[BiasRecord, ...] = ()
    error: str = ""
    f1: float | None = None


@dataclass(frozen=True)
class ExperimentResult:
    table: BiasTable
    records: tuple[BiasRecord, ...]
    manifest: dict
    succeeded: int
    failed: int
    out_dir: Path
    figure_paths: tuple[Path, ...] = ()

    @property
    def all_failed(self) -> bool:
        return self.succeeded == 0


def _harmonic(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def _execute_run(task: _RunTask) -> _RunOutcome:
    try:
        truth = load_graph(task.truth_graph_path)
        spec = PerturbationSpec(
            model=ErrorModel(task.model),
            precision=task.precision,
            recall=task.recall,
            seed=task.seed,
        )
        result = perturb(truth, spec)
        run_dir = Path(task.out_dir) / "runs" / task.run_id
        run_dir.mkdir(parents=True, exist_ok=True)
        save_graph(result.graph, run_dir / "graph.json")
        measured = full_metric_report(
            result.graph,
            truth=truth,
            top_k=task.top_k,
            density_convention=task.density_convention,
        )
        if task.f1_mode == "achieved":
            f1 = _harmonic(
                result.metadata["achieved_precision"], result.metadata["achieved_recall"]
            )
        else:
            f1 = _harmonic(task.precision, task.recall)
        (run_dir / "metrics.json").write_text(
            json.dumps(
                {"run_id": task.run_id, "f1": f1, "metrics": measured, "perturbation": result.metadata},
                ensure_ascii=False,
                sort_keys=True,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        records = []
        for name in task.metrics:
            t = task.truth_metrics.get(name)
            e = measured.get(name)
            if t is None or e is None:
                continue
            records.append(
                bias_record(name, t, e, f1, graph_id=task.graph_id, run_id=task.run_id)
            )
        return _RunOutcome(task.run_id, "ok", tuple(records), f1=f1)
    except (AffilEvalError, ValueError, OSError) as exc:
        return _RunOutcome(task.run_id, "failed", error=f"{type(exc).__name__}: {exc}")


def _build_tasks(cfg: ExperimentConfig, truth_metrics: dict) -> list[_RunTask]:
    tasks = []
    for spec in cfg.runs:
        for replicate in range(spec.replicates):
            seed = spec.base_seed + replicate
            run_id = (
                f"{spec.model.value}_p{spec.precision:.4f}_r{spec.recall:.4f}"
                f"_rep{replicate:03d}_s{seed}"
            )
            tasks.append(
                _RunTask(
                    run_id=run_id,
                    truth_graph_path=str(cfg.truth_graph),
                    out_dir=str(cfg.out_dir),
                    model=spec.model.value,
                    precision=spec.precision,
                    recall=spec.recall,
                    replicate=replicate,
                    seed=seed,
                    top_k=cfg.top_k,
                    density_convention=cfg.density_convention,
                    f1_mode=cfg.f1_mode,
                    metrics=cfg.metrics,
                    truth_metrics=truth_metrics,
                    graph_id=cfg.graph_id,
                )
            )
    ids = [t.run_id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ValueError("run ids collide; give overlapping run specs distinct base seeds")
    return tasks


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute every run in the grid and aggregate the bias table.

    Individual run failures are logged into the manifest and skipped; the
    experiment only counts as failed overall when no run succeeded (the CLI
    maps that to a nonzero exit code).
    """
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    truth = load_graph(cfg.truth_graph)
    truth_metrics = full_metric_report(
        truth, truth=truth, top_k=cfg.top_k, density_convention=cfg.density_convention
    )
    (cfg.out_dir / "truth_metrics.json").write_text(
        json.dumps(truth_metrics, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    tasks = _build_tasks(cfg, truth_metrics)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_execute_run, tasks))
    else:
        outcomes = [_execute_run(t) for t in tasks]
    # merge order is the sorted run id, independent of completion order
    by_id = {t.run_id: t for t in tasks}
    outcomes.sort(key=lambda o: o.run_id)

    records: list[BiasRecord] = []
    run_entries = []
    succeeded = failed = 0
    for outcome in outcomes:
        task = by_id[outcome.run_id]
        entry = {
            "run_id": outcome.run_id,
            "model": task.model,
            "precision": task.precision,
            "recall": task.recall,
            "replicate": task.replicate,
            "seed": task.seed,
            "status": outcome.status,
        }
        if outcome.status == "ok":
            succeeded += 1
            records.extend(outcome.records)
            entry["f1"] = outcome.f1
            entry["graph"] = f"runs/{outcome.run_id}/graph.json"
            entry["metrics"] = f"runs/{outcome.run_id}/metrics.json"
        else:
            failed += 1
            entry["error"] = outcome.error
            log.warning("run %s failed: %s", outcome.run_id, outcome.error)
        run_entries.append(entry)

    if records:
        write_records(records, cfg.out_dir / "records.jsonl")
    else:
        (cfg.out_dir / "records.jsonl").write_text("", encoding="utf-8")
    table = aggregate(records)
    (cfg.out_dir / "bias_table.csv").write_text(table.to_csv_text(), encoding="utf-8")
    (cfg.out_dir / "bias_table.json").write_text(
        json.dumps(table.to_json_obj(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )

    figure_paths: tuple[Path, ...] = ()
    if cfg.figures and records:
        from .figures import render_report_figures

        figure_paths = tuple(render_report_figures(table, records, cfg.out_dir))

    manifest = {
        "truth_graph": str(cfg.truth_graph),
        "graph_id": cfg.graph_id,
        "f1_mode": cfg.f1_mode,
        "density_convention": cfg.density_convention,
        "top_k": cfg.top_k,
        "metrics": list(cfg.metrics),
        "truth_metrics": "truth_metrics.json",
        "runs": run_entries,
        "outputs": {
            "records": "records.jsonl",
            "bias_table_csv": "bias_table.csv",
            "bias_table_json": "bias_table.json",
            "figures": [str(p.relative_to(cfg.out_dir)) for p in figure_paths],
        },
    }
    (cfg.out_dir / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return ExperimentResult(
        table=table,
        records=tuple(records),
        manifest=manifest,
        succeeded=succeeded,
        failed=failed,
        out_dir=cfg.out_dir,
        figure_paths=figure_paths,
    )
