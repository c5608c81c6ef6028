"""Command-line interface.

Subcommands: ingest, evaluate, metrics, project, simulate, bias, and
run-experiment. Data goes to stdout or the file named by --out; logs are
line-delimited JSON on stderr. Exit codes: 0 on success, 1 when the work
failed (including an experiment whose every run failed), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import aggregate
from .error_models import ErrorModel, PerturbationSpec, perturb
from .errors import AffilEvalError
from .experiment import ExperimentConfig, full_metric_report, run_experiment
from .graph import Partition, build_graph
from .io import (
    TUPLE_FORMATS,
    graph_to_obj,
    load_abbreviations,
    load_graph,
    parse_tuple_file,
    projection_to_obj,
    read_records,
    save_graph,
)
from .normalize import NormalizationConfig
from .projections import DENSITY_CONVENTIONS, avg_clustering, project, projection_density
from .tuple_eval import evaluate_tuples, f1_bin, sample_false_positives

log = logging.getLogger(__name__)


class _JsonLineFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "level": record.levelname.lower(),
            "logger": record.name,
            "message": record.getMessage(),
        }
        return json.dumps(payload, ensure_ascii=False)


def _setup_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLineFormatter())
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def _norm_config(args: argparse.Namespace) -> NormalizationConfig:
    kwargs = {}
    if getattr(args, "abbrev", None):
        kwargs["abbreviation_map"] = load_abbreviations(args.abbrev)
    if getattr(args, "lenient_titles", False):
        kwargs["strict_titles"] = False
    return NormalizationConfig(**kwargs)


def _cmd_ingest(args: argparse.Namespace) -> int:
    tuples = parse_tuple_file(args.tuples, format=args.format)
    g = build_graph(tuples, _norm_config(args))
    log.info(
        "ingested %d tuples into graph with %d individuals, %d clubs, %d edges",
        len(tuples),
        g.num_indiv,
        g.num_club,
        g.num_edges,
    )
    _emit(_json_text(graph_to_obj(g)), args.out)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    if (args.fp_sample is None) != (args.seed is None):
        raise UsageError("--fp-sample and --seed must be given together")
    cfg = _norm_config(args)
    predicted = parse_tuple_file(args.pred, format=args.format)
    truth = parse_tuple_file(args.truth, format=args.format)
    report = evaluate_tuples(predicted, truth, cfg)
    payload = report.to_dict()
    payload["bin"] = f1_bin(report.f1)
    if args.fp_sample is not None:
        sample = sample_false_positives(report, predicted, args.fp_sample, args.seed)
        payload["false_positive_sample"] = [
            {"person": t.person, "relation": t.relation, "club": t.club, "line": t.source_index}
            for t in sample
        ]
    log.info(
        "evaluated %d predicted against %d truth tuples: precision=%.4f recall=%.4f f1=%.4f",
        len(predicted),
        len(truth),
        report.precision,
        report.recall,
        report.f1,
    )
    _emit(_json_text(payload), args.out)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    truth = load_graph(args.truth) if args.truth else None
    report = full_metric_report(
        g, truth=truth, top_k=args.top_k, density_convention=args.density_convention
    )
    log.info("computed %d metrics for %s", len(report), args.graph)
    _emit(_json_text(report), args.out)
    return 0


def _cmd_project(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    proj = project(g, Partition(args.onto))
    density = None
    if proj.num_nodes >= 2:
        density = projection_density(proj, args.density_convention)
    log.info(
        "projected onto %s: %d nodes, %d edges, density=%s, avg_clustering=%.6f",
        args.onto,
        proj.num_nodes,
        proj.num_edges,
        "undefined" if density is None else f"{density:.6f}",
        avg_clustering(proj),
    )
    _emit(_json_text(projection_to_obj(proj)), args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    spec = PerturbationSpec(
        model=ErrorModel(args.model),
        precision=args.precision,
        recall=args.recall,
        seed=args.seed,
    )
    result = perturb(g, spec)
    log.info("perturbation metadata: %s", json.dumps(result.metadata, sort_keys=True))
    if args.out:
        save_graph(result.graph, args.out)
    else:
        sys.stdout.write(_json_text(graph_to_obj(result.graph)))
    if args.metrics_out:
        report = full_metric_report(
            result.graph, truth=g, top_k=args.top_k, density_convention=args.density_convention
        )
        Path(args.metrics_out).write_text(
            _json_text({"metrics": report, "perturbation": result.metadata}), encoding="utf-8"
        )
    return 0


def _cmd_bias(args: argparse.Namespace) -> int:
    records = read_records(args.records)
    table = aggregate(records)
    fmt = args.fmt
    if fmt == "auto":
        if args.out and args.out.lower().endswith(".json"):
            fmt = "json"
        else:
            fmt = "csv"
    text = _json_text(table.to_json_obj()) if fmt == "json" else table.to_csv_text()
    log.info("aggregated %d records into %d table rows", len(records), len(table.rows))
    _emit(text, args.out)
    if args.figures_dir:
        from .figures import render_report_figures  # defer pulling in matplotlib

        for path in render_report_figures(table, records, args.figures_dir):
            log.info("wrote figure %s", path)
    return 0


def _cmd_run_experiment(args: argparse.Namespace) -> int:
    overrides = {
        "truth_graph": args.truth_graph,
        "out_dir": args.out_dir,
        "jobs": args.jobs,
        "f1_mode": args.f1_mode,
        "density_convention": args.density_convention,
        "top_k": args.top_k,
        "figures": args.figures,
    }
    cfg = ExperimentConfig.from_json(args.config, overrides=overrides)
    result = run_experiment(cfg)
    summary = {
        "out_dir": str(result.out_dir),
        "runs_succeeded": result.succeeded,
        "runs_failed": result.failed,
        "bias_table_csv": str(result.out_dir / "bias_table.csv"),
        "figures": [str(p) for p in result.figure_paths],
    }
    sys.stdout.write(_json_text(summary))
    if result.all_failed:
        log.error("all %d runs failed", result.failed)
        return 1
    return 0


class UsageError(Exception):
    pass


def _add_tuple_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=TUPLE_FORMATS, default="auto", help="tuple file format")
    sub.add_argument("--abbrev", help="JSON file mapping abbreviation tokens to expansions")
    titles = sub.add_mutually_exclusive_group()
    titles.add_argument(
        "--strict-titles",
        dest="lenient_titles",
        action="store_false",
        help="a title on either person must match (default)",
    )
    titles.add_argument(
        "--lenient-titles",
        dest="lenient_titles",
        action="store_true",
        help="compare titles only when both persons carry one",
    )
    sub.set_defaults(lenient_titles=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affileval",
        description="Affiliation graph extraction quality: evaluate, measure, perturb, aggregate.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug-level logs")
    subs = parser.add_subparsers(dest="command", required=True)

    ingest = subs.add_parser("ingest", help="build a graph JSON from a tuple file")
    ingest.add_argument("--tuples", required=True, help="CSV or JSONL tuple file")
    _add_tuple_args(ingest)
    ingest.add_argument("--out", help="output graph JSON path (default stdout)")
    ingest.set_defaults(func=_cmd_ingest)

    evaluate = subs.add_parser("evaluate", help="score predicted tuples against ground truth")
    evaluate.add_argument("--pred", required=True, help="predicted tuple file")
    evaluate.add_argument("--truth", required=True, help="ground-truth tuple file")
    _add_tuple_args(evaluate)
    evaluate.add_argument("--fp-sample", type=int, metavar="N", help="sample N false positives")
    evaluate.add_argument("--seed", type=int, help="seed for the false-positive sample")
    evaluate.add_argument("--out", help="output JSON path (default stdout)")
    evaluate.set_defaults(func=_cmd_evaluate)

    metrics = subs.add_parser("metrics", help="compute the metric battery for a graph")
    metrics.add_argument("--graph", required=True, help="graph JSON path")
    metrics.add_argument("--truth", help="truth graph JSON for degree-error metrics")
    metrics.add_argument("--top-k", type=int, default=10, help="club count for top-k degree error")
    metrics.add_argument(
        "--density-convention", choices=DENSITY_CONVENTIONS, default="standard"
    )
    metrics.add_argument("--out", help="output JSON path (default stdout)")
    metrics.set_defaults(func=_cmd_metrics)

    proj = subs.add_parser("project", help="one-mode projection of a bipartite graph")
    proj.add_argument("--graph", required=True, help="graph JSON path")
    proj.add_argument("--onto", required=True, choices=[p.value for p in Partition])
    proj.add_argument(
        "--density-convention", choices=DENSITY_CONVENTIONS, default="standard"
    )
    proj.add_argument("--out", help="output projection JSON path (default stdout)")
    proj.set_defaults(func=_cmd_project)

    simulate = subs.add_parser("simulate", help="perturb a graph with an error model")
    simulate.add_argument("--graph", required=True, help="truth graph JSON path")
    simulate.add_argument(
        "--model", required=True, choices=[m.value for m in ErrorModel]
    )
    simulate.add_argument("--precision", type=float, required=True)
    simulate.add_argument("--recall", type=float, required=True)
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--out", help="output graph JSON path (default stdout)")
    simulate.add_argument("--metrics-out", help="also write perturbed-graph metrics JSON here")
    simulate.add_argument("--top-k", type=int, default=10)
    simulate.add_argument(
        "--density-convention", choices=DENSITY_CONVENTIONS, default="standard"
    )
    simulate.set_defaults(func=_cmd_simulate)

    bias = subs.add_parser("bias", help="aggregate bias records into a table")
    bias.add_argument("--records", required=True, help="bias records JSONL path")
    bias.add_argument(
        "--fmt", choices=("auto", "csv", "json"), default="auto", help="output format"
    )
    bias.add_argument("--out", help="output path; .json extension selects JSON (default stdout CSV)")
    bias.add_argument("--figures-dir", help="also render report figures into this directory")
    bias.set_defaults(func=_cmd_bias)

    exp = subs.add_parser("run-experiment", help="run a perturbation experiment from a config")
    exp.add_argument("--config", required=True, help="experiment config JSON path")
    exp.add_argument("--truth-graph", help="override the config's truth graph path")
    exp.add_argument("--out-dir", help="override the config's output directory")
    exp.add_argument("--jobs", type=int, metavar="N", help="worker pool size")
    exp.add_argument("--f1-mode", choices=("target", "achieved"))
    exp.add_argument("--density-convention", choices=DENSITY_CONVENTIONS)
    exp.add_argument("--top-k", type=int)
    figures = exp.add_mutually_exclusive_group()
    figures.add_argument("--figures", dest="figures", action="store_true", default=None)
    figures.add_argument("--no-figures", dest="figures", action="store_false", default=None)
    exp.set_defaults(func=_cmd_run_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except (AffilEvalError, OSError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
