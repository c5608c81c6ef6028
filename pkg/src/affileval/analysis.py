"""Relative bias bookkeeping between truth and extracted metric values.

A :class:`BiasRecord` captures one (metric, run) comparison; ``aggregate``
folds many records into the bin-by-metric table used for reporting. Graphs
are macro-averaged: records are first averaged within each graph id, then
across graphs, so a dataset contributing many graphs does not swamp a
dataset contributing one.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, asdict
from typing import Iterable, Sequence

from .errors import NoData
from .tuple_eval import BELOW_RANGE, BIN_LABELS, f1_bin

log = logging.getLogger(__name__)

_BIN_ORDER = {label: i for i, label in enumerate(BIN_LABELS + (BELOW_RANGE,))}


@dataclass(frozen=True)
class BiasRecord:
    """Relative bias of one metric in one run, binned by the run's F1."""

    metric: str
    truth_value: float
    extracted_value: float
    rel_bias: float | None
    rel_mae: float | None
    f1: float
    bin: str
    graph_id: str = ""
    run_id: str = ""

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BiasRecord":
        # the bin is a pure function of f1; recompute instead of trusting input
        f1 = float(data["f1"])
        return cls(
            metric=data["metric"],
            truth_value=float(data["truth_value"]),
            extracted_value=float(data["extracted_value"]),
            rel_bias=None if data.get("rel_bias") is None else float(data["rel_bias"]),
            rel_mae=None if data.get("rel_mae") is None else float(data["rel_mae"]),
            f1=f1,
            bin=f1_bin(f1),
            graph_id=data.get("graph_id", ""),
            run_id=data.get("run_id", ""),
        )


def bias_record(
    metric_name: str,
    truth: float,
    extracted: float,
    f1: float,
    graph_id: str = "",
    run_id: str = "",
) -> BiasRecord:
    """rel_bias = (extracted - truth) / truth, rel_mae its magnitude.

    A zero truth value leaves both fields null (with a warning); the record
    is still emitted so run counts stay auditable.
    """
    if not math.isfinite(truth) or not math.isfinite(extracted):
        raise ValueError("truth and extracted values must be finite")
    if truth == 0:
        log.warning(
            "metric %s has truth value 0; bias undefined for this record", metric_name
        )
        rel_bias = None
        rel_mae = None
    else:
        rel_bias = (extracted - truth) / truth
        rel_mae = abs(rel_bias)
    return BiasRecord(
        metric=metric_name,
        truth_value=truth,
        extracted_value=extracted,
        rel_bias=rel_bias,
        rel_mae=rel_mae,
        f1=f1,
        bin=f1_bin(f1),
        graph_id=graph_id,
        run_id=run_id,
    )


@dataclass(frozen=True)
class BiasRow:
    mean_rel_bias: float
    mean_rel_mae: float
    n: int


@dataclass(frozen=True)
class BiasTable:
    """Mean rel bias / rel MAE per (bin, metric), plus contributing counts."""

    rows: dict[tuple[str, str], BiasRow]

    def sorted_keys(self) -> list[tuple[str, str]]:
        return sorted(self.rows, key=lambda k: (_BIN_ORDER.get(k[0], len(_BIN_ORDER)), k[1]))

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bin", "metric", "mean_rel_bias", "mean_rel_mae", "n"])
        for key in self.sorted_keys():
            row = self.rows[key]
            writer.writerow([key[0], key[1], repr(row.mean_rel_bias), repr(row.mean_rel_mae), row.n])
        return buf.getvalue()

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "bin": key[0],
                "metric": key[1],
                "mean_rel_bias": self.rows[key].mean_rel_bias,
                "mean_rel_mae": self.rows[key].mean_rel_mae,
                "n": self.rows[key].n,
            }
            for key in self.sorted_keys()
        ]


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def aggregate(records: Iterable[BiasRecord]) -> BiasTable:
    """Fold records into a BiasTable.

    Records with null bias (zero truth) are excluded from the means; a single
    warning reports how many were dropped. Within each (bin, metric) cell the
    mean is taken per graph id first, then across graphs, which reduces to the
    flat mean when every record carries the same graph id.
    """
    groups: dict[tuple[str, str], dict[str, list[BiasRecord]]] = {}
    dropped = 0
    for rec in records:
        if rec.rel_bias is None:
            dropped += 1
            continue
        groups.setdefault((rec.bin, rec.metric), {}).setdefault(rec.graph_id, []).append(rec)
    if dropped:
        log.warning("aggregate: %d records had zero truth values and were excluded", dropped)
    rows: dict[tuple[str, str], BiasRow] = {}
    for key, by_graph in groups.items():
        graph_biases = []
        graph_maes = []
        n = 0
        for recs in by_graph.values():
            graph_biases.append(_mean([r.rel_bias for r in recs]))
            graph_maes.append(_mean([r.rel_mae for r in recs]))
            n += len(recs)
        mean_bias = _mean(graph_biases)
        mean_mae = _mean(graph_maes)
        # triangle inequality, with room for float summation noise
        assert mean_mae >= abs(mean_bias) - 1e-12 * (1.0 + abs(mean_bias))
        rows[key] = BiasRow(mean_rel_bias=mean_bias, mean_rel_mae=mean_mae, n=n)
    return BiasTable(rows=rows)


def sign_consistency(
    records: Iterable[BiasRecord], metric: str
) -> tuple[float, float]:
    """Fractions of the metric's records with negative and positive bias.

    Zero biases count in neither fraction; null-bias records are ignored.
    Raises :class:`NoData` when the metric has no usable records.
    """
    biases = [r.rel_bias for r in records if r.metric == metric and r.rel_bias is not None]
    if not biases:
        raise NoData(f"no usable records for metric {metric!r}")
    negative = sum(1 for b in biases if b < 0)
    positive = sum(1 for b in biases if b > 0)
    return negative / len(biases), positive / len(biases)
