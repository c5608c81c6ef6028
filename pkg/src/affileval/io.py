"""File formats: membership tuples, graphs, projections, bias records.

Tuples come in as CSV (header ``person,relation,club``, RFC 4180 quoting) or
JSONL (one ``{"person": ..., "relation": ..., "club": ...}`` object per line).
Graphs persist as a single JSON document with index-based edges so labels are
stored exactly once. Everything is UTF-8.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .analysis import BiasRecord
from .errors import EmptyInput, MalformedInput, UnknownFormat
from .graph import AffiliationGraph, EdgeTuple, Partition
from .projections import ProjectionGraph

TUPLE_FORMATS = ("auto", "csv", "jsonl")
_TUPLE_FIELDS = ("person", "relation", "club")


def _detect_format(path: Path) -> str:
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".jsonl":
        return "jsonl"
    raise UnknownFormat(
        f"cannot infer tuple format from extension {suffix!r}; pass format='csv' or 'jsonl'"
    )


def _parse_csv(path: Path) -> list[EdgeTuple]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInput(f"{path} is empty") from None
        if [h.strip().lower() for h in header] != list(_TUPLE_FIELDS):
            raise MalformedInput(reader.line_num, "header must be person,relation,club")
        tuples: list[EdgeTuple] = []
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise MalformedInput(reader.line_num, f"expected 3 fields, got {len(row)}")
            tuples.append(EdgeTuple(row[0], row[1], row[2], source_index=reader.line_num))
    if not tuples:
        raise EmptyInput(f"{path} contains a header but no tuples")
    return tuples


def _parse_jsonl(path: Path) -> list[EdgeTuple]:
    tuples: list[EdgeTuple] = []
    with path.open(encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedInput(line_num, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise MalformedInput(line_num, "each line must be a JSON object")
            missing = [f for f in _TUPLE_FIELDS if f not in obj]
            if missing:
                raise MalformedInput(line_num, f"missing fields: {', '.join(missing)}")
            values = []
            for field in _TUPLE_FIELDS:
                if not isinstance(obj[field], str):
                    raise MalformedInput(line_num, f"field {field!r} must be a string")
                values.append(obj[field])
            tuples.append(EdgeTuple(*values, source_index=line_num))
    if not tuples:
        raise EmptyInput(f"{path} contains no tuples")
    return tuples


def parse_tuple_file(path: str | Path, format: str = "auto") -> list[EdgeTuple]:
    """Read membership tuples from ``path`` in file order.

    ``format`` is ``csv``, ``jsonl``, or ``auto`` (pick by extension). Each
    tuple's ``source_index`` is its 1-based line number. Raises
    :class:`UnknownFormat` when auto-detection fails, :class:`MalformedInput`
    for unparsable lines, and :class:`EmptyInput` for files with no tuples.
    """
    path = Path(path)
    if format not in TUPLE_FORMATS:
        raise ValueError(f"format must be one of {TUPLE_FORMATS}, got {format!r}")
    if format == "auto":
        format = _detect_format(path)
    if format == "csv":
        return _parse_csv(path)
    return _parse_jsonl(path)


def graph_to_obj(g: AffiliationGraph) -> dict:
    indiv_index = {label: i for i, label in enumerate(g.indiv_labels)}
    club_index = {label: i for i, label in enumerate(g.club_labels)}
    return {
        "indiv": list(g.indiv_labels),
        "club": list(g.club_labels),
        "edges": sorted([indiv_index[p], club_index[c]] for p, c in g.edge_set()),
    }


def graph_from_obj(obj: dict) -> AffiliationGraph:
    try:
        indiv = obj["indiv"]
        club = obj["club"]
        raw_edges = obj["edges"]
    except (KeyError, TypeError):
        raise MalformedInput(1, "graph JSON needs keys indiv, club, edges") from None
    if not (isinstance(indiv, list) and isinstance(club, list) and isinstance(raw_edges, list)):
        raise MalformedInput(1, "indiv, club, and edges must be arrays")
    edges = []
    for entry in raw_edges:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise MalformedInput(1, f"edge {entry!r} is not an [i, j] pair")
        i, j = entry
        if not (isinstance(i, int) and 0 <= i < len(indiv)):
            raise MalformedInput(1, f"individual index {i!r} out of range")
        if not (isinstance(j, int) and 0 <= j < len(club)):
            raise MalformedInput(1, f"club index {j!r} out of range")
        edges.append((indiv[i], club[j]))
    return AffiliationGraph(indiv, club, edges)


def save_graph(g: AffiliationGraph, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(graph_to_obj(g), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def load_graph(path: str | Path) -> AffiliationGraph:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.lineno, f"invalid JSON: {exc.msg}") from exc
    return graph_from_obj(obj)


def projection_to_obj(p: ProjectionGraph) -> dict:
    index = {label: i for i, label in enumerate(p.node_labels)}
    return {
        "partition": p.partition.value,
        "nodes": list(p.node_labels),
        "edges": sorted([index[u], index[v]] for u, v in p.edges()),
    }


def projection_from_obj(obj: dict) -> ProjectionGraph:
    try:
        partition = Partition(obj["partition"])
        nodes = obj["nodes"]
        raw_edges = obj["edges"]
    except (KeyError, TypeError, ValueError):
        raise MalformedInput(1, "projection JSON needs partition, nodes, edges") from None
    edges = []
    for entry in raw_edges:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise MalformedInput(1, f"edge {entry!r} is not an [i, j] pair")
        i, j = entry
        if not all(isinstance(k, int) and 0 <= k < len(nodes) for k in (i, j)):
            raise MalformedInput(1, f"edge {entry!r} has an index out of range")
        edges.append((nodes[i], nodes[j]))
    return ProjectionGraph(partition, nodes, edges)


def save_projection(p: ProjectionGraph, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(projection_to_obj(p), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def load_projection(path: str | Path) -> ProjectionGraph:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.lineno, f"invalid JSON: {exc.msg}") from exc
    return projection_from_obj(obj)


def load_abbreviations(path: str | Path) -> dict[str, str]:
    """Abbreviation maps are flat JSON objects of token -> expansion."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInput(exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in obj.items()
    ):
        raise MalformedInput(1, "abbreviation file must map strings to strings")
    return obj


def write_records(records: Iterable[BiasRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


def read_records(path: str | Path) -> list[BiasRecord]:
    records: list[BiasRecord] = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records.append(BiasRecord.from_dict(obj))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedInput(line_num, f"bad bias record: {exc}") from exc
    if not records:
        raise EmptyInput(f"{path} contains no bias records")
    return records
