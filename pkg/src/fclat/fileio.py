"""File formats: JSON contexts and tensors, JSONL corpora, CSV tables.

All writers go through a temp file plus atomic rename so a failed run
never leaves a partial artifact. Loaders raise ValidationError naming the
offending field.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Sequence

import numpy as np

from .context import FormalContext
from .errors import ValidationError
from .evaluate import EvalReport, GoldContext, LatticeComparison
from .lattice import ConceptLattice
from .pipeline import PooledContext, TriadicTensor
from .synth import ConvergenceTable, GibbsResult, Pattern, Sentence, SyntheticCorpus


def atomic_write_text(path: str, text: str) -> None:
    """Write text via a sibling temp file and rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"top-level JSON value in {path} must be an object")
    return data


def _require(data: dict, field: str, path: str):
    if field not in data:
        raise ValidationError(f"missing field '{field}' in {path}")
    return data[field]


def _string_list(data: dict, field: str, path: str) -> list[str]:
    value = _require(data, field, path)
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ValidationError(f"field '{field}' in {path} must be a list of strings")
    return value


# -- formal contexts ---------------------------------------------------------

def save_context(ctx: FormalContext, path: str, metadata: dict | None = None) -> None:
    payload = {
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "incidence": ctx.incidence.astype(int).tolist(),
    }
    if metadata is not None:
        payload["metadata"] = metadata
    atomic_write_text(path, _dump_json(payload))


def load_context(path: str) -> FormalContext:
    data = _load_json(path)
    objects = _string_list(data, "objects", path)
    attributes = _string_list(data, "attributes", path)
    rows = _require(data, "incidence", path)
    if not isinstance(rows, list):
        raise ValidationError(f"field 'incidence' in {path} must be a list of rows")
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(attributes):
            raise ValidationError(
                f"field 'incidence' in {path}: row {i} must be a list of length {len(attributes)}"
            )
        for v in row:
            if v not in (0, 1, True, False):
                raise ValidationError(
                    f"field 'incidence' in {path}: row {i} contains {v!r}, expected 0 or 1"
                )
        matrix.append([bool(v) for v in row])
    if len(matrix) != len(objects):
        raise ValidationError(
            f"field 'incidence' in {path} has {len(matrix)} rows, expected {len(objects)}"
        )
    return FormalContext(objects, attributes, np.array(matrix, dtype=bool).reshape(len(objects), len(attributes)))


def load_gold_context(path: str) -> GoldContext:
    ctx = load_context(path)
    data = _load_json(path)
    meta = data.get("metadata", {})
    if not isinstance(meta, dict):
        raise ValidationError(f"field 'metadata' in {path} must be an object")
    return GoldContext(ctx, meta)


# -- tensors and pooled contexts ---------------------------------------------

def save_tensor(tensor: TriadicTensor, path: str) -> None:
    payload = {
        "objects": list(tensor.objects),
        "attributes": list(tensor.attributes),
        "patterns": list(tensor.patterns),
        "direction": tensor.direction,
        "values": tensor.values.tolist(),
    }
    atomic_write_text(path, _dump_json(payload))


def load_tensor(path: str) -> TriadicTensor:
    data = _load_json(path)
    objects = _string_list(data, "objects", path)
    attributes = _string_list(data, "attributes", path)
    patterns = _string_list(data, "patterns", path)
    direction = _require(data, "direction", path)
    values = _require(data, "values", path)
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"field 'values' in {path} must be a numeric 3-level nested list") from None
    if arr.ndim != 3:
        raise ValidationError(
            f"field 'values' in {path} has {arr.ndim} dimensions, expected 3"
        )
    try:
        return TriadicTensor(objects, attributes, patterns, arr, direction)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def save_pooled(pooled: PooledContext, path: str) -> None:
    payload = {
        "objects": list(pooled.objects),
        "attributes": list(pooled.attributes),
        "values": pooled.scores.tolist(),
        "pooling": pooled.pooling,
        "normalization": pooled.normalization,
        "alpha": pooled.alpha,
    }
    atomic_write_text(path, _dump_json(payload))


def load_pooled(path: str) -> PooledContext:
    data = _load_json(path)
    objects = _string_list(data, "objects", path)
    attributes = _string_list(data, "attributes", path)
    values = _require(data, "values", path)
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"field 'values' in {path} must be a numeric 2-level nested list") from None
    if arr.ndim != 2:
        raise ValidationError(
            f"field 'values' in {path} has {arr.ndim} dimensions, expected 2"
        )
    pooling = data.get("pooling", "none")
    normalization = data.get("normalization", "none")
    alpha = data.get("alpha")
    try:
        return PooledContext(objects, attributes, arr, pooling, normalization, alpha)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


# -- corpora ------------------------------------------------------------------

def save_corpus(corpus: SyntheticCorpus, path: str) -> None:
    buf = io.StringIO()
    for s in corpus.sentences:
        buf.write(
            json.dumps(
                {
                    "pattern": s.pattern_id,
                    "object": s.object_id,
                    "attribute": s.attribute_id,
                    "text": list(s.tokens),
                }
            )
        )
        buf.write("\n")
    atomic_write_text(path, buf.getvalue())


def load_corpus(path: str, source_context_id: str = "", seed: int = 0) -> SyntheticCorpus:
    sentences: list[Sentence] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"invalid JSON on line {lineno} of {path}: {exc}") from None
            where = f"{path}:{lineno}"
            pattern = _require(rec, "pattern", where)
            obj = _require(rec, "object", where)
            attr = _require(rec, "attribute", where)
            text = _require(rec, "text", where)
            if not isinstance(text, list) or not all(isinstance(t, str) for t in text):
                raise ValidationError(f"field 'text' in {where} must be a list of strings")
            sentences.append(Sentence(str(pattern), str(obj), str(attr), tuple(text)))
    return SyntheticCorpus(tuple(sentences), source_context_id, seed)


# -- patterns -----------------------------------------------------------------

def save_patterns(patterns: Sequence[Pattern], path: str) -> None:
    payload = {
        "patterns": [{"id": p.id, "template": list(p.template)} for p in patterns]
    }
    atomic_write_text(path, _dump_json(payload))


def load_patterns(path: str) -> list[Pattern]:
    data = _load_json(path)
    items = _require(data, "patterns", path)
    if not isinstance(items, list) or not items:
        raise ValidationError(f"field 'patterns' in {path} must be a non-empty list")
    out = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ValidationError(f"field 'patterns' in {path}: entry {i} must be an object")
        where = f"{path} patterns[{i}]"
        pid = _require(item, "id", where)
        template = _require(item, "template", where)
        if not isinstance(template, list) or not all(isinstance(t, str) for t in template):
            raise ValidationError(f"field 'template' in {where} must be a list of strings")
        try:
            out.append(Pattern(str(pid), tuple(template)))
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    return out


# -- tables and reports -------------------------------------------------------

def save_convergence_csv(table: ConvergenceTable, path: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "trial", "distance"])
    for n, trial, distance in table.rows:
        writer.writerow([n, trial, repr(float(distance))])
    atomic_write_text(path, buf.getvalue())


def save_report(report: EvalReport, path: str) -> None:
    payload = {
        "task": report.task,
        "aggregate": {k: report.aggregate[k] for k in report.aggregate},
        "per_query": list(report.per_query),
        "diagnostics": report.diagnostics,
    }
    atomic_write_text(path, _dump_json(payload))


def save_report_csv(report: EvalReport, path: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["metric", "value"])
    for name, value in report.aggregate.items():
        writer.writerow([name, repr(float(value))])
    atomic_write_text(path, buf.getvalue())


def save_lattice_json(lattice: ConceptLattice, path: str) -> None:
    payload = {
        "concepts": [
            {"extent": list(c.object_ids()), "intent": list(c.attribute_ids())}
            for c in lattice.concepts
        ],
        "covers": [list(pair) for pair in lattice.covers],
        "top": lattice.top,
        "bottom": lattice.bottom,
    }
    atomic_write_text(path, _dump_json(payload))


def save_comparison(result: LatticeComparison, path: str) -> None:
    payload = {
        "jaccard": result.jaccard,
        "order_agreement": result.order_agreement,
        "n_shared": result.n_shared,
        "n_only_a": result.n_only_a,
        "n_only_b": result.n_only_b,
    }
    atomic_write_text(path, _dump_json(payload))


def save_chain_jsonl(result: GibbsResult, path: str) -> None:
    buf = io.StringIO()
    for t, (g, m) in enumerate(result.chain):
        buf.write(json.dumps({"step": t, "object": g, "attribute": m}))
        buf.write("\n")
    atomic_write_text(path, buf.getvalue())
