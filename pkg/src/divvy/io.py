"""CSV and JSON input parsing for the command-line surface.

Datasets: frequency files carry id,bin,label[,coalition]; k-NN files carry
id,label[,coalition],f0..fd.  Queries: bin,label[,value_function] for
frequency (the optional column holds a path to a per-query value-function
JSON), label,f0..fd for k-NN.  Value functions are JSON documents; numeric
literals in them are parsed as exact decimals.
"""

from __future__ import annotations

import csv
import json
import os
import re
from dataclasses import replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .errors import InputError
from .model import (
    Dataset,
    Example,
    FrequencyValueFunction,
    MajorityValueFunction,
    OutcomeValues,
    Query,
    TableValueFunction,
)

_FEATURE_RE = re.compile(r"^f(\d+)$")


def _read_rows(path) -> tuple:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise InputError(f"{path}: empty file, expected a CSV header")
            fields = [f.strip() for f in reader.fieldnames]
            rows = [
                {k.strip(): (v if v is None else v.strip()) for k, v in row.items()}
                for row in reader
            ]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return fields, rows


def _feature_columns(fields: Sequence[str], path) -> List[str]:
    found = {}
    for f in fields:
        m = _FEATURE_RE.match(f)
        if m:
            found[int(m.group(1))] = f
    if not found:
        raise InputError(f"{path}: no feature columns (f0, f1, ...) found")
    dims = sorted(found)
    if dims != list(range(len(dims))):
        raise InputError(f"{path}: feature columns must be contiguous f0..f{len(dims) - 1}")
    return [found[d] for d in dims]


def _parse_id(raw, path, line) -> int:
    try:
        v = int(raw)
    except (TypeError, ValueError):
        raise InputError(f"{path} line {line}: id {raw!r} is not an integer") from None
    if v < 0:
        raise InputError(f"{path} line {line}: id must be non-negative, got {v}")
    return v


def _parse_feature(raw, path, line, col) -> float:
    if raw is None or raw == "":
        raise InputError(f"{path} line {line}: missing value in feature column {col}")
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{path} line {line}: {col}={raw!r} is not numeric") from None


def parse_dataset(path, family: str) -> Dataset:
    """Read an in-sample dataset CSV for the given model family
    ("frequency" or "knn")."""
    fields, rows = _read_rows(path)
    if family == "frequency":
        required = ["id", "bin", "label"]
    elif family == "knn":
        required = ["id", "label"]
    else:
        raise InputError(f"unknown model family {family!r}")
    for col in required:
        if col not in fields:
            raise InputError(f"{path}: missing required column {col!r}")
    feature_cols = _feature_columns(fields, path) if family == "knn" else []
    has_coalition = "coalition" in fields
    examples = []
    for lineno, row in enumerate(rows, start=2):
        ex_id = _parse_id(row.get("id"), path, lineno)
        label = row.get("label")
        if not label:
            raise InputError(f"{path} line {lineno}: empty label")
        coalition = row.get("coalition") if has_coalition else None
        coalition = coalition or None
        if family == "frequency":
            bin_id = row.get("bin")
            if not bin_id:
                raise InputError(f"{path} line {lineno}: empty bin")
            examples.append(Example(ex_id, label, bin=bin_id, coalition=coalition))
        else:
            feats = tuple(
                _parse_feature(row.get(c), path, lineno, c) for c in feature_cols
            )
            examples.append(Example(ex_id, label, features=feats, coalition=coalition))
    return Dataset(examples)


def parse_queries(path, family: str, vf_cache: Optional[dict] = None) -> List[Query]:
    """Read a query CSV.  Frequency queries may name a per-query value
    function file in a ``value_function`` column (resolved relative to the
    query file)."""
    fields, rows = _read_rows(path)
    queries = []
    if family == "frequency":
        for col in ("bin", "label"):
            if col not in fields:
                raise InputError(f"{path}: missing required column {col!r}")
        base = os.path.dirname(os.path.abspath(path))
        cache = vf_cache if vf_cache is not None else {}
        for lineno, row in enumerate(rows, start=2):
            if not row.get("bin") or not row.get("label"):
                raise InputError(f"{path} line {lineno}: queries need bin and label")
            vf = None
            vf_path = row.get("value_function") or None
            if vf_path:
                full = vf_path if os.path.isabs(vf_path) else os.path.join(base, vf_path)
                if full not in cache:
                    cache[full] = parse_value_function(full)
                vf = cache[full]
            queries.append(Query(label=row["label"], bin=row["bin"], value_function=vf))
    elif family == "knn":
        if "label" not in fields:
            raise InputError(f"{path}: missing required column 'label'")
        feature_cols = _feature_columns(fields, path)
        for lineno, row in enumerate(rows, start=2):
            if not row.get("label"):
                raise InputError(f"{path} line {lineno}: empty label")
            feats = tuple(
                _parse_feature(row.get(c), path, lineno, c) for c in feature_cols
            )
            queries.append(Query(label=row["label"], features=feats))
    else:
        raise InputError(f"unknown model family {family!r}")
    if not queries:
        raise InputError(f"{path}: no queries")
    return queries


def _as_number(x, where) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, Fraction)):
        raise InputError(f"{where} must be numeric, got {x!r}")
    return Fraction(x)


def parse_value_function(path) -> FrequencyValueFunction:
    """Read a value-function JSON document.

    Decimal literals are parsed exactly (no float detour), so exact-mode
    runs see precisely the numbers written in the file.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh, parse_float=Fraction)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object")
    family = doc.get("family")
    if family == "majority":
        missing = [k for k in ("correct", "wrong", "none") if k not in doc]
        if missing:
            raise InputError(f"{path}: majority family needs keys {missing}")
        return MajorityValueFunction(
            _as_number(doc["correct"], f"{path}: correct"),
            _as_number(doc["wrong"], f"{path}: wrong"),
            _as_number(doc["none"], f"{path}: none"),
        )
    if family == "table":
        raw = doc.get("entries")
        if not isinstance(raw, list) or not raw:
            raise InputError(f"{path}: table family needs a non-empty 'entries' list")
        entries = {}
        for e in raw:
            try:
                a, b = int(e["a"]), int(e["b"])
            except (KeyError, TypeError, ValueError):
                raise InputError(f"{path}: each entry needs integer 'a' and 'b'") from None
            if a < 0 or b < 0:
                raise InputError(f"{path}: entry ({a}, {b}) has negative counts")
            if (a, b) in entries:
                raise InputError(f"{path}: duplicate entry for ({a}, {b})")
            entries[(a, b)] = _as_number(e.get("value"), f"{path}: value of ({a}, {b})")
        default = doc.get("default")
        if default is not None:
            default = _as_number(default, f"{path}: default")
        return TableValueFunction(entries, default)
    raise InputError(f"{path}: unknown value-function family {family!r}")


def parse_outcome_values(text: str) -> OutcomeValues:
    """Parse the --values flag: three comma-separated numbers
    (correct, wrong, none)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise InputError(f"--values needs exactly three numbers, got {text!r}")
    try:
        vc, vw, vn = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--values {text!r} is not numeric") from None
    return OutcomeValues(vc, vw, vn)


def parse_coalition_file(path) -> Dict[int, str]:
    """Read an id,coalition CSV overriding any coalition column."""
    fields, rows = _read_rows(path)
    for col in ("id", "coalition"):
        if col not in fields:
            raise InputError(f"{path}: missing required column {col!r}")
    mapping: Dict[int, str] = {}
    for lineno, row in enumerate(rows, start=2):
        ex_id = _parse_id(row.get("id"), path, lineno)
        cid = row.get("coalition")
        if not cid:
            raise InputError(f"{path} line {lineno}: empty coalition id")
        if ex_id in mapping:
            raise InputError(f"{path} line {lineno}: duplicate id {ex_id}")
        mapping[ex_id] = cid
    return mapping


def with_coalitions(dataset: Dataset, mapping: Dict[int, str]) -> Dataset:
    """New dataset with coalition ids replaced from the mapping."""
    missing = [ex.id for ex in dataset if ex.id not in mapping]
    if missing:
        raise InputError(f"coalition file does not cover example ids {missing[:5]}")
    return Dataset(replace(ex, coalition=mapping[ex.id]) for ex in dataset)
