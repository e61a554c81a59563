"""Payout report structure plus JSON/CSV serialization.

Reports are deterministic: fixed key order, example rows in dataset order,
coalition rows sorted by id.  Exact-mode values travel as fraction strings
("3/2"), float-mode values as JSON numbers, so a report round-trips
bit-for-bit in either mode.  The wall-time field is the one thing two
otherwise identical runs are allowed to disagree on.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, List, Mapping, Optional, Sequence, Tuple

from .combinatorics import EXACT, Money, check_mode
from .errors import InputError


@dataclass
class ExampleRow:
    id: int
    value: Money
    coalition: Optional[Hashable] = None


@dataclass
class ValueReport:
    method: str
    numeric_mode: str
    query_count: int
    wall_time: float
    examples: List[ExampleRow]
    coalitions: List[Tuple[Hashable, Money]] = field(default_factory=list)
    k: Optional[int] = None
    per_query: Optional[List[Mapping[int, Money]]] = None
    extras: Optional[Mapping[str, object]] = None

    def value_of(self, example_id: int) -> Money:
        for row in self.examples:
            if row.id == example_id:
                return row.value
        raise InputError(f"no example {example_id} in this report")

    def values(self) -> dict:
        return {row.id: row.value for row in self.examples}


def _coalition_totals(rows: Sequence[ExampleRow], mode: str) -> List[Tuple[Hashable, Money]]:
    """Coalition totals as sums of member values, in row order per group so
    the float result is reproducible bit-for-bit."""
    groups: dict = {}
    for row in rows:
        if row.coalition is None:
            continue
        if row.coalition not in groups:
            groups[row.coalition] = Fraction(0) if mode == EXACT else 0.0
        groups[row.coalition] += row.value
    return [(cid, groups[cid]) for cid in sorted(groups, key=str)]


def assemble_report(
    method: str,
    mode: str,
    dataset,
    totals: Mapping[int, Money],
    query_count: int,
    wall_time: float,
    k: Optional[int] = None,
    per_query: Optional[List[Mapping[int, Money]]] = None,
    coalition_of: Optional[Mapping[int, Hashable]] = None,
    extras: Optional[Mapping[str, object]] = None,
) -> ValueReport:
    """Build a report from per-example totals, in dataset order."""
    check_mode(mode)
    rows = []
    for ex in dataset:
        if ex.id not in totals:
            raise InputError(f"no value computed for example {ex.id}")
        cid = coalition_of.get(ex.id) if coalition_of is not None else ex.coalition
        rows.append(ExampleRow(ex.id, totals[ex.id], cid))
    if len(rows) != len(totals):
        extra = set(totals) - {r.id for r in rows}
        raise InputError(f"values computed for unknown example ids {sorted(extra)[:5]}")
    return ValueReport(
        method=method,
        numeric_mode=mode,
        query_count=query_count,
        wall_time=wall_time,
        examples=rows,
        coalitions=_coalition_totals(rows, mode),
        k=k,
        per_query=per_query,
        extras=extras,
    )


def _encode_value(v: Money, mode: str):
    return str(Fraction(v)) if mode == EXACT else float(v)


def _decode_value(v, mode: str) -> Money:
    return Fraction(v) if mode == EXACT else float(v)


def report_to_json(report: ValueReport) -> str:
    mode = report.numeric_mode
    meta = {
        "method": report.method,
        "numeric_mode": mode,
        "k": report.k,
        "query_count": report.query_count,
        "wall_time_s": report.wall_time,
    }
    if report.extras:
        for key in sorted(report.extras):
            meta[key] = report.extras[key]
    doc = {
        "meta": meta,
        "examples": [
            {
                "id": row.id,
                "coalition": row.coalition,
                "value": _encode_value(row.value, mode),
            }
            for row in report.examples
        ],
        "coalitions": [
            {"id": cid, "value": _encode_value(v, mode)} for cid, v in report.coalitions
        ],
        "per_query": None
        if report.per_query is None
        else [
            {
                "query_index": qi,
                "values": [
                    {"id": row.id, "value": _encode_value(values[row.id], mode)}
                    for row in report.examples
                ],
            }
            for qi, values in enumerate(report.per_query)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_report(report: ValueReport, path) -> None:
    _verify_coalition_sums(report)
    with open(path, "w") as fh:
        fh.write(report_to_json(report))


def _verify_coalition_sums(report: ValueReport) -> None:
    expected = _coalition_totals(report.examples, report.numeric_mode)
    if expected != list(report.coalitions):
        raise InputError("report coalition totals do not equal member sums")


def read_report(path) -> ValueReport:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        meta = doc["meta"]
        mode = check_mode(meta["numeric_mode"])
        rows = [
            ExampleRow(r["id"], _decode_value(r["value"], mode), r.get("coalition"))
            for r in doc["examples"]
        ]
        coalitions = [(c["id"], _decode_value(c["value"], mode)) for c in doc["coalitions"]]
        per_query = None
        if doc.get("per_query") is not None:
            per_query = [
                {r["id"]: _decode_value(r["value"], mode) for r in q["values"]}
                for q in doc["per_query"]
            ]
        known = {"method", "numeric_mode", "k", "query_count", "wall_time_s"}
        extras = {k: v for k, v in meta.items() if k not in known} or None
        report = ValueReport(
            method=meta["method"],
            numeric_mode=mode,
            query_count=meta["query_count"],
            wall_time=meta["wall_time_s"],
            examples=rows,
            coalitions=coalitions,
            k=meta.get("k"),
            per_query=per_query,
            extras=extras,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed report file: {exc}") from exc
    ids = [r.id for r in rows]
    if len(ids) != len(set(ids)):
        raise InputError("report lists an example id more than once")
    _verify_coalition_sums(report)
    return report


def export_csv(report: ValueReport, path) -> None:
    """Examples table as CSV: id, coalition, value."""
    mode = report.numeric_mode
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "coalition", "value"])
        for row in report.examples:
            cid = "" if row.coalition is None else row.coalition
            writer.writerow([row.id, cid, _encode_value(row.value, mode)])
