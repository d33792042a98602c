"""Ranked anomaly reports and the analytics computed over them."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .detectors import Anomaly

INF_MARKER = "inf"
CSV_COLUMNS = (
    "detector",
    "fields",
    "entry_index",
    "occurrence_index",
    "values",
    "score",
    "threshold",
    "explanation",
)
META_KEYS = ("input", "config_digest", "version", "timestamp")

# Cutoffs used for the length-ratio vs transliteration comparison.
DEFAULT_OVERLAP_CUTOFFS = (10, 25, 50, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 1500, 2000)


def _sort_key(a: Anomaly):
    return (-a.score, a.detector_id, a.entry_index, a.occurrence_index, a.field_names, a.observed_values)


@dataclass
class Report:
    meta: dict[str, str | None]
    anomalies: list[Anomaly]
    counts: dict[str, int] = field(default_factory=dict)


def assemble_report(
    anomaly_lists: Iterable[Sequence[Anomaly]],
    metadata: Mapping[str, str | None] | None = None,
    detectors: Iterable[str] = (),
) -> Report:
    """Merge detector outputs into one deterministically ordered report.

    ``detectors`` lists ids that should appear in ``counts`` even when they
    found nothing.
    """
    merged = [a for lst in anomaly_lists for a in lst]
    merged.sort(key=_sort_key)
    counts = {d: 0 for d in detectors}
    for a in merged:
        counts[a.detector_id] = counts.get(a.detector_id, 0) + 1
    meta = {k: None for k in META_KEYS}
    meta.update(metadata or {})
    return Report(meta=meta, anomalies=merged, counts=dict(sorted(counts.items())))


def _fmt(x: float) -> str:
    if math.isinf(x):
        return json.dumps(INF_MARKER if x > 0 else "-" + INF_MARKER)
    return f"{x:.6f}"


def _csv_num(x: float) -> str:
    if math.isinf(x):
        return INF_MARKER if x > 0 else "-" + INF_MARKER
    return f"{x:.6f}"


def _parse_num(v) -> float:
    if isinstance(v, str):
        if v == INF_MARKER:
            return math.inf
        if v == "-" + INF_MARKER:
            return -math.inf
    return float(v)


def _dump(v) -> str:
    return json.dumps(v, ensure_ascii=False)


def _anomaly_json(a: Anomaly) -> str:
    parts = [
        f'"detector": {_dump(a.detector_id)}',
        f'"fields": {_dump(list(a.field_names))}',
        f'"entry_index": {a.entry_index}',
        f'"occurrence_index": {a.occurrence_index}',
        f'"values": {_dump(list(a.observed_values))}',
        f'"score": {_fmt(a.score)}',
        f'"threshold": {_fmt(a.threshold)}',
        f'"explanation": {_dump(a.explanation)}',
    ]
    return "    {" + ", ".join(parts) + "}"


def serialize_report(report: Report, fmt: str = "json") -> bytes:
    """Byte-stable JSON or CSV; floats are written with six decimals."""
    if fmt == "json":
        meta = ", ".join(f"{_dump(k)}: {_dump(report.meta.get(k))}" for k in META_KEYS)
        counts = ", ".join(f"{_dump(k)}: {v}" for k, v in report.counts.items())
        lines = ["{", f'  "meta": {{{meta}}},', f'  "counts": {{{counts}}},']
        if report.anomalies:
            lines.append('  "anomalies": [')
            lines.append(",\n".join(_anomaly_json(a) for a in report.anomalies))
            lines.append("  ]")
        else:
            lines.append('  "anomalies": []')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for a in report.anomalies:
            w.writerow(
                [
                    a.detector_id,
                    _dump(list(a.field_names)),
                    a.entry_index,
                    a.occurrence_index,
                    _dump(list(a.observed_values)),
                    _csv_num(a.score),
                    _csv_num(a.threshold),
                    a.explanation,
                ]
            )
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unsupported report format {fmt!r} (expected json or csv)")


def _anomaly_from(d: Mapping) -> Anomaly:
    return Anomaly(
        detector_id=d["detector"],
        field_names=tuple(d["fields"]),
        entry_index=int(d["entry_index"]),
        occurrence_index=int(d["occurrence_index"]),
        observed_values=tuple(d["values"]),
        score=_parse_num(d["score"]),
        threshold=_parse_num(d["threshold"]),
        explanation=d["explanation"],
    )


def parse_report(data: bytes | str, fmt: str = "json") -> Report:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "json":
        obj = json.loads(text)
        return Report(
            meta={k: obj["meta"].get(k) for k in META_KEYS},
            anomalies=[_anomaly_from(d) for d in obj["anomalies"]],
            counts={k: int(v) for k, v in obj["counts"].items()},
        )
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        for r in rows:
            r["fields"] = json.loads(r["fields"])
            r["values"] = json.loads(r["values"])
        anomalies = [_anomaly_from(r) for r in rows]
        return assemble_report([anomalies])
    raise ValueError(f"unsupported report format {fmt!r} (expected json or csv)")


@dataclass(frozen=True)
class OverlapRow:
    cutoff: int
    effective_cutoff: int
    common: int
    percent: int

    @property
    def clamped(self) -> bool:
        return self.effective_cutoff != self.cutoff


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def overlap_table(
    ranked_a: Sequence[str], ranked_b: Sequence[str], cutoffs: Iterable[int] = DEFAULT_OVERLAP_CUTOFFS
) -> list[OverlapRow]:
    """Size of the intersection of the two top-k lists for each k.

    A k longer than either list is clamped to the shorter length and the
    row records the clamp.
    """
    if len(set(ranked_a)) != len(ranked_a) or len(set(ranked_b)) != len(ranked_b):
        raise ValueError("ranked ids must be unique within each list")
    limit = min(len(ranked_a), len(ranked_b))
    rows = []
    for k in cutoffs:
        if k < 1:
            raise ValueError("overlap cutoffs must be >= 1")
        eff = min(k, limit)
        common = len(set(ranked_a[:eff]).intersection(ranked_b[:eff]))
        pct = _round_half_up(100.0 * common / eff) if eff else 0
        rows.append(OverlapRow(k, eff, common, pct))
    return rows


def ranked_pair_ids(report: Report, detector_id: str) -> list[str]:
    """``entry:occurrence`` ids of one detector's anomalies in report order."""
    ids: list[str] = []
    seen = set()
    for a in report.anomalies:
        if a.detector_id != detector_id:
            continue
        pid = f"{a.entry_index}:{a.occurrence_index}"
        if pid not in seen:
            seen.add(pid)
            ids.append(pid)
    return ids


@dataclass(frozen=True)
class CurvePoint:
    score_cutoff: float
    mean_label: float | None
    support: int


Locator = tuple[str, int, int]


def precision_curve(
    report: Report,
    labels: Mapping[Locator, float],
    cutoffs: Iterable[float],
    detector_id: str | None = None,
) -> list[CurvePoint]:
    """Mean label of the labeled anomalies scoring at or above each cutoff.

    Unlabeled anomalies are left out rather than counted as 0.  A cutoff
    with no labeled anomaly above it has ``mean_label=None``.
    """
    anomalies = [a for a in report.anomalies if detector_id is None or a.detector_id == detector_id]
    if detector_id is not None:
        labels = {k: v for k, v in labels.items() if k[0] == detector_id}
    present = {a.locator for a in anomalies}
    missing = [loc for loc in labels if loc not in present]
    if missing:
        raise ValueError(f"{len(missing)} labeled locator(s) not in the report, e.g. {missing[0]}")
    for loc, v in labels.items():
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"label for {loc} is {v}, outside [0, 1]")
    labeled = [(a.score, labels[a.locator]) for a in anomalies if a.locator in labels]
    points = []
    for c in cutoffs:
        vals = [v for s, v in labeled if s >= c]
        mean = math.fsum(vals) / len(vals) if vals else None
        points.append(CurvePoint(float(c), mean, len(vals)))
    return points


def read_labels(data: bytes | str) -> dict[Locator, float]:
    """Parse a labels CSV with columns detector, entry_index, occurrence_index, label."""
    text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    need = {"detector", "entry_index", "occurrence_index", "label"}
    if reader.fieldnames is None or not need.issubset(reader.fieldnames):
        raise ValueError(f"labels file needs columns {sorted(need)}")
    out: dict[Locator, float] = {}
    for row in reader:
        loc = (row["detector"], int(row["entry_index"]), int(row["occurrence_index"]))
        out[loc] = float(row["label"])
    return out
