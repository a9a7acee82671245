"""Deterministic JSON documents for every analysis product.

The CLI writes these bytes to files and the HTTP service returns them as
response bodies, so one serializer keeps the two interfaces byte-identical.
Floats are fixed at 6 significant digits; keys are emitted in a fixed order.
"""

from __future__ import annotations

import json
from datetime import date, datetime, timezone

from perfdrift.characterize import (
    BatchSummary,
    ConfigurationResult,
    EventAttribution,
    Histogram,
    SweepResult,
    TimelineBucket,
)
from perfdrift.detect import DetectionConfig
from perfdrift.ingest import ConfigurationKey, ObservationSeries, SystemEvent


def _num(x):
    """Fix floats at 6 significant digits; keep exact ints exact."""
    if isinstance(x, bool) or isinstance(x, int):
        return x
    return float(f"{float(x):.6g}")


def _ts(ts: datetime) -> str:
    ts = ts.astimezone(timezone.utc)
    text = ts.isoformat().replace("+00:00", "Z")
    return text


def _day(d: date) -> str:
    return d.isoformat()


def key_document(key: ConfigurationKey) -> dict:
    return {
        "config_id": key.config_id,
        "hardware_type": key.hardware_type,
        "metric_class": key.metric_class,
        "benchmark": key.benchmark,
        "parameters": {k: v for k, v in key.parameters},
    }


def series_document(series: ObservationSeries) -> dict:
    return {
        "key": key_document(series.key),
        "unit": series.unit,
        "dropped_count": series.dropped_count,
        "observations": [
            {
                "timestamp": _ts(o.timestamp),
                "machine_id": o.machine_id,
                "value": _num(o.value),
            }
            for o in series.observations
        ],
    }


def segmentation_document(result: ConfigurationResult) -> dict:
    raw = result.raw
    return {
        "key": key_document(result.key),
        "k": _num(raw.k),
        "beta": _num(raw.beta),
        "standardized": raw.standardized,
        "sigma_hat": _num(raw.sigma_hat),
        "total_cost": _num(raw.total_cost),
        "n": raw.n,
        "warnings": list(raw.warnings),
        "segments": [
            {
                "start_index": s.start_index,
                "end_index": s.end_index,
                "start_time": _ts(s.start_time),
                "end_time": _ts(s.end_time),
                "mean": _num(s.mean),
                "duration_days": _num(s.duration_days),
                "count": s.count,
            }
            for s in result.segments
        ],
        "changepoints": [
            {
                "index": c.index,
                "timestamp": _ts(c.timestamp),
                "pre_mean": _num(c.pre_mean),
                "post_mean": _num(c.post_mean),
                "percent_change": None if c.percent_change is None else _num(c.percent_change),
            }
            for c in result.changepoints
        ],
    }


def _histogram_document(h: Histogram) -> dict:
    return {
        "edges": [_num(e) for e in h.edges],
        "counts": list(h.counts),
        "underflow": h.underflow,
        "overflow": h.overflow,
    }


def summary_document(summary: BatchSummary, k: float, beta) -> dict:
    return {
        "k": _num(k),
        "beta": beta if isinstance(beta, str) else _num(beta),
        "classes": [
            {
                "metric_class": c.metric_class,
                "configurations": c.configurations,
                "changepoints": c.changepoints,
                "ratio": _num(c.ratio),
                "change_histogram": _histogram_document(c.change_histogram),
                "duration_histogram": _histogram_document(c.duration_histogram),
                "undefined_changes": c.undefined_changes,
                "stable_configurations": list(c.stable_configurations),
            }
            for c in summary.classes
        ],
    }


def timeline_document(buckets: list[TimelineBucket], k: float) -> dict:
    return {
        "k": _num(k),
        "buckets": [
            {
                "day": _day(b.day),
                "metric_class": b.metric_class,
                "count": b.count,
                "positive": b.positive,
                "negative": b.negative,
                "undefined": b.undefined,
            }
            for b in buckets
        ],
    }


def event_document(event: SystemEvent) -> dict:
    return {
        "date": _day(event.date),
        "description": event.description,
        "hardware_scope": sorted(event.hardware_scope),
        "expected_direction": {cls: d for cls, d in event.expected_direction},
    }


def events_document(attributions: list[EventAttribution], k: float) -> dict:
    return {
        "k": _num(k),
        "events": [
            {
                "event": event_document(a.event),
                "window_days": a.window_days,
                "matched_count": len(a.matched),
                "matched": [
                    {
                        "config_id": cid,
                        "index": cp.index,
                        "timestamp": _ts(cp.timestamp),
                        "percent_change": None
                        if cp.percent_change is None
                        else _num(cp.percent_change),
                    }
                    for cid, cp in a.matched
                ],
                "per_class": [
                    {
                        "metric_class": pc.metric_class,
                        "matched": pc.matched,
                        "mean_change": None if pc.mean_change is None else _num(pc.mean_change),
                        "max_abs_change": None
                        if pc.max_abs_change is None
                        else _num(pc.max_abs_change),
                    }
                    for pc in a.per_class
                ],
            }
            for a in attributions
        ],
    }


def sweep_document(sweep: SweepResult) -> dict:
    return {
        "k_grid": [_num(k) for k in sweep.k_grid],
        "rows": [
            {
                "k": _num(r.k),
                "counts": {cls: n for cls, n in r.counts},
                "total": r.total,
                "seconds": _num(r.seconds),
            }
            for r in sweep.rows
        ],
        "failures": [{"config_id": cid, "error": msg} for cid, msg in sweep.failures],
    }


def sweep_csv(sweep: SweepResult) -> str:
    classes = [cls for cls, _ in sweep.rows[0].counts] if sweep.rows else []
    lines = [",".join(["k", *classes, "total", "seconds"])]
    for r in sweep.rows:
        counts = {cls: n for cls, n in r.counts}
        lines.append(
            ",".join(
                [f"{_num(r.k)}"]
                + [str(counts[c]) for c in classes]
                + [str(r.total), f"{_num(r.seconds)}"]
            )
        )
    return "\n".join(lines) + "\n"


def dumps(document) -> bytes:
    """Canonical bytes: compact separators, preserved key order, newline."""
    return (json.dumps(document, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")
