"""Analysis products on top of raw segmentations: segment statistics,
changepoint magnitudes, batch summaries, timelines, event attribution,
stability reporting, and sensitivity sweeps."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np

from perfdrift.detect import DetectionConfig, RawSegmentation, detect
from perfdrift.ingest import METRIC_CLASSES, ConfigurationKey, ObservationSeries, SystemEvent

DAY = timedelta(days=1)

# default +-percent display ranges for relative-change histograms
CHANGE_RANGE_PCT = {"cpu": 7.5, "memory": 20.0, "disk": 30.0}
CHANGE_BIN_WIDTH_PCT = {"cpu": 0.5, "memory": 1.0, "disk": 2.0}
DURATION_BIN_DAYS = 30.0
DURATION_MAX_DAYS = 990.0


@dataclass(frozen=True)
class Segment:
    """One steady-state interval: index extent, time extent, raw-scale mean,
    and duration in fractional days."""

    start_index: int
    end_index: int
    start_time: object
    end_time: object
    mean: float
    duration_days: float
    count: int


@dataclass(frozen=True)
class Changepoint:
    index: int
    timestamp: object
    pre_mean: float
    post_mean: float
    percent_change: float | None  # None when pre_mean == 0


@dataclass(frozen=True)
class ConfigurationResult:
    """Detection plus characterization for one configuration."""

    key: ConfigurationKey
    raw: RawSegmentation
    segments: tuple[Segment, ...]
    changepoints: tuple[Changepoint, ...]


@dataclass(frozen=True)
class Histogram:
    """Fixed-width histogram with explicit under/overflow bins."""

    edges: tuple[float, ...]
    counts: tuple[int, ...]
    underflow: int
    overflow: int

    @property
    def total(self) -> int:
        return sum(self.counts) + self.underflow + self.overflow


@dataclass(frozen=True)
class ClassSummary:
    metric_class: str
    configurations: int
    changepoints: int
    ratio: float
    change_histogram: Histogram
    duration_histogram: Histogram
    undefined_changes: int
    stable_configurations: tuple[str, ...]


@dataclass(frozen=True)
class BatchSummary:
    classes: tuple[ClassSummary, ...]

    def for_class(self, metric_class: str) -> ClassSummary | None:
        for c in self.classes:
            if c.metric_class == metric_class:
                return c
        return None


@dataclass(frozen=True)
class TimelineBucket:
    day: date
    metric_class: str
    count: int
    positive: int
    negative: int
    undefined: int


@dataclass(frozen=True)
class ClassAttribution:
    metric_class: str
    matched: int
    mean_change: float | None
    max_abs_change: float | None


@dataclass(frozen=True)
class EventAttribution:
    event: SystemEvent
    window_days: int
    matched: tuple[tuple[str, Changepoint], ...]  # (config_id, changepoint)
    per_class: tuple[ClassAttribution, ...]


@dataclass(frozen=True)
class SweepRow:
    k: float
    counts: tuple[tuple[str, int], ...]  # per metric class
    total: int
    seconds: float


@dataclass(frozen=True)
class SweepResult:
    k_grid: tuple[float, ...]
    rows: tuple[SweepRow, ...]
    failures: tuple[tuple[str, str], ...] = ()  # (config_id, error)


def characterize(
    raw: RawSegmentation, series: ObservationSeries
) -> tuple[tuple[Segment, ...], tuple[Changepoint, ...]]:
    """Describe a segmentation on the raw scale: per-segment mean/duration
    and per-boundary relative change (percent, undefined for zero pre-mean)."""
    values = series.values()
    times = series.timestamps()
    if raw.n != len(values):
        raise ValueError("segmentation does not match series length")
    segments = []
    for s, t in raw.segment_bounds():
        seg_vals = values[s:t]
        segments.append(
            Segment(
                start_index=s,
                end_index=t,
                start_time=times[s],
                end_time=times[t - 1],
                mean=float(np.mean(seg_vals)),
                duration_days=(times[t - 1] - times[s]) / DAY,
                count=t - s,
            )
        )
    changepoints = []
    for prev, nxt in zip(segments, segments[1:]):
        pre, post = prev.mean, nxt.mean
        change = None if pre == 0 else (post - pre) / pre * 100.0
        changepoints.append(
            Changepoint(
                index=nxt.start_index,
                timestamp=nxt.start_time,
                pre_mean=pre,
                post_mean=post,
                percent_change=change,
            )
        )
    return tuple(segments), tuple(changepoints)


def analyze_series(series: ObservationSeries, config: DetectionConfig) -> ConfigurationResult:
    raw = detect(series.values(), series.timestamps(), config)
    segments, changepoints = characterize(raw, series)
    return ConfigurationResult(series.key, raw, segments, changepoints)


def worker_count() -> int:
    """Worker cap from PERFDRIFT_THREADS (0 or unset = auto)."""
    raw = os.environ.get("PERFDRIFT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(32, os.cpu_count() or 1)
    return n


def analyze_batch(
    batch: Sequence[ObservationSeries], config: DetectionConfig
) -> tuple[list[ConfigurationResult], list[tuple[str, str]]]:
    """Run detection+characterization over a batch; per-series failures are
    collected, never raised. Output order is sorted by configuration id."""
    results: dict[str, ConfigurationResult] = {}
    failures: dict[str, str] = {}

    def run(series: ObservationSeries):
        try:
            results[series.key.config_id] = analyze_series(series, config)
        except Exception as exc:  # noqa: BLE001 - per-series isolation
            failures[series.key.config_id] = str(exc)

    workers = worker_count()
    if workers > 1 and len(batch) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, batch))
    else:
        for series in batch:
            run(series)
    ordered = [results[cid] for cid in sorted(results)]
    return ordered, sorted(failures.items())


def build_histogram(values: Iterable[float], lo: float, hi: float, width: float) -> Histogram:
    nbins = max(1, int(round((hi - lo) / width)))
    edges = [lo + i * width for i in range(nbins + 1)]
    counts = [0] * nbins
    under = over = 0
    for v in values:
        if v < lo:
            under += 1
        elif v >= hi:
            over += 1
        else:
            idx = min(nbins - 1, int((v - lo) / width))
            counts[idx] += 1
    return Histogram(tuple(edges), tuple(counts), under, over)


def summarize_batch(
    results: Sequence[ConfigurationResult],
    change_bin_width: dict[str, float] | None = None,
    duration_bin_days: float = DURATION_BIN_DAYS,
) -> BatchSummary:
    """Per-metric-class counts, changepoints-per-configuration ratios, and
    magnitude/duration histograms, plus the stable-configuration report."""
    widths = dict(CHANGE_BIN_WIDTH_PCT)
    if change_bin_width:
        widths.update(change_bin_width)
    classes = []
    for cls in METRIC_CLASSES:
        group = [r for r in results if r.key.metric_class == cls]
        if not group:
            continue
        n_configs = len(group)
        changes = []
        undefined = 0
        durations = []
        total_cps = 0
        stable = []
        for r in group:
            total_cps += len(r.changepoints)
            if not r.changepoints:
                stable.append(r.key.config_id)
            for cp in r.changepoints:
                if cp.percent_change is None:
                    undefined += 1
                else:
                    changes.append(cp.percent_change)
            durations.extend(seg.duration_days for seg in r.segments)
        span = CHANGE_RANGE_PCT[cls]
        classes.append(
            ClassSummary(
                metric_class=cls,
                configurations=n_configs,
                changepoints=total_cps,
                ratio=total_cps / n_configs,
                change_histogram=build_histogram(changes, -span, span, widths[cls]),
                duration_histogram=build_histogram(
                    durations, 0.0, DURATION_MAX_DAYS, duration_bin_days
                ),
                undefined_changes=undefined,
                stable_configurations=tuple(sorted(stable)),
            )
        )
    return BatchSummary(tuple(classes))


def build_timeline(results: Sequence[ConfigurationResult]) -> list[TimelineBucket]:
    """Per-UTC-day changepoint counts per metric class, with the split into
    positive / negative / undefined relative changes."""
    acc: dict[tuple[date, str], list[int]] = {}
    for r in results:
        for cp in r.changepoints:
            day = cp.timestamp.date()
            cell = acc.setdefault((day, r.key.metric_class), [0, 0, 0])
            if cp.percent_change is None:
                cell[2] += 1
            elif cp.percent_change < 0:
                cell[1] += 1
            else:
                cell[0] += 1
    buckets = []
    for (day, cls), (pos, neg, und) in sorted(acc.items()):
        buckets.append(
            TimelineBucket(
                day=day,
                metric_class=cls,
                count=pos + neg + und,
                positive=pos,
                negative=neg,
                undefined=und,
            )
        )
    return buckets


def annotate_events(
    results: Sequence[ConfigurationResult],
    events: Sequence[SystemEvent],
    window_days: int = 7,
) -> list[EventAttribution]:
    """Match changepoints to recorded system changes within a +-day window,
    honoring each event's hardware scope. Events with no matches are still
    reported (an absence is a finding too)."""
    if window_days < 0:
        raise ValueError("window_days must be non-negative")
    out = []
    for event in events:
        matched: list[tuple[str, Changepoint]] = []
        per_class_changes: dict[str, list[float]] = {}
        per_class_counts: dict[str, int] = {}
        for r in results:
            if not event.applies_to(r.key.hardware_type):
                continue
            for cp in r.changepoints:
                delta = abs((cp.timestamp.date() - event.date).days)
                if delta <= window_days:
                    matched.append((r.key.config_id, cp))
                    cls = r.key.metric_class
                    per_class_counts[cls] = per_class_counts.get(cls, 0) + 1
                    if cp.percent_change is not None:
                        per_class_changes.setdefault(cls, []).append(cp.percent_change)
        per_class = []
        for cls in METRIC_CLASSES:
            if cls not in per_class_counts:
                continue
            defined = per_class_changes.get(cls, [])
            per_class.append(
                ClassAttribution(
                    metric_class=cls,
                    matched=per_class_counts[cls],
                    mean_change=float(np.mean(defined)) if defined else None,
                    max_abs_change=float(max(abs(c) for c in defined)) if defined else None,
                )
            )
        matched.sort(key=lambda m: (m[1].timestamp, m[0]))
        out.append(
            EventAttribution(
                event=event,
                window_days=window_days,
                matched=tuple(matched),
                per_class=tuple(per_class),
            )
        )
    return out


def sweep_k(
    batch: Sequence[ObservationSeries],
    config: DetectionConfig,
    k_grid: Sequence[float],
) -> SweepResult:
    """Re-run detection across a K grid, recording changepoint counts per
    metric class and wall-clock time per grid point."""
    grid = [float(k) for k in k_grid]
    if not grid:
        raise ValueError("K grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("K grid must be strictly ascending")
    if grid[0] <= 0:
        raise ValueError("K values must be positive")
    rows = []
    all_failures: dict[str, str] = {}
    for k in grid:
        cfg = DetectionConfig(
            k=k, beta=config.beta, standardize=config.standardize, min_length=config.min_length
        )
        t0 = time.perf_counter()
        results, failures = analyze_batch(batch, cfg)
        seconds = time.perf_counter() - t0
        counts = {cls: 0 for cls in METRIC_CLASSES}
        for r in results:
            counts[r.key.metric_class] += len(r.changepoints)
        for cid, msg in failures:
            all_failures[cid] = msg
        rows.append(
            SweepRow(
                k=k,
                counts=tuple((cls, counts[cls]) for cls in METRIC_CLASSES),
                total=sum(counts.values()),
                seconds=seconds,
            )
        )
    return SweepResult(tuple(grid), tuple(rows), tuple(sorted(all_failures.items())))
