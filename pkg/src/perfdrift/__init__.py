"""Outlier-robust changepoint detection and drift characterization for
fleet benchmark timeseries."""

from perfdrift.characterize import (
    BatchSummary,
    Changepoint,
    ConfigurationResult,
    EventAttribution,
    Segment,
    SweepResult,
    TimelineBucket,
    analyze_batch,
    analyze_series,
    annotate_events,
    build_timeline,
    characterize,
    summarize_batch,
    sweep_k,
)
from perfdrift.detect import (
    DetectionConfig,
    RawSegmentation,
    biweight_loss,
    brute_force_detect,
    detect,
    estimate_sigma,
    segment_cost,
)
from perfdrift.ingest import (
    ConfigurationKey,
    Observation,
    ObservationSeries,
    SystemEvent,
    assemble_series,
    load_events,
    parse_records,
)

__all__ = [
    "BatchSummary",
    "Changepoint",
    "ConfigurationKey",
    "ConfigurationResult",
    "DetectionConfig",
    "EventAttribution",
    "Observation",
    "ObservationSeries",
    "RawSegmentation",
    "Segment",
    "SweepResult",
    "SystemEvent",
    "TimelineBucket",
    "analyze_batch",
    "analyze_series",
    "annotate_events",
    "assemble_series",
    "biweight_loss",
    "brute_force_detect",
    "build_timeline",
    "characterize",
    "detect",
    "estimate_sigma",
    "load_events",
    "parse_records",
    "segment_cost",
    "summarize_batch",
    "sweep_k",
]

__version__ = "0.1.0"
