"""Read-only JSON-over-HTTP service backing the exploration dashboard.

The dataset is loaded once and never mutates; every endpoint is a GET that
re-parameterizes detection (mainly by the threshold K, to serve slider
moves) and returns the shared serializer's bytes. Results are cached per
(endpoint, configuration, K, beta); concurrent duplicate computation is
harmless because values are deterministic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from perfdrift.characterize import (
    analyze_batch,
    analyze_series,
    annotate_events,
    build_timeline,
    summarize_batch,
    sweep_k,
)
from perfdrift import serialize
from perfdrift.cli import parse_grid
from perfdrift.detect import SUPPORTED_K_RANGE, DetectionConfig
from perfdrift.ingest import ObservationSeries, SystemEvent


class BadRequest(Exception):
    pass


class NotFound(Exception):
    pass


def _json_response(document, status: int = 200) -> Response:
    return Response(
        content=serialize.dumps(document),
        status_code=status,
        media_type="application/json",
    )


@dataclass
class ServiceState:
    series: dict[str, ObservationSeries]
    events: list[SystemEvent]
    cache: dict[tuple, object] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @staticmethod
    def build(series: list[ObservationSeries], events: list[SystemEvent] | None = None):
        return ServiceState(
            series={s.key.config_id: s for s in series}, events=list(events or [])
        )

    def cached(self, key: tuple, compute):
        with self.lock:
            if key in self.cache:
                return self.cache[key]
        value = compute()  # may race; results are identical by construction
        with self.lock:
            self.cache[key] = value
        return value


def _parse_k(request: Request) -> float:
    raw = request.query_params.get("k", "0.6")
    try:
        k = float(raw)
    except ValueError:
        raise BadRequest(f"k must be a real number, got {raw!r}")
    if k <= 0:
        raise BadRequest("k must be positive")
    return k


def _quantize(k: float) -> float:
    # slider granularity: cache and compute on 2 decimals
    return round(k, 2)


def _parse_beta(request: Request):
    raw = request.query_params.get("beta", "auto")
    if raw == "auto":
        return "auto"
    try:
        beta = float(raw)
    except ValueError:
        raise BadRequest(f"beta must be a real number or 'auto', got {raw!r}")
    if beta <= 0:
        raise BadRequest("beta must be positive")
    return beta


def _config(k: float, beta) -> DetectionConfig:
    import warnings

    with warnings.catch_warnings():
        if not (SUPPORTED_K_RANGE[0] <= k <= SUPPORTED_K_RANGE[1]):
            warnings.simplefilter("ignore")
        return DetectionConfig(k=k, beta=beta)


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="perfdrift", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )

    @app.exception_handler(BadRequest)
    async def _bad_request(_req, exc):
        return _json_response({"error": "bad_request", "detail": str(exc)}, 400)

    @app.exception_handler(NotFound)
    async def _not_found(_req, exc):
        return _json_response({"error": "not_found", "detail": str(exc)}, 404)

    def batch_results(k: float, beta):
        def compute():
            cfg = _config(k, beta)
            results, failures = analyze_batch(list(state.series.values()), cfg)
            return results, failures

        return state.cached(("batch", k, beta), compute)

    @app.get("/configs")
    async def configs():
        docs = [
            serialize.key_document(state.series[cid].key) for cid in sorted(state.series)
        ]
        return _json_response(docs)

    @app.get("/series")
    async def series(request: Request):
        cid = request.query_params.get("config")
        if not cid:
            raise BadRequest("missing required query parameter: config")
        if cid not in state.series:
            raise NotFound(f"unknown configuration {cid!r}")
        doc = state.cached(("series", cid), lambda: serialize.series_document(state.series[cid]))
        return _json_response(doc)

    @app.get("/segmentation")
    async def segmentation(request: Request):
        cid = request.query_params.get("config")
        if not cid:
            raise BadRequest("missing required query parameter: config")
        k = _quantize(_parse_k(request))
        beta = _parse_beta(request)
        if cid not in state.series:
            raise NotFound(f"unknown configuration {cid!r}")

        def compute():
            result = analyze_series(state.series[cid], _config(k, beta))
            return serialize.segmentation_document(result)

        return _json_response(state.cached(("segmentation", cid, k, beta), compute))

    @app.get("/summary")
    async def summary(request: Request):
        k = _quantize(_parse_k(request))
        beta = _parse_beta(request)

        def compute():
            results, _ = batch_results(k, beta)
            return serialize.summary_document(summarize_batch(results), k, beta)

        return _json_response(state.cached(("summary", k, beta), compute))

    @app.get("/timeline")
    async def timeline(request: Request):
        k = _quantize(_parse_k(request))
        beta = _parse_beta(request)
        cls = request.query_params.get("class")
        if cls is not None and cls not in ("cpu", "memory", "disk"):
            raise BadRequest(f"class must be cpu|memory|disk, got {cls!r}")

        def compute():
            results, _ = batch_results(k, beta)
            if cls is not None:
                results = [r for r in results if r.key.metric_class == cls]
            return serialize.timeline_document(build_timeline(results), k)

        return _json_response(state.cached(("timeline", cls, k, beta), compute))

    @app.get("/events")
    async def events(request: Request):
        k = _quantize(_parse_k(request))
        beta = _parse_beta(request)
        raw_window = request.query_params.get("window", "7")
        try:
            window = int(raw_window)
        except ValueError:
            raise BadRequest(f"window must be an integer, got {raw_window!r}")
        if window < 0:
            raise BadRequest("window must be non-negative")

        def compute():
            results, _ = batch_results(k, beta)
            attributions = annotate_events(results, state.events, window_days=window)
            return serialize.events_document(attributions, k)

        return _json_response(state.cached(("events", k, beta, window), compute))

    @app.get("/sweep")
    async def sweep(request: Request):
        grid_text = request.query_params.get("grid", "0.3:1.0:0.1")
        try:
            grid = parse_grid(grid_text)
        except Exception:
            raise BadRequest(f"grid must be A:B:STEP, got {grid_text!r}")
        beta = _parse_beta(request)

        def compute():
            cfg = _config(0.6, beta)
            result = sweep_k(list(state.series.values()), cfg, grid)
            return serialize.sweep_document(result)

        return _json_response(state.cached(("sweep", grid_text, beta), compute))

    return app
