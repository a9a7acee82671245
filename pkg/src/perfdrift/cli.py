"""Batch command-line entry point for the detection/characterization pipeline.

Exit codes: 0 success, 1 data error, 2 usage error. Every product is JSON
produced by the shared serializer, so CLI output can be reproduced exactly
with direct library calls (and matches the HTTP service byte for byte).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from perfdrift.characterize import (
    analyze_batch,
    analyze_series,
    annotate_events,
    build_timeline,
    summarize_batch,
    sweep_k,
)
from perfdrift import serialize
from perfdrift.detect import DetectionConfig
from perfdrift.ingest import IngestError, assemble_series, load_events, parse_records


@dataclass
class CommandOutcome:
    exit_code: int
    artifacts: list[str] = field(default_factory=list)


class DataError(Exception):
    pass


def parse_beta(text: str):
    if text == "auto":
        return "auto"
    try:
        beta = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"beta must be a real number or 'auto', got {text!r}")
    if beta <= 0:
        raise argparse.ArgumentTypeError("beta must be positive")
    return beta


def parse_grid(text: str) -> list[float]:
    """Parse an inclusive A:B:STEP grid, e.g. 0.3:1.0:0.1 -> 8 values."""
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be A:B:STEP, got {text!r}")
    if step <= 0 or b < a or a <= 0:
        raise argparse.ArgumentTypeError(f"bad grid bounds {text!r}")
    count = int((b - a) / step + 1e-9) + 1
    return [round(a + i * step, 10) for i in range(count)]


def parse_selector(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"selector must be KEY=VALUE, got {text!r}")
    k, _, v = text.partition("=")
    return k.strip(), v.strip()


def matches(key, selectors) -> bool:
    params = dict(key.parameters)
    for k, v in selectors:
        if k in ("hardware_type", "metric_class", "benchmark"):
            if getattr(key, k) != v:
                return False
        elif params.get(k) != v:
            return False
    return True


def load_series(args) -> list:
    if not args.data:
        raise DataError("--data FILE is required for this command")
    path = Path(args.data)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    parsed = parse_records(path.read_bytes(), format=args.format)
    series = assemble_series(parsed.pairs)
    selectors = [parse_selector(s) for s in (args.config or [])]
    if selectors:
        series = [s for s in series if matches(s.key, selectors)]
    if not series:
        raise DataError("no matching series")
    return series


def make_config(args) -> DetectionConfig:
    return DetectionConfig(k=args.k, beta=args.beta)


def write_output(payload: bytes, out: str | None) -> list[str]:
    if out:
        Path(out).write_bytes(payload)
        return [out]
    sys.stdout.buffer.write(payload)
    sys.stdout.buffer.flush()
    return []


def _add_common(p: argparse.ArgumentParser, events: bool = False):
    p.add_argument("--data", help="benchmark records file")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--k", type=float, default=0.6, help="biweight saturation threshold")
    p.add_argument("--beta", type=parse_beta, default="auto", help="penalty per changepoint")
    p.add_argument(
        "--config",
        action="append",
        metavar="KEY=VALUE",
        help="configuration selector; may repeat",
    )
    p.add_argument("--out", help="output path (default: stdout)")
    if events:
        p.add_argument("--events", help="system-event registry file")
        p.add_argument("--window", type=int, default=7, help="attribution window in days")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perfdrift")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("detect", help="segment one configuration"))
    _add_common(sub.add_parser("batch", help="summarize a whole batch"))
    _add_common(sub.add_parser("timeline", help="per-day changepoint timeline"))
    _add_common(sub.add_parser("events", help="attribute changepoints to events"), events=True)
    p_sweep = sub.add_parser("sweep", help="sensitivity sweep over K")
    _add_common(p_sweep)
    p_sweep.add_argument("--k-grid", type=parse_grid, default="0.3:1.0:0.1",
                         help="A:B:STEP inclusive grid")
    p_sweep.add_argument("--csv-out", help="also write the sweep as csv")
    p_serve = sub.add_parser("serve", help="start the HTTP service")
    _add_common(p_serve, events=True)
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--host", default="127.0.0.1")
    return parser


def cmd_detect(args) -> CommandOutcome:
    series = load_series(args)
    if len(series) > 1:
        ids = ", ".join(s.key.config_id for s in series[:5])
        raise DataError(
            f"{len(series)} series match; narrow with --config (e.g. {ids})"
        )
    result = analyze_series(series[0], make_config(args))
    payload = serialize.dumps(serialize.segmentation_document(result))
    return CommandOutcome(0, write_output(payload, args.out))


def cmd_batch(args) -> CommandOutcome:
    series = load_series(args)
    config = make_config(args)
    results, failures = analyze_batch(series, config)
    summary = summarize_batch(results)
    doc = serialize.summary_document(summary, args.k, args.beta)
    if failures:
        doc["failures"] = [{"config_id": cid, "error": msg} for cid, msg in failures]
    payload = serialize.dumps(doc)
    return CommandOutcome(0, write_output(payload, args.out))


def cmd_timeline(args) -> CommandOutcome:
    series = load_series(args)
    results, _ = analyze_batch(series, make_config(args))
    buckets = build_timeline(results)
    payload = serialize.dumps(serialize.timeline_document(buckets, args.k))
    return CommandOutcome(0, write_output(payload, args.out))


def cmd_events(args) -> CommandOutcome:
    if not args.events:
        raise DataError("--events FILE is required")
    path = Path(args.events)
    if not path.exists():
        raise DataError(f"events file not found: {path}")
    fmt = "jsonl" if path.suffix == ".jsonl" else "csv"
    events = load_events(path.read_bytes(), format=fmt)
    series = load_series(args)
    results, _ = analyze_batch(series, make_config(args))
    attributions = annotate_events(results, events, window_days=args.window)
    payload = serialize.dumps(serialize.events_document(attributions, args.k))
    return CommandOutcome(0, write_output(payload, args.out))


def cmd_sweep(args) -> CommandOutcome:
    series = load_series(args)
    grid = args.k_grid if isinstance(args.k_grid, list) else parse_grid(args.k_grid)
    sweep = sweep_k(series, make_config(args), grid)
    payload = serialize.dumps(serialize.sweep_document(sweep))
    artifacts = write_output(payload, args.out)
    if args.csv_out:
        Path(args.csv_out).write_text(serialize.sweep_csv(sweep))
        artifacts.append(args.csv_out)
    return CommandOutcome(0, artifacts)


def cmd_serve(args) -> CommandOutcome:
    import uvicorn

    from perfdrift.api import ServiceState, create_app

    series = load_series(args)
    events = []
    if args.events:
        path = Path(args.events)
        if not path.exists():
            raise DataError(f"events file not found: {path}")
        fmt = "jsonl" if path.suffix == ".jsonl" else "csv"
        events = load_events(path.read_bytes(), format=fmt)
    app = create_app(ServiceState.build(series, events))
    uvicorn.run(app, host=args.host, port=args.port)
    return CommandOutcome(0)


COMMANDS = {
    "detect": cmd_detect,
    "batch": cmd_batch,
    "timeline": cmd_timeline,
    "events": cmd_events,
    "sweep": cmd_sweep,
    "serve": cmd_serve,
}


def run(argv: list[str]) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandOutcome(2 if exc.code not in (0, None) else 0)
    try:
        return COMMANDS[args.command](args)
    except (DataError, IngestError, ValueError) as exc:
        print(f"perfdrift: error: {exc}", file=sys.stderr)
        return CommandOutcome(1)


def main() -> None:
    sys.exit(run(sys.argv[1:]).exit_code)


if __name__ == "__main__":
    main()
