"""Parsing and assembly of fleet benchmark records and system-event registries."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import Iterable, Mapping

METRIC_CLASSES = ("cpu", "memory", "disk")
DIRECTIONS = ("up", "down", "mixed")

REQUIRED_FIELDS = (
    "timestamp",
    "machine_id",
    "hardware_type",
    "metric_class",
    "benchmark",
    "value",
    "unit",
)


class IngestError(Exception):
    """Fatal ingest failure (malformed structure, suspect schema, bad units)."""


class ParseError(IngestError):
    pass


class SuspectSchemaError(IngestError):
    pass


class UnitMismatchError(IngestError):
    pass


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC-3339 timestamp; naive inputs are taken as UTC."""
    ts = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


@dataclass(frozen=True, order=True)
class Observation:
    timestamp: datetime
    machine_id: str
    value: float
    unit: str


@dataclass(frozen=True)
class ConfigurationKey:
    """Identity of one measured configuration: hardware, metric class,
    benchmark, and benchmark parameters (order-insensitive)."""

    hardware_type: str
    metric_class: str
    benchmark: str
    parameters: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def make(
        hardware_type: str,
        metric_class: str,
        benchmark: str,
        parameters: Mapping[str, str] | Iterable[tuple[str, str]] = (),
    ) -> "ConfigurationKey":
        items = parameters.items() if isinstance(parameters, Mapping) else parameters
        return ConfigurationKey(
            hardware_type=hardware_type,
            metric_class=metric_class,
            benchmark=benchmark,
            parameters=tuple(sorted((str(k), str(v)) for k, v in items)),
        )

    @property
    def config_id(self) -> str:
        parts = [self.hardware_type, self.metric_class, self.benchmark]
        parts += [f"{k}={v}" for k, v in self.parameters]
        return "/".join(parts)


@dataclass(frozen=True)
class ObservationSeries:
    key: ConfigurationKey
    observations: tuple[Observation, ...]
    dropped_count: int = 0

    def __post_init__(self):
        if not self.observations:
            raise ValueError("series must contain at least one observation")
        units = {o.unit for o in self.observations}
        if len(units) > 1:
            raise UnitMismatchError(
                f"mixed units {sorted(units)} in series {self.key.config_id}"
            )
        for a, b in zip(self.observations, self.observations[1:]):
            if b.timestamp < a.timestamp:
                raise ValueError("observations must be time-ordered")

    @property
    def unit(self) -> str:
        return self.observations[0].unit

    def values(self) -> list[float]:
        return [o.value for o in self.observations]

    def timestamps(self) -> list[datetime]:
        return [o.timestamp for o in self.observations]


@dataclass(frozen=True)
class SystemEvent:
    """A recorded infrastructure change (BIOS, OS, kernel, firmware...)."""

    date: date
    description: str
    hardware_scope: frozenset[str] = frozenset()  # empty = fleet-wide
    expected_direction: tuple[tuple[str, str], ...] = ()  # (metric_class, up|down|mixed)

    def applies_to(self, hardware_type: str) -> bool:
        return not self.hardware_scope or hardware_type in self.hardware_scope


@dataclass
class ParseResult:
    pairs: list[tuple[ConfigurationKey, Observation]] = field(default_factory=list)
    skipped: int = 0

    @property
    def total(self) -> int:
        return len(self.pairs) + self.skipped


def _decode(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _record_to_pair(rec: Mapping[str, str], params: Mapping[str, str]):
    """Validate one flat record; return a pair or None if the record is bad."""
    try:
        value = float(rec["value"])
    except (ValueError, TypeError):
        return None
    if not math.isfinite(value):
        return None
    if rec["metric_class"] not in METRIC_CLASSES:
        return None
    if not rec["unit"] or not rec["machine_id"]:
        return None
    try:
        ts = parse_timestamp(rec["timestamp"])
    except (ValueError, TypeError):
        return None
    key = ConfigurationKey.make(
        rec["hardware_type"], rec["metric_class"], rec["benchmark"], params
    )
    obs = Observation(
        timestamp=ts, machine_id=rec["machine_id"], value=value, unit=rec["unit"]
    )
    return key, obs


def _parse_csv(text: str) -> ParseResult:
    reader = csv.DictReader(io.StringIO(text), restkey="__extra__")
    if reader.fieldnames is None:
        raise ParseError("empty input: missing csv header (byte offset 0)")
    missing = [f for f in REQUIRED_FIELDS if f not in reader.fieldnames]
    if missing:
        raise ParseError(f"csv header (line 1) missing required columns: {missing}")
    extra_cols = [f for f in reader.fieldnames if f not in REQUIRED_FIELDS]

    result = ParseResult()
    for lineno, row in enumerate(reader, start=2):
        if any(row.get(f) is None for f in REQUIRED_FIELDS):
            raise ParseError(f"line {lineno}: row has fewer fields than the header")
        params: dict[str, str] = {}
        ok = True
        for col in extra_cols:
            cell = (row.get(col) or "").strip()
            if cell:
                params[col] = cell
        # ragged trailing cells are accepted as key=value parameter tokens
        for token in row.get("__extra__", []):
            token = token.strip()
            if not token:
                continue
            if "=" not in token:
                ok = False
                break
            k, _, v = token.partition("=")
            params[k.strip()] = v.strip()
        pair = _record_to_pair(row, params) if ok else None
        if pair is None:
            result.skipped += 1
        else:
            result.pairs.append(pair)
    return result


def _parse_jsonl(text: str) -> ParseResult:
    result = ParseResult()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {lineno}: invalid json ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"line {lineno}: expected a json object")
        if any(f not in obj for f in REQUIRED_FIELDS):
            missing = [f for f in REQUIRED_FIELDS if f not in obj]
            raise ParseError(f"line {lineno}: missing required keys: {missing}")
        params = {
            str(k): str(v)
            for k, v in obj.items()
            if k not in REQUIRED_FIELDS and k != "parameters"
        }
        extra = obj.get("parameters", {})
        if isinstance(extra, dict):
            params.update({str(k): str(v) for k, v in extra.items()})
        rec = {f: str(obj[f]) if obj[f] is not None else None for f in REQUIRED_FIELDS}
        rec["value"] = obj["value"]  # keep numeric type for finiteness check
        pair = _record_to_pair(rec, params)
        if pair is None:
            result.skipped += 1
        else:
            result.pairs.append(pair)
    return result


def parse_records(source, format: str = "csv") -> ParseResult:
    """Parse benchmark records into (ConfigurationKey, Observation) pairs.

    Invalid records (non-finite value, bad timestamp, unknown metric class)
    are skipped and counted; structural problems are fatal. If more than half
    of the records are invalid the schema itself is suspect and we refuse.
    """
    text = _decode(source)
    if format == "csv":
        result = _parse_csv(text)
    elif format == "jsonl":
        result = _parse_jsonl(text)
    else:
        raise ValueError(f"unknown format {format!r} (expected csv or jsonl)")
    if result.total > 0 and result.skipped * 2 > result.total:
        raise SuspectSchemaError(
            f"suspect schema: {result.skipped} of {result.total} records invalid"
        )
    return result


def assemble_series(
    pairs: Iterable[tuple[ConfigurationKey, Observation]]
) -> list[ObservationSeries]:
    """Group pairs into per-configuration series, sorted and deduplicated.

    Sorting is by timestamp then machine_id, stable in input order for full
    ties. Exact duplicate records collapse into dropped_count.
    """
    groups: dict[ConfigurationKey, list[tuple]] = {}
    for order, (key, obs) in enumerate(pairs):
        groups.setdefault(key, []).append((obs.timestamp, obs.machine_id, order, obs))
    out = []
    for key in sorted(groups, key=lambda k: k.config_id):
        rows = sorted(groups[key], key=lambda r: (r[0], r[1], r[2]))
        units = {r[3].unit for r in rows}
        if len(units) > 1:
            raise UnitMismatchError(
                f"mixed units {sorted(units)} in series {key.config_id}"
            )
        kept: list[Observation] = []
        seen: set[tuple] = set()
        dropped = 0
        for _, _, _, obs in rows:
            ident = (obs.timestamp, obs.machine_id, obs.value)
            if ident in seen:
                dropped += 1
            else:
                seen.add(ident)
                kept.append(obs)
        out.append(ObservationSeries(key=key, observations=tuple(kept), dropped_count=dropped))
    return out


def _parse_direction(text: str) -> tuple[tuple[str, str], ...]:
    pairs = []
    for token in text.split(";"):
        token = token.strip()
        if not token:
            continue
        cls, _, direction = token.partition(":")
        cls, direction = cls.strip(), direction.strip()
        if cls not in METRIC_CLASSES or direction not in DIRECTIONS:
            raise ValueError(f"bad direction token {token!r}")
        pairs.append((cls, direction))
    return tuple(sorted(pairs))


def _event_from_record(rec: Mapping[str, str], rowno: int) -> SystemEvent:
    try:
        day = date.fromisoformat(str(rec["date"]).strip())
    except (ValueError, KeyError) as exc:
        raise ParseError(f"row {rowno}: invalid or missing event date") from exc
    description = str(rec.get("description") or "").strip()
    if not description:
        raise ParseError(f"row {rowno}: event description is empty")
    scope_text = str(rec.get("hardware_scope") or "").strip()
    scope = frozenset(s.strip() for s in scope_text.split(";") if s.strip())
    direction_text = str(rec.get("expected_direction") or "").strip()
    try:
        direction = _parse_direction(direction_text)
    except ValueError as exc:
        raise ParseError(f"row {rowno}: {exc}") from exc
    return SystemEvent(
        date=day,
        description=description,
        hardware_scope=scope,
        expected_direction=direction,
    )


def load_events(source, format: str = "csv") -> list[SystemEvent]:
    """Load the system-event registry (date, description, optional scope and
    expected direction), sorted by date."""
    text = _decode(source)
    events: list[SystemEvent] = []
    if format == "csv":
        reader = csv.reader(io.StringIO(text))
        rows = [r for r in reader if r and any(c.strip() for c in r)]
        if not rows:
            return []
        header = [h.strip() for h in rows[0]]
        if "date" not in header or "description" not in header:
            # headerless layout: positional date, description, scope, direction
            header = ["date", "description", "hardware_scope", "expected_direction"]
            data_rows = rows
        else:
            data_rows = rows[1:]
        for rowno, row in enumerate(data_rows, start=1):
            rec = dict(zip(header, row))
            events.append(_event_from_record(rec, rowno))
    elif format == "jsonl":
        for rowno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"row {rowno}: invalid json") from exc
            if isinstance(obj.get("hardware_scope"), list):
                obj = {**obj, "hardware_scope": ";".join(obj["hardware_scope"])}
            events.append(_event_from_record(obj, rowno))
    else:
        raise ValueError(f"unknown format {format!r} (expected csv or jsonl)")
    events.sort(key=lambda e: (e.date, e.description))
    return events
