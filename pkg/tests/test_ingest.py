import io
import json
import subprocess
from datetime import date, datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perfdrift.ingest import (
    ConfigurationKey,
    Observation,
    ObservationSeries,
    ParseError,
    SuspectSchemaError,
    SystemEvent,
    UnitMismatchError,
    assemble_series,
    load_events,
    parse_records,
)

HEADER = "timestamp,machine_id,hardware_type,metric_class,benchmark,value,unit"


def csv_bytes(*rows):
    return ("\n".join([HEADER, *rows]) + "\n").encode()


class TestParseRecords:
    def test_empty_file_with_header(self):
        result = parse_records(csv_bytes())
        assert result.pairs == []
        assert result.skipped == 0

    def test_golden_row_with_parameter(self):
        row = "2019-11-01T10:00:00Z,node17,xl170,cpu,NPB-FT,12.31,seconds,threads=20"
        result = parse_records(csv_bytes(row))
        assert result.skipped == 0
        [(key, obs)] = result.pairs
        assert key == ConfigurationKey.make("xl170", "cpu", "NPB-FT", {"threads": "20"})
        assert obs.machine_id == "node17"
        assert obs.value == 12.31
        assert obs.unit == "seconds"
        assert obs.timestamp == datetime(2019, 11, 1, 10, tzinfo=timezone.utc)

    def test_named_extra_column_becomes_parameter(self):
        text = HEADER + ",threads\n2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,1.0,seconds,20\n"
        [(key, _)] = parse_records(text.encode()).pairs
        assert dict(key.parameters) == {"threads": "20"}

    def test_nan_value_skipped(self):
        result = parse_records(
            csv_bytes(
                "2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,NaN,seconds",
                "2019-11-01T11:00:00Z,n1,xl170,cpu,NPB-FT,1.5,seconds",
            )
        )
        assert result.skipped == 1
        assert len(result.pairs) == 1

    @pytest.mark.parametrize(
        "row",
        [
            "not-a-time,n1,xl170,cpu,NPB-FT,1.0,seconds",
            "2019-11-01T10:00:00Z,n1,xl170,gpu,NPB-FT,1.0,seconds",
            "2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,inf,seconds",
            "2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,1.0,",
        ],
    )
    def test_invalid_records_skipped(self, row):
        good = "2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,1.0,seconds"
        result = parse_records(csv_bytes(row, good, good))
        assert result.skipped == 1
        assert len(result.pairs) == 2

    def test_missing_header_columns_fatal(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_records(b"timestamp,value\n2019-11-01T10:00:00Z,1.0\n")

    def test_majority_invalid_is_suspect_schema(self):
        bad = "nope,n1,xl170,cpu,NPB-FT,1.0,seconds"
        good = "2019-11-01T10:00:00Z,n1,xl170,cpu,NPB-FT,1.0,seconds"
        with pytest.raises(SuspectSchemaError):
            parse_records(csv_bytes(bad, bad, good))

    def test_jsonl_round_trip(self):
        obj = {
            "timestamp": "2019-11-01T10:00:00Z",
            "machine_id": "n1",
            "hardware_type": "xl170",
            "metric_class": "memory",
            "benchmark": "STREAM-Triad",
            "value": 14000.5,
            "unit": "MB/s",
            "threads": 20,
        }
        result = parse_records(json.dumps(obj).encode(), format="jsonl")
        [(key, obs)] = result.pairs
        assert key.metric_class == "memory"
        assert dict(key.parameters) == {"threads": "20"}
        assert obs.value == 14000.5


class TestAssembleSeries:
    def _pair(self, hour, machine="n1", value=1.0, unit="seconds", bench="NPB-FT"):
        key = ConfigurationKey.make("xl170", "cpu", bench)
        obs = Observation(
            timestamp=datetime(2019, 1, 1, hour, tzinfo=timezone.utc),
            machine_id=machine,
            value=value,
            unit=unit,
        )
        return key, obs

    def test_out_of_order_sorted(self):
        series = assemble_series([self._pair(12), self._pair(8), self._pair(10)])
        assert len(series) == 1
        hours = [o.timestamp.hour for o in series[0].observations]
        assert hours == [8, 10, 12]

    def test_exact_duplicates_dropped(self):
        series = assemble_series([self._pair(8), self._pair(8)])
        assert len(series[0].observations) == 1
        assert series[0].dropped_count == 1

    def test_mixed_units_fatal(self):
        with pytest.raises(UnitMismatchError, match="NPB-FT"):
            assemble_series([self._pair(8, unit="seconds"), self._pair(9, unit="ms")])

    def test_key_equality_ignores_parameter_order(self):
        a = ConfigurationKey.make("xl170", "cpu", "b", [("x", "1"), ("y", "2")])
        b = ConfigurationKey.make("xl170", "cpu", "b", [("y", "2"), ("x", "1")])
        assert a == b

    @given(
        records=st.lists(
            st.tuples(
                st.integers(0, 23),
                st.sampled_from(["n1", "n2"]),
                st.sampled_from(["NPB-FT", "NPB-EP"]),
                st.floats(-1e6, 1e6, allow_nan=False),
            ),
            max_size=40,
        )
    )
    @settings(max_examples=50)
    def test_count_conservation(self, records):
        pairs = [self._pair(h, machine=m, bench=b, value=v) for h, m, b, v in records]
        series = assemble_series(pairs)
        total = sum(len(s.observations) + s.dropped_count for s in series)
        assert total == len(pairs)
        for s in series:
            times = [o.timestamp for o in s.observations]
            assert times == sorted(times)
            assert len({o.unit for o in s.observations}) == 1

    def test_reassembly_is_idempotent(self, fleet_series):
        pairs = [
            (s.key, o) for s in fleet_series for o in s.observations
        ]
        again = assemble_series(pairs)
        assert [s.key for s in again] == [s.key for s in fleet_series]
        assert [s.observations for s in again] == [s.observations for s in fleet_series]

    def test_series_count_matches_text_oracle(self, fleet_fixture):
        data_path, _ = fleet_fixture
        # independent line-level oracle over the fixture
        oracle = subprocess.run(
            "tail -n +2 %s | cut -d, -f3,4,5 | sort -u | wc -l" % data_path,
            shell=True,
            capture_output=True,
            text=True,
        )
        distinct = int(oracle.stdout.strip())
        parsed = parse_records(data_path.read_bytes())
        assert len(assemble_series(parsed.pairs)) == distinct


class TestLoadEvents:
    def test_empty_file(self):
        assert load_events(b"") == []

    def test_scoped_event_with_directions(self):
        rows = b"date,description,hardware_scope,expected_direction\n" \
               b"2019-11-01,BIOS Updates,xl170,cpu:down;memory:up\n"
        [event] = load_events(rows)
        assert event.date == date(2019, 11, 1)
        assert event.description == "BIOS Updates"
        assert event.hardware_scope == frozenset({"xl170"})
        assert dict(event.expected_direction) == {"cpu": "down", "memory": "up"}

    def test_unscoped_event_is_fleet_wide(self):
        [event] = load_events(b"2018-08-13,Upgrade from Ubuntu 16 to 18\n")
        assert event.hardware_scope == frozenset()
        assert event.applies_to("xl170") and event.applies_to("m400")

    def test_invalid_date_fatal_with_row(self):
        with pytest.raises(ParseError, match="row 2"):
            load_events(b"2019-01-01,ok\nnot-a-date,bad\n")

    def test_sorted_by_date(self):
        events = load_events(b"2019-11-01,b\n2018-08-13,a\n")
        assert [e.date.year for e in events] == [2018, 2019]
