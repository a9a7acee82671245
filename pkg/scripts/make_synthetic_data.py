"""Generate a synthetic fleet benchmark archive with known regime shifts.

Writes a benchmark-records CSV and a matching system-event registry whose
dates coincide with the injected steps, so detection and attribution can be
exercised end to end without the real archive.

Usage: python scripts/make_synthetic_data.py OUT_DIR [--seed N] [--rows-per-config N]
"""

from __future__ import annotations

import argparse
import csv
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

HARDWARE = ("xl170", "m400")
BENCHMARKS = {
    "cpu": [("NPB-FT", "seconds", 12.0), ("NPB-EP", "seconds", 30.0)],
    "memory": [("STREAM-Triad", "MB/s", 14000.0), ("STREAM-Copy", "MB/s", 16500.0)],
    "disk": [("fio-rand-read", "MB/s", 380.0), ("fio-seq-write", "MB/s", 940.0)],
}
START = datetime(2019, 1, 1, tzinfo=timezone.utc)
STEP_DAY = 180  # one fleet-wide regime shift mid-trace


def generate(out_dir: Path, seed: int = 0, rows_per_config: int = 300) -> tuple[Path, Path]:
    rng = np.random.default_rng(seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    data_path = out_dir / "benchmarks.csv"
    events_path = out_dir / "events.csv"

    with data_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["timestamp", "machine_id", "hardware_type", "metric_class",
             "benchmark", "value", "unit", "threads"]
        )
        for hw in HARDWARE:
            for cls, benches in BENCHMARKS.items():
                for bench, unit, base in benches:
                    noise = 0.01 * base
                    # xl170 shifts at STEP_DAY; m400 stays stable
                    shift = 0.05 * base if hw == "xl170" else 0.0
                    direction = -1.0 if cls == "cpu" else 1.0
                    for i in range(rows_per_config):
                        day = i * 360 / rows_per_config
                        ts = START + timedelta(days=day, hours=float(rng.uniform(0, 24)))
                        level = base + (direction * shift if day >= STEP_DAY else 0.0)
                        value = level + float(rng.normal(0, noise))
                        if rng.random() < 0.02:
                            value += float(rng.choice([-1, 1])) * 10 * noise  # outlier
                        writer.writerow(
                            [ts.isoformat().replace("+00:00", "Z"),
                             f"{hw}-node{int(rng.integers(1, 20)):02d}",
                             hw, cls, bench, f"{value:.4f}", unit, "20"]
                        )

    event_day = (START + timedelta(days=STEP_DAY)).date().isoformat()
    with events_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "description", "hardware_scope", "expected_direction"])
        writer.writerow([event_day, "BIOS Updates", "xl170", "cpu:down;memory:up"])
        writer.writerow(["2019-02-15", "Unrelated maintenance", "", ""])
    return data_path, events_path


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rows-per-config", type=int, default=300)
    args = parser.parse_args()
    data, events = generate(args.out_dir, args.seed, args.rows_per_config)
    print(f"wrote {data} and {events}")


if __name__ == "__main__":
    main()
