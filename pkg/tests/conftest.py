import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

from make_synthetic_data import generate  # noqa: E402


@pytest.fixture(scope="session")
def fleet_fixture(tmp_path_factory):
    """Synthetic fleet archive: (data_csv, events_csv) paths."""
    out = tmp_path_factory.mktemp("fleet")
    return generate(out, seed=0, rows_per_config=300)


@pytest.fixture(scope="session")
def fleet_series(fleet_fixture):
    from perfdrift.ingest import assemble_series, parse_records

    data_path, _ = fleet_fixture
    parsed = parse_records(data_path.read_bytes(), format="csv")
    return assemble_series(parsed.pairs)
