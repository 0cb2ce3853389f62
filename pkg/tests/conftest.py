"""Shared fixtures: small DALY files, group configs and synthetic tables."""

from pathlib import Path
from typing import Callable, Dict, List, Sequence

import numpy as np
import pytest
import yaml

from data_ingest import TimeIndexMap
from pipeline import run_pipeline
from sr_engine import SrConfig
from synthetic_data import make_synthetic_table

SMALL_GROUPS: Dict[str, str] = {
    "hiv": "communicable",
    "diarrhea": "communicable",
    "malaria": "communicable",
    "cancers": "noncommunicable",
    "diabetes": "noncommunicable",
    "transport": "injury",
    "conflict": "injury",
}


def _write_csv(path: Path, header: Sequence[str], rows: List[Sequence[object]]) -> Path:
    lines = [",".join(header)] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def write_csv(tmp_path: Path) -> Callable[..., Path]:
    """Write a CSV from a header and rows; returns the path."""

    def _write(header: Sequence[str], rows: List[Sequence[object]], name: str = "daly.csv") -> Path:
        return _write_csv(tmp_path / name, header, rows)

    return _write


@pytest.fixture
def small_groups() -> Dict[str, str]:
    return dict(SMALL_GROUPS)


@pytest.fixture
def small_csv(write_csv) -> Path:
    """Ten years x seven causes with smooth, non-constant columns."""
    rng = np.random.default_rng(3)
    header = ["year"] + list(SMALL_GROUPS)
    rows = []
    for i, year in enumerate(range(1990, 2000)):
        values = [round(1000.0 + 50.0 * (j + 1) * i + rng.uniform(0, 20), 2) for j in range(len(SMALL_GROUPS))]
        rows.append([year] + values)
    return write_csv(header, rows)


@pytest.fixture
def groups_file(tmp_path: Path) -> Callable[[Dict[str, str]], Path]:
    def _write(mapping: Dict[str, str], nested: bool = True) -> Path:
        path = tmp_path / "groups.yaml"
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump({"causes": mapping} if nested else mapping, f)
        return path

    return _write


@pytest.fixture
def synthetic_files(tmp_path: Path):
    """Synthetic 27-year, 23-cause table written to disk: (csv path, groups path)."""
    frame, groups = make_synthetic_table(seed=7)
    csv_path = tmp_path / "daly_synthetic.csv"
    frame.to_csv(csv_path, index=False)
    groups_path = tmp_path / "groups.yaml"
    with open(groups_path, "w", encoding="utf-8") as f:
        yaml.safe_dump({"causes": groups}, f)
    return csv_path, groups_path


@pytest.fixture
def tmap() -> TimeIndexMap:
    return TimeIndexMap(1989)


SMALL_SEARCH = dict(population_size=40, generations=3, constant_tune_every=0, elite_count=3)


@pytest.fixture(scope="session")
def synthetic_inputs(tmp_path_factory):
    """Session copy of the synthetic CSV and group config."""
    root = tmp_path_factory.mktemp("synthetic")
    frame, groups = make_synthetic_table(seed=7)
    csv_path = root / "daly_synthetic.csv"
    frame.to_csv(csv_path, index=False)
    groups_path = root / "groups.yaml"
    with open(groups_path, "w", encoding="utf-8") as f:
        yaml.safe_dump({"causes": groups}, f)
    return csv_path, groups_path


@pytest.fixture(scope="session")
def small_report(synthetic_inputs):
    """A quick pipeline run over the synthetic table."""
    csv_path, groups_path = synthetic_inputs
    return run_pipeline(csv_path, groups_path, SrConfig(seed=5, **SMALL_SEARCH), TimeIndexMap(1989), 2020)
