#!/usr/bin/env python3
"""
Reproducible synthetic DALY tables with the 7 + 10 + 6 cause layout.

Each cause follows a smooth latent trend with multiplicative Gaussian noise:
communicable and injury causes follow one of two latent shapes (a steady
decline and a mid-period hump), noncommunicable causes share one rising
shape. Correlation PCA then retains 2 / 1 / 2 components under Kaiser.

Usage:
    python synthetic_data.py --out data/daly_synthetic.csv --groups-out data/groups_synthetic.yaml
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
import yaml


# cause -> (group, base DALYs, latent, amplitude)
CAUSES: List[Tuple[str, str, float, str, float]] = [
    ("hiv", "communicable", 180_000.0, "hump", 0.45),
    ("diarrhea", "communicable", 950_000.0, "decline", 0.40),
    ("malaria", "communicable", 60_000.0, "hump", 0.50),
    ("maternal", "communicable", 210_000.0, "hump", 0.35),
    ("neonatal", "communicable", 1_700_000.0, "decline", 0.30),
    ("nutritional", "communicable", 620_000.0, "decline", 0.45),
    ("other_communicable", "communicable", 480_000.0, "decline", 0.35),
    ("cancers", "noncommunicable", 1_900_000.0, "rise", 0.45),
    ("cardiovascular", "noncommunicable", 3_100_000.0, "rise", 0.50),
    ("respiratory", "noncommunicable", 900_000.0, "rise", 0.40),
    ("liver", "noncommunicable", 420_000.0, "rise", 0.35),
    ("digestive", "noncommunicable", 300_000.0, "rise", 0.30),
    ("neurology", "noncommunicable", 650_000.0, "rise", 0.45),
    ("mental", "noncommunicable", 800_000.0, "rise", 0.40),
    ("diabetes", "noncommunicable", 1_100_000.0, "rise", 0.50),
    ("musculoskeletal", "noncommunicable", 700_000.0, "rise", 0.35),
    ("other_ncd", "noncommunicable", 550_000.0, "rise", 0.30),
    ("transport", "injury", 400_000.0, "decline", 0.40),
    ("natural", "injury", 90_000.0, "hump", 0.50),
    ("conflict", "injury", 70_000.0, "hump", 0.45),
    ("self_harm", "injury", 160_000.0, "hump", 0.40),
    ("interpersonal", "injury", 380_000.0, "decline", 0.35),
    ("unintentional", "injury", 520_000.0, "decline", 0.45),
]


def _latents(n_years: int) -> Dict[str, np.ndarray]:
    t = np.arange(1, n_years + 1, dtype=float)
    mid = (n_years + 1) / 2.0
    half = max((n_years - 1) / 2.0, 1.0)
    u = (t - mid) / half
    return {
        "decline": -u,
        "hump": u ** 2 - float(np.mean(u ** 2)),
        "rise": u + 0.3 * u ** 2,
    }


def make_synthetic_table(
    seed: int,
    start_year: int = 1990,
    n_years: int = 27,
    noise: float = 0.01,
) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    Build a synthetic DALY table.

    Args:
        seed: RNG seed; equal seeds give identical tables
        start_year: first calendar year
        n_years: number of consecutive years
        noise: relative standard deviation of the multiplicative noise

    Returns:
        (DataFrame with a `year` column and one column per cause, cause -> group mapping)
    """
    rng = np.random.default_rng(seed)
    latent = _latents(n_years)
    frame = pd.DataFrame({"year": np.arange(start_year, start_year + n_years, dtype=int)})
    groups: Dict[str, str] = {}
    for cause, group, base, shape, amplitude in CAUSES:
        trend = 1.0 + amplitude * latent[shape]
        jitter = 1.0 + noise * rng.standard_normal(n_years)
        frame[cause] = np.round(base * trend * np.clip(jitter, 0.5, None), 1)
        groups[cause] = group
    return frame, groups


def write_synthetic(csv_path: Path, groups_path: Path, seed: int, start_year: int,
                    n_years: int, noise: float) -> None:
    frame, groups = make_synthetic_table(seed, start_year, n_years, noise)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(csv_path, index=False)
    groups_path.parent.mkdir(parents=True, exist_ok=True)
    with open(groups_path, "w", encoding="utf-8") as f:
        yaml.safe_dump({"causes": groups}, f, sort_keys=False)


def parse_args():
    p = argparse.ArgumentParser(description="Write a synthetic DALY CSV and its group config")
    p.add_argument("--out", default="data/daly_synthetic.csv", help="CSV path to write")
    p.add_argument("--groups-out", default="data/groups_synthetic.yaml", help="Group config path")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--start-year", type=int, default=1990)
    p.add_argument("--years", type=int, default=27, help="Number of consecutive years")
    p.add_argument("--noise", type=float, default=0.01, help="Relative noise level")
    return p.parse_args()


def main() -> int:
    args = parse_args()
    write_synthetic(Path(args.out), Path(args.groups_out), args.seed,
                    args.start_year, args.years, args.noise)
    print(f"✓ Wrote {args.years} years x {len(CAUSES)} causes to {args.out}")
    print(f"✓ Group config written to {args.groups_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
