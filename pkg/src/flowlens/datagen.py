"""Synthetic flights-style dataset for demos and benchmarks."""

from __future__ import annotations

import csv
import random
from pathlib import Path
from typing import Dict, List, Union

DEFAULT_SEED = 42
FIELDS = ["distance", "delay"]


def gen_flights(n: int, seed: int = DEFAULT_SEED) -> List[Dict[str, float]]:
    """n rows of {distance, delay}: distance uniform in [100, 5000],
    delay normal around a distance-dependent mean."""
    rng = random.Random(seed)
    rows = []
    for _ in range(n):
        distance = rng.uniform(100.0, 5000.0)
        delay = rng.gauss(10.0 + distance / 200.0, 30.0)
        rows.append({"distance": round(distance, 1), "delay": round(delay, 1)})
    return rows


def write_flights_csv(path: Union[str, Path], n: int,
                      seed: int = DEFAULT_SEED) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=FIELDS)
        writer.writeheader()
        writer.writerows(gen_flights(n, seed))
    return path
