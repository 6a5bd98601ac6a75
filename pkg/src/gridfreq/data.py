"""Accessors for the data files shipped with the package.

The shipped model, anchor and scenario files are documented reconstructions
built from public dispatch statistics and the stated evolution assumptions;
`notes` fields inside each file record the construction rules. They are the
single place to correct if better source data is obtained.
"""

from __future__ import annotations

import json
from pathlib import Path

from .io import load_anchor_file, load_model_file, load_trajectory_file
from .scenarios import ReferenceAnchor, ScenarioTrajectory
from .model import TwoAreaSystem

__all__ = [
    "data_path",
    "load_reference_model",
    "load_reference_anchor",
    "load_shipped_trajectory",
    "load_typical_inertia",
    "example_event_paths",
    "TRAJECTORY_NAMES",
]

_DATA_DIR = Path(__file__).parent / "data"

TRAJECTORY_NAMES = ("monthly-average", "winter-valley", "peak-pv")

_TRAJECTORY_FILES = {
    "monthly-average": "trajectory_monthly_average.json",
    "winter-valley": "trajectory_winter_valley.json",
    "peak-pv": "trajectory_peak_pv.json",
}


def data_path(name: str) -> Path:
    path = _DATA_DIR / name
    if not path.exists():
        raise FileNotFoundError(f"shipped data file not found: {name}")
    return path


def load_reference_model() -> TwoAreaSystem:
    return load_model_file(data_path("reference_model.json"))


def load_reference_anchor() -> ReferenceAnchor:
    return load_anchor_file(data_path("reference_anchor.json"))


def load_shipped_trajectory(name: str) -> ScenarioTrajectory:
    if name not in _TRAJECTORY_FILES:
        raise ValueError(f"unknown trajectory {name!r}; known: {TRAJECTORY_NAMES}")
    return load_trajectory_file(data_path(_TRAJECTORY_FILES[name]))


def load_typical_inertia() -> dict[str, float]:
    with open(data_path("typical_inertia.json"), "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return {str(k): float(v) for k, v in raw["inertia_s"].items()}


def example_event_paths() -> tuple[Path, Path]:
    """Paths of the shipped synthetic example event (trace CSV, sidecar JSON)."""
    return data_path("example_event_trace.csv"), data_path("example_event_meta.json")
