"""Shared fixtures: the bundled scenarios are executed once per session
and reused by the acceptance suite and the property checks."""

from pathlib import Path

import pytest

from coldpress.config import load_config
from coldpress.runner import run_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

BUNDLED = ("normalized_solid", "normalized_mushy", "normalized_liquid",
           "water_freeze_1d", "normalized_2d")


@pytest.fixture(scope="session")
def bundled_runs():
    """name -> completed RunOutput for every bundled scenario."""
    runs = {}
    for name in BUNDLED:
        cfg = load_config(SCENARIO_DIR / f"{name}.yaml")
        runs[name] = run_scenario(cfg, out_dir=None, plots=False)
    return runs
