"""Selection report serialization.

The report is deterministic JSON: rerunning the same command on the same
inputs reproduces it byte for byte.  Wall-clock timings are therefore written
to a separate ``<out>.timing.json`` sidecar instead of the report itself.
"""

from __future__ import annotations

import json
from pathlib import Path

from .selection import SelectionState

SCHEMA_VERSION = "1"


def build_report(state: SelectionState, config_echo: dict, d_max: float | None,
                 exact_dmax: bool | None, method: str) -> dict:
    per_round = [
        {
            "node": int(r.node),
            "gain": float(r.gain),
            "sigma_size": int(r.sigma_size),
            "diversity": float(r.diversity_value),
            "evaluations": int(r.evaluations),
        }
        for r in state.per_round
    ]
    sigma_size = state.activated.size
    div_value = state.diversity.value if state.diversity is not None else 0.0
    return {
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "config": config_echo,
        "seeds": [int(s) for s in state.seeds],
        "per_round": per_round,
        "objective": {
            "value": float(state.objective_value),
            "sigma_size": int(sigma_size),
            "diversity_value": float(div_value),
        },
        "d_max": None if d_max is None else float(d_max),
        "exact_dmax": exact_dmax,
        "warnings": list(state.warnings),
    }


def baseline_report(seeds, config_echo: dict, method: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "method": method,
        "config": config_echo,
        "seeds": [int(s) for s in seeds],
        "per_round": [],
        "objective": None,
        "d_max": None,
        "exact_dmax": None,
        "warnings": [],
    }


def dump_report(report: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_timings(round_wall_ms, path) -> None:
    side = Path(str(path) + ".timing.json")
    with side.open("w", encoding="utf-8") as fh:
        json.dump({"round_wall_ms": [float(t) for t in round_wall_ms]}, fh, indent=2)
        fh.write("\n")


def load_report(path) -> dict:
    with Path(path).open("r", encoding="utf-8") as fh:
        report = json.load(fh)
    if "seeds" not in report:
        raise ValueError(f"{path}: not a selection report")
    return report
