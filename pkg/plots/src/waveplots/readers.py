"""Input parsing for simulation output directories.

Renders depend only on the CSV tables and meta.json: nothing is recomputed
from physics, and missing or misnamed columns fail loudly by name.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

__all__ = ["SchemaError", "RunData", "load_run"]

SNAPSHOT_COLUMNS = ["t", "x", "phi_re", "phi_im", "phidot_re", "phidot_im"]
CONSERVED_COLUMNS = ["t", "energy", "symplectic", "leakage", "phi_norm"]


class SchemaError(ValueError):
    """An input table is missing expected columns."""

    def __init__(self, path, missing):
        self.missing = list(missing)
        super().__init__(f"{path}: missing columns {', '.join(self.missing)}")


def _read_csv(path: Path, required: list[str]) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"no such table: {path}")
    df = pd.read_csv(path)
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise SchemaError(path, missing)
    return df


@dataclass(frozen=True)
class RunData:
    """One simulation output directory, parsed."""

    snapshots: pd.DataFrame | None
    conserved: pd.DataFrame | None
    meta: dict

    @property
    def support_pieces(self) -> list[tuple[int, float, float]]:
        geo = self.meta.get("geometry", {})
        return [tuple(p) for p in geo.get("support", [])]

    @property
    def t_infinity(self) -> float | None:
        geo = self.meta.get("geometry", {})
        value = geo.get("t_infinity")
        if value is None:
            return None
        return math.inf if value == "inf" else float(value)


def load_run(directory: str | Path, need_snapshots=False, need_conserved=False) -> RunData:
    """Parse meta.json plus whichever tables the requested figure needs."""
    directory = Path(directory)
    meta_path = directory / "meta.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"no meta.json in {directory}")
    meta = json.loads(meta_path.read_text())
    snapshots = conserved = None
    snap_path = directory / "snapshots.csv"
    if need_snapshots or snap_path.exists():
        if need_snapshots and not snap_path.exists():
            raise FileNotFoundError(f"no snapshots.csv in {directory}")
        if snap_path.exists():
            snapshots = _read_csv(snap_path, SNAPSHOT_COLUMNS)
    cons_path = directory / "conserved.csv"
    if need_conserved or cons_path.exists():
        if need_conserved and not cons_path.exists():
            raise FileNotFoundError(f"no conserved.csv in {directory}")
        if cons_path.exists():
            conserved = _read_csv(cons_path, CONSERVED_COLUMNS)
    return RunData(snapshots=snapshots, conserved=conserved, meta=meta)
