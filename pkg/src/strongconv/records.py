"""Persisted experiment records: metric tables, JSON/CSV emission, and the
on-disk matrix tuple format.

A run record stores everything needed to reproduce itself: the scenario id,
fully resolved parameters, and the seed.  Metric tables are emitted either
inside one JSON document or as one CSV file per table with a header row.

Matrix tuples on disk are raw little-endian float64, row-major, with real
and imaginary parts interleaved per entry, one coordinate after another,
plus a JSON sidecar ``{"k": ..., "r": ..., "hermitian_flags": [...]}``
located at the binary path with its extension replaced by ``.json``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ensembles import MatTuple, SeedSpec

VERSION = "0.1.0"


@dataclass
class MetricTable:
    name: str
    columns: tuple
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = [tuple(r) for r in self.rows]
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row width mismatch in table {self.name!r}")

    def append(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row width mismatch in table {self.name!r}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_jsonable(self) -> dict:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [[_jsonable_cell(v) for v in row] for row in self.rows],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "MetricTable":
        rows = [tuple(_from_jsonable_cell(v) for v in row) for row in data["rows"]]
        return cls(data["name"], tuple(data["columns"]), rows)

    def write_csv(self, path: Path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_csv_cell(v) for v in row])


def _jsonable_cell(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, float) and math.isnan(v):
        return {"nan": True}
    if isinstance(v, float):
        return float(v)
    return v

def _from_jsonable_cell(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(v["re"], v["im"])
    if isinstance(v, dict) and v.get("nan"):
        return math.nan
    return v


def _csv_cell(v):
    # numpy scalars repr with their class name; unwrap them first
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    if isinstance(v, complex):
        return f"{v.real!r}{'+' if v.imag >= 0 else '-'}{abs(v.imag)!r}j"
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(float(v))
    return v


@dataclass
class RunRecord:
    scenario_id: str
    params: dict
    seed: SeedSpec
    tables: dict
    wall_clock_s: float = 0.0
    version: str = VERSION

    def to_jsonable(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "params": self.params,
            "seed": self.seed.serialize(),
            "tables": {name: t.to_jsonable() for name, t in self.tables.items()},
            "wall_clock_s": self.wall_clock_s,
            "version": self.version,
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "RunRecord":
        return cls(
            scenario_id=data["scenario_id"],
            params=data["params"],
            seed=SeedSpec.deserialize(data["seed"]),
            tables={
                name: MetricTable.from_jsonable(t)
                for name, t in data["tables"].items()
            },
            wall_clock_s=data.get("wall_clock_s", 0.0),
            version=data.get("version", VERSION),
        )

    def save_json(self, path: Path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(self.to_jsonable(), fh, indent=2, sort_keys=True)

    @classmethod
    def load_json(cls, path: Path) -> "RunRecord":
        with open(path) as fh:
            return cls.from_jsonable(json.load(fh))


def emit(record: RunRecord, fmt: str, out_dir: Path) -> list:
    """Write the record as JSON, CSV tables, or both; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        path = out_dir / "run.json"
        record.save_json(path)
        written.append(path)
    if fmt in ("csv", "both"):
        tdir = out_dir / "tables"
        tdir.mkdir(exist_ok=True)
        for name, table in sorted(record.tables.items()):
            path = tdir / f"{name}.csv"
            table.write_csv(path)
            written.append(path)
    if fmt not in ("json", "csv", "both"):
        raise ValueError(f"unknown format {fmt!r}")
    return written


HERM_FLAG_TOL = 1e-10


def save_mat_tuple(path: Path, tup: MatTuple):
    """Write interleaved re/im float64 binary plus the JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k, r = tup.dim, tup.r
    buf = np.empty((r, k, k, 2), dtype="<f8")
    flags = []
    for j, m in enumerate(tup.entries):
        buf[j, :, :, 0] = m.real
        buf[j, :, :, 1] = m.imag
        flags.append(bool(
            np.linalg.norm(m - m.conj().T) <= HERM_FLAG_TOL * (1 + np.linalg.norm(m))
        ))
    with open(path, "wb") as fh:
        fh.write(buf.tobytes())
    sidecar = path.with_suffix(".json")
    with open(sidecar, "w") as fh:
        json.dump({"k": k, "r": r, "hermitian_flags": flags}, fh)


def load_mat_tuple(path: Path) -> MatTuple:
    path = Path(path)
    sidecar = path.with_suffix(".json")
    with open(sidecar) as fh:
        meta = json.load(fh)
    k, r = int(meta["k"]), int(meta["r"])
    raw = np.fromfile(path, dtype="<f8")
    if raw.size != r * k * k * 2:
        raise ValueError("binary payload does not match the sidecar shape")
    arr = raw.reshape(r, k, k, 2)
    mats = tuple(arr[j, :, :, 0] + 1j * arr[j, :, :, 1] for j in range(r))
    return MatTuple(mats)
