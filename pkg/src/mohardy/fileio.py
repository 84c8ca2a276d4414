"""CSV / JSON carriers for sampled functions and Walsh spectra."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import DyadicGrid, GridError, SampledFunction, resolution_of


def _parse_csv_column(text: str, source: str) -> np.ndarray:
    vals = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            vals.append(float(s.split(",")[0]))
        except ValueError:
            raise GridError(f"{source}:{lineno}: not a number: {s!r}") from None
    return np.asarray(vals, dtype=float)


def load_values(path: str | Path) -> np.ndarray:
    """Raw numeric column from a CSV file (one value per line)."""
    p = Path(path)
    return _parse_csv_column(p.read_text(), str(p))


def read_function(path: str | Path) -> SampledFunction:
    p = Path(path)
    text = p.read_text()
    if p.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        obj = json.loads(text)
        values = np.asarray(obj["values"], dtype=float)
        N = int(obj.get("resolution", resolution_of(values.size)))
        return SampledFunction(DyadicGrid(N), values)
    values = _parse_csv_column(text, str(p))
    return SampledFunction(DyadicGrid(resolution_of(values.size)), values)


def function_to_json(f: SampledFunction) -> dict:
    return {"resolution": f.grid.resolution, "values": [float(v) for v in f.values]}


def write_function(f: SampledFunction, path: str | Path) -> None:
    p = Path(path)
    if p.suffix.lower() == ".json":
        p.write_text(json.dumps(function_to_json(f)) + "\n")
    else:
        p.write_text("".join(f"{v!r}\n" for v in map(float, f.values)))


def spectrum_to_json(coeffs: np.ndarray) -> dict:
    c = np.asarray(coeffs, dtype=float)
    return {"resolution": resolution_of(c.size), "ordering": "paley", "values": [float(v) for v in c]}


def spectrum_from_json(obj: dict) -> np.ndarray:
    if obj.get("ordering", "paley") != "paley":
        raise GridError(f"unsupported spectrum ordering {obj.get('ordering')!r}")
    c = np.asarray(obj["values"], dtype=float)
    if int(obj.get("resolution", resolution_of(c.size))) != resolution_of(c.size):
        raise GridError("spectrum length does not match its resolution")
    return c
