"""File formats: binary fields with JSON sidecars, CSV and gnuplot exports, JSON matrices and symbols."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .grid import ConfigField, ConfigGrid, PhaseField, PhaseGrid
from .weyl import WeylSymbol

SYMBOL_KEYS = ("1", "x", "p", "xx", "xp", "pp")


def _bounds(grid) -> list:
    return [[ax.lo, ax.hi] for ax in grid.axes]


def field_header(f) -> dict:
    kind = "phase" if isinstance(f, PhaseField) else "config"
    return {"kind": kind, "shape": list(f.grid.shape), "bounds": _bounds(f.grid), "hbar": f.grid.hbar}


def save_field(f, path) -> Path:
    """Write ``path`` (little-endian interleaved re/im doubles) and ``path.json``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    vals = np.ascontiguousarray(f.values, dtype=np.complex128)
    inter = np.empty(vals.shape + (2,), dtype="<f8")
    inter[..., 0] = vals.real
    inter[..., 1] = vals.imag
    path.write_bytes(inter.tobytes())
    _write_json(path.with_name(path.name + ".json"), field_header(f))
    return path


def load_field(path):
    """Inverse of :func:`save_field`."""
    path = Path(path)
    head = json.loads(path.with_name(path.name + ".json").read_text())
    shape = tuple(head["shape"])
    raw = np.frombuffer(path.read_bytes(), dtype="<f8").reshape(shape + (2,))
    vals = raw[..., 0] + 1j * raw[..., 1]
    bounds = [tuple(b) for b in head["bounds"]]
    if head["kind"] == "phase":
        from .grid import Axis

        (xl, xh), (pl, ph) = bounds
        grid = PhaseGrid(Axis(shape[0], xl, xh), Axis(shape[1], pl, ph), head["hbar"])
        return PhaseField(grid, vals)
    return ConfigField(ConfigGrid(shape[0], tuple(bounds), head["hbar"]), vals)


def field_csv(f, path) -> Path:
    """One row per grid point: coordinates, re, im."""
    path = Path(path)
    names = ["x", "p"] if isinstance(f, PhaseField) else [f"x{j}" for j in range(f.grid.ndim)]
    coords = [c.ravel() for c in f.grid.coords()]
    vals = f.values.ravel()
    rows = zip(*coords, vals.real, vals.imag)
    return write_csv(path, names + ["re", "im"], rows)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_dat(path, header, rows) -> Path:
    """Whitespace-separated columns with a ``#`` header line (gnuplot-ready)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")
    return path


def field_dat(f: PhaseField, path, quantity: str = "abs2") -> Path:
    """Phase field as gnuplot ``splot`` blocks (blank line between x rows)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    v = np.abs(f.values) ** 2 if quantity == "abs2" else np.real(f.values)
    with path.open("w") as fh:
        fh.write(f"# x p {quantity}\n")
        for i, x in enumerate(f.grid.x.points):
            for j, p in enumerate(f.grid.p.points):
                fh.write(f"{_fmt(x)} {_fmt(p)} {_fmt(v[i, j])}\n")
            fh.write("\n")
    return path


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_json(path, obj) -> Path:
    return _write_json(Path(path), to_jsonable(obj))


def to_jsonable(obj):
    """Convert numpy scalars/arrays and complex numbers to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def matrix_to_json(M) -> str:
    return json.dumps(np.asarray(M, dtype=float).tolist())


def matrix_from_json(text: str) -> np.ndarray:
    M = np.asarray(json.loads(text), dtype=float)
    if M.ndim != 2:
        raise ValueError("matrix JSON must be a 2D array")
    return M


def matrix_to_csv(M, path) -> Path:
    M = np.asarray(M, dtype=float)
    return write_csv(path, [f"c{j}" for j in range(M.shape[1])], M.tolist())


def matrix_from_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def symbol_from_json(obj) -> WeylSymbol:
    """Polynomial symbol from a coefficient map ``{"1", "x", "p", "xx", "xp", "pp"}``."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    unknown = set(obj) - set(SYMBOL_KEYS)
    if unknown:
        raise ValueError(f"unknown symbol keys: {sorted(unknown)}")
    return WeylSymbol.polynomial({k: float(v) for k, v in obj.items()})


def symbol_to_json(A: WeylSymbol) -> str:
    return json.dumps({k: float(np.real(v)) for k, v in A.coefficients.items()}, sort_keys=True)
