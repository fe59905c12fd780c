import json

import numpy as np
import pytest

from psqm import io
from psqm.grid import ConfigField, PhaseField
from psqm.weyl import WeylSymbol


def test_field_roundtrip(tmp_path, pg64, grid64, rng):
    P = PhaseField(pg64, rng.normal(size=pg64.shape) + 1j * rng.normal(size=pg64.shape))
    path = io.save_field(P, tmp_path / "a.bin")
    head = json.loads((tmp_path / "a.bin.json").read_text())
    assert head["kind"] == "phase" and head["shape"] == [64, 64]
    assert path.stat().st_size == 64 * 64 * 16
    Q = io.load_field(path)
    assert isinstance(Q, PhaseField) and np.array_equal(Q.values, P.values)
    assert Q.grid.matches(pg64)
    c = ConfigField(grid64, rng.normal(size=64) + 0j)
    d = io.load_field(io.save_field(c, tmp_path / "b.bin"))
    assert isinstance(d, ConfigField) and np.array_equal(d.values, c.values)


def test_field_csv_and_dat(tmp_path, pg64):
    P = pg64.sample(lambda x, p: np.exp(-(x * x + p * p)) + 0j)
    io.field_csv(P, tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "x,p,re,im" and len(lines) == 1 + 64 * 64
    io.field_dat(P, tmp_path / "f.dat")
    blocks = (tmp_path / "f.dat").read_text().strip().split("\n\n")
    assert len(blocks) == 64


def test_jsonable():
    obj = {"a": np.float64(1.5), "b": np.arange(3), "c": 1 + 2j, "d": np.bool_(True), 3: (np.int64(2),)}
    out = io.to_jsonable(obj)
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": {"re": 1.0, "im": 2.0}, "d": True, "3": [2]}
    json.dumps(out)


def test_matrix_formats(tmp_path):
    M = np.array([[2.0, 0.1], [0.1, 0.5]])
    assert np.array_equal(io.matrix_from_json(io.matrix_to_json(M)), M)
    assert np.array_equal(io.matrix_from_csv(io.matrix_to_csv(M, tmp_path / "m.csv")), M)
    with pytest.raises(ValueError):
        io.matrix_from_json("[1, 2]")


def test_symbol_formats():
    A = io.symbol_from_json('{"xx": 0.5, "pp": 0.5}')
    assert json.loads(io.symbol_to_json(A)) == {"1": 0.0, "x": 0.0, "p": 0.0, "xx": 0.5, "xp": 0.0, "pp": 0.5}
    with pytest.raises(ValueError):
        io.symbol_from_json({"xxx": 1.0})
    assert isinstance(A, WeylSymbol)
