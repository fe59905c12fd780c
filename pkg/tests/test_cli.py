import json

import numpy as np
import pytest

from psqm.cli import apply_overrides, cmd_run, load_config, main, validate_config
from psqm.errors import ConfigError


def write(tmp_path, text, name="cfg.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def test_schema_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        validate_config({"command": "wavepacket", "bogus": 1})
    with pytest.raises(ConfigError):
        validate_config({"command": "nope"})
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "command = [", "bad.toml"))
    cfg = apply_overrides({"command": "wavepacket"}, hbar=0.5, points=32, seed=3)
    assert cfg["grid"] == {"hbar": 0.5, "points": 32} and cfg["seed"] == 3


def test_json_config(tmp_path):
    p = write(tmp_path, json.dumps({"command": "wavepacket", "grid": {"points": 32}}), "c.json")
    assert load_config(p)["grid"]["points"] == 32


def test_wavepacket_run(tmp_path):
    m = cmd_run({"command": "wavepacket", "grid": {"points": 64}}, tmp_path)
    r = m["residuals"]
    assert r["isometry_error"] < 1e-10 and r["range_residual"] < 1e-8 and r["cr_residual"] < 1e-7
    assert m["conventions_version"]
    for f in m["files"]:
        assert (tmp_path / f).exists()


def test_propagate_quarter_period(tmp_path):
    cfg = load_config(
        write(
            tmp_path,
            'command = "propagate"\n[grid]\npoints = 64\n[state]\ntype = "hermite"\nn = 0\n'
            '[hamiltonian]\ntype = "ho"\nomega = 1.0\n[propagation]\nt = 1.5707963267948966\nsave_fields = false\n',
        )
    )
    m = cmd_run(cfg, tmp_path / "out")
    assert m["residuals"]["norm_drift"] < 1e-7
    assert m["residuals"]["phase_error"] < 1e-5
    assert (tmp_path / "out" / "trajectory.dat").exists()


def test_gaussian_check(tmp_path):
    m = cmd_run({"command": "gaussian-check", "grid": {"points": 128}, "gaussian": {"G": [[0.5, 0], [0, 0.5]]}}, tmp_path)
    r = m["residuals"]
    assert r["residual"] < 1e-7 and r["symplectic_2G"] and not r["symplectic_G"]
    m = cmd_run({"command": "gaussian-check", "grid": {"points": 128}, "gaussian": {"X": [[2.0]], "Y": [[0.5]]}}, tmp_path)
    assert m["residuals"]["wigner_sup_error"] < 1e-8


def test_marginals_csv(tmp_path):
    m = cmd_run({"command": "marginals", "grid": {"points": 128}}, tmp_path)
    for k in "xp":
        data = np.loadtxt(tmp_path / f"marginal_{k}.csv", delimiter=",", skiprows=1)
        assert data[:, 3].max() < 1e-8
    assert m["residuals"]["x_mass_error"] < 1e-8


def test_ho_explicit_and_metaplectic(tmp_path):
    m = cmd_run(
        {"command": "ho-explicit", "grid": {"points": 64}, "state": {"type": "gaussian", "x0": 1.0},
         "propagation": {"t": 1.5707963267948966, "compare_rk4": True}},
        tmp_path / "a",
    )
    assert m["residuals"]["rk4_relative_error"] < 1e-4
    m = cmd_run({"command": "metaplectic-covariance", "grid": {"points": 64}}, tmp_path / "b")
    assert m["residuals"]["conjugation"] < 1e-5 and m["residuals"]["wigner_covariance"] < 1e-4


def test_hbar_sweep(tmp_path):
    m = cmd_run({"command": "hbar-sweep", "sweep": {"points": 128}}, tmp_path)
    assert m["residuals"]["monotone"]
    assert (tmp_path / "sweep.csv").exists()


def test_determinism(tmp_path):
    cfg = {"command": "marginals", "grid": {"points": 64}, "state": {"type": "hermite", "n": 1}}
    cmd_run(cfg, tmp_path / "a")
    cmd_run(cfg, tmp_path / "b")
    for name in ("manifest.json", "marginal_x.csv", "marginal_p.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_file_state(tmp_path):
    cmd_run({"command": "wavepacket", "grid": {"points": 64}}, tmp_path / "w")
    from psqm import io
    from psqm.gaussian import hermite_state
    from psqm.grid import ConfigGrid

    io.save_field(hermite_state(2, ConfigGrid.self_dual(64)), tmp_path / "psi.bin")
    m = cmd_run({"command": "wavepacket", "grid": {"points": 64}, "state": {"type": "file", "path": str(tmp_path / "psi.bin")}}, tmp_path / "f")
    assert m["residuals"]["isometry_error"] < 1e-10
    with pytest.raises(ConfigError):
        cmd_run({"command": "wavepacket", "grid": {"points": 32}, "state": {"type": "file", "path": str(tmp_path / "psi.bin")}}, tmp_path / "g")


def test_main_exit_codes(tmp_path, capsys, monkeypatch):
    p = write(tmp_path, 'command = "wavepacket"\n[grid]\npoints = 32\n')
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o"), "--grid", "64"]) == 0
    assert manifest(tmp_path / "o")["config"]["grid"]["points"] == 64
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o"), "--grid", "48"]) == 1
    assert "ValueError" in capsys.readouterr().err
    bad = write(tmp_path, 'command = "wavepacket"\nextra = 1\n', "bad.toml")
    assert main(["run", "--config", str(bad)]) == 2
    monkeypatch.setenv("PSQM_THREADS", "1")
    assert main(["selftest", "--override", "parseval=0", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "parseval" in err
    summary = json.loads((tmp_path / "selftest.json").read_text())
    assert summary["failed"] == ["parseval"]
    monkeypatch.setenv("PSQM_THREADS", "zero")
    assert main(["selftest"]) == 2


def test_shipped_configs_validate():
    from pathlib import Path

    paths = sorted((Path(__file__).parent.parent / "configs").glob("*"))
    assert paths
    for p in paths:
        load_config(p)
