"""Command-line experiment runner: ``psqm selftest`` and ``psqm run``."""

from __future__ import annotations

import argparse
import contextlib
import copy
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np
import tomli
from threadpoolctl import threadpool_limits

from . import io
from .conventions import CONVENTIONS_VERSION
from .errors import ConfigError
from .gaussian import (
    GaussianParams,
    config_gaussian,
    fixed_marginal_gaussian,
    gaussian_wigner,
    gaussian_window,
    hermite_state,
    phase_gaussian_range_check,
    quantum_conditions,
    standard_gaussian,
)
from .grid import ConfigField, ConfigGrid, PhaseGrid
from .measurement import hbar_limit_study, marginal_p, marginal_x
from .metaplectic import (
    conjugation_residual,
    metaplectic_data,
    wigner_covariance_residual,
)
from .propagator import PropagationConfig, ho_explicit, propagate, stable_steps
from .selftest import run_selftest
from .symplectic import WignerEllipsoid, as_matrix, rotation, squeeze
from .transforms import cr_residual, range_residual, wavepacket, wigner_moyal
from .weyl import WeylSymbol, hw_config, weyl_quantize_phase

COMMANDS = (
    "wavepacket",
    "propagate",
    "ho-explicit",
    "marginals",
    "gaussian-check",
    "metaplectic-covariance",
    "hbar-sweep",
)

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_COEFFS = {
    "type": "object",
    "properties": {k: {"type": "number"} for k in io.SYMBOL_KEYS},
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "seed": {"type": "integer", "minimum": 0},
        "output": {"type": "string"},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "points": {"type": "integer", "minimum": 4},
                "bounds": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "hbar": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "state": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["gaussian", "hermite", "file", "squeezed"]},
                "n": {"type": "integer", "minimum": 0, "maximum": 10},
                "path": {"type": "string"},
                "x0": {"type": "number"},
                "p0": {"type": "number"},
                "X": {"type": "number", "exclusiveMinimum": 0},
                "Y": {"type": "number"},
            },
        },
        "window": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"width": {"type": "number", "exclusiveMinimum": 0}},
        },
        "hamiltonian": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["ho", "polynomial"]},
                "omega": {"type": "number"},
                "coefficients": _COEFFS,
            },
        },
        "propagation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t": {"type": "number"},
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "steps": {"type": "integer", "minimum": 1},
                "method": {"enum": ["rk4-spectral", "dense-kernel-expm"]},
                "record_every": {"type": "integer", "minimum": 1},
                "save_fields": {"type": "boolean"},
                "compare_rk4": {"type": "boolean"},
            },
        },
        "gaussian": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"G": _MATRIX, "X": _MATRIX, "Y": _MATRIX},
        },
        "metaplectic": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "S": _MATRIX,
                "rotation": {"type": "number"},
                "squeeze": {"type": "number"},
                "z0": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "hbars": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2},
                "points": {"type": "integer", "minimum": 4},
                "half_width": {"type": "number", "exclusiveMinimum": 0},
                "family": {"enum": ["fixed-marginal", "fixed"]},
            },
        },
    },
}


# ---------------------------------------------------------------- config handling


def load_config(path) -> dict:
    """Read a TOML or JSON experiment file and validate it."""
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".json":
            cfg = json.loads(text)
        else:
            cfg = tomli.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from exc


def apply_overrides(cfg: dict, hbar=None, points=None, seed=None) -> dict:
    cfg = copy.deepcopy(cfg)
    grid = cfg.setdefault("grid", {})
    if hbar is not None:
        grid["hbar"] = float(hbar)
    if points is not None:
        grid["points"] = int(points)
    if seed is not None:
        cfg["seed"] = int(seed)
    validate_config(cfg)
    return cfg


def build_grid(cfg: dict) -> ConfigGrid:
    g = cfg.get("grid", {})
    points = g.get("points", 128)
    hbar = g.get("hbar", 1.0)
    if "bounds" in g:
        lo, hi = g["bounds"]
        return ConfigGrid(points, ((lo, hi),), hbar)
    return ConfigGrid.self_dual(points, 1, hbar)


def build_state(cfg: dict, grid: ConfigGrid) -> ConfigField:
    spec = cfg.get("state", {"type": "gaussian"})
    kind = spec["type"]
    if kind == "hermite":
        psi = hermite_state(spec.get("n", 0), grid)
    elif kind == "file":
        if "path" not in spec:
            raise ConfigError("state.path is required for file states")
        psi = io.load_field(spec["path"])
        if not isinstance(psi, ConfigField) or not psi.grid.matches(grid):
            raise ConfigError("state file does not live on the configured grid")
    elif kind == "squeezed":
        params = GaussianParams.config([[spec.get("X", 1.0)]], [[spec.get("Y", 0.0)]], hbar=grid.hbar)
        psi = config_gaussian(params, grid)
    else:
        psi = standard_gaussian(grid)
    x0, p0 = spec.get("x0", 0.0), spec.get("p0", 0.0)
    if x0 or p0:
        psi = hw_config((x0, p0), 0.0, psi)
    return psi.normalized()


def build_window(cfg: dict, grid: ConfigGrid):
    return gaussian_window(grid, cfg.get("window", {}).get("width"))


def build_symbol(cfg: dict) -> WeylSymbol:
    h = cfg.get("hamiltonian", {"type": "ho"})
    if h["type"] == "ho":
        return WeylSymbol.harmonic(h.get("omega", 1.0))
    if "coefficients" not in h:
        raise ConfigError("polynomial Hamiltonians need hamiltonian.coefficients")
    return io.symbol_from_json(h["coefficients"])


def _stationary_energy(cfg: dict) -> float | None:
    """``hbar omega (n + 1/2)`` when the run is an HO eigenstate with the standard window."""
    h = cfg.get("hamiltonian", {"type": "ho"})
    s = cfg.get("state", {"type": "gaussian"})
    if h["type"] != "ho" or "width" in cfg.get("window", {}):
        return None
    if s["type"] not in ("gaussian", "hermite") or s.get("x0") or s.get("p0"):
        return None
    n = s.get("n", 0) if s["type"] == "hermite" else 0
    hbar = cfg.get("grid", {}).get("hbar", 1.0)
    return hbar * h.get("omega", 1.0) * (n + 0.5)


# ---------------------------------------------------------------- commands


def _manifest(cfg: dict, command: str, **entries) -> dict:
    out = {"command": command, "conventions_version": CONVENTIONS_VERSION, "config": cfg}
    out.update(entries)
    return io.to_jsonable(out)


def cmd_wavepacket(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    psi = build_state(cfg, grid)
    window = build_window(cfg, grid)
    Psi = wavepacket(window, psi)
    io.save_field(Psi, out / "field.bin")
    io.field_csv(Psi, out / "field.csv")
    io.field_dat(Psi, out / "field.dat")
    res = {
        "norm_state": psi.norm(),
        "norm_field": Psi.norm(),
        "isometry_error": abs(Psi.norm() - psi.norm()),
        "range_residual": range_residual(window, Psi),
    }
    if "width" not in cfg.get("window", {}):
        res["cr_residual"] = cr_residual(Psi)
    return _manifest(cfg, "wavepacket", residuals=res, files=["field.bin", "field.csv", "field.dat"])


def _propagation_steps(pc: dict, op, hbar: float) -> tuple[float, int]:
    t = pc.get("t", np.pi / 2)
    if "dt" in pc and "steps" in pc:
        return float(pc["dt"]), int(pc["steps"])
    if "steps" in pc:
        return t / pc["steps"], int(pc["steps"])
    if "dt" in pc:
        n = max(1, int(round(t / pc["dt"])))
        return t / n, n
    n = stable_steps(op, t, hbar)
    return t / n, n


def cmd_propagate(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    pg = PhaseGrid.from_config(grid)
    psi = build_state(cfg, grid)
    window = build_window(cfg, grid)
    Psi0 = wavepacket(window, psi)
    op = weyl_quantize_phase(build_symbol(cfg), pg)
    pc = cfg.get("propagation", {})
    dt, steps = _propagation_steps(pc, op, grid.hbar)
    pcfg = PropagationConfig(dt, steps, pc.get("method", "rk4-spectral"), pc.get("record_every", steps))
    tr = propagate(op, Psi0, pcfg)
    files = []
    if pc.get("save_fields", True):
        for k, F in enumerate(tr.fields):
            name = f"field_{k:04d}.bin"
            io.save_field(F, out / name)
            files.append(name)
    io.write_dat(out / "trajectory.dat", ["t", "norm", "energy"], zip(tr.times, tr.norms, tr.energies))
    files.append("trajectory.dat")
    res = {"norm_drift": tr.norm_drift}
    E = _stationary_energy(cfg)
    if E is not None:
        t = tr.times[-1]
        res["phase_error"] = (tr.final - Psi0 * np.exp(-1j * E * t / grid.hbar)).norm() / Psi0.norm()
    return _manifest(
        cfg,
        "propagate",
        dt=dt,
        steps=steps,
        times=tr.times,
        norms=tr.norms,
        energies=tr.energies,
        residuals=res,
        files=files,
    )


def cmd_ho_explicit(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    pg = PhaseGrid.from_config(grid)
    h = cfg.get("hamiltonian", {"type": "ho"})
    if h["type"] != "ho":
        raise ConfigError("ho-explicit needs an 'ho' Hamiltonian")
    omega = h.get("omega", 1.0)
    psi = build_state(cfg, grid)
    Psi0 = wavepacket(build_window(cfg, grid), psi)
    pc = cfg.get("propagation", {})
    t = pc.get("t", np.pi / 2)
    Psi = ho_explicit(omega, t, Psi0)
    io.save_field(Psi, out / "field.bin")
    io.field_dat(Psi, out / "field.dat")
    res = {"norm_error": abs(Psi.norm() - Psi0.norm())}
    E = _stationary_energy(cfg)
    if E is not None:
        res["phase_error"] = (Psi - Psi0 * np.exp(-1j * E * t / grid.hbar)).norm() / Psi0.norm()
    if pc.get("compare_rk4", False):
        op = weyl_quantize_phase(WeylSymbol.harmonic(omega), pg)
        n = stable_steps(op, t, grid.hbar)
        ref = propagate(op, Psi0, PropagationConfig(t / n, n, record_every=n)).final
        res["rk4_relative_error"] = (Psi - ref).norm() / ref.norm()
    return _manifest(cfg, "ho-explicit", t=t, residuals=res, files=["field.bin", "field.dat"])


def _marginal_rows(rep):
    err = np.abs(rep.density - rep.reference)
    return zip(rep.axis, rep.density, rep.reference, err)


def cmd_marginals(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    psi = build_state(cfg, grid)
    window = build_window(cfg, grid)
    Psi = wavepacket(window, psi)
    reports = {"x": marginal_x(Psi, window, psi), "p": marginal_p(Psi, window, psi)}
    header = ["axis", "density", "reference", "abs_error"]
    summary = {}
    for k, rep in reports.items():
        io.write_csv(out / f"marginal_{k}.csv", header, _marginal_rows(rep))
        io.write_dat(out / f"marginal_{k}.dat", header, _marginal_rows(rep))
        summary[k] = {"total_mass": rep.total_mass, "sup_error": rep.sup_error}
    files = [f"marginal_{k}.{e}" for k in reports for e in ("csv", "dat")]
    res = {f"{k}_sup_error": v["sup_error"] for k, v in summary.items()}
    res.update({f"{k}_mass_error": abs(v["total_mass"] - psi.norm() ** 2) for k, v in summary.items()})
    return _manifest(cfg, "marginals", marginals=summary, norm_squared=psi.norm() ** 2, residuals=res, files=files)


def cmd_gaussian_check(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    g = cfg.get("gaussian", {})
    res = {}
    if "X" in g:
        params = GaussianParams.config(g["X"], g.get("Y"), hbar=grid.hbar)
        G = gaussian_wigner(params).G
        res["wigner_G"] = G
        if params.n == 1:
            psi = config_gaussian(params, grid)
            W = wigner_moyal(psi, psi.conj())
            x, p = W.grid.coords()
            ref = np.exp(-(G[0, 0] * x * x + 2 * G[0, 1] * x * p + G[1, 1] * p * p) / grid.hbar) / (np.pi * grid.hbar)
            res["wigner_sup_error"] = float(np.max(np.abs(W.values - ref)))
    else:
        G = np.asarray(g.get("G", (0.5 * np.eye(2)).tolist()), dtype=float)
    E = WignerEllipsoid(np.asarray(G, dtype=float), grid.hbar)
    cond = quantum_conditions(E)
    res["quantum_state"] = cond.state
    res["uncertainty"] = cond.uncertainty
    res["capacity_condition"] = cond.capacity
    if np.shape(G) == (2, 2):
        rc = phase_gaussian_range_check(G, build_window(cfg, grid))
        res.update(
            residual=rc.residual,
            rescaled=rc.rescaled,
            symplectic_2G=rc.symplectic_verdict,
            symplectic_G=rc.unscaled_verdict,
        )
    io.write_json(out / "gaussian.json", GaussianParams.phase(G, grid.hbar).to_dict())
    return _manifest(cfg, "gaussian-check", residuals=res, files=["gaussian.json"])


def _metaplectic_matrix(spec: dict) -> np.ndarray:
    if "S" in spec:
        return np.asarray(spec["S"], dtype=float)
    if "squeeze" in spec:
        return as_matrix(squeeze(spec["squeeze"]))
    return as_matrix(rotation(spec.get("rotation", np.pi / 2)))


def cmd_metaplectic_covariance(cfg: dict, out: Path) -> dict:
    grid = build_grid(cfg)
    spec = cfg.get("metaplectic", {})
    S = _metaplectic_matrix(spec)
    data = metaplectic_data(S)
    psi = build_state(cfg, grid)
    phi = hermite_state(1, grid)
    res = {"wigner_covariance": wigner_covariance_residual(data, psi, phi)}
    if data.cayley is not None and data.nu is not None:
        probe = wavepacket(build_window(cfg, grid), psi)
        z0 = spec.get("z0", [0.5, -0.25])
        res["conjugation"] = conjugation_residual(data, z0, [probe])
    io.write_json(out / "matrix.json", {"S": S})
    return _manifest(cfg, "metaplectic-covariance", S=S, m=data.m, nu=data.nu, residuals=res, files=["matrix.json"])


def cmd_hbar_sweep(cfg: dict, out: Path) -> dict:
    sw = cfg.get("sweep", {})
    hbars = sw.get("hbars", [1.0, 0.25, 0.0625])
    family = sw.get("family", "fixed-marginal")
    if family == "fixed-marginal":
        fam, comps = fixed_marginal_gaussian, "xp"
        points, half = sw.get("points", 256), sw.get("half_width", 6.0)
    else:
        fam, comps = (lambda g: g.sample(lambda x: np.exp(-x * x / 2))), "x"
        points, half = sw.get("points", 256), sw.get("half_width", 12.0)
    st = hbar_limit_study(fam, hbars, points, half, check=False, components=comps)
    rows = list(zip(st.values, st.x_errors, st.p_errors))
    io.write_csv(out / "sweep.csv", ["hbar", "x_error", "p_error"], rows)
    io.write_dat(out / "sweep.dat", ["hbar", "x_error", "p_error"], rows)
    return _manifest(
        cfg,
        "hbar-sweep",
        hbars=st.values,
        x_errors=st.x_errors,
        p_errors=st.p_errors,
        checked_components=comps,
        residuals={"x_errors": st.x_errors, "p_errors": st.p_errors, "monotone": st.decreasing_in(comps)},
        files=["sweep.csv", "sweep.dat"],
    )


HANDLERS = {
    "wavepacket": cmd_wavepacket,
    "propagate": cmd_propagate,
    "ho-explicit": cmd_ho_explicit,
    "marginals": cmd_marginals,
    "gaussian-check": cmd_gaussian_check,
    "metaplectic-covariance": cmd_metaplectic_covariance,
    "hbar-sweep": cmd_hbar_sweep,
}


def cmd_run(cfg: dict, out) -> dict:
    """Execute a validated config and write its manifest to ``out/manifest.json``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = HANDLERS[cfg["command"]](cfg, out)
    io.write_json(out / "manifest.json", manifest)
    return manifest


def cmd_selftest(tol_scale: float = 1.0, overrides: dict | None = None, out=None) -> tuple[int, dict]:
    results = run_selftest(tol_scale=tol_scale, overrides=overrides)
    failed = [r.name for r in results if not r.ok]
    summary = {
        "conventions_version": CONVENTIONS_VERSION,
        "ok": not failed,
        "failed": failed,
        "checks": {r.name: r.as_dict() for r in results},
    }
    if out is not None:
        io.write_json(Path(out) / "selftest.json", summary)
    return (1 if failed else 0), summary


# ---------------------------------------------------------------- entry point


def _thread_limit():
    value = os.environ.get("PSQM_THREADS")
    if not value:
        return contextlib.nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise ConfigError("PSQM_THREADS must be a positive integer") from None
    if n < 1:
        raise ConfigError("PSQM_THREADS must be a positive integer")
    return threadpool_limits(limits=n)


def _parse_override(text: str) -> tuple[str, float]:
    name, _, value = text.partition("=")
    if not value:
        raise argparse.ArgumentTypeError("override must look like name=value")
    return name, float(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psqm", description="Phase-space quantum mechanics experiments.")
    sub = parser.add_subparsers(dest="cmd", required=True)
    st = sub.add_parser("selftest", help="run the invariant suite")
    st.add_argument("--out", help="directory for selftest.json")
    st.add_argument("--tol-scale", type=float, default=1.0, help="multiply every threshold (test hook)")
    st.add_argument("--override", type=_parse_override, action="append", default=[], help="name=threshold")
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("--config", required=True, help="TOML or JSON experiment file")
    run.add_argument("--out", help="output directory (default: config 'output' or ./psqm-out)")
    run.add_argument("--hbar", type=float, help="override grid.hbar")
    run.add_argument("--grid", type=int, help="override grid.points")
    run.add_argument("--seed", type=int, help="override seed")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            if args.cmd == "selftest":
                code, summary = cmd_selftest(args.tol_scale, dict(args.override), args.out)
                print(json.dumps(io.to_jsonable(summary), indent=2, sort_keys=True))
                if code:
                    print("failed: " + ", ".join(summary["failed"]), file=sys.stderr)
                return code
            cfg = apply_overrides(load_config(args.config), args.hbar, args.grid, args.seed)
            out = args.out or cfg.get("output", "psqm-out")
            manifest = cmd_run(cfg, out)
            print(json.dumps(manifest.get("residuals", {}), indent=2, sort_keys=True))
            return 0
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
