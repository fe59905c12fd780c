"""Invariant suite behind ``psqm selftest``.

Each check returns a measured residual that must not exceed its threshold.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .gaussian import (
    GaussianParams,
    gaussian_window,
    hermite_state,
    phase_gaussian,
    quantum_conditions,
    standard_gaussian,
)
from .grid import ConfigField, ConfigGrid, PhaseField, PhaseGrid, inner, spectral_derivative
from .measurement import marginal_p, marginal_x
from .propagator import (
    LinearHamiltonian,
    PropagationConfig,
    hj_residual,
    linear_flow_residual,
    propagate,
    stable_steps,
)
from .symplectic import WignerEllipsoid, random_symplectic, williamson
from .transforms import (
    cr_residual,
    range_residual,
    symplectic_fourier,
    wavepacket,
    wavepacket_adjoint,
)
from .weyl import ho_operator, hw_config, hw_phase, momentum_operator, position_operator


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float
    seconds: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.threshold)

    def as_dict(self) -> dict:
        return {"residual": self.residual, "threshold": self.threshold, "ok": self.ok, "seconds": self.seconds}


def random_state(grid: ConfigGrid, rng: np.random.Generator) -> ConfigField:
    """Normalized random Gaussian wave packet with a chirp (Schwartz class)."""
    x0, p0 = rng.uniform(-2, 2, size=2)
    w = rng.uniform(0.6, 1.6)
    k = rng.uniform(-0.5, 0.5)
    hbar = grid.hbar
    return grid.sample(
        lambda x: np.exp(-((x - x0) ** 2) / (2 * w * w) + 1j * (p0 * x + k * (x - x0) ** 2) / hbar)
    ).normalized()


class _Context:
    def __init__(self, points: int, seed: int):
        self.grid = ConfigGrid.self_dual(points)
        self.pg = PhaseGrid.from_config(self.grid)
        self.window = gaussian_window(self.grid)
        self.rng = np.random.default_rng(seed)
        self.hermite = [hermite_state(n, self.grid) for n in range(6)]


def _parseval(c: _Context) -> float:
    worst = 0.0
    for _ in range(20):
        a, b = random_state(c.grid, c.rng), random_state(c.grid, c.rng)
        Ua, Ub = wavepacket(c.window, a), wavepacket(c.window, b)
        worst = max(worst, abs(inner(Ua, Ub) - inner(a, b)))
        worst = max(worst, (wavepacket_adjoint(c.window, Ua) - a).norm())
    return worst


def _intertwine(c: _Context) -> float:
    X, P = position_operator(c.pg), momentum_operator(c.pg)
    (x,) = c.grid.coords()
    worst = 0.0
    for h in c.hermite:
        Uh = wavepacket(c.window, h)
        worst = max(worst, (wavepacket(c.window, h * x) - X(Uh)).norm())
        dh = spectral_derivative(h, 0) * (-1j * c.grid.hbar)
        worst = max(worst, (wavepacket(c.window, dh) - P(Uh)).norm())
    return worst


def _commutator(c: _Context) -> float:
    U = wavepacket(c.window, c.hermite[1])
    d = c.pg.x.step
    worst = 0.0
    for _ in range(5):
        i0, j0, i1, j1 = c.rng.integers(-8, 9, size=4)
        z0, z1 = np.array([i0 * d, j0 * d]), np.array([i1 * d, j1 * d])
        lhs = hw_phase(z0, 0.0, hw_phase(z1, 0.0, U))
        wedge = z0[1] * z1[0] - z1[1] * z0[0]
        rhs = np.exp(0.5j * wedge / c.pg.hbar) * hw_phase(z0 + z1, 0.0, U).values
        worst = max(worst, float(np.max(np.abs(lhs.values - rhs))))
        # T(z0) T(z1) = exp(i z0 ^ z1 / hbar) T(z1) T(z0)
        swap = hw_phase(z1, 0.0, hw_phase(z0, 0.0, U)).values * np.exp(1j * wedge / c.pg.hbar)
        worst = max(worst, float(np.max(np.abs(lhs.values - swap))))
    # z0 = (1, 0), z1 = (0, 1), hbar = 1: the composition phase is exp(-i/2)
    lhs = hw_phase((1.0, 0.0), 0.0, hw_phase((0.0, 1.0), 0.0, U)).values
    rhs = hw_phase((1.0, 1.0), 0.0, U).values
    mask = np.abs(rhs) > 1e-3 * np.abs(rhs).max()
    worst = max(worst, float(np.max(np.abs(lhs[mask] / rhs[mask] - np.exp(-0.5j)))))
    return worst


def _representation(c: _Context) -> float:
    worst = 0.0
    for _ in range(5):
        psi = random_state(c.grid, c.rng)
        z0 = c.rng.uniform(-1.5, 1.5, size=2)
        lhs = hw_phase(z0, 0.0, wavepacket(c.window, psi))
        rhs = wavepacket(c.window, hw_config(z0, 0.0, psi))
        worst = max(worst, (lhs - rhs).norm())
    return worst


def _ho_eigen(c: _Context) -> float:
    H = ho_operator(1.0, c.pg)
    worst = 0.0
    for n in range(4):
        U = wavepacket(c.window, c.hermite[n])
        rq = inner(H(U), U).real / inner(U, U).real
        worst = max(worst, abs(rq - (n + 0.5)) / (n + 0.5))
    return worst


def _marginals(c: _Context) -> float:
    worst = 0.0
    for psi in (standard_gaussian(c.grid), c.hermite[1]):
        U = wavepacket(c.window, psi)
        worst = max(worst, marginal_x(U, c.window, psi).sup_error, marginal_p(U, c.window, psi).sup_error)
    return worst


def _williamson(c: _Context) -> float:
    worst = 0.0
    for k in range(100):
        n = 1 + k % 2
        S = np.asarray(random_symplectic(n, c.rng))
        lam = c.rng.uniform(0.5, 3.0, size=n)
        M = S.T @ np.diag(np.concatenate([lam, lam])) @ S
        Sw, lw = williamson(M)
        Sw = np.asarray(Sw)
        rec = Sw.T @ np.diag(np.concatenate([lw, lw])) @ Sw
        worst = max(worst, float(np.max(np.abs(rec - M)) / np.max(np.abs(M))))
    return worst


def _conditions(c: _Context) -> float:
    bad = 0
    for k in range(100):
        n = 1 + k % 2
        A = c.rng.normal(size=(2 * n, 2 * n))
        M = A @ A.T + 0.1 * np.eye(2 * n)
        bad += not quantum_conditions(WignerEllipsoid(M)).agree
    return float(bad)


def _range(c: _Context) -> float:
    x, p = c.pg.coords()
    g = np.exp(-(x * x + p * p) / 4)
    worst = 0.0
    for vals in (g, (x - 1j * p) * g):
        F = PhaseField(c.pg, vals)
        worst = max(worst, cr_residual(F), range_residual(c.window, F))
    return worst


def _fourier(c: _Context) -> float:
    Psi = phase_gaussian(GaussianParams.phase(np.diag([1.0, 0.5])), c.pg)
    return (symplectic_fourier(symplectic_fourier(Psi)) - Psi).norm() / Psi.norm()


def _ho_phase(c: _Context) -> float:
    grid = ConfigGrid.self_dual(64)
    pg = PhaseGrid.from_config(grid)
    H = ho_operator(1.0, pg)
    U0 = wavepacket(gaussian_window(grid), standard_gaussian(grid))
    t = np.pi / 2
    n = stable_steps(H, t, 1.0)
    tr = propagate(H, U0, PropagationConfig(t / n, n, record_every=n))
    return (tr.final - U0 * np.exp(-0.5j * t)).norm() / U0.norm()


def _linear_flow(c: _Context) -> float:
    L = LinearHamiltonian(1.0, 2.0)
    U0 = wavepacket(c.window, standard_gaussian(c.grid))
    return max(linear_flow_residual(L, 0.3, U0), float(np.max(hj_residual(L, [0.0, 0.5, 1.0]))))


CHECKS: dict[str, tuple[Callable[[_Context], float], float]] = {
    "parseval": (_parseval, 1e-8),
    "intertwine_erwin4": (_intertwine, 1e-7),
    "commutator_formuco2": (_commutator, 1e-10),
    "representation_unit": (_representation, 1e-7),
    "ho_eigen": (_ho_eigen, 1e-6),
    "marginal_convolution": (_marginals, 1e-8),
    "williamson_reconstruction": (_williamson, 1e-9),
    "quantum_conditions_agree": (_conditions, 0.0),
    "range_characterization": (_range, 1e-7),
    "symplectic_fourier_involution": (_fourier, 1e-10),
    "ho_stationary_phase": (_ho_phase, 1e-5),
    "linear_flow": (_linear_flow, 1e-5),
}


def run_selftest(
    points: int = 128, seed: int = 0, tol_scale: float = 1.0, overrides: dict | None = None
) -> list[CheckResult]:
    """Run every check; ``tol_scale`` and ``overrides`` adjust thresholds (test hooks)."""
    overrides = overrides or {}
    unknown = set(overrides) - set(CHECKS)
    if unknown:
        raise KeyError(f"unknown checks: {sorted(unknown)}")
    ctx = _Context(points, seed)
    out = []
    for name, (fn, thr) in CHECKS.items():
        t = time.perf_counter()
        res = float(fn(ctx))
        out.append(CheckResult(name, res, float(overrides.get(name, thr * tol_scale)), time.perf_counter() - t))
    return out
