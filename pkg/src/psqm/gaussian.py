"""Gaussian states: constructors, Wigner forms and quantum-state diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .grid import ConfigField, ConfigGrid, PhaseField
from .symplectic import (
    J,
    WignerEllipsoid,
    _check_spd,
    capacity,
    is_symplectic,
    uncertainty_check,
    williamson,
)
from .transforms import WavePacketWindow, range_residual

HERMITE_MAX = 10


def _matrix(a) -> np.ndarray:
    return np.atleast_2d(np.asarray(a, dtype=float))


def _spd(M: np.ndarray, what: str) -> np.ndarray:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{what} must be square")
    if np.max(np.abs(M - M.T)) > 1e-10 * max(1.0, np.max(np.abs(M))):
        raise ValueError(f"{what} must be symmetric")
    M = (M + M.T) / 2
    if np.linalg.eigvalsh(M).min() <= 0:
        raise ValueError(f"{what} must be positive definite")
    return M


@dataclass(frozen=True, eq=False)
class GaussianParams:
    """A configuration Gaussian ``c exp(-(X + iY) x.x / 2 hbar)`` or a phase Gaussian ``exp(-G z.z / 2 hbar)``."""

    kind: str
    X: np.ndarray | None = field(default=None, repr=False)
    Y: np.ndarray | None = field(default=None, repr=False)
    c: complex = 1.0
    G: np.ndarray | None = field(default=None, repr=False)
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if self.kind == "config":
            X = _spd(_matrix(self.X), "X")
            Y = _matrix(self.Y)
            if Y.shape != X.shape or np.max(np.abs(Y - Y.T)) > 1e-12 * max(1.0, np.abs(Y).max()):
                raise ValueError("Y must be symmetric with the shape of X")
            if abs(abs(self.c) - 1.0) > 1e-12:
                raise ValueError("c must have unit modulus")
            object.__setattr__(self, "X", X)
            object.__setattr__(self, "Y", (Y + Y.T) / 2)
        elif self.kind == "phase":
            G = _check_spd(_matrix(self.G), "G")
            if G.shape[0] % 2:
                raise ValueError("G must be 2N x 2N")
            object.__setattr__(self, "G", G)
        else:
            raise ValueError("kind must be 'config' or 'phase'")

    @classmethod
    def config(cls, X, Y=None, c: complex = 1.0, hbar: float = 1.0) -> "GaussianParams":
        X = _matrix(X)
        return cls("config", X=X, Y=np.zeros_like(X) if Y is None else Y, c=c, hbar=hbar)

    @classmethod
    def phase(cls, G, hbar: float = 1.0) -> "GaussianParams":
        return cls("phase", G=G, hbar=hbar)

    @property
    def n(self) -> int:
        return self.X.shape[0] if self.kind == "config" else self.G.shape[0] // 2

    def to_dict(self) -> dict:
        cfg = self.kind == "config"
        return {
            "kind": self.kind,
            "X": self.X.tolist() if cfg else None,
            "Y": self.Y.tolist() if cfg else None,
            "G": None if cfg else self.G.tolist(),
            "hbar": self.hbar,
            "c": [float(np.real(self.c)), float(np.imag(self.c))],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianParams":
        if d["kind"] == "config":
            c = d.get("c", 1.0)
            c = complex(*c) if isinstance(c, (list, tuple)) else complex(c)
            return cls.config(d["X"], d.get("Y"), c, d.get("hbar", 1.0))
        return cls.phase(d["G"], d.get("hbar", 1.0))


def standard_gaussian(grid: ConfigGrid) -> ConfigField:
    """``(pi hbar)^(-N/4) exp(-|x|^2 / 2 hbar)``."""
    hbar = grid.hbar
    r2 = sum(c * c for c in grid.coords())
    return ConfigField(grid, (np.pi * hbar) ** (-grid.ndim / 4) * np.exp(-r2 / (2 * hbar)))


def gaussian_window(grid: ConfigGrid, width: float | None = None) -> WavePacketWindow:
    """Normalized Gaussian window ``exp(-|x|^2 / 2 width^2)``; ``width = sqrt(hbar)`` gives the standard Gaussian."""
    if width is None:
        return WavePacketWindow(standard_gaussian(grid))
    if width <= 0:
        raise ValueError("width must be positive")
    r2 = sum(c * c for c in grid.coords())
    return WavePacketWindow.normalize(ConfigField(grid, np.exp(-r2 / (2 * width * width))))


def hermite_state(n: int, grid: ConfigGrid) -> ConfigField:
    """Normalized Hermite function ``h_n`` of width ``sqrt(hbar)`` (N = 1)."""
    if not 0 <= n <= HERMITE_MAX:
        raise ValueError(f"hermite_state supports 0 <= n <= {HERMITE_MAX}")
    if grid.ndim != 1:
        raise ValueError("hermite_state is implemented for N = 1")
    (x,) = grid.coords()
    u = x / np.sqrt(grid.hbar)
    prev = np.zeros_like(u)
    cur = (np.pi * grid.hbar) ** -0.25 * np.exp(-u * u / 2)
    for k in range(n):
        prev, cur = cur, np.sqrt(2.0 / (k + 1)) * u * cur - np.sqrt(k / (k + 1)) * prev
    return ConfigField(grid, cur)


def fixed_marginal_gaussian(grid: ConfigGrid) -> ConfigField:
    """Chirped Gaussian whose position and momentum densities are both ``pi^(-1/2) exp(-s^2)``.

    Requires ``hbar <= 1``; ``X = hbar`` and ``Y = sqrt(1 - hbar^2)``, so at
    ``hbar = 1`` this is the standard unit-width Gaussian.
    """
    h = grid.hbar
    if h > 1:
        raise ValueError("fixed-marginal family needs hbar <= 1")
    return config_gaussian(GaussianParams.config([[h]], [[np.sqrt(1.0 - h * h)]], hbar=h), grid)


def config_gaussian(params: GaussianParams, grid: ConfigGrid) -> ConfigField:
    """Sample ``c exp(-(X + iY) x.x / 2 hbar)`` and normalize it on the grid."""
    if params.kind != "config":
        raise ValueError("need configuration-space parameters")
    if params.n != grid.ndim:
        raise ValueError("parameter dimension does not match the grid")
    xs = np.stack(grid.coords(), axis=-1)
    Z = params.X + 1j * params.Y
    q = np.einsum("...i,ij,...j->...", xs, Z, xs)
    return ConfigField(grid, params.c * np.exp(-q / (2 * params.hbar))).normalized()


def gaussian_wigner(params: GaussianParams) -> GaussianParams:
    """Matrix ``G`` with ``W psi(z) = (pi hbar)^-N exp(-G z.z / hbar)`` for a configuration Gaussian."""
    if params.kind != "config":
        raise ValueError("need configuration-space parameters")
    X, Y = params.X, params.Y
    Xi = np.linalg.inv(X)
    G = np.block([[X + Y @ Xi @ Y, Y @ Xi], [Xi @ Y, Xi]])
    G = (G + G.T) / 2
    out = GaussianParams.phase(G, params.hbar)
    if not is_symplectic(G, 1e-9):
        raise AssertionError("Wigner matrix of a Gaussian failed the symplectic check")
    return out


def phase_gaussian(params: GaussianParams, pg) -> PhaseField:
    """Sample ``exp(-G z.z / 2 hbar)`` on a phase grid (N = 1)."""
    if params.kind != "phase" or params.n != 1:
        raise ValueError("need N = 1 phase-space parameters")
    x, p = pg.coords()
    G = params.G
    q = G[0, 0] * x * x + 2 * G[0, 1] * x * p + G[1, 1] * p * p
    return PhaseField(pg, np.exp(-q / (2 * params.hbar)).astype(complex))


@dataclass(frozen=True, eq=False)
class RangeCheck:
    residual: float
    rescaled: np.ndarray = field(repr=False)
    symplectic_verdict: bool
    unscaled_verdict: bool


def phase_gaussian_range_check(G, window: WavePacketWindow) -> RangeCheck:
    """Range residual of ``exp(-G z.z / 2 hbar)`` with the symplectic verdicts for ``2G`` and ``G``."""
    pg = window.phase_grid
    params = G if isinstance(G, GaussianParams) else GaussianParams.phase(G, pg.hbar)
    Psi = phase_gaussian(params, pg)
    G2 = 2 * params.G
    return RangeCheck(
        residual=range_residual(window, Psi),
        rescaled=G2,
        symplectic_verdict=is_symplectic(G2),
        unscaled_verdict=is_symplectic(params.G),
    )


def _state_eigenvalues(E: WignerEllipsoid) -> np.ndarray:
    n = E.M.shape[0] // 2
    return np.linalg.eigvalsh(np.linalg.inv(E.M) + 1j * J(n))


def quantum_state_check(E: WignerEllipsoid, tol: float = 1e-10) -> bool:
    """``M^-1 + iJ >= 0`` up to ``tol``: the ellipsoid is the Wigner ellipsoid of a quantum state."""
    return bool(_state_eigenvalues(E).min() >= -tol)


@dataclass(frozen=True)
class QuantumConditions:
    state: bool
    uncertainty: bool
    capacity: bool

    @property
    def agree(self) -> bool:
        return self.state == self.uncertainty == self.capacity


def quantum_conditions(E: WignerEllipsoid, slack: float = 1e-9) -> QuantumConditions:
    """The three equivalent quantum conditions evaluated independently."""
    sigma = 0.5 * E.hbar * np.linalg.inv(E.M)
    return QuantumConditions(
        state=quantum_state_check(E, slack),
        uncertainty=uncertainty_check(sigma, E.hbar, 0.5 * E.hbar * slack).ok,
        capacity=capacity(E) >= np.pi * E.hbar * (1.0 - slack),
    )


def quantum_blob_purify(E: WignerEllipsoid, rtol: float = 1e-8) -> GaussianParams:
    """Pure Gaussian ``G = S^T S`` attached to an ellipsoid of capacity exactly ``pi hbar``."""
    cap = capacity(E)
    if abs(cap - np.pi * E.hbar) > rtol * np.pi * E.hbar:
        raise CapacityError(f"capacity {cap:.12g} differs from pi hbar")
    S, _ = williamson(E.M)
    S = np.asarray(S)
    G = S.T @ S
    return GaussianParams.phase((G + G.T) / 2, E.hbar)
