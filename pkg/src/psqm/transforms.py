"""Wigner-Moyal transform, wave-packet transform and symplectic Fourier transform.

All phase-space fields produced here live on ``PhaseGrid.from_config`` of
the input configuration grid: the position axis of the input paired with
its centred dual momentum axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .grid import TWO_PI, Axis, ConfigField, PhaseField, PhaseGrid, dft, spectral_derivative


@dataclass(frozen=True)
class WavePacketWindow:
    """A normalized window function ``phi``."""

    phi: ConfigField

    def __post_init__(self):
        if self.phi.grid.ndim != 1:
            raise ValueError("wave-packet windows are implemented for N = 1")
        if abs(self.phi.norm() - 1.0) > 1e-10:
            raise ValueError(f"window must be normalized, norm = {self.phi.norm()}")
        if not self.phi.grid.axes[0].is_centered:
            raise GridMismatchError("wave-packet transform needs a centred grid")

    @classmethod
    def normalize(cls, phi: ConfigField) -> "WavePacketWindow":
        return cls(phi.normalized())

    @property
    def grid(self):
        return self.phi.grid

    @property
    def phase_grid(self) -> PhaseGrid:
        return PhaseGrid.from_config(self.phi.grid)

    def lag_matrix(self) -> np.ndarray:
        """``phi(x_i - x_j)`` as an ``M x M`` array (periodic)."""
        ax = self.phi.grid.axes[0]
        o = ax.origin_index
        idx = np.arange(ax.n)
        return self.phi.values[(idx[:, None] - idx[None, :] + o) % ax.n]


def _upsample2(v: np.ndarray) -> np.ndarray:
    """Band-limited interpolation onto a grid of half the spacing."""
    n = v.size
    spec = np.fft.fft(v)
    pad = np.zeros(2 * n, dtype=complex)
    h = n // 2
    pad[:h] = spec[:h]
    pad[-h + 1:] = spec[h + 1:]
    # split the Nyquist bin symmetrically
    pad[h] = 0.5 * spec[h]
    pad[-h] = 0.5 * spec[h]
    return np.fft.ifft(pad) * 2


def wigner_moyal(psi: ConfigField, phi: ConfigField) -> PhaseField:
    """``(2 pi hbar)^-1 int exp(-i p y / hbar) psi(x + y/2) phi(x - y/2) dy``.

    ``phi`` enters unconjugated; pass ``phi.conj()`` for the usual
    cross-Wigner function.
    """
    psi._check(phi)
    grid = psi.grid
    if grid.ndim != 1:
        raise ValueError("Wigner-Moyal transform is implemented for N = 1")
    hbar = grid.hbar
    ax = grid.axes[0]
    n = ax.n
    A = _upsample2(psi.values)
    B = _upsample2(phi.values)
    i = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    # the states vanish outside the window; no periodic wrap of x +- y/2
    A = np.concatenate([A, [0.0]])
    B = np.concatenate([B, [0.0]])

    def take(arr, idx):
        return arr[np.where((idx >= 0) & (idx < 2 * n), idx, 2 * n)]

    # y = m dx and y = (m - n) dx fold onto the same momentum samples
    g = take(A, 2 * i + m) * take(B, 2 * i - m)
    g = g + take(A, 2 * i + m - n) * take(B, 2 * i - m + n)
    y_axis = Axis(n, 0.0, n * ax.step)
    pgrid = PhaseGrid.from_config(grid)
    W = dft(g, 1, y_axis, pgrid.p, -1, hbar) * (ax.step / (TWO_PI * hbar))
    return PhaseField(pgrid, W)


def wavepacket(window: WavePacketWindow, psi: ConfigField) -> PhaseField:
    """``U_phi psi(x, p) = (2 pi hbar)^(-1/2) e^{ipx/2hbar} int e^{-ipx'/hbar} psi(x') phi(x - x') dx'``."""
    if not window.grid.matches(psi.grid):
        raise GridMismatchError("window and state live on different grids")
    pg = window.phase_grid
    hbar = pg.hbar
    V = window.lag_matrix() * psi.values[None, :]
    S = dft(V, 1, pg.x, pg.p, -1, hbar)
    x, p = pg.coords()
    Psi = S * np.exp(0.5j * p * x / hbar) * (pg.x.step / np.sqrt(TWO_PI * hbar))
    return PhaseField(pg, Psi)


def wavepacket_adjoint(window: WavePacketWindow, Psi: PhaseField) -> ConfigField:
    """Exact adjoint of :func:`wavepacket` for the grid inner products."""
    pg = window.phase_grid
    if not pg.matches(Psi.grid):
        raise GridMismatchError("field does not live on the window's phase grid")
    hbar = pg.hbar
    x, p = pg.coords()
    G = Psi.values * np.exp(-0.5j * p * x / hbar)
    H = dft(G, 1, pg.p, pg.x, 1, hbar) * pg.p.step
    out = np.sum(np.conj(window.lag_matrix()) * H, axis=0)
    return ConfigField(window.grid, out * (pg.x.step / np.sqrt(TWO_PI * hbar)))


def project(window: WavePacketWindow, Psi: PhaseField) -> PhaseField:
    """Orthogonal projection ``U U*`` onto the range of the window's transform."""
    return wavepacket(window, wavepacket_adjoint(window, Psi))


def range_residual(window: WavePacketWindow, Psi: PhaseField) -> float:
    """``||P Psi - Psi|| / ||Psi||``; zero exactly on the range."""
    nrm = Psi.norm()
    if nrm == 0:
        raise ValueError("range residual undefined for the zero field")
    return (project(window, Psi) - Psi).norm() / nrm


def symplectic_fourier(Psi: PhaseField) -> PhaseField:
    """``(2 pi hbar)^-1 int exp(-i z ^ z' / hbar) Psi(z') dz'`` (an involution)."""
    pg = Psi.grid
    if not pg.is_square:
        raise GridMismatchError("symplectic Fourier transform needs a square phase grid")
    hbar = pg.hbar
    # exp(-i p x'/hbar) over x', exp(+i x p'/hbar) over p'
    T = dft(Psi.values, 0, pg.x, pg.p, -1, hbar)
    T = dft(T, 1, pg.p, pg.x, 1, hbar)
    return PhaseField(pg, T.T * (pg.cell / (TWO_PI * hbar)))


def cr_residual(Psi: PhaseField, radius: float | None = None) -> float:
    """Cauchy-Riemann defect ``||(d_x - i d_p)[exp(|z|^2/4hbar) Psi]|| / ||Psi||``.

    The norm is taken over the disc ``|z| <= radius`` (default ``4 sqrt(hbar)``)
    where the growing exponential does not amplify boundary noise.
    """
    pg = Psi.grid
    hbar = pg.hbar
    if radius is None:
        radius = 4.0 * np.sqrt(hbar)
    nrm = Psi.norm()
    if nrm == 0:
        raise ValueError("CR residual undefined for the zero field")
    x, p = pg.coords()
    r2 = x * x + p * p
    dx = spectral_derivative(Psi, 0).values
    dp = spectral_derivative(Psi, 1).values
    inner_part = dx - 1j * dp + (x - 1j * p) * Psi.values / (2.0 * hbar)
    mask = r2 <= radius * radius
    defect = np.exp(r2[mask] / (4.0 * hbar)) * inner_part[mask]
    return float(np.sqrt(np.sum(np.abs(defect) ** 2) * pg.cell) / nrm)
