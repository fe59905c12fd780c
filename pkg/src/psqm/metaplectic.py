"""Metaplectic operators on configuration space and on phase space (N = 1).

Two realizations are provided for a configuration-space operator:

* the quadratic Fourier transform attached to a free symplectic matrix,
  built from the generating function ``W`` and the Maslov integer ``m``;
* the Mehlig-Wilkinson superposition of Heisenberg-Weyl operators weighted
  by the chirp ``exp(i M_S z0.z0 / 2 hbar)``, with index ``nu``.

Replacing configuration translations by phase-space ones in the second
form gives the phase-space metaplectic operators.  The normalization used
throughout is ``(2 pi hbar)^-N |det(S - I)|^(-1/2)``, which makes the
superpositions unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotFreeError, SingularFlowError
from .grid import TWO_PI, Axis, ConfigField, PhaseField, PhaseGrid, _basis, interpolate, refine
from .symplectic import (
    FreeDecomposition,
    SymplecticMatrix,
    free_decomposition,
    symplectic_cayley,
)
from .transforms import wigner_moyal
from .weyl import WeylSymbol, _shift, hw_phase, weyl_quantize_phase


@dataclass(frozen=True, eq=False)
class MetaplecticData:
    """A symplectic matrix with the branch data fixing its metaplectic lift."""

    S: SymplecticMatrix
    free: FreeDecomposition | None = field(default=None, repr=False)
    m: int | None = None
    nu: int | None = None
    cayley: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.S.n

    @property
    def det_s_minus_i(self) -> float:
        return float(np.linalg.det(np.asarray(self.S) - np.eye(2 * self.n)))

    def inverse(self) -> "MetaplecticData":
        """Data of the inverse operator: ``m -> N - m`` and ``nu -> -nu``."""
        m = None if self.m is None else (self.n - self.m) % 4
        nu = None if self.nu is None else (-self.nu) % 4
        return metaplectic_data(self.S.inverse(), m=m, nu=nu)


def metaplectic_data(S, m: int | None = None, nu: int | None = None) -> MetaplecticData:
    """Assemble branch data for ``S``.

    When ``S`` is free, ``m`` defaults to the branch ``arg det B`` in
    ``[0, 2 pi)`` and ``nu`` (if not given) is ``m - Inert(W_xx)``.
    """
    if not isinstance(S, SymplecticMatrix):
        S = SymplecticMatrix(S)
    n = S.n
    free = None
    try:
        free = free_decomposition(S, m)
        m = free.m
    except NotFreeError:
        pass
    cayley = None
    if abs(np.linalg.det(np.asarray(S) - np.eye(2 * n))) > 1e-12:
        cayley = symplectic_cayley(S)
        if nu is None and free is not None:
            nu = free.nu()
    elif nu is not None:
        raise SingularFlowError("index nu given but det(S - I) = 0")
    if free is not None and nu is not None and cayley is not None and nu % 4 != free.nu():
        raise ValueError("nu inconsistent with m - Inert(W_xx)")
    return MetaplecticData(S, free, m, None if nu is None else nu % 4, cayley)


def _require_1d(grid) -> None:
    if grid.ndim != 1:
        raise ValueError("metaplectic operators are implemented for N = 1")


def quadratic_fourier(data: MetaplecticData, psi: ConfigField) -> ConfigField:
    """``(2 pi i hbar)^(-1/2) i^m |det B|^(-1/2) int exp(i W(x, x') / hbar) psi(x') dx'``."""
    if data.free is None:
        raise NotFreeError("quadratic Fourier transform needs a free symplectic matrix")
    grid = psi.grid
    _require_1d(grid)
    hbar = grid.hbar
    ax = grid.axes[0]
    x = ax.points
    fd = data.free
    kernel = np.exp(1j * fd.W(x[:, None], x[None, :]) / hbar)
    pref = (
        np.exp(-0.25j * np.pi)
        / np.sqrt(TWO_PI * hbar)
        * 1j ** fd.m
        / np.sqrt(abs(fd.det_B))
    )
    return ConfigField(grid, pref * ax.step * (kernel @ psi.values))


def _mw_prefactor(data: MetaplecticData, hbar: float) -> complex:
    if data.cayley is None:
        raise SingularFlowError("det(S - I) = 0: no Mehlig-Wilkinson representation")
    if data.nu is None:
        raise ValueError("index nu required")
    return 1j ** data.nu / (TWO_PI * hbar) ** data.n / np.sqrt(abs(data.det_s_minus_i))


def mehlig_wilkinson_config(data: MetaplecticData, psi: ConfigField) -> ConfigField:
    """Chirp-weighted superposition of configuration translations.

    The momentum part of the phase-space integral is done in closed form
    (a Fresnel integral); the position part is a Riemann sum on the grid.
    """
    grid = psi.grid
    _require_1d(grid)
    hbar = grid.hbar
    C = _mw_prefactor(data, hbar)
    (a, b), (_, c) = data.cayley
    ax = grid.axes[0]
    x = ax.points
    if abs(c) < 1e-12:
        # p0 integral is 2 pi hbar delta((b - 1/2) x0 + x)
        if abs(b - 0.5) < 1e-12:
            raise SingularFlowError("degenerate Cayley transform")
        x0 = x / (0.5 - b)
        src = interpolate(psi, (x - x0)[:, None])
        out = C * TWO_PI * hbar / abs(b - 0.5) * np.exp(0.5j * a * x0 * x0 / hbar) * src
        return ConfigField(grid, out)
    alpha = c / (2 * hbar)
    xi = x[:, None]
    x0 = xi - x[None, :]
    beta = (b * x0 + xi - 0.5 * x0) / hbar
    fresnel = np.sqrt(1j * np.pi / alpha + 0j)
    kernel = fresnel * np.exp(0.5j * a * x0 * x0 / hbar - 1j * beta * beta / (4 * alpha))
    return ConfigField(grid, C * ax.step * (kernel @ psi.values))


def chirp_oversampling(data: MetaplecticData, pg: PhaseGrid, limit: int = 4) -> int:
    """Smallest power-of-two refinement that resolves the integrand's chirp.

    For an output point ``z`` the integrand oscillates in ``z0`` with local
    wavenumber about ``(|M_S| |z0| + |z| / 2) / hbar`` on top of the band of
    ``Psi`` (at most the Nyquist wavenumber ``pi / step``).  A lattice sum of
    step ``step / k`` is exact for wavenumbers below ``2 pi k / step``.
    """
    if data.cayley is None:
        raise SingularFlowError("det(S - I) = 0")
    radius = np.hypot(max(abs(pg.x.lo), abs(pg.x.hi)), max(abs(pg.p.lo), abs(pg.p.hi)))
    mnorm = np.linalg.norm(data.cayley, 2)
    need = (mnorm + 0.5) * radius / pg.hbar
    k = 1
    while k < limit and need > np.pi * (2 * k - 1) / max(pg.x.step, pg.p.step):
        k *= 2
    return k


def mehlig_wilkinson_phase(
    data: MetaplecticData, Psi: PhaseField, chunk: int = 16, oversample: int = 1
) -> PhaseField:
    """Phase-space metaplectic operator ``C int exp(i M_S z0.z0 / 2 hbar) T_ph(z0) Psi dz0``.

    ``Psi`` is treated as vanishing outside the grid.  The sum over the
    momentum component of ``z0`` is a linear convolution done by FFT.
    With ``oversample = k`` the Riemann sum runs on a grid ``k`` times finer
    (``Psi`` resampled spectrally) and the result is read back on the
    original lattice.
    """
    if oversample > 1:
        fine = mehlig_wilkinson_phase(data, refine(Psi, oversample), chunk)
        return PhaseField(Psi.grid, fine.values[::oversample, ::oversample])
    pg = Psi.grid
    hbar = pg.hbar
    C = _mw_prefactor(data, hbar)
    (a, b), (_, c) = data.cayley
    x = pg.x.points
    p = pg.p.points
    n, m = pg.shape
    dp = pg.p.step
    # p0 = d * dp for d in [-(m-1), m-1], stored at index d mod 2m
    d = np.fft.fftfreq(2 * m, 1.0 / (2 * m))
    p0 = d * dp
    Psi_hat = np.fft.fft(Psi.values, n=2 * m, axis=1)  # (j, 2m)
    out = np.empty((n, m), dtype=complex)
    for s in range(0, n, chunk):
        xi = x[s:s + chunk]
        x0 = xi[:, None] - x[None, :]  # (i, j)
        ker = np.exp(
            (0.5j / hbar)
            * (c * p0[None, None, :] ** 2 + 2 * b * x0[:, :, None] * p0[None, None, :] + p0[None, None, :] * xi[:, None, None])
        )
        conv = np.fft.ifft(np.fft.fft(ker, axis=2) * Psi_hat[None, :, :], axis=2)[:, :, :m]
        weight = np.exp((0.5j / hbar) * (a * x0[:, :, None] ** 2 - p[None, None, :] * x0[:, :, None]))
        out[s:s + chunk] = np.sum(weight * conv, axis=1)
    return PhaseField(pg, C * pg.cell * out)


def mehlig_wilkinson_phase_product(data: MetaplecticData, Psi: PhaseField) -> PhaseField:
    """The same operator written as ``C' int T_ph(S z) T_ph(-z) Psi dz``.

    ``C' = (2 pi hbar)^-N i^nu |det(S - I)|^(1/2)``.  The integral is a
    Riemann sum over the lattice, each term a composition of two
    translations acting on a zero-padded canvas so that nothing wraps
    around.  The sum resolves the chirp ``exp(i Sz ^ z / 2 hbar)`` hidden in
    the product only on grids fine enough for it; rotations by a quarter
    turn map the lattice to itself and are the intended use.
    """
    pg = Psi.grid
    hbar = pg.hbar
    if data.cayley is None:
        raise SingularFlowError("det(S - I) = 0")
    C = 1j ** data.nu / (TWO_PI * hbar) ** data.n * np.sqrt(abs(data.det_s_minus_i))
    S = np.asarray(data.S)
    n, m = pg.shape
    bx = Axis(2 * n, pg.x.lo - n * pg.x.step / 2, pg.x.hi + n * pg.x.step / 2)
    bp = Axis(2 * m, pg.p.lo - m * pg.p.step / 2, pg.p.hi + m * pg.p.step / 2)
    X, P = np.meshgrid(bx.points, bp.points, indexing="ij")
    canvas = np.zeros((2 * n, 2 * m), dtype=complex)
    canvas[n // 2:n // 2 + n, m // 2:m // 2 + m] = Psi.values

    def translate(vals, z0):
        # T_ph(z0) on the canvas
        vals = _shift(_shift(vals, 0, bx, z0[0]), 1, bp, z0[1])
        return vals * np.exp(-0.5j * (P * z0[0] - z0[1] * X) / hbar)

    acc = np.zeros_like(canvas)
    reach = 0.5 * min(bx.length, bp.length)
    x, p = pg.coords()
    for z in zip(x.ravel(), p.ravel()):
        z = np.array(z)
        w = (S - np.eye(2)) @ z
        if abs(w[0]) > reach or abs(w[1]) > reach:
            continue
        acc += translate(translate(canvas, -z), S @ z)
    out = acc[n // 2:n // 2 + n, m // 2:m // 2 + m]
    return PhaseField(pg, C * pg.cell * out)


def scale_state(psi: ConfigField, lam: float) -> ConfigField:
    """``|lam|^(-1/2) psi(x / lam)``: the lift of ``diag(lam, 1/lam)``."""
    ax = psi.grid.axes[0]
    s = ax.points / lam
    vals = interpolate(psi, s[:, None]) * _inside(ax, s)
    return ConfigField(psi.grid, vals / np.sqrt(abs(lam)))


def chirp_state(psi: ConfigField, k: float) -> ConfigField:
    """``exp(i k x^2 / 2 hbar) psi``: the lift of the shear ``[[1, 0], [k, 1]]``."""
    x = psi.grid.axes[0].points
    return ConfigField(psi.grid, np.exp(0.5j * k * x * x / psi.grid.hbar) * psi.values)


def metaplectic_apply(data: MetaplecticData, psi: ConfigField) -> ConfigField:
    """Apply a metaplectic lift of ``S`` (up to sign).

    Free matrices use the quadratic Fourier transform; matrices with
    ``B = 0`` are factored as a shear times a scaling.
    """
    _require_1d(psi.grid)
    if data.free is not None:
        return quadratic_fourier(data, psi)
    (A, _), (C, _) = np.asarray(data.S)
    # S = [[1, 0], [C/A, 1]] @ diag(A, 1/A)
    return chirp_state(scale_state(psi, A), C / A)


def _inside(ax, s: np.ndarray) -> np.ndarray:
    return (s >= ax.lo - 0.5 * ax.step) & (s <= ax.hi - 0.5 * ax.step)


def pullback(W: PhaseField, S) -> PhaseField:
    """``W o S^-1`` by trigonometric interpolation; zero where ``S^-1 z`` leaves the grid."""
    S = np.asarray(S, dtype=float)
    Sinv = np.linalg.inv(S)
    pg = W.grid
    if np.count_nonzero(S - np.diag(np.diag(S))) == 0:
        # separable: interpolate each axis in turn
        sx = Sinv[0, 0] * pg.x.points
        sp = Sinv[1, 1] * pg.p.points
        coef = np.fft.fft(W.values, axis=0) / pg.x.n
        vals = _basis(pg.x, sx) @ coef
        coef = np.fft.fft(vals, axis=1) / pg.p.n
        vals = coef @ _basis(pg.p, sp).T
        vals = vals * (_inside(pg.x, sx)[:, None] & _inside(pg.p, sp)[None, :])
        return PhaseField(pg, vals)
    x, p = pg.coords()
    px = Sinv[0, 0] * x + Sinv[0, 1] * p
    pp = Sinv[1, 0] * x + Sinv[1, 1] * p
    vals = interpolate(W, np.stack([px, pp], axis=-1))
    return PhaseField(pg, vals * (_inside(pg.x, px) & _inside(pg.p, pp)))


def wigner_covariance_residual(data: MetaplecticData, psi: ConfigField, phi: ConfigField) -> float:
    """``||W(S psi, S phi) - W(psi, phi) o S^-1|| / ||W(psi, phi)||``.

    ``W`` here is the cross-Wigner function (second argument conjugated).
    """
    Spsi = metaplectic_apply(data, psi)
    Sphi = metaplectic_apply(data, phi)
    lhs = wigner_moyal(Spsi, Sphi.conj())
    W0 = wigner_moyal(psi, phi.conj())
    rhs = pullback(W0, data.S)
    return (lhs - rhs).norm() / W0.norm()


def _resolved_mw(data: MetaplecticData, Psi: PhaseField) -> PhaseField:
    return mehlig_wilkinson_phase(data, Psi, oversample=chirp_oversampling(data, Psi.grid))


def covariance_residual(data: MetaplecticData, A: WeylSymbol, probes) -> float:
    """Max over probes of ``||(A o S)_ph Psi - S_ph^-1 A_ph S_ph Psi|| / ||Psi||``."""
    if data.cayley is None:
        raise SingularFlowError("det(S - I) = 0")
    inv = data.inverse()
    worst = 0.0
    for Psi in probes:
        pg = Psi.grid
        AS = weyl_quantize_phase(A.compose_linear(data.S), pg)
        Aop = weyl_quantize_phase(A, pg)
        lhs = AS(Psi)
        rhs = _resolved_mw(inv, Aop(_resolved_mw(data, Psi)))
        worst = max(worst, (lhs - rhs).norm() / Psi.norm())
    return worst


def conjugation_residual(data: MetaplecticData, z0, probes) -> float:
    """Max over probes of ``||S_ph T_ph(z0) S_ph^-1 Psi - T_ph(S z0) Psi|| / ||Psi||``."""
    inv = data.inverse()
    Sz0 = np.asarray(data.S) @ np.asarray(z0, dtype=float)
    worst = 0.0
    for Psi in probes:
        lhs = _resolved_mw(data, hw_phase(z0, 0.0, _resolved_mw(inv, Psi)))
        rhs = hw_phase(Sz0, 0.0, Psi)
        worst = max(worst, (lhs - rhs).norm() / Psi.norm())
    return worst
