"""Heisenberg-Weyl operators and Weyl quantization in both calculi.

On phase space the position and momentum operators are

    X = x/2 + i hbar d/dp,      P = p/2 - i hbar d/dx,

and a polynomial symbol of degree <= 2 is quantized with symmetric
ordering.  Such operators are applied spectrally as a differential stencil.
Arbitrary grid symbols are quantized through a dense kernel built from the
symplectic Fourier transform of the symbol (small grids only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AliasingError, GridMismatchError, KernelSizeError
from .grid import TWO_PI, Axis, ConfigField, PhaseField, PhaseGrid, _diff
from .transforms import symplectic_fourier

DENSE_CAP = 32 * 32
ALIAS_TOL = 1e-6

_POLY_KEYS = ("1", "x", "p", "xx", "xp", "pp")


# ---------------------------------------------------------------- translations


def _shift(values: np.ndarray, axis: int, ax: Axis, d: float) -> np.ndarray:
    """Samples of ``f(s - d)`` along ``axis`` (lattice roll or spectral phase)."""
    k = d / ax.step
    if abs(k - round(k)) < 1e-12:
        return np.roll(values, int(round(k)), axis=axis)
    shape = [1] * values.ndim
    shape[axis] = ax.n
    kk = ax.wavenumbers()
    phase = np.exp(-1j * kk * d)
    # keep the Nyquist mode real so real inputs stay real
    phase[ax.n // 2] = np.cos(kk[ax.n // 2] * d)
    return np.fft.ifft(np.fft.fft(values, axis=axis) * phase.reshape(shape), axis=axis)


def hw_config(z0, t0: float, psi: ConfigField) -> ConfigField:
    """``exp[(i/hbar)(t0 + p0 x - p0 x0 / 2)] psi(x - x0)`` for N = 1.

    The sign of ``t0`` matches :func:`hw_phase`, so both representations
    obey the same multiplication law.
    """
    grid = psi.grid
    if grid.ndim != 1:
        raise ValueError("configuration translations are implemented for N = 1")
    x0, p0 = (float(v) for v in np.asarray(z0, dtype=float).ravel())
    hbar = grid.hbar
    ax = grid.axes[0]
    x = ax.points
    shifted = _shift(psi.values, 0, ax, x0)
    phase = np.exp(1j * (t0 + p0 * x - 0.5 * p0 * x0) / hbar)
    return ConfigField(grid, phase * shifted)


def hw_phase(z0, t0: float, Psi: PhaseField) -> PhaseField:
    """``exp(i t0 / hbar) exp(-i z ^ z0 / 2 hbar) Psi(z - z0)``."""
    pg = Psi.grid
    x0, p0 = (float(v) for v in np.asarray(z0, dtype=float).ravel())
    hbar = pg.hbar
    vals = _shift(Psi.values, 0, pg.x, x0)
    vals = _shift(vals, 1, pg.p, p0)
    x, p = pg.coords()
    wedge = p * x0 - p0 * x
    return PhaseField(pg, vals * np.exp(1j * t0 / hbar - 0.5j * wedge / hbar))


# ---------------------------------------------------------------- symbols


@dataclass(frozen=True, eq=False)
class WeylSymbol:
    """A Weyl symbol ``A(x, p)``.

    ``kind == "polynomial"``: ``A = c + b.z + z.Q z`` with exact coefficients
    (total degree <= 2).  ``kind == "grid"``: samples on a phase grid.
    """

    kind: str
    c: complex = 0.0
    b: np.ndarray = field(default=None, repr=False)
    Q: np.ndarray = field(default=None, repr=False)
    samples: PhaseField | None = field(default=None, repr=False)

    @classmethod
    def polynomial(cls, coeffs: dict) -> "WeylSymbol":
        """From a coefficient map with keys ``1, x, p, xx, xp, pp``."""
        unknown = set(coeffs) - set(_POLY_KEYS)
        if unknown:
            raise ValueError(f"unknown polynomial keys: {sorted(unknown)}")
        g = {k: complex(coeffs.get(k, 0.0)) for k in _POLY_KEYS}
        b = np.array([g["x"], g["p"]])
        Q = np.array([[g["xx"], g["xp"] / 2], [g["xp"] / 2, g["pp"]]])
        return cls("polynomial", g["1"], b, Q)

    @classmethod
    def from_grid(cls, samples: PhaseField) -> "WeylSymbol":
        return cls("grid", samples=samples)

    @classmethod
    def harmonic(cls, omega: float) -> "WeylSymbol":
        """``omega (x^2 + p^2) / 2``."""
        return cls.polynomial({"xx": omega / 2, "pp": omega / 2})

    @property
    def coefficients(self) -> dict:
        if self.kind != "polynomial":
            raise TypeError("grid symbols carry no coefficients")
        return {
            "1": self.c,
            "x": self.b[0],
            "p": self.b[1],
            "xx": self.Q[0, 0],
            "xp": 2 * self.Q[0, 1],
            "pp": self.Q[1, 1],
        }

    @property
    def is_real(self) -> bool:
        if self.kind == "polynomial":
            return bool(
                abs(np.imag(self.c)) == 0 and not np.any(np.imag(self.b)) and not np.any(np.imag(self.Q))
            )
        return bool(not np.any(np.imag(self.samples.values)))

    def sample(self, pg: PhaseGrid) -> PhaseField:
        if self.kind == "grid":
            if not pg.matches(self.samples.grid):
                raise GridMismatchError("symbol sampled on another grid")
            return self.samples
        x, p = pg.coords()
        vals = (
            self.c
            + self.b[0] * x
            + self.b[1] * p
            + self.Q[0, 0] * x * x
            + 2 * self.Q[0, 1] * x * p
            + self.Q[1, 1] * p * p
        )
        return PhaseField(pg, vals * np.ones(pg.shape))

    def compose_linear(self, S) -> "WeylSymbol":
        """The symbol ``z -> A(S z)``."""
        S = np.asarray(S, dtype=float)
        if self.kind == "polynomial":
            return WeylSymbol("polynomial", self.c, S.T @ self.b, S.T @ self.Q @ S)
        raise NotImplementedError("linear pullback implemented for polynomial symbols")


# ---------------------------------------------------------------- configuration side


def _config_poly_apply(A: WeylSymbol, psi: ConfigField) -> np.ndarray:
    grid = psi.grid
    hbar = grid.hbar
    ax = grid.axes[0]
    x = ax.points
    v = psi.values

    def P(f):
        return -1j * hbar * _diff(f, 0, ax, 1)

    out = A.c * v + A.b[0] * x * v + A.b[1] * P(v)
    out = out + A.Q[0, 0] * x * x * v
    out = out + A.Q[1, 1] * (-hbar * hbar) * _diff(v, 0, ax, 2)
    out = out + A.Q[0, 1] * (x * P(v) + P(x * v))
    return out


def _config_grid_apply(A: WeylSymbol, psi: ConfigField) -> np.ndarray:
    pg = A.samples.grid
    if not pg.config_grid.matches(psi.grid):
        raise GridMismatchError("symbol grid does not match the state grid")
    F = symplectic_fourier(A.samples).values
    _check_alias(F)
    hbar = pg.hbar
    xa = pg.x.points
    # g[a, x] = sum_b F[a, b] exp(-i p_b x_a / 2 hbar) exp(i p_b x / hbar)
    H = F * np.exp(-0.5j * np.outer(xa, pg.p.points) / hbar)
    from .grid import dft

    g = dft(H, 1, pg.p, pg.x, 1, hbar)
    n = pg.x.n
    o = pg.x.origin_index
    a = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    rolled = psi.values[(i - (a - o)) % n]
    return np.sum(g * rolled, axis=0) * (pg.cell / (TWO_PI * hbar))


def weyl_quantize_config(A: WeylSymbol, psi: ConfigField) -> ConfigField:
    """Apply the Weyl operator of ``A`` to ``psi`` (N = 1).

    Polynomial symbols use ``x -> x``, ``p -> -i hbar d/dx`` with symmetric
    ordering; grid symbols use a Riemann sum of Heisenberg-Weyl translations
    weighted by the symplectic Fourier transform of the symbol.
    """
    if psi.grid.ndim != 1:
        raise ValueError("configuration-side quantization is implemented for N = 1")
    if A.kind == "polynomial":
        return ConfigField(psi.grid, _config_poly_apply(A, psi))
    return ConfigField(psi.grid, _config_grid_apply(A, psi))


# ---------------------------------------------------------------- phase side


class PhaseOperator:
    """Linear operator on :class:`PhaseField` over a fixed grid."""

    grid: PhaseGrid

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply(self, Psi: PhaseField) -> PhaseField:
        if not self.grid.matches(Psi.grid):
            raise GridMismatchError("operator and field live on different grids")
        return PhaseField(self.grid, self.apply_values(Psi.values))

    __call__ = apply

    def to_dense(self) -> np.ndarray:
        """Matrix acting on row-major flattened fields."""
        size = self.grid.size
        if size > DENSE_CAP:
            raise KernelSizeError(f"dense matrices capped at {DENSE_CAP} points")
        eye = np.eye(size, dtype=complex).reshape((size,) + self.grid.shape)
        cols = np.stack([self.apply_values(e).ravel() for e in eye], axis=1)
        return cols


@dataclass(frozen=True, eq=False)
class StencilOperator(PhaseOperator):
    """``V Psi + sum_a (c_a d_a Psi + d_a(c_a Psi)) / 2 + sum_ab K_ab d_a d_b Psi``.

    ``V`` and ``c_a`` are arrays on the grid (or scalars); ``K`` is a constant
    2x2 matrix.  The symmetric first-order form keeps the discrete operator
    exactly Hermitian when the continuous one is.
    """

    grid: PhaseGrid
    V: np.ndarray = field(repr=False)
    first: tuple = field(repr=False)
    second: np.ndarray = field(repr=False)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        axes = self.grid.axes
        out = self.V * values
        for a, coef in enumerate(self.first):
            if np.all(coef == 0):
                continue
            out = out + 0.5 * (coef * _diff(values, a, axes[a], 1) + _diff(coef * values, a, axes[a], 1))
        K = self.second
        for a in range(2):
            if K[a, a] != 0:
                out = out + K[a, a] * _diff(values, a, axes[a], 2)
        cross = K[0, 1] + K[1, 0]
        if cross != 0:
            out = out + cross * _diff(_diff(values, 0, axes[0], 1), 1, axes[1], 1)
        return out


@dataclass(frozen=True, eq=False)
class DenseOperator(PhaseOperator):
    grid: PhaseGrid
    kernel: np.ndarray = field(repr=False)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        return (self.kernel @ values.ravel()).reshape(self.grid.shape)

    def to_dense(self) -> np.ndarray:
        return self.kernel


def stencil_from_polynomial(A: WeylSymbol, pg: PhaseGrid) -> StencilOperator:
    """Symmetrically ordered quantization with ``X``, ``P`` as above."""
    if A.kind != "polynomial":
        raise TypeError("stencil path needs a polynomial symbol")
    hbar = pg.hbar
    x, p = pg.coords()
    c = A.coefficients
    V = c["1"] + c["x"] * x / 2 + c["p"] * p / 2 + c["xx"] * x * x / 4 + c["xp"] * x * p / 4 + c["pp"] * p * p / 4
    cx = -1j * hbar * (c["p"] + c["pp"] * p + c["xp"] * x / 2)
    cp = 1j * hbar * (c["x"] + c["xx"] * x + c["xp"] * p / 2)
    K = -hbar * hbar * np.array([[c["pp"], -c["xp"] / 2], [-c["xp"] / 2, c["xx"]]], dtype=complex)
    return StencilOperator(pg, V * np.ones(pg.shape), (cx * np.ones(pg.shape), cp * np.ones(pg.shape)), K)


def _check_alias(F: np.ndarray) -> None:
    n0, n1 = F.shape
    i = np.abs(np.arange(n0) - n0 / 2)[:, None]
    k = np.abs(np.arange(n1) - n1 / 2)[None, :]
    outer = (i > 0.4 * n0) | (k > 0.4 * n1)
    total = np.sum(np.abs(F))
    if total > 0 and np.sum(np.abs(F[outer])) / total > ALIAS_TOL:
        raise AliasingError("symplectic Fourier transform of the symbol reaches the grid edge")


def _diff_matrix(ax: Axis) -> np.ndarray:
    eye = np.eye(ax.n)
    return np.real(_diff(eye, 0, ax, 1))


def _wedge_phase(pg: PhaseGrid) -> np.ndarray:
    x, p = (c.ravel() for c in pg.coords())
    wedge = np.outer(p, x) - np.outer(x, p)  # z ^ z' = p x' - p' x
    return np.exp(0.5j * wedge / pg.hbar)


def dense_kernel(A: WeylSymbol, pg: PhaseGrid) -> np.ndarray:
    """Kernel ``K(z, z')`` of the phase-space Weyl operator, times the cell."""
    if pg.size > DENSE_CAP:
        raise KernelSizeError(f"dense kernels capped at {DENSE_CAP} points")
    hbar = pg.hbar
    phase = _wedge_phase(pg)
    if A.kind == "polynomial":
        Dx = np.kron(_diff_matrix(pg.x), np.eye(pg.p.n))
        Dp = np.kron(np.eye(pg.x.n), _diff_matrix(pg.p))
        X = 1j * hbar * Dp
        P = -1j * hbar * Dx
        c = A.coefficients
        eye = np.eye(pg.size)
        Mpoly = c["1"] * eye + c["x"] * X + c["p"] * P
        Mpoly = Mpoly + c["xx"] * (X @ X) + c["pp"] * (P @ P) + c["xp"] * (X @ P)
        K = Mpoly * phase
    else:
        F = symplectic_fourier(A.sample(pg)).values
        _check_alias(F)
        n0, n1 = pg.shape
        o0, o1 = pg.x.origin_index, pg.p.origin_index
        i = np.arange(n0)
        k = np.arange(n1)
        di = (i[:, None] - i[None, :] + o0) % n0
        dk = (k[:, None] - k[None, :] + o1) % n1
        # F(z - z') over flattened (i, k), (i', k')
        Fd = F[di[:, None, :, None], dk[None, :, None, :]].reshape(pg.size, pg.size)
        K = Fd * phase * (pg.cell / (TWO_PI * hbar))
    if A.is_real:
        K = 0.5 * (K + K.conj().T)
    return K


def weyl_quantize_phase(A: WeylSymbol, pg: PhaseGrid, method: str | None = None) -> PhaseOperator:
    """Phase-space Weyl operator of ``A`` on ``pg``.

    ``method`` is ``"stencil"`` (polynomial symbols, default for them) or
    ``"dense"`` (default for grid symbols; at most 32 x 32 points).
    """
    if method is None:
        method = "stencil" if A.kind == "polynomial" else "dense"
    if method == "stencil":
        return stencil_from_polynomial(A, pg)
    if method == "dense":
        return DenseOperator(pg, dense_kernel(A, pg))
    raise ValueError(f"unknown method {method!r}")


def ho_operator(omega: float, pg: PhaseGrid) -> StencilOperator:
    """Phase-space harmonic oscillator for ``omega (x^2 + p^2) / 2``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return stencil_from_polynomial(WeylSymbol.harmonic(omega), pg)


def position_operator(pg: PhaseGrid) -> StencilOperator:
    return stencil_from_polynomial(WeylSymbol.polynomial({"x": 1.0}), pg)


def momentum_operator(pg: PhaseGrid) -> StencilOperator:
    return stencil_from_polynomial(WeylSymbol.polynomial({"p": 1.0}), pg)
