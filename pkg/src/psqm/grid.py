"""Periodic configuration and phase-space grids.

Every other module works on the two field types defined here:

* :class:`ConfigField` -- samples of a wavefunction ``psi(x)`` on a
  :class:`ConfigGrid` (one or two axes).
* :class:`PhaseField` -- samples of ``Psi(x, p)`` on a :class:`PhaseGrid`
  (one degree of freedom, i.e. a 2D array indexed ``[x, p]``).

Grids are uniform and periodic.  The momentum axis dual to a position axis
with ``M`` points and spacing ``dx`` has spacing ``dp = 2 pi hbar / (M dx)``
and is centred on zero, so that discrete Fourier sums are exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatchError

TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Axis:
    """A uniform periodic axis ``lo + j * step``, ``j = 0..n-1``."""

    n: int
    lo: float
    hi: float

    def __post_init__(self):
        if not _is_power_of_two(int(self.n)):
            raise ValueError(f"axis size must be a power of two, got {self.n}")
        if not self.hi > self.lo:
            raise ValueError("axis upper bound must exceed lower bound")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.n

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def points(self) -> np.ndarray:
        return self.lo + self.step * np.arange(self.n)

    @property
    def origin_index(self) -> int:
        """Index of the lattice point at 0 (requires a lattice-aligned axis)."""
        k = -self.lo / self.step
        if abs(k - round(k)) > 1e-9:
            raise GridMismatchError("axis is not aligned with the origin")
        return int(round(k))

    @property
    def is_centered(self) -> bool:
        return abs(self.lo + self.hi) <= 1e-12 * self.length

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return TWO_PI * np.fft.fftfreq(self.n, d=self.step)

    def dual(self, hbar: float) -> "Axis":
        """Centred momentum axis conjugate to this one."""
        dp = TWO_PI * hbar / (self.n * self.step)
        half = 0.5 * self.n * dp
        return Axis(self.n, -half, half)

    def matches(self, other: "Axis", tol: float = 1e-12) -> bool:
        scale = max(abs(self.lo), abs(self.hi), 1.0)
        return (
            self.n == other.n
            and abs(self.lo - other.lo) <= tol * scale
            and abs(self.hi - other.hi) <= tol * scale
        )


@dataclass(frozen=True)
class ConfigGrid:
    """Configuration-space grid with ``points`` samples on each axis."""

    points: int
    bounds: tuple
    hbar: float = 1.0

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if not bounds or len(bounds) > 2:
            raise ValueError("grid path supports one or two configuration axes")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        for lo, hi in bounds:
            Axis(int(self.points), lo, hi)

    @classmethod
    def symmetric(cls, points: int, half_width: float, ndim: int = 1, hbar: float = 1.0):
        return cls(points, ((-half_width, half_width),) * ndim, hbar)

    @classmethod
    def self_dual(cls, points: int = 256, ndim: int = 1, hbar: float = 1.0):
        """Centred grid whose dual momentum grid coincides with itself."""
        half = 0.5 * np.sqrt(TWO_PI * hbar * points)
        return cls.symmetric(points, half, ndim, hbar)

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    @property
    def axes(self) -> tuple:
        return tuple(Axis(self.points, lo, hi) for lo, hi in self.bounds)

    @property
    def shape(self) -> tuple:
        return (self.points,) * self.ndim

    @property
    def cell(self) -> float:
        return float(np.prod([a.step for a in self.axes]))

    def coords(self) -> list:
        """Coordinate arrays broadcast to the grid shape (``ij`` indexing)."""
        return np.meshgrid(*[a.points for a in self.axes], indexing="ij")

    def dual(self) -> "ConfigGrid":
        axes = [a.dual(self.hbar) for a in self.axes]
        return ConfigGrid(self.points, tuple((a.lo, a.hi) for a in axes), self.hbar)

    def sample(self, fn: Callable) -> "ConfigField":
        return ConfigField(self, fn(*self.coords()))

    def zeros(self) -> "ConfigField":
        return ConfigField(self, np.zeros(self.shape, dtype=complex))

    def matches(self, other: "ConfigGrid") -> bool:
        return (
            isinstance(other, ConfigGrid)
            and self.ndim == other.ndim
            and abs(self.hbar - other.hbar) <= 1e-14 * self.hbar
            and all(a.matches(b) for a, b in zip(self.axes, other.axes))
        )


@dataclass(frozen=True)
class PhaseGrid:
    """Phase-space grid for one degree of freedom, arrays indexed ``[x, p]``."""

    x: Axis
    p: Axis
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def from_config(cls, grid: ConfigGrid) -> "PhaseGrid":
        """Position axis of ``grid`` paired with its dual momentum axis."""
        if grid.ndim != 1:
            raise ValueError("phase-space grids are implemented for N = 1 only")
        ax = grid.axes[0]
        return cls(ax, ax.dual(grid.hbar), grid.hbar)

    @classmethod
    def self_dual(cls, points: int = 128, hbar: float = 1.0) -> "PhaseGrid":
        return cls.from_config(ConfigGrid.self_dual(points, 1, hbar))

    @property
    def shape(self) -> tuple:
        return (self.x.n, self.p.n)

    @property
    def size(self) -> int:
        return self.x.n * self.p.n

    @property
    def cell(self) -> float:
        return self.x.step * self.p.step

    @property
    def axes(self) -> tuple:
        return (self.x, self.p)

    @property
    def config_grid(self) -> ConfigGrid:
        return ConfigGrid(self.x.n, ((self.x.lo, self.x.hi),), self.hbar)

    @property
    def is_square(self) -> bool:
        """Centred position axis whose dual is the momentum axis."""
        return self.x.is_centered and self.x.dual(self.hbar).matches(self.p)

    def coords(self) -> tuple:
        return np.meshgrid(self.x.points, self.p.points, indexing="ij")

    def sample(self, fn: Callable) -> "PhaseField":
        x, p = self.coords()
        return PhaseField(self, fn(x, p))

    def zeros(self) -> "PhaseField":
        return PhaseField(self, np.zeros(self.shape, dtype=complex))

    def matches(self, other: "PhaseGrid") -> bool:
        return (
            isinstance(other, PhaseGrid)
            and abs(self.hbar - other.hbar) <= 1e-14 * self.hbar
            and self.x.matches(other.x)
            and self.p.matches(other.p)
        )


class _Field:
    grid: object
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def _check(self, other):
        if type(other) is not type(self) or not self.grid.matches(other.grid):
            raise GridMismatchError("fields live on different grids")

    def with_values(self, values):
        return type(self)(self.grid, values)

    def __add__(self, other):
        self._check(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def conj(self):
        return self.with_values(np.conj(self.values))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell))

    def normalized(self):
        return self * (1.0 / self.norm())


@dataclass(frozen=True, eq=False)
class ConfigField(_Field):
    grid: ConfigGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _Field.__post_init__(self)


@dataclass(frozen=True, eq=False)
class PhaseField(_Field):
    grid: PhaseGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _Field.__post_init__(self)


def dft(values: np.ndarray, axis: int, src: Axis, dst: Axis, sign: int, hbar: float) -> np.ndarray:
    """Raw sums ``sum_j exp(sign * i * q_k * s_j / hbar) * v_j`` along ``axis``.

    ``s_j`` runs over ``src`` and ``q_k`` over ``dst``; the two axes must be
    reciprocal (``n * ds * dq = 2 pi hbar``).  No quadrature weights applied.
    """
    n = src.n
    if dst.n != n or abs(n * src.step * dst.step / (TWO_PI * hbar) - 1.0) > 1e-10:
        raise GridMismatchError("axes are not reciprocal")
    v = np.moveaxis(np.asarray(values, dtype=complex), axis, -1)
    j = np.arange(n)
    w = v * np.exp(sign * 1j * dst.lo * src.step * j / hbar)
    if sign < 0:
        s = np.fft.fft(w, axis=-1)
    else:
        s = np.fft.ifft(w, axis=-1) * n
    post = np.exp(sign * 1j * src.lo * (dst.lo + dst.step * j) / hbar)
    return np.moveaxis(s * post, -1, axis)


def hbar_fourier(psi: ConfigField, direction: str = "forward", grid: ConfigGrid | None = None) -> ConfigField:
    """Unitary transform ``(2 pi hbar)^(-N/2) int exp(-+ i p.x / hbar) psi(x) dx``.

    The forward transform lands on the dual (momentum) grid.  The inverse
    lands on ``grid`` when given (it must be reciprocal to the input grid),
    otherwise on the centred dual of the input grid.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    src = psi.grid
    hbar = src.hbar
    if direction == "forward" or grid is None:
        out = src.dual()
    else:
        out = grid
        if out.ndim != src.ndim or out.points != src.points:
            raise GridMismatchError("target grid incompatible with input")
    sign = -1 if direction == "forward" else 1
    vals = psi.values
    for ax, (a, b) in enumerate(zip(src.axes, out.axes)):
        vals = dft(vals, ax, a, b, sign, hbar) * (a.step / np.sqrt(TWO_PI * hbar))
    return ConfigField(out, vals)


def _diff(values: np.ndarray, axis: int, ax: Axis, order: int) -> np.ndarray:
    k = ax.wavenumbers()
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[ax.n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = ax.n
    spec = np.fft.fft(values, axis=axis) * mult.reshape(shape)
    return np.fft.ifft(spec, axis=axis)


def spectral_derivative(f, axis: int, order: int = 1):
    """Derivative along ``axis`` by multiplication with ``(i k)^order``.

    For a :class:`PhaseField`, axis 0 is ``x`` and axis 1 is ``p``.
    """
    axes = f.grid.axes
    if not 0 <= axis < len(axes):
        raise IndexError(f"axis {axis} out of range")
    return f.with_values(_diff(f.values, axis, axes[axis], order))


def inner(f, g) -> complex:
    """Riemann-sum inner product, conjugate-linear in the second slot."""
    f._check(g)
    return complex(np.sum(f.values * np.conj(g.values)) * f.grid.cell)


def norm(f) -> float:
    return f.norm()


def _basis(ax: Axis, s: np.ndarray) -> np.ndarray:
    """Trigonometric basis ``exp(i k (s - lo))`` at points ``s``; shape ``s.shape + (n,)``."""
    k = ax.wavenumbers()
    arg = np.multiply.outer(np.asarray(s, dtype=float) - ax.lo, k)
    out = np.exp(1j * arg)
    # the Nyquist mode is interpolated by a cosine so real data stays real
    out[..., ax.n // 2] = np.cos(arg[..., ax.n // 2])
    return out


def interpolate(f, points) -> np.ndarray:
    """Band-limited (trigonometric) interpolation of a 1D or 2D field.

    ``points`` has shape ``(..., d)`` with ``d`` the number of axes.  The
    field is treated as periodic.
    """
    pts = np.asarray(points, dtype=float)
    axes = f.grid.axes
    if pts.shape[-1] != len(axes):
        raise ValueError("point dimension does not match the field")
    flat = pts.reshape(-1, len(axes))
    coef = np.fft.fftn(f.values) / f.values.size
    if len(axes) == 1:
        out = _basis(axes[0], flat[:, 0]) @ coef
    else:
        out = np.empty(flat.shape[0], dtype=complex)
        chunk = 4096
        for s in range(0, flat.shape[0], chunk):
            ex = _basis(axes[0], flat[s:s + chunk, 0])
            ep = _basis(axes[1], flat[s:s + chunk, 1])
            out[s:s + chunk] = np.sum((ex @ coef) * ep, axis=1)
    return out.reshape(pts.shape[:-1])


def _pad_axis(spec: np.ndarray, axis: int, new_n: int) -> np.ndarray:
    """Zero-pad an FFT-ordered spectrum along ``axis``, splitting the Nyquist bin."""
    n = spec.shape[axis]
    h = n // 2
    shape = list(spec.shape)
    shape[axis] = new_n
    out = np.zeros(shape, dtype=complex)
    src = np.moveaxis(spec, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    dst[:h] = src[:h]
    dst[new_n - h + 1:] = src[h + 1:]
    dst[h] = 0.5 * src[h]
    dst[new_n - h] = 0.5 * src[h]
    return out


def refine(f, k: int):
    """Band-limited resampling of a field onto ``k`` times as many points per axis.

    The refined grid has the same bounds; every ``k``-th refined sample
    coincides with an original sample.
    """
    if k == 1:
        return f
    if k < 1 or not _is_power_of_two(k):
        raise ValueError("refinement factor must be a power of two")
    spec = np.fft.fftn(f.values)
    for axis, ax in enumerate(f.grid.axes):
        spec = _pad_axis(spec, axis, ax.n * k)
    vals = np.fft.ifftn(spec) * k ** len(f.grid.axes)
    axes = [Axis(ax.n * k, ax.lo, ax.hi) for ax in f.grid.axes]
    if isinstance(f, PhaseField):
        return PhaseField(PhaseGrid(axes[0], axes[1], f.grid.hbar), vals)
    return ConfigField(ConfigGrid(f.grid.points * k, f.grid.bounds, f.grid.hbar), vals)
