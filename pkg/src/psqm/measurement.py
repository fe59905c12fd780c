"""Marginal densities, expectation values and the small-hbar concentration study."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .gaussian import gaussian_window
from .grid import Axis, ConfigField, ConfigGrid, PhaseField, hbar_fourier, inner
from .transforms import WavePacketWindow, wavepacket
from .weyl import WeylSymbol, weyl_quantize_config, weyl_quantize_phase


@dataclass(frozen=True, eq=False)
class MarginalReport:
    """A marginal density on one phase-space axis."""

    axis: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    total_mass: float
    reference: np.ndarray | None = field(default=None, repr=False)
    sup_error: float | None = None

    def __post_init__(self):
        if self.density.min(initial=0.0) < -1e-12:
            raise ValueError("marginal density has negative values")


def density_convolution(f: np.ndarray, g: np.ndarray, ax: Axis) -> np.ndarray:
    """``(f * g)(s) = int f(s - s') g(s') ds'`` for densities sampled on a centred axis."""
    o = ax.origin_index
    full = fftconvolve(f, g)
    return np.real(full[o:o + ax.n]) * ax.step


def _report(axis: Axis, density: np.ndarray, reference: np.ndarray | None) -> MarginalReport:
    mass = float(np.sum(density) * axis.step)
    err = None if reference is None else float(np.max(np.abs(density - reference)))
    return MarginalReport(axis.points, density, mass, reference, err)


def marginal_x(Psi: PhaseField, window: WavePacketWindow | None = None, psi: ConfigField | None = None) -> MarginalReport:
    """``int |Psi(x, p)|^2 dp``; with ``window`` and ``psi`` the reference ``|phi|^2 * |psi|^2`` is filled."""
    pg = Psi.grid
    density = np.sum(np.abs(Psi.values) ** 2, axis=1) * pg.p.step
    ref = None
    if window is not None and psi is not None:
        ref = density_convolution(np.abs(window.phi.values) ** 2, np.abs(psi.values) ** 2, pg.x)
    return _report(pg.x, density, ref)


def marginal_p(Psi: PhaseField, window: WavePacketWindow | None = None, psi: ConfigField | None = None) -> MarginalReport:
    """``int |Psi(x, p)|^2 dx``; the reference is ``|F phi|^2 * |F psi|^2``."""
    pg = Psi.grid
    density = np.sum(np.abs(Psi.values) ** 2, axis=0) * pg.x.step
    ref = None
    if window is not None and psi is not None:
        fphi = hbar_fourier(window.phi).values
        fpsi = hbar_fourier(psi).values
        ref = density_convolution(np.abs(fphi) ** 2, np.abs(fpsi) ** 2, pg.p)
    return _report(pg.p, density, ref)


@dataclass(frozen=True)
class ExpectationReport:
    config: complex
    phase: complex

    @property
    def difference(self) -> float:
        return abs(self.config - self.phase)


def expectation(A: WeylSymbol, window: WavePacketWindow, psi: ConfigField) -> ExpectationReport:
    """``(A_Sch psi, psi)`` next to ``((A_ph U psi, U psi))``."""
    cfg = inner(weyl_quantize_config(A, psi), psi)
    Psi = wavepacket(window, psi)
    op = weyl_quantize_phase(A, Psi.grid)
    return ExpectationReport(cfg, inner(op(Psi), Psi))


@dataclass(frozen=True, eq=False)
class LimitStudy:
    """Sup distances of the marginals from the exact densities, per parameter value."""

    values: tuple
    x_errors: np.ndarray = field(repr=False)
    p_errors: np.ndarray = field(repr=False)

    def _errors(self, components: str):
        return [{"x": self.x_errors, "p": self.p_errors}[c] for c in components]

    def decreasing_in(self, components: str = "xp") -> bool:
        return all(bool(np.all(np.diff(e) < 0)) for e in self._errors(components))

    def increasing_in(self, components: str = "xp") -> bool:
        return all(bool(np.all(np.diff(e) > 0)) for e in self._errors(components))

    @property
    def decreasing(self) -> bool:
        return self.decreasing_in("xp")

    @property
    def increasing(self) -> bool:
        return self.increasing_in("xp")


def _marginal_errors(window: WavePacketWindow, psi: ConfigField) -> tuple[float, float]:
    Psi = wavepacket(window, psi)
    ex = np.max(np.abs(marginal_x(Psi).density - np.abs(psi.values) ** 2))
    ep = np.max(np.abs(marginal_p(Psi).density - np.abs(hbar_fourier(psi).values) ** 2))
    return float(ex), float(ep)


def hbar_limit_study(
    family: Callable[[ConfigGrid], ConfigField],
    hbars: Sequence[float],
    points: int = 256,
    half_width: float = 12.0,
    check: bool = True,
    components: str = "xp",
) -> LimitStudy:
    """Marginal errors with window ``phi_hbar`` as ``hbar`` decreases.

    ``family(grid)`` samples the state on a grid built for each ``hbar``.
    The position grid is fixed, so the momentum spacing scales with
    ``hbar``.  ``check`` asserts a strict decrease of the errors of the
    marginals named in ``components``.  For an ``hbar``-independent state
    only the position marginal converges: ``F psi`` narrows like ``hbar``
    while the window's momentum spread narrows like ``sqrt(hbar)``.
    """
    hbars = tuple(float(h) for h in hbars)
    if any(b >= a for a, b in zip(hbars, hbars[1:])):
        raise ValueError("hbar values must be strictly decreasing")
    errs = []
    for h in hbars:
        grid = ConfigGrid.symmetric(points, half_width, 1, h)
        errs.append(_marginal_errors(gaussian_window(grid), family(grid).normalized()))
    errs = np.array(errs)
    study = LimitStudy(hbars, errs[:, 0], errs[:, 1])
    if check and not study.decreasing_in(components):
        raise AssertionError(f"marginal errors not decreasing: {errs.tolist()}")
    return study


def window_width_study(
    psi: ConfigField, widths: Sequence[float], check: bool = True, components: str = "x"
) -> LimitStudy:
    """Marginal errors at fixed ``hbar`` as the Gaussian window widens.

    Widening the window in position narrows it in momentum, so only the
    position marginal error grows; ``check`` asserts a strict increase for
    the marginals named in ``components``.
    """
    widths = tuple(float(w) for w in widths)
    psi = psi.normalized()
    errs = np.array([_marginal_errors(gaussian_window(psi.grid, w), psi) for w in widths])
    study = LimitStudy(widths, errs[:, 0], errs[:, 1])
    if check and not study.increasing_in(components):
        raise AssertionError(f"marginal errors not increasing: {errs.tolist()}")
    return study
