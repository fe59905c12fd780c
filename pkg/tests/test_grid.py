import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psqm.errors import GridMismatchError
from psqm.gaussian import standard_gaussian
from psqm.grid import (
    Axis,
    ConfigField,
    ConfigGrid,
    PhaseGrid,
    hbar_fourier,
    inner,
    interpolate,
    norm,
    refine,
    spectral_derivative,
)

from conftest import hermite_oracle


def test_axis_requires_power_of_two():
    with pytest.raises(ValueError):
        Axis(100, -1.0, 1.0)


def test_dual_axis_spacing_and_centering():
    g = ConfigGrid.symmetric(128, 10.0, hbar=0.5)
    ax = g.axes[0]
    d = ax.dual(0.5)
    assert d.step == pytest.approx(2 * np.pi * 0.5 / (128 * ax.step))
    assert d.is_centered
    assert d.points[d.origin_index] == pytest.approx(0.0, abs=1e-14)


def test_self_dual_grid_is_square():
    pg = PhaseGrid.self_dual(64)
    assert pg.is_square
    assert pg.x.step == pytest.approx(pg.p.step)
    assert pg.cell == pytest.approx(pg.x.step * pg.p.step)


def test_fields_reject_mismatched_grids():
    a = ConfigGrid.self_dual(64).zeros()
    b = ConfigGrid.self_dual(128).zeros()
    with pytest.raises(GridMismatchError):
        inner(a, b)
    with pytest.raises(GridMismatchError):
        a + b


def test_fourier_of_standard_gaussian_is_itself():
    g = ConfigGrid.self_dual(256)
    phi = standard_gaussian(g)
    F = hbar_fourier(phi)
    assert np.max(np.abs(F.values - phi.values)) < 1e-12


def test_fourier_of_zero_is_zero(grid128):
    assert np.all(hbar_fourier(grid128.zeros()).values == 0)


def test_fourier_shift_theorem():
    g = ConfigGrid.self_dual(256)
    a = 1.0
    shifted = g.sample(lambda x: np.pi**-0.25 * np.exp(-(x - a) ** 2 / 2))
    F = hbar_fourier(shifted)
    (p,) = F.grid.coords()
    ref = np.exp(-1j * p * a) * np.pi**-0.25 * np.exp(-p * p / 2)
    assert np.max(np.abs(F.values - ref)) < 1e-10


def test_fourier_unitary_and_invertible(states128):
    for a, b in zip(states128[::2], states128[1::2]):
        Fa, Fb = hbar_fourier(a), hbar_fourier(b)
        assert abs(inner(Fa, Fb) - inner(a, b)) < 1e-10
        back = hbar_fourier(Fa, "inverse", a.grid)
        assert np.max(np.abs(back.values - a.values)) < 1e-12


def test_fourier_maps_derivative_to_multiplier(states128):
    psi = states128[0]
    lhs = hbar_fourier(spectral_derivative(psi, 0) * (-1j))
    (p,) = lhs.grid.coords()
    rhs = hbar_fourier(psi).values * p
    assert np.max(np.abs(lhs.values - rhs)) < 1e-9


def test_spectral_derivative_of_gaussian():
    g = ConfigGrid.symmetric(256, 10.0)
    f = g.sample(lambda x: np.exp(-x * x / 2))
    (x,) = g.coords()
    assert np.max(np.abs(spectral_derivative(f, 0).values + x * np.exp(-x * x / 2))) < 1e-10


def test_derivative_of_constants_vanishes(pg128):
    c = ConfigGrid.self_dual(64).sample(lambda x: np.ones_like(x) * 3.0)
    assert np.max(np.abs(spectral_derivative(c, 0).values)) < 1e-12
    F = pg128.sample(lambda x, p: np.exp(-x * x))
    assert np.max(np.abs(spectral_derivative(F, 1).values)) < 1e-12


def test_inner_products(grid128):
    phi = standard_gaussian(grid128)
    assert abs(inner(phi, phi) - 1) < 1e-12
    h1 = hermite_oracle(1, grid128)
    assert abs(inner(phi, h1)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
def test_inner_self_is_real_nonnegative(coeffs):
    g = ConfigGrid.self_dual(64)
    c = np.array(coeffs)
    f = ConfigField(g, (c[:4] @ np.vander(g.axes[0].points, 4, increasing=True).T) * (1 + 1j * c[4]) * np.exp(-g.axes[0].points ** 2 / 4))
    v = inner(f, f)
    assert abs(v.imag) < 1e-12 * max(1.0, abs(v))
    assert v.real >= 0
    assert norm(f) == pytest.approx(np.sqrt(v.real))


def test_interpolation_and_refinement_are_band_limited(pg64):
    F = pg64.sample(lambda x, p: np.exp(-((x - 0.3) ** 2 + (p + 0.2) ** 2) / 2))
    pts = np.array([[0.123, -0.456], [1.7, 0.9]])
    exact = np.exp(-((pts[:, 0] - 0.3) ** 2 + (pts[:, 1] + 0.2) ** 2) / 2)
    assert np.max(np.abs(interpolate(F, pts) - exact)) < 1e-10
    R = refine(F, 2)
    assert R.grid.shape == (128, 128)
    assert np.max(np.abs(R.values[::2, ::2] - F.values)) < 1e-12
    x, p = R.grid.coords()
    assert np.max(np.abs(R.values - np.exp(-((x - 0.3) ** 2 + (p + 0.2) ** 2) / 2))) < 1e-10
