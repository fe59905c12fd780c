import numpy as np
import pytest

from psqm.errors import GridMismatchError
from psqm.gaussian import gaussian_window, hermite_state, standard_gaussian
from psqm.grid import ConfigField, ConfigGrid, PhaseField, PhaseGrid, inner
from psqm.transforms import (
    WavePacketWindow,
    cr_residual,
    range_residual,
    symplectic_fourier,
    wavepacket,
    wavepacket_adjoint,
    wigner_moyal,
)


def test_window_must_be_normalized(grid64):
    with pytest.raises(ValueError):
        WavePacketWindow(standard_gaussian(grid64) * 2.0)
    assert abs(WavePacketWindow.normalize(standard_gaussian(grid64) * 2.0).phi.norm() - 1) < 1e-12


def test_window_needs_centred_grid():
    g = ConfigGrid(64, ((-4.0, 12.0),))
    phi = g.sample(lambda x: np.exp(-((x - 4) ** 2))).normalized()
    with pytest.raises(GridMismatchError):
        WavePacketWindow(phi)


def test_wigner_of_standard_gaussian(grid128, pg128):
    phi = standard_gaussian(grid128)
    W = wigner_moyal(phi, phi.conj())
    x, p = pg128.coords()
    ref = np.exp(-(x * x + p * p)) / np.pi
    mask = ref > 1e-6 * ref.max()
    assert np.max(np.abs(W.values[mask] - ref[mask]) / ref[mask]) < 1e-8
    assert np.max(np.abs(W.values - ref)) < 1e-12


def test_wigner_parity_value_for_h1(grid128, pg128, hermites128):
    h1 = hermites128[1]
    W = wigner_moyal(h1, h1.conj())
    i0, j0 = pg128.x.origin_index, pg128.p.origin_index
    assert W.values[i0, j0] == pytest.approx(-1 / np.pi, abs=1e-10)


def test_wigner_integrates_to_norm(states128):
    for psi in states128[:3]:
        psi = psi * 1.7
        W = wigner_moyal(psi, psi.conj())
        assert abs(np.sum(W.values) * W.grid.cell - psi.norm() ** 2) < 1e-8


def test_moyal_product_formula(states128):
    a, b, c, d = states128[:4]
    lhs = inner(wigner_moyal(a, b.conj()), wigner_moyal(c, d.conj()))
    rhs = inner(a, c) * np.conj(inner(b, d)) / (2 * np.pi)
    assert abs(lhs - rhs) < 1e-7 * max(abs(rhs), 1e-3)


def test_wavepacket_of_standard_gaussian(grid128, pg128, window128):
    U = wavepacket(window128, standard_gaussian(grid128))
    x, p = pg128.coords()
    ref = np.exp(-(x * x + p * p) / 4) / np.sqrt(2 * np.pi)
    assert np.max(np.abs(U.values - ref)) < 1e-8


def test_wavepacket_isometry_and_adjoint(window128, states128, pg128, rng):
    for psi in states128:
        U = wavepacket(window128, psi)
        assert abs(U.norm() - psi.norm()) < 1e-9
        assert np.max(np.abs(wavepacket_adjoint(window128, U).values - psi.values)) < 1e-8
    Psi = PhaseField(pg128, rng.normal(size=pg128.shape) + 1j * rng.normal(size=pg128.shape))
    psi = states128[0]
    lhs = inner(wavepacket(window128, psi), Psi)
    rhs = inner(psi, wavepacket_adjoint(window128, Psi))
    assert abs(lhs - rhs) < 1e-9 * Psi.norm()


def test_zero_maps_to_zero(grid128, pg128, window128):
    assert wavepacket(window128, grid128.zeros()).norm() == 0
    assert wavepacket_adjoint(window128, pg128.zeros()).norm() == 0
    assert symplectic_fourier(pg128.zeros()).norm() == 0


def test_range_membership(grid128, pg128, window128, states128):
    for psi in states128[:3]:
        assert range_residual(window128, wavepacket(window128, psi)) < 1e-8
    x, p = pg128.coords()
    r2 = x * x + p * p
    assert range_residual(window128, PhaseField(pg128, np.exp(-r2 / 4))) < 1e-8
    assert range_residual(window128, PhaseField(pg128, np.exp(-r2 / 8))) > 0.1


def test_cauchy_riemann_residuals(pg128):
    x, p = pg128.coords()
    g = np.exp(-(x * x + p * p) / 4)
    assert cr_residual(PhaseField(pg128, g)) < 1e-7
    assert cr_residual(PhaseField(pg128, (x - 1j * p) * g)) < 1e-7
    assert cr_residual(PhaseField(pg128, (x + 1j * p) * g)) > 0.1


def test_symplectic_fourier(pg128, rng):
    Psi = pg128.sample(lambda x, p: np.exp(-((x - 1) ** 2 + (p + 0.5) ** 2) / 2) * (1 + 0.3j * x * p))
    assert (symplectic_fourier(symplectic_fourier(Psi)) - Psi).norm() / Psi.norm() < 1e-10
    G = pg128.sample(lambda x, p: np.exp(-(x * x + p * p) / 2))
    assert np.max(np.abs(symplectic_fourier(G).values - G.values)) < 1e-8


def test_cross_window_isometry(grid128, states128):
    w1 = gaussian_window(grid128)
    w2 = WavePacketWindow(hermite_state(1, grid128))
    U1 = wavepacket(w1, states128[0])
    moved = wavepacket(w2, wavepacket_adjoint(w1, U1))
    assert abs(moved.norm() - U1.norm()) < 1e-8
    assert range_residual(w2, moved) < 1e-8


def test_orthogonal_windows_give_orthogonal_ranges(grid128, states128):
    w0 = gaussian_window(grid128)
    w1 = WavePacketWindow(hermite_state(1, grid128))
    psi = states128[1]
    assert abs(inner(wavepacket(w0, psi), wavepacket(w1, psi))) < 1e-8
