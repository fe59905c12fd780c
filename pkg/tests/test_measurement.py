import numpy as np
import pytest

from psqm.gaussian import fixed_marginal_gaussian, gaussian_window, standard_gaussian
from psqm.grid import ConfigGrid, PhaseGrid, hbar_fourier
from psqm.measurement import (
    MarginalReport,
    density_convolution,
    expectation,
    hbar_limit_study,
    marginal_p,
    marginal_x,
    window_width_study,
)
from psqm.transforms import wavepacket
from psqm.weyl import WeylSymbol, hw_config


def test_gaussian_marginals(grid128, window128):
    phi = standard_gaussian(grid128)
    U = wavepacket(window128, phi)
    (x,) = grid128.coords()
    closed = np.exp(-x * x / 2) / np.sqrt(2 * np.pi)
    for rep in (marginal_x(U, window128, phi), marginal_p(U, window128, phi)):
        assert rep.sup_error < 1e-8
        assert np.max(np.abs(rep.density - closed)) < 1e-8
        assert abs(rep.total_mass - 1) < 1e-8


def test_h1_marginals(window128, hermites128):
    h1 = hermites128[1]
    U = wavepacket(window128, h1)
    mx, mp = marginal_x(U, window128, h1), marginal_p(U, window128, h1)
    assert mx.sup_error < 1e-7 and mp.sup_error < 1e-7
    # |F h1|^2 = |h1|^2, so both references coincide
    assert np.max(np.abs(mx.reference - mp.reference)) < 1e-10


def test_zero_field(pg64):
    rep = marginal_x(pg64.zeros())
    assert rep.total_mass == 0 and not np.any(rep.density)
    with pytest.raises(ValueError):
        MarginalReport(np.zeros(2), np.array([0.0, -1.0]), 0.0)


def test_density_convolution_of_gaussians(grid128):
    ax = grid128.axes[0]
    x = ax.points
    f = np.exp(-x * x / 2) / np.sqrt(2 * np.pi)
    out = density_convolution(f, f, ax)
    assert np.max(np.abs(out - np.exp(-x * x / 4) / np.sqrt(4 * np.pi))) < 1e-12


def test_masses_match_norm(window128, states128):
    for psi in states128[:3]:
        psi = psi * 0.8
        U = wavepacket(window128, psi)
        assert abs(marginal_x(U).total_mass - psi.norm() ** 2) < 1e-8
        assert abs(marginal_p(U).total_mass - psi.norm() ** 2) < 1e-8


def test_expectations(grid128, window128, hermites128):
    phi = standard_gaussian(grid128)
    shifted = hw_config((1.0, 0.0), 0.0, phi)
    r = expectation(WeylSymbol.polynomial({"x": 1.0}), window128, shifted)
    assert abs(r.config - 1) < 1e-7 and abs(r.phase - 1) < 1e-7
    r = expectation(WeylSymbol.harmonic(1.0), window128, hermites128[0])
    assert abs(r.config - 0.5) < 1e-7 and abs(r.phase - 0.5) < 1e-7
    r = expectation(WeylSymbol.polynomial({"1": 1.0}), window128, phi)
    assert abs(r.config - 1) < 1e-12 and abs(r.phase - 1) < 1e-12


@pytest.mark.parametrize("coeffs", [{"x": 1.0}, {"p": 1.0}, {"xx": 1.0}, {"pp": 1.0}, {"xp": 1.0}, {"1": 0.5, "xx": 0.3, "pp": 0.7}])
def test_expectations_agree_on_hermite_states(coeffs, window128, hermites128):
    A = WeylSymbol.polynomial(coeffs)
    for h in hermites128[:4]:
        assert expectation(A, window128, h).difference < 1e-7


def test_hbar_sweep_fixed_marginal_family():
    study = hbar_limit_study(fixed_marginal_gaussian, [1.0, 0.25, 1 / 16], half_width=6.0)
    assert study.decreasing
    assert study.x_errors[0] > 0 and study.p_errors[0] > 0


def test_hbar_sweep_fixed_state_position_only():
    unit = lambda g: g.sample(lambda x: np.exp(-x * x / 2))
    study = hbar_limit_study(unit, [1.0, 0.25, 1 / 16], components="x")
    assert study.decreasing_in("x")
    # the momentum density of an hbar-independent state sharpens faster than the window
    assert study.increasing_in("p")
    with pytest.raises(AssertionError):
        hbar_limit_study(unit, [1.0, 0.25, 1 / 16])


def test_hbar_sweep_requires_decreasing_list():
    with pytest.raises(ValueError):
        hbar_limit_study(standard_gaussian, [0.25, 1.0])


def test_window_width_study(grid128):
    study = window_width_study(standard_gaussian(grid128), [0.5, 1.0, 2.0])
    assert study.increasing_in("x")
    assert study.decreasing_in("p")
    with pytest.raises(AssertionError):
        window_width_study(standard_gaussian(grid128), [0.5, 1.0, 2.0], components="xp")
