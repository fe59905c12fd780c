import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psqm.errors import CapacityError
from psqm.gaussian import (
    GaussianParams,
    config_gaussian,
    fixed_marginal_gaussian,
    gaussian_wigner,
    hermite_state,
    phase_gaussian,
    phase_gaussian_range_check,
    quantum_blob_purify,
    quantum_conditions,
    quantum_state_check,
    standard_gaussian,
)
from psqm.grid import ConfigGrid, PhaseGrid, hbar_fourier
from psqm.symplectic import WignerEllipsoid, is_symplectic
from psqm.transforms import wigner_moyal

from conftest import hermite_oracle


def test_params_validation():
    with pytest.raises(ValueError):
        GaussianParams.config([[-1.0]])
    with pytest.raises(ValueError):
        GaussianParams.config([[1.0]], c=2.0)
    with pytest.raises(ValueError):
        GaussianParams.phase(np.eye(3))
    with pytest.raises(ValueError):
        GaussianParams("other")
    with pytest.raises(ValueError):
        GaussianParams.config([[1.0]], hbar=0)


def test_params_roundtrip():
    for p in (GaussianParams.config([[2.0]], [[0.3]], c=1j, hbar=0.5), GaussianParams.phase(np.diag([2.0, 0.5]))):
        q = GaussianParams.from_dict(p.to_dict())
        assert q.kind == p.kind and q.hbar == p.hbar and q.c == p.c
        d = p.to_dict()
        assert set(d) == {"kind", "X", "Y", "G", "hbar", "c"}


@pytest.mark.parametrize("hbar", [1.0, 0.25])
def test_standard_gaussian(hbar):
    g = ConfigGrid.self_dual(128, hbar=hbar)
    phi = standard_gaussian(g)
    assert abs(phi.norm() - 1) < 1e-10
    assert phi.values[g.axes[0].origin_index] == pytest.approx((np.pi * hbar) ** -0.25, abs=1e-14)
    assert np.max(np.abs(hbar_fourier(phi).values - phi.values)) < 1e-10


def test_hermite_states(grid128):
    hs = [hermite_state(n, grid128) for n in range(11)]
    assert np.max(np.abs(hs[0].values - standard_gaussian(grid128).values)) < 1e-12
    V = np.array([h.values for h in hs])
    gram = V.conj() @ V.T * grid128.cell
    assert np.max(np.abs(gram - np.eye(11))) < 1e-10
    for n in (3, 7, 10):
        assert np.max(np.abs(hs[n].values - hermite_oracle(n, grid128).values)) < 1e-10
    with pytest.raises(ValueError):
        hermite_state(11, grid128)


def test_gaussian_wigner_blocks():
    assert np.allclose(gaussian_wigner(GaussianParams.config([[1.0]])).G, np.eye(2))
    assert np.allclose(gaussian_wigner(GaussianParams.config([[2.0]])).G, np.diag([2.0, 0.5]))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_gaussian_wigner_is_symplectic(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    X = A @ A.T + 0.2 * np.eye(n)
    B = rng.normal(size=(n, n))
    G = gaussian_wigner(GaussianParams.config(X, B + B.T)).G
    assert is_symplectic(G, 1e-8)
    assert np.linalg.eigvalsh(G).min() > 0


def test_gaussian_wigner_matches_grid_transform(grid128, pg128):
    params = GaussianParams.config([[2.0]], [[0.5]])
    psi = config_gaussian(params, grid128)
    W = wigner_moyal(psi, psi.conj())
    G = gaussian_wigner(params).G
    ref = phase_gaussian(GaussianParams.phase(2 * G), pg128).values / np.pi
    assert np.max(np.abs(W.values - ref)) < 1e-6


def test_fixed_marginal_family():
    g = ConfigGrid.symmetric(256, 6.0, 1, 0.25)
    psi = fixed_marginal_gaussian(g)
    (x,) = g.coords()
    ref = np.exp(-x * x) / np.sqrt(np.pi)
    assert np.max(np.abs(np.abs(psi.values) ** 2 - ref)) < 1e-10
    F = hbar_fourier(psi)
    (p,) = F.grid.coords()
    assert np.max(np.abs(np.abs(F.values) ** 2 - np.exp(-p * p) / np.sqrt(np.pi))) < 1e-8
    with pytest.raises(ValueError):
        fixed_marginal_gaussian(ConfigGrid.self_dual(32, hbar=2.0))


def test_range_check(window128):
    r = phase_gaussian_range_check(np.eye(2) / 2, window128)
    assert r.residual < 1e-7
    assert r.symplectic_verdict and not r.unscaled_verdict
    assert np.allclose(r.rescaled, np.eye(2))
    assert phase_gaussian_range_check(np.eye(2) / 4, window128).residual > 0.1


@pytest.mark.parametrize(
    "M, expected",
    [(np.eye(2), True), (2 * np.eye(2), False), (np.diag([4.0, 1.0]), False)],
)
def test_quantum_state_check(M, expected):
    E = WignerEllipsoid(M)
    assert quantum_state_check(E) is expected
    c = quantum_conditions(E)
    assert c.agree and c.state is expected


def test_conditions_agree_on_random_ellipsoids():
    rng = np.random.default_rng(7)
    for k in range(500):
        n = 1 + k % 2
        A = rng.normal(size=(2 * n, 2 * n))
        M = A @ A.T + 0.05 * np.eye(2 * n)
        assert quantum_conditions(WignerEllipsoid(M)).agree


def test_purify():
    assert np.allclose(quantum_blob_purify(WignerEllipsoid(np.eye(2))).G, np.eye(2))
    M = np.diag([2.0, 0.5])
    assert np.allclose(quantum_blob_purify(WignerEllipsoid(M)).G, M)
    with pytest.raises(CapacityError):
        quantum_blob_purify(WignerEllipsoid(0.5 * np.eye(2)))


def test_purify_is_idempotent_on_symplectic():
    G = np.array([[2.0, 0.7], [0.7, (1 + 0.49) / 2]])
    out = quantum_blob_purify(WignerEllipsoid(G)).G
    assert np.max(np.abs(out - G)) < 1e-10
    assert np.max(np.abs(quantum_blob_purify(WignerEllipsoid(out)).G - out)) < 1e-10


def test_purify_basis_independence():
    M = np.diag([1.0, 2.0, 1.0, 0.5])
    G = quantum_blob_purify(WignerEllipsoid(M)).G
    assert is_symplectic(G, 1e-8)
    # swap the two degrees of freedom: orthogonal and symplectic
    P = np.eye(4)[[1, 0, 3, 2]]
    Gp = quantum_blob_purify(WignerEllipsoid(P.T @ M @ P)).G
    assert np.max(np.abs(Gp - P.T @ G @ P)) < 1e-8
