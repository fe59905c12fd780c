"""Symplectic linear algebra on R^{2N} with coordinates ``z = (x, p)``.

The standard structure matrix is ``J = [[0, I], [-I, 0]]`` and the
symplectic product is ``z ^ z' = p.x' - p'.x = z'^T J z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import NotFreeError, SingularFlowError

CERTIFY_TOL = 1e-10


def J(n: int) -> np.ndarray:
    """Standard symplectic matrix for ``n`` degrees of freedom."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _dof(mat: np.ndarray) -> int:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("expected a square matrix")
    if mat.shape[0] % 2:
        raise ValueError("symplectic matrices have even dimension")
    return mat.shape[0] // 2


def symplectic_form(z, zp) -> float:
    """``z ^ z' = p.x' - p'.x``."""
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    if z.shape != zp.shape or z.ndim != 1 or z.size % 2:
        raise ValueError("phase-space vectors must share an even dimension")
    n = z.size // 2
    return float(z[n:] @ zp[:n] - zp[n:] @ z[:n])


def is_symplectic(S, tol: float = CERTIFY_TOL) -> bool:
    S = np.asarray(S, dtype=float)
    n = _dof(S)
    return bool(np.max(np.abs(S.T @ J(n) @ S - J(n))) < tol)


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A real ``2N x 2N`` matrix certified to satisfy ``S^T J S = J``."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        S = np.array(self.entries, dtype=float)
        if not is_symplectic(S):
            raise ValueError("matrix is not symplectic")
        S.setflags(write=False)
        object.__setattr__(self, "entries", S)

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def inverse(self) -> "SymplecticMatrix":
        # S^{-1} = -J S^T J
        Jn = J(self.n)
        return SymplecticMatrix(-Jn @ self.entries.T @ Jn)

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return SymplecticMatrix(self.entries @ other.entries)
        return self.entries @ np.asarray(other)

    def blocks(self):
        n = self.n
        S = self.entries
        return S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]


def as_matrix(S) -> np.ndarray:
    return np.asarray(S, dtype=float)


def rotation(theta: float) -> SymplecticMatrix:
    """Hamiltonian flow of ``(x^2 + p^2)/2`` at time ``theta`` (N = 1)."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticMatrix(np.array([[c, s], [-s, c]]))


def squeeze(r: float) -> SymplecticMatrix:
    """``diag(r, 1/r)`` for N = 1."""
    return SymplecticMatrix(np.diag([r, 1.0 / r]))


def random_symplectic(n: int, rng: np.random.Generator, scale: float = 0.5) -> SymplecticMatrix:
    """``exp(J H)`` for a random symmetric ``H``; always symplectic."""
    a = rng.normal(size=(2 * n, 2 * n)) * scale
    return SymplecticMatrix(expm(J(n) @ (a + a.T) / 2))


def _check_spd(M: np.ndarray, what: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    _dof(M)
    if np.max(np.abs(M - M.T)) > 1e-10 * max(1.0, np.max(np.abs(M))):
        raise ValueError(f"{what} must be symmetric")
    M = (M + M.T) / 2
    if np.linalg.eigvalsh(M).min() <= 0:
        raise ValueError(f"{what} must be positive definite")
    return M


def williamson(M):
    """Symplectic diagonalization ``M = S^T diag(lam, lam) S``.

    Returns ``(S, lam)`` with ``lam`` sorted in decreasing order.  The
    ``lam`` are the moduli of the eigenvalues of ``J M``.  Non-unique ``S``
    for degenerate ``lam``.
    """
    M = _check_spd(M)
    n = M.shape[0] // 2
    w, V = np.linalg.eigh(M)
    root = (V * np.sqrt(w)) @ V.T
    K = root @ J(n) @ root
    # iK is Hermitian with eigenvalues -lam_j (first n) and +lam_j.
    evals, vecs = np.linalg.eigh(1j * K)
    order = np.argsort(evals)[:n]
    lam = -evals[order]
    v = vecs[:, order] * np.sqrt(2.0)
    Q = np.hstack([v.real, v.imag])
    d = np.concatenate([lam, lam])
    S = (Q.T @ root) / np.sqrt(d)[:, None]
    # eigh returns ascending eigenvalues, so lam is already descending
    return SymplecticMatrix(S), lam


def williamson_eigenvalues(M) -> np.ndarray:
    """Williamson eigenvalues of ``M``, decreasing."""
    M = _check_spd(M)
    n = M.shape[0] // 2
    ev = np.linalg.eigvals(J(n) @ M)
    return np.sort(np.abs(ev.imag))[::-1][::2]


def symplectic_cayley(S, tol: float = 1e-12) -> np.ndarray:
    """``M_S = (1/2) J (S + I)(S - I)^{-1}``, symmetrized."""
    S = as_matrix(S)
    n = _dof(S)
    eye = np.eye(2 * n)
    if abs(np.linalg.det(S - eye)) < tol:
        raise SingularFlowError("det(S - I) vanishes")
    MS = 0.5 * J(n) @ (S + eye) @ np.linalg.inv(S - eye)
    return (MS + MS.T) / 2


def inertia(W: np.ndarray) -> int:
    """Number of negative eigenvalues of a symmetric matrix."""
    W = np.asarray(W, dtype=float)
    return int(np.sum(np.linalg.eigvalsh((W + W.T) / 2) < 0))


@dataclass(frozen=True, eq=False)
class FreeDecomposition:
    """Blocks of a free symplectic matrix and its generating function.

    ``W(x, x') = P x.x / 2 - L x.x' + Q x'.x' / 2`` with ``P = D B^{-1}``,
    ``L = B^{-1}``, ``Q = B^{-1} A``.  ``m`` is the Maslov integer,
    whose parity must match the sign of ``det B``.
    """

    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)
    L: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    m: int = 0

    @property
    def det_B(self) -> float:
        return float(np.linalg.det(self.B))

    def W(self, x, xp) -> np.ndarray:
        """Generating function; for N > 1 the last axis indexes coordinates."""
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        if self.P.shape == (1, 1):
            # plain coordinate arrays for N = 1
            P, L, Q = self.P[0, 0], self.L[0, 0], self.Q[0, 0]
            return 0.5 * P * x * x - L * x * xp + 0.5 * Q * xp * xp
        Px = np.einsum("ij,...j->...i", self.P, x)
        Lxp = np.einsum("ij,...j->...i", self.L, xp)
        Qxp = np.einsum("ij,...j->...i", self.Q, xp)
        return 0.5 * np.sum(x * Px, -1) - np.sum(x * Lxp, -1) + 0.5 * np.sum(xp * Qxp, -1)

    @property
    def W_xx(self) -> np.ndarray:
        """Hessian of ``x -> W(x, x)``."""
        H = self.P + self.Q - self.L - self.L.T
        return (H + H.T) / 2

    def nu(self) -> int:
        """Index ``m - Inert(W_xx) mod 4``; needs ``det(S - I) != 0``."""
        if abs(np.linalg.det(self.W_xx)) < 1e-12:
            raise SingularFlowError("W_xx is singular (det(S - I) = 0)")
        return (self.m - inertia(self.W_xx)) % 4


def default_maslov(det_B: float) -> int:
    """Maslov integer for the branch ``arg det B`` in ``[0, 2 pi)``."""
    return 0 if det_B > 0 else 1


def free_decomposition(S, m: int | None = None, tol: float = 1e-12) -> FreeDecomposition:
    S = as_matrix(S)
    n = _dof(S)
    A, B, C, D = S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]
    det_B = np.linalg.det(B)
    if abs(det_B) < tol:
        raise NotFreeError("upper-right block B is singular")
    if m is None:
        m = default_maslov(det_B)
    m = int(m) % 4
    if (m % 2) != (0 if det_B > 0 else 1):
        raise ValueError("Maslov integer parity inconsistent with sign of det B")
    L = np.linalg.inv(B)
    P = D @ L
    Q = L @ A
    return FreeDecomposition(A, B, C, D, (P + P.T) / 2, L, (Q + Q.T) / 2, m)


@dataclass(frozen=True, eq=False)
class WignerEllipsoid:
    """The set ``M z.z <= hbar``."""

    M: np.ndarray = field(repr=False)
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "M", _check_spd(self.M, "ellipsoid matrix"))
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def covariance(self) -> np.ndarray:
        return 0.5 * self.hbar * np.linalg.inv(self.M)


def capacity(E: WignerEllipsoid) -> float:
    """Symplectic capacity ``pi hbar / lam_max``."""
    return float(np.pi * E.hbar / williamson_eigenvalues(E.M)[0])


def is_quantum_blob(E: WignerEllipsoid, slack: float = 1e-10) -> bool:
    return capacity(E) >= np.pi * E.hbar * (1.0 - slack)


@dataclass(frozen=True)
class UncertaintyReport:
    ok: bool
    eigenvalues: np.ndarray
    # per degree of freedom: (dx2 * dp2, hbar^2/4 + cov^2, hbar^2/4 + |cov|)
    heisenberg: tuple


def uncertainty_check(sigma, hbar: float = 1.0, tol: float = 1e-10) -> UncertaintyReport:
    """Test ``Sigma + i (hbar/2) J >= 0``.

    The diagnostics list, for each degree of freedom, the product of
    variances next to the squared-correlation bound and the unsquared
    variant.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = _dof(sigma)
    if np.max(np.abs(sigma - sigma.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
        raise ValueError("covariance matrix must be symmetric")
    herm = sigma + 0.5j * hbar * J(n)
    ev = np.linalg.eigvalsh(herm)
    rows = []
    for j in range(n):
        dx2, dp2, cov = sigma[j, j], sigma[n + j, n + j], sigma[j, n + j]
        rows.append((dx2 * dp2, hbar**2 / 4 + cov**2, hbar**2 / 4 + abs(cov)))
    return UncertaintyReport(bool(ev.min() >= -tol), ev, tuple(rows))
