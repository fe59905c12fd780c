"""Sign and scaling conventions used throughout the package.

``CONVENTIONS_VERSION`` is embedded in every CLI manifest; bump it whenever
an entry below changes.
"""

CONVENTIONS_VERSION = "1.0.0"

CONVENTIONS = {
    "symplectic_form": "z ^ z' = p.x' - p'.x, J = [[0, I], [-I, 0]]",
    "phase_space_operators": "X = x/2 + i hbar d/dp, P = p/2 - i hbar d/dx, [X, P] = i hbar",
    "heisenberg_weyl_phase": "T_ph(z0, t0) Psi(z) = exp(i t0/hbar) exp(-i z ^ z0 / 2 hbar) Psi(z - z0)",
    "heisenberg_weyl_config": "T(z0, t0) psi(x) = exp[(i/hbar)(t0 + p0 x - p0 x0/2)] psi(x - x0)",
    "composition_law": "T(z0) T(z1) = exp(i z0 ^ z1 / 2 hbar) T(z0 + z1)",
    "wavepacket": "U psi(x, p) = (2 pi hbar)^(-1/2) exp(ipx/2hbar) int exp(-ipx'/hbar) psi(x') phi(x - x') dx'",
    "range_test": "(d_x - i d_p)[exp(|z|^2 / 4 hbar) Psi] = 0 for the standard Gaussian window",
    "wigner": "W(psi, phi)(z) = (2 pi hbar)^-1 int exp(-ipy/hbar) psi(x + y/2) phi(x - y/2) dy, phi unconjugated",
    "mehlig_wilkinson_prefactor": "(2 pi hbar)^-N i^nu |det(S - I)|^(-1/2)",
    "maslov_default": "m = 0 if det B > 0 else 1; nu = m - Inert(P + Q - 2L) mod 4",
    "ho_index": "nu = 3 for 0 < omega t < 2 pi, 1 for -2 pi < omega t < 0",
    "linear_flow_action": "Phi = (t/2)(p0 r - p r0)",
}
