"""Numerical phase-space quantum mechanics on uniform grids."""

from .conventions import CONVENTIONS_VERSION
from .errors import (
    AliasingError,
    CapacityError,
    ConfigError,
    GridMismatchError,
    KernelSizeError,
    NotFreeError,
    SingularFlowError,
    StabilityError,
)
from .gaussian import (
    GaussianParams,
    config_gaussian,
    fixed_marginal_gaussian,
    gaussian_wigner,
    gaussian_window,
    hermite_state,
    phase_gaussian,
    phase_gaussian_range_check,
    quantum_blob_purify,
    quantum_conditions,
    quantum_state_check,
    standard_gaussian,
)
from .grid import (
    Axis,
    ConfigField,
    ConfigGrid,
    PhaseField,
    PhaseGrid,
    hbar_fourier,
    inner,
    interpolate,
    norm,
    refine,
    spectral_derivative,
)
from .measurement import (
    expectation,
    hbar_limit_study,
    marginal_p,
    marginal_x,
    window_width_study,
)
from .metaplectic import (
    MetaplecticData,
    conjugation_residual,
    covariance_residual,
    mehlig_wilkinson_config,
    mehlig_wilkinson_phase,
    mehlig_wilkinson_phase_product,
    metaplectic_apply,
    metaplectic_data,
    pullback,
    quadratic_fourier,
    wigner_covariance_residual,
)
from .propagator import (
    LinearHamiltonian,
    PropagationConfig,
    Trajectory,
    hj_residual,
    ho_explicit,
    ho_index,
    ho_nu_table,
    linear_flow,
    linear_flow_residual,
    propagate,
    split_step,
    stable_steps,
)
from .symplectic import (
    FreeDecomposition,
    SymplecticMatrix,
    WignerEllipsoid,
    capacity,
    free_decomposition,
    is_quantum_blob,
    is_symplectic,
    random_symplectic,
    rotation,
    squeeze,
    symplectic_cayley,
    symplectic_form,
    uncertainty_check,
    williamson,
    williamson_eigenvalues,
)
from .transforms import (
    WavePacketWindow,
    cr_residual,
    project,
    range_residual,
    symplectic_fourier,
    wavepacket,
    wavepacket_adjoint,
    wigner_moyal,
)
from .weyl import (
    PhaseOperator,
    WeylSymbol,
    ho_operator,
    hw_config,
    hw_phase,
    momentum_operator,
    position_operator,
    weyl_quantize_config,
    weyl_quantize_phase,
)

__version__ = "0.1.0"
