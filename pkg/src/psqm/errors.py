"""Named error types raised by the library."""


class GridMismatchError(ValueError):
    """Two fields (or a field and an operator) live on incompatible grids."""


class NotFreeError(ValueError):
    """A symplectic matrix has a singular upper-right block."""


class SingularFlowError(ValueError):
    """``det(S - I)`` vanishes (or nearly so) where it must not."""


class StabilityError(RuntimeError):
    """The requested time step violates the explicit integrator's bound."""


class AliasingError(ValueError):
    """A quadrature kernel carries too much weight near the grid boundary."""


class KernelSizeError(ValueError):
    """A dense kernel was requested on a grid above the size cap."""


class CapacityError(ValueError):
    """A Wigner ellipsoid does not have the required symplectic capacity."""


class ConfigError(ValueError):
    """An experiment configuration failed schema validation."""
