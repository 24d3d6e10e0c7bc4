"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates a documented precondition (mismatched grid,
    non-finite field, non-tangential deformation field, ...)."""


class ConfigError(ValueError):
    """A configuration is rejected before any solve is attempted."""


class SolverError(RuntimeError):
    """A linear or nonlinear solve failed; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AlphaConditionError(SolverError):
    """The half-domain jump construction ended with the v(L/2) <= alpha
    constraint active: the output is a constrained minimizer, not an
    unconstrained critical point (epsilon too large or alpha mis-chosen)."""

    def __init__(self, message, state=None, flux=None):
        super().__init__(message)
        self.state = state
        self.flux = flux
