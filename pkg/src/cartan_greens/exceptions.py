"""Exception types raised across the package."""


class CartanError(Exception):
    """Base class for package errors."""


class QubitCountMismatch(CartanError, ValueError):
    pass


class AlgebraSizeError(CartanError):
    """Commutator closure grew past the configured cap."""


class CartanConditionError(CartanError):
    """A k/m split violates the Cartan commutation relations."""


class ConvergenceError(CartanError):
    """The KHK optimizer did not reach a diagonalizing K."""

    def __init__(self, message, grad_norm=None, residual=None):
        super().__init__(message)
        self.grad_norm = grad_norm
        self.residual = residual


class ConfigError(CartanError, ValueError):
    pass
