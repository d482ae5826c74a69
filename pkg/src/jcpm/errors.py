"""Exception types shared across the package."""


class JcpmError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(JcpmError):
    """Unphysical or inconsistent device/bias parameters."""


class ConvergenceError(JcpmError):
    """An iterative computation failed to converge within its budget."""


class BracketError(JcpmError):
    """A root or minimum could not be bracketed in the search interval."""
