"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A model or distribution parameter lies outside its domain."""


class IrreducibilityError(ParameterError):
    """The birth-death chain is not irreducible on {0, ..., N}."""


class DegenerateBoundaryError(ParameterError):
    """A boundary rate vanishes where the computation needs it positive."""


class NotApplicableError(ParameterError):
    """The requested diagnostic does not exist for this model."""


class WindowError(ValueError):
    """An estimation window (burn-in, time range) is empty."""
