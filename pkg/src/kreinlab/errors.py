"""Exception classes shared across the package."""


class KreinlabError(Exception):
    """Base class for all library errors."""


class NumericError(KreinlabError):
    """A numeric procedure failed (budget exhausted, singular solve, ...)."""


class ConvergenceError(NumericError):
    """An iteration exceeded its documented budget."""


class NotSPDError(NumericError):
    """A matrix required to be symmetric positive definite is not."""


class SingularSolveError(NumericError):
    """A linear solve hit a (numerically) singular system."""


class ConfigError(KreinlabError):
    """A scenario configuration is malformed or violates the schema."""
