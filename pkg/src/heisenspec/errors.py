"""Exception types shared across the package."""


class HeisenspecError(Exception):
    """Base class for all errors raised by heisenspec."""


class PreconditionError(HeisenspecError, ValueError):
    """An input violates a mathematical precondition of the requested computation.

    ``witness`` carries machine-readable detail about the violation (for example
    the representation level at which a spectrum stops being positive).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness if witness is not None else {}


class NonPositiveSpectrumError(PreconditionError):
    """Some representation eigenvalue has non-positive real part."""


class ExcludedIndexError(PreconditionError):
    """The requested index lies outside the range where a formula is valid."""


class ConventionMismatchError(HeisenspecError):
    """Records computed under different conventions were combined."""


class ConvergenceError(HeisenspecError, RuntimeError):
    """A numerical routine did not reach its requested accuracy."""
