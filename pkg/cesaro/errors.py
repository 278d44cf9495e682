# License: LGPL-3.0+

"""
Exceptions raised by the cesaro package.

Every failure the library detects on its own derives from `Error`, so callers
can catch the whole family at once; plain argument misuse still raises the
builtin `TypeError` / `ValueError`.
"""


class Error(Exception):
    """Base class for exceptions in this package."""
    pass


class MagnitudeError(Error):
    """A value cannot be represented, or an operation would lose it entirely"""
    pass


class ModulusError(Error):
    pass


class QuadratureError(ModulusError):
    pass


class ConstantError(Error):
    """Input outside the range where the Rademacher-type constants exist"""
    pass


class IterationError(Error):
    pass


class PlanError(Error):
    """A rate plan failed re-substitution of its own defining inequalities"""
    pass


class DomainError(Error):
    pass


class SamplingError(Error):
    pass
