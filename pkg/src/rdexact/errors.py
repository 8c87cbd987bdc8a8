"""Exception types shared across the package."""


class RdExactError(Exception):
    """Base class for all package errors."""


class PoleError(RdExactError):
    """Evaluation hit a denominator smaller than the pole threshold."""


class DomainError(RdExactError):
    """log/sqrt/power of an invalid argument in real mode."""


class QuadratureNonConvergence(RdExactError):
    """Adaptive quadrature failed to reach tolerance (singular integrand?)."""


class UnknownId(RdExactError):
    """Catalog lookup for an unregistered solution id."""


class FamilyMismatch(RdExactError):
    """Semigroup operands belong to different two-parameter families."""


class CompatibilityFailure(RdExactError):
    """A dressing stage exceeded its compatibility tolerance."""


class PreconditionFailure(RdExactError):
    """A construction hypothesis failed; the message names the failed input."""


class DegenerateInput(RdExactError):
    """Construction would divide by an identically-zero field."""


class NegativeDiscriminant(RdExactError):
    """h2^2 + 8*k0*phi3 < 0 in real mode; no real branch coefficient."""


class StabilityAbort(RdExactError):
    """Explicit time step underflowed the stability floor."""


class NonparabolicAbort(RdExactError):
    """Effective diffusivity lost positivity during evolution."""


class GridMismatch(RdExactError):
    """Exact/numeric comparison on incompatible grids."""
