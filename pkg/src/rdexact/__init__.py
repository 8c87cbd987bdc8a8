"""Exact-solution construction and verification for quasilinear
reaction-diffusion equations.

The package provides:

* exact second-order jets over immutable expression trees (fields);
* residual functionals and grid reports for the equation families
  (equations);
* a catalog of closed-form solutions bound to their target equations
  (catalog);
* phase-dressing of solution pairs and the interaction-family semigroup
  (dressing);
* linear-parabolic correspondences, including a Riccati/Miura link and a
  log-derivative map (linearize);
* an explicit finite-difference evolver for dynamic cross-validation
  (fdsolver), with numba-compiled kernels and a numpy fallback selected by
  RDEXACT_NO_NUMBA=1;
* a singular-set locator (singularity) and a CLI (rdexact).
"""

from .equations import (PdeCoefficients, ResidualReport, residual_fhns,
                        residual_general, residual_grid,
                        residual_linear_parabolic, residual_special)
from .errors import (CompatibilityFailure, DegenerateInput, DomainError,
                     FamilyMismatch, GridMismatch, NegativeDiscriminant,
                     NonparabolicAbort, PoleError, PreconditionFailure,
                     QuadratureNonConvergence, RdExactError, StabilityAbort,
                     UnknownId)
from .fields import (Jet2, ScalarField, eval_jet, eval_jet_census,
                     quadrature)
from .grids import GridSpec, default_grid

__version__ = "0.1.0"

__all__ = [
    "PdeCoefficients", "ResidualReport", "residual_fhns", "residual_general",
    "residual_grid", "residual_linear_parabolic", "residual_special",
    "Jet2", "ScalarField", "eval_jet", "eval_jet_census", "quadrature",
    "GridSpec", "default_grid", "RdExactError", "PoleError", "DomainError",
    "QuadratureNonConvergence", "UnknownId", "FamilyMismatch",
    "CompatibilityFailure", "PreconditionFailure", "DegenerateInput",
    "NegativeDiscriminant", "StabilityAbort", "NonparabolicAbort",
    "GridMismatch",
]
