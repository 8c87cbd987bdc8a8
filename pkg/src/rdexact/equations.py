"""Residual functionals for the equation families and grid-level reports.

Pointwise residuals are assembled from exact jets. Grid evaluation is
vectorized, censuses points whose denominators fall under EPS_SING, and
applies a scale-aware pass criterion: a point passes when

    |residual| <= tol * (1 + max_k |term_k|)

which keeps the test meaningful where individual terms grow exponentially.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (EPS_SING, EvalContext, Jet2, Quadrature, ScalarField,
                     as_field)
from .grids import GridSpec


def _coeff_jet(v, ctx) -> Jet2:
    if isinstance(v, ScalarField):
        return v.jet(ctx)
    return Jet2.constant(v)


@dataclass
class PdeCoefficients:
    """Coefficient set of the quasilinear parabolic family.

    (1 + b1 u + b2 u^2) u_t - (h1 + h2 u + h3 u^2) u_x - g0 (u_x)^2
        - (k0 + k1 u) u_xx + sum_{i=1..4} phi_i u^i = 0

    Each entry is a constant or a ScalarField of (x, t). The coefficients of
    u_t and u_xx are assumed nonvanishing on the solution's range; grid
    verification censuses points where either falls under EPS_SING.
    """

    b1: object = 0.0
    b2: object = 0.0
    h1: object = 0.0
    h2: object = 0.0
    h3: object = 0.0
    g0: object = 0.0
    k0: object = 1.0
    k1: object = 0.0
    phi1: object = 0.0
    phi2: object = 0.0
    phi3: object = 0.0
    phi4: object = 0.0

    @classmethod
    def from_quartic_roots(cls, a1, a2, **kwargs):
        """Source-sink term written as u (a1 - u)(a2 - u)(1 - u)."""
        return cls(phi1=a2 * a1, phi2=-(a1 + a2 + a1 * a2),
                   phi3=1 + a1 + a2, phi4=-1.0, **kwargs)

    def restricted(self) -> "PdeCoefficients":
        """The third-homogeneity special case: b2 = h3 = g0 = k1 = phi4 = 0."""
        return PdeCoefficients(b1=self.b1, h1=self.h1, h2=self.h2, k0=self.k0,
                               phi1=self.phi1, phi2=self.phi2, phi3=self.phi3)

    def is_constant(self) -> bool:
        return not any(isinstance(v, ScalarField) for v in (
            self.b1, self.b2, self.h1, self.h2, self.h3, self.g0,
            self.k0, self.k1, self.phi1, self.phi2, self.phi3, self.phi4))


@dataclass
class ResidualReport:
    """Aggregate of pointwise residuals over a verification grid."""

    grid: GridSpec
    max_abs: float
    mean_abs: float
    max_scaled: float
    skipped: int
    tol: float
    passed: bool
    equation: str = ""
    solution_id: str = ""
    notes: str = ""
    per_point: object = None

    def to_json_dict(self) -> dict:
        return {
            "equation": self.equation,
            "solution_id": self.solution_id,
            "grid": self.grid.as_list(),
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "skipped": self.skipped,
            "pass": bool(self.passed),
        }


class ResidualForm:
    """A pointwise residual functional over jets of one field."""

    name = "residual"

    def terms(self, u: ScalarField, ctx: EvalContext):
        """Return (list of term value arrays, residual array)."""
        raise NotImplementedError

    def residual_terms(self, u, x, t):
        ctx = EvalContext(x, t, track_census=True)
        with np.errstate(all="ignore"):
            term_values, res = self.terms(u, ctx)
            scale = np.zeros(np.broadcast_shapes(np.shape(ctx.x), np.shape(ctx.t)))
            for tv in term_values:
                scale = np.maximum(scale, np.abs(tv))
        return res, scale, ctx.census

    def residual(self, u, x, t):
        """Pointwise residual at a scalar point (raises on poles)."""
        ctx = EvalContext(x, t, track_census=False)
        with np.errstate(all="ignore"):
            _, res = self.terms(u, ctx)
        return res


class GeneralForm(ResidualForm):
    """Residual of the full fourth-homogeneity equation."""

    name = "general"

    def __init__(self, c: PdeCoefficients):
        self.c = c

    def terms(self, u, ctx):
        c = self.c
        uj = u.jet(ctx)
        v = uj.value
        b1 = _coeff_jet(c.b1, ctx).value
        b2 = _coeff_jet(c.b2, ctx).value
        h1 = _coeff_jet(c.h1, ctx).value
        h2 = _coeff_jet(c.h2, ctx).value
        h3 = _coeff_jet(c.h3, ctx).value
        g0 = _coeff_jet(c.g0, ctx).value
        k0 = _coeff_jet(c.k0, ctx).value
        k1 = _coeff_jet(c.k1, ctx).value
        p1 = _coeff_jet(c.phi1, ctx).value
        p2 = _coeff_jet(c.phi2, ctx).value
        p3 = _coeff_jet(c.phi3, ctx).value
        p4 = _coeff_jet(c.phi4, ctx).value
        ut_coeff = 1.0 + b1 * v + b2 * v * v
        k_coeff = k0 + k1 * v
        ctx.record_denominator(ut_coeff)
        ctx.record_denominator(k_coeff)
        terms = [
            ut_coeff * uj.dt,
            -(h1 + h2 * v + h3 * v * v) * uj.dx,
            -g0 * uj.dx * uj.dx,
            -k_coeff * uj.dxx,
            p1 * v,
            p2 * v * v,
            p3 * v * v * v,
            p4 * v * v * v * v,
        ]
        return terms, sum(terms)


class SpecialForm(GeneralForm):
    """Third-homogeneity special case (b2 = h3 = g0 = k1 = phi4 = 0 enforced)."""

    name = "special"

    def __init__(self, c: PdeCoefficients):
        super().__init__(c.restricted())


class FhnsForm(ResidualForm):
    """u_t - phi3 u_xx/(2 a^2) - phi3 u + phi3 u^3."""

    name = "fhns"

    def __init__(self, a, phi3):
        if a == 0:
            raise ValueError("a must be nonzero")
        self.a = a
        self.phi3 = phi3

    def terms(self, u, ctx):
        uj = u.jet(ctx)
        v = uj.value
        p3 = _coeff_jet(self.phi3, ctx).value
        terms = [uj.dt, -p3 * uj.dxx / (2.0 * self.a ** 2), -p3 * v, p3 * v * v * v]
        return terms, sum(terms)


class LinearDriftForm(ResidualForm):
    """U_t + (a1 phi3/a^2) U_x - (phi3/(2 a^2)) U_xx.

    The diffusion coefficient phi3/(2 a^2) equals the nonlinear equation's k0;
    this normalization is the one consistent with the third-mode phase
    equation and is satisfied by all catalogued linear companions.
    """

    name = "linear-drift"

    def __init__(self, a, a1, phi3):
        self.a = a
        self.a1 = a1
        self.phi3 = phi3

    def terms(self, u, ctx):
        uj = u.jet(ctx)
        a, a1, p3 = self.a, self.a1, self.phi3
        terms = [uj.dt, p3 * a1 / a ** 2 * uj.dx, -p3 / (2.0 * a ** 2) * uj.dxx]
        return terms, sum(terms)


class LinearPotentialForm(ResidualForm):
    """U_t + 2 phi1 k0 U_x - k0 U_xx - U (int phi1_t dx + phi1 + k0 phi1^2 - k0 phi1_x)."""

    name = "linear-potential"

    def __init__(self, k0, phi1, x_ref=0.0):
        self.k0 = k0
        self.phi1 = as_field(phi1)
        self.phi1_x = self.phi1.diff_x()
        self.int_phi1_t = Quadrature(self.phi1.diff_t(), x_ref)

    def terms(self, u, ctx):
        uj = u.jet(ctx)
        k0 = _coeff_jet(self.k0, ctx).value
        p1 = self.phi1.jet(ctx).value
        p1x = self.phi1_x.jet(ctx).value
        pot = self.int_phi1_t.jet(ctx).value + p1 + k0 * p1 * p1 - k0 * p1x
        terms = [uj.dt, 2.0 * p1 * k0 * uj.dx, -k0 * uj.dxx, -uj.value * pot]
        return terms, sum(terms)


class LinearSourceForm(ResidualForm):
    """U_t - r(x,t) U - k0 U_xx (the potential form used by the log-derivative map)."""

    name = "linear-source"

    def __init__(self, r, k0):
        self.r = as_field(r)
        self.k0 = k0

    def terms(self, u, ctx):
        uj = u.jet(ctx)
        k0 = _coeff_jet(self.k0, ctx).value
        terms = [uj.dt, -self.r.jet(ctx).value * uj.value, -k0 * uj.dxx]
        return terms, sum(terms)


class RateCompatForm(ResidualForm):
    """phi1_t - 3 sqrt(2 phi1) phi1_x + (phi1_x)^2/phi1 + phi1_xx, applied to
    the variable source-rate function itself."""

    name = "rate-compat"

    def terms(self, u, ctx):
        uj = u.jet(ctx)
        v = uj.value
        ctx.record_denominator(v)
        terms = [uj.dt, -3.0 * np.sqrt(2.0 * v) * uj.dx, uj.dx * uj.dx / v, uj.dxx]
        return terms, sum(terms)


class MiuraForm(ResidualForm):
    """Q_x + Q (a1 - sign * a Q - U_x/U) for a fixed linear companion U."""

    name = "miura"

    def __init__(self, U: ScalarField, a, a1, sign=+1):
        self.U = U
        self.a = a
        self.a1 = a1
        self.sign = sign

    def terms(self, q, ctx):
        qj = q.jet(ctx)
        Uj = self.U.jet(ctx)
        ctx.record_denominator(Uj.value)
        ratio = Uj.dx / Uj.value
        terms = [qj.dx, qj.value * (self.a1 - self.sign * self.a * qj.value - ratio)]
        return terms, sum(terms)


class ThirdModePhaseForm(ResidualForm):
    """2 a^2 phi3 + 2 a^2 H_t + phi3 H_x^2 - phi3 H_xx, applied to a phase H."""

    name = "third-mode-phase"

    def __init__(self, a, phi3):
        self.a = a
        self.phi3 = phi3

    def terms(self, h, ctx):
        hj = h.jet(ctx)
        a2 = 2.0 * self.a ** 2
        p3 = self.phi3
        terms = [a2 * p3, a2 * hj.dt, p3 * hj.dx * hj.dx, -p3 * hj.dxx]
        return terms, sum(terms)


# -- public pointwise operations -------------------------------------------


def residual_general(c: PdeCoefficients, u: ScalarField, x, t):
    return GeneralForm(c).residual(u, x, t)


def residual_special(c: PdeCoefficients, u: ScalarField, x, t):
    return SpecialForm(c).residual(u, x, t)


def residual_fhns(u: ScalarField, a, phi3, x, t):
    return FhnsForm(a, phi3).residual(u, x, t)


def linear_parabolic_form(kind: str, **params) -> ResidualForm:
    """Factory for the linear-parabolic residual variants."""
    if kind == "miura_drift":
        return LinearDriftForm(params["a"], params["a1"], params["phi3"])
    if kind == "varcoef_potential":
        return LinearPotentialForm(params["k0"], params["phi1"],
                                   params.get("x_ref", 0.0))
    if kind == "fkpp_potential":
        return LinearSourceForm(params["r"], params["k0"])
    raise ValueError(f"unknown linear-parabolic form {kind!r}")


def residual_linear_parabolic(U: ScalarField, kind: str, params: dict, x, t):
    return linear_parabolic_form(kind, **params).residual(U, x, t)


def residual_grid(form: ResidualForm, u: ScalarField, grid: GridSpec,
                  tol: float = 1e-9, equation: str = "", solution_id: str = "",
                  keep_per_point: bool = False) -> ResidualReport:
    """Evaluate a residual form over a grid and aggregate into a report.

    Points whose minimum denominator magnitude is below EPS_SING, or whose
    residual is non-finite, are skipped and counted.
    """
    X, T = grid.mesh()
    res, scale, census = form.residual_terms(u, X, T)
    res = np.broadcast_to(np.asarray(res), X.shape)
    scale = np.broadcast_to(np.asarray(scale), X.shape)
    absres = np.abs(res)
    skip = ~np.isfinite(absres)
    if census is not None:
        skip |= census < EPS_SING
    n_ok = int((~skip).sum())
    if n_ok == 0:
        return ResidualReport(grid, float("nan"), float("nan"), float("nan"),
                              int(skip.sum()), tol, False, equation=equation,
                              solution_id=solution_id,
                              notes="all grid points singular")
    ok = ~skip
    max_abs = float(absres[ok].max())
    mean_abs = float(absres[ok].mean())
    max_scaled = float((absres[ok] / (1.0 + scale[ok])).max())
    report = ResidualReport(
        grid, max_abs, mean_abs, max_scaled, int(skip.sum()), tol,
        bool(max_scaled <= tol), equation=equation, solution_id=solution_id,
        per_point=(res if keep_per_point else None))
    return report


def check_nondegenerate(c: PdeCoefficients, u: ScalarField, grid: GridSpec):
    """Minimum magnitudes of the u_t and u_xx coefficients on the grid."""
    X, T = grid.mesh()
    ctx = EvalContext(X, T, track_census=False)
    with np.errstate(all="ignore"):
        v = u.jet(ctx).value
        b1 = _coeff_jet(c.b1, ctx).value
        b2 = _coeff_jet(c.b2, ctx).value
        k0 = _coeff_jet(c.k0, ctx).value
        k1 = _coeff_jet(c.k1, ctx).value
        ut_coeff = np.abs(1.0 + b1 * v + b2 * v * v)
        k_coeff = np.abs(k0 + k1 * v)
    return float(np.min(ut_coeff)), float(np.min(k_coeff))
