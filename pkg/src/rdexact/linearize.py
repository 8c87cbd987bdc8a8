"""Linear-parabolic correspondences for the cubic-source equation.

Three constructive routes are provided:

* constant coefficients: a Riccati/Miura link pairs a solution Q of the
  nonlinear equation with a solution U of a linear drift-diffusion equation,
  and u = Q U T / (Q e^{a1 x} - U T) solves the nonlinear equation. The same
  field drops out of the full third-mode ansatz, whose phase solves
  2 a^2 phi3 + 2 a^2 H_t + phi3 H_x^2 - phi3 H_xx = 0.

* variable coefficients: a one-function dressing u = e^f M/(1 - e^f) with
  f = C0(t) + int M sqrt(phi3/(2 k0)) dx, gated on a coefficient
  compatibility relation; and a two-function variant through a linear
  equation with an integral potential.

* a log-derivative (Cole-Hopf type) map u = (2 k0/h2) d/dx ln U for the
  quadratic-source equation, with U built from a separable ODE profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import fields as F
from .equations import (LinearDriftForm, LinearPotentialForm,
                        LinearSourceForm, MiuraForm, PdeCoefficients,
                        ResidualForm, SpecialForm, ThirdModePhaseForm,
                        _coeff_jet, residual_grid)
from .errors import DegenerateInput, DomainError, PreconditionFailure
from .grids import GridSpec, default_grid


def miura_check(Q: F.ScalarField, U: F.ScalarField, a, a1,
                grid: GridSpec | None = None, sign: int = +1,
                tol: float = 1e-8):
    """Residual report of Q_x + Q (a1 - sign*a*Q - U_x/U) over the grid."""
    grid = grid or default_grid()
    form = MiuraForm(U, a, a1, sign)
    return residual_grid(form, Q, grid, tol=tol, equation=form.name)


def riccati_solve_Q(U: F.ScalarField, a, a1, C0q=0.0,
                    x_ref: float = 0.0) -> F.ScalarField:
    """Solve the Riccati relation (upper sign) for Q given U:

        Q = U e^{-a1 x} / (C0 - int a U e^{-a1 x} dx).

    The construction satisfies the upper-sign Miura relation identically for
    any U; whether Q also solves the nonlinear equation is a separate,
    stronger restriction."""
    V = F.as_field(U) * F.exp(F.Const(-a1) * F.X)
    W = F.Quadrature(F.Const(a) * V, x_ref)
    return V / (F.Const(C0q) - W)


def _growth_factor(a, a1, phi3) -> complex:
    return phi3 * (1.0 + a1 * a1 / (2.0 * a * a))


def fhns_from_linear(U: F.ScalarField, Q: F.ScalarField, a, a1, phi3,
                     grid: GridSpec | None = None, check: bool = True,
                     tol_U: float = 1e-10, tol_Q: float = 1e-8,
                     tol_miura: float = 1e-8) -> F.ScalarField:
    """u = Q U T / (Q e^{a1 x} - U T), T = e^{t phi3 (1 + a1^2/(2 a^2))}.

    Preconditions (checked on the grid unless check=False): U solves the
    linear drift equation, Q solves the nonlinear equation, and the pair
    passes the Miura relation. Complex a1 is allowed; real solutions then
    emerge from complex intermediates."""
    grid = grid or default_grid()
    if check:
        rep = residual_grid(LinearDriftForm(a, a1, phi3), U, grid, tol=tol_U)
        if not rep.passed:
            raise PreconditionFailure(
                f"U does not solve the linear drift equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_U:.1e})")
        rep = residual_grid(SpecialForm(PdeCoefficients(
            k0=phi3 / (2.0 * a * a), phi1=-phi3, phi3=phi3)), Q, grid,
            tol=tol_Q)
        if not rep.passed:
            raise PreconditionFailure(
                f"Q does not solve the nonlinear equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_Q:.1e})")
        rep = miura_check(Q, U, a, a1, grid, tol=tol_miura)
        if not rep.passed:
            raise PreconditionFailure(
                f"Miura compatibility fails "
                f"(scaled max {rep.max_scaled:.3e} > {tol_miura:.1e})")
    T = F.exp(F.Const(_growth_factor(a, a1, phi3)) * F.T)
    Ea1 = F.exp(F.Const(a1) * F.X)
    return Q * U * T / (Q * Ea1 - U * T)


def third_mode_phase(U: F.ScalarField, a, a1, phi3) -> F.ScalarField:
    """H = -ln U + a1 x - (2 a^2 + a1^2) t phi3/(2 a^2)."""
    return -F.log(U) + F.Const(a1) * F.X \
        - F.Const((2.0 * a * a + a1 * a1) * phi3 / (2.0 * a * a)) * F.T


def third_mode_assemble(Q: F.ScalarField, U: F.ScalarField, a, a1, phi3,
                        Z1=0.0, grid: GridSpec | None = None,
                        check: bool = True,
                        tol_phase: float = 1e-8) -> F.ScalarField:
    """Assemble the third-mode ansatz with the closures

        Z = -(M + Q^2)/Q,  M = -Q^2/2,  R = -(2 Q Z1 + Q^3)/2

    and H from the linear solution. The assembled field is algebraically
    identical to the direct quotient construction for every Z1."""
    grid = grid or default_grid()
    probe_x = np.linspace(grid.xmin, grid.xmax, 7)
    probe_t = np.linspace(grid.tmin, grid.tmax, 3)
    X, T = np.meshgrid(probe_x, probe_t)
    qv = np.abs(F.eval_jet(Q, X, T).value)
    if np.all(qv < 1e-14):
        raise DegenerateInput("Q vanishes identically; the closures divide by Q")
    H = third_mode_phase(U, a, a1, phi3)
    if check:
        rep = residual_grid(ThirdModePhaseForm(a, phi3), H, grid, tol=tol_phase)
        if not rep.passed:
            raise PreconditionFailure(
                f"phase equation residual {rep.max_scaled:.3e} > {tol_phase:.1e}")
    M = -(Q * Q) / 2.0
    Z = -(M + Q * Q) / Q
    R = -(2.0 * F.as_field(Z1) * Q + Q * Q * Q) / 2.0
    eH = F.exp(H)
    e2H = eH * eH
    e3H = e2H * eH
    num = eH * M + e2H * R - Q
    den = 1.0 + Z * eH + F.as_field(Z1) * e2H + R * e3H
    return num / den


# -- variable-coefficient one-function dressing -------------------------------


class CoefficientCompatForm(ResidualForm):
    """Compatibility relation of the one-function dressing (variable k0,
    phi3): an integral term plus pointwise terms in M and the coefficients."""

    name = "coefficient-compat"

    def __init__(self, M, k0, phi3, C0=0.0, x_ref: float = float("-inf")):
        self.M = F.as_field(M)
        k0f = F.as_field(k0)
        p3f = F.as_field(phi3)
        self.k0f, self.p3f = k0f, p3f
        self.m2 = k0f * p3f
        integrand = (-self.M * p3f * k0f.diff_t()
                     + k0f * (2.0 * p3f * self.M.diff_t()
                              + p3f.diff_t() * self.M)) / (k0f * F.sqrt(self.m2))
        self.I = F.Quadrature(integrand, x_ref)
        self.k0x = k0f.diff_x()
        self.p3x = p3f.diff_x()
        self.c0p = C0.diff_t() if isinstance(C0, F.ScalarField) else 0.0

    def terms(self, _unused, ctx):
        Mj = self.M.jet(ctx)
        Mv = Mj.value
        k0 = self.k0f.jet(ctx).value
        p3 = self.p3f.jet(ctx).value
        sq = np.sqrt(self.m2.jet(ctx).value)
        Iv = self.I.jet(ctx).value
        c0p = self.c0p.jet(ctx).value if isinstance(self.c0p, F.ScalarField) \
            else self.c0p
        r2 = math.sqrt(2.0)
        terms = [
            -r2 * Iv * sq,
            6.0 * Mv * Mv * p3 * sq,
            -4.0 * c0p * sq,
            6.0 * r2 * Mj.dx * k0 * p3,
            -r2 * Mv * self.k0x.jet(ctx).value * p3,
            r2 * Mv * k0 * self.p3x.jet(ctx).value,
        ]
        return terms, sum(terms)


def dress_one_function(M: F.ScalarField, k0, phi1, phi3, C0=0.0,
                       x_ref: float = 0.0, grid: GridSpec | None = None,
                       check: bool = True, tol_M: float = 1e-8,
                       tol_compat: float = 1e-6) -> F.ScalarField:
    """One-function dressing u = e^f M/(1 - e^f),
    f = C0(t) + int M sqrt(phi3/(2 k0)) dx.

    Hypotheses: M solves the cubic-source equation with (k0, phi1, phi3) and
    the coefficient compatibility relation holds (its C0' term comes from the
    supplied C0). Constant negative k0*phi3 is rejected in real mode."""
    grid = grid or default_grid()
    if not isinstance(k0, F.ScalarField) and not isinstance(phi3, F.ScalarField):
        if k0 * phi3 < 0:
            raise DomainError(f"k0*phi3 = {k0 * phi3} < 0: no real phase slope")
    if check:
        rep = residual_grid(SpecialForm(PdeCoefficients(
            k0=k0, phi1=-F.as_field(phi1) if isinstance(phi1, F.ScalarField)
            else -phi1, phi3=phi3)), M, grid, tol=tol_M)
        if not rep.passed:
            raise PreconditionFailure(
                f"M does not solve the cubic-source equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_M:.1e})")
        form = CoefficientCompatForm(M, k0, phi3, C0=F.as_field(C0)
                                     if isinstance(C0, F.ScalarField) else C0)
        rep = residual_grid(form, M, grid, tol=tol_compat)
        if not rep.passed:
            raise PreconditionFailure(
                f"coefficient compatibility fails "
                f"(scaled max {rep.max_scaled:.3e} > {tol_compat:.1e})")
    slope = F.sqrt(F.as_field(phi3) / (2.0 * F.as_field(k0)))
    f = F.as_field(C0) + F.Quadrature(F.as_field(M) * slope, x_ref)
    ef = F.exp(f)
    return ef * M / (1.0 - ef)


# -- variable-coefficient two-function route ----------------------------------


class FirstCompatForm(ResidualForm):
    """Q_x - [-2 sqrt(2 phi3 k0) (U Q)^2 - 4 k0 U Q (phi1 U - U_x)]/(4 k0 U^2)."""

    name = "first-compat"

    def __init__(self, U, k0, phi1, phi3):
        self.U = F.as_field(U)
        self.k0, self.phi1, self.phi3 = k0, phi1, phi3

    def terms(self, q, ctx):
        qj = q.jet(ctx)
        Uj = self.U.jet(ctx)
        ctx.record_denominator(Uj.value)
        k0 = _coeff_jet(self.k0, ctx).value
        p1 = _coeff_jet(self.phi1, ctx).value
        p3 = _coeff_jet(self.phi3, ctx).value
        Uv, Qv = Uj.value, qj.value
        rhs = (-2.0 * np.sqrt(2.0 * p3 * k0) * (Uv * Qv) ** 2
               - 4.0 * k0 * Uv * Qv * (p1 * Uv - Uj.dx)) / (4.0 * k0 * Uv * Uv)
        terms = [qj.dx, -rhs]
        return terms, sum(terms)


class SecondCompatForm(ResidualForm):
    """Q_x - [-2 sqrt(k0) U Q - 2 U Q^2 phi3 + 2 sqrt(k0) Q U_x]/(sqrt(2 k0) U),
    as printed."""

    name = "second-compat"

    def __init__(self, U, k0, phi3):
        self.U = F.as_field(U)
        self.k0, self.phi3 = k0, phi3

    def terms(self, q, ctx):
        qj = q.jet(ctx)
        Uj = self.U.jet(ctx)
        ctx.record_denominator(Uj.value)
        k0 = _coeff_jet(self.k0, ctx).value
        p3 = _coeff_jet(self.phi3, ctx).value
        Uv, Qv = Uj.value, qj.value
        rhs = (-2.0 * np.sqrt(k0) * Uv * Qv - 2.0 * Uv * Qv * Qv * p3
               + 2.0 * np.sqrt(k0) * Qv * Uj.dx) / (np.sqrt(2.0 * k0) * Uv)
        terms = [qj.dx, -rhs]
        return terms, sum(terms)


def fhns_varcoef_from_linear(Q: F.ScalarField, U: F.ScalarField, k0, phi1,
                             phi3, which_compat: str = "first",
                             x_ref: float = 0.0,
                             grid: GridSpec | None = None, check: bool = True,
                             tol_compat: float = 1e-6, tol_Q: float = 1e-8,
                             tol_U: float = 1e-8) -> F.ScalarField:
    """u = Q U / (Q e^{int phi1 dx} - U) from the two-function route.

    Hypotheses: the chosen compatibility relation holds, Q solves the
    cubic-source equation and U the linear equation with the integral
    potential (the potential's base point is x_ref)."""
    grid = grid or default_grid()
    if check:
        if which_compat == "first":
            form = FirstCompatForm(U, k0, phi1, phi3)
        elif which_compat == "second":
            form = SecondCompatForm(U, k0, phi3)
        else:
            raise ValueError("which_compat must be 'first' or 'second'")
        rep = residual_grid(form, Q, grid, tol=tol_compat)
        if not rep.passed:
            raise PreconditionFailure(
                f"{which_compat} compatibility fails "
                f"(scaled max {rep.max_scaled:.3e} > {tol_compat:.1e})")
        rep = residual_grid(SpecialForm(PdeCoefficients(
            k0=k0, phi1=-F.as_field(phi1) if isinstance(phi1, F.ScalarField)
            else -phi1, phi3=phi3)), Q, grid, tol=tol_Q)
        if not rep.passed:
            raise PreconditionFailure(
                f"Q does not solve the cubic-source equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_Q:.1e})")
        rep = residual_grid(LinearPotentialForm(k0, F.as_field(phi1), x_ref),
                            U, grid, tol=tol_U)
        if not rep.passed:
            raise PreconditionFailure(
                f"U does not solve the linear potential equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_U:.1e})")
    Ephi = F.exp(F.Quadrature(F.as_field(phi1), x_ref))
    return Q * U / (Q * Ephi - U)


# -- log-derivative map for the quadratic-source equation ---------------------


def fkpp_coefficients(k0, h2, phi1, phi2) -> PdeCoefficients:
    """The quadratic-source target with the pinned drift h1 = -2 k0 phi2/h2."""
    return PdeCoefficients(k0=k0, h1=-2.0 * k0 * phi2 / h2, h2=h2,
                           phi1=phi1, phi2=phi2)


def colehopf_map(U: F.ScalarField, k0, h2) -> F.ScalarField:
    """u = (2 k0/h2) d/dx ln U (zeros of U are censused on evaluation)."""
    return F.Const(2.0 * k0 / h2) * U.diff_x() / U


def colehopf_fkpp(U: F.ScalarField, k0, h2, r=None,
                  grid: GridSpec | None = None, check: bool = True,
                  tol_U: float = 1e-8) -> F.ScalarField:
    """Log-derivative map with an optional check that U solves
    U_t = r U + k0 U_xx."""
    if check and r is not None:
        grid = grid or default_grid()
        rep = residual_grid(LinearSourceForm(r, k0), U, grid, tol=tol_U)
        if not rep.passed:
            raise PreconditionFailure(
                f"U does not solve the linear source equation "
                f"(scaled max {rep.max_scaled:.3e} > {tol_U:.1e})")
    return colehopf_map(U, k0, h2)


@dataclass
class FkppConstruction:
    """A separable profile U = v(z) with its potential and target equation."""

    U: F.ScalarField
    r: F.ScalarField
    u: F.ScalarField
    coefficients: PdeCoefficients
    z: F.ScalarField
    variant: str


def _dense_component(sol, k):
    def f(z):
        z = np.asarray(z, dtype=float)
        return sol.sol(z.ravel())[k].reshape(z.shape)
    return f


def _profile_chain(A, B, C, sol):
    """Callback chain v, v', v'', v''' for z v'' = -(A v' + B z^3 v)/C."""

    v = _dense_component(sol, 0)
    vp = _dense_component(sol, 1)

    def vpp(z):
        z = np.asarray(z, dtype=float)
        return -(A * vp(z) + B * z ** 3 * v(z)) / (C * z)

    def vppp(z):
        z = np.asarray(z, dtype=float)
        return (-(A * vpp(z) + B * (3.0 * z ** 2 * v(z) + z ** 3 * vp(z)))
                / (C * z) + (A * vp(z) + B * z ** 3 * v(z)) / (C * z * z))

    return (v, vp, vpp, vppp)


def _profile_chain_printed(k0, h2, phi1, phi2, sol):
    """Chain for the rate equation as printed:
    2 k0 phi2 z v'' + (2 k0 phi2 + h2^2 phi1) v' + 2 h2^2 phi2 z v = 0."""
    A = 2.0 * k0 * phi2 + h2 ** 2 * phi1
    B = 2.0 * h2 ** 2 * phi2
    C = 2.0 * k0 * phi2

    v = _dense_component(sol, 0)
    vp = _dense_component(sol, 1)

    def vpp(z):
        z = np.asarray(z, dtype=float)
        return -(A * vp(z) + B * z * v(z)) / (C * z)

    def vppp(z):
        z = np.asarray(z, dtype=float)
        return (-(A * vpp(z) + B * (v(z) + z * vp(z))) / (C * z)
                + (A * vp(z) + B * z * v(z)) / (C * z * z))

    return (v, vp, vpp, vppp)


def build_fkpp_profile(k0, h2, phi1, phi2, omega: float = 1.0,
                       v0: float = 1.0, vp0: float = 0.3,
                       z_span: tuple = (0.05, 4.0), variant: str = "consistent",
                       rtol: float = 1e-12, atol: float = 1e-14) -> FkppConstruction:
    """Integrate the separable profile ODE and assemble the mapped solution.

    variant="consistent" uses the self-consistent chain derived from the
    substitution U = v(z):

        z = exp((phi2/(2 h2)) x - (phi1/4) t),     r = omega z^4,
        k0 phi2^2 z v'' + (k0 phi2^2 + h2^2 phi1) v' + 4 h2^2 omega z^3 v = 0,

    under which u = (2 k0/h2) d/dx ln U solves the quadratic-source equation
    exactly. variant="printed" integrates the rate equation exactly as
    printed (z-exponent 1/(2 h2), potential exp(2 x/h2), time dependence
    dropped); it is retained for comparison and does not close the chain."""
    if variant == "consistent":
        lam = phi2 / (2.0 * h2)
        mu = -phi1 / 4.0
        A = k0 * phi2 ** 2 + h2 ** 2 * phi1
        B = 4.0 * h2 ** 2 * omega
        C = k0 * phi2 ** 2

        def rhs(z, y):
            return [y[1], -(A * y[1] + B * z ** 3 * y[0]) / (C * z)]

        sol = solve_ivp(rhs, z_span, [v0, vp0], rtol=rtol, atol=atol,
                        dense_output=True)
        chain = _profile_chain(A, B, C, sol)
        z_field = F.exp(F.Const(lam) * F.X + F.Const(mu) * F.T)
        zf4 = z_field * z_field * z_field * z_field
        r_field = F.Const(omega) * zf4
    elif variant == "printed":
        lam = 1.0 / (2.0 * h2)
        A = 2.0 * k0 * phi2 + h2 ** 2 * phi1
        B = 2.0 * h2 ** 2 * phi2
        C = 2.0 * k0 * phi2

        def rhs(z, y):
            return [y[1], -(A * y[1] + B * z * y[0]) / (C * z)]

        sol = solve_ivp(rhs, z_span, [v0, vp0], rtol=rtol, atol=atol,
                        dense_output=True)
        chain = _profile_chain_printed(k0, h2, phi1, phi2, sol)
        z_field = F.exp(F.Const(lam) * F.X)
        r_field = F.exp(F.Const(2.0 / h2) * F.X)
    else:
        raise ValueError("variant must be 'consistent' or 'printed'")
    if not sol.success:
        raise PreconditionFailure(f"profile ODE integration failed: {sol.message}")
    U = F.Func1D(z_field, chain, name="fkpp-profile")
    u = colehopf_map(U, k0, h2)
    return FkppConstruction(U=U, r=r_field, u=u,
                            coefficients=fkpp_coefficients(k0, h2, phi1, phi2),
                            z=z_field, variant=variant)


def heat_kernel(k0, t0: float = 1.0, x0: float = 0.0,
                amplitude: float = 1.0) -> F.ScalarField:
    """amplitude (t0+t)^{-1/2} exp(-(x-x0)^2/(4 k0 (t0+t)))."""
    shifted = F.T + t0
    gap = F.X - x0
    return F.Const(amplitude) * shifted ** (-0.5) * \
        F.exp(-(gap * gap) / (4.0 * k0 * shifted))
