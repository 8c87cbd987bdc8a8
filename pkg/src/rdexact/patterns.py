"""Closed-form x-antiderivatives for rational exponential sums.

The traveling-wave solutions handled here are quotients

    u = (g0 + sum_i d_i E_i) / (1 + sum_i c_i E_i),   E_i = exp(a_i + b_i x + g_i t)

whose x-antiderivative is elementary whenever u - mu equals (d/dx ln F)/kappa
for the denominator F and constants mu, kappa:

    int u dx = mu*x + ln(F)/kappa.

This covers logistic kinks, their sums, and the two-exponential interaction
family; everything else falls back to quadrature nodes. No general symbolic
simplification is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F

_TOL = 1e-10


@dataclass(frozen=True)
class ExpTerm:
    coeff: complex
    alpha: complex
    beta: float
    gamma: complex

    def exponent_field(self) -> F.ScalarField:
        return F.Const(self.alpha) + F.Const(self.beta) * F.X + F.Const(self.gamma) * F.T


@dataclass(frozen=True)
class RationalExpSum:
    """u = mu + (d/dx ln F)/kappa with F = 1 + sum c_i exp(...)."""

    mu: complex
    kappa: complex
    terms: tuple

    def denominator_field(self) -> F.ScalarField:
        out = F.as_field(1.0)
        for term in self.terms:
            out = out + F.Const(term.coeff) * F.exp(term.exponent_field())
        return out

    def integral_field(self) -> F.ScalarField:
        """Antiderivative mu*x + ln(F)/kappa (a specific constant choice)."""
        out = F.Const(self.mu) * F.X
        if self.terms:
            out = out + F.log(self.denominator_field()) / F.Const(self.kappa)
        return out

    def dt_antiderivative_limit_at_minus_inf(self):
        """x -> -inf limit of dF/dt/(kappa F), as a field of t (or a constant).

        The limit is governed by the slowest-decaying exponents; the implicit
        '1' in F counts as a term with zero exponent.
        """
        beta_min = min(0.0, min((term.beta for term in self.terms), default=0.0))
        dom = [term for term in self.terms if abs(term.beta - beta_min) < 1e-12]
        include_one = abs(beta_min) < 1e-12
        if include_one and not dom:
            return F.Const(0.0)
        num = F.as_field(0.0)
        den = F.as_field(1.0 if include_one else 0.0)
        for term in dom:
            tpart = F.exp(F.Const(term.alpha) + F.Const(term.gamma) * F.T)
            num = num + F.Const(term.coeff * term.gamma) * tpart
            den = den + F.Const(term.coeff) * tpart
        return num / (F.Const(self.kappa) * den)

    def dt_antiderivative_field(self, normalize_at_minus_inf=True) -> F.ScalarField:
        """Closed form of int u_t dx: dF/dt/(kappa F), optionally normalized
        to vanish as x -> -inf."""
        dF = F.as_field(0.0)
        for term in self.terms:
            dF = dF + F.Const(term.coeff * term.gamma) * F.exp(term.exponent_field())
        out = dF / (F.Const(self.kappa) * self.denominator_field())
        if normalize_at_minus_inf:
            out = out - self.dt_antiderivative_limit_at_minus_inf()
        return out


def _affine(tree) -> tuple | None:
    """Recognize alpha + beta*x + gamma*t; returns (alpha, beta, gamma)."""
    if isinstance(tree, F.Const):
        return (tree.value, 0.0, 0.0)
    if isinstance(tree, F.VarX):
        return (0.0, 1.0, 0.0)
    if isinstance(tree, F.VarT):
        return (0.0, 0.0, 1.0)
    if isinstance(tree, F.Neg):
        inner = _affine(tree.a)
        return None if inner is None else tuple(-w for w in inner)
    if isinstance(tree, (F.Add, F.Sub)):
        a, b = _affine(tree.a), _affine(tree.b)
        if a is None or b is None:
            return None
        sign = 1.0 if isinstance(tree, F.Add) else -1.0
        return tuple(aa + sign * bb for aa, bb in zip(a, b))
    if isinstance(tree, F.Mul):
        if isinstance(tree.a, F.Const):
            inner = _affine(tree.b)
            return None if inner is None else tuple(tree.a.value * w for w in inner)
        if isinstance(tree.b, F.Const):
            inner = _affine(tree.a)
            return None if inner is None else tuple(tree.b.value * w for w in inner)
        return None
    if isinstance(tree, F.Div) and isinstance(tree.b, F.Const):
        inner = _affine(tree.a)
        return None if inner is None else tuple(w / tree.b.value for w in inner)
    return None


def _exp_sum(tree, scale=1.0):
    """Flatten into (constant, [ExpTerm...]); returns None when unmatched."""
    if isinstance(tree, F.Const):
        return (scale * tree.value, [])
    if isinstance(tree, F.Neg):
        return _exp_sum(tree.a, -scale)
    if isinstance(tree, F.Exp):
        aff = _affine(tree.a)
        if aff is None:
            return None
        a, b, g = aff
        if abs(np.imag(b)) > 0:
            return None
        return (0.0, [ExpTerm(scale, a, float(np.real(b)), g)])
    if isinstance(tree, (F.Add, F.Sub)):
        left = _exp_sum(tree.a, scale)
        right = _exp_sum(tree.b, scale if isinstance(tree, F.Add) else -scale)
        if left is None or right is None:
            return None
        return (left[0] + right[0], left[1] + right[1])
    if isinstance(tree, F.Mul):
        if isinstance(tree.a, F.Const):
            return _exp_sum(tree.b, scale * tree.a.value)
        if isinstance(tree.b, F.Const):
            return _exp_sum(tree.a, scale * tree.b.value)
        return None
    if isinstance(tree, F.Div) and isinstance(tree.b, F.Const):
        return _exp_sum(tree.a, scale / tree.b.value)
    return None


def _merge_terms(terms):
    merged: dict = {}
    for term in terms:
        key = (round(float(np.real(term.alpha)), 12), round(float(np.imag(term.alpha)), 12),
               round(term.beta, 12),
               round(float(np.real(term.gamma)), 12), round(float(np.imag(term.gamma)), 12))
        if key in merged:
            old = merged[key]
            merged[key] = ExpTerm(old.coeff + term.coeff, old.alpha, old.beta, old.gamma)
        else:
            merged[key] = term
    return [term for term in merged.values() if abs(term.coeff) > 0.0]


def match_rational_exp_sum(tree, scale=1.0, shift=0.0):
    """Match u = shift + scale * tree against the integrable quotient form."""
    if isinstance(tree, F.Neg):
        return match_rational_exp_sum(tree.a, -scale, shift)
    if isinstance(tree, F.Mul) and isinstance(tree.a, F.Const):
        return match_rational_exp_sum(tree.b, scale * tree.a.value, shift)
    if isinstance(tree, F.Mul) and isinstance(tree.b, F.Const):
        return match_rational_exp_sum(tree.a, scale * tree.b.value, shift)
    if isinstance(tree, (F.Add, F.Sub)) and isinstance(tree.a, F.Const):
        sgn = 1.0 if isinstance(tree, F.Add) else -1.0
        return match_rational_exp_sum(tree.b, scale * sgn, shift + scale * tree.a.value)
    if isinstance(tree, (F.Add, F.Sub)) and isinstance(tree.b, F.Const):
        sgn = 1.0 if isinstance(tree, F.Add) else -1.0
        return match_rational_exp_sum(tree.a, scale, shift + scale * sgn * tree.b.value)
    if isinstance(tree, F.Const):
        return RationalExpSum(shift + scale * tree.value, 1.0, ())

    if not isinstance(tree, F.Div):
        return None
    num = _exp_sum(tree.a)
    den = _exp_sum(tree.b)
    if num is None or den is None:
        return None
    g0, num_terms = num
    f0, den_terms = den
    if abs(f0) < 1e-300:
        return None
    num_terms = _merge_terms([ExpTerm(term.coeff / f0, term.alpha, term.beta, term.gamma)
                              for term in num_terms])
    den_terms = _merge_terms([ExpTerm(term.coeff / f0, term.alpha, term.beta, term.gamma)
                              for term in den_terms])
    g0 = g0 / f0
    if not den_terms:
        return None

    def key(term):
        return (round(float(np.real(term.alpha)), 12), round(float(np.imag(term.alpha)), 12),
                round(term.beta, 12),
                round(float(np.real(term.gamma)), 12), round(float(np.imag(term.gamma)), 12))

    den_map = {key(term): term for term in den_terms}
    num_map = {}
    for term in num_terms:
        if key(term) not in den_map:
            return None
        num_map[key(term)] = term

    mu = g0
    kappa = None
    for k, dterm in den_map.items():
        d_i = num_map[k].coeff if k in num_map else 0.0
        r_i = d_i - mu * dterm.coeff
        target = dterm.coeff * dterm.beta
        if abs(r_i) < _TOL * (1.0 + abs(mu) + abs(d_i)):
            if abs(target) > _TOL * (1.0 + abs(dterm.coeff)):
                return None
            continue
        if abs(target) < 1e-300:
            return None
        k_i = target / r_i
        if kappa is None:
            kappa = k_i
        elif abs(k_i - kappa) > _TOL * (1.0 + abs(kappa)):
            return None
    if kappa is None:
        # all exponential content cancels: u is the constant mu
        return RationalExpSum(shift + scale * mu, 1.0, ())
    return RationalExpSum(shift + scale * mu, kappa / scale, tuple(den_map.values()))


def integral_of(tree) -> F.ScalarField | None:
    """Closed-form x-antiderivative, or None when the field is unmatched."""
    matched = match_rational_exp_sum(tree)
    return None if matched is None else matched.integral_field()
