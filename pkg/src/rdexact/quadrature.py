"""Numeric quadrature helpers used by the integral field nodes.

Two regimes:

* scalar points: scipy adaptive quadrature at epsrel 1e-12 / epsabs 1e-14
  (complex integrands handled by splitting real/imag);
* structured grids: an incremental ladder of fixed Gauss-Legendre panels
  between consecutive abscissae, with an embedded lower-order rule as the
  error estimate. Panels are capped at width 0.05 so analytic integrands of
  O(1) length scale are integrated to near machine precision.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from .errors import QuadratureNonConvergence

EPS_REL = 1e-12
EPS_ABS = 1e-14
_PANEL_WIDTH = 0.05
_PANEL_RTOL = 1e-9

_GL15 = roots_legendre(15)
_GL7 = roots_legendre(7)


def adaptive_scalar(f, a, b):
    """scipy quad of a possibly-complex scalar integrand; raises on failure.

    A lower limit of -inf is realized by locating a window beyond which the
    integrand has decayed under resolution; integrands that fail to decay
    raise QuadratureNonConvergence. This keeps probe points out of the
    overflow range of exponential expressions.
    """
    if a == b:
        return 0.0
    if a == -np.inf:
        a = _decayed_lower_bound(f, b)
    elif not np.isfinite(a) or not np.isfinite(b):
        raise QuadratureNonConvergence(
            f"unsupported quadrature interval [{a}, {b}]")
    probe = f(b)
    if np.iscomplexobj(np.asarray(probe)):
        re = _quad_checked(lambda s: np.real(f(s)), a, b)
        im = _quad_checked(lambda s: np.imag(f(s)), a, b)
        return re + 1j * im
    return _quad_checked(f, a, b)


def _decayed_lower_bound(f, x0, step=6.0, max_window=240.0):
    scale = 1.0 + abs(f(x0))
    small = 0
    w = 0.0
    while w < max_window:
        w += step
        v = f(x0 - w)
        if not np.all(np.isfinite(np.asarray(v))):
            raise QuadratureNonConvergence(
                f"integrand not finite at x = {x0 - w}")
        if abs(v) < 1e-17 * scale:
            small += 1
            if small >= 2:
                return x0 - w
        else:
            small = 0
    raise QuadratureNonConvergence(
        "integrand shows no decay on the left; cannot realize the -inf limit")


def _quad_checked(f, a, b):
    val, err, info, *rest = quad(f, a, b, epsabs=EPS_ABS, epsrel=EPS_REL,
                                 limit=200, full_output=True)
    if not np.isfinite(val):
        raise QuadratureNonConvergence(f"non-finite integral on [{a}, {b}]")
    if rest:
        # quad appended a warning; accept anyway when its own error estimate
        # is small (roundoff-limited tails of decaying integrands trip this)
        if err > 1e3 * max(EPS_ABS, EPS_REL * abs(val)):
            raise QuadratureNonConvergence(
                f"adaptive quadrature on [{a}, {b}] failed: {rest[0]}")
    return val


def _subdivide(a, b, max_width):
    n = max(1, int(np.ceil((b - a) / max_width)))
    edges = np.linspace(a, b, n + 1)
    return edges[:-1], edges[1:]


def ladder_integrals(eval_values, points, max_width=_PANEL_WIDTH):
    """Integrals of a vector-valued integrand over consecutive [p_i, p_{i+1}].

    eval_values(nodes) must return an array (m, len(nodes)) of m integrand
    components evaluated at the 1-D nodes. Returns (m, len(points)-1).
    """
    points = np.asarray(points, dtype=float)
    a_all, b_all = [], []
    panel_of = []
    for i in range(len(points) - 1):
        a, b = _subdivide(points[i], points[i + 1], max_width)
        a_all.append(a)
        b_all.append(b)
        panel_of.append(np.full(len(a), i))
    a_all = np.concatenate(a_all)
    b_all = np.concatenate(b_all)
    panel_of = np.concatenate(panel_of)

    vals15, vals7 = _panel_rule(eval_values, a_all, b_all)
    err = np.abs(vals15 - vals7).max(axis=0)
    scale = 1.0 + np.abs(vals15).max(axis=0)
    bad = err > _PANEL_RTOL * scale
    if np.any(bad):
        # one refinement round: split offending subpanels by 4
        a_b, b_b = a_all[bad], b_all[bad]
        edges = np.linspace(a_b, b_b, 5, axis=0)  # (5, nbad)
        fa = np.repeat(panel_of[bad], 4)
        aa = edges[:-1].T.ravel()
        bb = edges[1:].T.ravel()
        v15, v7 = _panel_rule(eval_values, aa, bb)
        err2 = np.abs(v15 - v7).max(axis=0)
        if np.any(err2 > _PANEL_RTOL * (1.0 + np.abs(v15).max(axis=0))):
            raise QuadratureNonConvergence(
                "panel quadrature failed to converge after refinement "
                "(integrand singular on the path?)")
        keep = ~bad
        m = vals15.shape[0]
        out = np.zeros((m, len(points) - 1), dtype=vals15.dtype)
        for k in range(m):
            np.add.at(out[k], panel_of[keep], vals15[k][keep])
            np.add.at(out[k], fa, v15[k])
        return out
    m = vals15.shape[0]
    out = np.zeros((m, len(points) - 1), dtype=vals15.dtype)
    for k in range(m):
        np.add.at(out[k], panel_of, vals15[k])
    if not np.all(np.isfinite(out)):
        raise QuadratureNonConvergence("non-finite panel integral")
    return out


def _panel_rule(eval_values, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x15, w15 = _GL15
    x7, w7 = _GL7
    n15 = (mid[:, None] + half[:, None] * x15[None, :]).ravel()
    n7 = (mid[:, None] + half[:, None] * x7[None, :]).ravel()
    npan = len(a)
    f_all = eval_values(np.concatenate([n15, n7]))
    f_all = np.atleast_2d(f_all)
    m = f_all.shape[0]
    f15 = f_all[:, : npan * 15].reshape(m, npan, 15)
    f7 = f_all[:, npan * 15:].reshape(m, npan, 7)
    v15 = (f15 * w15).sum(axis=2) * half
    v7 = (f7 * w7).sum(axis=2) * half
    return v15, v7
