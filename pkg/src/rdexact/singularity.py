"""Locator for moving singular sets: zeros of an ansatz denominator.

The denominators of interest are smooth in (x, t) and typically touch zero at
a first time t* (a double root in x) before opening into a pair of moving
zeros. The locator scans t, detects the zero set per t-slice, and refines the
first-contact time by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .fields import ScalarField, eval_jet


def _slice_values(denom: ScalarField, t: float, xs: np.ndarray) -> np.ndarray:
    vals = eval_jet(denom, xs, np.full_like(xs, t)).value
    return np.broadcast_to(np.asarray(np.real(vals), dtype=float), xs.shape)


def x_roots(denom: ScalarField, t: float, x_span=(-10.0, 10.0), nx: int = 1601,
            xtol: float = 1e-10) -> list:
    """Zeros of the denominator in x at fixed t (bisection to xtol)."""
    xs = np.linspace(x_span[0], x_span[1], nx)
    vals = _slice_values(denom, t, xs)
    roots = []
    for i in range(nx - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(xs[i]))
        elif a * b < 0.0:
            roots.append(float(brentq(
                lambda xx: float(np.real(eval_jet(denom, float(xx), t).value)),
                xs[i], xs[i + 1], xtol=xtol)))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


@dataclass
class SingularTime:
    t_star: float
    x_star: float


def first_singular_time(denom: ScalarField, x_span=(-10.0, 10.0),
                        t_span=(0.0, 2.0), nx: int = 1601, nt: int = 241,
                        ttol: float = 1e-10) -> SingularTime | None:
    """First t in t_span at which the denominator reaches zero, or None.

    Uses the sign of the denominator at the initial slice as orientation, so
    a zero set that first appears as a tangential touch is still detected.
    """
    xs = np.linspace(x_span[0], x_span[1], nx)
    ts = np.linspace(t_span[0], t_span[1], nt)
    first = _slice_values(denom, ts[0], xs)
    orient = 1.0 if np.median(np.sign(first[first != 0])) >= 0 else -1.0

    def reached(t):
        return float((orient * _slice_values(denom, t, xs)).min()) <= 0.0

    if reached(ts[0]):
        vals = orient * _slice_values(denom, ts[0], xs)
        return SingularTime(float(ts[0]), float(xs[int(np.argmin(vals))]))
    hit = None
    for i in range(1, nt):
        if reached(ts[i]):
            hit = i
            break
    if hit is None:
        return None
    lo, hi = float(ts[hit - 1]), float(ts[hit])
    while hi - lo > ttol:
        mid = 0.5 * (lo + hi)
        if reached(mid):
            hi = mid
        else:
            lo = mid
    vals = orient * _slice_values(denom, hi, xs)
    return SingularTime(float(hi), float(xs[int(np.argmin(vals))]))
