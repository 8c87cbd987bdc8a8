"""Second-order Taylor jets in (x, t).

A Jet2 carries a value together with the partials d/dx, d/dt, d2/dx2 and
d2/dxdt at a point. Arithmetic propagates all slots exactly via product and
chain rules, so derivatives of closed-form expressions incur only rounding
error. Slots may be python scalars or numpy arrays (broadcasting applies);
complex dtypes are supported throughout.

d2/dt2 is deliberately not tracked: the equations handled here involve at
most u_t, u_x, u_xx and u_xt.
"""

from __future__ import annotations

import numpy as np


class Jet2:
    __slots__ = ("value", "dx", "dt", "dxx", "dxt")

    def __init__(self, value, dx=0.0, dt=0.0, dxx=0.0, dxt=0.0):
        self.value = value
        self.dx = dx
        self.dt = dt
        self.dxx = dxx
        self.dxt = dxt

    @staticmethod
    def constant(value):
        return Jet2(value, 0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def variable_x(x):
        one = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
        return Jet2(x, one, 0.0, 0.0, 0.0)

    @staticmethod
    def variable_t(t):
        one = np.ones_like(t) if isinstance(t, np.ndarray) else 1.0
        return Jet2(t, 0.0, one, 0.0, 0.0)

    def __repr__(self):
        return (f"Jet2(value={self.value!r}, dx={self.dx!r}, dt={self.dt!r}, "
                f"dxx={self.dxx!r}, dxt={self.dxt!r})")

    # -- linear operations ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.dx, self.dt, self.dxx, self.dxt)
        return Jet2(self.value + other.value, self.dx + other.dx,
                    self.dt + other.dt, self.dxx + other.dxx, self.dxt + other.dxt)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.dx, -self.dt, -self.dxx, -self.dxt)

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value - other, self.dx, self.dt, self.dxx, self.dxt)
        return Jet2(self.value - other.value, self.dx - other.dx,
                    self.dt - other.dt, self.dxx - other.dxx, self.dxt - other.dxt)

    def __rsub__(self, other):
        return (-self) + other

    # -- product / quotient ----------------------------------------------

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.dx * other, self.dt * other,
                        self.dxx * other, self.dxt * other)
        f, g = self, other
        return Jet2(
            f.value * g.value,
            f.dx * g.value + f.value * g.dx,
            f.dt * g.value + f.value * g.dt,
            f.dxx * g.value + 2.0 * f.dx * g.dx + f.value * g.dxx,
            f.dxt * g.value + f.dx * g.dt + f.dt * g.dx + f.value * g.dxt,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        w = 1.0 / v
        w2 = w * w
        # phi(v) = 1/v: phi' = -1/v^2, phi'' = 2/v^3
        return _chain(self, w, -w2, 2.0 * w2 * w)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other


def _chain(f: Jet2, phi, dphi, d2phi) -> Jet2:
    """Compose an elementary function given its value and first two derivatives
    at f.value."""
    return Jet2(
        phi,
        dphi * f.dx,
        dphi * f.dt,
        d2phi * f.dx * f.dx + dphi * f.dxx,
        d2phi * f.dx * f.dt + dphi * f.dxt,
    )


def jet_exp(f: Jet2) -> Jet2:
    e = np.exp(f.value)
    return _chain(f, e, e, e)


def jet_log(f: Jet2) -> Jet2:
    v = f.value
    w = 1.0 / v
    return _chain(f, np.log(v), w, -w * w)


def jet_tanh(f: Jet2) -> Jet2:
    th = np.tanh(f.value)
    sech2 = 1.0 - th * th
    return _chain(f, th, sech2, -2.0 * th * sech2)


def jet_cosh(f: Jet2) -> Jet2:
    v = f.value
    return _chain(f, np.cosh(v), np.sinh(v), np.cosh(v))


def jet_sqrt(f: Jet2) -> Jet2:
    s = np.sqrt(f.value)
    inv = 0.5 / s
    return _chain(f, s, inv, -0.5 * inv / f.value)


def jet_pow(f: Jet2, p) -> Jet2:
    v = f.value
    w = np.power(v, p)
    return _chain(f, w, p * np.power(v, p - 1), p * (p - 1) * np.power(v, p - 2))
