"""Scalar fields of (x, t) as immutable expression trees.

A ScalarField evaluates to a Jet2 (value plus x/t partials through second
order) at scalar points or numpy arrays of points. Closed-form nodes are
exact to rounding; integral nodes are exact to quadrature tolerance; tabulated
nodes are flagged approximate.

Node set: constants, x, t, +, -, *, /, exp, ln, tanh, cosh, sqrt, power,
definite x-quadrature, definite t-quadrature at pinned x, x-pinning, tabulated
grids, and univariate callback chains (for ODE-defined profiles).

Evaluation is stateless and reentrant; fields are safe to share across
threads. Symbolic derivative trees are available via diff_x/diff_t (plain
product/chain rules, no simplification).
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import DomainError, PoleError, QuadratureNonConvergence
from .jets import (Jet2, jet_cosh, jet_exp, jet_log, jet_pow, jet_sqrt,
                   jet_tanh)
from .quadrature import adaptive_scalar, ladder_integrals

EPS_POLE = 1e-12   # scalar-mode divisions below this raise PoleError
EPS_SING = 1e-6    # grid-mode census threshold for skipped points


def _as_float_array(v):
    arr = np.asarray(v)
    if arr.dtype.kind in "iub":
        arr = arr.astype(float)
    return arr


class EvalContext:
    """Per-evaluation state: the points, pole policy and the census."""

    __slots__ = ("x", "t", "scalar", "census", "cache")

    def __init__(self, x, t, track_census=False):
        self.scalar = np.isscalar(x) and np.isscalar(t) and \
            not isinstance(x, np.ndarray) and not isinstance(t, np.ndarray)
        if self.scalar:
            self.x = float(x) if not isinstance(x, complex) else x
            self.t = float(t) if not isinstance(t, complex) else t
            self.census = None
        else:
            self.x = _as_float_array(x)
            self.t = _as_float_array(t)
            shape = np.broadcast_shapes(self.x.shape, self.t.shape)
            self.census = np.full(shape, np.inf) if track_census else None
        self.cache = {}

    def record_denominator(self, value):
        absv = np.abs(value)
        if self.scalar:
            if absv < EPS_POLE:
                raise PoleError(f"denominator magnitude {absv:.3e} < {EPS_POLE}")
        elif self.census is not None:
            np.minimum(self.census, absv, out=self.census,
                       where=np.isfinite(absv), casting="unsafe")

    def domain_check(self, v, ok, what):
        if np.iscomplexobj(v):
            return
        if self.scalar:
            if not np.all(ok):
                raise DomainError(f"{what} of invalid argument {v!r} in real mode")
        # array mode: numpy yields nan under the suppressed-error regime


class ScalarField:
    """Immutable expression-tree node; the base of every field."""

    __slots__ = ()
    children: tuple = ()

    def _jet(self, ctx: EvalContext) -> Jet2:
        raise NotImplementedError

    def jet(self, ctx: EvalContext) -> Jet2:
        key = id(self)
        hit = ctx.cache.get(key)
        if hit is None:
            hit = self._jet(ctx)
            ctx.cache[key] = hit
        return hit

    @property
    def exact(self) -> bool:
        """True when all derivative slots are exact (no tabulated data)."""
        return all(c.exact for c in self.children)

    def diff_x(self) -> "ScalarField":
        raise NotImplementedError

    def diff_t(self) -> "ScalarField":
        raise NotImplementedError

    # -- operator sugar ----------------------------------------------------

    def __add__(self, other):
        return Add(self, as_field(other))

    def __radd__(self, other):
        return Add(as_field(other), self)

    def __sub__(self, other):
        return Sub(self, as_field(other))

    def __rsub__(self, other):
        return Sub(as_field(other), self)

    def __mul__(self, other):
        return Mul(self, as_field(other))

    def __rmul__(self, other):
        return Mul(as_field(other), self)

    def __truediv__(self, other):
        return Div(self, as_field(other))

    def __rtruediv__(self, other):
        return Div(as_field(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, p):
        if not isinstance(p, numbers.Number):
            raise TypeError("power exponent must be a plain number")
        return Pow(self, p)

    def __call__(self, x, t):
        return eval_jet(self, x, t).value


def as_field(v) -> ScalarField:
    if isinstance(v, ScalarField):
        return v
    if isinstance(v, numbers.Number):
        return Const(v)
    raise TypeError(f"cannot interpret {v!r} as a scalar field")


# --------------------------------------------------------------------------
# leaves


class Const(ScalarField):
    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, complex) or np.iscomplexobj(value):
            value = complex(value)
            self.value = value if value.imag != 0.0 else float(value.real)
        else:
            self.value = float(value)

    def _jet(self, ctx):
        return Jet2.constant(self.value)

    def diff_x(self):
        return Const(0.0)

    diff_t = diff_x

    def __repr__(self):
        return f"Const({self.value!r})"


class VarX(ScalarField):
    __slots__ = ()

    def _jet(self, ctx):
        return Jet2.variable_x(ctx.x)

    def diff_x(self):
        return Const(1.0)

    def diff_t(self):
        return Const(0.0)

    def __repr__(self):
        return "x"


class VarT(ScalarField):
    __slots__ = ()

    def _jet(self, ctx):
        return Jet2.variable_t(ctx.t)

    def diff_x(self):
        return Const(0.0)

    def diff_t(self):
        return Const(1.0)

    def __repr__(self):
        return "t"


X = VarX()
T = VarT()


# --------------------------------------------------------------------------
# arithmetic


class _Binary(ScalarField):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = as_field(a)
        self.b = as_field(b)

    @property
    def children(self):
        return (self.a, self.b)


class Add(_Binary):
    __slots__ = ()

    def _jet(self, ctx):
        return self.a.jet(ctx) + self.b.jet(ctx)

    def diff_x(self):
        return Add(self.a.diff_x(), self.b.diff_x())

    def diff_t(self):
        return Add(self.a.diff_t(), self.b.diff_t())


class Sub(_Binary):
    __slots__ = ()

    def _jet(self, ctx):
        return self.a.jet(ctx) - self.b.jet(ctx)

    def diff_x(self):
        return Sub(self.a.diff_x(), self.b.diff_x())

    def diff_t(self):
        return Sub(self.a.diff_t(), self.b.diff_t())


class Mul(_Binary):
    __slots__ = ()

    def _jet(self, ctx):
        return self.a.jet(ctx) * self.b.jet(ctx)

    def diff_x(self):
        return Add(Mul(self.a.diff_x(), self.b), Mul(self.a, self.b.diff_x()))

    def diff_t(self):
        return Add(Mul(self.a.diff_t(), self.b), Mul(self.a, self.b.diff_t()))


class Div(_Binary):
    __slots__ = ()

    def _jet(self, ctx):
        den = self.b.jet(ctx)
        ctx.record_denominator(den.value)
        return self.a.jet(ctx) / den

    def diff_x(self):
        return Div(Sub(Mul(self.a.diff_x(), self.b), Mul(self.a, self.b.diff_x())),
                   Mul(self.b, self.b))

    def diff_t(self):
        return Div(Sub(Mul(self.a.diff_t(), self.b), Mul(self.a, self.b.diff_t())),
                   Mul(self.b, self.b))


class Neg(ScalarField):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = as_field(a)

    @property
    def children(self):
        return (self.a,)

    def _jet(self, ctx):
        return -self.a.jet(ctx)

    def diff_x(self):
        return Neg(self.a.diff_x())

    def diff_t(self):
        return Neg(self.a.diff_t())


# --------------------------------------------------------------------------
# elementary functions


class _Unary(ScalarField):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = as_field(a)

    @property
    def children(self):
        return (self.a,)


class Exp(_Unary):
    __slots__ = ()

    def _jet(self, ctx):
        return jet_exp(self.a.jet(ctx))

    def diff_x(self):
        return Mul(Exp(self.a), self.a.diff_x())

    def diff_t(self):
        return Mul(Exp(self.a), self.a.diff_t())


class Log(_Unary):
    __slots__ = ()

    def _jet(self, ctx):
        fj = self.a.jet(ctx)
        ctx.domain_check(fj.value, np.all(np.real(fj.value) > 0), "log")
        ctx.record_denominator(fj.value)
        return jet_log(fj)

    def diff_x(self):
        return Div(self.a.diff_x(), self.a)

    def diff_t(self):
        return Div(self.a.diff_t(), self.a)


class Tanh(_Unary):
    __slots__ = ()

    def _jet(self, ctx):
        return jet_tanh(self.a.jet(ctx))

    def _dchain(self):
        # d tanh = 1 - tanh^2
        return Sub(Const(1.0), Mul(Tanh(self.a), Tanh(self.a)))

    def diff_x(self):
        return Mul(self._dchain(), self.a.diff_x())

    def diff_t(self):
        return Mul(self._dchain(), self.a.diff_t())


class Cosh(_Unary):
    __slots__ = ()

    def _jet(self, ctx):
        return jet_cosh(self.a.jet(ctx))

    def _sinh(self):
        return Mul(Const(0.5), Sub(Exp(self.a), Exp(Neg(self.a))))

    def diff_x(self):
        return Mul(self._sinh(), self.a.diff_x())

    def diff_t(self):
        return Mul(self._sinh(), self.a.diff_t())


class Sqrt(_Unary):
    __slots__ = ()

    def _jet(self, ctx):
        fj = self.a.jet(ctx)
        ctx.domain_check(fj.value, np.all(np.real(fj.value) >= 0), "sqrt")
        return jet_sqrt(fj)

    def diff_x(self):
        return Div(self.a.diff_x(), Mul(Const(2.0), Sqrt(self.a)))

    def diff_t(self):
        return Div(self.a.diff_t(), Mul(Const(2.0), Sqrt(self.a)))


class Pow(ScalarField):
    __slots__ = ("a", "p")

    def __init__(self, a, p):
        self.a = as_field(a)
        self.p = p

    @property
    def children(self):
        return (self.a,)

    def _jet(self, ctx):
        fj = self.a.jet(ctx)
        if not float(self.p).is_integer():
            ctx.domain_check(fj.value, np.all(np.real(fj.value) >= 0), "power")
        return jet_pow(fj, self.p)

    def _dchain(self):
        return Mul(Const(self.p), Pow(self.a, self.p - 1))

    def diff_x(self):
        return Mul(self._dchain(), self.a.diff_x())

    def diff_t(self):
        return Mul(self._dchain(), self.a.diff_t())


# --------------------------------------------------------------------------
# integral nodes


class Quadrature(ScalarField):
    """Definite x-quadrature node: F(x, t) = int_{x_ref}^{x} g(s, t) ds.

    F_x = g exactly (fundamental theorem); F_t integrates the integrand's
    t-derivative slot, preserving the exactness contract. x_ref may be -inf
    for integrands decaying on the left.
    """

    __slots__ = ("g", "x_ref")

    def __init__(self, g, x_ref=0.0):
        self.g = as_field(g)
        self.x_ref = float(x_ref)

    @property
    def children(self):
        return (self.g,)

    def _integrand_pair(self, s_nodes, t_value):
        sub = EvalContext(np.asarray(s_nodes, dtype=float), t_value,
                          track_census=False)
        gj = self.g.jet(sub)
        val = np.broadcast_to(np.asarray(gj.value), np.shape(s_nodes))
        dtv = np.broadcast_to(np.asarray(gj.dt), np.shape(s_nodes))
        return np.stack([val, dtv])

    def _far_left_bound(self, x0, ts, step=6.0, max_window=240.0):
        """Leftmost point needed to realize the -inf limit: beyond it the
        integrand (value and t-slot) is below resolution for every t."""
        ref = EvalContext(np.full(len(ts), x0), np.asarray(ts, dtype=float))
        gj = self.g.jet(ref)
        scale = 1.0 + float(np.max(np.abs(gj.value)) + np.max(np.abs(gj.dt)))
        ws = np.arange(step, max_window + step, step)
        probes_x = np.repeat(x0 - ws, len(ts))
        probes_t = np.tile(np.asarray(ts, dtype=float), len(ws))
        sub = EvalContext(probes_x, probes_t)
        pj = self.g.jet(sub)
        mags = (np.abs(np.broadcast_to(np.asarray(pj.value), probes_x.shape))
                + np.abs(np.broadcast_to(np.asarray(pj.dt), probes_x.shape)))
        mags = mags.reshape(len(ws), len(ts)).max(axis=1)
        if not np.all(np.isfinite(mags)):
            bad = np.nonzero(~np.isfinite(mags))[0][0]
            raise QuadratureNonConvergence(
                f"integrand not finite at x = {x0 - ws[bad]}")
        small = mags < 1e-17 * scale
        for i in range(1, len(ws)):
            if small[i] and small[i - 1]:
                return float(x0 - ws[i])
        raise QuadratureNonConvergence(
            "integrand shows no decay on the left; cannot realize -inf")

    def _jet(self, ctx):
        gj = self.g.jet(ctx)  # pointwise slots at the outer points
        if ctx.scalar:
            val = adaptive_scalar(
                lambda s: eval_jet(self.g, s, ctx.t).value, self.x_ref, ctx.x)
            dtv = adaptive_scalar(
                lambda s: eval_jet(self.g, s, ctx.t).dt, self.x_ref, ctx.x)
            return Jet2(val, gj.value, dtv, gj.dx, gj.dt)

        xb = np.broadcast_to(ctx.x, np.broadcast_shapes(
            np.shape(ctx.x), np.shape(ctx.t))).ravel()
        tb = np.broadcast_to(ctx.t, np.broadcast_shapes(
            np.shape(ctx.x), np.shape(ctx.t))).ravel()
        uts = np.unique(tb)
        x_far = None
        if not np.isfinite(self.x_ref):
            if self.x_ref != -np.inf:
                raise QuadratureNonConvergence(
                    f"unsupported base point {self.x_ref}")
            x_far = self._far_left_bound(float(xb.min()), uts)
        out_val = np.zeros(len(xb), dtype=complex)
        out_dt = np.zeros(len(xb), dtype=complex)
        for tv in uts:
            sel = np.nonzero(tb == tv)[0]
            ux, inv = np.unique(xb[sel], return_inverse=True)
            base_val = 0.0
            base_dt = 0.0
            if x_far is None:
                pts = np.unique(np.concatenate([ux, [self.x_ref]]))
                anchor = np.searchsorted(pts, self.x_ref)
            else:
                pts = ux
                anchor = 0
                if x_far < ux[0]:
                    tail = ladder_integrals(
                        lambda nodes: self._integrand_pair(nodes, tv),
                        [x_far, ux[0]], max_width=0.25)
                    base_val, base_dt = tail[0][0], tail[1][0]
            if len(pts) > 1:
                seg = ladder_integrals(
                    lambda nodes: self._integrand_pair(nodes, tv), pts)
                cum = np.concatenate([np.zeros((2, 1), dtype=seg.dtype),
                                      np.cumsum(seg, axis=1)], axis=1)
            else:
                cum = np.zeros((2, 1))
            pos = np.searchsorted(pts, ux)
            vals = base_val + cum[0][pos] - cum[0][anchor]
            dts = base_dt + cum[1][pos] - cum[1][anchor]
            out_val[sel] = vals[inv]
            out_dt[sel] = dts[inv]
        shape = np.broadcast_shapes(np.shape(ctx.x), np.shape(ctx.t))
        if not (np.iscomplexobj(out_val) and np.abs(out_val.imag).max() > 0):
            out_val = out_val.real
            out_dt = out_dt.real
        return Jet2(out_val.reshape(shape), gj.value, out_dt.reshape(shape),
                    gj.dx, gj.dt)

    def diff_x(self):
        return self.g

    def diff_t(self):
        return Quadrature(self.g.diff_t(), self.x_ref)


class TQuadrature(ScalarField):
    """Definite t-quadrature at pinned x: F(t) = int_{t_ref}^{t} g(x_fix, s) ds."""

    __slots__ = ("g", "x_fix", "t_ref")

    def __init__(self, g, x_fix=0.0, t_ref=0.0):
        self.g = as_field(g)
        self.x_fix = float(x_fix)
        self.t_ref = float(t_ref)

    @property
    def children(self):
        return (self.g,)

    def _value_at(self, t):
        return eval_jet(self.g, self.x_fix, float(t)).value

    def _jet(self, ctx):
        if ctx.scalar:
            val = adaptive_scalar(self._value_at, self.t_ref, ctx.t)
            return Jet2(val, 0.0, self._value_at(ctx.t), 0.0, 0.0)
        shape = np.broadcast_shapes(np.shape(ctx.x), np.shape(ctx.t))
        tb = np.broadcast_to(ctx.t, shape).ravel()
        ut, inv = np.unique(tb, return_inverse=True)
        pts = np.unique(np.concatenate([ut, [self.t_ref]]))
        anchor = np.searchsorted(pts, self.t_ref)

        def pair(nodes):
            sub = EvalContext(self.x_fix * np.ones_like(np.asarray(nodes)),
                              np.asarray(nodes, dtype=float))
            gj = self.g.jet(sub)
            return np.atleast_2d(np.broadcast_to(np.asarray(gj.value),
                                                 np.shape(nodes)))

        if len(pts) > 1:
            seg = ladder_integrals(pair, pts)
            cum = np.concatenate([np.zeros((1, 1), dtype=seg.dtype),
                                  np.cumsum(seg, axis=1)], axis=1)
        else:
            cum = np.zeros((1, 1))
        pos = np.searchsorted(pts, ut)
        vals = (cum[0][pos] - cum[0][anchor])[inv].reshape(shape)

        sub = EvalContext(self.x_fix * np.ones_like(tb, dtype=float), tb)
        dtv = np.broadcast_to(np.asarray(self.g.jet(sub).value),
                              tb.shape).reshape(shape)
        return Jet2(vals, 0.0, dtv, 0.0, 0.0)

    def diff_x(self):
        return Const(0.0)

    def diff_t(self):
        return PinX(self.g, self.x_fix)


class PinX(ScalarField):
    """g evaluated at (x_fix, t): a function of t only."""

    __slots__ = ("g", "x_fix")

    def __init__(self, g, x_fix=0.0):
        self.g = as_field(g)
        self.x_fix = float(x_fix)

    @property
    def children(self):
        return (self.g,)

    def _jet(self, ctx):
        if ctx.scalar:
            gj = eval_jet(self.g, self.x_fix, ctx.t)
            return Jet2(gj.value, 0.0, gj.dt, 0.0, 0.0)
        shape = np.broadcast_shapes(np.shape(ctx.x), np.shape(ctx.t))
        tb = np.broadcast_to(ctx.t, shape).ravel()
        sub = EvalContext(self.x_fix * np.ones_like(tb, dtype=float), tb)
        gj = self.g.jet(sub)
        val = np.broadcast_to(np.asarray(gj.value), tb.shape).reshape(shape)
        dtv = np.broadcast_to(np.asarray(gj.dt), tb.shape).reshape(shape)
        return Jet2(val, 0.0, dtv, 0.0, 0.0)

    def diff_x(self):
        return Const(0.0)

    def diff_t(self):
        return PinX(self.g.diff_t(), self.x_fix)


# --------------------------------------------------------------------------
# data-backed nodes


class Tabulated(ScalarField):
    """Field defined by samples on a uniform (t, x) grid.

    Value and derivative slots are linearly interpolated from the table and
    its central-difference derivatives; the node reports exact=False.
    """

    __slots__ = ("xs", "ts", "values", "_interp")

    def __init__(self, xs, ts, values):
        self.xs = np.asarray(xs, dtype=float)
        self.ts = np.asarray(ts, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (len(self.ts), len(self.xs)):
            raise ValueError("values must have shape (nt, nx)")
        self._interp = None

    @property
    def exact(self):
        return False

    def _tables(self):
        if self._interp is None:
            from scipy.interpolate import RegularGridInterpolator
            v = self.values
            dx = np.gradient(v, self.xs, axis=1, edge_order=2)
            dt = np.gradient(v, self.ts, axis=0, edge_order=2)
            dxx = np.gradient(dx, self.xs, axis=1, edge_order=2)
            dxt = np.gradient(dx, self.ts, axis=0, edge_order=2)
            self._interp = tuple(
                RegularGridInterpolator((self.ts, self.xs), tab,
                                        bounds_error=False, fill_value=None)
                for tab in (v, dx, dt, dxx, dxt))
        return self._interp

    def _jet(self, ctx):
        shape = np.broadcast_shapes(np.shape(ctx.x), np.shape(ctx.t))
        xb = np.broadcast_to(ctx.x, shape).ravel()
        tb = np.broadcast_to(ctx.t, shape).ravel()
        pts = np.stack([tb, xb], axis=1)
        v, dx, dt, dxx, dxt = (f(pts).reshape(shape) for f in self._tables())
        if ctx.scalar:
            return Jet2(float(v), float(dx), float(dt), float(dxx), float(dxt))
        return Jet2(v, dx, dt, dxx, dxt)

    def diff_x(self):
        dx = np.gradient(self.values, self.xs, axis=1, edge_order=2)
        return Tabulated(self.xs, self.ts, dx)

    def diff_t(self):
        dt = np.gradient(self.values, self.ts, axis=0, edge_order=2)
        return Tabulated(self.xs, self.ts, dt)


class Func1D(ScalarField):
    """phi(inner) for a univariate phi given as a chain of derivatives.

    funcs[k] must evaluate phi^(k); three entries are needed for jet
    evaluation and one more per symbolic derivative taken. Used for profiles
    defined by ODE integration, which carry their own derivative recursion.
    """

    __slots__ = ("inner", "funcs", "name")

    def __init__(self, inner, funcs, name="func"):
        if len(funcs) < 3:
            raise ValueError("need phi, phi', phi''")
        self.inner = as_field(inner)
        self.funcs = tuple(funcs)
        self.name = name

    @property
    def children(self):
        return (self.inner,)

    def _jet(self, ctx):
        fj = self.inner.jet(ctx)
        v = fj.value
        from .jets import _chain
        return _chain(fj, self.funcs[0](v), self.funcs[1](v), self.funcs[2](v))

    def _shifted(self):
        if len(self.funcs) < 4:
            raise ValueError(
                f"{self.name}: no higher derivative available for diff")
        return Func1D(self.inner, self.funcs[1:], name=self.name + "'")

    def diff_x(self):
        return Mul(self._shifted(), self.inner.diff_x())

    def diff_t(self):
        return Mul(self._shifted(), self.inner.diff_t())


# --------------------------------------------------------------------------
# public evaluation API


def eval_jet(field: ScalarField, x, t) -> Jet2:
    """Evaluate a field's Jet2 at scalar or array points.

    Scalar points raise PoleError/DomainError on singular input; array points
    evaluate through (nan/inf) and are intended for use with
    eval_jet_census.
    """
    ctx = EvalContext(x, t, track_census=False)
    with np.errstate(all="ignore"):
        return field.jet(ctx)


def eval_jet_census(field: ScalarField, x, t):
    """Array evaluation returning (jet, min |denominator| per point)."""
    ctx = EvalContext(x, t, track_census=True)
    with np.errstate(all="ignore"):
        jet = field.jet(ctx)
    return jet, ctx.census


def eval_values(field: ScalarField, x, t):
    return eval_jet(field, x, t).value


# convenience constructors mirroring the node set
x = X
t = T


def const(v) -> Const:
    return Const(v)


def exp(f) -> Exp:
    return Exp(as_field(f))


def log(f) -> Log:
    return Log(as_field(f))


def tanh(f) -> Tanh:
    return Tanh(as_field(f))


def cosh(f) -> Cosh:
    return Cosh(as_field(f))


def sqrt(f) -> Sqrt:
    return Sqrt(as_field(f))


def quadrature(g, x_ref=0.0) -> Quadrature:
    """Adaptive-quadrature field node for int_{x_ref}^{x} g(s, t) ds."""
    return Quadrature(as_field(g), x_ref)
