"""Time-stepping kernels: numba-jitted hot loop with a pure-numpy fallback.

The pure-numpy path is selected by setting RDEXACT_NO_NUMBA=1 (or when numba
is unavailable). Both paths implement the identical scheme: RK4 in time over
second-order central differences in space, Dirichlet boundary values supplied
per stage or zero-flux mirror boundaries.

Status codes returned by the runners:
    0 ok, 1 CFL bound violated, 2 effective diffusivity lost positivity.
"""

from __future__ import annotations

import os

import numpy as np

BC_DIRICHLET = 0
BC_NEUMANN = 1

_DISABLE = os.environ.get("RDEXACT_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes")

try:  # pragma: no cover - environment probe
    if _DISABLE:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f
        return wrap if not (args and callable(args[0])) else args[0]


def _rhs(u, du, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4, inv_dx,
         inv_dx2):
    """du[1:-1] = interior right-hand side; endpoints left untouched."""
    n = u.shape[0]
    for i in range(1, n - 1):
        ui = u[i]
        ux = (u[i + 1] - u[i - 1]) * 0.5 * inv_dx
        uxx = (u[i + 1] - 2.0 * ui + u[i - 1]) * inv_dx2
        den = 1.0 + b1[i] * ui + b2[i] * ui * ui
        num = ((h1[i] + h2[i] * ui + h3[i] * ui * ui) * ux
               + g0[i] * ux * ux
               + (k0[i] + k1[i] * ui) * uxx
               - ui * (p1[i] + ui * (p2[i] + ui * (p3[i] + ui * p4[i]))))
        du[i] = num / den


def _step_block(u, coeffs, dx, dt, nsteps, bcl, bcr, bc_mode, cfl_limit):
    """Advance nsteps RK4 steps in place; returns a status code.

    bcl/bcr hold the Dirichlet values at the three stage times of each step
    (shape (nsteps, 3)); ignored for mirror boundaries.
    """
    b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4 = coeffs
    n = u.shape[0]
    inv_dx = 1.0 / dx
    inv_dx2 = inv_dx * inv_dx
    k1s = np.zeros(n)
    k2s = np.zeros(n)
    k3s = np.zeros(n)
    k4s = np.zeros(n)
    tmp = np.zeros(n)
    for step in range(nsteps):
        # stability guards against the current state
        kmin = 1e300
        kmax = 0.0
        for i in range(n):
            den = 1.0 + b1[i] * u[i] + b2[i] * u[i] * u[i]
            keff = (k0[i] + k1[i] * u[i]) / den
            if keff < kmin:
                kmin = keff
            ak = abs(keff)
            if ak > kmax:
                kmax = ak
        if kmin <= 0.0:
            return 2
        if dt > cfl_limit * dx * dx / kmax:
            return 1

        if bc_mode == BC_DIRICHLET:
            u[0] = bcl[step, 0]
            u[n - 1] = bcr[step, 0]
        else:
            u[0] = u[1]
            u[n - 1] = u[n - 2]
        _rhs(u, k1s, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
             inv_dx, inv_dx2)
        for i in range(n):
            tmp[i] = u[i] + 0.5 * dt * k1s[i]
        if bc_mode == BC_DIRICHLET:
            tmp[0] = bcl[step, 1]
            tmp[n - 1] = bcr[step, 1]
        else:
            tmp[0] = tmp[1]
            tmp[n - 1] = tmp[n - 2]
        _rhs(tmp, k2s, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
             inv_dx, inv_dx2)
        for i in range(n):
            tmp[i] = u[i] + 0.5 * dt * k2s[i]
        if bc_mode == BC_DIRICHLET:
            tmp[0] = bcl[step, 1]
            tmp[n - 1] = bcr[step, 1]
        else:
            tmp[0] = tmp[1]
            tmp[n - 1] = tmp[n - 2]
        _rhs(tmp, k3s, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
             inv_dx, inv_dx2)
        for i in range(n):
            tmp[i] = u[i] + dt * k3s[i]
        if bc_mode == BC_DIRICHLET:
            tmp[0] = bcl[step, 2]
            tmp[n - 1] = bcr[step, 2]
        else:
            tmp[0] = tmp[1]
            tmp[n - 1] = tmp[n - 2]
        _rhs(tmp, k4s, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
             inv_dx, inv_dx2)
        for i in range(1, n - 1):
            u[i] += dt / 6.0 * (k1s[i] + 2.0 * k2s[i] + 2.0 * k3s[i] + k4s[i])
        if bc_mode == BC_DIRICHLET:
            u[0] = bcl[step, 2]
            u[n - 1] = bcr[step, 2]
        else:
            u[0] = u[1]
            u[n - 1] = u[n - 2]
    return 0


def _rhs_numpy(u, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4, inv_dx,
               inv_dx2):
    du = np.zeros_like(u)
    ui = u[1:-1]
    ux = (u[2:] - u[:-2]) * 0.5 * inv_dx
    uxx = (u[2:] - 2.0 * ui + u[:-2]) * inv_dx2
    den = 1.0 + b1[1:-1] * ui + b2[1:-1] * ui * ui
    num = ((h1[1:-1] + h2[1:-1] * ui + h3[1:-1] * ui * ui) * ux
           + g0[1:-1] * ux * ux
           + (k0[1:-1] + k1[1:-1] * ui) * uxx
           - ui * (p1[1:-1] + ui * (p2[1:-1] + ui * (p3[1:-1] + ui * p4[1:-1]))))
    du[1:-1] = num / den
    return du


def step_block_numpy(u, coeffs, dx, dt, nsteps, bcl, bcr, bc_mode,
                     cfl_limit=0.25):
    """Vectorized fallback with the same scheme and status codes."""
    b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4 = coeffs
    inv_dx = 1.0 / dx
    inv_dx2 = inv_dx * inv_dx

    def apply_bc(v, step, stage):
        if bc_mode == BC_DIRICHLET:
            v[0] = bcl[step, stage]
            v[-1] = bcr[step, stage]
        else:
            v[0] = v[1]
            v[-1] = v[-2]

    for step in range(nsteps):
        den = 1.0 + b1 * u + b2 * u * u
        keff = (k0 + k1 * u) / den
        if keff.min() <= 0.0:
            return 2
        if dt > cfl_limit * dx * dx / np.abs(keff).max():
            return 1
        apply_bc(u, step, 0)
        f1 = _rhs_numpy(u, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
                        inv_dx, inv_dx2)
        v = u + 0.5 * dt * f1
        apply_bc(v, step, 1)
        f2 = _rhs_numpy(v, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
                        inv_dx, inv_dx2)
        v = u + 0.5 * dt * f2
        apply_bc(v, step, 1)
        f3 = _rhs_numpy(v, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
                        inv_dx, inv_dx2)
        v = u + dt * f3
        apply_bc(v, step, 2)
        f4 = _rhs_numpy(v, b1, b2, h1, h2, h3, g0, k0, k1, p1, p2, p3, p4,
                        inv_dx, inv_dx2)
        u[1:-1] += dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)[1:-1]
        apply_bc(u, step, 2)
    return 0


if HAVE_NUMBA:
    _rhs = njit(cache=True)(_rhs)
    step_block_numba = njit(cache=True)(_step_block)
else:  # pragma: no cover
    step_block_numba = None


def step_block(u, coeffs, dx, dt, nsteps, bcl, bcr, bc_mode,
               cfl_limit=0.25, backend=None):
    """Dispatch to the selected backend ("numba" | "numpy" | None=auto)."""
    if backend is None:
        backend = "numba" if HAVE_NUMBA else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return step_block_numba(u, coeffs, dx, dt, nsteps, bcl, bcr,
                                bc_mode, cfl_limit)
    if backend == "numpy":
        return step_block_numpy(u, coeffs, dx, dt, nsteps, bcl, bcr,
                                bc_mode, cfl_limit)
    raise ValueError(f"unknown backend {backend!r}")
