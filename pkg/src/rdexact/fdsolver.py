"""Method-of-lines evolution for cross-validating exact solutions.

Explicit RK4 over second-order central differences, with a CFL guard
dt <= cfl_limit * dx^2 / max|k_eff|, k_eff = (k0+k1 u)/(1+b1 u+b2 u^2),
re-checked each step. Boundary values are sampled from the exact solution
under test (isolating interior-scheme error) or mirror-reflected (zero flux).

The stepping kernel is numba-compiled when available; RDEXACT_NO_NUMBA=1
selects the pure-numpy fallback (see _kernels).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import BC_DIRICHLET, BC_NEUMANN, HAVE_NUMBA, step_block
from .equations import PdeCoefficients
from .errors import GridMismatch, NonparabolicAbort, StabilityAbort
from .fields import ScalarField, eval_jet

_COEFF_NAMES = ("b1", "b2", "h1", "h2", "h3", "g0", "k0", "k1",
                "phi1", "phi2", "phi3", "phi4")


@dataclass
class GridSolution:
    xs: np.ndarray
    ts: np.ndarray
    values: np.ndarray          # (nt, nx)
    dt: float
    dx: float
    backend: str
    cfl_limit: float
    scheme: str = "RK4 / central second-order"

    def export_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "u"])
            for it, tv in enumerate(self.ts):
                for ix, xv in enumerate(self.xs):
                    w.writerow([repr(float(tv)), repr(float(xv)),
                                repr(float(self.values[it, ix]))])

    def summary_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "backend": self.backend,
            "dx": self.dx,
            "dt": self.dt,
            "nx": len(self.xs),
            "nt": len(self.ts),
            "t_span": [float(self.ts[0]), float(self.ts[-1])],
            "x_span": [float(self.xs[0]), float(self.xs[-1])],
            "cfl_limit": self.cfl_limit,
        }


@dataclass
class ErrorNorms:
    ts: np.ndarray
    linf: np.ndarray
    l2: np.ndarray

    @property
    def linf_overall(self) -> float:
        return float(self.linf.max())

    @property
    def l2_overall(self) -> float:
        return float(self.l2.max())


def _coeff_arrays(c: PdeCoefficients, xs, t0, t1):
    arrays = []
    for name in _COEFF_NAMES:
        v = getattr(c, name)
        if isinstance(v, ScalarField):
            a0 = np.broadcast_to(np.asarray(
                eval_jet(v, xs, np.full_like(xs, t0)).value, dtype=float),
                xs.shape).copy()
            a1 = np.broadcast_to(np.asarray(
                eval_jet(v, xs, np.full_like(xs, t1)).value, dtype=float),
                xs.shape)
            if np.max(np.abs(a1 - a0)) > 1e-12 * (1.0 + np.max(np.abs(a0))):
                raise NotImplementedError(
                    f"coefficient {name} is time-dependent; the explicit "
                    "evolver supports x-dependent coefficients only")
            arrays.append(a0)
        else:
            arrays.append(np.full(xs.shape, float(np.real(v))))
    return tuple(arrays)


def evolve(c: PdeCoefficients, u0: ScalarField, x_span=(-10.0, 10.0),
           dx: float = 0.05, t_span=(0.0, 1.0), n_save: int = 21,
           bc: str = "dirichlet-from-exact", exact: ScalarField | None = None,
           backend: str | None = None, safety: float = 0.5,
           cfl_limit: float = 0.25) -> GridSolution:
    """Evolve the equation from u0 sampled at t_span[0].

    bc is "dirichlet-from-exact" (boundary values from the exact field, which
    defaults to u0) or "neumann-zero". Raises StabilityAbort when the stable
    step underflows 1e-9 and NonparabolicAbort when the effective diffusivity
    loses positivity.
    """
    if bc not in ("dirichlet-from-exact", "neumann-zero"):
        raise ValueError(f"unknown boundary condition {bc!r}")
    exact = exact if exact is not None else u0
    t0, t1 = float(t_span[0]), float(t_span[1])
    nx = int(round((x_span[1] - x_span[0]) / dx)) + 1
    xs = np.linspace(x_span[0], x_span[1], nx)
    dx = float(xs[1] - xs[0])
    coeffs = _coeff_arrays(c, xs, t0, 0.5 * (t0 + t1))
    u = np.asarray(eval_jet(u0, xs, np.full_like(xs, t0)).value,
                   dtype=float).copy()
    u = np.broadcast_to(u, xs.shape).copy()

    b1, b2 = coeffs[0], coeffs[1]
    k0, k1 = coeffs[6], coeffs[7]
    keff = (k0 + k1 * u) / (1.0 + b1 * u + b2 * u * u)
    if keff.min() <= 0.0:
        raise NonparabolicAbort(
            f"effective diffusivity min {keff.min():.3e} <= 0 at t0 "
            "(inverse-parabolic regime)")
    dt_bound = cfl_limit * dx * dx / np.abs(keff).max()

    ts = np.linspace(t0, t1, n_save) if t1 > t0 else np.array([t0])
    values = np.zeros((len(ts), nx))
    values[0] = u
    bc_mode = BC_DIRICHLET if bc == "dirichlet-from-exact" else BC_NEUMANN
    used_backend = backend or ("numba" if HAVE_NUMBA else "numpy")

    dt_used = float("nan")
    for seg in range(len(ts) - 1):
        ta, tb = float(ts[seg]), float(ts[seg + 1])
        seg_len = tb - ta
        nsub = max(1, int(math.ceil(seg_len / (safety * dt_bound))))
        while True:
            dt = seg_len / nsub
            if dt < 1e-9:
                raise StabilityAbort(
                    f"stable step underflow: dt = {dt:.3e} < 1e-9")
            stage_t = ta + dt * np.arange(nsub)[:, None] + \
                dt * np.array([0.0, 0.5, 1.0])[None, :]
            if bc_mode == BC_DIRICHLET:
                flat = stage_t.ravel()
                bcl = np.broadcast_to(np.asarray(eval_jet(
                    exact, np.full_like(flat, xs[0]), flat).value,
                    dtype=float), flat.shape).reshape(nsub, 3).copy()
                bcr = np.broadcast_to(np.asarray(eval_jet(
                    exact, np.full_like(flat, xs[-1]), flat).value,
                    dtype=float), flat.shape).reshape(nsub, 3).copy()
            else:
                bcl = np.zeros((nsub, 3))
                bcr = np.zeros((nsub, 3))
            trial = u.copy()
            status = step_block(trial, coeffs, dx, dt, nsub, bcl, bcr,
                                bc_mode, cfl_limit, backend=used_backend)
            if status == 0:
                u = trial
                dt_used = dt
                break
            if status == 2:
                raise NonparabolicAbort(
                    "effective diffusivity lost positivity during evolution")
            nsub *= 2  # CFL bound tightened mid-segment: refine and retry
        values[seg + 1] = u
    return GridSolution(xs=xs, ts=ts, values=values, dt=dt_used, dx=dx,
                        backend=used_backend, cfl_limit=cfl_limit)


def compare(exact, numeric: GridSolution) -> ErrorNorms:
    """Error norms of a numeric solution against an exact field (or another
    GridSolution on the identical grid)."""
    if isinstance(exact, GridSolution):
        if exact.values.shape != numeric.values.shape or \
                not np.allclose(exact.xs, numeric.xs) or \
                not np.allclose(exact.ts, numeric.ts):
            raise GridMismatch("solutions live on different grids")
        diff = np.abs(exact.values - numeric.values)
    else:
        X, T = np.meshgrid(numeric.xs, numeric.ts)
        ref = np.asarray(eval_jet(exact, X, T).value, dtype=float)
        diff = np.abs(ref - numeric.values)
    linf = diff.max(axis=1)
    l2 = np.sqrt((diff * diff).mean(axis=1))
    return ErrorNorms(ts=numeric.ts, linf=linf, l2=l2)


def export_comparison_csv(path, exact, numeric: GridSolution) -> None:
    """CSV of numeric vs exact values with an error-norm footer."""
    X, T = np.meshgrid(numeric.xs, numeric.ts)
    ref = np.asarray(eval_jet(exact, X, T).value, dtype=float)
    norms = compare(exact, numeric)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "u_numeric", "u_exact"])
        for it, tv in enumerate(numeric.ts):
            for ix, xv in enumerate(numeric.xs):
                w.writerow([repr(float(tv)), repr(float(xv)),
                            repr(float(numeric.values[it, ix])),
                            repr(float(ref[it, ix]))])
        fh.write(f"# Linf={norms.linf_overall!r} L2={norms.l2_overall!r}\n")
        fh.write(f"# summary={json.dumps(numeric.summary_json())}\n")
