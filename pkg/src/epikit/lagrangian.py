"""Lagrangians and dual functions, numeric and closed form.

Numeric values minimise the tilted model over finite probe grids. When the
minimiser sits on the probe boundary and one more step outward still
decreases the value, the grid minimum is a truncation artefact; such entries
are reported as ``-inf`` and flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .funcgrid import Grid, GriddedFunction
from .geometry import POS_INF, xr_add
from .rockafellian import Family, RockafellianModel, _scalar

HUGE = 1e12


def _outward_steps(grid: Grid, idx_flat: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """For nodes on the box boundary, the points one step outside, per boundary axis.

    Returns ``(row_ids, points)`` pairs; ``row_ids`` index into ``idx_flat``.
    """
    multi = np.stack(np.unravel_index(idx_flat, grid.shape), axis=1)
    pts = grid.points()[idx_flat]
    h = grid.spacing
    out = []
    for ax in range(grid.dim):
        for side, sign in ((0, -1.0), (grid.steps[ax] - 1, 1.0)):
            rows = np.nonzero(multi[:, ax] == side)[0]
            if len(rows):
                p = pts[rows].copy()
                p[:, ax] += sign * h[ax]
                out.append((rows, p))
    return out


def _rel(v: np.ndarray) -> np.ndarray:
    return 1e-12 * np.maximum(1.0, np.abs(v))


@dataclass
class LagrangianTable:
    values: GriddedFunction
    suspect: np.ndarray
    argmin_u: np.ndarray


def lagrangian_table(f: RockafellianModel, y, x_grid: Grid, u_grid: Grid) -> LagrangianTable:
    """l(x, y) at every x node by minimising over the u probes."""
    y = np.asarray(y, dtype=float).reshape(-1)
    U = u_grid.points()
    X = x_grid.points()
    F = f.table(u_grid, x_grid) if len(X) else np.empty((len(U), 0))
    T = xr_add(F, -(U @ y)[:, None])
    k = np.argmin(T, axis=0)
    vals = T[k, np.arange(len(X))]
    suspect = np.zeros(len(X), dtype=bool)
    for rows, up in _outward_steps(u_grid, k):
        live = np.isfinite(vals[rows])
        if not live.any():
            continue
        rows, up = rows[live], up[live]
        out = xr_add(f.batch(up, X[rows]), -(up @ y))
        suspect[rows] |= out < vals[rows] - _rel(vals[rows])
    vals = np.where(suspect, -np.inf, vals)
    return LagrangianTable(GriddedFunction(x_grid, vals), suspect.reshape(x_grid.shape), U[k])


def lagrangian_numeric(f: RockafellianModel, x, y, u_grid: Grid) -> float:
    """l(x, y) = min over u probes of f(u, x) - <y, u>; ``-inf`` if truncated by the probe box."""
    U = u_grid.points()
    if len(U) == 0:
        raise ValueError("empty probe set")
    y = np.asarray(y, dtype=float).reshape(-1)
    x = np.reshape(np.asarray(x, dtype=float), (1, f.n))
    vals = xr_add(f.batch(U, x), -(U @ y))
    k = int(np.argmin(vals))
    best = float(vals[k])
    if np.isfinite(best):
        for _, up in _outward_steps(u_grid, np.array([k])):
            out = xr_add(f.batch(up, x), -(up @ y))
            if np.any(out < best - _rel(np.array(best))):
                return -np.inf
    return best


def lagrangian_composite_closed(g0, G, h_conj: GriddedFunction, x, y, X=None) -> float:
    """iota_X(x) + g0(x) + <G(x), y> - h*(y), with h* read from a conjugate table."""
    y = np.asarray(y, dtype=float).reshape(1, -1)
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if not h_conj.grid.contains(y).all():
        raise ValueError("y lies outside the conjugate table")
    hstar = float(h_conj.interp(y)[0])
    base = float(_scalar(g0(x))[0]) + float(np.asarray(G(x), dtype=float).reshape(-1) @ y[0])
    if X is not None:
        base = xr_add(float(X.indicator(x)[0]), base)
    return xr_add(base, -hstar)


def ambiguity_terms(gv: np.ndarray, y: np.ndarray, p: np.ndarray, theta: float) -> np.ndarray:
    """Per-component minimum of (p_i + u_i) g_i + theta/2 u_i^2 - y_i u_i over u_i in [-p_i, 0]."""
    if theta == 0:
        return p * np.minimum(gv, y)
    upper = y + theta * p
    mid = p * gv - (y - gv) ** 2 / (2 * theta)
    hi = 0.5 * theta * p ** 2 + y * p
    return np.where(gv > upper, hi, np.where(gv >= y, mid, p * gv))


def lagrangian_ambiguity_closed(model: RockafellianModel, x, y) -> float:
    if model.family is not Family.AMBIGUITY:
        raise ValueError("model is not an ambiguity Rockafellian")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    y = np.asarray(y, dtype=float).reshape(-1)
    gv = np.array([float(_scalar(g(x))[0]) for g in model.params["gs"]])
    g0 = float(_scalar(model.params["g0"](x))[0])
    return g0 + float(np.sum(ambiguity_terms(gv, y, model.params["p"], model.params["theta"])))


def lagrangian_splitting_closed(model: RockafellianModel, x, y_blocks, conj_tables) -> float:
    """-sum p_i g_i*(y_i / p_i) + <x, sum y_i>; every weight must be positive."""
    if model.family is not Family.SPLITTING:
        raise ValueError("model is not a splitting Rockafellian")
    p = model.params["p"]
    if np.any(p <= 0):
        raise ValueError("closed form needs every weight positive")
    n = model.n
    yb = np.asarray(y_blocks, dtype=float).reshape(len(p), n)
    x = np.asarray(x, dtype=float).reshape(-1)
    total = float(x @ yb.sum(axis=0))
    for pi, yi, tab in zip(p, yb, conj_tables):
        s = (yi / pi).reshape(1, -1)
        if not tab.grid.contains(s).all():
            raise ValueError("scaled multiplier outside the conjugate table")
        total = xr_add(total, -pi * float(tab.interp(s)[0]))
    return total


@dataclass
class DualFunction:
    source: RockafellianModel
    values: GriddedFunction
    suspect: np.ndarray
    argmin_u: np.ndarray
    argmin_x: np.ndarray
    u_grid: Grid
    x_grid: Grid
    meta: dict = field(default_factory=dict)

    @property
    def finite_mask(self) -> np.ndarray:
        return self.values.values > -HUGE

    def dom_points(self) -> np.ndarray:
        return self.values.grid.points()[self.finite_mask.ravel()]


def _least_norm_argmin(T: np.ndarray, norms: np.ndarray) -> np.ndarray:
    """Row-wise argmin of ``T``, ties (relative 1e-12) broken toward the smallest ``norms`` entry."""
    best = T.min(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        tied = T <= best + _rel(best)
    tied |= T == best
    return np.argmin(np.where(tied, norms[None, :], np.inf), axis=1)


def dual_numeric(f: RockafellianModel, y_grid: Grid, u_grid: Grid, x_grid: Grid) -> DualFunction:
    """psi(y) = min over the joint (u, x) probes of f(u, x) - <y, u>, tabulated on y_grid."""
    U = u_grid.points()
    X = x_grid.points()
    F = f.table(u_grid, x_grid)
    kx = _least_norm_argmin(F, np.linalg.norm(X, axis=1))
    v = F[np.arange(len(U)), kx]
    Y = y_grid.points()
    T = xr_add(v[None, :], -(Y @ U.T))
    joint = np.maximum(np.linalg.norm(U, axis=1), np.linalg.norm(X[kx], axis=1))
    ku = _least_norm_argmin(T, joint)
    psi = T[np.arange(len(Y)), ku]
    suspect = np.zeros(len(Y), dtype=bool)
    finite = np.isfinite(psi)
    # one step outside the u box, re-minimising over x
    for rows, up in _outward_steps(u_grid, ku):
        rows, up = rows[finite[rows]], up[finite[rows]]
        if not len(rows):
            continue
        uniq, inv = np.unique(up, axis=0, return_inverse=True)
        vo = np.array([f.batch(np.repeat(uu[None, :], len(X), axis=0), X).min() for uu in uniq])[inv.reshape(-1)]
        out = xr_add(vo, -np.sum(Y[rows] * up, axis=1))
        suspect[rows] |= out < psi[rows] - _rel(psi[rows])
    # one step outside the x box at the minimising u
    ustar = U[ku]
    for rows, xp in _outward_steps(x_grid, kx[ku]):
        sel = finite[rows]
        rows, xp = rows[sel], xp[sel]
        if not len(rows):
            continue
        out = xr_add(f.batch(ustar[rows], xp), -np.sum(Y[rows] * ustar[rows], axis=1))
        suspect[rows] |= out < psi[rows] - _rel(psi[rows])
    psi = np.where(suspect, -np.inf, psi)
    return DualFunction(f, GriddedFunction(y_grid, psi), suspect.reshape(y_grid.shape),
                        U[ku], X[kx[ku]], u_grid, x_grid)


def dual_affine_closed(g0_conj: GriddedFunction, A, b, y) -> float:
    """psi(y) = -<b, y> - g0*(-A^T y) for X = R^n, G(x) = Ax - b, h the indicator of {0}."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    z = (-A.T @ y).reshape(1, -1)
    if not g0_conj.grid.contains(z).all():
        raise ValueError("-A^T y lies outside the conjugate table")
    return xr_add(-float(b @ y), -float(g0_conj.interp(z)[0]))


@dataclass
class WeakDualityReport:
    sup_psi: float
    inf_phi: float
    violation: float
    tol: float
    passed: bool
    gap: float
    degenerate: bool = False


def weak_duality_check(psi: DualFunction | GriddedFunction, inf_phi: float, tol: float = 1e-9) -> WeakDualityReport:
    """sup psi <= inf phi + tol over the tabulated multipliers."""
    vals = psi.values.values if isinstance(psi, DualFunction) else psi.values
    sup_psi = float(np.max(vals))
    if inf_phi == POS_INF or sup_psi == -np.inf:
        return WeakDualityReport(sup_psi, inf_phi, 0.0, tol, True, POS_INF, degenerate=True)
    violation = max(0.0, sup_psi - inf_phi)
    return WeakDualityReport(sup_psi, inf_phi, violation, tol, violation <= tol, inf_phi - sup_psi)
