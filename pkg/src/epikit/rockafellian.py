"""Rockafellian models: builders, tilting, augmentation, exactness and tightness checks.

A model is an evaluator ``(U, X) -> values`` vectorized over rows: ``U`` has
shape ``(N, m)``, ``X`` has shape ``(N, n)`` (either may have a single row and
broadcast). Component functions follow the same convention: a scalar
component maps ``(N, k)`` to ``(N,)``, a vector component ``G`` maps
``(N, n)`` to ``(N, m)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .funcgrid import Grid, GriddedFunction
from .geometry import POS_INF, Inner, NormSpec, norm_eval, xr_add

Evaluator = Callable[[np.ndarray], np.ndarray]

# Slack allowed when testing inequality constraints on grid nodes.
FEAS_TOL = 1e-9


class Family(str, enum.Enum):
    COMPOSITE = "COMPOSITE"
    INEQUALITY = "INEQUALITY"
    CONSTRAINT_COMPOSITE = "CONSTRAINT_COMPOSITE"
    AMBIGUITY = "AMBIGUITY"
    SPLITTING = "SPLITTING"
    AUGMENTED = "AUGMENTED"
    CUSTOM = "CUSTOM"


def as_evaluator(obj) -> Evaluator:
    """Accept a vectorized callable or a :class:`GriddedFunction` (interpolated)."""
    if isinstance(obj, GriddedFunction):
        return obj.interp
    if callable(obj):
        return obj
    raise TypeError(f"cannot evaluate {obj!r}")


def _rows(a, width: int) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim <= 1:
        arr = arr.reshape(1, -1) if arr.size == width else arr.reshape(-1, width)
    if arr.shape[1] != width:
        raise ValueError(f"expected {width} columns, got {arr.shape[1]}")
    return arr


def _scalar(vals) -> np.ndarray:
    return np.asarray(vals, dtype=float).reshape(-1)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box, used as the set X in composite models."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def indicator(self, X: np.ndarray) -> np.ndarray:
        inside = np.all((X >= np.asarray(self.lo) - FEAS_TOL) & (X <= np.asarray(self.hi) + FEAS_TOL), axis=1)
        return np.where(inside, 0.0, POS_INF)


@dataclass(frozen=True)
class RockafellianModel:
    m: int
    n: int
    family: Family
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    params: dict[str, Any] = field(default_factory=dict, repr=False)

    def batch(self, U, X) -> np.ndarray:
        U = _rows(U, self.m)
        X = _rows(X, self.n)
        if len(U) != len(X):
            if len(U) == 1:
                U = np.repeat(U, len(X), axis=0)
            elif len(X) == 1:
                X = np.repeat(X, len(U), axis=0)
            else:
                raise ValueError("row counts of U and X differ")
        vals = _scalar(self.fn(U, X))
        if np.isnan(vals).any():
            raise ValueError("model evaluation produced NaN")
        return vals

    def eval(self, u, x) -> float:
        return float(self.batch(np.reshape(u, (1, self.m)), np.reshape(x, (1, self.n)))[0])

    def objective(self, X) -> np.ndarray:
        """phi(x) = f(0, x)."""
        X = _rows(X, self.n)
        return self.batch(np.zeros((1, self.m)), X)

    def table(self, u_grid: Grid, x_grid: Grid, chunk: int = 4_000_000) -> np.ndarray:
        """Values on the product grid as an array of shape ``(|u_grid|, |x_grid|)``."""
        U = u_grid.points()
        X = x_grid.points()
        out = np.empty((len(U), len(X)))
        rows = max(1, chunk // max(1, len(X)))
        for s in range(0, len(U), rows):
            blk = U[s:s + rows]
            UU = np.repeat(blk, len(X), axis=0)
            XX = np.tile(X, (len(blk), 1))
            out[s:s + rows] = self.batch(UU, XX).reshape(len(blk), len(X))
        return out

    def tabulate(self, u_grid: Grid, x_grid: Grid) -> GriddedFunction:
        grid = Grid.product(u_grid, x_grid)
        return GriddedFunction(grid, self.table(u_grid, x_grid))


# ------------------------------------------------------------------ builders


def tilt(f: RockafellianModel, y) -> RockafellianModel:
    """f_y(u, x) = f(u, x) - <y, u>."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(y) != f.m:
        raise ValueError("multiplier dimension mismatch")

    def fn(U, X):
        return xr_add(f.fn(U, X), -(U @ y))

    return RockafellianModel(f.m, f.n, f.family, fn, {**f.params, "tilt": y, "base": f})


def build_composite(X: Box | None, g0, G, h, n: int, m: int) -> RockafellianModel:
    """iota_X(x) + g0(x) + h(G(x) + u)."""
    g0e, Ge, he = as_evaluator(g0), as_evaluator(G), as_evaluator(h)

    def fn(U, Xs):
        z = np.asarray(Ge(Xs), dtype=float).reshape(len(Xs), m) + U
        val = xr_add(_scalar(g0e(Xs)), _scalar(he(z)))
        if X is not None:
            val = xr_add(X.indicator(Xs), val)
        return val

    params = {"X": X, "g0": g0e, "G": Ge, "h": he}
    return RockafellianModel(m, n, Family.COMPOSITE, fn, params)


def _nonpos_indicator(z: np.ndarray) -> np.ndarray:
    return np.where(z <= FEAS_TOL, 0.0, POS_INF)


def build_constraint_family(kind: Family | str, n: int, **parts) -> RockafellianModel:
    """Constraint-perturbing Rockafellians.

    ``INEQUALITY`` takes ``g0`` and a list ``gs`` of constraint functions;
    ``u = (v0, v1..vm, w1..wm)`` has dimension ``n(m+1) + m``.
    ``CONSTRAINT_COMPOSITE`` takes ``g0``, ``G`` (values in R^m), ``h`` and ``m``;
    ``u = (v, w)`` has dimension ``m + 1``.
    """
    kind = Family(kind)
    if kind is Family.INEQUALITY:
        g0 = as_evaluator(parts["g0"])
        gs = [as_evaluator(g) for g in parts["gs"]]
        m = len(gs)
        dim_u = n * (m + 1) + m

        def fn(U, X):
            val = _scalar(g0(X + U[:, :n]))
            for i, gi in enumerate(gs, start=1):
                v = U[:, i * n:(i + 1) * n]
                w = U[:, n * (m + 1) + i - 1]
                val = xr_add(val, _nonpos_indicator(_scalar(gi(X + v)) + w))
            return val

        return RockafellianModel(dim_u, n, kind, fn, {"g0": g0, "gs": gs})
    if kind is Family.CONSTRAINT_COMPOSITE:
        g0, G, h = (as_evaluator(parts[k]) for k in ("g0", "G", "h"))
        m = int(parts["m"])

        def fn(U, X):
            z = np.asarray(G(X), dtype=float).reshape(len(X), m) + U[:, :m]
            inner = _scalar(h(z)) + U[:, m]
            return xr_add(_scalar(g0(X)), _nonpos_indicator(inner))

        return RockafellianModel(m + 1, n, kind, fn, {"g0": g0, "G": G, "h": h})
    raise ValueError(f"not a constraint family: {kind}")


def check_simplex(p, tol: float = 1e-12) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise ValueError(f"weights {p.tolist()} are not a probability vector")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def build_ambiguity(g0, gs: Sequence, p, theta: float, n: int) -> RockafellianModel:
    """g0 + sum (p_i + u_i) g_i + theta/2 |u|^2 restricted to -p <= u <= 0."""
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    p = check_simplex(p)
    g0e = as_evaluator(g0)
    ges = [as_evaluator(g) for g in gs]
    if len(ges) != len(p):
        raise ValueError("one weight per component function")

    def fn(U, X):
        val = _scalar(g0e(X))
        ok = np.all((U <= FEAS_TOL) & (U + p >= -FEAS_TOL), axis=1)
        for i, gi in enumerate(ges):
            gv = _scalar(gi(X))
            w = p[i] + U[:, i]
            with np.errstate(invalid="ignore"):
                term = np.where(np.abs(w) <= FEAS_TOL, 0.0, w * gv)
            val = xr_add(val, term)
        val = val + 0.5 * theta * np.sum(U * U, axis=1)
        return np.where(ok, val, POS_INF)

    return RockafellianModel(len(p), n, Family.AMBIGUITY, fn,
                             {"g0": g0e, "gs": ges, "p": p, "theta": float(theta)})


def build_splitting(gs: Sequence, p, n: int) -> RockafellianModel:
    """sum p_i g_i(x + u_i); zero weights drop their term entirely."""
    p = check_simplex(p)
    ges = [as_evaluator(g) for g in gs]
    if len(ges) != len(p):
        raise ValueError("one weight per component function")
    m = len(p)

    def fn(U, X):
        val = np.zeros(len(X))
        for i, gi in enumerate(ges):
            if p[i] == 0:
                continue
            val = xr_add(val, p[i] * _scalar(gi(X + U[:, i * n:(i + 1) * n])))
        return val

    return RockafellianModel(m * n, n, Family.SPLITTING, fn, {"gs": ges, "p": p, "blocks": m})


class AugKind(str, enum.Enum):
    INDICATOR_ZERO = "INDICATOR_ZERO"
    PROX = "PROX"
    POWER = "POWER"


@dataclass(frozen=True)
class AugmentationSpec:
    kind: AugKind
    theta: float = 0.0
    alpha: float = 1.0
    inner: Inner = Inner.L2

    def __post_init__(self):
        object.__setattr__(self, "kind", AugKind(self.kind))
        object.__setattr__(self, "inner", Inner(self.inner))
        if self.theta < 0 or self.alpha <= 0:
            raise ValueError("need theta >= 0 and alpha > 0")

    def __call__(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(U)
        if self.kind is AugKind.INDICATOR_ZERO:
            return np.where(np.all(np.abs(U) <= FEAS_TOL, axis=1), 0.0, POS_INF)
        if self.kind is AugKind.PROX:
            return self.theta * np.sum(U * U, axis=1)
        nrm = norm_eval(NormSpec(((U.shape[1], self.inner if U.shape[1] > 1 else Inner.ABS),)), U)
        return self.theta * nrm ** self.alpha


def augment(f: RockafellianModel, a: AugmentationSpec) -> RockafellianModel:
    def fn(U, X):
        return xr_add(f.fn(U, X), a(U))

    return RockafellianModel(f.m, f.n, Family.AUGMENTED, fn, {"base": f, "aug": a})


# ------------------------------------------------------- min-value function


def min_value_function(f: RockafellianModel, u_grid: Grid, x_grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """v(u) = min over x probes of f(u, x) on the u grid, with the argmin x index."""
    F = f.table(u_grid, x_grid)
    idx = np.argmin(F, axis=1)
    return F[np.arange(len(F)), idx], idx


@dataclass
class ExactnessReport:
    supported_by: np.ndarray
    min_slack: float
    exact: bool
    strict: bool
    tol: float
    inf_phi: float
    worst_u: np.ndarray
    u_box: tuple
    x_box: tuple


def check_exactness(f: RockafellianModel, y, u_grid: Grid, x_grid: Grid,
                    inf_err: float = 0.0, strict_margin: float = 1e-6) -> ExactnessReport:
    """Probe the exactness inequality v(u) >= inf phi + <y, u> on a u grid.

    ``inf_err`` bounds how far the grid scan over x may sit above the true
    infimum; the tolerance is ``1e-9 + 2 * inf_err``.
    """
    return scan_exactness(f, [y], u_grid, x_grid, inf_err, strict_margin)[0]


def scan_exactness(f: RockafellianModel, ys, u_grid: Grid, x_grid: Grid,
                   inf_err: float = 0.0, strict_margin: float = 1e-6) -> list[ExactnessReport]:
    """:func:`check_exactness` for several multipliers, sharing one min-value table."""
    ys = [np.asarray(y, dtype=float).reshape(-1) for y in ys]
    if any(len(y) != f.m for y in ys):
        raise ValueError("multiplier dimension mismatch")
    inf_phi = float(np.min(f.objective(x_grid.points())))
    if inf_phi == -np.inf:
        raise ValueError("inf phi is -inf; exactness is undecidable")
    v, _ = min_value_function(f, u_grid, x_grid)
    U = u_grid.points()
    tol = 1e-9 + 2 * inf_err
    nonzero = np.linalg.norm(U, axis=1) > 1e-12
    strict_floor = max(tol, strict_margin)
    out = []
    for y in ys:
        slack = xr_add(xr_add(v, -inf_phi), -(U @ y))
        k = int(np.argmin(slack))
        strict = bool(np.all(slack[nonzero] > strict_floor)) if nonzero.any() else True
        min_slack = float(slack[k])
        out.append(ExactnessReport(y, min_slack, min_slack >= -tol, strict and min_slack >= -tol, tol, inf_phi,
                                   U[k], u_grid.box, x_grid.box))
    return out


def ambiguity_support_vector(model: RockafellianModel, eta: float, x_grid: Grid, margin: float = 1e-6) -> np.ndarray:
    """Multiplier from the strict-exactness construction for the ambiguity family.

    ``y_i = (2 inf phi + 4 eta) / alpha + margin`` where ``p_i > 0`` and
    ``alpha`` is the smallest positive weight; ``y_i = margin`` otherwise.
    """
    if model.family is not Family.AMBIGUITY:
        raise ValueError("model is not an ambiguity Rockafellian")
    X = x_grid.points()
    comps = [model.params["g0"], *model.params["gs"]]
    for g in comps:
        if np.min(_scalar(g(X))) < -eta - 1e-12:
            raise ValueError("a component dips below -eta on the probe grid")
    delta0 = float(np.min(model.objective(X)))
    if not np.isfinite(delta0):
        raise ValueError("inf phi is not finite")
    p = model.params["p"]
    alpha = float(p[p > 0].min())
    big = (2 * delta0 + 4 * eta) / alpha
    return np.where(p > 0, big + margin, margin)


# --------------------------------------------------------------- tightness


@dataclass
class TightnessReport:
    mode: str
    passed: bool
    radii: list[float] = field(default_factory=list)
    box_radius: float = 0.0
    margin: float = 0.0
    constants: dict[str, float] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)


def _inner_radius(u_grid: Grid) -> float:
    return float(min(min(abs(lo), abs(hi)) for lo, hi in u_grid.box))


def tightness_diagnostic(models: Sequence[RockafellianModel], y_seq, x_seq, u_grid: Grid,
                         mode: str = "EMPIRICAL", gamma: float | None = None, beta: float | None = None,
                         tau: float | None = None, theta: float | None = None,
                         margin: float | None = None) -> TightnessReport:
    """Finite check that minimisers in u stay in a fixed bounded set.

    EMPIRICAL: for each model the smallest-norm minimiser of
    ``u -> f_y(u, x)`` must stay ``margin`` inside the probe box.
    CERTIFICATE: checks ``f(u, x) >= gamma - beta |u|^2`` on the grid and the
    existence of ``u`` with ``|u| <= tau`` and ``f(u, x) <= tau``; ``beta``
    must be positive and, when ``theta`` is given, below it.
    """
    if not (len(models) == len(y_seq) == len(x_seq)):
        raise ValueError("sequences must have equal length")
    U = u_grid.points()
    if len(U) == 0:
        raise ValueError("empty probe box")
    margin = 2 * u_grid.max_step if margin is None else margin
    box_r = _inner_radius(u_grid)
    if mode == "EMPIRICAL":
        rep = TightnessReport("EMPIRICAL", True, box_radius=box_r, margin=margin)
        for k, (f, y, x) in enumerate(zip(models, y_seq, x_seq)):
            vals = tilt(f, y).batch(U, np.reshape(x, (1, f.n)))
            best = vals.min()
            if not np.isfinite(best):
                rep.passed = False
                rep.radii.append(POS_INF)
                rep.failures.append(f"index {k}: minimum {best}")
                continue
            near = vals <= best + 1e-12 * max(1.0, abs(best))
            r = float(np.abs(U[near]).max(axis=1).min())
            rep.radii.append(r)
            if r > box_r - margin:
                rep.passed = False
                rep.failures.append(f"index {k}: minimiser at sup-norm {r:.6g}")
        return rep
    if mode == "CERTIFICATE":
        if None in (gamma, beta, tau):
            raise ValueError("certificate mode needs gamma, beta and tau")
        rep = TightnessReport("CERTIFICATE", True, constants={"gamma": gamma, "beta": beta, "tau": tau},
                              box_radius=box_r, margin=margin)
        if beta <= 0 or (theta is not None and beta >= theta):
            rep.passed = False
            rep.failures.append("beta must lie strictly between 0 and theta")
        sq = np.sum(U * U, axis=1)
        for k, (f, x) in enumerate(zip(models, x_seq)):
            vals = f.batch(U, np.reshape(x, (1, f.n)))
            if np.any(vals < gamma - beta * sq - 1e-12):
                rep.passed = False
                rep.failures.append(f"index {k}: quadratic minorant violated")
            if not np.any((np.sqrt(sq) <= tau) & (vals <= tau)):
                rep.passed = False
                rep.failures.append(f"index {k}: no u with |u| <= tau and f <= tau")
        return rep
    raise ValueError(f"unknown mode {mode!r}")
