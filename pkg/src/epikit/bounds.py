"""Both sides of the quantitative epi-distance inequalities, evaluated on grids.

Each ``bound_*`` function takes tabulated functions on shared grids, picks
the smallest admissible auxiliary radii, and returns a :class:`BoundReport`.
Distances between epigraphs come from :func:`~epikit.funcgrid.epi_distance`,
which is exact for the grid-restricted functions; ``tol`` (twice the largest
grid step involved, unless overridden) absorbs the gap to continuous sets.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .funcgrid import Grid, GriddedFunction, epi_distance, infimum_argmin, level_set, lipschitz_modulus
from .geometry import POS_INF, Inner, NormSpec, PointCloud, excess, norm_eval, truncated_hausdorff, xr_add
from .lagrangian import DualFunction
from .rockafellian import AugKind, AugmentationSpec

# Strict inequalities on radii are met by stepping this far past the bound.
STRICT = 1e-9


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INAPPLICABLE = "INAPPLICABLE"


@dataclass
class RadiusBudget:
    rho: float
    derived: dict[str, float] = field(default_factory=dict)
    admissible: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.admissible.values())


@dataclass
class BoundReport:
    theorem: str
    lhs: float
    rhs: float
    tol: float
    radii: RadiusBudget
    ingredients: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    forced_inapplicable: bool = False

    @property
    def slack(self) -> float:
        return xr_add(xr_add(self.rhs, self.tol), -self.lhs) if self.lhs != POS_INF else -POS_INF

    @property
    def status(self) -> Status:
        if self.forced_inapplicable or not self.radii.ok:
            return Status.INAPPLICABLE
        return Status.PASS if self.slack >= 0 else Status.FAIL

    def with_tol(self, tol: float) -> "BoundReport":
        return BoundReport(self.theorem, self.lhs, self.rhs, tol, self.radii, self.ingredients,
                           self.notes, self.forced_inapplicable)


def _tol(*grids: Grid, tol: float | None = None) -> float:
    return tol if tol is not None else 2 * max(g.max_step for g in grids)


def _l2(d: int) -> tuple[int, Inner]:
    return (d, Inner.L2 if d > 1 else Inner.ABS)


def epi_norm(*dims: int, inner: Inner = Inner.L2) -> NormSpec:
    """Block max-norm with one block per entry of ``dims`` plus the height."""
    blocks = [(d, inner if d > 1 else Inner.ABS) for d in dims]
    return NormSpec(tuple(blocks) + ((1, Inner.ABS),))


def _ball_mask(grid: Grid, rho: float, norm: NormSpec | None = None) -> np.ndarray:
    norm = norm or NormSpec((_l2(grid.dim),))
    return (norm_eval(norm, grid.points()) <= rho + 1e-12).reshape(grid.shape)


def _sup_on_ball(vals: np.ndarray, grid: Grid, rho: float) -> float:
    mask = _ball_mask(grid, rho)
    return float(np.max(vals[mask])) if mask.any() else 0.0


def tilt_table(F: GriddedFunction, m: int, y) -> GriddedFunction:
    """Table of f(u, x) - <y, u> on the joint grid whose leading ``m`` axes are u."""
    y = np.asarray(y, dtype=float).reshape(-1)
    ugrid = Grid(F.grid.box[:m], F.grid.steps[:m])
    lin = (ugrid.points() @ y).reshape(ugrid.shape + (1,) * (F.dim - m))
    return F.with_values(xr_add(F.values, -lin))


def split_grid(grid: Grid, m: int) -> tuple[Grid, Grid]:
    return Grid(grid.box[:m], grid.steps[:m]), Grid(grid.box[m:], grid.steps[m:])


# ------------------------------------------------------------- approximation


def bound_minval(g: GriddedFunction, h: GriddedFunction, rho: float, eps: float, norm: NormSpec,
                 delta: float | None = None, tol: float | None = None) -> BoundReport:
    """Infima, near-minimisers and level sets of two functions versus their epi-distance.

    ``norm`` acts on (x, alpha) and must end with the ABS height block.
    Part (a) is checked when its hypotheses hold, part (b) always when
    ``eps`` is in ``[-rho, rho]``; ``delta`` defaults to the smallest
    admissible value.
    """
    xnorm = norm.without_last()
    d = epi_distance(g, h, rho, norm)
    budget = RadiusBudget(rho, {"dist": d})
    ing: dict[str, float] = {"dist": d}
    lhs_parts = []
    inf_g, arg_g = infimum_argmin(g, 0.0)
    inf_h, arg_h = infimum_argmin(h, 0.0)
    a_ok = (0 <= eps <= 2 * rho and math.isfinite(d)
            and len(arg_g.in_ball(rho, xnorm)) > 0 and len(arg_h.in_ball(rho, xnorm)) > 0
            and -rho <= inf_g <= rho - eps and -rho <= inf_h <= rho - eps)
    if a_ok:
        da = eps + 2 * d + STRICT if delta is None else delta
        if da > eps + 2 * d:
            gap = abs(inf_g - inf_h)
            near_h = infimum_argmin(h, eps)[1].in_ball(rho, xnorm)
            near_g = infimum_argmin(g, da)[1]
            ex = excess(near_h, near_g, xnorm)
            lhs_parts += [gap, ex]
            ing.update(inf_gap=gap, argmin_excess=ex, delta_a=da)
        else:
            a_ok = False
    b_ok = -rho <= eps <= rho and math.isfinite(d)
    if b_ok:
        db = eps + d + STRICT if delta is None else delta
        if db > eps + d:
            ex = excess(level_set(h, eps).in_ball(rho, xnorm), level_set(g, db), xnorm)
            lhs_parts.append(ex)
            ing.update(level_excess=ex, delta_b=db)
        else:
            b_ok = False
    budget.admissible["part_a_or_b"] = a_ok or b_ok
    budget.derived["part_a"] = float(a_ok)
    lhs = max(lhs_parts) if lhs_parts else 0.0
    return BoundReport("approximation_error", lhs, d, _tol(g.grid, tol=tol), budget, ing)


# ----------------------------------------------------------------- tilting


def bound_tilted(F: GriddedFunction, Fn: GriddedFunction, m: int, y, y_nu, rho: float,
                 tol: float | None = None) -> BoundReport:
    """dℓ_rho(epi f_y, epi f^nu_{y^nu}) against the untilted distance at rho_bar."""
    y = np.asarray(y, dtype=float).reshape(-1)
    y_nu = np.asarray(y_nu, dtype=float).reshape(-1)
    norm = epi_norm(m, F.dim - m)
    ymax = max(np.linalg.norm(y), np.linalg.norm(y_nu))
    rho_bar = rho * (1 + ymax)
    lhs = epi_distance(tilt_table(F, m, y), tilt_table(Fn, m, y_nu), rho, norm)
    d_bar = epi_distance(F, Fn, rho_bar, norm)
    rhs = xr_add((1 + ymax) * d_bar, rho * float(np.linalg.norm(y - y_nu)))
    budget = RadiusBudget(rho, {"rho_bar": rho_bar}, {"rho_bar": True})
    return BoundReport("tilted", lhs, rhs, _tol(F.grid, tol=tol), budget, {"dist_bar": d_bar, "ymax": ymax})


# --------------------------------------------------------------- composite


def bound_composite(F: GriddedFunction, Fn: GriddedFunction, m: int,
                    X: PointCloud, Xn: PointCloud,
                    g_tabs: Sequence[GriddedFunction], gn_tabs: Sequence[GriddedFunction],
                    H: GriddedFunction, Hn: GriddedFunction, rho: float,
                    tol: float | None = None) -> BoundReport:
    """Composite model: set distance, outer-function distance and component sup gaps.

    ``g_tabs`` holds g0, g1..gm tabulated on one x grid (reaching past rho');
    ``H``/``Hn`` tabulate h and h^nu on a z grid.
    """
    n = F.dim - m
    xnorm = NormSpec((_l2(n),))
    dX = truncated_hausdorff(X, Xn, rho, xnorm)
    rho_p = rho + dX + STRICT
    xgrid = g_tabs[0].grid
    kappa = max(lipschitz_modulus(t, rho_p) for t in (*g_tabs, *gn_tabs))
    G = np.stack([t.values for t in g_tabs[1:]])
    Gn = np.stack([t.values for t in gn_tabs[1:]])
    mags = np.maximum.reduce([np.abs(g_tabs[0].values), np.abs(gn_tabs[0].values),
                              np.sqrt((G ** 2).sum(axis=0)), np.sqrt((Gn ** 2).sum(axis=0))])
    rho_bar = rho + _sup_on_ball(mags, xgrid, rho)
    dH = epi_distance(H, Hn, rho_bar, epi_norm(m))
    sup_gap = max(_sup_on_ball(np.abs(a.values - b.values), xgrid, rho) for a, b in zip(g_tabs, gn_tabs))
    rm = math.sqrt(m)
    rhs = max(1.0, rm * kappa) * dX + dH + rm * sup_gap
    lhs = epi_distance(F, Fn, rho, epi_norm(m, n))
    reach = min(max(abs(lo), abs(hi)) for lo, hi in xgrid.box)
    budget = RadiusBudget(rho, {"rho_prime": rho_p, "rho_bar": rho_bar},
                          {"rho_prime": reach >= rho_p, "rho_bar": True})
    ing = {"dist_X": dX, "kappa": kappa, "dist_h": dH, "sup_gap": sup_gap}
    tol = _tol(F.grid, xgrid, H.grid, tol=tol)
    return BoundReport("composite", lhs, rhs, tol, budget, ing)


def bound_constraint_family(kind: str, F: GriddedFunction, Fn: GriddedFunction, norm: NormSpec, rho: float,
                            g_tabs: Sequence[GriddedFunction], gn_tabs: Sequence[GriddedFunction],
                            H: GriddedFunction | None = None, Hn: GriddedFunction | None = None,
                            m: int = 1, tol: float | None = None) -> BoundReport:
    """Constraint-perturbing families.

    INEQUALITY: ``g_tabs`` are g0..gm on an x grid reaching 2 rho; the right
    side is the largest of their epi-distances at 2 rho.
    CONSTRAINT_COMPOSITE: ``g_tabs`` are g0 then the m components of G;
    ``H``/``Hn`` tabulate h and h^nu.
    """
    lhs = epi_distance(F, Fn, rho, norm)
    xgrid = g_tabs[0].grid
    n = xgrid.dim
    xn = epi_norm(n)
    if kind == "INEQUALITY":
        dists = [epi_distance(a, b, 2 * rho, xn) for a, b in zip(g_tabs, gn_tabs)]
        rhs = max(dists)
        budget = RadiusBudget(rho, {"two_rho": 2 * rho}, {"two_rho": True})
        ing = {f"dist_g{i}": d for i, d in enumerate(dists)}
        return BoundReport("inequality", lhs, rhs, _tol(F.grid, xgrid, tol=tol), budget, ing)
    if kind == "CONSTRAINT_COMPOSITE":
        if H is None or Hn is None:
            raise ValueError("h tables are required")
        d0 = epi_distance(g_tabs[0], gn_tabs[0], rho, xn)
        rho_p = rho + d0 + STRICT
        kappa = max(lipschitz_modulus(t, rho_p) for t in (*g_tabs[1:], *gn_tabs[1:]))
        G = np.stack([t.values for t in g_tabs[1:]])
        Gn = np.stack([t.values for t in gn_tabs[1:]])
        gmag = np.maximum(np.sqrt((G ** 2).sum(axis=0)), np.sqrt((Gn ** 2).sum(axis=0)))
        rho_bar = rho + _sup_on_ball(gmag, xgrid, rho)
        dH = epi_distance(H, Hn, rho_bar, epi_norm(m))
        gap = _sup_on_ball(np.sqrt(((G - Gn) ** 2).sum(axis=0)), xgrid, rho_p)
        rhs = max(1.0, math.sqrt(m) * kappa) * d0 + dH + gap
        reach = min(max(abs(lo), abs(hi)) for lo, hi in xgrid.box)
        budget = RadiusBudget(rho, {"rho_prime": rho_p, "rho_bar": rho_bar},
                              {"rho_prime": reach >= rho_p, "rho_bar": True})
        ing = {"dist_g0": d0, "kappa": kappa, "dist_h": dH, "sup_G_gap": gap}
        return BoundReport("constraint_composite", lhs, rhs, _tol(F.grid, xgrid, H.grid, tol=tol), budget, ing)
    raise ValueError(f"unknown constraint family {kind!r}")


# --------------------------------------------------------- ambiguity/split


def bound_ambiguity(F: GriddedFunction, Fn: GriddedFunction, m: int, p, p_nu, theta: float, theta_nu: float,
                    eta: float, g_tabs: Sequence[GriddedFunction], rho: float,
                    tol: float | None = None) -> BoundReport:
    """Ambiguity model under the norm max{|u|_1, |x|_2, |alpha|}."""
    p = np.asarray(p, dtype=float)
    p_nu = np.asarray(p_nu, dtype=float)
    n = F.dim - m
    norm = NormSpec(((m, Inner.L1 if m > 1 else Inner.ABS), _l2(n), (1, Inner.ABS)))
    lhs = epi_distance(F, Fn, rho, norm)
    d1 = float(np.abs(p - p_nu).sum())
    d2 = float(((p - p_nu) ** 2).sum())
    rhs = max(1.0, eta + theta_nu) * d1 + 0.5 * theta_nu * d2 + 0.5 * abs(theta - theta_nu)
    eta_ok = all(float(t.values.min()) >= -eta - 1e-12 for t in g_tabs)
    budget = RadiusBudget(rho, {"eta": eta}, {"eta": eta_ok})
    return BoundReport("ambiguity", lhs, rhs, _tol(F.grid, tol=tol), budget, {"l1_gap": d1})


def bound_splitting(F: GriddedFunction, Fn: GriddedFunction, blocks: int, p, p_nu, eta: float,
                    g_tabs: Sequence[GriddedFunction], gn_tabs: Sequence[GriddedFunction], rho: float,
                    tol: float | None = None) -> BoundReport:
    """Splitting model; ``g_tabs`` must reach past rho_bar on their x grid."""
    p = np.asarray(p, dtype=float)
    p_nu = np.asarray(p_nu, dtype=float)
    xgrid = g_tabs[0].grid
    n = xgrid.dim
    pos = np.concatenate([p[p > 0], p_nu[p_nu > 0]])
    budget = RadiusBudget(rho)
    if len(pos) == 0:
        budget.admissible["beta"] = False
        return BoundReport("splitting", 0.0, 0.0, 0.0, budget)
    beta = float(pos.min())
    cap = -np.inf
    ball = _ball_mask(xgrid, 2 * rho)
    for i in range(blocks):
        if p[i] == 0:
            cap = max(cap, float(g_tabs[i].values[ball].max()))
        if p_nu[i] == 0:
            cap = max(cap, float(gn_tabs[i].values[ball].max()))
    rho_bar = max(2 * rho, (rho + eta) / beta, cap)
    xn = epi_norm(n)
    dists = [epi_distance(a, b, rho_bar, xn) for a, b in zip(g_tabs, gn_tabs)]
    lam = math.sqrt(sum((rho_bar + d) ** 2 for d in dists))
    rhs = lam * float(np.linalg.norm(p_nu - p)) + max(dists)
    norm = NormSpec(tuple([_l2(n)] * blocks) + (_l2(n), (1, Inner.ABS)))
    lhs = epi_distance(F, Fn, rho, norm)
    eta_ok = all(float(t.values.min()) >= -eta - 1e-12 for t in (*g_tabs, *gn_tabs))
    reach = min(max(abs(lo), abs(hi)) for lo, hi in xgrid.box)
    budget.derived.update(rho_bar=rho_bar, beta=beta, lam=lam)
    budget.admissible.update(eta=eta_ok, beta=True, rho_bar_grid=reach >= rho_bar)
    ing = {f"dist_g{i + 1}": d for i, d in enumerate(dists)}
    return BoundReport("splitting", lhs, rhs, _tol(F.grid, xgrid, tol=tol), budget, ing)


# ------------------------------------------------------------ augmentation


def _aug_table(a: AugmentationSpec, ugrid: Grid) -> np.ndarray:
    return a(ugrid.points()).reshape(ugrid.shape)


def bound_augmentation(F: GriddedFunction, Fn: GriddedFunction, m: int, a: AugmentationSpec,
                       a_nu: AugmentationSpec, eta: float, rho: float, tol: float | None = None) -> BoundReport:
    """Augmented models f + a versus f^nu + a^nu."""
    ugrid, _ = split_grid(F.grid, m)
    budget = RadiusBudget(rho)
    if AugKind.INDICATOR_ZERO in (a.kind, a_nu.kind):
        budget.admissible["real_valued_augmentation"] = False
        return BoundReport("augmentation", 0.0, 0.0, 0.0, budget)
    norm = epi_norm(m, F.dim - m)
    joint_ball = _ball_mask(F.grid, rho, norm.without_last())
    floor = min(float(F.values[joint_ball].min()), float(Fn.values[joint_ball].min()))
    rho_bar = max(rho, eta)
    d = epi_distance(F, Fn, rho_bar, norm)
    rho_p = rho + d + STRICT
    if a.kind is AugKind.PROX and a_nu.kind is AugKind.PROX:
        kappa = 2 * max(a.theta, a_nu.theta) * rho_p
        sup_gap = abs(a.theta - a_nu.theta) * rho_p ** 2
    else:
        fa = GriddedFunction(ugrid, _aug_table(a, ugrid))
        fb = GriddedFunction(ugrid, _aug_table(a_nu, ugrid))
        kappa = max(lipschitz_modulus(fa, rho_p), lipschitz_modulus(fb, rho_p))
        sup_gap = _sup_on_ball(np.abs(fa.values - fb.values), ugrid, rho_p)
    shape = ugrid.shape + (1,) * (F.dim - m)
    Fa = F.with_values(xr_add(F.values, _aug_table(a, ugrid).reshape(shape)))
    Fb = Fn.with_values(xr_add(Fn.values, _aug_table(a_nu, ugrid).reshape(shape)))
    lhs = epi_distance(Fa, Fb, rho, norm)
    rhs = (1 + kappa) * d + sup_gap
    budget.derived.update(rho_bar=rho_bar, rho_prime=rho_p)
    budget.admissible.update(eta=floor >= -eta - 1e-12, rho_bar=True)
    ing = {"dist_bar": d, "kappa": kappa, "sup_gap": sup_gap}
    return BoundReport("augmentation", lhs, rhs, _tol(F.grid, tol=tol), budget, ing)


# -------------------------------------------------------------- Lagrangian


def lagrangian_from_table(F: GriddedFunction, m: int, y) -> tuple[GriddedFunction, np.ndarray]:
    """l(., y) of the grid-restricted model, with the tilted table reshaped to (Nu, Nx)."""
    ugrid, xgrid = split_grid(F.grid, m)
    T = tilt_table(F, m, y).values.reshape(ugrid.size, xgrid.size)
    return GriddedFunction(xgrid, T.min(axis=0)), T


def attainment_radius(F: GriddedFunction, m: int, y, rho: float) -> tuple[float, np.ndarray | None]:
    """Smallest radius meeting the attainment requirement for the Lagrangian error bound.

    For every x with |x| <= rho and l(x, y) <= rho some u with f_y(u, x) <=
    max(-rho, l(x, y)) must have |u| <= radius. Returns the radius and the
    worst x.
    """
    ugrid, xgrid = split_grid(F.grid, m)
    l, T = lagrangian_from_table(F, m, y)
    X = xgrid.points()
    unorm = np.linalg.norm(ugrid.points(), axis=1)
    lv = l.values.ravel()
    need = (np.linalg.norm(X, axis=1) <= rho + 1e-12) & (lv <= rho)
    worst, witness = 0.0, None
    for j in np.nonzero(need)[0]:
        level = max(-rho, lv[j])
        ok = T[:, j] <= level + 1e-12 * max(1.0, abs(level))
        r = float(unorm[ok].min())
        if r > worst:
            worst, witness = r, X[j]
    return worst, witness


def bound_lagrangian(F: GriddedFunction, Fn: GriddedFunction, m: int, y, y_nu, rho: float,
                     rho_hat: float | None = None, tol: float | None = None) -> BoundReport:
    """Epi-distance of Lagrangians l(., y) and l^nu(., y^nu) of the grid-restricted models.

    With ``rho_hat=None`` the smallest radius that passes the attainment
    check is used; an explicit value is verified and a refutation makes the
    report INAPPLICABLE with the witness recorded.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    y_nu = np.asarray(y_nu, dtype=float).reshape(-1)
    r0, w0 = attainment_radius(F, m, y, rho)
    r1, w1 = attainment_radius(Fn, m, y_nu, rho)
    needed = max(rho, r0, r1)
    budget = RadiusBudget(rho)
    notes = []
    if rho_hat is None:
        rho_hat = needed
    elif rho_hat + 1e-12 < needed:
        budget.admissible["rho_hat"] = False
        w = w0 if r0 >= r1 else w1
        notes.append(f"attainment fails at x={np.round(w, 12).tolist()}")
    budget.admissible.setdefault("rho_hat", True)
    ymax = max(np.linalg.norm(y), np.linalg.norm(y_nu))
    rho_p = (1 + ymax) * rho_hat
    n = F.dim - m
    l, _ = lagrangian_from_table(F, m, y)
    ln, _ = lagrangian_from_table(Fn, m, y_nu)
    lhs = epi_distance(l, ln, rho, epi_norm(n))
    d = epi_distance(F, Fn, rho_p, epi_norm(m, n))
    rhs = (1 + ymax) * d + rho_hat * float(np.linalg.norm(y - y_nu))
    budget.derived.update(rho_hat=rho_hat, rho_prime=rho_p, rho_hat_needed=needed)
    return BoundReport("lagrangian", lhs, rhs, _tol(F.grid, tol=tol), budget, {"dist_prime": d}, notes)


# -------------------------------------------------------------------- dual


def _argmin_norms(psi: DualFunction) -> np.ndarray:
    return np.maximum(np.linalg.norm(psi.argmin_u, axis=1), np.linalg.norm(psi.argmin_x, axis=1))


def bound_dual(psi: DualFunction, psi_nu: DualFunction, F: GriddedFunction, Fn: GriddedFunction, m: int,
               rho: float, mode: str, tol: float | None = None) -> BoundReport:
    """Dual functions: hypo-distance (mode A) or uniform gap on the common domain (mode B).

    ``psi``/``psi_nu`` must share their y grid; ``F``/``Fn`` are the model
    tables used for the epi-distance on the right.
    """
    ygrid = psi.values.grid
    if psi_nu.values.grid != ygrid:
        raise ValueError("dual functions must share a y grid")
    Y = ygrid.points()
    ynorm = np.linalg.norm(Y, axis=1)
    fin = psi.finite_mask.ravel()
    fin_n = psi_nu.finite_mask.ravel()
    pv = psi.values.values.ravel()
    pvn = psi_nu.values.values.ravel()
    an, ann = _argmin_norms(psi), _argmin_norms(psi_nu)
    n = F.dim - m
    fnorm = epi_norm(m, n)
    budget = RadiusBudget(rho)
    tol = _tol(F.grid, ygrid, tol=tol)
    if mode == "A":
        ycl = NormSpec((_l2(m),))
        dom = PointCloud(m, Y[fin])
        dom_n = PointCloud(m, Y[fin_n])
        d_dom = truncated_hausdorff(dom, dom_n, rho, ycl)
        if not math.isfinite(d_dom):
            budget.admissible["domains"] = False
            return BoundReport("dual_A", 0.0, 0.0, tol, budget)
        rho_hat = rho + d_dom + STRICT
        sel = fin & (ynorm <= rho_hat + 1e-12)
        sel_n = fin_n & (ynorm <= rho_hat + 1e-12)
        rho_p = max([1.0, *an[sel], *np.abs(pv[sel]), *ann[sel_n], *np.abs(pvn[sel_n])])
        rho_bar = rho_p * (1 + rho_hat)
        d = epi_distance(F, Fn, rho_bar, fnorm)
        lhs = epi_distance(psi_nu.values, psi.values, rho, epi_norm(m), orientation="HYPO")
        rhs = (1 + rho_hat) * d + rho_p * d_dom
        budget.derived.update(rho_hat=rho_hat, rho_prime=rho_p, rho_bar=rho_bar,
                              sampled_y=float(sel.sum() + sel_n.sum()))
        budget.admissible.update(rho_hat=True, rho_prime=True,
                                 y_grid_covers=bool(ygrid.contains(np.full((1, m), rho_hat)).all()))
        return BoundReport("dual_A", lhs, rhs, tol, budget, {"dist_dom": d_dom, "dist_bar": d})
    if mode == "B":
        common = fin & fin_n & (ynorm <= rho + 1e-12)
        if not common.any():
            budget.admissible["Y_nonempty"] = False
            return BoundReport("dual_B", 0.0, 0.0, tol, budget)
        rho_p = max([0.0, *an[common], *ann[common], *np.abs(pv[common]), *np.abs(pvn[common])])
        rho_bar = rho_p * (1 + rho)
        d = epi_distance(F, Fn, rho_bar, fnorm)
        lhs = float(np.max(np.abs(pv[common] - pvn[common])))
        rhs = (1 + rho) * d
        budget.derived.update(rho_prime=rho_p, rho_bar=rho_bar, sampled_y=float(common.sum()))
        budget.admissible.update(Y_nonempty=True, rho_prime=True)
        return BoundReport("dual_B", lhs, rhs, tol, budget, {"dist_bar": d})
    raise ValueError("mode must be 'A' or 'B'")
