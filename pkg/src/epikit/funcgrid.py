"""Extended-real functions tabulated on uniform box grids.

Besides sampling, infima, level sets and discrete conjugates, this module
provides two ways to measure the distance between epigraphs:

* :func:`epi_cloud` followed by :func:`~epikit.geometry.truncated_hausdorff`,
  which samples the vertical direction;
* :func:`epi_distance`, which keeps the vertical coordinate continuous and
  works from the graph alone via grey-scale erosion of the target table.

The second is exact for the grid-restricted functions (value ``+inf`` off the
grid nodes) and is what the sweeps use; the first is kept as an oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .geometry import POS_INF, Inner, NormSpec, PointCloud, norm_eval, truncated_hausdorff


class Orientation(str, enum.Enum):
    EPI = "EPI"
    HYPO = "HYPO"


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid on a box; ``steps`` counts points per axis."""

    box: tuple[tuple[float, float], ...]
    steps: tuple[int, ...]

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        steps = tuple(int(s) for s in self.steps)
        if len(box) != len(steps) or not box:
            raise ValueError("box and steps must have the same positive length")
        for (lo, hi), s in zip(box, steps):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bad axis bounds ({lo}, {hi})")
            if s < 2:
                raise ValueError("each axis needs at least 2 points")
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "steps", steps)

    @classmethod
    def from_spacing(cls, box: Sequence[tuple[float, float]], spacing: float | Sequence[float]) -> "Grid":
        """Grid whose spacing is ``spacing`` (the box is assumed to be a multiple of it)."""
        hs = np.broadcast_to(np.asarray(spacing, dtype=float), (len(box),))
        steps = [int(round((hi - lo) / h)) + 1 for (lo, hi), h in zip(box, hs)]
        return cls(tuple(box), tuple(steps))

    @classmethod
    def product(cls, *grids: "Grid") -> "Grid":
        return cls(sum((g.box for g in grids), ()), sum((g.steps for g in grids), ()))

    @property
    def dim(self) -> int:
        return len(self.steps)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.steps

    @property
    def size(self) -> int:
        return int(np.prod(self.steps))

    @property
    def spacing(self) -> np.ndarray:
        return np.array([(hi - lo) / (s - 1) for (lo, hi), s in zip(self.box, self.steps)])

    @property
    def max_step(self) -> float:
        return float(self.spacing.max())

    def axes(self) -> list[np.ndarray]:
        # Convex-combination form keeps symmetric grids exactly symmetric and hits 0 exactly.
        out = []
        for (lo, hi), s in zip(self.box, self.steps):
            i = np.arange(s, dtype=float)
            out.append((lo * (s - 1 - i) + hi * i) / (s - 1))
        return out

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for ax in range(self.dim):
            idx = [slice(None)] * self.dim
            idx[ax] = 0
            mask[tuple(idx)] = True
            idx[ax] = -1
            mask[tuple(idx)] = True
        return mask

    def contains(self, pts: np.ndarray, slack: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo = np.array([b[0] for b in self.box]) - slack
        hi = np.array([b[1] for b in self.box]) + slack
        return np.all((pts >= lo) & (pts <= hi), axis=1)


@dataclass(frozen=True)
class GriddedFunction:
    """Values of an extended-real function at the nodes of a :class:`Grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.size != self.grid.size:
            raise ValueError(f"table has {vals.size} entries, grid has {self.grid.size}")
        if np.isnan(vals).any():
            raise ValueError("tabulated values contain NaN")
        vals = vals.reshape(self.grid.shape).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def box(self):
        return self.grid.box

    @property
    def steps(self):
        return self.grid.steps

    def with_values(self, values: np.ndarray) -> "GriddedFunction":
        return GriddedFunction(self.grid, values)

    def __neg__(self) -> "GriddedFunction":
        return self.with_values(-self.values)

    def interp(self, pts) -> np.ndarray:
        """Multilinear interpolation; any infinite corner with positive weight wins.

        Raises ``ValueError`` for points outside the box.
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.dim:
            raise ValueError("point dimension mismatch")
        if not self.grid.contains(pts).all():
            raise ValueError("interpolation point outside the grid box")
        lo = np.array([b[0] for b in self.box])
        h = self.grid.spacing
        top = np.array(self.steps) - 1
        pos = np.clip((pts - lo) / h, 0, top)
        base = np.minimum(np.floor(pos).astype(int), np.maximum(top - 1, 0))
        frac = pos - base
        finite = np.where(np.isfinite(self.values), self.values, 0.0)
        acc = np.zeros(len(pts))
        pos_inf = np.zeros(len(pts), dtype=bool)
        neg_inf = np.zeros(len(pts), dtype=bool)
        for corner in np.ndindex(*([2] * self.dim)):
            c = np.array(corner)
            w = np.prod(np.where(c == 1, frac, 1 - frac), axis=1)
            idx = tuple((base + c).T)
            v = self.values[idx]
            live = w > 1e-14
            pos_inf |= live & np.isposinf(v)
            neg_inf |= live & np.isneginf(v)
            acc += w * finite[idx]
        out = np.where(neg_inf, -np.inf, acc)
        return np.where(pos_inf, np.inf, out)

    def __call__(self, pts) -> np.ndarray:
        return self.interp(pts)

    def restrict(self, radius: float) -> "GriddedFunction":
        """Sub-table on the nodes inside the sup-norm box of the given radius."""
        sl = []
        for ax in self.grid.axes():
            keep = np.nonzero(np.abs(ax) <= radius + 1e-12)[0]
            if len(keep) < 2:
                return self
            sl.append(slice(keep[0], keep[-1] + 1))
        axes = self.grid.axes()
        box = tuple((float(a[s][0]), float(a[s][-1])) for a, s in zip(axes, sl))
        steps = tuple(s.stop - s.start for s in sl)
        return GriddedFunction(Grid(box, steps), self.values[tuple(sl)])


# ---------------------------------------------------------------- sampling


def grid_sample(evaluator: Callable[[np.ndarray], np.ndarray], box, steps, vectorized: bool = True) -> GriddedFunction:
    """Tabulate ``evaluator`` at every node; it receives an ``(N, dim)`` array when vectorized."""
    grid = steps if isinstance(steps, Grid) else Grid(tuple(box), tuple(steps))
    pts = grid.points()
    if vectorized:
        vals = np.asarray(evaluator(pts), dtype=float).reshape(-1)
    else:
        vals = np.array([float(evaluator(p)) for p in pts])
    if np.isnan(vals).any():
        raise ValueError("evaluator returned NaN")
    return GriddedFunction(grid, vals)


def infimum_argmin(g: GriddedFunction, eps: float = 0.0) -> tuple[float, PointCloud]:
    """Minimum of the table and the nodes within ``eps`` of it."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    inf = float(g.values.min())
    if inf == POS_INF:
        return inf, PointCloud.empty(g.dim, "argmin")
    mask = g.values == inf if inf == -np.inf else g.values <= inf + eps
    return inf, PointCloud(g.dim, g.grid.points()[mask.ravel()], "argmin")


def level_set(g: GriddedFunction, alpha: float) -> PointCloud:
    mask = (g.values <= alpha).ravel()
    return PointCloud(g.dim, g.grid.points()[mask], "level")


def epi_cloud(g: GriddedFunction, alpha_lo: float, alpha_hi: float, alpha_step: float,
              orientation: Orientation | str = Orientation.EPI) -> PointCloud:
    """Sample the epigraph (or hypograph) between two heights.

    Each column starts at ``max(g(x), alpha_lo)`` and climbs in steps of
    ``alpha_step``; the top height ``alpha_hi`` is always included.
    """
    if not alpha_lo < alpha_hi or alpha_step <= 0:
        raise ValueError("need alpha_lo < alpha_hi and alpha_step > 0")
    orientation = Orientation(orientation)
    if orientation is Orientation.HYPO:
        flipped = epi_cloud(-g, -alpha_hi, -alpha_lo, alpha_step, Orientation.EPI)
        pts = flipped.points.copy()
        pts[:, -1] *= -1
        return PointCloud(g.dim + 1, pts, "hypo")
    vals = g.values.ravel()
    keep = vals <= alpha_hi
    xs = g.grid.points()[keep]
    floors = np.maximum(vals[keep], alpha_lo)
    if len(xs) == 0:
        return PointCloud.empty(g.dim + 1, "epi")
    # samples strictly below the top, then the top itself
    below = np.ceil((alpha_hi - floors) / alpha_step - 1e-9).astype(int)
    counts = below + 1
    col = np.repeat(np.arange(len(xs)), counts)
    start = np.cumsum(counts) - counts
    k = np.arange(counts.sum()) - np.repeat(start, counts)
    heights = np.where(k < np.repeat(below, counts), np.repeat(floors, counts) + k * alpha_step, alpha_hi)
    return PointCloud(g.dim + 1, np.column_stack([xs[col], heights]), "epi")


# --------------------------------------------------------------- conjugates


def conjugate(g: GriddedFunction, dual_box, dual_steps, boundary: str = "keep",
              chunk_elems: int = 8_000_000) -> GriddedFunction:
    """Discrete Legendre-Fenchel transform on a caller-chosen dual grid.

    With ``boundary="inf"``, dual points whose maximiser sits only on the
    primal box boundary are set to ``+inf``: the grid sup is then a
    truncation artefact rather than a value of the conjugate.
    """
    if np.all(np.isposinf(g.values)):
        raise ValueError("conjugate of an identically +inf function")
    if boundary not in ("keep", "inf"):
        raise ValueError("boundary must be 'keep' or 'inf'")
    dgrid = dual_steps if isinstance(dual_steps, Grid) else Grid(tuple(dual_box), tuple(dual_steps))
    if dgrid.dim != g.dim:
        raise ValueError("dual grid dimension mismatch")
    X = g.grid.points()
    gv = g.values.ravel()
    live = ~np.isposinf(gv)
    X, gv = X[live], gv[live]
    on_edge = g.grid.boundary_mask().ravel()[live]
    Y = dgrid.points()
    out = np.empty(len(Y))
    rows = max(1, chunk_elems // max(1, len(X)))
    for s in range(0, len(Y), rows):
        vals = Y[s:s + rows] @ X.T - gv[None, :]
        best = vals.max(axis=1)
        if boundary == "inf":
            inner = np.where(on_edge[None, :], -np.inf, vals).max(axis=1)
            tie = 1e-12 * np.maximum(1.0, np.abs(best))
            best = np.where(inner < best - tie, np.inf, best)
        out[s:s + rows] = best
    return GriddedFunction(dgrid, out)


def lipschitz_modulus(g: GriddedFunction, rho: float, norm: NormSpec | None = None) -> float:
    """Largest slope between axis-adjacent nodes that both lie in the rho-ball.

    The ball uses ``norm`` (Euclidean by default); slopes use Euclidean steps.
    """
    norm = norm or NormSpec(((g.dim, Inner.L2),))
    inside = (norm_eval(norm, g.grid.points()) <= rho + 1e-12).reshape(g.grid.shape)
    if not np.all(np.isfinite(g.values[inside])):
        raise ValueError("function is not finite on the ball")
    best = 0.0
    for ax, h in enumerate(g.grid.spacing):
        a = [slice(None)] * g.dim
        b = [slice(None)] * g.dim
        a[ax], b[ax] = slice(0, -1), slice(1, None)
        both = inside[tuple(a)] & inside[tuple(b)]
        if both.any():
            diff = np.abs(g.values[tuple(b)] - g.values[tuple(a)])[both]
            best = max(best, float(diff.max() / h))
    return best


# ----------------------------------------------------------- epi distances


def _block_axes(norm: NormSpec, dim: int) -> list[tuple[list[int], Inner]]:
    blocks = norm.blocks
    if len(blocks) < 2 or blocks[-1] != (1, Inner.ABS) or norm.total_dim != dim + 1:
        raise ValueError("norm must cover the grid axes plus a trailing ABS block for the height")
    out, start = [], 0
    for d, inner in blocks[:-1]:
        out.append((list(range(start, start + d)), inner))
        start += d
    return out


class _Eroder:
    """Minimum of a table over block-norm balls of grid offsets, for any radius."""

    def __init__(self, values: np.ndarray, spacing: np.ndarray, norm: NormSpec):
        self.base = values
        self.shape = values.shape
        self.blocks = _block_axes(norm, values.ndim)
        h = spacing
        radii = []
        self.multi = []  # (axes, offsets, offset norms) for blocks of dimension > 1
        for axes, inner in self.blocks:
            if len(axes) == 1:
                ax = axes[0]
                radii.append(np.arange(self.shape[ax]) * h[ax])
            else:
                rng = [np.arange(-(self.shape[a] - 1), self.shape[a]) for a in axes]
                offs = np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, len(axes))
                scaled = offs * h[axes]
                nv = norm_eval(NormSpec(((len(axes), inner),)), scaled)
                self.multi.append((axes, offs, nv))
                radii.append(np.unique(nv))
        allr = np.unique(np.concatenate(radii))
        keep = np.concatenate([[True], np.diff(allr) > 1e-12 * np.maximum(1.0, allr[1:])])
        self.radii = allr[keep]
        self._single = [(axes[0], h[axes[0]]) for axes, _ in self.blocks if len(axes) == 1]

    def at(self, r: float) -> np.ndarray:
        tol = 1e-12 * max(1.0, r)
        arr = self.base
        for ax, h in self._single:
            k = min(int(math.floor(r / h + 1e-9)), self.shape[ax] - 1)
            if k > 0:
                arr = ndimage.minimum_filter1d(arr, 2 * k + 1, axis=ax, mode="constant", cval=np.inf)
        for axes, offs, nv in self.multi:
            sel = offs[nv <= r + tol]
            if np.abs(sel).max() > 0:
                arr = _ball_min(arr, axes, sel)
        return arr


def _ball_min(arr: np.ndarray, axes: list[int], sel: np.ndarray) -> np.ndarray:
    """min over the symmetric convex offset set ``sel`` on ``axes``, inf outside the table.

    The set is cut into runs along the last axis; each distinct run width costs one
    1-D filter, and each run position a shifted minimum.
    """
    last = axes[-1]
    lead = axes[:-1]
    prefixes, inv = np.unique(sel[:, :-1], axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    widths = np.array([np.abs(sel[inv == i, -1]).max() for i in range(len(prefixes))])
    filtered = {}
    out = np.full(arr.shape, np.inf)
    for pre, w in zip(prefixes, widths):
        if w not in filtered:
            filtered[w] = arr if w == 0 else ndimage.minimum_filter1d(
                arr, 2 * int(w) + 1, axis=last, mode="constant", cval=np.inf)
        src = filtered[w]
        dst_sl = [slice(None)] * arr.ndim
        src_sl = [slice(None)] * arr.ndim
        skip = False
        for a, o in zip(lead, pre):
            n = arr.shape[a]
            if abs(o) >= n:
                skip = True
                break
            dst_sl[a] = slice(0, n - o) if o >= 0 else slice(-o, n)
            src_sl[a] = slice(o, n) if o >= 0 else slice(0, n + o)
        if not skip:
            d = tuple(dst_sl)
            np.minimum(out[d], src[tuple(src_sl)], out=out[d])
    return out


def _gaps(eroder: _Eroder, r: float, src: np.ndarray, floor: np.ndarray) -> np.ndarray:
    m = eroder.at(r)[src]
    with np.errstate(invalid="ignore"):
        return np.where(np.isposinf(m), np.inf, np.maximum(m - floor, 0.0))


def epi_excess(g: GriddedFunction, h: GriddedFunction, rho: float, norm: NormSpec) -> float:
    """exs(epi g ∩ B(rho); epi h) with the height coordinate kept continuous.

    Distance to an epigraph is nonincreasing in height, so only the floor
    ``(x, max(g(x), -rho))`` of each source column matters, and
    ``dist((x, a), epi h) = min_r max(r, gap_r(x))`` with
    ``gap_r(x) = (min_{B(x, r)} h - a)_+``, a grey-scale erosion of ``h``.
    Since ``gap_r`` shrinks as ``r`` grows, "every gap_r <= r" is monotone in
    ``r``; a bisection over the offset radii finds the first radius ``r1``
    where it holds and the last ``r0`` where it fails, and the excess is the
    largest ``min(gap_r0, r1)`` over sources still failing at ``r0``.
    """
    if g.grid != h.grid:
        raise ValueError("both functions must live on the same grid")
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    xnorm = norm.without_last()
    _block_axes(norm, g.dim)
    pts = g.grid.points()
    src = ((g.values.ravel() <= rho) & (norm_eval(xnorm, pts) <= rho + 1e-12)).reshape(g.grid.shape)
    if not src.any():
        return 0.0
    if np.all(np.isposinf(h.values)):
        return POS_INF
    spacing = g.grid.spacing
    shape = np.array(g.grid.shape)
    where = np.nonzero(src)
    first = np.array([w.min() for w in where])
    last = np.array([w.max() for w in where])
    # Erosion at radius r only reads nodes within r of a source, so the table
    # is cropped around the sources and the crop grows until it suffices.
    cap = 16 * g.grid.max_step
    while True:
        pad = np.ceil(cap / spacing).astype(int) + 1
        lo = np.maximum(first - pad, 0)
        hi = np.minimum(last + pad, shape - 1)
        whole = bool(np.all(lo == 0) and np.all(hi == shape - 1))
        box = tuple(slice(a, b + 1) for a, b in zip(lo, hi))
        sub_src = src[box]
        floor = np.maximum(g.values[box][sub_src], -rho)
        eroder = _Eroder(h.values[box], spacing, norm)
        radii = eroder.radii if whole else eroder.radii[eroder.radii <= cap]
        ok = lambda i: bool(np.all(_gaps(eroder, radii[i], sub_src, floor) <= radii[i]))
        if not whole and not ok(len(radii) - 1):
            cap *= 2
            continue
        if ok(0):
            return float(np.max(_gaps(eroder, radii[0], sub_src, floor)))
        lo_i, hi_i = 0, len(radii)  # ok(lo_i) fails; hi_i is the first index known to hold
        if whole and not ok(len(radii) - 1):
            lo_i = len(radii) - 1
        else:
            hi_i = len(radii) - 1
            while hi_i - lo_i > 1:
                mid = (lo_i + hi_i) // 2
                if ok(mid):
                    hi_i = mid
                else:
                    lo_i = mid
        r0 = radii[lo_i]
        r1 = radii[hi_i] if hi_i < len(radii) else np.inf
        gap0 = _gaps(eroder, r0, sub_src, floor)
        bad = gap0 > r0
        return float(np.max(np.minimum(gap0[bad], r1)))


def epi_distance(g: GriddedFunction, h: GriddedFunction, rho: float, norm: NormSpec,
                 orientation: Orientation | str = Orientation.EPI) -> float:
    """Truncated Hausdorff distance between two epigraphs (or hypographs) on a shared grid."""
    if Orientation(orientation) is Orientation.HYPO:
        g, h = -g, -h
    return max(epi_excess(g, h, rho, norm), epi_excess(h, g, rho, norm))


def cloud_epi_distance(g: GriddedFunction, h: GriddedFunction, rho: float, norm: NormSpec,
                       alpha_step: float | None = None, margin: float = 1.0,
                       orientation: Orientation | str = Orientation.EPI) -> float:
    """Same quantity through sampled clouds; slower, used as a cross-check."""
    step = alpha_step or g.grid.max_step
    top = rho + margin
    cg = epi_cloud(g, -top, top, step, orientation)
    ch = epi_cloud(h, -top, top, step, orientation)
    return truncated_hausdorff(cg, ch, rho, norm)


# ---------------------------------------------------------------- profiles


@dataclass
class ConvergenceProfile:
    rho: float
    entries: list[tuple[int, float]]
    fitted_rate: float | None = None
    tol: float = 0.0

    def __post_init__(self):
        nus = [nu for nu, _ in self.entries]
        if any(b <= a for a, b in zip(nus, nus[1:])):
            raise ValueError("profile entries must have strictly increasing nu")

    @property
    def distances(self) -> list[float]:
        return [d for _, d in self.entries]


def fit_rate(entries: Sequence[tuple[int, float]], tol: float = 0.0) -> float | None:
    """Least-squares slope of log distance against log nu, over entries above ``tol``."""
    pts = [(nu, d) for nu, d in entries if math.isfinite(d) and d > tol and d > 0]
    if len(pts) < 2:
        return None
    lx = np.log([nu for nu, _ in pts])
    ly = np.log([d for _, d in pts])
    return float(np.polyfit(lx, ly, 1)[0])


def epi_profile(seq: Sequence[GriddedFunction], g: GriddedFunction, rho: float, norm: NormSpec,
                nus: Sequence[int] | None = None, tol: float | None = None,
                method: str = "graph", alpha_step: float | None = None) -> ConvergenceProfile:
    """Distances dℓ_rho(epi g^nu, epi g) along a sequence, with a fitted power-law rate."""
    nus = list(nus) if nus is not None else list(range(1, len(seq) + 1))
    if len(nus) != len(seq):
        raise ValueError("one nu per function is required")
    tol = 2 * g.grid.max_step if tol is None else tol
    entries = []
    for nu, gn in zip(nus, seq):
        if method == "graph":
            d = epi_distance(gn, g, rho, norm)
        elif method == "cloud":
            d = cloud_epi_distance(gn, g, rho, norm, alpha_step)
        else:
            raise ValueError(f"unknown method {method!r}")
        entries.append((int(nu), d))
    return ConvergenceProfile(rho, entries, fit_rate(entries, tol), tol)
