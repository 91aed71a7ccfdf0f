"""Extended reals, block max-norms, point clouds and set distances.

Extended reals are plain floats with ``math.inf`` for the infinities. The
only non-IEEE rule is addition: ``(+inf) + (-inf)`` is ``+inf`` rather than
NaN, which :func:`xr_add` implements for scalars and arrays alike.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

POS_INF = math.inf
NEG_INF = -math.inf

# Clouds at or above this size go through the tree-backed nearest-neighbour path.
INDEX_THRESHOLD = 4096


def xr_add(a, b):
    """Add extended reals with the rule ``(+inf) + (-inf) = +inf``.

    Works elementwise on arrays; scalars in give a float out.
    """
    if np.ndim(a) == 0 and np.ndim(b) == 0:
        a, b = float(a), float(b)
        if a == POS_INF or b == POS_INF:
            return POS_INF
        return a + b
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    return np.where(np.isposinf(a) | np.isposinf(b), POS_INF, out)


class Inner(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    ABS = "ABS"


@dataclass(frozen=True)
class NormSpec:
    """Outer max over blocks of inner L1, L2 or absolute-value norms."""

    blocks: tuple[tuple[int, Inner], ...]

    def __post_init__(self):
        fixed = []
        for dim, inner in self.blocks:
            inner = Inner(inner)
            if int(dim) < 1:
                raise ValueError("block dimension must be positive")
            if inner is Inner.ABS and int(dim) != 1:
                raise ValueError("ABS blocks have dimension 1")
            fixed.append((int(dim), inner))
        object.__setattr__(self, "blocks", tuple(fixed))

    @classmethod
    def of(cls, *blocks: tuple[int, str]) -> "NormSpec":
        return cls(tuple(blocks))

    @property
    def total_dim(self) -> int:
        return sum(d for d, _ in self.blocks)

    def slices(self) -> list[slice]:
        out, start = [], 0
        for dim, _ in self.blocks:
            out.append(slice(start, start + dim))
            start += dim
        return out

    def without_last(self) -> "NormSpec":
        return NormSpec(self.blocks[:-1])

    def __call__(self, v) -> np.ndarray | float:
        return norm_eval(self, v)


def norm_eval(n: NormSpec, v) -> np.ndarray | float:
    """Evaluate the block max-norm of a vector, or of each row of an array."""
    arr = np.asarray(v, dtype=float)
    scalar = arr.ndim == 1
    if scalar:
        arr = arr[None, :]
    if arr.shape[-1] != n.total_dim:
        raise ValueError(f"vector has dimension {arr.shape[-1]}, norm expects {n.total_dim}")
    out = np.zeros(arr.shape[:-1])
    for (dim, inner), sl in zip(n.blocks, n.slices()):
        part = arr[..., sl]
        if inner is Inner.L2 and dim > 1:
            val = np.sqrt(np.sum(part * part, axis=-1))
        elif inner is Inner.L1 and dim > 1:
            val = np.sum(np.abs(part), axis=-1)
        else:
            val = np.abs(part[..., 0]) if dim == 1 else np.max(np.abs(part), axis=-1)
        out = np.maximum(out, val)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PointCloud:
    """A finite point set in R^dim; an empty cloud stands for the empty set."""

    dim: int
    points: np.ndarray = field(repr=False)
    tag: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.dim)
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def empty(cls, dim: int, tag: str = "") -> "PointCloud":
        return cls(dim, np.empty((0, dim)), tag)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]], tag: str = "") -> "PointCloud":
        arr = np.atleast_2d(np.asarray(list(points), dtype=float))
        return cls(arr.shape[1], arr, tag)

    def __len__(self) -> int:
        return self.points.shape[0]

    def in_ball(self, rho: float, n: NormSpec) -> "PointCloud":
        if len(self) == 0:
            return self
        keep = norm_eval(n, self.points) <= rho
        return PointCloud(self.dim, self.points[keep], self.tag)


def _check_dims(c: PointCloud, d: PointCloud, n: NormSpec) -> None:
    if len(c) and len(d) and c.dim != d.dim:
        raise ValueError(f"cloud dimensions differ: {c.dim} vs {d.dim}")
    for cloud in (c, d):
        if len(cloud) and cloud.dim != n.total_dim:
            raise ValueError(f"cloud dimension {cloud.dim} does not match norm dimension {n.total_dim}")


def nearest_brute(src: np.ndarray, tgt: np.ndarray, n: NormSpec, chunk_elems: int = 4_000_000) -> np.ndarray:
    """Distance from each source row to its nearest target row by full scan."""
    out = np.empty(src.shape[0])
    rows = max(1, chunk_elems // max(1, tgt.shape[0] * src.shape[1]))
    for start in range(0, src.shape[0], rows):
        block = src[start:start + rows]
        diff = block[:, None, :] - tgt[None, :, :]
        out[start:start + rows] = norm_eval(n, diff).min(axis=1)
    return out


def nearest_indexed(src: np.ndarray, tgt: np.ndarray, n: NormSpec, k: int = 8) -> np.ndarray:
    """Nearest-target distances via a Chebyshev k-d tree plus exact refinement.

    Every block norm dominates the sup-norm of its slice, so the block
    max-norm dominates the sup-norm. The ``k`` sup-nearest candidates give
    an upper bound ``b``; a point is settled once ``b`` does not exceed its
    k-th sup-distance, and the rest are resolved by a sup-ball query of
    radius ``b``, which must contain the true minimiser.
    """
    tree = cKDTree(tgt)
    k = min(k, tgt.shape[0])
    sup_d, idx = tree.query(src, k=k, p=np.inf)
    sup_d = sup_d.reshape(src.shape[0], k)
    idx = idx.reshape(src.shape[0], k)
    cand = norm_eval(n, src[:, None, :] - tgt[idx])
    best = cand.min(axis=1)
    open_rows = np.nonzero(best > sup_d[:, -1])[0] if k < tgt.shape[0] else np.empty(0, dtype=int)
    for i in open_rows:
        hits = tree.query_ball_point(src[i], r=best[i] * (1 + 1e-12) + 1e-300, p=np.inf)
        if hits:
            best[i] = min(best[i], norm_eval(n, src[i] - tgt[hits]).min())
    return best


def nearest_distances(src: np.ndarray, tgt: np.ndarray, n: NormSpec, method: str = "auto") -> np.ndarray:
    if tgt.shape[0] == 0:
        return np.full(src.shape[0], POS_INF)
    if src.shape[0] == 0:
        return np.empty(0)
    if method == "auto":
        method = "indexed" if max(src.shape[0], tgt.shape[0]) >= INDEX_THRESHOLD else "brute"
    if method == "indexed":
        return nearest_indexed(src, tgt, n)
    if method == "brute":
        return nearest_brute(src, tgt, n)
    raise ValueError(f"unknown method {method!r}")


def excess(c: PointCloud, d: PointCloud, n: NormSpec, method: str = "auto") -> float:
    """Worst distance from a point of ``c`` to the set ``d``.

    Zero when ``c`` is empty, ``+inf`` when only ``d`` is empty.
    """
    _check_dims(c, d, n)
    if len(c) == 0:
        return 0.0
    if len(d) == 0:
        return POS_INF
    return float(nearest_distances(c.points, d.points, n, method).max())


def truncated_hausdorff(c: PointCloud, d: PointCloud, rho: float, n: NormSpec, method: str = "auto") -> float:
    """Max of the two excesses after cutting each source down to the rho-ball."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    _check_dims(c, d, n)
    return max(
        excess(c.in_ball(rho, n), d, n, method),
        excess(d.in_ball(rho, n), c, n, method),
    )
