"""Token-based function catalog used by scenario configs.

Tokens name a vectorized function ``Z -> values`` on arrays of shape (N, d):

========================  =================================================
``poly:c_k,...,c_0``      polynomial in the first coordinate, coefficients
                          from the highest degree down
``sqnorm:t``              t * |z|_2^2
``hinge:t``               t * sum max(0, z_i)
``abs``                   |z|_1
``const:c``               c
``ind_nonpos``            indicator of z <= 0 (componentwise)
``ind_zero``              indicator of z = 0
``pwl:x0:y0,x1:y1,...``   piecewise linear in the first coordinate, constant
                          extension beyond the breakpoints
========================  =================================================

A token may also be a list of tokens, which yields a vector-valued map
(used for G with m > 1).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .geometry import POS_INF
from .rockafellian import FEAS_TOL

Fn = Callable[[np.ndarray], np.ndarray]


class CatalogError(ValueError):
    pass


def _floats(body: str, sep: str = ",") -> list[float]:
    try:
        return [float(t) for t in body.split(sep) if t.strip()]
    except ValueError as exc:
        raise CatalogError(f"bad number list {body!r}") from exc


def _poly(coef: list[float]) -> Fn:
    c = np.asarray(coef)
    return lambda Z: np.polyval(c, np.atleast_2d(Z)[:, 0])


def _pwl(body: str) -> Fn:
    pairs = [p.split(":") for p in body.split(",")]
    if any(len(p) != 2 for p in pairs) or len(pairs) < 2:
        raise CatalogError(f"pwl needs at least two x:y pairs, got {body!r}")
    xs, ys = np.array([[float(a), float(b)] for a, b in pairs]).T
    if np.any(np.diff(xs) <= 0):
        raise CatalogError("pwl breakpoints must increase")
    return lambda Z: np.interp(np.atleast_2d(Z)[:, 0], xs, ys)


def _one_arg(name: str, body: str) -> float:
    vals = _floats(body)
    if len(vals) != 1:
        raise CatalogError(f"{name} takes one number")
    return vals[0]


def parse(token) -> Fn:
    """Turn a catalog token (or list of tokens) into a vectorized function."""
    if isinstance(token, (list, tuple)):
        parts = [parse(t) for t in token]
        return lambda Z: np.stack([p(Z) for p in parts], axis=1)
    if not isinstance(token, str):
        raise CatalogError(f"token must be a string, got {token!r}")
    name, _, body = token.partition(":")
    if name == "poly":
        coef = _floats(body)
        if not coef:
            raise CatalogError("poly needs coefficients")
        return _poly(coef)
    if name == "sqnorm":
        t = _one_arg(name, body)
        return lambda Z: t * np.sum(np.atleast_2d(Z) ** 2, axis=1)
    if name == "hinge":
        t = _one_arg(name, body)
        return lambda Z: t * np.sum(np.maximum(0.0, np.atleast_2d(Z)), axis=1)
    if name == "abs" and not body:
        return lambda Z: np.sum(np.abs(np.atleast_2d(Z)), axis=1)
    if name == "const":
        c = _one_arg(name, body)
        return lambda Z: np.full(np.atleast_2d(Z).shape[0], c)
    if name == "ind_nonpos" and not body:
        return lambda Z: np.where(np.all(np.atleast_2d(Z) <= FEAS_TOL, axis=1), 0.0, POS_INF)
    if name == "ind_zero" and not body:
        return lambda Z: np.where(np.all(np.abs(np.atleast_2d(Z)) <= FEAS_TOL, axis=1), 0.0, POS_INF)
    if name == "pwl":
        return _pwl(body)
    raise CatalogError(f"unknown catalog token {token!r}")


def validate(token) -> None:
    parse(token)


def shifted(fn: Fn, c: float) -> Fn:
    """z -> fn(z) + c."""
    return lambda Z: fn(Z) + c


def translated(fn: Fn, s) -> Fn:
    """z -> fn(z - s)."""
    s = np.asarray(s, dtype=float)
    return lambda Z: fn(np.atleast_2d(Z) - s)
