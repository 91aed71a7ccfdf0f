"""Scenario registry, ν-sweep runner and CSV/JSON emission.

A scenario binds catalog tokens to one model family, together with probe
boxes and the list of checks to run. Every check produces rows of the form
``lhs <= rhs + tol``; ``status`` is PASS, FAIL, INAPPLICABLE or ERROR (the
latter when a probe box truncates a minimiser). Rows that do not depend on
ν carry ``nu = 0``.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import bounds as B
from . import catalog
from .funcgrid import Grid, GriddedFunction, conjugate, epi_distance, fit_rate, infimum_argmin
from .geometry import NormSpec, PointCloud, truncated_hausdorff, xr_add
from .lagrangian import (DualFunction, dual_affine_closed, dual_numeric, lagrangian_ambiguity_closed,
                         lagrangian_composite_closed, lagrangian_numeric, lagrangian_splitting_closed,
                         weak_duality_check)
from .rockafellian import (AugKind, AugmentationSpec, Box, RockafellianModel, ambiguity_support_vector, augment,
                           build_ambiguity, build_composite, build_constraint_family, build_splitting,
                           check_exactness, scan_exactness, tightness_diagnostic)

DEFAULT_NUS = (1, 2, 4, 8, 16, 32, 64)
CSV_COLUMNS = ("scenario", "nu", "quantity", "lhs", "rhs", "slack", "tol", "status")
ORACLE_PROBES = 100


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ records


@dataclass
class Row:
    scenario: str
    nu: int
    quantity: str
    lhs: float
    rhs: float
    tol: float
    status: str
    detail: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        if math.isinf(self.lhs) and math.isinf(self.rhs) and self.lhs == self.rhs:
            return 0.0
        return self.rhs + self.tol - self.lhs


@dataclass
class SweepResult:
    scenario: str
    rows: list[Row] = field(default_factory=list)
    profiles: dict[str, list[tuple[int, float]]] = field(default_factory=dict)

    @property
    def exit_status(self) -> int:
        statuses = {r.status for r in self.rows}
        if "FAIL" in statuses:
            return 1
        if "ERROR" in statuses:
            return 3
        return 0


@dataclass
class ScenarioConfig:
    id: str
    params: dict = field(default_factory=dict)
    nu_list: tuple[int, ...] = DEFAULT_NUS
    rho: float = 2.0
    grid_step: float = 0.01
    probe_boxes: dict = field(default_factory=dict)
    checks: tuple[str, ...] = ()
    format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        """Overlay ``data`` on the registered defaults for ``data['id']`` and validate."""
        if not isinstance(data, dict) or "id" not in data:
            raise ConfigError("config needs an 'id'")
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        base = default_config(data["id"])
        merged = asdict(base)
        for key, val in data.items():
            if key in ("params", "probe_boxes"):
                merged[key] = {**merged[key], **val}
            else:
                merged[key] = val
        merged["nu_list"] = tuple(merged["nu_list"])
        merged["checks"] = tuple(merged["checks"])
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.id not in REGISTRY:
            raise ConfigError(f"unknown scenario {self.id!r}")
        nus = list(self.nu_list)
        if not nus or any(not isinstance(v, int) or isinstance(v, bool) or v < 1 for v in nus):
            raise ConfigError("nu_list must hold positive integers")
        if any(b <= a for a, b in zip(nus, nus[1:])):
            raise ConfigError("nu_list must be strictly increasing")
        if not (isinstance(self.rho, (int, float)) and self.rho > 0):
            raise ConfigError("rho must be positive")
        if not (isinstance(self.grid_step, (int, float)) and 0 < self.grid_step <= 0.1):
            raise ConfigError("grid_step must lie in (0, 0.1]")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        spec = REGISTRY[self.id]
        bad = set(self.checks) - set(spec.available)
        if bad:
            raise ConfigError(f"checks not offered by {self.id}: {sorted(bad)}")
        for name, box in self.probe_boxes.items():
            try:
                ok = all(float(lo) < float(hi) for lo, hi in box)
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise ConfigError(f"probe box {name!r} must be a list of [lo, hi] pairs with lo < hi")
        try:
            for token in _tokens(self.params):
                catalog.validate(token)
        except catalog.CatalogError as exc:
            raise ConfigError(str(exc)) from exc


def _tokens(params: dict):
    for key in ("g0", "G", "h", "h_nu", "gs"):
        val = params.get(key)
        if val is None:
            continue
        if key == "h_nu":
            val = val.replace("{nu}", "1")
        if key == "gs":
            yield from val
        else:
            yield val
    cc = params.get("cc")
    if cc:
        yield from _tokens(cc)


# ------------------------------------------------------------- row helpers


def _status(lhs: float, rhs: float, tol: float) -> str:
    if math.isnan(lhs) or math.isnan(rhs):
        return "ERROR"
    if lhs == rhs:
        return "PASS"
    return "PASS" if rhs + tol - lhs >= 0 else "FAIL"


def _row(cfg: ScenarioConfig, nu: int, quantity: str, lhs: float, rhs: float, tol: float,
         detail: dict | None = None, status: str | None = None) -> Row:
    lhs, rhs, tol = float(lhs), float(rhs), float(tol)
    return Row(cfg.id, nu, quantity, lhs, rhs, tol, status or _status(lhs, rhs, tol), detail or {})


def _report_row(cfg: ScenarioConfig, nu: int, rep: B.BoundReport) -> Row:
    detail = {"radii": {k: float(v) for k, v in rep.radii.derived.items()},
              "admissible": {k: bool(v) for k, v in rep.radii.admissible.items()},
              "ingredients": {k: float(v) for k, v in rep.ingredients.items()}}
    if rep.notes:
        detail["notes"] = list(rep.notes)
    return Row(cfg.id, nu, f"bound_{rep.theorem}", float(rep.lhs), float(rep.rhs), float(rep.tol),
               rep.status.value, detail)


def _grid(cfg: ScenarioConfig, name: str, step: float) -> Grid:
    return Grid.from_spacing([tuple(map(float, b)) for b in cfg.probe_boxes[name]], step)


def _rho(cfg: ScenarioConfig, check: str) -> float:
    return float(cfg.params.get("rho_by_check", {}).get(check, cfg.rho))


def _dual_surrogate_rho(cfg: ScenarioConfig) -> float:
    by = cfg.params.get("rho_by_check", {})
    return float(by.get("dual_surrogate", by.get("surrogates", cfg.rho)))


def _table(fn, grid: Grid) -> GriddedFunction:
    return GriddedFunction(grid, np.asarray(fn(grid.points()), dtype=float).reshape(grid.shape))


def _boundary_truncated(values: np.ndarray, grid: Grid, evaluator) -> bool:
    """True when the grid minimiser sits on the box boundary and one step outward is lower."""
    flat = values.ravel()
    k = int(np.argmin(flat))
    best = flat[k]
    if not np.isfinite(best):
        return False
    idx = np.unravel_index(k, grid.shape)
    pt = grid.points()[k]
    h = grid.spacing
    for ax in range(grid.dim):
        for side, sign in ((0, -1.0), (grid.steps[ax] - 1, 1.0)):
            if idx[ax] == side:
                q = pt.copy()
                q[ax] += sign * h[ax]
                if float(np.asarray(evaluator(q[None, :])).reshape(-1)[0]) < best - 1e-12 * max(1.0, abs(best)):
                    return True
    return False


def _probe_error(cfg: ScenarioConfig, nu: int, what: str) -> Row:
    return Row(cfg.id, nu, f"probe_box_{what}", math.nan, math.nan, 0.0, "ERROR",
               {"message": f"minimiser of {what} truncated by its probe box"})


# ---------------------------------------------------------------- registry


@dataclass(frozen=True)
class Scenario:
    id: str
    anchor: str
    family: str
    available: tuple[str, ...]
    defaults: dict
    prepare: Callable
    per_nu: Callable
    finish: Callable


REGISTRY: dict[str, Scenario] = {}


def register(scn: Scenario) -> Scenario:
    REGISTRY[scn.id] = scn
    return scn


def default_config(scenario_id: str) -> ScenarioConfig:
    if scenario_id not in REGISTRY:
        raise ConfigError(f"unknown scenario {scenario_id!r}")
    d = copy.deepcopy(REGISTRY[scenario_id].defaults)
    d.setdefault("checks", REGISTRY[scenario_id].available)
    d["nu_list"] = tuple(d.get("nu_list", DEFAULT_NUS))
    d["checks"] = tuple(d["checks"])
    return ScenarioConfig(id=scenario_id, **d)


def worker_count() -> int:
    raw = os.environ.get("EPIKIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError as exc:
            raise ConfigError("EPIKIT_THREADS must be an integer") from exc
    return min(4, os.cpu_count() or 1)


def run_scenario(cfg: ScenarioConfig, workers: int | None = None) -> SweepResult:
    """Build models, run each requested check for every ν, and collect rows in a fixed order."""
    cfg.validate()
    scn = REGISTRY[cfg.id]
    ctx = scn.prepare(cfg)
    workers = workers or worker_count()
    if workers > 1 and len(cfg.nu_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per = list(pool.map(lambda nu: scn.per_nu(cfg, ctx, nu), cfg.nu_list))
    else:
        per = [scn.per_nu(cfg, ctx, nu) for nu in cfg.nu_list]
    res = SweepResult(cfg.id)
    res.rows.extend(ctx.get("rows", []))
    for rows in per:
        res.rows.extend(rows)
    scn.finish(cfg, ctx, res)
    return res


# ---------------------------------------------------------------- emission


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def render_csv(res: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in res.rows:
        w.writerow([r.scenario, r.nu, r.quantity, _fmt(r.lhs), _fmt(r.rhs), _fmt(r.slack), _fmt(r.tol), r.status])
    return buf.getvalue()


def _json_num(v):
    v = float(v)
    if math.isfinite(v):
        return float(_fmt(v))
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_num(obj)
    return obj


def render_json(res: SweepResult) -> str:
    rows = [{"scenario": r.scenario, "nu": r.nu, "quantity": r.quantity, "lhs": r.lhs, "rhs": r.rhs,
             "slack": r.slack, "tol": r.tol, "status": r.status, "detail": r.detail} for r in res.rows]
    doc = {"scenario": res.scenario, "exit_status": res.exit_status, "rows": rows,
           "profiles": {k: [[nu, d] for nu, d in v] for k, v in res.profiles.items()}}
    return json.dumps(_json_clean(doc), indent=2, sort_keys=True) + "\n"


def emit_results(res: SweepResult, fmt: str, path: str) -> None:
    text = render_csv(res) if fmt == "csv" else render_json(res)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ================================================================ families
#
# Shared helpers for the composite family (cubic NLP, shifted sets,
# penalties, affine duals). Perturbations: G_shift c gives G + c/nu,
# X_shift c translates X by c/nu, g0_scale c multiplies g0 by 1 + c/nu,
# h_nu is a token in which "{nu}" is replaced by the integer nu.


def _box(spec, shift: float = 0.0) -> Box | None:
    if spec is None:
        return None
    lo = tuple(float(a) + shift for a, _ in spec)
    hi = tuple(float(b) + shift for _, b in spec)
    return Box(lo, hi)


def _composite_parts(params: dict, nu: int | None):
    g0 = catalog.parse(params["g0"])
    G = catalog.parse(params["G"])
    h = catalog.parse(params["h"])
    X = _box(params.get("X"))
    if nu is not None:
        if params.get("G_shift"):
            G = catalog.shifted(G, params["G_shift"] / nu)
        if params.get("g0_scale"):
            scale = 1.0 + params["g0_scale"] / nu
            base = g0
            g0 = lambda Z, base=base, scale=scale: scale * base(Z)
        if params.get("X_shift"):
            X = _box(params.get("X"), params["X_shift"] / nu)
        if params.get("h_nu"):
            h = catalog.parse(params["h_nu"].replace("{nu}", str(nu)))
    return X, g0, G, h


def _composite_model(params: dict, nu: int | None) -> RockafellianModel:
    X, g0, G, h = _composite_parts(params, nu)
    return build_composite(X, g0, G, h, n=1, m=int(params.get("m", 1)))


def _x_cloud(X: Box | None, grid: Grid) -> PointCloud:
    pts = grid.points()
    if X is not None:
        pts = pts[np.isfinite(X.indicator(pts))]
    return PointCloud(grid.dim, pts)


def _gtabs(g0, G, m: int, grid: Grid) -> list[GriddedFunction]:
    P = grid.points()
    Gv = np.asarray(G(P), dtype=float).reshape(len(P), m)
    return [_table(g0, grid)] + [GriddedFunction(grid, Gv[:, i].reshape(grid.shape)) for i in range(m)]


def _minval_tol(grid: Grid) -> float:
    return 2 * grid.max_step


def _duality_rows(cfg, nu, psi: DualFunction, F: GriddedFunction, m: int, exact: bool) -> list[Row]:
    """Weak duality against the grid infimum of phi (exact on the grid) and, if exact, the gap."""
    ugrid, xgrid = B.split_grid(F.grid, m)
    zero = ugrid.points()
    k0 = int(np.argmin(np.linalg.norm(zero, axis=1)))
    if np.linalg.norm(zero[k0]) > 1e-12:
        raise ConfigError("u probe box must contain 0 on its grid")
    inf_phi = float(F.values.reshape(ugrid.size, xgrid.size)[k0].min())
    wd = weak_duality_check(psi, inf_phi, tol=1e-9)
    rows = [_row(cfg, nu, "weak_duality", wd.sup_psi, wd.inf_phi, wd.tol)]
    if exact:
        tol = 2 * F.grid.max_step
        rows.append(_row(cfg, nu, "duality_gap", abs(wd.sup_psi - wd.inf_phi), 0.0, tol))
    return rows


def _surrogate_finish(cfg, ctx, res: SweepResult, key: str) -> None:
    entries = sorted(ctx["profiles"].get(key, []))
    if not entries:
        return
    res.profiles[key] = entries
    tol = ctx["surrogate_tol"]
    prev = math.inf
    for nu, d in entries:
        res.rows.append(_row(cfg, nu, f"{key}_monotone", d, prev, tol))
        prev = d
    nu_last, d_last = entries[-1]
    res.rows.append(_row(cfg, nu_last, f"{key}_final", d_last, 3 * tol, 0.0))


def _record(ctx: dict, key: str, nu: int, value: float) -> None:
    with ctx["lock"]:
        ctx["profiles"].setdefault(key, []).append((nu, float(value)))


def _new_ctx() -> dict:
    import threading
    return {"rows": [], "profiles": {}, "lock": threading.Lock()}


# ----------------------------------------------------------- composite


COMPOSITE_CHECKS = ("inf_phi", "phi_distance", "f_profile", "minval", "tilted", "composite", "inequality",
                    "constraint_composite", "lagrangian", "dual_A", "dual_B", "weak_duality", "exactness",
                    "affine_oracle", "composite_oracle", "tightness", "surrogates", "augmentation")


def _prepare_composite(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    H = cfg.grid_step
    m = int(p.get("m", 1))
    ctx = _new_ctx()
    f = _composite_model(p, None)
    ugrid, xgrid = _grid(cfg, "u", H), _grid(cfg, "x", H)
    ygrid = _grid(cfg, "y", p.get("y_step_factor", 10) * H)
    ctx.update(f=f, ugrid=ugrid, xgrid=xgrid, ygrid=ygrid, m=m)
    ctx["F"] = f.tabulate(ugrid, xgrid)
    ctx["surrogate_tol"] = 2 * ctx["F"].grid.max_step
    phigrid = _grid(cfg, "phi_x", H)
    ctx["phigrid"] = phigrid
    ctx["phi"] = _table(f.objective, phigrid)
    if _boundary_truncated(ctx["phi"].values, phigrid, f.objective):
        ctx["rows"].append(_probe_error(cfg, 0, "phi"))
    checks = set(cfg.checks)
    if "inf_phi" in checks:
        inf, arg = infimum_argmin(ctx["phi"])
        tol = p.get("inf_phi_tol", 0.01)
        ctx["rows"].append(_row(cfg, 0, "inf_phi", abs(inf - p["expect_inf_phi"]), 0.0, tol, {"value": inf}))
        want = PointCloud.from_points(p["expect_argmin"])
        dist = truncated_hausdorff(arg, want, math.inf, NormSpec.of((1, "ABS")))
        ctx["rows"].append(_row(cfg, 0, "argmin_phi", dist, 0.0, tol, {"points": arg.points.tolist()}))
    if checks & {"dual_A", "dual_B", "weak_duality", "surrogates", "affine_oracle"}:
        ctx["psi"] = dual_numeric(f, ygrid, ugrid, xgrid)
    if checks & {"lagrangian", "surrogates"}:
        ctx["l"], _ = B.lagrangian_from_table(ctx["F"], m, p["y"])
    if "exactness" in checks:
        ctx["rows"].append(_composite_exactness(cfg, f))
    if "affine_oracle" in checks:
        ctx["rows"].append(_affine_oracle(cfg, ctx))
    if "composite_oracle" in checks:
        ctx["rows"].append(_composite_oracle(cfg, ctx))
    if "inequality" in checks:
        ctx.update(_inequality_base(cfg))
    if "constraint_composite" in checks:
        ctx.update(_cc_base(cfg))
    if "augmentation" in checks and "aug_exact" in p:
        ctx["rows"].append(_augmented_exactness(cfg, f))
    return ctx


def _composite_exactness(cfg: ScenarioConfig, f: RockafellianModel) -> Row:
    """Scan multipliers on a grid; ``expect_exact`` decides which outcome passes."""
    e = cfg.params["exactness"]
    ug = Grid.from_spacing([tuple(e["u_box"])], e["u_step"])
    xg = Grid.from_spacing([tuple(e["x_box"])], e["x_step"])
    ys = np.linspace(e["y_box"][0], e["y_box"][1], int(e["y_count"]))
    reps = scan_exactness(f, [[y] for y in ys], ug, xg)
    best = max(reps, key=lambda r: r.min_slack)
    detail = {"best_y": float(best.supported_by[0]), "y_count": len(ys)}
    if e.get("expect_exact", False):
        return _row(cfg, 0, "exactness", -best.min_slack, 0.0, best.tol, detail)
    # expected to fail for every multiplier: the best slack must stay below -tol
    return _row(cfg, 0, "inexactness", best.min_slack + best.tol, 0.0, 0.0, detail)


def _augmented_exactness(cfg: ScenarioConfig, f: RockafellianModel) -> Row:
    e = cfg.params["aug_exact"]
    g = augment(f, AugmentationSpec(AugKind.INDICATOR_ZERO))
    ug = Grid.from_spacing([tuple(e["u_box"])], e["u_step"])
    xg = Grid.from_spacing([tuple(e["x_box"])], e["x_step"])
    rep = check_exactness(g, [0.0], ug, xg)
    return _row(cfg, 0, "strict_exactness_indicator", 0.0 if rep.strict else 1.0, 0.0, 0.0,
                {"min_slack": rep.min_slack})


def _affine_oracle(cfg: ScenarioConfig, ctx: dict) -> Row:
    """Closed-form affine dual against joint (u, x) grid minimisation at random multipliers."""
    p = cfg.params
    o = p["affine"]["oracle"]
    a, b = p["affine"]["A"], p["affine"]["b"]
    step = o.get("step", 1e-3)
    ug = Grid.from_spacing([tuple(o["u_box"])], step)
    xg = Grid.from_spacing([tuple(o["x_box"])], step)
    U = ug.points()[:, 0]
    best_u = ctx["f"].table(ug, xg).min(axis=1)
    g0 = catalog.parse(p["g0"])
    zmax = abs(a) * max(map(abs, o["y_box"])) + 1.0
    zgrid = Grid.from_spacing([(-zmax, zmax)], step)
    conj = conjugate(_table(g0, xg), zgrid.box, zgrid)
    rng = np.random.default_rng(o.get("seed", 0))
    err = 0.0
    for y in rng.uniform(*o["y_box"], size=o.get("probes", ORACLE_PROBES)):
        num = float(np.min(xr_add(best_u, -y * U)))
        err = max(err, abs(num - dual_affine_closed(conj, [[a]], [b], [y])))
    return _row(cfg, 0, "affine_dual_oracle", err, 0.0, o.get("tol", 1e-3),
                {"probes": o.get("probes", ORACLE_PROBES), "u_step": step})


def _composite_oracle(cfg: ScenarioConfig, ctx: dict) -> Row:
    """Closed-form composite Lagrangian against u-grid minimisation at random (x, y)."""
    p = cfg.params
    o = p["composite_oracle"]
    X, g0, G, h = _composite_parts(p, None)
    f = ctx["f"]
    rng = np.random.default_rng(o.get("seed", 0))
    ug = Grid.from_spacing([tuple(o["u_box"])], o["u_step"])
    zg = Grid.from_spacing([tuple(o["z_box"])], o["u_step"])
    hconj = conjugate(_table(h, zg), [tuple(o["y_box"])], Grid.from_spacing([tuple(o["y_box"])], 0.01))
    err = 0.0
    for _ in range(o.get("probes", ORACLE_PROBES)):
        x = rng.uniform(*o["x_box"], size=1)
        y = rng.uniform(*o["y_box"], size=1)
        num = lagrangian_numeric(f, x, y, ug)
        cf = lagrangian_composite_closed(g0, G, hconj, x, y, X)
        err = max(err, abs(num - cf))
    return _row(cfg, 0, "composite_lagrangian_oracle", err, 0.0, o.get("tol", 1e-3),
                {"probes": o.get("probes", ORACLE_PROBES), "u_step": o["u_step"]})


def _inequality_base(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    H = cfg.grid_step * p.get("ineq_step_factor", 10)
    g0 = catalog.parse(p["g0"])
    g1 = catalog.parse(p["G"])
    model = build_constraint_family("INEQUALITY", 1, g0=g0, gs=[g1])
    ug = _grid(cfg, "ineq_u", H)
    xg = _grid(cfg, "ineq_x", H)
    rho = _rho(cfg, "inequality")
    rg = Grid.from_spacing([(-(2 * rho + 1), 2 * rho + 1)], cfg.grid_step)
    return {"ineq": {"F": model.tabulate(ug, xg), "ug": ug, "xg": xg, "rg": rg,
                     "g": [_table(g0, rg), _table(g1, rg)]}}


def _inequality_nu(cfg: ScenarioConfig, ctx: dict, nu: int) -> B.BoundReport:
    p = cfg.params
    d = ctx["ineq"]
    g0 = catalog.parse(p["g0"])
    g1 = catalog.shifted(catalog.parse(p["G"]), p.get("G_shift", 0.0) / nu)
    model = build_constraint_family("INEQUALITY", 1, g0=g0, gs=[g1])
    Fn = model.tabulate(d["ug"], d["xg"])
    norm = B.epi_norm(1, 1, 1, 1)
    gn = [d["g"][0], _table(g1, d["rg"])]
    return B.bound_constraint_family("INEQUALITY", d["F"], Fn, norm, _rho(cfg, "inequality"), d["g"], gn)


def _cc_parts(cfg: ScenarioConfig, nu: int | None):
    cc = cfg.params["cc"]
    g0, G, h = (catalog.parse(cc[k]) for k in ("g0", "G", "h"))
    if nu is not None and cc.get("h_shift"):
        h = catalog.shifted(h, cc["h_shift"] / nu)
    return g0, G, h


def _cc_base(cfg: ScenarioConfig) -> dict:
    H = cfg.grid_step * cfg.params.get("cc_step_factor", 5)
    g0, G, h = _cc_parts(cfg, None)
    model = build_constraint_family("CONSTRAINT_COMPOSITE", 1, g0=g0, G=G, h=h, m=1)
    ug, xg = _grid(cfg, "cc_u", H), _grid(cfg, "cc_x", H)
    gg = _grid(cfg, "cc_g", cfg.grid_step)
    zg = _grid(cfg, "cc_z", cfg.grid_step)
    return {"cc": {"F": model.tabulate(ug, xg), "ug": ug, "xg": xg, "gg": gg, "zg": zg,
                   "g": _gtabs(g0, G, 1, gg), "H": _table(h, zg)}}


def _cc_nu(cfg: ScenarioConfig, ctx: dict, nu: int) -> B.BoundReport:
    d = ctx["cc"]
    g0, G, h = _cc_parts(cfg, nu)
    model = build_constraint_family("CONSTRAINT_COMPOSITE", 1, g0=g0, G=G, h=h, m=1)
    Fn = model.tabulate(d["ug"], d["xg"])
    norm = B.epi_norm(1, 1, 1)
    return B.bound_constraint_family("CONSTRAINT_COMPOSITE", d["F"], Fn, norm, _rho(cfg, "constraint_composite"),
                                     d["g"], _gtabs(g0, G, 1, d["gg"]), d["H"], _table(h, d["zg"]), m=1)


def _composite_rho_hat(cfg: ScenarioConfig, ctx: dict, l: GriddedFunction, ln: GriddedFunction, nu: int, rho: float):
    """Attainment radius from the composite quantification: rho plus the size of G on low Lagrangian values."""
    p = cfg.params
    if p.get("rho_hat") != "composite_formula":
        return None
    m = ctx["m"]
    xs = ctx["xgrid"].points()
    near = np.linalg.norm(xs, axis=1) <= rho + 1e-12
    delta = 0.0
    for G, lv in ((_composite_parts(p, None)[2], l), (_composite_parts(p, nu)[2], ln)):
        ok = near & (lv.values.ravel() <= rho)
        if ok.any():
            Gv = np.asarray(G(xs[ok]), dtype=float).reshape(-1, m)
            delta = max(delta, float(np.linalg.norm(Gv, axis=1).max()))
    # the grid minimiser in u can sit one step beyond -G(x)
    return max(rho, delta + float(p.get("K_radius", 0.0))) + ctx["ugrid"].max_step


def _per_nu_composite(cfg: ScenarioConfig, ctx: dict, nu: int) -> list[Row]:
    p = cfg.params
    m = ctx["m"]
    checks = set(cfg.checks)
    rows: list[Row] = []
    F = ctx["F"]
    fn = _composite_model(p, nu)
    Fn = fn.tabulate(ctx["ugrid"], ctx["xgrid"])
    phin = _table(fn.objective, ctx["phigrid"])
    if _boundary_truncated(phin.values, ctx["phigrid"], fn.objective):
        rows.append(_probe_error(cfg, nu, "phi_nu"))
    xn1 = B.epi_norm(1)
    y = np.asarray(p.get("y", [0.0] * m), dtype=float)
    if "inf_phi" in checks and "expect_inf_phi_nu_min" in p:
        rows.append(_row(cfg, nu, "inf_phi_nu", p["expect_inf_phi_nu_min"], float(phin.values.min()), 0.0))
    if "phi_distance" in checks:
        d = epi_distance(ctx["phi"], phin, _rho(cfg, "phi_distance"), xn1)
        rows.append(_row(cfg, nu, "phi_distance", p["phi_distance_min"], d, 0.0))
    if "f_profile" in checks:
        d = epi_distance(F, Fn, _rho(cfg, "f_profile"), B.epi_norm(m, 1))
        _record(ctx, "f_profile", nu, d)
        rows.append(_row(cfg, nu, "f_distance", d, p.get("f_rate_coef", 1.0) / nu, 2 * F.grid.max_step))
    if "minval" in checks:
        rep = B.bound_minval(ctx["phi"], phin, _rho(cfg, "minval"), p.get("minval_eps", 0.0), xn1)
        rows.append(_report_row(cfg, nu, rep))
    if "tilted" in checks:
        rows.append(_report_row(cfg, nu, B.bound_tilted(F, Fn, m, y, y, _rho(cfg, "tilted"))))
    if "composite" in checks:
        X, _, _, _ = _composite_parts(p, None)
        Xn, g0n, Gn, hn = _composite_parts(p, nu)
        rep = B.bound_composite(F, Fn, m, _x_cloud(X, ctx["xgrid"]), _x_cloud(Xn, ctx["xgrid"]), ctx["gtabs"],
                                _gtabs(g0n, Gn, m, ctx["gg"]), ctx["H"], _table(hn, ctx["zg"]), _rho(cfg, "composite"))
        rows.append(_report_row(cfg, nu, rep))
    if "inequality" in checks:
        rows.append(_report_row(cfg, nu, _inequality_nu(cfg, ctx, nu)))
    if "constraint_composite" in checks:
        rows.append(_report_row(cfg, nu, _cc_nu(cfg, ctx, nu)))
    if "lagrangian" in checks:
        rho = _rho(cfg, "lagrangian")
        y_nu = y + np.asarray(p.get("lag_offset", [0.0] * m), dtype=float)
        ln, _ = B.lagrangian_from_table(Fn, m, y_nu)
        rho_hat = _composite_rho_hat(cfg, ctx, ctx["l"], ln, nu, rho)
        rows.append(_report_row(cfg, nu, B.bound_lagrangian(F, Fn, m, y, y_nu, rho, rho_hat)))
    psin = None
    if checks & {"dual_A", "dual_B", "weak_duality", "surrogates"}:
        psin = dual_numeric(fn, ctx["ygrid"], ctx["ugrid"], ctx["xgrid"])
    for mode in ("A", "B"):
        if f"dual_{mode}" in checks:
            rep = B.bound_dual(ctx["psi"], psin, F, Fn, m, _rho(cfg, f"dual_{mode}"), mode)
            rows.append(_report_row(cfg, nu, rep))
    if "weak_duality" in checks:
        rows.extend(_duality_rows(cfg, nu, psin, Fn, m, bool(p.get("exact", False))))
    if "surrogates" in checks:
        rho = _rho(cfg, "surrogates")
        ln_same, _ = B.lagrangian_from_table(Fn, m, y)
        _record(ctx, "lagrangian_surrogate", nu, epi_distance(ln_same, ctx["l"], rho, B.epi_norm(1)))
        _record(ctx, "dual_surrogate", nu,
                epi_distance(psin.values, ctx["psi"].values, _dual_surrogate_rho(cfg), B.epi_norm(m),
                             orientation="HYPO"))
    if "augmentation" in checks:
        a = p["augmentation"]
        spec = AugmentationSpec(AugKind.PROX, theta=a["theta"])
        spec_nu = AugmentationSpec(AugKind.PROX, theta=a["theta"] + a.get("theta_shift", 0.0) / nu)
        rep = B.bound_augmentation(F, Fn, m, spec, spec_nu, a["eta"], _rho(cfg, "augmentation"))
        rows.append(_report_row(cfg, nu, rep))
    return rows


def _tightness_row(cfg: ScenarioConfig, models, y, phis, grid_name: str, step: float) -> Row:
    ug = _grid(cfg, grid_name, step)
    xs = [infimum_argmin(ph)[1].points[0] for ph in phis]
    rep = tightness_diagnostic(models, [y] * len(models), xs, ug, mode="EMPIRICAL")
    worst = max(rep.radii) if rep.radii else 0.0
    return _row(cfg, 0, "tightness", worst, rep.box_radius - rep.margin, 0.0,
                {"failures": rep.failures, "radii": rep.radii})


def _finish_composite(cfg: ScenarioConfig, ctx: dict, res: SweepResult) -> None:
    p = cfg.params
    checks = set(cfg.checks)
    if "f_profile" in checks:
        entries = sorted(ctx["profiles"]["f_profile"])
        res.profiles["f_profile"] = entries
        tol = 2 * ctx["F"].grid.max_step
        rate = fit_rate(entries, tol)
        if rate is None:
            res.rows.append(_row(cfg, 0, "f_rate", math.nan, math.nan, 0.0, status="INAPPLICABLE"))
        else:
            res.rows.append(_row(cfg, 0, "f_rate", abs(rate - p.get("f_rate", -1.0)), 0.0,
                                 p.get("f_rate_tol", 0.15), {"rate": rate}))
    if "surrogates" in checks:
        _surrogate_finish(cfg, ctx, res, "lagrangian_surrogate")
        _surrogate_finish(cfg, ctx, res, "dual_surrogate")
    if "tightness" in checks:
        models = [_composite_model(p, nu) for nu in cfg.nu_list]
        phis = [_table(f.objective, ctx["phigrid"]) for f in models]
        res.rows.append(_tightness_row(cfg, models, p.get("y", [0.0]), phis, "u_tight", cfg.grid_step))


def _prepare_composite_all(cfg: ScenarioConfig) -> dict:
    ctx = _prepare_composite(cfg)
    p = cfg.params
    m = ctx["m"]
    if "composite" in cfg.checks:
        X, g0, G, h = _composite_parts(p, None)
        ctx["gg"] = _grid(cfg, "g_x", cfg.grid_step)
        ctx["zg"] = _grid(cfg, "z", cfg.grid_step)
        ctx["gtabs"] = _gtabs(g0, G, m, ctx["gg"])
        ctx["H"] = _table(h, ctx["zg"])
    if "weak_duality" in cfg.checks:
        ctx["rows"].extend(_duality_rows(cfg, 0, ctx["psi"], ctx["F"], m, bool(p.get("exact", False))))
    return ctx


# ----------------------------------------------------------- ambiguity


AMBIGUITY_CHECKS = ("ambiguity", "lagrangian", "lagrangian_oracle", "exactness", "dual_A", "dual_B",
                    "weak_duality", "tightness", "surrogates")


def _ambiguity_model(p: dict, nu: int | None) -> RockafellianModel:
    w = np.asarray(p["p"], dtype=float)
    theta = float(p.get("theta", 0.0))
    if nu is not None:
        w = w + np.asarray(p.get("p_shift", [0.0] * len(w)), dtype=float) / nu
        theta = theta + float(p.get("theta_shift", 0.0)) / nu
    return build_ambiguity(catalog.parse(p["g0"]), [catalog.parse(t) for t in p["gs"]], w, theta, n=1)


def _prepare_ambiguity(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    H = cfg.grid_step
    ctx = _new_ctx()
    f = _ambiguity_model(p, None)
    m = f.m
    ug = _grid(cfg, "u", p.get("u_step_factor", 5) * H)
    xg = _grid(cfg, "x", H)
    yg = _grid(cfg, "y", p.get("y_step_factor", 25) * H)
    ctx.update(f=f, m=m, ugrid=ug, xgrid=xg, ygrid=yg, F=f.tabulate(ug, xg))
    ctx["surrogate_tol"] = 2 * ctx["F"].grid.max_step
    ctx["phigrid"] = xg
    ctx["gtabs"] = [_table(catalog.parse(t), xg) for t in p["gs"]]
    checks = set(cfg.checks)
    y = np.asarray(p["y"], dtype=float)
    if checks & {"lagrangian", "surrogates"}:
        ctx["l"], _ = B.lagrangian_from_table(ctx["F"], m, y)
    if checks & {"dual_A", "dual_B", "weak_duality", "surrogates"}:
        ctx["psi"] = dual_numeric(f, yg, ug, xg)
    if "weak_duality" in checks:
        ctx["rows"].extend(_duality_rows(cfg, 0, ctx["psi"], ctx["F"], m, bool(p.get("exact", False))))
    if "lagrangian_oracle" in checks:
        ctx["rows"].append(_ambiguity_oracle(cfg, f))
    if "exactness" in checks:
        yv = ambiguity_support_vector(f, p["eta"], xg)
        w = f.params["p"]
        ue = Grid.from_spacing([(-float(wi), 0.0) for wi in w], p.get("exact_u_step", 0.01))
        rep = check_exactness(f, yv, ue, xg)
        ctx["rows"].append(_row(cfg, 0, "support_vector_exactness", -rep.min_slack, 0.0, 1e-6,
                                {"y": yv.tolist(), "strict": rep.strict}))
    return ctx


def _ambiguity_oracle(cfg: ScenarioConfig, f: RockafellianModel) -> Row:
    p = cfg.params
    o = p["oracle"]
    rng = np.random.default_rng(o.get("seed", 0))
    w = f.params["p"]
    ug = Grid.from_spacing([(-float(wi), 0.0) for wi in w], o.get("u_step", 1e-3))
    err = 0.0
    for _ in range(o.get("probes", ORACLE_PROBES)):
        x = rng.uniform(*o["x_box"], size=1)
        y = rng.uniform(*o["y_box"], size=f.m)
        err = max(err, abs(lagrangian_numeric(f, x, y, ug) - lagrangian_ambiguity_closed(f, x, y)))
    return _row(cfg, 0, "ambiguity_lagrangian_oracle", err, 0.0, o.get("tol", 1e-3),
                {"probes": o.get("probes", ORACLE_PROBES), "u_step": o.get("u_step", 1e-3),
                 "theta": f.params["theta"]})


def _per_nu_ambiguity(cfg: ScenarioConfig, ctx: dict, nu: int) -> list[Row]:
    p = cfg.params
    m = ctx["m"]
    checks = set(cfg.checks)
    rows: list[Row] = []
    F = ctx["F"]
    fn = _ambiguity_model(p, nu)
    Fn = fn.tabulate(ctx["ugrid"], ctx["xgrid"])
    w, wn = ctx["f"].params["p"], fn.params["p"]
    y = np.asarray(p["y"], dtype=float)
    if "ambiguity" in checks:
        rep = B.bound_ambiguity(F, Fn, m, w, wn, ctx["f"].params["theta"], fn.params["theta"], p["eta"],
                                ctx["gtabs"], _rho(cfg, "ambiguity"))
        rows.append(_report_row(cfg, nu, rep))
    if "lagrangian" in checks:
        rho = _rho(cfg, "lagrangian")
        # attainment radius max{rho, |p|_2}, one u step added for grid rounding
        rho_hat = max(rho, float(np.linalg.norm(w)), float(np.linalg.norm(wn))) + ctx["ugrid"].max_step
        rows.append(_report_row(cfg, nu, B.bound_lagrangian(F, Fn, m, y, y, rho, rho_hat)))
    psin = None
    if checks & {"dual_A", "dual_B", "weak_duality", "surrogates"}:
        psin = dual_numeric(fn, ctx["ygrid"], ctx["ugrid"], ctx["xgrid"])
    for mode in ("A", "B"):
        if f"dual_{mode}" in checks:
            rows.append(_report_row(cfg, nu, B.bound_dual(ctx["psi"], psin, F, Fn, m, _rho(cfg, f"dual_{mode}"), mode)))
    if "weak_duality" in checks:
        rows.extend(_duality_rows(cfg, nu, psin, Fn, m, bool(p.get("exact", False))))
    if "surrogates" in checks:
        rho = _rho(cfg, "surrogates")
        ln, _ = B.lagrangian_from_table(Fn, m, y)
        _record(ctx, "lagrangian_surrogate", nu, epi_distance(ln, ctx["l"], rho, B.epi_norm(1)))
        _record(ctx, "dual_surrogate", nu,
                epi_distance(psin.values, ctx["psi"].values, _dual_surrogate_rho(cfg), B.epi_norm(m),
                             orientation="HYPO"))
    return rows


def _finish_ambiguity(cfg: ScenarioConfig, ctx: dict, res: SweepResult) -> None:
    checks = set(cfg.checks)
    if "surrogates" in checks:
        _surrogate_finish(cfg, ctx, res, "lagrangian_surrogate")
        _surrogate_finish(cfg, ctx, res, "dual_surrogate")
    if "tightness" in checks:
        models = [_ambiguity_model(cfg.params, nu) for nu in cfg.nu_list]
        phis = [_table(f.objective, ctx["xgrid"]) for f in models]
        step = cfg.params.get("u_step_factor", 5) * cfg.grid_step
        res.rows.append(_tightness_row(cfg, models, cfg.params["y"], phis, "u_tight", step))


# ----------------------------------------------------------- splitting


SPLITTING_CHECKS = ("splitting", "lagrangian_oracle", "weak_duality")


def _splitting_model(p: dict, nu: int | None) -> RockafellianModel:
    w = np.asarray(p["p"], dtype=float)
    gs = [catalog.parse(t) for t in p["gs"]]
    if nu is not None:
        w = w + np.asarray(p.get("p_shift", [0.0] * len(w)), dtype=float) / nu
        shifts = p.get("g_shift", [0.0] * len(gs))
        gs = [catalog.shifted(g, c / nu) if c else g for g, c in zip(gs, shifts)]
    return build_splitting(gs, w, n=1)


def _prepare_splitting(cfg: ScenarioConfig) -> dict:
    p = cfg.params
    ctx = _new_ctx()
    f = _splitting_model(p, None)
    step = p.get("joint_step_factor", 5) * cfg.grid_step
    ug, xg = _grid(cfg, "u", step), _grid(cfg, "x", step)
    gg = _grid(cfg, "g_x", cfg.grid_step)
    ctx.update(f=f, ugrid=ug, xgrid=xg, gg=gg, F=f.tabulate(ug, xg),
               gtabs=[_table(catalog.parse(t), gg) for t in p["gs"]])
    checks = set(cfg.checks)
    if "weak_duality" in checks:
        ctx["ygrid"] = _grid(cfg, "y", p.get("y_step_factor", 25) * cfg.grid_step)
        ctx["psi"] = dual_numeric(f, ctx["ygrid"], ug, xg)
        ctx["rows"].extend(_duality_rows(cfg, 0, ctx["psi"], ctx["F"], f.m, False))
    if "lagrangian_oracle" in checks:
        ctx["rows"].append(_splitting_oracle(cfg, f))
    return ctx


def _splitting_oracle(cfg: ScenarioConfig, f: RockafellianModel) -> Row:
    o = cfg.params["oracle"]
    rng = np.random.default_rng(o.get("seed", 0))
    w = f.params["p"]
    ug = Grid.from_spacing([tuple(b) for b in o["u_box"]], o.get("u_step", 1e-3))
    sgrid = Grid.from_spacing([tuple(o["s_box"])], o.get("s_step", 1e-3))
    conj = [conjugate(_table(catalog.parse(t), sgrid), [tuple(o["s_box"])], sgrid) for t in cfg.params["gs"]]
    err = 0.0
    for _ in range(o.get("probes", ORACLE_PROBES)):
        x = rng.uniform(*o["x_box"], size=1)
        y = rng.uniform(*o["y_box"], size=len(w))
        num = lagrangian_numeric(f, x, y, ug)
        cf = lagrangian_splitting_closed(f, x, y, conj)
        err = max(err, abs(num - cf))
    return _row(cfg, 0, "splitting_lagrangian_oracle", err, 0.0, o.get("tol", 1e-3),
                {"probes": o.get("probes", ORACLE_PROBES), "u_step": o.get("u_step", 1e-3)})


def _per_nu_splitting(cfg: ScenarioConfig, ctx: dict, nu: int) -> list[Row]:
    p = cfg.params
    rows: list[Row] = []
    fn = _splitting_model(p, nu)
    Fn = fn.tabulate(ctx["ugrid"], ctx["xgrid"])
    if "splitting" in cfg.checks:
        gn = [_table(g, ctx["gg"]) for g in fn.params["gs"]]
        rep = B.bound_splitting(ctx["F"], Fn, len(p["gs"]), ctx["f"].params["p"], fn.params["p"], p["eta"],
                                ctx["gtabs"], gn, _rho(cfg, "splitting"))
        rows.append(_report_row(cfg, nu, rep))
    if "weak_duality" in cfg.checks:
        psin = dual_numeric(fn, ctx["ygrid"], ctx["ugrid"], ctx["xgrid"])
        rows.extend(_duality_rows(cfg, nu, psin, Fn, fn.m, False))
    return rows


def _finish_noop(cfg, ctx, res) -> None:
    return None


# ------------------------------------------------------------ registry


_CUBIC = {
    "g0": "poly:-1,0", "G": "poly:1,-1,-1,1", "h": "ind_nonpos", "X": [[-2, 2]], "G_shift": 1.0,
    "y": [1.0], "lag_offset": [0.2], "rho_hat": "composite_formula",
    "expect_inf_phi": -1.0, "expect_argmin": [[1.0]], "expect_inf_phi_nu_min": 1.0, "phi_distance_min": 0.5,
    "f_rate": -1.0, "f_rate_tol": 0.15, "f_rate_coef": 1.0,
    "rho_by_check": {"tilted": 1.0, "lagrangian": 1.0, "inequality": 1.0, "constraint_composite": 1.0,
                     "dual_A": 2.0, "dual_B": 2.0, "surrogates": 1.0,
                     "dual_surrogate": 2.0},
    "exactness": {"u_box": [-1e-3, 1e-3], "u_step": 1e-6, "x_box": [-2, 2], "x_step": 5e-4,
                  "y_box": [0, 50], "y_count": 51, "expect_exact": False},
    "cc": {"g0": "poly:-1,0", "G": "poly:1,0", "h": "poly:1,-1,-1,1", "h_shift": 1.0},
}

_CUBIC_BOXES = {
    "u": [[-10, 10]], "x": [[-2, 2]], "y": [[-2.5, 2.5]], "phi_x": [[-3, 3]], "u_tight": [[-10, 10]],
    "g_x": [[-4, 4]], "z": [[-30, 30]],
    "ineq_u": [[-1.5, 1.5], [-1.5, 1.5], [-1.5, 1.5]], "ineq_x": [[-1.5, 1.5]],
    "cc_u": [[-2, 2], [-2, 2]], "cc_x": [[-2, 2]], "cc_g": [[-4, 4]], "cc_z": [[-6, 6]],
}

register(Scenario(
    "cubic-nlp", "composite optimization: cubic nonlinear program whose objectives fail to epi-converge",
    "composite", COMPOSITE_CHECKS,
    {"params": _CUBIC, "probe_boxes": _CUBIC_BOXES,
     "checks": ("inf_phi", "phi_distance", "f_profile", "minval", "tilted", "composite", "inequality",
                "constraint_composite", "lagrangian", "dual_A", "dual_B", "weak_duality", "exactness",
                "tightness", "surrogates")},
    _prepare_composite_all, _per_nu_composite, _finish_composite))

register(Scenario(
    "composite-xshift", "composite optimization: feasible set translated by c/nu",
    "composite", COMPOSITE_CHECKS,
    {"params": {"g0": "sqnorm:0.5", "G": "poly:-1,0.5", "h": "ind_nonpos", "X": [[-1, 1]], "X_shift": 0.5,
                "y": [0.5], "exact": True, "rho_by_check": {"tilted": 1.0, "lagrangian": 1.0, "surrogates": 1.0},
                # u-grid rounding of the constraint boundary costs y * step, so y stays below 1
                "composite_oracle": {"x_box": [-1, 1], "y_box": [0, 0.8], "u_box": [-2, 1], "z_box": [-3, 3],
                                     "u_step": 1e-3}},
     "probe_boxes": {"u": [[-3, 3]], "x": [[-2, 2]], "y": [[-3, 3]], "phi_x": [[-2, 2]], "u_tight": [[-3, 3]],
                     "g_x": [[-4, 4]], "z": [[-10, 10]]},
     "checks": ("composite_oracle", "composite", "tilted", "lagrangian", "dual_A", "dual_B", "weak_duality",
                "tightness", "surrogates")},
    _prepare_composite_all, _per_nu_composite, _finish_composite))

register(Scenario(
    "composite-penalty", "composite optimization: constraint indicator replaced by an exact penalty nu*max(0, .)",
    "composite", COMPOSITE_CHECKS,
    {"params": {"g0": "sqnorm:0.5", "G": "poly:-1,0.5", "h": "ind_nonpos", "h_nu": "hinge:{nu}", "X": [[-1, 1]],
                "y": [0.5]},
     "probe_boxes": {"u": [[-3, 3]], "x": [[-2, 2]], "y": [[-4, 4]], "phi_x": [[-2, 2]],
                     "g_x": [[-4, 4]], "z": [[-10, 10]]},
     "checks": ("composite", "dual_A", "dual_B", "weak_duality")},
    _prepare_composite_all, _per_nu_composite, _finish_composite))

register(Scenario(
    "dual-affine", "composite optimization: affine constraint map with the zero indicator, closed-form dual",
    "composite", COMPOSITE_CHECKS,
    {"params": {"g0": "sqnorm:0.5", "G": "poly:1,-0.25", "h": "ind_zero", "X": None, "g0_scale": 1.0,
                "y": [-0.25], "exact": True,
                "affine": {"A": 1.0, "b": 0.25,
                           "oracle": {"y_box": [-1, 1], "u_box": [-1.5, 1.5], "x_box": [-1.5, 1.5]}},
                "rho_by_check": {"tilted": 1.0, "lagrangian": 1.0}},
     "probe_boxes": {"u": [[-3, 3]], "x": [[-3, 3]], "y": [[-2, 2]], "phi_x": [[-3, 3]],
                     "g_x": [[-4, 4]], "z": [[-10, 10]]},
     "checks": ("affine_oracle", "composite", "tilted", "lagrangian", "dual_A", "dual_B", "weak_duality")},
    _prepare_composite_all, _per_nu_composite, _finish_composite))

register(Scenario(
    "augmented-cubic", "augmentation: proximal terms theta|u|^2 on the cubic Rockafellian",
    "composite", COMPOSITE_CHECKS,
    {"params": {**_CUBIC, "augmentation": {"theta": 1.0, "theta_shift": 1.0, "eta": 2.0},
                "aug_exact": {"u_box": [-0.1, 0.1], "u_step": 1e-3, "x_box": [-2, 2], "x_step": 1e-3}},
     "probe_boxes": {**_CUBIC_BOXES, "u": [[-3, 3]]},
     "checks": ("augmentation", "weak_duality")},
    _prepare_composite_all, _per_nu_composite, _finish_composite))

_AMB = {"g0": "const:0", "gs": ["sqnorm:0.25", "poly:0.1,-0.2,0.1"], "p": [0.5, 0.5], "p_shift": [0.5, -0.5],
        "theta": 0.0, "theta_shift": 0.0, "eta": 1.0, "y": [1.0, 1.0], "exact": True,
        "oracle": {"x_box": [-1, 2], "y_box": [-1, 2]},
        "rho_by_check": {"lagrangian": 1.0, "surrogates": 1.0, "dual_A": 1.0, "dual_B": 1.0}}
_AMB_BOXES = {"u": [[-1, 0], [-1, 0]], "x": [[-2.5, 2.5]], "y": [[-2, 3], [-2, 3]], "u_tight": [[-2, 2], [-2, 2]]}

register(Scenario(
    "ambiguity", "ambiguity: probability weights perturbed within the simplex, theta = 0",
    "ambiguity", AMBIGUITY_CHECKS, {"params": _AMB, "probe_boxes": _AMB_BOXES},
    _prepare_ambiguity, _per_nu_ambiguity, _finish_ambiguity))

register(Scenario(
    "ambiguity-prox", "ambiguity: quadratic regularisation theta|u|^2 with theta perturbed",
    "ambiguity", AMBIGUITY_CHECKS,
    {"params": {**_AMB, "theta": 0.5, "theta_shift": 0.5, "p_shift": [0.0, 0.0]}, "probe_boxes": _AMB_BOXES,
     "checks": ("ambiguity", "lagrangian", "lagrangian_oracle", "weak_duality")},
    _prepare_ambiguity, _per_nu_ambiguity, _finish_ambiguity))

register(Scenario(
    "splitting", "splitting: separate copies of x for each component, weights perturbed",
    "splitting", SPLITTING_CHECKS,
    {"params": {"gs": ["sqnorm:1", "poly:1,-2,1"], "p": [0.5, 0.5], "p_shift": [0.25, -0.25],
                "g_shift": [1.0, 0.0], "eta": 0.0,
                "oracle": {"x_box": [-0.25, 0.25], "y_box": [-0.25, 0.25], "u_box": [[-0.55, 0.55], [0.45, 1.55]],
                           "s_box": [-3, 3]}},
     "probe_boxes": {"u": [[-2, 2], [-2, 2]], "x": [[-2, 2]], "g_x": [[-6, 6]], "y": [[-2, 2], [-2, 2]]},
     "rho": 1.0},
    _prepare_splitting, _per_nu_splitting, _finish_noop))


def anchors() -> list[tuple[str, str]]:
    return [(s.id, s.anchor) for s in REGISTRY.values()]
