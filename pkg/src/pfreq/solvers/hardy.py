"""Hardy constants h_{p,q} for p <= q <= inf with weight d^(N/q + (p - N)/p)."""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from ..calculus import ExponentPair, grid_energy_form, hardy_exponent
from ..geometry import Grid, GridField
from ._core import SolveReport, Timer
from .frequency import UPPER_BOUND_LABEL, check_connected, default_tol, point_constrained_min, power_iteration

ORBIT_REFINE = 3


def _orbits(grid: Grid, nodes: np.ndarray) -> list[list[int]]:
    """Group nodes into orbits of the reflection (and, when allowed, permutation) symmetries."""
    dom = grid.domain
    c = dom.symmetry_center() if dom is not None else None
    if c is None:
        return [[int(k)] for k in nodes]
    rel = np.rint((grid.coords()[nodes] - c) / grid.h * 2).astype(np.int64)
    rel = np.abs(rel)
    permutable = dom.kind in {"ball", "annulus"} or (
        dom.kind == "box" and len(set(dom.params["extents"])) == 1
    )
    if permutable:
        rel = np.sort(rel, axis=1)
    groups: dict[tuple, list[int]] = defaultdict(list)
    for key, k in zip(map(tuple, rel), nodes):
        groups[key].append(int(k))
    return [sorted(v) for _, v in sorted(groups.items(), key=lambda kv: kv[1][0])]


def _sup_quotients(form, grid, p, wgt, gam, nodes, tol):
    X = grid.coords()
    inner = grid.interior.reshape(-1)
    out = []
    iters = 0
    for k in nodes:
        val = wgt[k] ** gam
        guess = val * np.clip(1.0 - np.linalg.norm(X - X[k], axis=1) / max(2 * wgt[k], grid.h), 0.0, 1.0)
        u, E, it, _ = point_constrained_min(form, p, int(k), val, guess, tol)
        iters += it
        ratio = np.max(u[inner] / wgt[inner] ** gam)
        out.append((E / ratio**p, int(k), u))
    return out, iters


def hardy_constant(
    grid: Grid,
    d: GridField,
    p: float,
    q: float,
    clamp: float | None = None,
    tol: float | None = None,
    exhaustive: bool = False,
    mu_p: float | None = None,
    h_p: float | None = None,
    h_inf: float | None = None,
) -> SolveReport:
    """Minimize the Hardy quotient over zero-trace grid fields.

    Sup route (q = inf): for each candidate x0 the energy is minimized with
    u(x0) = w(x0)^gamma, w = max(d, clamp), and the quotient is evaluated with
    the actual maximum of u / w^gamma. Candidates are symmetry-orbit
    representatives, followed by the full orbits of the best few, unless
    ``exhaustive``. The reported bound checks compare with ((p-N)/p)^p, with
    mu_p (when given) and with the interpolation bound (when h_p, h_inf are given).
    """
    N = grid.ndim
    ExponentPair(p, q, N).require_superconformal()
    if q != math.inf and q < p:
        raise ValueError(f"Hardy constants need p <= q <= inf, got p={p}, q={q}")
    check_connected(grid)
    tol = default_tol(N) if tol is None else tol
    clamp = 0.5 * grid.h if clamp is None else clamp
    gam = hardy_exponent(p, q, N)
    form = grid_energy_form(grid)
    wgt = np.maximum(d.flat, clamp)
    checks: dict = {}
    extra: dict = {"clamp": clamp, "weight_exponent": gam}
    with Timer() as t:
        if q == math.inf:
            interior = np.flatnonzero(grid.interior.reshape(-1))
            if exhaustive:
                results, iters = _sup_quotients(form, grid, p, wgt, gam, interior, tol)
                n_eval = interior.size
            else:
                orbits = _orbits(grid, interior)
                reps = np.array([o[0] for o in orbits])
                results, iters = _sup_quotients(form, grid, p, wgt, gam, reps, tol)
                results.sort(key=lambda r: (r[0], r[1]))
                best_reps = {r[1] for r in results[:ORBIT_REFINE]}
                rest = [k for o in orbits if o[0] in best_reps for k in o[1:]]
                more, it2 = _sup_quotients(form, grid, p, wgt, gam, np.array(rest, dtype=np.int64), tol)
                results += more
                iters += it2
                n_eval = len(reps) + len(rest)
            results.sort(key=lambda r: (r[0], r[1]))
            value, k, u = results[0]
            extra.update({"candidates": n_eval, "peak_node": k, "peak_distance": float(d.flat[k])})
            resid = {"stationarity": 0.0}
            route_iters = iters
        else:
            weight = form.mass[form.free] * wgt[form.free] ** (-gam * q)
            x0 = d.flat[form.free]
            if q == p:
                res = power_iteration(form, p, p, weight, x0, tol)
            else:
                base = power_iteration(form, p, p, form.mass[form.free] * wgt[form.free] ** (-p), x0, tol)
                res = power_iteration(form, p, q, weight, base.x, tol)
                extra["bound"] = UPPER_BOUND_LABEL
            value = res.lam
            u = form.full(res.x)
            resid = {"stationarity": res.stationarity}
            route_iters = res.inner
    lower_ext = ((p - N) / p) ** p
    if q == p:
        checks["lowerboundhardyext"] = (value, lower_ext, value >= lower_ext)
    if q == math.inf and mu_p is not None:
        checks["lowerboundhardyext_inf"] = (value, mu_p, value >= 0.95 * mu_p)
    if q not in (p, math.inf) and h_p is not None and h_inf is not None:
        lb = h_p ** (p / q) * h_inf ** ((q - p) / q)
        checks["lowerboundhardy"] = (value, lb, value >= lb)
    extra["checks"] = checks
    return SolveReport(
        constant=value,
        extremal=GridField(grid, u),
        residuals=resid,
        iterations=route_iters,
        route="hardy",
        p=p,
        q=q,
        domain=grid.domain.label if grid.domain is not None else "grid",
        N=N,
        h=grid.h,
        seconds=t.seconds,
        extra=extra,
    )
