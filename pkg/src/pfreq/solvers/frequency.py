"""Principal frequencies on grids: Lane-Emden, inverse iteration and point-constrained routes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..calculus import EnergyForm, ExponentPair, grid_energy_form, holder_seminorm
from ..geometry import INTERIOR, Grid, GridField, distance_field, inradius
from ._core import ConvergenceError, DomainConnectivityError, SolveReport, Timer, minimize

IDENTITY_TOL = 1e-5
UPPER_BOUND_LABEL = "upper bound only"


_TOL_SCALE = 1.0


def set_tolerance_scale(scale: float) -> float:
    """Multiply every default solver tolerance by ``scale``; returns the previous scale."""
    global _TOL_SCALE
    if not scale > 0:
        raise ValueError(f"tolerance scale must be positive, got {scale}")
    old, _TOL_SCALE = _TOL_SCALE, float(scale)
    return old


def default_tol(ndim: int) -> float:
    return (1e-8 if ndim == 1 else 1e-6) * _TOL_SCALE


def _label(grid: Grid) -> str:
    return grid.domain.label if grid.domain is not None else "grid"


def check_connected(grid: Grid) -> None:
    labels, n = ndimage.label(grid.interior)
    if n == 0:
        raise DomainConnectivityError("grid has no interior nodes")
    if n > 1:
        raise DomainConnectivityError(f"interior nodes form {n} disconnected components")


# ---------------------------------------------------------------------------
# Lane-Emden (q < p) on an arbitrary energy form
# ---------------------------------------------------------------------------


@dataclass
class LaneEmdenResult:
    w: np.ndarray
    lam: float
    log_lam: float
    residuals: dict
    iterations: int


def lane_emden_form(
    form: EnergyForm, p: float, q: float, x0: np.ndarray, tol: float, max_iter: int = 100_000
) -> LaneEmdenResult:
    """Minimize E/p - (1/q) int |w|^q from x0 rescaled by its optimal factor."""
    m = form.mass[form.free]
    u0 = form.full(x0)
    e0, i0 = form.energy(u0, p), form.integral(u0, q)
    if e0 <= 0 or i0 <= 0:
        raise ValueError("initial guess must have positive energy and L^q norm")
    t0 = (i0 / e0) ** (1.0 / (p - q))
    res = minimize(form, p, t0 * x0, q_power=q, q_weight=m, lower=0.0, tol=tol, max_iter=max_iter)
    w = form.full(res.x)
    E = form.energy(w, p)
    Iq = form.integral(w, q)
    lam = Iq ** (-(p - q) / q)
    rayleigh = E / Iq ** (p / q)
    F = E / p - Iq / q
    F_pred = (q - p) / (p * q) * rayleigh ** (-q / (p - q))
    residuals = {
        "stationarity": res.stationarity,
        "pqnorm": abs(E - Iq) / Iq,
        "pqnorm_lambda": abs(lam - rayleigh) / rayleigh,
        "minprob": abs(F - F_pred) / abs(F),
    }
    return LaneEmdenResult(w, lam, -(p - q) / q * math.log(Iq), residuals, res.iterations)


def _check_identities(residuals: dict, tol: float = IDENTITY_TOL) -> None:
    worst = max(residuals["pqnorm"], residuals["pqnorm_lambda"], residuals["minprob"])
    if worst >= tol:
        raise ConvergenceError(
            f"Lane-Emden identities not met: worst relative residual {worst:.2e} >= {tol:.0e}", residuals
        )


def solve_lane_emden(
    grid: Grid, p: float, q: float, tol: float | None = None, max_iter: int = 100_000
) -> SolveReport:
    """Positive minimizer w of (1/p) int |grad w|^p - (1/q) int |w|^q, q < p."""
    ExponentPair(p, q, grid.ndim).require_sub()
    check_connected(grid)
    tol = default_tol(grid.ndim) if tol is None else tol
    with Timer() as t:
        form = grid_energy_form(grid)
        d = distance_field(grid.domain, grid)
        le = lane_emden_form(form, p, q, d.flat[form.free], tol, max_iter)
        _check_identities(le.residuals)
    return SolveReport(
        constant=le.lam,
        extremal=GridField(grid, le.w),
        residuals=le.residuals,
        iterations=le.iterations,
        route="lane_emden",
        p=p,
        q=q,
        domain=_label(grid),
        N=grid.ndim,
        h=grid.h,
        constant_pow_1_over_p=math.exp(le.log_lam / p),
        seconds=t.seconds,
    )


# ---------------------------------------------------------------------------
# inverse power iteration (q >= p), optionally with a weight in the norm
# ---------------------------------------------------------------------------


@dataclass
class PowerResult:
    x: np.ndarray
    lam: float
    log_lam: float
    outer: int
    inner: int
    stationarity: float
    monotone: bool


def power_iteration(
    form: EnergyForm,
    p: float,
    q: float,
    weight: np.ndarray,
    x0: np.ndarray,
    tol: float,
    max_outer: int = 100_000,
) -> PowerResult:
    """Minimize E(u) / (sum weight |u|^q)^(p/q) over the free nodes.

    Each step solves the convex problem min E(v)/p - sum weight u_k^(q-1) v
    and renormalizes. For q = p this is inverse power iteration; for q > p the
    same fixed-point map is used with a damping fallback whenever the quotient
    would increase.
    """

    def normalize(x):
        return x / np.sum(weight * np.abs(x) ** q) ** (1.0 / q)

    x = normalize(np.abs(np.asarray(x0, dtype=float)))
    lam = form.energy(form.full(x), p)
    inner_total = 0
    monotone = True
    stat = math.inf
    for k in range(1, max_outer + 1):
        rhs = weight * x ** (q - 1.0)
        y0 = x * lam ** (-1.0 / (p - 1.0))
        res = minimize(form, p, y0, linear=rhs, lower=0.0, tol=tol)
        inner_total += res.iterations
        xn = normalize(res.x)
        lam_n = form.energy(form.full(xn), p)
        if lam_n > lam * (1 + 1e-12):
            monotone = False
            tau = 0.5
            while tau > 1e-6:
                xt = normalize((1 - tau) * x + tau * xn)
                lt = form.energy(form.full(xt), p)
                if lt <= lam:
                    xn, lam_n = xt, lt
                    break
                tau *= 0.5
            else:
                break
        change = abs(lam_n - lam) / lam_n
        x, lam = xn, lam_n
        stat = res.stationarity
        if change <= tol:
            break
    else:
        raise ConvergenceError(
            f"inverse iteration did not stabilize within {max_outer} outer steps",
            {"relative_change": change},
        )
    u = form.full(x)
    log_lam = form.log_energy(u, p)
    return PowerResult(x, lam, log_lam, k, inner_total, max(stat, change), monotone)


def _rayleigh_residual(form: EnergyForm, p: float, q: float, weight: np.ndarray, x: np.ndarray, lam: float):
    """Relative residual of the eigen-equation grad E / p = lam (w x^(q-1)) (for ||x||_q = 1)."""
    gall = form.grad(form.full(x), p) / p
    g = gall[form.free]
    r = g - lam * weight * np.abs(x) ** (q - 1.0)
    return float(np.linalg.norm(r) / np.linalg.norm(gall))


# ---------------------------------------------------------------------------
# point-constrained sup route (q = inf)
# ---------------------------------------------------------------------------


def peak_candidates(d: GridField) -> np.ndarray:
    """Interior nodes that are local maxima of d (3^N neighbourhood) plus the global argmax."""
    grid = d.grid
    vals = np.where(grid.interior, d.values, -np.inf)
    local = ndimage.maximum_filter(vals, size=3, mode="constant", cval=-np.inf)
    mask = grid.interior & (vals >= local)
    idx = set(np.flatnonzero(mask.reshape(-1)).tolist())
    idx.add(int(np.argmax(vals.reshape(-1))))
    return np.array(sorted(idx), dtype=np.int64)


def point_constrained_min(
    form: EnergyForm,
    p: float,
    node: int,
    value: float,
    x0_full: np.ndarray,
    tol: float,
    upper: float | None = None,
) -> tuple[np.ndarray, float, int, float]:
    free = form.free.copy()
    free[node] = False
    fixed = np.zeros(form.n_nodes)
    fixed[node] = value
    f2 = form.with_fixed(free, fixed)
    res = minimize(f2, p, x0_full[free], lower=0.0, upper=upper, tol=tol)
    u = f2.full(res.x)
    return u, f2.energy(u, p), res.iterations, res.stationarity


def _sup_route(grid: Grid, p: float, tol: float, exhaustive: bool):
    form = grid_energy_form(grid)
    d = distance_field(grid.domain, grid)
    cands = np.flatnonzero(grid.interior.reshape(-1)) if exhaustive else peak_candidates(d)
    X = grid.coords()
    results = []
    iters = 0
    stat = 0.0
    for k in cands:
        dk = max(d.flat[k], grid.h)
        guess = np.clip(1.0 - np.linalg.norm(X - X[k], axis=1) / (2 * dk), 0.0, 1.0)
        guess = np.maximum(guess, d.flat / max(d.flat.max(), 1e-300))
        u, E, it, st = point_constrained_min(form, p, int(k), 1.0, guess, tol, upper=1.0)
        iters += it
        stat = max(stat, st)
        results.append((E, int(k), u))
    results.sort(key=lambda r: (r[0], r[1]))
    best_E, best_k, best_u = results[0]
    near = [r for r in results if r[0] <= best_E * (1 + 10 * tol)]
    peaks = sorted(k for _, k, _ in near)
    best_k = peaks[0]
    best_E, _, best_u = next(r for r in results if r[1] == best_k)
    return best_u, best_E, iters, stat, len(cands), peaks


def principal_frequency(
    grid: Grid,
    p: float,
    q: float,
    tol: float | None = None,
    exhaustive: bool = False,
    max_iter: int = 100_000,
) -> SolveReport:
    """lambda_{p,q} on a grid by the route matching the exponent regime."""
    pair = ExponentPair(p, q, grid.ndim)
    tol = default_tol(grid.ndim) if tol is None else tol
    regime = pair.regime
    if regime == "sub":
        rep = solve_lane_emden(grid, p, q, tol, max_iter)
        w = rep.extremal.flat
        rep.extra["lane_emden_solution"] = rep.extremal
        rep.extremal = GridField(grid, rep.constant ** (1.0 / (p - q)) * w)
        return rep
    if regime == "sup" and not pair.superconformal:
        raise ValueError(f"lambda_(p,inf) needs p > N, got p={p}, N={grid.ndim}")
    check_connected(grid)
    with Timer() as t:
        if regime == "sup":
            u, E, iters, stat, ncand, peaks = _sup_route(grid, p, tol, exhaustive)
            form = grid_energy_form(grid)
            log_lam = form.log_energy(u, p)
            report = SolveReport(
                constant=E,
                extremal=GridField(grid, u),
                residuals={"stationarity": stat, "constraint": abs(u.max() - 1.0)},
                iterations=iters,
                route="point_sup",
                p=p,
                q=q,
                domain=_label(grid),
                N=grid.ndim,
                h=grid.h,
                constant_pow_1_over_p=math.exp(log_lam / p),
                extra={
                    "candidates": ncand,
                    "multiplicity": len(peaks),
                    "peak_nodes": peaks,
                    "peak_point": tuple(float(c) for c in grid.coords()[peaks[0]]),
                },
            )
        else:
            form = grid_energy_form(grid)
            d = distance_field(grid.domain, grid)
            m = form.mass[form.free]
            if regime == "super":
                base = power_iteration(form, p, p, m, d.flat[form.free], tol, max_iter)
                if not base.lam > 0:
                    raise ValueError("lambda_p is not certified positive; the q > p route is inadmissible")
                res = power_iteration(form, p, q, m, base.x, tol, max_iter)
            else:
                res = power_iteration(form, p, q, m, d.flat[form.free], tol, max_iter)
            u = form.full(res.x)
            report = SolveReport(
                constant=res.lam,
                extremal=GridField(grid, u),
                residuals={
                    "stationarity": res.stationarity,
                    "eigen_equation": _rayleigh_residual(form, p, q, m, res.x, res.lam),
                    "constraint": abs(form.lq(u, q) - 1.0),
                },
                iterations=res.inner,
                route="inverse_iteration",
                p=p,
                q=q,
                domain=_label(grid),
                N=grid.ndim,
                h=grid.h,
                constant_pow_1_over_p=math.exp(res.log_lam / p),
                extra={"outer_iterations": res.outer, "monotone": res.monotone},
            )
            if regime == "super":
                report.extra["bound"] = UPPER_BOUND_LABEL
    report.seconds = t.seconds
    return report


def eigen_asymptotics_extremal(grid: Grid, p: float, tol: float | None = None) -> SolveReport:
    """First p-eigenfunction with the diagnostics of the p -> inf limit problem."""
    ExponentPair(p, p, grid.ndim).require_superconformal()
    rep = principal_frequency(grid, p, p, tol)
    u = rep.extremal
    d = distance_field(grid.domain, grid)
    r = inradius(d).value
    sup = float(u.values.max())
    v = u * (1.0 / sup)
    lip = holder_seminorm(v, 1.0, d)
    peak = int(np.argmax(u.flat))
    rep.extra.update(
        {
            "sup_norm": sup,
            "lipschitz": lip.value,
            "lipschitz_exact": lip.exact,
            "sup_gap_to_d_over_r": float(np.max(np.abs(v.flat - d.flat / r))),
            "inradius": r,
            "peak_point": tuple(float(c) for c in grid.coords()[peak]),
        }
    )
    return rep
