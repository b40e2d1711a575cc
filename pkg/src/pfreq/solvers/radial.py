"""Radial reduction on balls and the one-dimensional constant pi_{p,q}."""

from __future__ import annotations

import math

import numpy as np

from ..calculus import EnergyForm, ExponentPair
from ..geometry import omega
from ._core import SolveReport, Timer
from .frequency import (
    IDENTITY_TOL,
    UPPER_BOUND_LABEL,
    _check_identities,
    default_tol,
    lane_emden_form,
    point_constrained_min,
    power_iteration,
)

MIN_RADIAL_NODES = 64
RADIAL_GRADING = 2.0


class A4Violation(AssertionError):
    pass


def radial_form(N: int, R: float, nodes: int, grading: float = RADIAL_GRADING) -> EnergyForm:
    """P1 elements on 0 = r_0 < ... < r_n = R with exact weight N omega_N r^(N-1).

    Nodes are graded as r_i = R (i/n)^grading (finer at the centre, where the
    sup-norm extremals have a gradient singularity). u(R) = 0 is the only
    constraint; the centre value is free. Masses are lumped.
    """
    if N == 1:
        grading = 1.0
    n = int(nodes)
    r = R * (np.arange(n + 1) / n) ** grading
    cell = omega(N) * (r[1:] ** N - r[:-1] ** N)
    mass = np.zeros(n + 1)
    mass[:-1] += 0.5 * cell
    mass[1:] += 0.5 * cell
    free = np.ones(n + 1, bool)
    free[-1] = False
    return EnergyForm(
        base=np.arange(n, dtype=np.int64),
        nbr=np.arange(1, n + 1, dtype=np.int64)[None, :],
        inv_len=(1.0 / np.diff(r))[None, :],
        cell_w=cell,
        mass=mass,
        free=free,
        fixed_values=np.zeros(n + 1),
        coords=r,
    )


def interval_form(nodes: int, a: float = 0.0, b: float = 1.0) -> EnergyForm:
    """Uniform zero-trace P1 form on (a, b) with ``nodes`` cells."""
    n = int(nodes)
    x = np.linspace(a, b, n + 1)
    h = (b - a) / n
    free = np.ones(n + 1, bool)
    free[[0, -1]] = False
    mass = np.full(n + 1, h)
    mass[[0, -1]] = 0.5 * h
    return EnergyForm(
        base=np.arange(n, dtype=np.int64),
        nbr=np.arange(1, n + 1, dtype=np.int64)[None, :],
        inv_len=np.full((1, n), 1.0 / h),
        cell_w=np.full(n, h),
        mass=mass,
        free=free,
        fixed_values=np.zeros(n + 1),
        coords=x,
    )


def _solve_form(form: EnergyForm, p: float, q: float, guess: np.ndarray, tol: float, peak_node: int):
    """Shared dispatch for 1-D forms. Returns (lam, log_lam, profile, residuals, iterations, extra)."""
    pair_regime = ExponentPair(p, q, 1).regime if q != math.inf else "sup"
    extra: dict = {}
    if q != math.inf and q < p:
        le = lane_emden_form(form, p, q, guess[form.free], tol)
        _check_identities(le.residuals)
        extra["w_center"] = float(le.w[peak_node])
        extra["lane_emden_solution"] = le.w
        u = le.lam ** (1.0 / (p - q)) * le.w
        return le.lam, le.log_lam, u, le.residuals, le.iterations, extra
    if q == math.inf:
        u, E, it, st = point_constrained_min(form, p, peak_node, 1.0, guess, tol, upper=1.0)
        return E, form.log_energy(u, p), u, {"stationarity": st}, it, extra
    m = form.mass[form.free]
    x0 = guess[form.free]
    if pair_regime == "super":
        base = power_iteration(form, p, p, m, x0, tol)
        x0 = base.x
        extra["bound"] = UPPER_BOUND_LABEL
    res = power_iteration(form, p, q, m, x0, tol)
    extra["outer_iterations"] = res.outer
    u = form.full(res.x)
    return res.lam, res.log_lam, u, {"stationarity": res.stationarity}, res.inner, extra


def radial_ball_frequency(
    p: float,
    q: float,
    N: int = 2,
    R: float = 1.0,
    nodes: int = 512,
    tol: float | None = None,
    grading: float = RADIAL_GRADING,
) -> SolveReport:
    """lambda_{p,q}(B_R) over radial profiles; extra['w_center'] holds w_{p,q}(0) for q < p."""
    if nodes < MIN_RADIAL_NODES:
        raise ValueError(f"radial solves need at least {MIN_RADIAL_NODES} nodes, got {nodes}")
    pair = ExponentPair(p, q, N)
    if q == math.inf and not pair.superconformal:
        raise ValueError(f"lambda_(p,inf) needs p > N, got p={p}, N={N}")
    tol = default_tol(1) if tol is None else tol
    with Timer() as t:
        form = radial_form(N, R, nodes, grading)
        guess = 1.0 - form.coords / R
        lam, log_lam, u, resid, it, extra = _solve_form(form, p, q, guess, tol, 0)
    route = "radial"
    rep = SolveReport(
        constant=lam,
        extremal=np.column_stack([form.coords, u]),
        residuals=resid,
        iterations=it,
        route=route,
        p=p,
        q=q,
        domain=f"ball(N={N},R={R:g})",
        N=N,
        nodes=nodes,
        constant_pow_1_over_p=math.exp(log_lam / p),
        seconds=t.seconds,
        extra=extra,
    )
    return rep


def a4_lower_bound(p: float, q: float) -> float:
    if q == math.inf:
        return 2.0 ** (1.0 - 1.0 / p)
    return 2.0 ** (1.0 - 1.0 / p) * (q * (1.0 - 1.0 / p) + 1.0) ** (1.0 / q)


def pi_pq(p: float, q: float, nodes: int = 1024, tol: float | None = None, check: bool = True) -> SolveReport:
    """pi_{p,q} = lambda_{p,q}((0,1))^(1/p), checked against its explicit lower bound."""
    ExponentPair(p, q, 1)
    tol = default_tol(1) if tol is None else tol
    with Timer() as t:
        form = interval_form(nodes)
        x = form.coords
        guess = np.minimum(x, 1.0 - x)
        lam, log_lam, u, resid, it, extra = _solve_form(form, p, q, guess, tol, nodes // 2)
    value = math.exp(log_lam / p)
    bound = a4_lower_bound(p, q)
    extra.update({"a4_bound": bound, "a4_slack": value - bound})
    if check and not value > bound:
        raise A4Violation(f"pi_(p,q) = {value:.10g} does not exceed its lower bound {bound:.10g} (p={p}, q={q})")
    return SolveReport(
        constant=value,
        extremal=np.column_stack([x, u]),
        residuals=resid,
        iterations=it,
        route="one_d",
        p=p,
        q=q,
        domain="interval(0,1)",
        N=1,
        nodes=nodes,
        constant_pow_1_over_p=value ** (1.0 / p),
        seconds=t.seconds,
        extra=extra,
    )
