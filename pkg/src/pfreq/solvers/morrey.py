"""Morrey constant of the unit ball: min energy with u(0) = 1 and u(z) = 0 at a boundary point."""

from __future__ import annotations

import math

import numpy as np

from ..calculus import EnergyForm, ExponentPair, _grid_cells
from ..geometry import make_domain, omega, rasterize
from ._core import SolveReport, Timer, minimize
from .frequency import default_tol


class MorreyBoundError(AssertionError):
    pass


def _closed_ball_form(N: int, h: float):
    """Energy form on the nodes of the closed unit ball, cells fully inside, no trace constraint."""
    if N == 1:
        n = int(round(1.0 / h))
        x = np.linspace(-1.0, 1.0, 2 * n + 1)
        form = EnergyForm(
            base=np.arange(2 * n, dtype=np.int64),
            nbr=np.arange(1, 2 * n + 1, dtype=np.int64)[None, :],
            inv_len=np.full((1, 2 * n), 1.0 / h),
            cell_w=np.full(2 * n, h),
            mass=np.full(2 * n + 1, h),
            free=np.ones(2 * n + 1, bool),
            fixed_values=np.zeros(2 * n + 1),
            coords=x[:, None],
        )
        return form, n, 2 * n
    grid = rasterize(make_domain("ball", N=N, R=1.0), h)
    X = grid.coords()
    inside = np.linalg.norm(X, axis=1) <= 1.0 + 1e-12
    base, nbr = _grid_cells(grid, inside)
    keep = inside[base] & inside[nbr].all(axis=0)
    base, nbr = base[keep], nbr[:, keep]
    touched = np.zeros(grid.n_nodes, bool)
    touched[base] = True
    touched[nbr.ravel()] = True
    C = base.shape[0]
    form = EnergyForm(
        base=base,
        nbr=nbr,
        inv_len=np.full((N, C), 1.0 / h),
        cell_w=np.full(C, h**N),
        mass=np.full(grid.n_nodes, h**N),
        free=touched,
        fixed_values=np.zeros(grid.n_nodes),
        grid=grid,
        coords=X,
    )
    centre = int(np.ravel_multi_index(grid.nearest_index(np.zeros(N)), grid.shape))
    z = np.zeros(N)
    z[0] = 1.0
    zi = int(np.ravel_multi_index(grid.nearest_index(z), grid.shape))
    return form, centre, zi


def morrey_mu(p: float, N: int = 2, h: float = 1.0 / 32, tol: float | None = None) -> SolveReport:
    """mu_p(B_1) with z = e_1; also checks the trial bound mu_p <= omega_N."""
    tol = default_tol(2) if tol is None else tol
    ExponentPair(p, p, N).require_superconformal()
    with Timer() as t:
        form, centre, zi = _closed_ball_form(N, h)
        free = form.free.copy()
        free[[centre, zi]] = False
        fixed = np.zeros(form.n_nodes)
        fixed[centre] = 1.0
        f2 = form.with_fixed(free, fixed)
        X = form.coords
        trial = np.clip(1.0 - np.linalg.norm(X, axis=1), 0.0, 1.0)
        trial[centre] = 1.0
        trial[zi] = 0.0
        res = minimize(f2, p, trial[free], lower=0.0, upper=1.0, tol=tol)
        u = f2.full(res.x)
        mu = f2.energy(u, p)
        trial_energy = f2.energy(trial, p)
    om = omega(N)
    if mu > om * (1 + 1e-9):
        raise MorreyBoundError(f"mu_p = {mu:.6g} exceeds omega_N = {om:.6g}")
    return SolveReport(
        constant=mu,
        extremal=u,
        residuals={"stationarity": res.stationarity, "constraint": abs(u[centre] - 1.0) + abs(u[zi])},
        iterations=res.iterations,
        route="point_constrained",
        p=p,
        q=math.inf,
        domain=f"ball(N={N},R=1)",
        N=N,
        h=h,
        seconds=t.seconds,
        extra={
            "omega_N": om,
            "trial_energy": trial_energy,
            "ratio_pow_1_over_p": (mu / om) ** (1.0 / p),
        },
    )


def morrey_sharp_bound(p: float, N: int) -> float:
    """Explicit upper bound N omega_N ((p - N)/(p - 1))^(p - 1) for the sharp Morrey constant."""
    return N * omega(N) * ((p - N) / (p - 1.0)) ** (p - 1.0)
