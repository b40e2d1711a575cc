"""Projected Newton minimizer shared by all variational routes."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from ..calculus import EnergyForm

DEFAULT_MAX_ITER = 100_000


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class DomainConnectivityError(ValueError):
    pass


@dataclass
class SolveReport:
    constant: float
    extremal: Any
    residuals: dict
    iterations: int
    route: str
    p: float
    q: float
    domain: str = ""
    N: int = 1
    h: float | None = None
    nodes: int | None = None
    constant_pow_1_over_p: float | None = None
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.constant_pow_1_over_p is None and self.constant > 0:
            self.constant_pow_1_over_p = self.constant ** (1.0 / self.p)

    def record(self) -> dict:
        out = {
            "domain": self.domain,
            "N": self.N,
            "h": self.h,
            "nodes": self.nodes,
            "p": self.p,
            "q": self.q,
            "route": self.route,
            "constant": self.constant,
            "constant_pow_1_over_p": self.constant_pow_1_over_p,
            "residuals": dict(self.residuals),
            "iterations": self.iterations,
            "wall_time": self.seconds,
        }
        for k, v in self.extra.items():
            if isinstance(v, (int, float, str, bool)) or v is None:
                out[k] = v
            elif isinstance(v, (list, tuple)) and all(isinstance(t, (int, float, str)) for t in v):
                out[k] = list(v)
        return out


@dataclass
class MinResult:
    x: np.ndarray
    value: float
    iterations: int
    stationarity: float
    converged: bool


def hessian_floor(gmax: float, p: float) -> float:
    if gmax <= 0:
        return 1e-300
    if p > 2:
        return gmax * 1e-10 ** (1.0 / (p - 2.0))
    return 1e-9 * gmax


def stationarity_floor(p: float) -> float:
    """Attainable relative stationarity once J stops decreasing in floating point.

    For p < 2 the gradient is only (p-1)-Holder near vanishing cell gradients,
    so a rounding error e in the node values leaves a residual of order e^(p-1).
    """
    if p >= 2:
        return 0.0
    return 1e3 * np.finfo(float).eps ** (p - 1.0)


def minimize(
    form: EnergyForm,
    p: float,
    x0: np.ndarray,
    linear: np.ndarray | None = None,
    q_power: float | None = None,
    q_weight: np.ndarray | None = None,
    lower: float | None = None,
    upper: float | None = None,
    tol: float = 1e-8,
    max_iter: int = DEFAULT_MAX_ITER,
    raise_on_fail: bool = True,
) -> MinResult:
    """Minimize J(x) = E(u)/p - <linear, x> - (1/q) sum q_weight |x|^q over the free nodes.

    The q term is only meant for nonnegative iterates (Lane-Emden with a
    lower bound of 0). Steps are Newton directions of J with the p-energy
    Hessian regularized at small gradients, projected onto the box
    [lower, upper] with an Armijo backtracking search along the projection arc.
    """
    x = np.array(x0, dtype=float)
    if lower is not None or upper is not None:
        x = np.clip(x, lower, upper)
    b = np.zeros_like(x) if linear is None else np.asarray(linear, dtype=float)
    qw = None
    if q_power is not None:
        qw = np.asarray(q_weight, dtype=float)

    def objective(xv: np.ndarray) -> float:
        val = form.energy(form.full(xv), p) / p - float(np.dot(b, xv))
        if qw is not None:
            val -= float(np.sum(qw * np.abs(xv) ** q_power)) / q_power
        return val

    def gradient(xv: np.ndarray):
        gall = form.grad(form.full(xv), p) / p
        ge = gall[form.free]
        other = b.copy()
        if qw is not None:
            other = other + qw * np.abs(xv) ** (q_power - 1.0)
        # the full-node gradient keeps the scale meaningful when fixed nodes carry the load
        return ge - other, gall, other

    J = objective(x)
    stat = math.inf
    it = 0
    stall = 0
    flat = 0
    for it in range(1, max_iter + 1):
        g, ge, other = gradient(x)
        active = np.zeros(x.shape, bool)
        if lower is not None:
            active |= (x <= lower) & (g > 0)
        if upper is not None:
            active |= (x >= upper) & (g < 0)
        pg = np.where(active, 0.0, g)
        scale = np.linalg.norm(ge) + np.linalg.norm(other)
        stat = float(np.linalg.norm(pg) / scale) if scale > 0 else 0.0
        if stat <= tol:
            return MinResult(x, J, it - 1, stat, True)
        u = form.full(x)
        H = form.hessian(u, p, hessian_floor(form.max_grad_norm(u), p)) / p
        dg = H.diagonal()
        H = H + diags(np.full(dg.shape, 1e-13 * float(dg.max(initial=0.0)) + 1e-300))
        free_idx = np.flatnonzero(~active)
        dx = np.zeros_like(x)
        dx_sub = None
        if qw is not None and q_power > 1.0:
            curv = (q_power - 1.0) * qw * np.maximum(x, 1e-300) ** (q_power - 2.0)
            Hf = (H - diags(curv))[free_idx][:, free_idx].tocsc()
            try:
                dx_sub = splu(Hf).solve(-g[free_idx])
                if not np.all(np.isfinite(dx_sub)) or np.dot(dx_sub, g[free_idx]) >= 0:
                    dx_sub = None
            except RuntimeError:
                dx_sub = None
        if dx_sub is None:
            Hf = H[free_idx][:, free_idx].tocsc()
            dx_sub = splu(Hf).solve(-g[free_idx])
        dx[free_idx] = dx_sub
        t = 1.0
        accepted = False
        for _ in range(60):
            xn = x + t * dx
            if lower is not None or upper is not None:
                xn = np.clip(xn, lower, upper)
            Jn = objective(xn)
            if Jn <= J + 1e-4 * float(np.dot(g, xn - x)):
                accepted = True
                break
            t *= 0.5
        if not accepted or not np.any(xn != x):
            stall += 1
            if stat <= math.sqrt(tol) or stall > 2:
                break
            continue
        stall = 0
        flat = flat + 1 if Jn >= J else 0
        if flat > 20:
            # J no longer decreases in floating point
            x, J = xn, Jn
            stall = 1
            break
        rel_change = abs(J - Jn) / max(abs(J), abs(Jn), 1e-300)
        x, J = xn, Jn
        if rel_change < 1e-16 and t == 1.0:
            g, ge, other = gradient(x)
            scale = np.linalg.norm(ge) + np.linalg.norm(other)
            stat = float(np.linalg.norm(g) / scale) if scale > 0 else 0.0
            if stat <= max(tol, 1e-12):
                return MinResult(x, J, it, stat, True)
    converged = stat <= tol or (stall > 0 and stat <= stationarity_floor(p))
    if not converged and raise_on_fail:
        raise ConvergenceError(
            f"descent stopped after {it} iterations with relative stationarity {stat:.3e} > {tol:.1e}",
            {"stationarity": stat, "objective": J},
        )
    return MinResult(x, J, it, stat, converged)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0
        return False
