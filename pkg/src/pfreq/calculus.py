"""Discrete energies, norms and seminorms over grid fields.

The p-Dirichlet energy uses one forward-difference gradient per lattice cell:
for the cell based at node i the gradient has components
(u(i + e_k) - u(i)) / h. Every lattice edge belongs to exactly one cell, so at
p = 2 this is the five-point (2N+1-point) Laplacian energy. An edge joining an
interior node to an exterior node is cut by the boundary; its difference is
taken over the distance to the crossing point instead of h (the symmetric
ghost-value treatment of Dirichlet data), which leaves grids whose boundary
passes through nodes unchanged. Quadrature of L^q integrals is the dual-cell
midpoint rule (one weight h^N per node).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import _accel
from .geometry import EXTERIOR, INTERIOR, Grid, GridField, distance_field, omega

HOLDER_PAIR_BUDGET = 2_000_000
CUT_FRACTION_FLOOR = 0.05


class ZeroTraceError(ValueError):
    """A field is nonzero on a boundary, exterior or pinned node."""


@dataclass(frozen=True)
class ExponentPair:
    p: float
    q: float
    N: int

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got p={self.p}")
        if not (self.q >= 1 or self.q == math.inf):
            raise ValueError(f"q must be >= 1 or inf, got q={self.q}")
        if self.N < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def regime(self) -> str:
        if self.q == math.inf:
            return "sup"
        if self.q < self.p:
            return "sub"
        if self.q == self.p:
            return "homogeneous"
        return "super"

    @property
    def superconformal(self) -> bool:
        return self.p > self.N

    @property
    def alpha_p(self) -> float:
        if not self.superconformal:
            raise ValueError(f"alpha_p = 1 - N/p is defined only for p > N (p={self.p}, N={self.N})")
        return 1.0 - self.N / self.p

    def require_sub(self) -> None:
        if self.regime != "sub":
            raise ValueError(f"Lane-Emden problems need q < p, got p={self.p}, q={self.q}")

    def require_superconformal(self) -> None:
        if not self.superconformal:
            raise ValueError(f"this problem needs p > N, got p={self.p}, N={self.N}")


@dataclass(frozen=True)
class HolderInterp:
    """Exponents and explicit constants of the Hölder interpolation estimate."""

    alpha: float
    beta: float
    gamma: float
    N: int

    def __post_init__(self):
        if not 0 < self.beta < self.alpha <= 1:
            raise ValueError(f"need 0 < beta < alpha <= 1, got alpha={self.alpha}, beta={self.beta}")
        if not (self.gamma >= 1 or self.gamma == math.inf):
            raise ValueError("gamma must be >= 1 or inf")

    @property
    def _n_over_gamma(self) -> float:
        return 0.0 if self.gamma == math.inf else self.N / self.gamma

    @property
    def theta(self) -> float:
        return (self.alpha - self.beta) / (self.alpha + self._n_over_gamma)

    @property
    def chi(self) -> float:
        return self.alpha / (self.alpha + self._n_over_gamma)

    @property
    def C1(self) -> float:
        if self.gamma == math.inf:
            return 2.0
        a, b, g, N = self.alpha, self.beta, self.gamma, self.N
        return (
            2.0
            * omega(N) ** (-(a - b) / (g * a + N))
            * (a * g / N) ** (N / (a * g + N))
            / self.chi
        )

    @property
    def C2(self) -> float:
        if self.gamma == math.inf:
            raise ValueError("the sup-norm estimate needs a finite gamma")
        a, g, N = self.alpha, self.gamma, self.N
        return omega(N) ** (-self.chi / g) * (a * g / N) ** (N / (a * g + N)) / self.chi


# ---------------------------------------------------------------------------
# energy form
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class EnergyForm:
    """Cellwise p-energy on a node vector with some nodes held fixed.

    ``base`` and ``nbr`` list, per cell, the base node and its N axis
    neighbours; ``inv_len[k, c]`` is the reciprocal length of edge k and ``cell_w`` the
    cell measure (or weighted measure for radial meshes). ``mass`` holds the
    quadrature weight per node. ``free`` marks the unknowns; other nodes keep
    their value from ``fixed_values``.
    """

    base: np.ndarray
    nbr: np.ndarray
    inv_len: np.ndarray
    cell_w: np.ndarray
    mass: np.ndarray
    free: np.ndarray
    fixed_values: np.ndarray
    grid: Grid | None = None
    coords: np.ndarray | None = None
    _fmap: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.mass.shape[0]

    @property
    def fmap(self) -> np.ndarray:
        if self._fmap is None:
            fm = np.full(self.n_nodes, -1, dtype=np.int64)
            idx = np.flatnonzero(self.free)
            fm[idx] = np.arange(idx.size)
            self._fmap = fm
        return self._fmap

    @property
    def free_index(self) -> np.ndarray:
        return np.flatnonzero(self.free)

    def full(self, x_free: np.ndarray) -> np.ndarray:
        u = self.fixed_values.copy()
        u[self.free] = x_free
        return u

    def with_fixed(self, free: np.ndarray, fixed_values: np.ndarray) -> "EnergyForm":
        return EnergyForm(
            self.base, self.nbr, self.inv_len, self.cell_w, self.mass,
            free, fixed_values, self.grid, self.coords,
        )

    def energy_cells(self, u: np.ndarray, p: float) -> np.ndarray:
        return _accel.energy_cells(u, self.base, self.nbr, self.inv_len, self.cell_w, p)

    def energy(self, u: np.ndarray, p: float) -> float:
        return float(np.sum(self.energy_cells(u, p)))

    def log_energy(self, u: np.ndarray, p: float) -> float:
        """log of the energy, accumulated from per-cell log magnitudes."""
        g = _accel.gradients(u, self.base, self.nbr, self.inv_len)
        mag2 = np.einsum("kc,kc->c", g, g)
        nz = mag2 > 0
        if not nz.any():
            return -math.inf
        terms = 0.5 * p * np.log(mag2[nz]) + np.log(self.cell_w[nz])
        return float(logsumexp(terms))

    def grad(self, u: np.ndarray, p: float) -> np.ndarray:
        return _accel.energy_grad(u, self.base, self.nbr, self.inv_len, self.cell_w, p)

    def max_grad_norm(self, u: np.ndarray) -> float:
        g = _accel.gradients(u, self.base, self.nbr, self.inv_len)
        return float(np.sqrt(np.max(np.einsum("kc,kc->c", g, g)))) if g.size else 0.0

    def hessian(self, u: np.ndarray, p: float, gfloor: float):
        from scipy import sparse

        rows, cols, vals = _accel.hessian_coo(
            u, self.base, self.nbr, self.inv_len, self.cell_w, p, gfloor, self.fmap
        )
        n = int(self.free.sum())
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def integral(self, u: np.ndarray, q: float) -> float:
        return float(np.sum(self.mass * np.abs(u) ** q))

    def lq(self, u: np.ndarray, q: float) -> float:
        if q == math.inf:
            return float(np.max(np.abs(u)))
        return self.integral(u, q) ** (1.0 / q)


def _grid_cells(grid: Grid, active: np.ndarray):
    """Cells (as base node plus axis neighbours) touching an active node."""
    N, shape = grid.ndim, grid.shape
    strides = np.array([int(np.prod(shape[k + 1 :])) for k in range(N)], dtype=np.int64)
    act = active.reshape(shape)
    base_ok = np.ones(tuple(s - 1 for s in shape), dtype=bool)
    touch = np.zeros_like(base_ok)
    sl0 = tuple(slice(0, s - 1) for s in shape)
    touch |= act[sl0]
    for k in range(N):
        sl = tuple(slice(1, s) if j == k else slice(0, s - 1) for j, s in enumerate(shape))
        touch |= act[sl]
    touch &= base_ok
    idx = np.argwhere(touch)
    base = (idx * strides).sum(axis=1).astype(np.int64)
    nbr = (base[None, :] + strides[:, None]).astype(np.int64)
    return base, nbr


def _cut_fractions(grid: Grid, inner_pts: np.ndarray, outer_pts: np.ndarray) -> np.ndarray:
    """Fraction of each edge from its interior end to the first boundary crossing."""
    dom = grid.domain
    lo = np.zeros(inner_pts.shape[0])
    hi = np.ones(inner_pts.shape[0])
    step = outer_pts - inner_pts
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        inside = dom.classify(inner_pts + mid[:, None] * step, tol=0.0) == 1
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def grid_energy_form(
    grid: Grid, active: np.ndarray | None = None, cut_edges: bool = True
) -> EnergyForm:
    """Energy form for zero-trace fields: interior nodes free, all others 0.

    ``active`` overrides the free set (for example to free boundary nodes).
    With ``cut_edges`` an edge from an interior node to an exterior node uses
    the axis distance to the boundary crossing, floored at
    ``CUT_FRACTION_FLOOR * h``; with it off every edge has length h.
    """
    key = ("energy_form", None if active is None else active.tobytes(), cut_edges)
    if key in grid._cache:
        return grid._cache[key]
    free = grid.interior.reshape(-1).copy() if active is None else np.asarray(active, bool).reshape(-1)
    base, nbr = _grid_cells(grid, free)
    C = base.shape[0]
    h = grid.h
    inv_len = np.full((grid.ndim, C), 1.0 / h)
    if cut_edges and active is None and grid.domain is not None:
        cls = grid.node_class.reshape(-1)
        X = grid.coords()
        for k in range(grid.ndim):
            a, b = base, nbr[k]
            fwd = (cls[a] == INTERIOR) & (cls[b] == EXTERIOR)
            bwd = (cls[b] == INTERIOR) & (cls[a] == EXTERIOR)
            for mask, i_end, o_end in ((fwd, a, b), (bwd, b, a)):
                if mask.any():
                    t = _cut_fractions(grid, X[i_end[mask]], X[o_end[mask]])
                    inv_len[k, mask] = 1.0 / (np.maximum(t, CUT_FRACTION_FLOOR) * h)
    form = EnergyForm(
        base=base,
        nbr=nbr,
        inv_len=inv_len,
        cell_w=np.full(C, h**grid.ndim),
        mass=np.full(grid.n_nodes, h**grid.ndim),
        free=free,
        fixed_values=np.zeros(grid.n_nodes),
        grid=grid,
    )
    grid._cache[key] = form
    return form


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def check_zero_trace(u: GridField) -> None:
    off = u.grid.node_class != INTERIOR
    bad = np.abs(u.values[off]) > 0
    if bad.any():
        raise ZeroTraceError(
            f"field is nonzero on {int(bad.sum())} boundary/exterior/pinned nodes"
        )


def p_energy(u: GridField, p: float) -> float:
    """sum over cells of |forward-difference gradient|^p h^N."""
    if not p > 1:
        raise ValueError(f"p must exceed 1, got p={p}")
    check_zero_trace(u)
    form = grid_energy_form(u.grid)
    return form.energy(np.ascontiguousarray(u.flat), p)


def lq_norm(u: GridField, q: float) -> float:
    if q == math.inf:
        return float(np.max(np.abs(u.values)))
    if q < 1:
        raise ValueError(f"q must be >= 1 or inf, got q={q}")
    g = u.grid
    return float(np.sum(np.abs(u.flat) ** q) * g.h**g.ndim) ** (1.0 / q)


@dataclass(frozen=True)
class HolderResult:
    value: float
    exact: bool
    n_nodes: int
    n_pairs: int

    def __float__(self) -> float:
        return self.value


def holder_seminorm(
    u: GridField,
    beta: float,
    d: GridField | None = None,
    include_exterior: bool = False,
    pair_budget: int = HOLDER_PAIR_BUDGET,
    sample_seed: int = 0,
) -> HolderResult:
    """Hölder seminorm over the closure of the domain for a zero-trace field.

    Pairs of interior nodes are compared directly; pairs with a boundary
    point y (where u = 0) are covered exactly by |u(x)| / d(x)^beta since the
    nearest boundary point realizes the sup over y. With
    ``include_exterior`` every grid node also enters the pairwise maximum;
    by the zero-extension identity the value does not change.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    grid = u.grid
    check_zero_trace(u)
    if d is None:
        if grid.domain is None:
            raise ValueError("a distance field is required for grids without a domain")
        d = distance_field(grid.domain, grid)
    inner = grid.interior.reshape(-1)
    vals = u.flat
    sel = np.ones(grid.n_nodes, bool) if include_exterior else inner
    idx = np.flatnonzero(sel)
    n = idx.size
    n_pairs = n * (n - 1) // 2
    exact = n_pairs <= pair_budget
    if not exact:
        keep = max(2, int((1 + math.isqrt(1 + 8 * pair_budget)) // 2))
        rng = np.random.default_rng(sample_seed)
        idx = np.sort(rng.choice(idx, size=keep, replace=False))
        n_pairs = keep * (keep - 1) // 2
    pair = _accel.holder_max(vals[idx], grid.coords()[idx], beta) if idx.size > 1 else 0.0
    dv = d.flat[inner]
    uv = np.abs(vals[inner])
    pos = dv > 0
    edge = float(np.max(uv[pos] / dv[pos] ** beta)) if pos.any() else 0.0
    return HolderResult(max(pair, edge), exact, int(sel.sum()), n_pairs)


def hardy_exponent(p: float, q: float, N: int) -> float:
    if q == math.inf:
        return 1.0 - N / p
    if q == p:
        return 1.0
    return N / q + (p - N) / p


def hardy_weighted_norm(u: GridField, d: GridField, p: float, q: float, clamp: float | None = None) -> float:
    grid = u.grid
    if clamp is None:
        clamp = 0.5 * grid.h
    if not clamp > 0:
        raise ValueError("clamp must be positive")
    gam = hardy_exponent(p, q, grid.ndim)
    inner = grid.interior.reshape(-1)
    ratio = np.abs(u.flat[inner]) / np.maximum(d.flat[inner], clamp) ** gam
    if q == math.inf:
        return float(np.max(ratio)) if ratio.size else 0.0
    return float(np.sum(ratio**q) * grid.h**grid.ndim) ** (1.0 / q)


def hardy_quotient(u: GridField, d: GridField, p: float, q: float, clamp: float | None = None) -> float:
    """p-energy over the p-th power of the Hardy-weighted L^q norm."""
    N = u.grid.ndim
    ExponentPair(p, q, N).require_superconformal()
    if q != math.inf and q < p:
        raise ValueError(f"Hardy quotients need p <= q <= inf, got p={p}, q={q}")
    den = hardy_weighted_norm(u, d, p, q, clamp)
    if den == 0:
        raise ValueError("Hardy quotient of the zero field is undefined")
    return p_energy(u, p) / den**p


@dataclass(frozen=True)
class InterpolationAudit:
    passed: bool
    lhs_beta: float
    rhs_beta: float
    margin_beta: float
    lhs_sup: float | None
    rhs_sup: float | None
    margin_sup: float | None


def interpolation_audit(
    u: GridField,
    interp: HolderInterp,
    d: GridField | None = None,
    pair_budget: int = HOLDER_PAIR_BUDGET,
) -> InterpolationAudit:
    """Check both Hölder interpolation inequalities with exact seminorms."""
    if u.grid.ndim != interp.N:
        raise ValueError("interpolation constants were built for another dimension")
    sa = holder_seminorm(u, interp.alpha, d, pair_budget=pair_budget)
    if not sa.exact:
        raise ValueError(
            f"{sa.n_nodes} nodes exceed the exact-mode pair budget of {pair_budget}; refusing a sampled audit"
        )
    sb = holder_seminorm(u, interp.beta, d, pair_budget=pair_budget).value
    ng = lq_norm(u, interp.gamma)
    sa_v = sa.value
    rhs_b = interp.C1 * ng**interp.theta * sa_v ** (1.0 - interp.theta)
    margin_b = rhs_b - sb
    ok = margin_b >= -1e-12 * max(1.0, abs(rhs_b))
    lhs_s = rhs_s = margin_s = None
    if interp.gamma != math.inf:
        lhs_s = lq_norm(u, math.inf)
        rhs_s = interp.C2 * ng**interp.chi * sa_v ** (1.0 - interp.chi)
        margin_s = rhs_s - lhs_s
        ok = ok and margin_s >= -1e-12 * max(1.0, abs(rhs_s))
    return InterpolationAudit(bool(ok), sb, rhs_b, margin_b, lhs_s, rhs_s, margin_s)
