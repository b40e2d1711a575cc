"""Domain catalog, uniform-grid rasterization and distance-function geometry."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Sequence

import numpy as np
from scipy import integrate, ndimage
from scipy.spatial import cKDTree

EXTERIOR = 0
INTERIOR = 1
BOUNDARY = 2
PINNED = 3

CLASS_NAMES = {EXTERIOR: "exterior", INTERIOR: "interior", BOUNDARY: "boundary", PINNED: "pinned"}

DEFAULT_NODE_BUDGET = 4_000_000
STRIP_ALPHA2_MIN = math.log(2.0) ** -3

_OMEGA_TABLE = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}

KINDS = ("interval", "box", "ball", "annulus", "tower", "punctured_box", "strip")


class DomainError(ValueError):
    """Invalid domain parameters."""


class BudgetError(RuntimeError):
    """A grid would exceed the configured node budget."""


def omega(N: int) -> float:
    """Lebesgue measure of the unit ball in R^N."""
    if N < 1:
        raise ValueError("dimension must be >= 1")
    if N in _OMEGA_TABLE:
        return _OMEGA_TABLE[N]
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def node_budget() -> int:
    return int(os.environ.get("PFREQ_NODE_BUDGET", DEFAULT_NODE_BUDGET))


# ---------------------------------------------------------------------------
# strip profile f_alpha(x1) = 1 / log(2 + (x1/alpha)^2) and F_alpha = f_alpha^2
# ---------------------------------------------------------------------------


def strip_profile(x1, alpha: float):
    s = np.asarray(x1, dtype=float) / alpha
    return 1.0 / np.log(2.0 + s * s)


def _strip_profile_derivs(x1, alpha: float):
    s = np.asarray(x1, dtype=float) / alpha
    L = np.log(2.0 + s * s)
    L1 = 2.0 * s / (2.0 + s * s)
    L2 = (4.0 - 2.0 * s * s) / (2.0 + s * s) ** 2
    f = 1.0 / L
    f1 = -L1 / L**2 / alpha
    f2 = (-L2 / L**2 + 2.0 * L1**2 / L**3) / alpha**2
    return f, f1, f2


def strip_F(x1, alpha: float):
    return strip_profile(x1, alpha) ** 2


def strip_F_second(x1, alpha: float):
    """Second derivative of F_alpha = f_alpha^2, in closed form."""
    s = np.asarray(x1, dtype=float) / alpha
    L = np.log(2.0 + s * s)
    L1 = 2.0 * s / (2.0 + s * s)
    L2 = (4.0 - 2.0 * s * s) / (2.0 + s * s) ** 2
    return (-2.0 * L2 / L**3 + 6.0 * L1**2 / L**4) / alpha**2


# ---------------------------------------------------------------------------
# DomainSpec
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DomainSpec:
    kind: str
    dimension: int
    params: dict
    removed_centers: np.ndarray | None = None
    analytic_distance: bool = True

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"DomainSpec({self.kind}, N={self.dimension}, {inner})"

    @property
    def label(self) -> str:
        p = self.params
        if self.kind == "interval":
            return f"interval({p['a']:g},{p['b']:g})"
        if self.kind == "box":
            return "box(" + "x".join(f"{e:g}" for e in p["extents"]) + ")"
        if self.kind == "ball":
            return f"ball(N={self.dimension},R={p['R']:g})"
        if self.kind == "annulus":
            return f"annulus(N={self.dimension},{p['R_in']:g},{p['R_out']:g})"
        if self.kind == "tower":
            return f"tower(N={self.dimension},m={p['m']},eps={p['eps']:g})"
        if self.kind == "punctured_box":
            return f"punctured_box(N={self.dimension},M={p['M']},eps={p['eps']:g})"
        return f"strip(alpha={p['alpha']:.6g},R={p['R']:g})"

    # -- geometry ---------------------------------------------------------

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        p, N = self.params, self.dimension
        if self.kind == "interval":
            return np.array([p["a"]]), np.array([p["b"]])
        if self.kind in {"box", "tower", "punctured_box"}:
            lo = np.asarray(p["lower"], dtype=float)
            return lo, lo + np.asarray(p["extents"], dtype=float)
        if self.kind == "ball":
            c = np.asarray(p["center"], dtype=float)
            return c - p["R"], c + p["R"]
        if self.kind == "annulus":
            c = np.asarray(p["center"], dtype=float)
            return c - p["R_out"], c + p["R_out"]
        top = float(strip_profile(0.0, p["alpha"]))
        return np.array([-p["R"], -top]), np.array([p["R"], top])

    def _box_bounds(self):
        lo, hi = self.bbox()
        return lo, hi

    def classify(self, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Point membership: 1 inside the open set, 0 on its boundary, -1 outside.

        Removed centers with zero hole radius are not handled here; they are
        pinned by :func:`rasterize`.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p = self.params
        if self.kind in {"interval", "box", "tower", "punctured_box"}:
            lo, hi = self._box_bounds()
            margin = np.minimum(x - lo, hi - x).min(axis=1)
            cls = np.where(margin > tol, 1, np.where(margin >= -tol, 0, -1))
            if self.kind in {"tower", "punctured_box"} and p["eps"] > 0:
                dc = self._center_distance(x)
                gap = dc - p["eps"]
                inner = cls == 1
                cls = np.where(inner & (gap < -tol), -1, cls)
                cls = np.where(inner & (np.abs(gap) <= tol), 0, cls)
            return cls.astype(np.int8)
        if self.kind == "ball":
            r = np.linalg.norm(x - np.asarray(p["center"]), axis=1)
            m = p["R"] - r
        elif self.kind == "annulus":
            r = np.linalg.norm(x - np.asarray(p["center"]), axis=1)
            m = np.minimum(r - p["R_in"], p["R_out"] - r)
        else:
            f = strip_profile(x[:, 0], p["alpha"])
            m = np.minimum(p["R"] - np.abs(x[:, 0]), f - np.abs(x[:, 1]))
        return np.where(m > tol, 1, np.where(m >= -tol, 0, -1)).astype(np.int8)

    def _center_distance(self, x: np.ndarray) -> np.ndarray:
        tree = cKDTree(self.removed_centers)
        dist, _ = tree.query(x)
        return dist

    def distance(self, x: np.ndarray) -> np.ndarray:
        """Distance to the boundary for points inside the closed set, 0 outside."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        p = self.params
        if self.kind in {"interval", "box", "tower", "punctured_box"}:
            lo, hi = self._box_bounds()
            d = np.minimum(x - lo, hi - x).min(axis=1)
            if self.kind in {"tower", "punctured_box"} and len(self.removed_centers):
                d = np.minimum(d, self._center_distance(x) - p["eps"])
        elif self.kind == "ball":
            d = p["R"] - np.linalg.norm(x - np.asarray(p["center"]), axis=1)
        elif self.kind == "annulus":
            r = np.linalg.norm(x - np.asarray(p["center"]), axis=1)
            d = np.minimum(r - p["R_in"], p["R_out"] - r)
        else:
            d = _strip_distance(x, p["alpha"], p["R"])
        return np.maximum(d, 0.0)

    def truncation_radius(self) -> float | None:
        """Largest |x| in a truncated unbounded model; None for genuine bounded sets."""
        if self.kind not in {"tower", "punctured_box", "strip"}:
            return None
        lo, hi = self.bbox()
        corners = np.array(list(product(*zip(lo, hi))))
        return float(np.max(np.linalg.norm(corners, axis=1)))

    def symmetry_center(self) -> np.ndarray | None:
        """Center of the axis-reflection symmetry group, if the set has one."""
        if self.kind in {"interval", "box"}:
            lo, hi = self.bbox()
            return 0.5 * (lo + hi)
        if self.kind in {"ball", "annulus"}:
            return np.asarray(self.params["center"], dtype=float)
        return None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "N": self.dimension}
        for k, v in self.params.items():
            if k == "lower" and self.kind != "box":
                continue
            out[k] = list(v) if isinstance(v, (tuple, list, np.ndarray)) else v
        return out


def _strip_distance(x: np.ndarray, alpha: float, R: float) -> np.ndarray:
    """Distance to the boundary of the truncated strip |x1| < R, |x2| < f(x1).

    The curved part has no closed form; nearest curve points are located on a
    dense sample and polished by safeguarded Newton steps on the squared
    distance.
    """
    y = np.abs(x[:, 1])
    side = R - np.abs(x[:, 0])
    ds = min(1e-3, 2.0 * R / 20000.0)
    n = int(math.ceil(2.0 * R / ds)) + 1
    t = np.linspace(-R, R, n)
    tree = cKDTree(np.column_stack([t, strip_profile(t, alpha)]))
    _, idx = tree.query(np.column_stack([x[:, 0], y]))
    tt = t[idx]
    for _ in range(8):
        f, f1, f2 = _strip_profile_derivs(tt, alpha)
        phi1 = (tt - x[:, 0]) + (f - y) * f1
        phi2 = 1.0 + f1 * f1 + (f - y) * f2
        step = np.where(phi2 > 1e-12, phi1 / np.where(phi2 > 1e-12, phi2, 1.0), 0.0)
        step = np.clip(step, -ds, ds)
        tt = np.clip(tt - step, -R, R)
    curve = np.hypot(tt - x[:, 0], strip_profile(tt, alpha) - y)
    inside = y < strip_profile(x[:, 0], alpha)
    return np.where(inside, np.minimum(side, curve), 0.0)


def _dyadic_tower_centers(N: int, m: int) -> np.ndarray:
    pts = []
    for k in range(m + 1):
        n_side = 2**k
        side = 1.0 / n_side
        for idx in product(range(n_side), repeat=N):
            c = [(i + 0.5) * side for i in idx]
            c[-1] += k
            pts.append(c)
    arr = np.array(pts, dtype=float)
    order = np.lexsort(arr.T[::-1])
    return arr[order]


def _lattice_centers(N: int, M: int) -> np.ndarray:
    if M < 2:
        return np.zeros((0, N))
    return np.array(list(product(range(1, M), repeat=N)), dtype=float)


def make_domain(kind: str, **params: Any) -> DomainSpec:
    """Build a validated catalog domain.

    ``interval(a, b)``, ``box(extents, lower=0)``, ``ball(R, N=2, center=0)``,
    ``annulus(R_in, R_out, N=2, center=0)``, ``tower(N, m, eps=0)``,
    ``punctured_box(N, M, eps=0)``, ``strip(alpha, R)`` (or ``alpha2``).
    """
    if kind == "interval":
        a, b = float(params.get("a", 0.0)), float(params.get("b", 1.0))
        if not b > a:
            raise DomainError(f"interval requires a < b, got a={a}, b={b}")
        return DomainSpec("interval", 1, {"a": a, "b": b, "lower": (a,), "extents": (b - a,)})
    if kind == "box":
        ext = tuple(float(e) for e in params["extents"])
        if not ext or any(e <= 0 for e in ext):
            raise DomainError(f"box requires positive extents, got {ext}")
        lower = tuple(float(v) for v in params.get("lower", (0.0,) * len(ext)))
        if len(lower) != len(ext):
            raise DomainError("box lower corner and extents differ in dimension")
        return DomainSpec("box", len(ext), {"extents": ext, "lower": lower})
    if kind == "ball":
        N = int(params.get("N", 2))
        R = float(params.get("R", 1.0))
        if R <= 0:
            raise DomainError(f"ball requires R > 0, got R={R}")
        center = tuple(float(c) for c in params.get("center", (0.0,) * N))
        if len(center) != N:
            raise DomainError("ball center has the wrong dimension")
        return DomainSpec("ball", N, {"center": center, "R": R})
    if kind == "annulus":
        N = int(params.get("N", 2))
        r_in, r_out = float(params["R_in"]), float(params["R_out"])
        if not 0 < r_in < r_out:
            raise DomainError(f"annulus requires 0 < R_in < R_out, got {r_in}, {r_out}")
        center = tuple(float(c) for c in params.get("center", (0.0,) * N))
        return DomainSpec("annulus", N, {"center": center, "R_in": r_in, "R_out": r_out})
    if kind == "tower":
        N = int(params.get("N", 2))
        m = int(params["m"])
        eps = float(params.get("eps", 0.0))
        if N < 2:
            raise DomainError("tower requires N >= 2")
        if m < 0:
            raise DomainError(f"tower requires m >= 0 levels, got m={m}")
        if eps < 0 or eps >= 2.0 ** (-m - 1):
            raise DomainError(f"tower hole radius must satisfy 0 <= eps < 2^-(m+1), got eps={eps}")
        ext = (1.0,) * (N - 1) + (float(m + 1),)
        centers = _dyadic_tower_centers(N, m)
        return DomainSpec(
            "tower", N, {"m": m, "eps": eps, "extents": ext, "lower": (0.0,) * N}, centers
        )
    if kind == "punctured_box":
        N = int(params.get("N", 2))
        M = int(params["M"])
        eps = float(params.get("eps", 0.0))
        if M < 1:
            raise DomainError(f"punctured_box requires side M >= 1, got M={M}")
        if eps < 0 or eps >= 0.5:
            raise DomainError(f"punctured_box hole radius must satisfy 0 <= eps < 1/2, got eps={eps}")
        return DomainSpec(
            "punctured_box",
            N,
            {"M": M, "eps": eps, "extents": (float(M),) * N, "lower": (0.0,) * N},
            _lattice_centers(N, M),
        )
    if kind == "strip":
        if "alpha2" in params:
            alpha2 = float(params["alpha2"])
        else:
            alpha2 = float(params["alpha"]) ** 2
        R = float(params["R"])
        if not alpha2 > STRIP_ALPHA2_MIN:
            raise DomainError(
                f"strip requires alpha^2 > (log 2)^-3 = {STRIP_ALPHA2_MIN:.6f}, got alpha^2={alpha2:.6f}"
            )
        if R <= 0:
            raise DomainError(f"strip truncation R must be positive, got R={R}")
        return DomainSpec("strip", 2, {"alpha": math.sqrt(alpha2), "R": R})
    raise DomainError(f"unknown domain kind {kind!r}; expected one of {KINDS}")


def domain_from_dict(table: dict[str, Any]) -> DomainSpec:
    table = dict(table)
    kind = table.pop("kind")
    if "N" in table and kind in {"interval", "box", "strip"}:
        table.pop("N")
    return make_domain(kind, **table)


# ---------------------------------------------------------------------------
# Grid and GridField
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    origin: np.ndarray
    h: float
    shape: tuple[int, ...]
    node_class: np.ndarray
    domain: DomainSpec | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    def coords(self) -> np.ndarray:
        """Flat (n_nodes, N) array of node coordinates in C order."""
        if "coords" not in self._cache:
            idx = np.indices(self.shape).reshape(self.ndim, -1).T
            c = self.origin[None, :] + self.h * idx
            c.setflags(write=False)
            self._cache["coords"] = c
        return self._cache["coords"]

    def mask(self, cls: int) -> np.ndarray:
        return self.node_class == cls

    @property
    def interior(self) -> np.ndarray:
        return self.node_class == INTERIOR

    @property
    def n_interior(self) -> int:
        return int(self.interior.sum())

    def point(self, index: Sequence[int]) -> np.ndarray:
        return self.origin + self.h * np.asarray(index, dtype=float)

    def nearest_index(self, x: Sequence[float]) -> tuple[int, ...]:
        idx = np.rint((np.asarray(x, dtype=float) - self.origin) / self.h).astype(int)
        return tuple(int(i) for i in idx)

    def field(self, values: np.ndarray) -> "GridField":
        return GridField(self, values)

    def zeros(self) -> "GridField":
        return GridField(self, np.zeros(self.shape))


class GridField:
    """Immutable samples of a scalar function on every node of a grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values: np.ndarray):
        v = np.array(values, dtype=float).reshape(grid.shape)
        v.setflags(write=False)
        self.grid = grid
        self.values = v

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def is_zero_trace(self, atol: float = 0.0) -> bool:
        off = self.grid.node_class != INTERIOR
        return bool(np.all(np.abs(self.values[off]) <= atol))

    def __mul__(self, c: float) -> "GridField":
        return GridField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __sub__(self, other: "GridField") -> "GridField":
        return GridField(self.grid, self.values - other.values)

    def __add__(self, other: "GridField") -> "GridField":
        return GridField(self.grid, self.values + other.values)

    def __neg__(self) -> "GridField":
        return GridField(self.grid, -self.values)

    def __repr__(self) -> str:
        return f"GridField(shape={self.grid.shape}, h={self.grid.h:g})"


def rasterize(domain: DomainSpec, h: float, budget: int | None = None) -> Grid:
    """Uniform grid covering the bounding box of ``domain`` with spacing ``h``."""
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got h={h}")
    lo, hi = domain.bbox()
    shape, origin = [], []
    for a, b in zip(lo, hi):
        ext = b - a
        n = ext / h
        if abs(n - round(n)) <= 1e-6 * max(1.0, n):
            n_int = int(round(n))
            o = a
        else:
            n_int = int(math.ceil(n))
            o = a - 0.5 * (n_int * h - ext)
        shape.append(n_int + 1)
        origin.append(o)
    shape_t = tuple(shape)
    limit = node_budget() if budget is None else int(budget)
    total = int(np.prod(shape_t))
    if total > limit:
        raise BudgetError(
            f"grid with shape {shape_t} has {total} nodes, exceeding the node budget of {limit} "
            "(set PFREQ_NODE_BUDGET to override)"
        )
    origin_a = np.array(origin, dtype=float)
    idx = np.indices(shape_t).reshape(len(shape_t), -1).T
    pts = origin_a[None, :] + h * idx
    scale = max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    cls = domain.classify(pts, tol=1e-9 * scale)
    node_class = np.full(total, EXTERIOR, dtype=np.int8)
    node_class[cls == 1] = INTERIOR
    node_class[cls == 0] = BOUNDARY
    node_class = node_class.reshape(shape_t)
    if domain.kind in {"tower", "punctured_box"} and domain.params["eps"] == 0.0:
        for c in domain.removed_centers:
            j = np.rint((c - origin_a) / h).astype(int)
            if np.all(j >= 0) and np.all(j < np.array(shape_t)):
                if node_class[tuple(j)] == INTERIOR:
                    node_class[tuple(j)] = PINNED
    demoted = _demote_unresolved(node_class)
    node_class.setflags(write=False)
    grid = Grid(origin_a, float(h), shape_t, node_class, domain)
    grid._cache["demoted_nodes"] = demoted
    return grid


def _demote_unresolved(node_class: np.ndarray) -> int:
    """Turn interior nodes with no interior neighbour into boundary nodes.

    Such nodes sit in pockets thinner than the grid (e.g. between a hole and a
    wall) and would otherwise form spurious one-node components. Only applied
    when a larger component exists.
    """
    lab, n = ndimage.label(node_class == INTERIOR)
    if n <= 1:
        return 0
    sizes = np.bincount(lab.ravel())
    if sizes[1:].max() < 2:
        return 0
    single = np.flatnonzero(sizes == 1)
    single = single[single > 0]
    mask = np.isin(lab, single)
    node_class[mask] = BOUNDARY
    return int(mask.sum())


def distance_field(domain: DomainSpec, grid: Grid) -> GridField:
    """Closed-form distance to the boundary at interior nodes, 0 elsewhere."""
    key = ("distance", id(domain))
    if key in grid._cache:
        return grid._cache[key]
    vals = np.zeros(grid.n_nodes)
    inner = grid.interior.reshape(-1)
    vals[inner] = domain.distance(grid.coords()[inner])
    out = GridField(grid, vals)
    grid._cache[key] = out
    return out


@dataclass(frozen=True)
class InradiusResult:
    value: float
    uncertainty: float
    argmax: tuple[int, ...]
    point: np.ndarray

    def __float__(self) -> float:
        return self.value


def inradius(field: GridField) -> InradiusResult:
    grid = field.grid
    if not grid.interior.any():
        raise ValueError("inradius of a grid with empty interior")
    flat = field.flat
    k = int(np.argmax(flat))  # first maximum in C order = lexicographically smallest
    idx = tuple(int(i) for i in np.unravel_index(k, grid.shape))
    return InradiusResult(float(flat[k]), grid.h, idx, grid.point(idx))


def distance_lq_norm(field: GridField, q: float) -> float:
    """L^q norm of a distance field by dual-cell midpoint quadrature."""
    if q == math.inf:
        return inradius(field).value
    if q < 1:
        raise ValueError(f"q must be >= 1 or inf, got {q}")
    grid = field.grid
    return float(np.sum(np.abs(field.flat) ** q) * grid.h**grid.ndim) ** (1.0 / q)


def integrate_field_power(field: GridField, alpha: float) -> float:
    grid = field.grid
    return float(np.sum(np.abs(field.flat) ** alpha) * grid.h**grid.ndim)


def inradius_constant(N: int, alpha: float) -> float:
    inner, _ = integrate.quad(lambda r: (1.0 - r) ** alpha * r ** (N - 1), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return (N * omega(N) * inner) ** (-1.0 / (N + alpha))


def inradius_upper_bound(N: int, alpha: float, integral_of_d_to_alpha: float) -> float:
    """Upper bound for the inradius from the integral of d^alpha (sharp on balls)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if integral_of_d_to_alpha < 0:
        raise ValueError("integral must be nonnegative")
    if integral_of_d_to_alpha == 0:
        return 0.0
    return inradius_constant(N, alpha) * integral_of_d_to_alpha ** (1.0 / (N + alpha))


@dataclass(frozen=True)
class ProfileEntry:
    R: float
    tail_sup: float
    bound: float | None = None
    far_sup: float | None = None
    holds: bool | None = None


def quasibounded_profile(
    domain: DomainSpec,
    radii: Sequence[float],
    h: float | None = None,
    alpha: float | None = None,
    field: GridField | None = None,
) -> list[ProfileEntry]:
    """Tail sups of d outside B_R, with the optional integral-tail bound.

    The bound 2 (omega_N^-1 int_{|y|>R} d^alpha)^(1/(N+alpha)) is checked on the
    nodes with |x| > R + r/2 (the region where it is asserted) for R >= r/2.
    """
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly increasing")
    trunc = domain.truncation_radius()
    if trunc is not None and radii[-1] >= trunc:
        raise ValueError(
            f"radius {radii[-1]} exceeds the truncation of {domain.label} (|x| <= {trunc:.6g})"
        )
    if field is None:
        if h is None:
            raise ValueError("either a grid spacing h or a distance field is required")
        grid = rasterize(domain, h)
        field = distance_field(domain, grid)
    grid = field.grid
    d = field.flat
    rad = np.linalg.norm(grid.coords(), axis=1)
    r_om = inradius(field).value
    N = grid.ndim
    out = []
    for R in radii:
        tail = d[rad > R]
        tail_sup = float(tail.max()) if tail.size else 0.0
        if alpha is None:
            out.append(ProfileEntry(R, tail_sup))
            continue
        tail_int = float(np.sum(tail**alpha) * grid.h**N)
        bound = 2.0 * (tail_int / omega(N)) ** (1.0 / (N + alpha))
        far = d[rad > R + 0.5 * r_om]
        far_sup = float(far.max()) if far.size else 0.0
        holds = True if R < 0.5 * r_om else far_sup <= bound + grid.h
        out.append(ProfileEntry(R, tail_sup, bound, far_sup, holds))
    return out
