"""Hot per-cell kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from the ``PFREQ_NUMBA`` environment
variable ("0", "off", "false" or "no" forces numpy) and can be switched at
runtime with :func:`set_backend`. Both paths return identical shapes and
agree to floating rounding; final reductions are always done by the caller
with ``np.sum`` so totals do not depend on the backend's loop order.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


def _env_wants_numba() -> bool:
    flag = os.environ.get("PFREQ_NUMBA", "1").strip().lower()
    return flag not in {"0", "off", "false", "no"}


_BACKEND = "numba" if (NUMBA_AVAILABLE and _env_wants_numba()) else "numpy"


def backend() -> str:
    return _BACKEND


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _BACKEND
    if name not in {"numba", "numpy"}:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    previous, _BACKEND = _BACKEND, name
    return previous


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _gradients_nb(u, base, nbr, inv_len):
    n_axes, n_cells = nbr.shape
    g = np.empty((n_axes, n_cells))
    for c in range(n_cells):
        u0 = u[base[c]]
        for k in range(n_axes):
            g[k, c] = (u[nbr[k, c]] - u0) * inv_len[k, c]
    return g


@njit(cache=True)
def _energy_cells_nb(u, base, nbr, inv_len, cell_w, p):
    n_axes, n_cells = nbr.shape
    out = np.empty(n_cells)
    for c in range(n_cells):
        u0 = u[base[c]]
        acc = 0.0
        for k in range(n_axes):
            d = (u[nbr[k, c]] - u0) * inv_len[k, c]
            acc += d * d
        if acc > 0.0:
            out[c] = cell_w[c] * acc ** (0.5 * p)
        else:
            out[c] = 0.0
    return out


@njit(cache=True)
def _energy_grad_nb(u, base, nbr, inv_len, cell_w, p):
    n_axes, n_cells = nbr.shape
    grad = np.zeros(u.shape[0])
    g = np.empty(n_axes)
    for c in range(n_cells):
        u0 = u[base[c]]
        acc = 0.0
        for k in range(n_axes):
            g[k] = (u[nbr[k, c]] - u0) * inv_len[k, c]
            acc += g[k] * g[k]
        if acc == 0.0:
            continue
        a = cell_w[c] * p * acc ** (0.5 * p - 1.0)
        for k in range(n_axes):
            f = a * g[k] * inv_len[k, c]
            grad[nbr[k, c]] += f
            grad[base[c]] -= f
    return grad


@njit(cache=True)
def _hessian_coo_nb(u, base, nbr, inv_len, cell_w, p, gfloor, fmap):
    n_axes, n_cells = nbr.shape
    m = n_axes + 1
    rows = np.empty(n_cells * m * m, dtype=np.int64)
    cols = np.empty(n_cells * m * m, dtype=np.int64)
    vals = np.empty(n_cells * m * m)
    g = np.empty(n_axes)
    mat = np.empty((n_axes, n_axes))
    loc = np.empty(m, dtype=np.int64)
    hl = np.empty((m, m))
    pos = 0
    for c in range(n_cells):
        loc[0] = fmap[base[c]]
        any_free = loc[0] >= 0
        for k in range(n_axes):
            loc[k + 1] = fmap[nbr[k, c]]
            if loc[k + 1] >= 0:
                any_free = True
        if not any_free:
            continue
        u0 = u[base[c]]
        acc = 0.0
        for k in range(n_axes):
            g[k] = (u[nbr[k, c]] - u0) * inv_len[k, c]
            acc += g[k] * g[k]
        gn = np.sqrt(acc)
        ge = gn if gn > gfloor else gfloor
        coef = cell_w[c] * p * ge ** (p - 2.0)
        for k in range(n_axes):
            for l in range(n_axes):
                outer = (p - 2.0) * g[k] * g[l] / (ge * ge)
                mat[k, l] = coef * ((1.0 if k == l else 0.0) + outer) * inv_len[k, c] * inv_len[l, c]
        tot = 0.0
        for k in range(n_axes):
            col = 0.0
            for l in range(n_axes):
                hl[k + 1, l + 1] = mat[k, l]
                col += mat[k, l]
            hl[0, k + 1] = -col
            hl[k + 1, 0] = -col
            tot += col
        hl[0, 0] = tot
        for a_ in range(m):
            if loc[a_] < 0:
                continue
            for b_ in range(m):
                if loc[b_] < 0:
                    continue
                rows[pos] = loc[a_]
                cols[pos] = loc[b_]
                vals[pos] = hl[a_, b_]
                pos += 1
    return rows[:pos], cols[:pos], vals[:pos]


@njit(cache=True)
def _holder_max_nb(vals, coords, beta):
    n = vals.shape[0]
    dim = coords.shape[1]
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            du = abs(vals[i] - vals[j])
            if du == 0.0:
                continue
            r2 = 0.0
            for k in range(dim):
                t = coords[i, k] - coords[j, k]
                r2 += t * t
            q = du / r2 ** (0.5 * beta)
            if q > best:
                best = q
    return best


# ---------------------------------------------------------------------------
# numpy fallbacks
# ---------------------------------------------------------------------------


def _gradients_np(u, base, nbr, inv_len):
    return (u[nbr] - u[base][None, :]) * inv_len


def _energy_cells_np(u, base, nbr, inv_len, cell_w, p):
    g = _gradients_np(u, base, nbr, inv_len)
    acc = np.einsum("kc,kc->c", g, g)
    out = np.zeros_like(acc)
    nz = acc > 0.0
    out[nz] = cell_w[nz] * acc[nz] ** (0.5 * p)
    return out


def _energy_grad_np(u, base, nbr, inv_len, cell_w, p):
    g = _gradients_np(u, base, nbr, inv_len)
    acc = np.einsum("kc,kc->c", g, g)
    a = np.zeros_like(acc)
    nz = acc > 0.0
    a[nz] = cell_w[nz] * p * acc[nz] ** (0.5 * p - 1.0)
    flux = a[None, :] * g * inv_len
    n = u.shape[0]
    grad = np.zeros(n)
    for k in range(nbr.shape[0]):
        grad += np.bincount(nbr[k], weights=flux[k], minlength=n)
    grad -= np.bincount(base, weights=flux.sum(axis=0), minlength=n)
    return grad


def _hessian_coo_np(u, base, nbr, inv_len, cell_w, p, gfloor, fmap):
    n_axes = nbr.shape[0]
    nodes = np.vstack([base[None, :], nbr])  # (m, C)
    loc = fmap[nodes]
    keep = (loc >= 0).any(axis=0)
    nodes, loc = nodes[:, keep], loc[:, keep]
    s = inv_len[:, keep]
    g = _gradients_np(u, base[keep], nbr[:, keep], s)
    gn = np.sqrt(np.einsum("kc,kc->c", g, g))
    ge = np.maximum(gn, gfloor)
    coef = cell_w[keep] * p * ge ** (p - 2.0)
    ghat = g / ge[None, :]
    mat = (p - 2.0) * ghat[:, None, :] * ghat[None, :, :]
    mat[np.arange(n_axes), np.arange(n_axes), :] += 1.0
    mat *= coef[None, None, :] * s[:, None, :] * s[None, :, :]
    m = n_axes + 1
    hl = np.empty((m, m, mat.shape[2]))
    hl[1:, 1:] = mat
    col = mat.sum(axis=0)
    hl[0, 1:] = -col
    hl[1:, 0] = -col
    hl[0, 0] = col.sum(axis=0)
    rows = np.broadcast_to(loc[:, None, :], hl.shape)
    cols = np.broadcast_to(loc[None, :, :], hl.shape)
    # match the numba emission order: cell-major, then local row, local column
    rows = np.moveaxis(rows, 2, 0).reshape(-1)
    cols = np.moveaxis(cols, 2, 0).reshape(-1)
    vals = np.moveaxis(hl, 2, 0).reshape(-1)
    ok = (rows >= 0) & (cols >= 0)
    return rows[ok].astype(np.int64), cols[ok].astype(np.int64), vals[ok]


def _holder_max_np(vals, coords, beta, block=512):
    n = vals.shape[0]
    best = 0.0
    for start in range(0, n, block):
        stop = min(start + block, n)
        du = np.abs(vals[start:stop, None] - vals[None, :])
        diff = coords[start:stop, None, :] - coords[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        mask = (r2 > 0.0) & (du > 0.0)
        if mask.any():
            best = max(best, float(np.max(du[mask] / r2[mask] ** (0.5 * beta))))
    return best


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def gradients(u, base, nbr, inv_len):
    if _BACKEND == "numba":
        return _gradients_nb(u, base, nbr, inv_len)
    return _gradients_np(u, base, nbr, inv_len)


def energy_cells(u, base, nbr, inv_len, cell_w, p):
    if _BACKEND == "numba":
        return _energy_cells_nb(u, base, nbr, inv_len, cell_w, float(p))
    return _energy_cells_np(u, base, nbr, inv_len, cell_w, float(p))


def energy_grad(u, base, nbr, inv_len, cell_w, p):
    if _BACKEND == "numba":
        return _energy_grad_nb(u, base, nbr, inv_len, cell_w, float(p))
    return _energy_grad_np(u, base, nbr, inv_len, cell_w, float(p))


def hessian_coo(u, base, nbr, inv_len, cell_w, p, gfloor, fmap):
    if _BACKEND == "numba":
        return _hessian_coo_nb(u, base, nbr, inv_len, cell_w, float(p), float(gfloor), fmap)
    return _hessian_coo_np(u, base, nbr, inv_len, cell_w, float(p), float(gfloor), fmap)


def holder_max(vals, coords, beta):
    vals = np.ascontiguousarray(vals, dtype=np.float64)
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    if _BACKEND == "numba":
        return float(_holder_max_nb(vals, coords, float(beta)))
    return _holder_max_np(vals, coords, float(beta))
