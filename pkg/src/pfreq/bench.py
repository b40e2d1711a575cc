"""Timing of the per-cell kernels and of one full solve under both backends."""

from __future__ import annotations

import time

import numpy as np

from . import _accel
from .calculus import grid_energy_form
from .geometry import make_domain, rasterize
from .solvers import solve_lane_emden


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(h: float = 1.0 / 128, p: float = 4.0, repeat: int = 5) -> list[dict]:
    """Best-of-``repeat`` seconds per kernel and backend on the unit square."""
    grid = rasterize(make_domain("box", extents=(1.0, 1.0)), h)
    form = grid_energy_form(grid)
    rng = np.random.default_rng(0)
    u = form.full(rng.random(int(form.free.sum())))
    fmap = form.fmap
    args = (u, form.base, form.nbr, form.inv_len, form.cell_w)
    kernels = {
        "energy_cells": lambda: _accel.energy_cells(*args, p),
        "energy_grad": lambda: _accel.energy_grad(*args, p),
        "hessian_coo": lambda: _accel.hessian_coo(*args, p, 1e-8, fmap),
    }
    rows = []
    backends = ["numpy"] + (["numba"] if _accel.NUMBA_AVAILABLE else [])
    previous = _accel.backend()
    try:
        for b in backends:
            _accel.set_backend(b)
            for name, fn in kernels.items():
                fn()  # compile / warm caches
                rows.append({"kernel": name, "backend": b, "cells": int(form.base.size), "seconds": _best(fn, repeat)})
            solve_lane_emden(rasterize(make_domain("box", extents=(1.0, 1.0)), 1.0 / 32), p, 1.0)
            t = _best(lambda: solve_lane_emden(rasterize(make_domain("box", extents=(1.0, 1.0)), 1.0 / 64), p, 1.0),
                      max(1, repeat // 2))
            rows.append({"kernel": "lane_emden_solve_h64", "backend": b, "cells": 64 * 64, "seconds": t})
    finally:
        _accel.set_backend(previous)
    return rows


def format_table(rows: list[dict]) -> str:
    by = {(r["kernel"], r["backend"]): r["seconds"] for r in rows}
    kernels = list(dict.fromkeys(r["kernel"] for r in rows))
    lines = [f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}"]
    for k in kernels:
        a, b = by.get((k, "numpy")), by.get((k, "numba"))
        sp = f"{a / b:10.1f}" if a and b else f"{'-':>10}"
        lines.append(f"{k:<22}{a:12.5f}{(b if b is not None else float('nan')):12.5f}{sp}")
    return "\n".join(lines)
