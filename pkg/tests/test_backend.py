import math
import os
import subprocess
import sys

import numpy as np
import pytest

from pfreq import _accel
from pfreq.calculus import grid_energy_form
from pfreq.geometry import make_domain, rasterize
from pfreq.solvers import pi_pq, principal_frequency

pytestmark = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@pytest.fixture
def form_and_u():
    g = rasterize(make_domain("ball", R=1.0), 1 / 16)
    form = grid_energy_form(g)
    u = form.full(np.random.default_rng(7).random(int(form.free.sum())))
    return form, u


def _both(fn):
    prev = _accel.backend()
    try:
        _accel.set_backend("numpy")
        a = fn()
        _accel.set_backend("numba")
        b = fn()
    finally:
        _accel.set_backend(prev)
    return a, b


@pytest.mark.parametrize("p", [1.3, 2.0, 4.5])
def test_kernels_agree(form_and_u, p):
    form, u = form_and_u
    args = (u, form.base, form.nbr, form.inv_len, form.cell_w)
    for fn in (lambda: _accel.energy_cells(*args, p), lambda: _accel.energy_grad(*args, p),
               lambda: _accel.gradients(*args[:4])):
        a, b = _both(fn)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-14)
    a, b = _both(lambda: _accel.hessian_coo(*args, p, 1e-8, form.fmap))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert np.allclose(a[2], b[2], rtol=1e-12, atol=1e-14)


def test_holder_kernel_agrees():
    rng = np.random.default_rng(2)
    vals, coords = rng.random(300), rng.random((300, 2))
    a, b = _both(lambda: _accel.holder_max(vals, coords, 0.5))
    assert a == pytest.approx(b, rel=1e-13)


def test_solves_agree_across_backends():
    g = rasterize(make_domain("box", extents=(1.0, 1.0)), 1 / 16)
    a, b = _both(lambda: principal_frequency(g, 3.0, 1.0).constant)
    assert a == pytest.approx(b, rel=1e-9)
    a, b = _both(lambda: principal_frequency(g, 4.0, math.inf).constant)
    assert a == pytest.approx(b, rel=1e-9)
    a, b = _both(lambda: pi_pq(4.0, 2.0, nodes=256).constant)
    assert a == pytest.approx(b, rel=1e-10)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="unknown backend"):
        _accel.set_backend("cuda")


def test_env_flag_selects_numpy():
    env = dict(os.environ, PFREQ_NUMBA="0")
    out = subprocess.run(
        [sys.executable, "-c", "from pfreq import _accel; from pfreq.solvers import pi_pq; "
         "print(_accel.backend(), round(pi_pq(2.0, 2.0, 256).constant, 4))"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split() == ["numpy", "3.1416"]
