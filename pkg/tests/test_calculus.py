import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfreq.calculus import (
    ExponentPair,
    HolderInterp,
    ZeroTraceError,
    grid_energy_form,
    hardy_exponent,
    hardy_quotient,
    holder_seminorm,
    interpolation_audit,
    lq_norm,
    p_energy,
)
from pfreq.geometry import GridField, distance_field, make_domain, rasterize


def _square(h=1 / 16):
    dom = make_domain("box", extents=(1.0, 1.0))
    g = rasterize(dom, h)
    return dom, g, distance_field(dom, g)


def _bump(g):
    X = g.coords()
    v = np.sin(np.pi * X[:, 0]) * np.sin(np.pi * X[:, 1])
    return GridField(g, np.where(g.interior.ravel(), v, 0.0))


def test_exponent_pair_regimes():
    assert ExponentPair(2, 1, 2).regime == "sub"
    assert ExponentPair(2, 2, 2).regime == "homogeneous"
    assert ExponentPair(2, 3, 2).regime == "super"
    assert ExponentPair(2, math.inf, 2).regime == "sup"
    assert ExponentPair(4, 1, 2).alpha_p == pytest.approx(0.5)
    with pytest.raises(ValueError, match="p must exceed 1"):
        ExponentPair(1.0, 1, 1)
    with pytest.raises(ValueError, match="p > N"):
        ExponentPair(2, 1, 2).alpha_p
    with pytest.raises(ValueError, match="q < p"):
        ExponentPair(2, 2, 1).require_sub()


def test_holder_constants():
    hi = HolderInterp(1.0, 0.5, math.inf, 2)
    assert hi.theta == pytest.approx(0.5) and hi.chi == 1.0 and hi.C1 == 2.0
    with pytest.raises(ValueError, match="finite gamma"):
        hi.C2
    hf = HolderInterp(0.5, 0.25, 2.0, 1)
    assert hf.theta == pytest.approx(0.25 / 1.0)
    assert hf.chi == pytest.approx(0.5)
    with pytest.raises(ValueError):
        HolderInterp(0.5, 0.5, 2.0, 1)


def test_energy_of_linear_tent_in_1d():
    dom = make_domain("interval", a=0.0, b=1.0)
    g = rasterize(dom, 1 / 64)
    d = distance_field(dom, g)
    for p in (1.5, 2.0, 4.0):
        assert p_energy(d, p) == pytest.approx(1.0)
    assert lq_norm(d, 2.0) == pytest.approx(math.sqrt(1 / 12), rel=1e-3)


def test_energy_converges_for_smooth_bump():
    errs = []
    for h in (1 / 16, 1 / 32, 1 / 64):
        _, g, _ = _square(h)
        errs.append(abs(p_energy(_bump(g), 2.0) - math.pi**2 / 2))
    assert errs[2] < errs[1] < errs[0]


def test_zero_trace_is_enforced():
    _, g, _ = _square()
    with pytest.raises(ZeroTraceError):
        p_energy(GridField(g, np.ones(g.shape)), 2.0)


def test_gradient_matches_finite_differences():
    _, g, _ = _square(1 / 8)
    form = grid_energy_form(g)
    rng = np.random.default_rng(3)
    x = rng.random(int(form.free.sum()))
    u = form.full(x)
    for p in (1.5, 3.0):
        gr = form.grad(u, p)[form.free]
        e = np.zeros_like(x)
        for i in (0, 7, 20):
            e[:] = 0
            e[i] = 1e-6
            fd = (form.energy(form.full(x + e), p) - form.energy(form.full(x - e), p)) / 2e-6
            assert gr[i] == pytest.approx(fd, rel=1e-5)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.1, 6.0), st.floats(0.1, 10.0))
def test_energy_is_p_homogeneous(p, t):
    _, g, _ = _square(1 / 8)
    u = _bump(g)
    assert p_energy(t * u, p) == pytest.approx(t**p * p_energy(u, p), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 8.0), st.floats(0.1, 10.0))
def test_lq_norm_is_homogeneous(q, t):
    _, g, _ = _square(1 / 8)
    u = _bump(g)
    assert lq_norm(t * u, q) == pytest.approx(t * lq_norm(u, q), rel=1e-9)


def test_holder_seminorm_of_distance_is_one():
    dom, g, d = _square(1 / 8)
    r = holder_seminorm(d, 1.0)
    assert r.exact and r.value == pytest.approx(1.0)
    ext = holder_seminorm(d, 1.0, include_exterior=True)
    assert ext.value == pytest.approx(r.value)


def test_hardy_exponent_and_quotient():
    assert hardy_exponent(4, 4, 2) == 1.0
    assert hardy_exponent(4, math.inf, 2) == 0.5
    assert hardy_exponent(4, 8, 2) == pytest.approx(2 / 8 + 0.5)
    _, g, d = _square(1 / 16)
    with pytest.raises(ValueError, match="p > N"):
        hardy_quotient(_bump(g), d, 2.0, 2.0)
    with pytest.raises(ValueError, match="p <= q"):
        hardy_quotient(_bump(g), d, 4.0, 2.0)
    assert hardy_quotient(_bump(g), d, 4.0, 4.0) > 0


def test_interpolation_audit_holds_for_bump():
    _, g, d = _square(1 / 16)
    out = interpolation_audit(_bump(g), HolderInterp(1.0, 0.5, 2.0, 2), d)
    assert out.passed and out.margin_beta > 0 and out.margin_sup > 0
    with pytest.raises(ValueError, match="pair budget"):
        interpolation_audit(_bump(g), HolderInterp(1.0, 0.5, 2.0, 2), d, pair_budget=10)
