import math

import numpy as np
import pytest

from oracles import FROZEN, pi_pq_exact, talenti, talenti_profile, torsion_ball_lambda21
from pfreq.geometry import BOUNDARY, Grid, make_domain, rasterize
from pfreq.solvers import (
    A4Violation,
    DomainConnectivityError,
    hardy_constant,
    morrey_mu,
    morrey_sharp_bound,
    pi_pq,
    principal_frequency,
    radial_ball_frequency,
    solve_lane_emden,
)
from pfreq.solvers import radial as radial_mod
from pfreq.geometry import distance_field


def _square(h=1 / 16):
    return rasterize(make_domain("box", extents=(1.0, 1.0)), h)


@pytest.mark.parametrize("p, q", [(2.0, 1.0), (2.0, 2.0), (4.0, 1.0), (4.0, 2.0), (8.0, 4.0), (1.5, 1.0),
                                  (4.0, 4.0), (3.0, 1.5)])
def test_pi_pq_matches_closed_form(p, q):
    rep = pi_pq(p, q, nodes=1024)
    assert rep.constant == pytest.approx(FROZEN[("pi", p, q)], rel=2e-5)
    assert rep.constant == pytest.approx(pi_pq_exact(p, q), rel=2e-5)
    assert rep.extra["a4_slack"] > 0


def test_pi_pq_small_p():
    # closed form with q = p reduces to 2 pi (p-1)^(1/p) / (p sin(pi/p))
    for p in (1.5, 1.2):
        exact = 2 * math.pi * (p - 1) ** (1 / p) / (p * math.sin(math.pi / p))
        assert pi_pq(p, p, nodes=1024).constant == pytest.approx(exact, rel=1e-4)


def test_a4_violation_raised(monkeypatch):
    monkeypatch.setattr(radial_mod, "a4_lower_bound", lambda p, q: 100.0)
    with pytest.raises(A4Violation, match="lower bound"):
        pi_pq(2.0, 1.0, nodes=256)
    rep = pi_pq(2.0, 1.0, nodes=256, check=False)
    assert rep.extra["a4_slack"] < 0


def test_radial_torsion_ball():
    rep = radial_ball_frequency(2.0, 1.0, N=2, R=1.0, nodes=512)
    assert rep.constant == pytest.approx(torsion_ball_lambda21(2), rel=1e-4)
    assert rep.route == "radial"


def test_radial_scaling_in_R():
    a = radial_ball_frequency(3.0, 1.5, N=2, R=1.0, nodes=256).constant
    b = radial_ball_frequency(3.0, 1.5, N=2, R=2.0, nodes=256).constant
    # lambda scales like R^(-(p - N + N p / q))
    assert b == pytest.approx(a * 2.0 ** (-(3.0 - 2.0 + 2.0 * 3.0 / 1.5)), rel=1e-6)


def test_talenti_radial_and_profile():
    rep = radial_ball_frequency(4.0, math.inf, N=2, nodes=512)
    assert rep.constant == pytest.approx(talenti(4.0), rel=5e-3)
    r, u = rep.extremal[:, 0], rep.extremal[:, 1]
    assert np.max(np.abs(u - talenti_profile(r, 4.0))) < 2e-2


def test_sup_requires_superconformal():
    with pytest.raises(ValueError, match="p > N"):
        radial_ball_frequency(2.0, math.inf, N=2)
    with pytest.raises(ValueError, match="p > N"):
        principal_frequency(_square(), 2.0, math.inf)


def test_square_dirichlet_eigenvalue():
    rep = principal_frequency(_square(1 / 32), 2.0, 2.0)
    assert rep.route == "inverse_iteration"
    assert rep.constant == pytest.approx(2 * math.pi**2, rel=5e-3)
    assert rep.residuals["eigen_equation"] < 1e-3


def test_super_regime_is_labelled_upper_bound():
    rep = principal_frequency(_square(), 2.0, 3.0)
    assert rep.extra["bound"] == "upper bound only"
    assert rep.extra["monotone"]


def test_point_sup_route_on_square():
    rep = principal_frequency(_square(), 4.0, math.inf)
    assert rep.route == "point_sup"
    assert rep.extra["multiplicity"] == 1
    assert rep.extra["peak_point"] == (0.5, 0.5)
    assert rep.residuals["constraint"] == 0.0


def test_point_sup_reports_tied_peaks():
    rep = principal_frequency(rasterize(make_domain("annulus", R_in=0.3, R_out=1.0), 1 / 8), 4.0, math.inf)
    assert rep.extra["multiplicity"] >= 2


def test_lane_emden_identities():
    g = _square()
    rep = solve_lane_emden(g, 3.0, 1.0)
    assert rep.residuals["pqnorm"] < 1e-6 and rep.residuals["minprob"] < 1e-6
    w = rep.extremal.values
    assert w.min() >= 0 and w[g.interior].min() > 0
    with pytest.raises(ValueError, match="q < p"):
        solve_lane_emden(g, 2.0, 2.0)


def test_disconnected_grid_refused():
    g0 = _square()
    nc = g0.node_class.copy()
    nc[8, :] = BOUNDARY
    g = Grid(g0.origin, g0.h, g0.shape, nc, g0.domain)
    with pytest.raises(DomainConnectivityError, match="2 disconnected"):
        principal_frequency(g, 2.0, 2.0)
    with pytest.raises(DomainConnectivityError):
        solve_lane_emden(g, 2.0, 1.0)


def test_morrey_mu_below_omega():
    rep = morrey_mu(4.0, 2, 1 / 16)
    assert 0 < rep.constant <= math.pi
    assert rep.constant <= rep.extra["trial_energy"]
    assert morrey_sharp_bound(4.0, 2) == pytest.approx(talenti(4.0))


def test_hardy_constant_positive_and_exponent_guard():
    g = _square(1 / 8)
    d = distance_field(g.domain, g)
    rep = hardy_constant(g, d, 4.0, 4.0)
    assert rep.constant > 0
    with pytest.raises(ValueError, match="p <= q"):
        hardy_constant(g, d, 4.0, 2.0)
