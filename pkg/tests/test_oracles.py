import math

import pytest

from oracles import FROZEN, pi_pq_exact, slab_bound, talenti, torsion_ball_lambda21


@pytest.mark.parametrize("key", [k for k in FROZEN if k[0] == "pi"])
def test_pi_formula_matches_frozen(key):
    _, p, q = key
    assert pi_pq_exact(p, q) == pytest.approx(FROZEN[key], rel=1e-13)


def test_pi_special_values():
    assert pi_pq_exact(2.0, 1.0) == pytest.approx(math.sqrt(12.0), rel=1e-13)
    assert pi_pq_exact(2.0, 2.0) == pytest.approx(math.pi, rel=1e-13)
    # pi_p = 2 pi (p-1)^(1/p) / (p sin(pi/p))
    p = 4.0
    assert pi_pq_exact(p, p) == pytest.approx(2 * math.pi * (p - 1) ** (1 / p) / (p * math.sin(math.pi / p)), rel=1e-12)


def test_other_oracles():
    assert talenti(4.0) == pytest.approx(16 * math.pi / 27, rel=1e-14)
    assert talenti(8.0) == pytest.approx(FROZEN[("talenti", 8.0)], rel=1e-14)
    assert torsion_ball_lambda21(2) == pytest.approx(FROZEN[("torsion_ball", 2)], rel=1e-14)
    assert slab_bound(2.0, 1.0, 2, 1, math.sqrt(12.0)) == pytest.approx(13.5, rel=1e-14)
