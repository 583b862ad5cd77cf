import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from classpoly import analytic, partition


def _close(a, b, tol=1e-30):
    return abs(a - b) <= tol * max(1, abs(b))


def test_j_at_cm_points():
    with mp.workprec(200):
        assert _close(analytic.eval_j(mpc(0, 1)), 1728)
        assert abs(analytic.eval_j(mpc(-0.5, mpmath.sqrt(3) / 2))) < 1e-40
        assert _close(analytic.eval_j(mpc(-0.5, mpmath.sqrt(7) / 2)), -3375)
        assert _close(analytic.eval_j(mpc(-0.5, mpmath.sqrt(163) / 2)), -640320**3)


def test_j_is_modular():
    with mp.workprec(200):
        z = mpc(mpf("0.123"), mpf("0.87"))
        assert _close(analytic.eval_j(z + 1), analytic.eval_j(z))
        assert _close(analytic.eval_j(-1 / z), analytic.eval_j(z))


def test_E2star_is_weight_two():
    with mp.workprec(200):
        z = mpc(mpf("0.31"), mpf("1.4"))
        assert _close(analytic.eval_E2star(-1 / z), z * z * analytic.eval_E2star(z))


def test_delta_is_weight_twelve():
    with mp.workprec(200):
        z = mpc(mpf("0.2"), mpf("0.9"))
        assert _close(analytic.eval_delta(-1 / z), z**12 * analytic.eval_delta(z))
        assert _close(analytic.eval_E4(z) ** 3 - analytic.eval_E6(z) ** 2, 1728 * analytic.eval_delta(z))


@pytest.mark.parametrize("D,H", [
    (-23, [12771880859375, -5151296875, 3491750, 1]),
    (-15, [-121287375, 191025, 1]),
    (-20, [-681472000, -1264000, 1]),
])
def test_hilbert(D, H):
    assert analytic.hilbert_analytic(D) == H


def test_bound_Bj_dominates_height():
    for D in (-23, -71, -479, -2783):
        H = analytic.hilbert_analytic(D)
        assert max(math.log(abs(c)) for c in H if c) <= analytic.bound_Bj(D)


def test_isogeny_matrices_count_is_psi():
    from classpoly.modpoly import psi
    for m in (2, 3, 4, 6, 12, 25):
        assert len(analytic.isogeny_matrices(m)) == psi(m)


def test_phi2_oracle_matches_table():
    from classpoly.modpoly import phi2
    assert analytic.phi_analytic_oracle(2) == phi2()


def test_gamma0_6_cosets():
    cos = analytic.gamma0_6_cosets()
    assert len(cos) == 12
    assert all(a * d - b * c == 1 for a, b, c, d in cos)


def test_partition_oracle_trace_gives_pn():
    for n in (1, 2, 3):
        H = analytic.partition_poly_oracle(n)
        assert -H[-2] / (24 * n - 1) == partition.pentagonal_pn(n)
