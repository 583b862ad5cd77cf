import random

import pytest

from classpoly import analytic, fppoly as fp, modpoly


@pytest.mark.parametrize("m,d", [(2, 3), (3, 4), (4, 6), (6, 12), (23, 24), (575, 720)])
def test_psi(m, d):
    assert modpoly.psi(m) == d


def test_suitable_primes_satisfy_definition():
    disc = -2783
    for _, e in zip(range(10), modpoly.suitable_primes(23, disc)):
        assert modpoly.is_suitable_prime(23, disc, e.p, e.t, e.v)


@pytest.mark.parametrize("m", [3, 5, 7])
def test_phi_lift_against_analytic_oracle(m):
    got = modpoly.phi_lift(m, hilbert_fn=analytic.hilbert_analytic)
    assert got == analytic.phi_analytic_oracle(m)
    assert modpoly.is_symmetric(got)
    assert modpoly.degrees(got) == (m + 1, m + 1)


def test_phi_mod_p_point_value_form():
    m = 5
    Z = analytic.phi_analytic_oracle(m)
    disc = modpoly.suitable_order(m)
    H = analytic.hilbert_analytic(disc)
    entry = next(modpoly.suitable_primes(m, disc))
    P = modpoly.phi_mod_p(m, entry, disc, H, modpoly.small_polys(m, modpoly.phi_lift))
    p = entry.p
    assert P.to_dict() == modpoly.reduce_dict(Z, p)
    rng = random.Random(1)
    for _ in range(5):
        x, y = rng.randrange(p), rng.randrange(p)
        want = sum(c * pow(x, i, p) * pow(y, k, p) for (i, k), c in Z.items()) % p
        assert P.evaluate(x, y) == want


def test_height_bound_is_an_upper_bound():
    import math
    for m in (3, 4, 6):
        phi = modpoly.phi_lift(m)
        assert max(math.log(abs(c)) for c in phi.values()) <= modpoly.height_bound_phi(m)
