from collections import Counter
from fractions import Fraction

import pytest

from classpoly import analytic, partition as pt, qforms
from classpoly.arith import sqrt_mod
from classpoly.modpoly import PrimeRejected
from classpoly.paperdata import PARTITION_TABLE


@pytest.fixture(scope="module")
def setup23(ctx):
    return pt.PSetup(-23, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(-23), psi=ctx.psi())


def _entries(setup, k):
    from classpoly import gammapoly
    src = gammapoly.prime_stream(setup.gamma)
    return [next(src) for _ in range(k)]


def test_pentagonal_pn():
    assert [pt.pentagonal_pn(n) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
    assert pt.pentagonal_pn(24) == 1575
    assert pt.pentagonal_pn(100) == 190569292
    assert pt.pentagonal_pn(-1) == 0


def test_epsilon():
    assert [pt.epsilon(u) for u in (1, 5, 7, 11, 13, 25, 35)] == [1, -1, -1, 1, 1, 1, 1]


def test_partition_discs():
    assert pt.partition_discs(1) == [(1, -23)]
    assert pt.partition_discs(24) == [(1, -575), (5, -23)]


def test_assemble_sign_twist():
    H = [Fraction(2), Fraction(3), Fraction(1)]  # x^2 + 3x + 2
    assert pt.assemble([(1, H)]) == H
    # eps(5) = -1: (-1)^2 * H(-x) = x^2 - 3x + 2
    assert pt.assemble([(5, H)]) == [2, -3, 1]


def test_assemble_product():
    lin = [Fraction(-1), Fraction(1)]
    # (x - 1) * (-1) * (-x - 1) = (x - 1)(x + 1)
    assert pt.assemble([(1, lin), (5, lin)]) == [-1, 0, 1]


def test_bad_partition_disc():
    for D in (-7, -24, 25):
        with pytest.raises(qforms.DiscriminantError):
            pt.check_partition_disc(D)


def test_both_square_roots_give_the_same_polynomial(setup23):
    for entry in _entries(setup23, 3):
        r = sqrt_mod(-23 % entry.p, entry.p)
        a = pt.trace_at_prime(setup23, entry, r)
        b = pt.trace_at_prime(setup23, entry, entry.p - r)
        assert a.f == b.f
        assert sorted(a.P) == sorted(b.P)


def test_trace_values_are_roots_of_their_polynomials(setup23):
    from classpoly import fppoly as fp
    for entry in _entries(setup23, 2):
        tr = pt.trace_at_prime(setup23, entry)
        p = tr.p
        for j, a, b in zip(tr.j, tr.a_hat, tr.b):
            assert fp.peval(pt.psi_at(setup23.psiA, j, p), a, p) == 0
            assert fp.peval(pt.psi_at(setup23.psiB, j, p), b, p) == 0
            assert fp.peval(setup23.kA.reduce(tr.root, p), a, p) == 0
            assert fp.peval(setup23.kB.reduce(tr.root, p), b, p) == 0


def test_combo36_accepts_true_value_and_rejects_others(setup23):
    entry = _entries(setup23, 1)[0]
    tr = pt.trace_at_prime(setup23, entry)
    p = tr.p
    for j, g, P in zip(tr.j, tr.gamma, tr.P):
        A, B = pt.psi_at(setup23.psiA, j, p), pt.psi_at(setup23.psiB, j, p)
        counts = pt.combo36_counts(p, j, g, A, B)
        assert sum(counts.values()) == 36
        assert pt.combo36_pattern_ok(counts, P, p)
        # negative controls: a wrong claim, and a corrupted gamma
        wrong = next(v for v in counts if v != P)
        assert not pt.combo36_pattern_ok(counts, wrong, p)
        assert not pt.combo36_pattern_ok(counts, (P + 1) % p, p)
        assert not pt.combo36_validate(p, j, (g + 1) % p, A, B, P)


def test_combo36_pattern_rules():
    p = 101
    pm = Counter({5: 2, 96: 2, **{v: 1 for v in range(10, 42)}})
    assert pt.combo36_pattern_ok(pm, 5, p, rule="pm")
    assert not pt.combo36_pattern_ok(pm, 5, p, rule="unique")
    uniq = Counter({5: 2, **{v: 1 for v in range(10, 44)}})
    assert pt.combo36_pattern_ok(uniq, 5, p)
    with pytest.raises(ValueError):
        pt.combo36_pattern_ok(uniq, 5, p, rule="other")


def test_combo36_needs_six_roots():
    with pytest.raises(PrimeRejected):
        pt.combo36_counts(101, 3, 4, [1, 1], [1, 1])


def test_kfield_polys_reduce_consistently():
    A, B = pt.kfield_polys(-23)
    assert len(A.coeffs) == 4 and A.coeffs[-1] == (1, 0)
    assert A.denominators() | B.denominators() <= {1, 2}


@pytest.mark.parametrize("n", [1, 2])
def test_partition_poly_small(ctx, n):
    res = pt.partition_poly(n, class_poly=ctx.class_poly_P)
    assert res.coeffs == PARTITION_TABLE[n]
    assert res.pn == pt.pentagonal_pn(n)
    assert res.coeffs == analytic.partition_poly_oracle(n)
    for r in res.factors.values():
        assert r.measured_height() <= r.bound


def test_class_poly_P_jobs_and_validation_agree(ctx):
    base = ctx.class_poly_P(-23)
    setup = pt.PSetup(-23, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(-23), psi=ctx.psi())
    again = pt.class_poly_P(-23, setup=setup, jobs=2, validate=True)
    assert again.coeffs == base.coeffs
    assert again.primes == base.primes
