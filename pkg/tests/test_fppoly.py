import random

import pytest

from classpoly import fppoly as fp

P = 1562207


def _rand_poly(rng, deg, p=P):
    return fp.normalize([rng.randrange(p) for _ in range(deg)] + [rng.randrange(1, p)])


def _naive_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] = (out[i + k] + x * y) % p
    return fp.normalize(out)


def test_mul_divmod():
    rng = random.Random(1)
    for _ in range(30):
        a, b = _rand_poly(rng, rng.randrange(0, 60)), _rand_poly(rng, rng.randrange(0, 40))
        assert fp.pmul(a, b, P) == _naive_mul(a, b, P)
        q, r = fp.pdivmod(a, b, P)
        assert len(r) < len(b)
        assert fp.padd(fp.pmul(q, b, P), r, P) == fp.normalize(list(a))


def test_gcd_of_products():
    rng = random.Random(2)
    g = fp.from_roots([5, 17, 99], P)
    a = fp.pmul(g, fp.from_roots([1, 2], P), P)
    b = fp.pmul(g, fp.from_roots([3, 4, 7], P), P)
    assert fp.pmonic(fp.pgcd(a, b, P), P) == g


def test_roots_split_with_multiplicity():
    f = fp.from_roots([3, 3, 10, 700000, 1562206], P)
    f = fp.pmul(f, [1, 0, 1], P)  # x^2 + 1 has no roots for p = 3 mod 4
    assert fp.roots_split(f, P) == [3, 3, 10, 700000, 1562206]
    assert fp.distinct_roots(f, P) == [3, 10, 700000, 1562206]


def test_roots_of_zero_constant():
    assert fp.distinct_roots([0, 0, 1], 101) == [0]


def test_taylor_linear_coefficient_is_derivative():
    rng = random.Random(3)
    for _ in range(20):
        a = _rand_poly(rng, 15)
        c = rng.randrange(P)
        t = fp.taylor_coeffs(a, c, P, 3)
        assert t[0] == fp.peval(a, c, P)
        assert t[1] == fp.peval(fp.pderiv(a, P), c, P)
        assert fp.taylor_shift(a, c, P)[:3] == t


def test_interpolate_and_multipoint():
    rng = random.Random(5)
    f = _rand_poly(rng, 20)
    pts = rng.sample(range(P), 21)
    vals = fp.multipoint_eval(f, pts, P)
    assert vals == [fp.peval(f, x, P) for x in pts]
    assert fp.interpolate(pts, vals, P) == f


def test_from_roots_vieta():
    f = fp.from_roots([2, 3], 101)
    assert f == [6, 101 - 5, 1]


@pytest.mark.parametrize("p", [101, 1562207, 351513837131])
def test_pure_and_compiled_root_finders_agree(monkeypatch, p):
    rng = random.Random(p)
    for _ in range(10):
        rs = [rng.randrange(p) for _ in range(rng.randrange(1, 26))]
        rs += rs[:2]  # repeated roots
        f = fp.pmul(fp.from_roots(rs, p), [1, 0, 1] if p % 4 == 3 else [2, 0, 0, 1], p)
        fast = (fp.roots_split(f, p), fp.distinct_roots(f, p))
        monkeypatch.setattr(fp, "USE_FLINT", False)
        slow = (fp.roots_split(f, p), fp.distinct_roots(f, p))
        monkeypatch.undo()
        assert fast == slow
        assert set(rs) <= set(fast[1])
