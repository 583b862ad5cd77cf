import math
import random
from fractions import Fraction

import pytest

from classpoly import arith


def test_is_prime_small_table():
    sieve = [True] * 2000
    sieve[0] = sieve[1] = False
    for i in range(2, 45):
        for k in range(i * i, 2000, i):
            sieve[k] = False
    assert [n for n in range(2000) if arith.is_prime(n)] == [n for n in range(2000) if sieve[n]]


def test_is_prime_large():
    assert arith.is_prime(2**61 - 1)
    assert not arith.is_prime(2**61 + 1)
    assert not arith.is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_next_prime():
    assert arith.next_prime(1562200) == 1562207
    assert arith.next_prime(2) == 2  # smallest prime >= n
    assert arith.next_prime(24) == 29


@pytest.mark.parametrize("n", [1, 2, 360, 1063175, 2**32 + 1, 600851475143, 10007 * 10009])
def test_factorize_roundtrip(n):
    f = arith.factorize(n)
    assert all(arith.is_prime(q) for q in f)
    assert math.prod(q**e for q, e in f.items()) == n


def test_kronecker_agrees_with_euler_criterion():
    for p in (3, 5, 7, 11, 1562207):
        for a in range(-30, 30):
            want = 0 if a % p == 0 else (1 if pow(a, (p - 1) // 2, p) == 1 else -1)
            assert arith.legendre(a, p) == want
            assert arith.kronecker(a, p) == want


def test_sqrt_mod():
    rng = random.Random(4)
    for p in (3, 5, 13, 17, 41, 1562207, 2**61 - 1):
        for _ in range(20):
            a = rng.randrange(p)
            r = arith.sqrt_mod(a, p)
            if arith.legendre(a, p) == -1:
                assert r is None
            else:
                assert r * r % p == a


def test_crt_balanced_representative():
    primes = [1562207, 2744591, 4294607]
    for x in (0, 1, -1, 12345678901234, -98765432109876):
        assert arith.crt_reconstruct([(p, x % p) for p in primes]) == x


def test_crt_rejects_duplicate_prime():
    rs = arith.ResidueSystem([(7, 3)])
    with pytest.raises(ValueError):
        rs.add(7, 1)


def test_accumulator_vectors():
    primes = [101, 103, 107, 109]
    vals = [5, -7, 123456, -5000000]
    acc = arith.CRTAccumulator(len(vals))
    for p in primes:
        acc.add(p, [v % p for v in vals])
    assert acc.values() == vals
    assert acc.log_modulus() == pytest.approx(sum(map(math.log, primes)))


def test_height_and_log_int():
    assert arith.height([0, -5, 3]) == pytest.approx(math.log(5))
    assert arith.height([Fraction(0)]) == 0.0
    big = 3 ** 5000
    assert arith.log_int(big) == pytest.approx(5000 * math.log(3))


def _square(x):
    return x * x


def test_parallel_map_order_and_closures():
    offset = 3
    got = list(arith.parallel_map(lambda x: x + offset, range(10), jobs=2))
    assert got == [x + 3 for x in range(10)]
    assert list(arith.parallel_map(_square, range(5))) == [0, 1, 4, 9, 16]
