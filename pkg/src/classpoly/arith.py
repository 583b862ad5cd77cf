"""Exact integer helpers: primality, square roots mod p, balanced CRT."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

# Deterministic Miller-Rabin bases; sufficient for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_LIMIT = 3317044064679887385961981


def _strong_probable_prime(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, 64 random rounds above."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_LIMIT:
        bases = _MR_BASES
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(64)]
    return all(_strong_probable_prime(n, a, d, s) for a in bases)


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


def factorize(n: int) -> dict[int, int]:
    """Trial division followed by Pollard rho; fine for the sizes used here."""
    n = abs(n)
    out: dict[int, int] = {}
    for q in (2, 3, 5):
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    q = 7
    while q * q <= n and q < 10000:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return dict(sorted(out.items()))


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def kronecker(a: int, n: int) -> int:
    return int(gmpy2.kronecker(a, n))


def sqrt_mod(a: int, p: int) -> int | None:
    """Tonelli-Shanks. Returns min(r, p - r), or None for a non-residue."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


class ResidueSystem:
    """Residues x mod p_i for pairwise distinct primes, combined by CRT.

    The combination is incremental, so residues may be appended one prime at
    a time; the product of the moduli is cached.
    """

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        self.primes: list[int] = []
        self.residues: list[int] = []
        self._value = 0
        self.modulus = 1
        for p, r in pairs:
            self.add(p, r)

    def add(self, p: int, r: int) -> None:
        if p in self.primes:
            raise ValueError(f"duplicate prime {p} in residue system")
        r %= p
        self.primes.append(p)
        self.residues.append(r)
        M = self.modulus
        k = (r - self._value) * pow(M, -1, p) % p
        self._value += k * M
        self.modulus = M * p

    def __len__(self) -> int:
        return len(self.primes)

    def value(self) -> int:
        """Balanced representative in (-M/2, M/2]."""
        x = self._value
        if 2 * x > self.modulus:
            x -= self.modulus
        return x


def crt_reconstruct(rs: ResidueSystem | Sequence[tuple[int, int]]) -> int:
    if not isinstance(rs, ResidueSystem):
        rs = ResidueSystem(rs)
    return rs.value()


class CRTAccumulator:
    """Coefficient-wise CRT for a fixed-length vector of integers.

    Used for polynomial coefficients; each prime contributes one residue vector.
    """

    def __init__(self, length: int):
        self.length = length
        self.primes: list[int] = []
        self.modulus = 1
        self._values = [0] * length

    def add(self, p: int, residues: Sequence[int]) -> None:
        if len(residues) != self.length:
            raise ValueError("residue vector has wrong length")
        if p in self.primes:
            raise ValueError(f"duplicate prime {p} in residue system")
        M = self.modulus
        inv = pow(M % p, -1, p)
        vals = self._values
        for i, r in enumerate(residues):
            k = (r - vals[i]) * inv % p
            if k:
                vals[i] += k * M
        self.primes.append(p)
        self.modulus = M * p

    def log_modulus(self) -> float:
        return sum(math.log(p) for p in self.primes)

    def values(self) -> list[int]:
        M = self.modulus
        half = M // 2
        return [x - M if x > half else x for x in self._values]


def height(coeffs: Iterable[int | Fraction]) -> float:
    """log of the largest absolute value of the integers given (0 for all-zero)."""
    m = max((abs(int(c)) for c in coeffs), default=0)
    return math.log(m) if m else 0.0


def log_int(n: int) -> float:
    """Natural log of a possibly huge positive integer."""
    n = abs(n)
    b = n.bit_length()
    if b < 1000:
        return math.log(n)
    shift = b - 60
    return math.log(n >> shift) + shift * math.log(2)


_WORKER_FN = None


def _call_worker(item):
    return _WORKER_FN(item)


def parallel_map(fn, items, jobs: int = 1):
    """Yield fn(item) for each item, in input order.

    With jobs > 1 the calls run in a forked process pool, so fn may be a
    closure; items and results must be picklable.  Items are pulled lazily,
    a bounded number ahead of the results consumed so far.
    """
    global _WORKER_FN
    if jobs <= 1:
        for item in items:
            yield fn(item)
        return
    import multiprocessing
    from collections import deque
    from concurrent.futures import ProcessPoolExecutor

    _WORKER_FN = fn
    ctx = multiprocessing.get_context("fork")
    it = iter(items)
    with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
        pending: deque = deque()
        for item in it:
            pending.append(pool.submit(_call_worker, item))
            if len(pending) >= jobs:
                break
        while pending:
            yield pending.popleft().result()
            for item in it:
                pending.append(pool.submit(_call_worker, item))
                break


def batch_inverse(xs: Sequence[int], p: int) -> list[int]:
    """Inverses of all xs mod p with a single modular exponentiation."""
    n = len(xs)
    pre = [1] * (n + 1)
    for i, x in enumerate(xs):
        pre[i + 1] = pre[i] * x % p
    if pre[n] == 0:
        raise ZeroDivisionError("batch inverse of zero")
    inv = pow(pre[n], -1, p)
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = inv * pre[i] % p
        inv = inv * xs[i] % p
    return out
