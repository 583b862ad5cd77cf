"""Dense univariate polynomials over a prime field F_p.

Coefficient lists are stored low-to-high and kept normalised (no trailing
zeros; the zero polynomial is the empty list).  The module-level functions
work on raw lists, which is what the hot loops elsewhere use; ``FpPoly`` is a
thin value wrapper around them.

Products of large operands go through Kronecker substitution so that the
big-integer multiply (GMP) does the work.
"""

from __future__ import annotations

import hashlib
import random
from typing import Iterable, Sequence

import gmpy2

try:  # compiled root finding when FLINT is available; the pure path below is the reference
    import flint
except ImportError:  # pragma: no cover
    flint = None

_KRONECKER_THRESHOLD = 48
USE_FLINT = flint is not None


def normalize(a: list[int]) -> list[int]:
    while a and not a[-1]:
        a.pop()
    return a


def padd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return normalize(out)


def psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % p
    return normalize(out)


def pscale(a: Sequence[int], c: int, p: int) -> list[int]:
    c %= p
    if not c:
        return []
    return [x * c % p for x in a]


def _pack(a: Sequence[int], w: int) -> int:
    return int.from_bytes(b"".join(x.to_bytes(w, "little") for x in a), "little")


def _kronecker_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = len(a) + len(b) - 1
    bits = 2 * p.bit_length() + min(len(a), len(b)).bit_length() + 1
    w = (bits + 7) // 8
    prod = gmpy2.mpz(_pack(a, w)) * gmpy2.mpz(_pack(b, w))
    raw = int(prod).to_bytes(w * n + w, "little")
    return normalize([int.from_bytes(raw[i * w:(i + 1) * w], "little") % p for i in range(n)])


def pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) >= _KRONECKER_THRESHOLD:
        return _kronecker_mul(a, b, p)
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return normalize([c % p for c in out])


def pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) <= db:
        return [], normalize(a)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] % p
        if c:
            c = c * inv % p
            q[k - db] = c
            off = k - db
            for i in range(db):
                a[off + i] -= c * b[i]
        a[k] = 0
    r = [x % p for x in a[:db]]
    return normalize(q), normalize(r)


def pmod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    return pdivmod(a, b, p)[1]


def pmonic(a: Sequence[int], p: int) -> list[int]:
    if not a:
        return []
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = normalize(list(a)), normalize(list(b))
    while b:
        a, b = b, pmod(a, b, p)
    return pmonic(a, p)


def pderiv(a: Sequence[int], p: int) -> list[int]:
    return normalize([i * a[i] % p for i in range(1, len(a))])


def peval(a: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def taylor_shift(a: Sequence[int], c: int, p: int) -> list[int]:
    """Coefficients of a(Y + c)."""
    out = list(a)
    n = len(out)
    c %= p
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            out[k] = (out[k] + c * out[k + 1]) % p
    return normalize(out)


def taylor_coeffs(a: Sequence[int], c: int, p: int, k: int) -> list[int]:
    """First k coefficients of a(Y + c), i.e. a^(i)(c)/i! for i < k."""
    out = []
    cur = list(a)
    for _ in range(k):
        q, r = _synthetic_div(cur, c, p)
        out.append(r)
        cur = q
    return out


def _synthetic_div(a: Sequence[int], c: int, p: int) -> tuple[list[int], int]:
    """Divide by (Y - c): returns quotient and remainder a(c)."""
    if not a:
        return [], 0
    n = len(a)
    q = [0] * (n - 1)
    acc = a[-1]
    for i in range(n - 2, -1, -1):
        q[i] = acc
        acc = (acc * c + a[i]) % p
    return q, acc


class Reducer:
    """Repeated reduction modulo a fixed monic polynomial via a precomputed inverse."""

    def __init__(self, f: Sequence[int], p: int):
        self.f = pmonic(f, p)
        self.p = p
        self.n = len(self.f) - 1
        self._fast = self.n >= _KRONECKER_THRESHOLD
        if self._fast:
            # inverse of reversed f modulo Y^n, by Newton iteration
            rev = self.f[::-1]
            inv = [1]
            k = 1
            while k < self.n:
                k = min(2 * k, self.n)
                t = pmul(inv, rev[:k], p)[:k]
                t = [(-x) % p for x in t] + [0] * (k - len(t))
                t[0] = (t[0] + 2) % p
                inv = pmul(inv, t, p)[:k]
            self.inv = inv
            self.frev = rev

    def reduce(self, a: Sequence[int]) -> list[int]:
        p, n = self.p, self.n
        if len(a) <= n:
            return normalize(list(a))
        if not self._fast or len(a) > 2 * n + 1:
            return pmod(a, self.f, p)
        m = len(a) - 1 - n
        arev = list(a[::-1][: m + 1])
        q = pmul(arev, self.inv[: m + 1], p)[: m + 1]
        q = q + [0] * (m + 1 - len(q))
        q = q[::-1]
        qf = pmul(q, self.f, p)
        return normalize([(a[i] - (qf[i] if i < len(qf) else 0)) % p for i in range(n)])

    def mulmod(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        return self.reduce(pmul(a, b, self.p))

    def powmod(self, a: Sequence[int], e: int) -> list[int]:
        result = [1]
        base = self.reduce(a)
        for bit in bin(e)[2:]:
            result = self.mulmod(result, result)
            if bit == "1":
                result = self.mulmod(result, base)
        return result


def _rng_for(f: Sequence[int], p: int) -> random.Random:
    h = hashlib.sha256(repr((p, list(f))).encode()).digest()
    return random.Random(int.from_bytes(h[:8], "little"))


def _split_distinct_linear(g: list[int], p: int, rng: random.Random, out: list[int]) -> None:
    """g monic, squarefree, product of distinct linear factors."""
    d = len(g) - 1
    if d == 0:
        return
    if d == 1:
        out.append((-g[0]) % p)
        return
    if d == 2:
        b, c = g[1], g[0]
        disc = (b * b - 4 * c) % p
        from .arith import sqrt_mod

        s = sqrt_mod(disc, p)
        if s is not None:
            inv2 = (p + 1) // 2
            out.append((-b + s) * inv2 % p)
            out.append((-b - s) * inv2 % p)
            return
    red = Reducer(g, p)
    while True:
        a = rng.randrange(p)
        h = red.powmod([a, 1], (p - 1) // 2)
        h = psub(h, [1], p)
        u = pgcd(g, h, p)
        if 0 < len(u) - 1 < d:
            break
    v = pdivmod(g, u, p)[0]
    _split_distinct_linear(u, p, rng, out)
    _split_distinct_linear(pmonic(v, p), p, rng, out)


def _flint_roots(f: Sequence[int], p: int):
    if not USE_FLINT or p >= 1 << 63 or len(f) < 3:
        return None
    return [(int(r), e) for r, e in flint.nmod_poly(list(f), p).roots()]


def distinct_roots(f: Sequence[int], p: int) -> list[int]:
    """Distinct roots of f in F_p, sorted."""
    f = normalize([c % p for c in f])
    fast = _flint_roots(f, p)
    if fast is not None:
        return sorted(r for r, _ in fast)
    f = pmonic(f, p)
    if len(f) <= 1:
        return []
    out: list[int] = []
    if f[0] == 0:
        out.append(0)
        k = 0
        while f[k] == 0:
            k += 1
        f = f[k:]
    if len(f) > 1:
        red = Reducer(f, p)
        xp = red.powmod([0, 1], p)
        g = pgcd(f, psub(xp, [0, 1], p), p)
        _split_distinct_linear(g, p, _rng_for(f, p), out)
    return sorted(set(out))


def roots_split(f: Sequence[int], p: int) -> list[int]:
    """Roots of f in F_p with multiplicity, sorted ascending."""
    f = normalize([c % p for c in f])
    fast = _flint_roots(f, p)
    if fast is not None:
        return sorted(r for r, e in fast for _ in range(e))
    f = pmonic(f, p)
    out = []
    for r in distinct_roots(f, p):
        cur = f
        while True:
            q, rem = _synthetic_div(cur, r, p)
            if rem:
                break
            out.append(r)
            cur = q
    return sorted(out)


def from_roots(roots: Sequence[int], p: int) -> list[int]:
    """prod (x - r) via a product tree."""
    layer = [[(-r) % p, 1] for r in roots]
    if not layer:
        return [1]
    while len(layer) > 1:
        nxt = [pmul(layer[i], layer[i + 1], p) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def multipoint_eval(f: Sequence[int], points: Iterable[int], p: int) -> list[int]:
    return [peval(f, x, p) for x in points]


def lagrange_weights(points: Sequence[int], p: int) -> list[int]:
    """1 / prod_{j != i} (x_i - x_j) for each node."""
    out = []
    for i, xi in enumerate(points):
        d = 1
        for j, xj in enumerate(points):
            if i != j:
                d = d * (xi - xj) % p
        if d == 0:
            raise ValueError("repeated interpolation node")
        out.append(pow(d, -1, p))
    return out


def interpolate(points: Sequence[int], values: Sequence[int], p: int) -> list[int]:
    """Unique polynomial of degree < len(points) through the given values."""
    if len(points) != len(values):
        raise ValueError("points and values differ in length")
    if len(set(x % p for x in points)) != len(points):
        raise ValueError("repeated interpolation node")
    W = from_roots(points, p)
    wts = lagrange_weights(points, p)
    n = len(points)
    out = [0] * n
    for xi, yi, wi in zip(points, values, wts):
        c = yi * wi % p
        if not c:
            continue
        q, _ = _synthetic_div(W, xi, p)
        for k, qk in enumerate(q):
            out[k] += c * qk
    return normalize([x % p for x in out])


class FpPoly:
    """Polynomial over F_p with value semantics."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs: Iterable[int], p: int):
        self.p = p
        self.coeffs = normalize([c % p for c in coeffs])

    @classmethod
    def from_roots(cls, roots: Sequence[int], p: int) -> "FpPoly":
        return cls(from_roots(roots, p), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, FpPoly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, tuple(self.coeffs)))

    def __repr__(self) -> str:
        return f"FpPoly({self.coeffs}, p={self.p})"

    def _wrap(self, c: list[int]) -> "FpPoly":
        out = FpPoly.__new__(FpPoly)
        out.p, out.coeffs = self.p, c
        return out

    def _coerce(self, other) -> list[int]:
        if isinstance(other, FpPoly):
            if other.p != self.p:
                raise ValueError("moduli differ")
            return other.coeffs
        return normalize([other % self.p])

    def __add__(self, other):
        return self._wrap(padd(self.coeffs, self._coerce(other), self.p))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(psub(self.coeffs, self._coerce(other), self.p))

    def __neg__(self):
        return self._wrap(pscale(self.coeffs, -1, self.p))

    def __mul__(self, other):
        return self._wrap(pmul(self.coeffs, self._coerce(other), self.p))

    __rmul__ = __mul__

    def __divmod__(self, other):
        q, r = pdivmod(self.coeffs, self._coerce(other), self.p)
        return self._wrap(q), self._wrap(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x: int) -> int:
        return peval(self.coeffs, x, self.p)

    def gcd(self, other: "FpPoly") -> "FpPoly":
        return self._wrap(pgcd(self.coeffs, other.coeffs, self.p))

    def monic(self) -> "FpPoly":
        return self._wrap(pmonic(self.coeffs, self.p))

    def derivative(self) -> "FpPoly":
        return self._wrap(pderiv(self.coeffs, self.p))

    def taylor_shift(self, c: int) -> "FpPoly":
        return self._wrap(taylor_shift(self.coeffs, c, self.p))

    def roots(self) -> list[int]:
        return roots_split(self.coeffs, self.p)

    def multipoint_eval(self, points: Iterable[int]) -> list[int]:
        return multipoint_eval(self.coeffs, points, self.p)

    @classmethod
    def interpolate(cls, points: Sequence[int], values: Sequence[int], p: int) -> "FpPoly":
        return cls(interpolate(points, values, p), p)


def roots_of(f: FpPoly) -> list[int]:
    return f.roots()
