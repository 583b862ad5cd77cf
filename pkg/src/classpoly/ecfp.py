"""Elliptic curves y^2 = x^3 + A x + B over F_p and their rational isogenies.

Points are affine pairs ``(x, y)``; ``None`` is the point at infinity.
Isogenous j-invariants come from Velu's formulas applied to kernel
polynomials.  When the full l-torsion is rational on the curve or its twist,
kernels are read off a torsion basis; otherwise the l-division polynomial is
factored and its Galois-stable subgroups assembled.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from . import fppoly as fp
from .arith import batch_inverse, factorize, legendre, sqrt_mod


class SingularJError(ValueError):
    """j in {0, 1728}: these are excluded from the isogeny graphs used here."""


def nonresidue(p: int) -> int:
    d = 2
    while legendre(d, p) != -1:
        d += 1
    return d


@dataclass(frozen=True)
class Curve:
    p: int
    A: int
    B: int

    def __post_init__(self):
        if (4 * self.A ** 3 + 27 * self.B ** 2) % self.p == 0:
            raise ValueError("singular curve")

    @property
    def j(self) -> int:
        p = self.p
        a3 = 4 * pow(self.A, 3, p)
        return 1728 * a3 * pow((a3 + 27 * self.B * self.B) % p, -1, p) % p

    def rhs(self, x: int) -> int:
        return (x * x * x + self.A * x + self.B) % self.p

    def twist(self, d: int | None = None) -> "Curve":
        """Quadratic twist by a non-residue d (smallest one by default)."""
        p = self.p
        if d is None:
            d = nonresidue(p)
        return Curve(p, self.A * d * d % p, self.B * d * d * d % p)

    def random_point(self, rng: random.Random):
        p = self.p
        while True:
            x = rng.randrange(p)
            y = sqrt_mod(self.rhs(x), p)
            if y is None:
                continue
            if y and rng.random() < 0.5:
                y = p - y
            return (x, y)

    def points(self):
        """All affine points (tiny p only)."""
        p = self.p
        for x in range(p):
            y = sqrt_mod(self.rhs(x), p)
            if y is None:
                continue
            yield (x, y)
            if y:
                yield (x, p - y)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        p = self.p
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if (y1 + y2) % p == 0:
                return None
            lam = (3 * x1 * x1 + self.A) * pow(2 * y1, -1, p) % p
        else:
            lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
        x3 = (lam * lam - x1 - x2) % p
        return (x3, (lam * (x1 - x3) - y1) % p)

    def neg(self, P):
        return None if P is None else (P[0], (-P[1]) % self.p)

    def mul(self, n: int, P):
        """n * P using Jacobian coordinates with mixed additions."""
        if n < 0:
            n, P = -n, self.neg(P)
        if P is None or n == 0:
            return None
        p, A = self.p, self.A
        x2, y2 = P
        X, Y, Z = x2, y2, 1
        for bit in bin(n)[3:]:
            if Z == 0:
                pass
            elif Y == 0:
                Z = 0
            else:
                YY = Y * Y % p
                S = 4 * X * YY % p
                ZZ = Z * Z % p
                M = (3 * X * X + A * ZZ * ZZ) % p
                X3 = (M * M - 2 * S) % p
                Y, Z = (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p
                X = X3
            if bit == "1":
                if Z == 0:
                    X, Y, Z = x2, y2, 1
                    continue
                ZZ = Z * Z % p
                U2 = x2 * ZZ % p
                S2 = y2 * Z * ZZ % p
                H = (U2 - X) % p
                r = (S2 - Y) % p
                if H == 0:
                    if r == 0:
                        YY = Y * Y % p
                        S = 4 * X * YY % p
                        M = (3 * X * X + A * ZZ * ZZ) % p
                        X3 = (M * M - 2 * S) % p
                        Y, Z = (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p
                        X = X3
                    else:
                        Z = 0
                    continue
                HH = H * H % p
                HHH = H * HH % p
                V = X * HH % p
                X3 = (r * r - HHH - 2 * V) % p
                Y = (r * (V - X3) - Y * HHH) % p
                Z = Z * H % p
                X = X3
        if Z == 0:
            return None
        zi = pow(Z, -1, p)
        zi2 = zi * zi % p
        return (X * zi2 % p, Y * zi2 * zi % p)


def curve_from_j(j: int, p: int) -> Curve:
    """Curve with j-invariant j: A = 3k, B = 2k where k = j / (1728 - j)."""
    j %= p
    if j == 0 or j == 1728 % p:
        raise SingularJError(f"j = {j} is excluded")
    k = j * pow(1728 - j, -1, p) % p
    return Curve(p, 3 * k % p, 2 * k % p)


# -- point counting ---------------------------------------------------------

def naive_order(E: Curve) -> int:
    p = E.p
    n = 1
    for x in range(p):
        n += 1 + legendre(E.rhs(x), p)
    return n


def _orders_in_interval(E: Curve, P, lo: int, hi: int) -> list[int]:
    """All N in [lo, hi] with N*P = 0, by baby-step giant-step."""
    width = hi - lo
    m = math.isqrt(width) + 1
    baby = {}
    R = None
    for i in range(m):
        key = R
        baby.setdefault(key, []).append(i)
        R = E.add(R, P)
    # R = m*P
    step = E.neg(R)
    G = E.mul(lo, P)
    hits = []
    k = 0
    while k * m <= width:
        # G = (lo + k*m) * P; want (lo + k*m + i) * P = 0, i.e. i*P = -G
        target = E.neg(G)
        for i in baby.get(target, ()):
            N = lo + k * m + i
            if N <= hi:
                hits.append(N)
        G = E.add(G, R)
        k += 1
    del step
    return sorted(set(hits))


def curve_order(E: Curve, rng: random.Random | None = None) -> int:
    """#E(F_p) by naive counting for p <= 229, BSGS over the Hasse interval otherwise."""
    p = E.p
    if p <= 229:
        return naive_order(E)
    rng = rng or random.Random(p * 1000003 + E.A * 7 + E.B)
    s = math.isqrt(4 * p) + 1
    lo, hi = p + 1 - s, p + 1 + s
    twist = E.twist()
    cands = set(range(lo, hi + 1)) if False else None
    for _ in range(64):
        P = E.random_point(rng)
        hits = _orders_in_interval(E, P, lo, hi)
        cands = set(hits) if cands is None else cands & set(hits)
        # the twist has order 2p + 2 - N; use it to prune
        Q = twist.random_point(rng)
        keep = set()
        for N in cands:
            if twist.mul(2 * p + 2 - N, Q) is None:
                keep.add(N)
        cands = keep
        if len(cands) == 1:
            return cands.pop()
    raise RuntimeError("curve order ambiguous after 64 rounds")


def order_from_trace(E: Curve, t: int, rng: random.Random | None = None) -> int:
    """Decide between p + 1 - t and p + 1 + t for a curve known to have trace +-t."""
    p = E.p
    n1, n2 = p + 1 - t, p + 1 + t
    if n1 == n2:
        return n1
    rng = rng or random.Random(p ^ (E.A << 1) ^ E.B)
    for _ in range(40):
        P = E.random_point(rng)
        a = E.mul(n1, P) is None
        b = E.mul(n2, P) is None
        if a and not b:
            return n1
        if b and not a:
            return n2
    raise RuntimeError("could not decide curve order from trace")


# -- kernels and Velu -------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """Monic kernel polynomial (low-to-high coefficients) of a cyclic l-isogeny."""

    ell: int
    poly: tuple[int, ...]

    @classmethod
    def from_xs(cls, ell: int, xs: Sequence[int], p: int) -> "KernelSpec":
        return cls(ell, tuple(fp.from_roots(xs, p)))


def _power_sums(poly: Sequence[int], k: int, p: int) -> list[int]:
    """Power sums s_1..s_k of the roots of a monic polynomial (Newton identities)."""
    d = len(poly) - 1
    # e_i with poly = x^d - e1 x^{d-1} + e2 x^{d-2} - ...
    e = [1] + [(-1) ** i * poly[d - i] % p for i in range(1, d + 1)]
    s = [0] * (k + 1)
    for n in range(1, k + 1):
        acc = 0
        for i in range(1, min(n, d) + 1):
            term = e[i] * (s[n - i] if n - i > 0 else 0)
            acc += term if i % 2 else -term
        if n <= d:
            acc += (n if n % 2 else -n) * e[n]
        s[n] = acc % p
    return s


def velu_image(E: Curve, k: KernelSpec) -> Curve:
    p, A, B = E.p, E.A, E.B
    d = len(k.poly) - 1
    if k.ell == 2:
        if d != 1:
            raise ValueError("malformed 2-isogeny kernel")
        x0 = (-k.poly[0]) % p
        v = (3 * x0 * x0 + A) % p
        w = x0 * v % p
    else:
        if 2 * d != k.ell - 1:
            raise ValueError("kernel polynomial has the wrong degree")
        s = _power_sums(k.poly, 3, p)
        v = (6 * s[2] + 2 * A * d) % p
        w = (10 * s[3] + 6 * A * s[1] + 4 * B * d) % p
    return Curve(p, (A - 5 * v) % p, (B - 7 * w) % p)


def velu_image_j(E: Curve, k: KernelSpec) -> int:
    return velu_image(E, k).j


def velu_image_from_xs(E: Curve, xs: Sequence[int], two_torsion: Sequence[int] = ()) -> Curve:
    """Velu for a kernel given by the x-coordinates of one point from each pair +-Q.

    Works for any finite subgroup (cyclic or not); ``two_torsion`` lists
    x-coordinates of kernel points of order 2.
    """
    p, A, B = E.p, E.A, E.B
    v = w = 0
    for x in xs:
        gx = 3 * x * x + A
        v += 2 * gx
        w += 4 * (x * x * x + A * x + B) + 2 * x * gx
    for x in two_torsion:
        gx = 3 * x * x + A
        v += gx
        w += x * gx
    return Curve(p, (A - 5 * v) % p, (B - 7 * w) % p)


def _subgroup_xs(E: Curve, P, ell: int) -> list[int]:
    xs = []
    Q = P
    for _ in range((ell - 1) // 2):
        xs.append(Q[0])
        Q = E.add(Q, P)
    return xs


def point_of_order(E: Curve, ell: int, N: int, rng: random.Random, tries: int = 40):
    """A random point of exact order ell, given N = #E(F_p) divisible by ell."""
    e = 0
    c = N
    while c % ell == 0:
        c //= ell
        e += 1
    for _ in range(tries):
        Q = E.mul(c, E.random_point(rng))
        if Q is None:
            continue
        for _ in range(e):
            R = E.mul(ell, Q)
            if R is None:
                return Q
            Q = R
    return None


def _ell_order(E: Curve, P, ell: int) -> int:
    """k with P of order ell^k (P in the ell-Sylow subgroup)."""
    k = 0
    while P is not None:
        P = E.mul(ell, P)
        k += 1
    return k


def torsion_basis(E: Curve, ell: int, N: int, rng: random.Random, tries: int = 40):
    """Basis (P, Q) of E[ell] when it is fully rational, else None.

    With Sylow subgroup Z/ell^a x Z/ell^b (a <= b), random points mostly
    reduce into the cyclic ell-torsion of the larger factor, so the second
    generator is found by peeling multiples of an element X of maximal
    order off random Sylow elements.
    """
    if N % (ell * ell):
        return None
    c = N
    while c % ell == 0:
        c //= ell
    X, b = None, 0
    for _ in range(tries):
        R = E.mul(c, E.random_point(rng))
        k = _ell_order(E, R, ell)
        if k > b:
            X, b = R, k
    if X is None:
        return None
    P = E.mul(ell ** (b - 1), X)
    multiples = {}
    T = None
    for s_ in range(ell):
        multiples[T] = s_
        T = E.add(T, P)
    for _ in range(tries):
        Y = E.mul(c, E.random_point(rng))
        k = _ell_order(E, Y, ell)
        while k:
            Y1 = E.mul(ell ** (k - 1), Y)
            s_ = multiples.get(Y1)
            if s_ is None:
                return P, Y1
            Y = E.add(Y, E.neg(E.mul(s_ * ell ** (b - k), X)))
            k = _ell_order(E, Y, ell)
    return None


def cyclic_subgroups_xs(E: Curve, P, Q, ell: int) -> list[list[int]]:
    """Half-kernel x-coordinates of the ell + 1 cyclic subgroups of <P, Q> = E[ell].

    The generators are walked in lockstep so each step costs one batched
    inversion instead of ell + 1 separate ones.
    """
    gens = [P]
    R = Q
    for _ in range(ell):
        gens.append(R)
        R = E.add(R, P)
    if ell == 2:
        return [[g[0]] for g in gens]
    p, A = E.p, E.A
    out = [[g[0]] for g in gens]
    # first step doubles each generator
    lam = [(3 * x * x + A) * inv % p
           for (x, _), inv in zip(gens, batch_inverse([2 * y for _, y in gens], p))]
    cur = []
    for (x, y), l in zip(gens, lam):
        x3 = (l * l - 2 * x) % p
        cur.append((x3, (l * (x - x3) - y) % p))
    for step in range(2, (ell - 1) // 2 + 1):
        for o, c in zip(out, cur):
            o.append(c[0])
        if step == (ell - 1) // 2:
            break
        invs = batch_inverse([c[0] - g[0] for c, g in zip(cur, gens)], p)
        nxt = []
        for (x1, y1), (x2, y2), inv in zip(gens, cur, invs):
            l = (y2 - y1) * inv % p
            x3 = (l * l - x1 - x2) % p
            nxt.append((x3, (l * (x1 - x3) - y1) % p))
        cur = nxt
    return out


def _kernels_from_torsion(E: Curve, ell: int, N: int, rng: random.Random) -> list[KernelSpec] | None:
    basis = torsion_basis(E, ell, N, rng)
    if basis is None:
        return None
    p = E.p
    return [KernelSpec.from_xs(ell, xs, p) for xs in cyclic_subgroups_xs(E, *basis, ell)]


def ell_kernels(E: Curve, ell: int, order: int | None = None,
                rng: random.Random | None = None) -> list[KernelSpec]:
    """All F_p-rational kernels of cyclic ell-isogenies from E."""
    p = E.p
    if ell == p:
        raise ValueError("ell must differ from p")
    rng = rng or random.Random(p * 31 + E.A * 17 + E.B)
    if ell == 2:
        return [KernelSpec(2, ((-r) % p, 1)) for r in fp.distinct_roots([E.B, E.A, 0, 1], p)]
    N = order if order is not None else curve_order(E, rng)
    for curve, n, scale in ((E, N, 1), (None, 2 * p + 2 - N, None)):
        if n % (ell * ell):
            continue
        if curve is None:
            d = nonresidue(p)
            curve = E.twist(d)
            scale = pow(d, -1, p)
        ks = _kernels_from_torsion(curve, ell, n, rng)
        if ks is not None:
            if scale == 1:
                return ks
            # x on the twist is d times x on E
            out = []
            for k in ks:
                d_inv = scale
                h = len(k.poly) - 1
                # roots x' = d x  =>  poly_E(x) = poly_twist(d x) / d^h
                coeffs = [c * pow(d_inv, h - i, p) % p for i, c in enumerate(k.poly)]
                out.append(KernelSpec(ell, tuple(coeffs)))
            return out
    return kernels_from_division_polynomial(E, ell)


def ell_neighbor_js(E: Curve, ell: int, order: int | None = None,
                    rng: random.Random | None = None) -> list[int]:
    """Sorted j-invariants of the F_p-rational ell-isogenous curves of E.

    Same multiset as velu_image_j over ell_kernels, but the torsion path feeds
    subgroup x-coordinates straight into Velu instead of building kernel
    polynomials, and works on whichever of E and its twist has rational
    ell-torsion (twists have the same j-invariants).
    """
    p = E.p
    if ell == 2 or ell == p:
        return sorted(velu_image_j(E, k) for k in ell_kernels(E, ell, order, rng))
    rng = rng or random.Random(p * 31 + E.A * 17 + E.B)
    N = order if order is not None else curve_order(E, rng)
    for curve, n in ((E, N), (None, 2 * p + 2 - N)):
        if n % (ell * ell):
            continue
        curve = curve or E.twist()
        basis = torsion_basis(curve, ell, n, rng)
        if basis is not None:
            return sorted(velu_image_from_xs(curve, xs).j for xs in cyclic_subgroups_xs(curve, *basis, ell))
    return sorted(velu_image_j(E, k) for k in kernels_from_division_polynomial(E, ell))


def ell_neighbors(j: int, ell: int, p: int, order: int | None = None,
                  rng: random.Random | None = None) -> list[int]:
    """Multiset of j-invariants ell-isogenous to j over F_p."""
    return ell_neighbor_js(curve_from_j(j, p), ell, order, rng)


# -- division polynomials (fallback path) ------------------------------------

def division_polynomials(E: Curve, n: int) -> list[list[int]]:
    """h_0..h_n with psi_k = h_k (k odd) and psi_k = 2y h_k (k even)."""
    p, A, B = E.p, E.A, E.B
    F = [B % p, A % p, 0, 1]
    F2x16 = fp.pscale(fp.pmul(F, F, p), 16, p)
    h = [[], [1], [1],
         fp.normalize([(-A * A) % p, 12 * B % p, 6 * A % p, 0, 3]),
         fp.normalize([(-8 * B * B - A ** 3) * 2 % p, (-4 * A * B) * 2 % p, (-5 * A * A) * 2 % p,
                       20 * B * 2 % p, 5 * A * 2 % p, 0, 2])]
    mul = lambda a, b: fp.pmul(a, b, p)
    for k in range(5, n + 1):
        m = k // 2
        if k % 2:
            a = mul(h[m + 2], mul(h[m], mul(h[m], h[m])))
            b = mul(h[m - 1], mul(h[m + 1], mul(h[m + 1], h[m + 1])))
            if m % 2 == 0:
                h.append(fp.psub(mul(F2x16, a), b, p))
            else:
                h.append(fp.psub(a, mul(F2x16, b), p))
        else:
            a = mul(h[m + 2], mul(h[m - 1], h[m - 1]))
            b = mul(h[m - 2], mul(h[m + 1], h[m + 1]))
            h.append(mul(h[m], fp.psub(a, b, p)))
    return h[: n + 1]


class _Ext:
    """Arithmetic in F_p[t]/(g) for an irreducible g."""

    def __init__(self, g: list[int], p: int):
        self.g, self.p = fp.pmonic(g, p), p

    def mul(self, a, b):
        return fp.pmod(fp.pmul(a, b, self.p), self.g, self.p)

    def inv(self, a):
        p = self.p
        r0, r1 = self.g, fp.normalize(list(a))
        s0, s1 = [], [1]
        while len(r1) > 1:
            q, r = fp.pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, fp.psub(s0, fp.pmul(q, s1, p), p)
        if not r1:
            raise ZeroDivisionError
        return fp.pscale(s1, pow(r1[0], -1, p), p)


def _multiple_x(h, n: int, F: list[int], ext: _Ext, x: list[int]):
    """x([n] P) as an element of ext, where x(P) = x."""
    p = ext.p
    ev = lambda poly: fp.pmod(_compose(poly, x, ext), ext.g, p)
    Fx = ev(F)
    if n % 2:
        num = ext.mul(fp.pscale(Fx, 4, p), ext.mul(ev(h[n - 1]), ev(h[n + 1])))
        den = ext.mul(ev(h[n]), ev(h[n]))
    else:
        num = ext.mul(ev(h[n - 1]), ev(h[n + 1]))
        den = ext.mul(fp.pscale(Fx, 4, p), ext.mul(ev(h[n]), ev(h[n])))
    return fp.psub(x, ext.mul(num, ext.inv(den)), p)


def _compose(poly, x, ext: _Ext):
    acc: list[int] = []
    for c in reversed(poly):
        acc = fp.padd(ext.mul(acc, x) if acc else [], [c], ext.p)
    return acc


def _irreducible_factors(f: list[int], p: int) -> list[list[int]]:
    """Distinct irreducible factors of a squarefree-part of f (DDF + Cantor-Zassenhaus)."""
    f = fp.pmonic(f, p)
    fprime = fp.pderiv(f, p)
    g = fp.pgcd(f, fprime, p) if fprime else f
    sqf = fp.pdivmod(f, g, p)[0] if len(g) > 1 else f
    sqf = fp.pmonic(sqf, p)
    out = []
    rng = random.Random(p)
    h = [0, 1]
    d = 0
    cur = sqf
    while len(cur) > 1:
        d += 1
        if 2 * d > len(cur) - 1:
            out.append(cur)
            break
        red = fp.Reducer(cur, p)
        h = red.powmod(h, p)
        gd = fp.pgcd(cur, fp.psub(h, [0, 1], p), p)
        if len(gd) > 1:
            out.extend(_edf(gd, d, p, rng))
            cur = fp.pmonic(fp.pdivmod(cur, gd, p)[0], p)
            h = fp.pmod(h, cur, p) if len(cur) > 1 else h
    return out


def _edf(g: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    if len(g) - 1 == d:
        return [g]
    red = fp.Reducer(g, p)
    while True:
        a = [rng.randrange(p) for _ in range(len(g) - 1)]
        u = red.powmod(a, (p ** d - 1) // 2)
        u = fp.pgcd(g, fp.psub(u, [1], p), p)
        if 0 < len(u) - 1 < len(g) - 1:
            break
    v = fp.pmonic(fp.pdivmod(g, u, p)[0], p)
    return _edf(u, d, p, rng) + _edf(v, d, p, rng)


def kernels_from_division_polynomial(E: Curve, ell: int) -> list[KernelSpec]:
    """Rational kernels of cyclic ell-isogenies (odd ell) from the factorisation of psi_ell."""
    p = E.p
    half = (ell - 1) // 2
    h = division_polynomials(E, ell + 1)
    F = [E.B % p, E.A % p, 0, 1]
    found: set[tuple[int, ...]] = set()
    for g in _irreducible_factors(h[ell], p):
        e = len(g) - 1
        if half % e:
            continue
        ext = _Ext(g, p)
        x1 = [0, 1] if e > 1 else [(-g[0]) % p]
        xs = [x1] + [_multiple_x(h, k, F, ext, x1) for k in range(2, half + 1)]
        # kernel polynomial prod (X - x_k) with coefficients in ext
        poly = [[1]]
        for xk in xs:
            nxt = [[] for _ in range(len(poly) + 1)]
            for i, c in enumerate(poly):
                nxt[i + 1] = fp.padd(nxt[i + 1], c, p)
                nxt[i] = fp.psub(nxt[i], ext.mul(c, xk), p)
            poly = nxt
        if all(len(c) <= 1 for c in poly):
            found.add(tuple(c[0] if c else 0 for c in poly))
    return [KernelSpec(ell, k) for k in sorted(found)]
