"""Multiprecision evaluation of modular forms and analytic class polynomials.

All evaluators accept a point ``z`` in the upper half-plane and a working
precision in bits.  Points are moved into the standard fundamental domain
before any q-series is summed, carrying the exact automorphy factors along,
so series converge at rate at least exp(-pi*sqrt(3)) per term.

Forms evaluated here: eta, E2 (holomorphic, quasimodular), E2*, E4, E6,
Delta, j, the weight -2 eta-quotient P on Gamma0(6), its image F_p under the
weight -2 raising operator, gamma, and the holomorphic pieces A-hat and B with
F_p = A-hat / (j (j - 1728)) + B * gamma.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import mpmath
from gmpy2 import mpz
from mpmath import mp, mpc, mpf

from . import qforms
from .qforms import QuadForm

GUARD_BITS = 64
ENGE_CONSTANT = 2114.567


class RoundingError(ArithmeticError):
    """A value that should be an integer is not one at the working precision."""


# -- fundamental domain ------------------------------------------------------

def _reduce(z):
    """Move z into the fundamental domain.

    Returns (w, shifts, inversions): w = final point, shifts the translations
    applied, inversions the points z1 at which z1 -> -1/z1 was applied.
    """
    z = mpc(z)
    if z.imag <= 0:
        raise ValueError("point not in the upper half-plane")
    shifts, inversions = [], []
    one = mpf(1) - mpf(2) ** (-mp.prec + 8)
    for _ in range(10000):
        n = int(mpmath.floor(z.real + mpf(0.5)))
        if n:
            z -= n
            shifts.append(n)
        if z.real ** 2 + z.imag ** 2 < one:
            inversions.append(z)
            z = -1 / z
        else:
            return z, shifts, inversions
    raise RuntimeError("fundamental-domain reduction did not terminate")


def _terms_needed(w) -> int:
    """Number of q-series terms for full working precision at a reduced point."""
    return int(mp.prec * math.log(2) / (2 * math.pi * float(w.imag))) + 4


@lru_cache(maxsize=8)
def _sigma_table(k: int, n: int) -> tuple[int, ...]:
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        dk = d ** k
        for m in range(d, n + 1, d):
            s[m] += dk
    return tuple(s)


def _lambert(w, k: int):
    """sum_{n >= 1} sigma_k(n) q^n at a reduced point w."""
    n = _terms_needed(w)
    n = 1 << max(4, (n - 1).bit_length())  # share sigma tables between calls
    sig = _sigma_table(k, n)
    q = mpmath.expjpi(2 * w)
    acc = mpc(0)
    for m in range(n, 0, -1):
        acc = (acc + sig[m]) * q
    return acc


def _pow(z, n: int):
    """z**n by repeated squaring (mpc ** int can detour through log/exp)."""
    out = None
    while n:
        if n & 1:
            out = z if out is None else out * z
        n >>= 1
        if n:
            z = z * z
    return out


def _eta_reduced(w):
    """eta at a reduced point via the pentagonal-number series."""
    q = mpmath.expjpi(2 * w)
    limit = _terms_needed(w)
    total = mpc(1)
    # terms (-1)^k (q^{k(3k-1)/2} + q^{k(3k+1)/2})
    a = mpc(1)  # q^{k(3k-1)/2}
    qk = mpc(1)  # q^k
    q3 = q * q * q
    q3k1 = q  # q^{3k+1} for k = 0
    k = 0
    while True:
        a *= q3k1  # now q^{(k+1)(3k+2)/2}
        k += 1
        qk *= q
        q3k1 *= q3
        if k * (3 * k - 1) // 2 > limit:
            break
        term = a + a * qk
        total += -term if k % 2 else term
    return mpmath.expjpi(w / 12) * total


# -- evaluators ----------------------------------------------------------------

def _with_prec(prec: int | None):
    return mp.workprec((prec or mp.prec) + 16)


def eval_eta(z, prec: int | None = None):
    with _with_prec(prec):
        w, shifts, inversions = _reduce(z)
        factor = mpmath.expjpi(mpf(sum(shifts)) / 12)
        for z1 in inversions:
            factor /= mpmath.sqrt(mpc(0, -1) * z1)
        return +(factor * _eta_reduced(w))


def eval_delta(z, prec: int | None = None):
    with _with_prec(prec):
        return +_pow(eval_eta(z), 24)


def _weight_factor(inversions, k: int):
    f = mpc(1)
    for z1 in inversions:
        f *= z1
    return f ** (-k)


def eval_E4(z, prec: int | None = None):
    with _with_prec(prec):
        w, _, inv = _reduce(z)
        return +((1 + 240 * _lambert(w, 3)) * _weight_factor(inv, 4))


def eval_E6(z, prec: int | None = None):
    with _with_prec(prec):
        w, _, inv = _reduce(z)
        return +((1 - 504 * _lambert(w, 5)) * _weight_factor(inv, 6))


def eval_E2star(z, prec: int | None = None):
    with _with_prec(prec):
        w, _, inv = _reduce(z)
        e2 = 1 - 24 * _lambert(w, 1)
        return +((e2 - 3 / (mp.pi * w.imag)) * _weight_factor(inv, 2))


def eval_E2(z, prec: int | None = None):
    with _with_prec(prec):
        z = mpc(z)
        return +(eval_E2star(z) + 3 / (mp.pi * z.imag))


def eval_j(z, prec: int | None = None):
    """j via the eta quotient u = (eta(2w)/eta(w))^24, j = (1 + 256u)^3 / u."""
    with _with_prec(prec):
        w, _, _ = _reduce(z)
        u = _pow(eval_eta(2 * w) / _eta_reduced(w), 24)
        return +(_pow(1 + 256 * u, 3) / u)


def eval_gamma(z, prec: int | None = None):
    """gamma = E4 E2* / (6 E6 j) - (7j - 6912) / (6 j (j - 1728))."""
    with _with_prec(prec):
        w, _, _ = _reduce(z)
        j = eval_j(w)
        e6 = eval_E6(w)
        tol = mpf(2) ** (-mp.prec // 2)
        if abs(j) < tol * 1728 or abs(j - 1728) < tol * 1728 or abs(e6) < tol:
            raise ZeroDivisionError("gamma evaluated too close to a pole")
        return +(eval_E4(w) * eval_E2star(w) / (6 * e6 * j) - (7 * j - 6912) / (6 * j * (j - 1728)))


_LEVEL6 = ((1, 1), (2, -2), (3, -3), (6, 6))  # (k, c_k) in the E2 combination


def _level6_data(z):
    """E2(kz), E4(kz) and eta(kz) for k in 1, 2, 3, 6."""
    out = {}
    for k, _ in _LEVEL6:
        kz = k * z
        out[k] = (eval_E2(kz), eval_E4(kz), eval_eta(kz))
    return out


def _P_and_DP(z):
    """P(z) and q dP/dq via Ramanujan's derivative identities."""
    data = _level6_data(z)
    N = sum(c * data[k][0] for k, c in _LEVEL6) / 2
    DN = sum(c * k * (data[k][0] ** 2 - data[k][1]) / 12 for k, c in _LEVEL6) / 2
    den = mpc(1)
    dlog = mpc(0)
    for k, _ in _LEVEL6:
        den *= data[k][2]
        dlog += k * data[k][0] / 12
    den = den ** 2
    P = N / den
    return P, DN / den - P * dlog


def eval_P(z, prec: int | None = None):
    """Weight -2 form on Gamma0(6) with expansion q^-1 - 10 - 29q + ..."""
    with _with_prec(prec):
        return +_P_and_DP(mpc(z))[0]


def eval_Fp(z, prec: int | None = None):
    """F_p = -q dP/dq - P / (2 pi Im z)."""
    with _with_prec(prec):
        z = mpc(z)
        P, DP = _P_and_DP(z)
        return +(-DP - P / (2 * mp.pi * z.imag))


def eval_AB(z, prec: int | None = None):
    """(A-hat(z), B(z)) with F_p = A-hat / (j (j - 1728)) + B * gamma."""
    with _with_prec(prec):
        z = mpc(z)
        P, DP = _P_and_DP(z)
        j = eval_j(z)
        e4, e6 = eval_E4(z), eval_E6(z)
        delta = eval_delta(z)
        e2 = eval_E2(z)
        r = e4 * e4 * e6 / delta
        B = P * r
        A = j * (j - 1728) * (-DP - P * e2 / 6) + P * (7 * j - 6912) * r / 6
        return +A, +B


# -- polynomial helpers (floating point) -------------------------------------

def _poly_from_roots(roots) -> list:
    """Low-to-high coefficients of prod (x - r)."""
    c = [mpc(1)]
    for r in roots:
        nxt = [mpc(0)] * (len(c) + 1)
        for i, a in enumerate(c):
            nxt[i + 1] += a
            nxt[i] -= a * r
        c = nxt
    return c


def _newton_interpolate(xs, ys) -> list:
    """Coefficients (low-to-high) of the polynomial of degree < n through (xs, ys)."""
    n = len(xs)
    coef = list(ys)
    for k in range(1, n):
        for i in range(n - 1, k - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - k])
    poly = [coef[n - 1]]
    for k in range(n - 2, -1, -1):
        nxt = [mpc(0)] * (len(poly) + 1)
        for i, a in enumerate(poly):
            nxt[i + 1] += a
            nxt[i] -= a * xs[k]
        nxt[0] += coef[k]
        poly = nxt
    return poly


def _round_integer(x, scale: int = 1) -> int:
    """Round scale * x to an integer, insisting on a residual below 2^-32."""
    v = mpc(x) * scale
    r = mpmath.nint(v.real)
    if abs(v.real - r) > mpf(2) ** -32 or abs(v.imag) > mpf(2) ** -32:
        raise RoundingError(f"value {mpmath.nstr(v, 15)} is not integral")
    return int(r)


def _escalate(compute: Callable[[int], object], start_bits: int, max_bits: int = 1 << 20):
    """Run compute(prec) at increasing precision until it stops raising RoundingError."""
    prec = max(start_bits, 64) + GUARD_BITS
    while True:
        try:
            with mp.workprec(prec):
                return compute(prec)
        except RoundingError:
            if prec > max_bits:
                raise
            prec *= 2


# -- height bounds -----------------------------------------------------------

def bound_M(D: int) -> float:
    """Bound on log|j(alpha_Q)| for forms of discriminant D."""
    return math.log(math.exp(math.pi * math.sqrt(-D)) + ENGE_CONSTANT) if -D < 200000 else \
        math.pi * math.sqrt(-D)


def bound_Bj(D: int) -> float:
    """Bound on ht(H_D): sum over reduced forms of log(1 + max|j(alpha_Q)|).

    |j(z) - 1/q| <= 2114.567 on the fundamental domain, and the height of a
    monic polynomial is at most log prod (1 + |root|).
    """
    s = math.pi * math.sqrt(-D)
    total = 0.0
    for f in qforms.primitive_reduced_forms(D):
        x = s / f.a
        total += x + math.log1p((ENGE_CONSTANT + 1) * math.exp(-x))
    return total


# -- integer polynomial products (fixed point) ---------------------------------

def _pack(xs: Sequence[int], bits: int):
    """sum x_i 2^(bits i), by halving so the cost stays quasi-linear."""
    if len(xs) == 1:
        return mpz(xs[0])
    k = len(xs) // 2
    return _pack(xs[:k], bits) + (_pack(xs[k:], bits) << (bits * k))


def _unpack(C, n: int, bits: int, out: list[int]) -> None:
    """Inverse of _pack for coefficients of absolute value below 2^(bits-1)."""
    if n == 1:
        out.append(int(C))
        return
    k = n // 2
    w = bits * k
    low = C & ((mpz(1) << w) - 1)
    if low >> (w - 1):
        low -= mpz(1) << w
    _unpack(low, k, bits, out)
    _unpack((C - low) >> w, n - k, bits, out)


def _zmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of integer polynomials by Kronecker substitution."""
    if not a or not b:
        return []
    if min(len(a), len(b)) < 8:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    bits = max(abs(x).bit_length() for x in a) + max(abs(y).bit_length() for y in b) \
        + min(len(a), len(b)).bit_length() + 2
    out: list[int] = []
    _unpack(_pack(a, bits) * _pack(b, bits), len(a) + len(b) - 1, bits, out)
    return out


def _fixed_product(polys: list[list[int]], s: int) -> list[int]:
    """Product of fixed-point polynomials (scale 2^s) by a product tree."""
    while len(polys) > 1:
        nxt = []
        for i in range(0, len(polys) - 1, 2):
            c = _zmul(polys[i], polys[i + 1])
            nxt.append([(x + (1 << (s - 1))) >> s for x in c])
        if len(polys) % 2:
            nxt.append(polys[-1])
        polys = nxt
    return polys[0]


def _to_fixed(x, s: int) -> int:
    return int(mpmath.nint(mpmath.ldexp(x, s)))


def _round_fixed(c: int, s: int) -> int:
    r = (c + (1 << (s - 1))) >> s
    if abs(c - (r << s)) > (1 << (s - 32)):
        raise RoundingError("fixed-point coefficient not integral")
    return r


def hilbert_analytic(D: int) -> list[int]:
    """H_D as integer coefficients, low-to-high, from j at reduced-form roots."""
    qforms.check_discriminant(D)
    forms = qforms.primitive_reduced_forms(D)
    sqrtD = None
    bound_bits = int(bound_Bj(D) / math.log(2)) + len(forms).bit_length()

    def compute(prec):
        nonlocal sqrtD
        s = prec
        sqrtD = mpmath.sqrt(mpf(-D))
        polys = []
        for f in forms:
            if f.b < 0:
                continue  # paired with [a, -b, c]
            j = eval_j(mpc(mpf(-f.b) / (2 * f.a), sqrtD / (2 * f.a)))
            ambiguous = f.b == 0 or f.b == f.a or f.a == f.c
            if ambiguous:
                polys.append([_to_fixed(-j.real, s), 1 << s])
            else:
                polys.append([_to_fixed(j.real ** 2 + j.imag ** 2, s),
                              _to_fixed(-2 * j.real, s), 1 << s])
        prod = _fixed_product(polys, s)
        return [_round_fixed(c, s) for c in prod]

    return _escalate(compute, bound_bits)


# -- modular polynomial oracle ------------------------------------------------

def isogeny_matrices(m: int) -> list[tuple[int, int, int]]:
    """(a, b, d) with ad = m, 0 <= b < d, gcd(a, b, d) = 1."""
    out = []
    for a in range(1, m + 1):
        if m % a:
            continue
        d = m // a
        for b in range(d):
            if math.gcd(math.gcd(a, b), d) == 1:
                out.append((a, b, d))
    return out


def _circle_nodes(n: int, y: float = 1.2):
    """Points z_k with j(z_k) spread around a circle (good interpolation nodes)."""
    return [mpc(mpf(k) / n - mpf(0.5) + mpf(0.5) / n, y) for k in range(n)]


def _interpolate_in_j(n_nodes: int, coeff_fn, deg_x: int) -> list[list]:
    """Interpolate each X-coefficient of a polynomial whose coefficients are polynomials in J.

    coeff_fn(z) returns the low-to-high X-coefficients at z.  Result [k][i] is
    the coefficient of X^k J^i as an mpc.
    """
    zs = _circle_nodes(n_nodes)
    js = [eval_j(z) for z in zs]
    cols = [coeff_fn(z) for z in zs]
    return [_newton_interpolate(js, [c[k] for c in cols]) for k in range(deg_x + 1)]


def phi_analytic_oracle(m: int, cap: int = 30) -> dict[tuple[int, int], int]:
    """Phi_m over Z as a sparse dict {(i, k): coeff} for X^i Y^k (i, k <= psi(m))."""
    if m < 2 or m > cap:
        raise ValueError(f"oracle supports 2 <= m <= {cap}")
    mats = isogeny_matrices(m)
    psi = len(mats)
    from .modpoly import height_bound_phi

    start = int(height_bound_phi(m) / math.log(2)) + psi * 12

    def compute(prec):
        def coeffs(z):
            return _poly_from_roots([eval_j((a * z + b) / d) for a, b, d in mats])

        table = _interpolate_in_j(psi + 1, coeffs, psi)
        out = {}
        for k, poly in enumerate(table):
            for i, c in enumerate(poly):
                v = _round_integer(c)
                if v:
                    out[(i, k)] = v
        for (i, k), v in out.items():
            if out.get((k, i)) != v:
                raise RoundingError("oracle output not symmetric")
        return out

    return _escalate(compute, start)


# -- level 6 ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def gamma0_6_cosets() -> tuple[tuple[int, int, int, int], ...]:
    """Right coset representatives of Gamma0(6) in SL2(Z), indexed by P^1(Z/6)."""
    classes = {}
    for c in range(6):
        for d in range(6):
            if math.gcd(math.gcd(c, d), 6) != 1:
                continue
            key = min(((u * c) % 6, (u * d) % 6) for u in (1, 5))
            classes.setdefault(key, (c, d))
    out = []
    for c0, d0 in sorted(classes):
        c, d = _coprime_lift(c0, d0)
        # a d - b c = 1
        g, x, y = _egcd(d, c)
        a, b = x, -y
        assert a * d - b * c == 1
        out.append((a, b, c, d))
    return tuple(out)


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _coprime_lift(c: int, d: int) -> tuple[int, int]:
    for s in range(6):
        for t in range(6):
            cc, dd = c + 6 * s, d + 6 * t
            if math.gcd(cc, dd) == 1:
                return cc, dd
    raise AssertionError("no coprime lift")


def _apply(g, z):
    a, b, c, d = g
    return (a * z + b) / (c * z + d)


def _psi_coeffs(which: int):
    def coeffs(z):
        vals = [eval_AB(_apply(g, z))[which] for g in gamma0_6_cosets()]
        return _poly_from_roots(vals)
    return coeffs


@lru_cache(maxsize=None)
def psi_polynomials() -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], int]]:
    """(Psi_A, Psi_B) as sparse dicts {(k, i): coeff} for X^k J^i."""

    def build(which):
        def compute(prec):
            table = _interpolate_in_j(41, _psi_coeffs(which), 12)
            out = {}
            for k, poly in enumerate(table):
                for i, c in enumerate(poly):
                    v = _round_integer(c)
                    if v:
                        out[(k, i)] = v
            return out
        return _escalate(compute, 512)

    return build(0), build(1)


def psi_degrees(psi: dict[tuple[int, int], int]) -> tuple[int, int]:
    return max(k for k, _ in psi), max(i for _, i in psi)


# -- K-field class polynomials ---------------------------------------------------

def heegner_point(Q: QuadForm):
    D = Q.disc
    return mpc(mpf(-Q.b) / (2 * Q.a), mpmath.sqrt(mpf(-D)) / (2 * Q.a))


def kfield_class_poly(which: str, D: int) -> list[tuple[Fraction, Fraction]]:
    """H_D(g; x) for g = A-hat ('A') or B ('B'); coefficient k is (u, v) meaning u + v*Delta.

    Delta = +i sqrt|D|.  u and v are halves of integers.
    """
    idx = {"A": 0, "B": 1}[which]
    reps = qforms.heegner_reps_level6(D)
    start = int(bound_Bj(D) * 2 / math.log(2)) + 256

    def compute(prec):
        vals = [eval_AB(heegner_point(Q))[idx] for Q in reps]
        poly = _poly_from_roots(vals)
        root = mpmath.sqrt(mpf(-D))
        out = []
        for c in poly:
            u2 = _round_integer(c.real, 2)
            v2 = _round_integer(c.imag / root, 2)
            out.append((Fraction(u2, 2), Fraction(v2, 2)))
        return out

    return _escalate(compute, start)


def partition_poly_oracle(n: int, cap: int = 10) -> list[Fraction]:
    """prod (x - F_p(alpha_Q)) over all level-6 Heegner forms of discriminant 1 - 24n."""
    if n < 1 or n > cap:
        raise ValueError(f"oracle supports 1 <= n <= {cap}")
    D = 1 - 24 * n
    reps = qforms.heegner_reps_level6(D, primitive=False)
    scale = (-D) ** len(reps)
    from .partition import bound_BP

    start = int(bound_BP(D, safety=1.0) * 2 / math.log(2)) + 256

    def compute(prec):
        vals = [eval_Fp(heegner_point(Q)) for Q in reps]
        poly = _poly_from_roots(vals)
        return [Fraction(_round_integer(c, scale), scale) for c in poly]

    return _escalate(compute, start)


def class_poly_values(fn: Callable, D: int, prec: int) -> list:
    """Values of a level-1 function at the reduced-form roots of discriminant D."""
    with mp.workprec(prec):
        return [fn(heegner_point(f)) for f in qforms.primitive_reduced_forms(D)]
