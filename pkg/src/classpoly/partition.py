"""Partition class polynomials H_n^part(x) and partition numbers from their traces."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import fppoly as fp
from . import gammapoly, qforms
from .analytic import bound_Bj, kfield_class_poly, psi_polynomials
from .arith import height, sqrt_mod
from .modpoly import PlanEntry, PrimeRejected

DEFAULT_SAFETY = 1.25


@lru_cache(maxsize=None)
def _pn_table(n: int) -> tuple[int, ...]:
    p = [1] + [0] * n
    for m in range(1, n + 1):
        total, k = 0, 1
        while True:
            g1 = k * (3 * k - 1) // 2
            if g1 > m:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[m - g1]
            g2 = g1 + k
            if g2 <= m:
                total += sign * p[m - g2]
            k += 1
        p[m] = total
    return tuple(p)


def pentagonal_pn(n: int) -> int:
    """p(n) by Euler's pentagonal-number recurrence."""
    if n < 0:
        return 0
    return _pn_table(n)[n]


def bound_BP(D: int, safety: float = DEFAULT_SAFETY) -> float:
    """(7/3) B_j(D) + h(D) log|D|, times a safety factor."""
    return safety * (7 / 3 * bound_Bj(D) + qforms.class_number(D) * math.log(-D))


def check_partition_disc(D: int) -> None:
    if D >= 0 or D % 24 != 1:
        raise qforms.DiscriminantError(f"{D} is not a negative discriminant = 1 mod 24")


# -- K-field polynomials ------------------------------------------------------------

@dataclass(frozen=True)
class KQuadPoly:
    """Polynomial over Q(Delta), Delta^2 = D; coefficient k is u_k + v_k Delta (low-to-high)."""

    D: int
    coeffs: tuple[tuple[Fraction, Fraction], ...]

    def denominators(self) -> set[int]:
        return {c.denominator for pair in self.coeffs for c in pair}

    def reduce(self, root: int, p: int) -> list[int]:
        """Image mod p under Delta -> root (root^2 = D mod p)."""
        out = []
        for u, v in self.coeffs:
            val = u.numerator * pow(u.denominator, -1, p) + v.numerator * pow(v.denominator, -1, p) * root
            out.append(val % p)
        return fp.normalize(out)


@lru_cache(maxsize=None)
def kfield_polys(D: int) -> tuple[KQuadPoly, KQuadPoly]:
    """(H_D(A-hat; x), H_D(B; x)) over Q(sqrt D)."""
    return (KQuadPoly(D, tuple(kfield_class_poly("A", D))),
            KQuadPoly(D, tuple(kfield_class_poly("B", D))))


def psi_at(psi: dict[tuple[int, int], int], j: int, p: int) -> list[int]:
    """Psi(x, j) mod p as a polynomial in x (low-to-high)."""
    deg = max(k for k, _ in psi)
    out = [0] * (deg + 1)
    for (k, i), c in psi.items():
        out[k] = (out[k] + c * pow(j, i, p)) % p
    return fp.normalize(out)


def _unique_common_root(a: Sequence[int], b: Sequence[int], p: int, what: str) -> int:
    g = fp.pgcd(a, b, p)
    if len(g) != 2:
        raise PrimeRejected(f"gcd for {what} has degree {len(g) - 1}")
    return (-g[0]) * pow(g[1], -1, p) % p


# -- per-prime pipeline ---------------------------------------------------------------

@dataclass
class PrimeTrace:
    """Everything computed at one prime, root by root."""

    p: int
    root: int
    j: list[int]
    gamma: list[int]
    a_hat: list[int]
    b: list[int]
    P: list[int]
    f: list[int]


class PSetup:
    """Prime-independent data for H_D(P; x)."""

    def __init__(self, D: int, *, hilbert_fn=None, lift_fn=None, kfield=None, psi=None):
        check_partition_disc(D)
        self.D = D
        self.kA, self.kB = kfield or kfield_polys(D)
        self.psiA, self.psiB = psi or psi_polynomials()
        bad = 1
        for d in self.kA.denominators() | self.kB.denominators():
            bad *= d
        self.bad = bad

        def keep(p: int) -> bool:
            return p % 12 == 11 and D % p != 0 and bad % p != 0

        self.gamma = gammapoly.make_setup(D, hilbert_fn=hilbert_fn, lift_fn=lift_fn, prime_filter=keep)

    @property
    def h(self) -> int:
        return len(self.gamma.hilbert_D) - 1


def trace_at_prime(setup: PSetup, entry: PlanEntry, root: int | None = None) -> PrimeTrace:
    """Run the per-prime pipeline; ``root`` picks the square root of D used for Delta."""
    p = entry.p
    D = setup.D
    js, _, gammas = gammapoly.gamma_values_mod_p(setup.gamma, entry)
    if root is None:
        root = sqrt_mod(D % p, p)
        if root is None:
            raise PrimeRejected("D is not a square mod p")
    hA = setup.kA.reduce(root, p)
    hB = setup.kB.reduce(root, p)
    a_hat, bs, Ps = [], [], []
    for j, g in zip(js, gammas):
        a = _unique_common_root(psi_at(setup.psiA, j, p), hA, p, "A-hat")
        b = _unique_common_root(psi_at(setup.psiB, j, p), hB, p, "B")
        P = (a * pow(j * (j - 1728) % p, -1, p) + b * g) % p
        a_hat.append(a)
        bs.append(b)
        Ps.append(P)
    scale = pow(-D, len(js), p)
    f = fp.pscale(fp.from_roots(Ps, p), scale, p)
    f = f + [0] * (len(js) + 1 - len(f))
    return PrimeTrace(p, root, js, gammas, a_hat, bs, Ps, f)


def combo36_counts(p: int, j: int, gamma: int, psiA_at_j: Sequence[int],
                   psiB_at_j: Sequence[int]) -> Counter:
    """Multiset of the 36 values s/(j(j-1728)) + t*gamma over F_p-roots s, t of Psi_A, Psi_B."""
    s_roots = fp.distinct_roots(psiA_at_j, p)
    t_roots = fp.distinct_roots(psiB_at_j, p)
    if len(s_roots) != 6 or len(t_roots) != 6:
        raise PrimeRejected(f"Psi roots in F_p: {len(s_roots)}, {len(t_roots)} (want 6, 6)")
    inv = pow(j * (j - 1728) % p, -1, p)
    return Counter((s * inv + t * gamma) % p for s in s_roots for t in t_roots)


def combo36_pattern_ok(counts: Counter, claimed: int, p: int, rule: str = "unique") -> bool:
    """Does the multiset of candidates certify ``claimed``?

    rule "unique": claimed occurs exactly twice and every other value once
    (35 distinct values), which is what occurs in practice.
    rule "pm": the literal pattern of 32 singletons plus the pair
    {claimed, -claimed}, each twice.
    """
    repeated = {v: c for v, c in counts.items() if c > 1}
    singles = sum(1 for c in counts.values() if c == 1)
    if rule == "unique":
        return repeated == {claimed % p: 2} and singles == 34
    if rule == "pm":
        return singles == 32 and repeated == {claimed % p: 2, -claimed % p: 2}
    raise ValueError(f"unknown rule {rule!r}")


def combo36_validate(p: int, j: int, gamma: int, psiA_at_j: Sequence[int], psiB_at_j: Sequence[int],
                     claimed: int, rule: str = "unique") -> bool:
    """Cross-check P_k against all 36 root combinations; PrimeRejected on wrong root counts."""
    counts = combo36_counts(p, j, gamma, psiA_at_j, psiB_at_j)
    return combo36_pattern_ok(counts, claimed, p, rule)


# -- Algorithm 3, one discriminant --------------------------------------------------------

@dataclass
class PResult:
    D: int
    coeffs: list[Fraction]
    numerators: list[int]
    bound: float
    primes: list[int] = field(default_factory=list)
    rejected: list = field(default_factory=list)

    def measured_height(self) -> float:
        return height(self.numerators)


def class_poly_P(D: int, *, setup: PSetup | None = None, jobs: int = 1, log=None,
                 safety: float = DEFAULT_SAFETY, validate: bool = False) -> PResult:
    """H_{D,1}(P; x) in Q[x], low-to-high; |D|^h times it is integral."""
    setup = setup or PSetup(D)

    def per_prime(_st, entry: PlanEntry) -> list[int]:
        tr = trace_at_prime(setup, entry)
        if validate:
            for j, g, P in zip(tr.j, tr.gamma, tr.P):
                ok = combo36_validate(tr.p, j, g, psi_at(setup.psiA, j, tr.p),
                                      psi_at(setup.psiB, j, tr.p), P)
                if not ok:
                    raise PrimeRejected("36-combination pattern not as expected")
        return tr.f

    bound = bound_BP(D, safety)
    rejected: list = []
    acc = gammapoly.crt_run(setup.gamma, per_prime, setup.h + 1, bound, jobs, log, rejected)
    nums = acc.values()
    scale = (-D) ** setup.h
    return PResult(D, [Fraction(c, scale) for c in nums], nums, bound, acc.primes, rejected)


# -- assembly ---------------------------------------------------------------------------

def epsilon(u: int) -> int:
    return 1 if u % 12 in (1, 11) else -1


def _substitute_sign(coeffs: Sequence[Fraction], sign: int) -> list[Fraction]:
    """Coefficients of H(sign * x)."""
    return [c * sign ** k for k, c in enumerate(coeffs)]


def _qmul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for k, y in enumerate(b):
            out[i + k] += x * y
    return out


@dataclass
class PartitionResult:
    n: int
    coeffs: list[Fraction]
    pn: int
    factors: dict[int, PResult]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def trace(self) -> Fraction:
        return -self.coeffs[-2]


def partition_discs(n: int) -> list[tuple[int, int]]:
    """[(u, D/u^2)] for u | v where 1 - 24n = v^2 D0."""
    D = 1 - 24 * n
    D0, v = qforms.fundamental_decomposition(D)
    return [(u, D // (u * u)) for u in range(1, v + 1) if v % u == 0]


def assemble(parts: Sequence[tuple[int, Sequence[Fraction]]]) -> list[Fraction]:
    """prod_u eps(u)^deg * H_u(eps(u) x)."""
    out = [Fraction(1)]
    for u, coeffs in parts:
        e = epsilon(u)
        h = len(coeffs) - 1
        factor = [c * e ** h for c in _substitute_sign(coeffs, e)]
        out = _qmul(out, factor)
    return out


def partition_poly(n: int, *, jobs: int = 1, log=None, safety: float = DEFAULT_SAFETY,
                   class_poly=None) -> PartitionResult:
    """H_n^part(x) (low-to-high) and p(n) = trace / (24n - 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    class_poly = class_poly or (lambda d: class_poly_P(d, jobs=jobs, log=log, safety=safety))
    factors = {}
    parts = []
    for u, d in partition_discs(n):
        res = class_poly(d)
        factors[d] = res
        parts.append((u, res.coeffs))
    coeffs = assemble(parts)
    tr = -coeffs[-2]
    pn = tr / (24 * n - 1)
    if pn.denominator != 1:
        raise ArithmeticError(f"trace {tr} not divisible by {24 * n - 1}")
    return PartitionResult(n, coeffs, int(pn), factors)
