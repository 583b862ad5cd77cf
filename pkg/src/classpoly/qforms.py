"""Binary quadratic forms, class numbers and Heegner-point representatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import factorize, kronecker


class DiscriminantError(ValueError):
    pass


def check_discriminant(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise DiscriminantError(f"{D} is not a negative discriminant")


@dataclass(frozen=True, order=True)
class QuadForm:
    """Positive definite form a X^2 + b XY + c Y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), self.c)

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def root(self):
        """(real part, imaginary part squared) of alpha_Q = (-b + sqrt(D)) / 2a as exact data.

        Returned as (-b/(2a), |D|/(4a^2)) with the first entry a Fraction.
        """
        from fractions import Fraction

        return Fraction(-self.b, 2 * self.a), Fraction(-self.disc, 4 * self.a * self.a)


def reduce_form(Q: QuadForm) -> QuadForm:
    """SL2(Z)-equivalent reduced form."""
    a, b, c = Q.a, Q.b, Q.c
    if b * b - 4 * a * c >= 0:
        raise DiscriminantError("form is not positive definite")
    if a < 0:
        raise DiscriminantError("form is negative definite")
    while True:
        # normalise b into (-a, a]
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


@lru_cache(maxsize=None)
def primitive_reduced_forms(D: int) -> tuple[QuadForm, ...]:
    """All primitive reduced forms of discriminant D, sorted by (a, b)."""
    check_discriminant(D)
    out = []
    a_max = math.isqrt(-D // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    out.sort(key=lambda f: (f.a, f.b))
    return tuple(out)


def class_number(D: int) -> int:
    return len(primitive_reduced_forms(D))


def hurwitz_class_number(D: int):
    """H(D) = sum of h(D/u^2) weighted by 1/2 for -4 and 1/3 for -3 orders."""
    from fractions import Fraction

    check_discriminant(D)
    total = Fraction(0)
    for u in range(1, math.isqrt(-D) + 1):
        if D % (u * u):
            continue
        d = D // (u * u)
        if d % 4 not in (0, 1):
            continue
        w = Fraction(1, 2) if d == -4 else Fraction(1, 3) if d == -3 else Fraction(1)
        total += w * class_number(d)
    return int(total) if total.denominator == 1 else total


def fundamental_decomposition(D: int) -> tuple[int, int]:
    """Write D = v^2 D0 with D0 a fundamental discriminant and v > 0."""
    check_discriminant(D)
    D0, v = -1, 1
    for q, e in factorize(-D).items():
        v *= q ** (e // 2)
        if e % 2:
            D0 *= q
    if D0 % 4 != 1:
        D0 *= 4
        v //= 2
    return D0, v


def conductor(D: int) -> int:
    return fundamental_decomposition(D)[1]


def class_number_of_suborder(D: int, f: int) -> int:
    """h(f^2 D) from h(D) by the standard index formula (D < -4)."""
    h = class_number(D)
    num = h * f
    den = 1
    for q in factorize(f):
        num *= q - kronecker(D, q)
        den *= q
    units = {-3: 3, -4: 2}.get(D, 1)
    return num // den // units


def reduced_forms_all(D: int) -> tuple[QuadForm, ...]:
    """Reduced forms of discriminant D of any content, sorted by (a, b)."""
    check_discriminant(D)
    out = []
    for u in range(1, math.isqrt(-D) + 1):
        if D % (u * u) or (D // (u * u)) % 4 not in (0, 1):
            continue
        out.extend(QuadForm(u * f.a, u * f.b, u * f.c) for f in primitive_reduced_forms(D // (u * u)))
    out.sort(key=lambda f: (f.a, f.b))
    return tuple(out)


def heegner_reps(D: int, N: int = 6, beta: int = 1, primitive: bool = True) -> list[QuadForm]:
    """One form [a, b, c] with N | a and b = beta (mod 2N) per SL2(Z)-class.

    Forms are ordered like primitive_reduced_forms(D); among the scanned
    candidates for a class the one with the smallest a (largest imaginary part
    of its root) is kept.
    """
    check_discriminant(D)
    if (beta * beta - D) % (4 * N):
        raise DiscriminantError(f"beta^2 != D mod 4N for D={D}, N={N}, beta={beta}")
    ordered = primitive_reduced_forms(D) if primitive else reduced_forms_all(D)
    targets = set(ordered)
    found: dict[QuadForm, QuadForm] = {}
    a = N
    # b ranges over the residue class beta mod 2N inside [-a, a]
    while len(found) < len(targets):
        for b in range(-a, a + 1):
            if (b - beta) % (2 * N):
                continue
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            Q = QuadForm(a, b, c)
            if primitive and Q.content() != 1:
                continue
            r = reduce_form(Q)
            if r in targets and r not in found:
                found[r] = Q
        a += N
        if a > 10**6:
            raise RuntimeError("Heegner representative scan did not terminate")
    return [found[r] for r in ordered]


def heegner_reps_level6(D: int, primitive: bool = True) -> list[QuadForm]:
    if D >= 0 or D % 24 != 1:
        raise DiscriminantError(f"{D} is not a negative discriminant = 1 mod 24")
    return heegner_reps(D, 6, 1, primitive)


def find_suitable_order(m: int, inside: int | None = None, *, require_coprime_conductor: bool = True,
                        cap: int = 10**5) -> int:
    """Discriminant D' = f^2 D_base with psi(m)+1 <= h(D') <= 3 psi(m).

    With ``inside`` given, D_base = inside and f runs over integers coprime to
    6*ell (ell the largest prime factor of m) in increasing order.  Without it,
    fundamental discriminants are scanned by increasing |D| (f = 1).  When
    ``require_coprime_conductor`` is set the conductor of D' must be prime to ell.
    """
    from .modpoly import psi

    ell = max(factorize(m))
    lo, hi = psi(m) + 1, 3 * psi(m)
    if inside is not None:
        check_discriminant(inside)
        if require_coprime_conductor and conductor(inside) % ell == 0:
            raise DiscriminantError(f"conductor of {inside} divisible by {ell}")
        for f in range(1, cap):
            if math.gcd(f, 6 * ell) != 1:
                continue
            if inside in (-3, -4) and f == 1:
                continue
            h = class_number(f * f * inside) if inside in (-3, -4) else class_number_of_suborder(inside, f)
            if lo <= h <= hi:
                return f * f * inside
        raise RuntimeError(f"no suitable order for m={m} inside {inside} below cap")
    for n in range(5, cap):
        D = -n
        if D % 4 not in (0, 1):
            continue
        D0, v = fundamental_decomposition(D)
        if v != 1:
            continue
        if lo <= class_number(D) <= hi:
            return D
    raise RuntimeError(f"no suitable order for m={m} below cap")
