"""Class polynomials of gamma and of good modular functions F = sum A_n(j) gamma^n.

Per prime, Masser's lemma turns local data of Phi_|D| at (j_k, j_k) into
gamma(alpha_Q) mod p; the integer polynomials delta * H_D(gamma; x) and delta
(or c1 |D|^{c2 h} H_D(F; x)) are then assembled by CRT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import fppoly as fp
from . import modpoly, qforms
from .analytic import bound_Bj, bound_M, hilbert_analytic
from .arith import CRTAccumulator, height, parallel_map
from .modpoly import PhiModP, PlanEntry, PrimePoolExhausted, PrimeRejected, psi


class SpecialDiscriminantError(ValueError):
    """D = -3 d^2 is outside the scope of these algorithms."""


def is_special(D: int) -> bool:
    if D % 3:
        return False
    d2, r = divmod(-D, 3)
    return r == 0 and math.isqrt(d2) ** 2 == d2


def masser_level(D: int) -> int:
    """Norm of sqrt(D) (D odd) or sqrt(D/4) (D even): the level m with (j, j) a simple zero of Phi_m.

    For even D no element of norm |D| is primitive in the order, so Phi_|D|
    does not vanish at (j, j) and the betas must come from Phi_{|D|/4}.
    """
    return -D if D % 4 else -D // 4


@dataclass(frozen=True)
class BetaTriple:
    b01: int
    b11: int
    b02: int


# -- Masser's lemma --------------------------------------------------------------

def masser_betas(phi, j: int, p: int) -> BetaTriple:
    """Betas at (j, j) from Phi_D mod p.

    ``phi`` is either a PhiModP or a coefficient dict {(i, k): c} for X^i Y^k.
    b01 = [Y] Phi(j, Y + j), b02 = [Y^2] Phi(j, Y + j) and b11 = [Y] of the
    X-partial derivative at (j, Y + j).
    """
    if isinstance(phi, PhiModP):
        b01, b11, b02 = phi.masser_betas([j])[0]
        return BetaTriple(b01, b11, b02)
    d = max(k for _, k in phi)
    row = [0] * (d + 1)
    drow = [0] * (d + 1)
    for (i, k), c in phi.items():
        row[k] = (row[k] + c * pow(j, i, p)) % p
        if i:
            drow[k] = (drow[k] + c * i * pow(j, i - 1, p)) % p
    t = fp.taylor_coeffs(fp.normalize(row), j, p, 3)
    dt = fp.taylor_coeffs(fp.normalize(drow), j, p, 2)
    return BetaTriple(t[1], dt[1], t[2])


def gamma_mod_p(b: BetaTriple, p: int) -> int:
    if b.b01 % p == 0:
        raise PrimeRejected("beta01 vanishes mod p")
    return (2 * b.b02 - b.b11) * pow(b.b01, -1, p) % p


# -- bounds ------------------------------------------------------------------------

def bound_Bgamma(D: int) -> float:
    """(h+1)(4 log(psi(m)+1) + 2 psi(m) M(D) + B_Phi(m) + 2) with m = masser_level(D).

    Bounds both log|delta| and the height of delta * H_D(gamma; x).
    """
    h = qforms.class_number(D)
    m = masser_level(D)
    s = psi(m)
    return (h + 1) * (4 * math.log(s + 1) + 2 * s * bound_M(D) + modpoly.height_bound_phi(m) + 2)


# -- shared per-prime machinery ------------------------------------------------------

@dataclass
class Setup:
    """Everything that does not depend on the prime."""

    D: int
    disc: int
    hilbert_D: list[int]
    hilbert_disc: list[int]
    small: dict
    prime_filter: Callable[[int], bool] | None = None


def make_setup(D: int, *, hilbert_fn=None, lift_fn=None, prime_filter=None) -> Setup:
    qforms.check_discriminant(D)
    if D >= -4:
        raise qforms.DiscriminantError("need D < -4")
    if is_special(D):
        raise SpecialDiscriminantError(f"{D} = -3 d^2 is special")
    hilbert_fn = hilbert_fn or hilbert_analytic
    lift_fn = lift_fn or modpoly.phi_lift
    m = masser_level(D)
    l0, _ = modpoly._split_m(m)
    disc = qforms.find_suitable_order(m, inside=D, require_coprime_conductor=l0 > 1)
    return Setup(D, disc, hilbert_fn(D), hilbert_fn(disc), modpoly.small_polys(m, lift_fn), prime_filter)


def gamma_values_mod_p(setup: Setup, entry: PlanEntry):
    """(roots j_k of H_D mod p, betas, gamma_k) at one prime."""
    p = entry.p
    m = masser_level(setup.D)
    hD = [c % p for c in setup.hilbert_D]
    roots = fp.roots_split(hD, p)
    if len(roots) != len(hD) - 1 or len(set(roots)) != len(roots):
        raise PrimeRejected("H_D does not split into distinct roots")
    if any(j in (0, 1728 % p) for j in roots):
        raise PrimeRejected("j = 0 or 1728 among the roots of H_D")
    phi = modpoly.phi_mod_p(m, entry, setup.disc, setup.hilbert_disc, setup.small)
    betas = [BetaTriple(*b) for b in phi.masser_betas(roots)]
    gammas = [gamma_mod_p(b, p) for b in betas]
    return roots, betas, gammas


def prime_stream(setup: Setup):
    return modpoly.suitable_primes(masser_level(setup.D), setup.disc, prime_filter=setup.prime_filter)


class _Stop:
    """Lazy prime iterator that stops when the accumulator covers the bound."""

    def __init__(self, source, acc: CRTAccumulator, bound: float):
        self.source, self.acc, self.bound = source, acc, bound

    def __iter__(self):
        return self

    def __next__(self):
        if self.acc.log_modulus() >= self.bound + math.log(2):
            raise StopIteration
        return next(self.source)


def crt_run(setup: Setup, per_prime: Callable[[Setup, PlanEntry], list[int]], length: int,
            bound: float, jobs: int = 1, log=None, record: list | None = None) -> CRTAccumulator:
    """Drive per_prime over suitable primes until sum log p >= bound + log 2."""
    acc = CRTAccumulator(length)

    def work(entry):
        try:
            return entry, per_prime(setup, entry)
        except PrimeRejected as exc:
            return entry, exc

    for entry, res in parallel_map(work, _Stop(prime_stream(setup), acc, bound), jobs):
        if isinstance(res, PrimeRejected):
            if log:
                log(f"D={setup.D}: prime {entry.p} rejected ({res})")
            if record is not None:
                record.append((entry.p, str(res)))
            continue
        if acc.log_modulus() >= bound + math.log(2):
            continue  # in flight when the bound was reached; dropped so jobs never changes the prime set
        acc.add(entry.p, res)
        if log:
            log(f"D={setup.D}: prime {entry.p} done, {acc.log_modulus():.0f} of {bound:.0f} nats")
    if acc.log_modulus() < bound + math.log(2):
        raise PrimePoolExhausted(f"prime pool exhausted for D={setup.D}")
    return acc


# -- Algorithm 1 ---------------------------------------------------------------------

def gamma_poly_mod_p(setup: Setup, entry: PlanEntry) -> list[int]:
    """Residues of (coefficients of delta * prod (x - gamma_k), delta), low-to-high then delta."""
    p = entry.p
    _, betas, gammas = gamma_values_mod_p(setup, entry)
    delta = 1
    for b in betas:
        delta = delta * b.b01 % p
    f = fp.pscale(fp.from_roots(gammas, p), delta, p)
    f = f + [0] * (len(gammas) + 1 - len(f))
    return f + [delta]


@dataclass
class GammaResult:
    D: int
    coeffs: list[Fraction]
    delta: int
    numerators: list[int]
    bound: float
    primes: list[int] = field(default_factory=list)
    rejected: list = field(default_factory=list)

    def measured_height(self) -> float:
        return max(height(self.numerators), height([self.delta]))


def class_poly_gamma(D: int, *, setup: Setup | None = None, jobs: int = 1, log=None) -> GammaResult:
    """H_D(gamma; x) in Q[x], low-to-high."""
    setup = setup or make_setup(D)
    h = len(setup.hilbert_D) - 1
    bound = bound_Bgamma(D)
    rejected: list = []
    acc = crt_run(setup, gamma_poly_mod_p, h + 2, bound, jobs, log, rejected)
    vals = acc.values()
    nums, delta = vals[:-1], vals[-1]
    if delta == 0:
        raise ArithmeticError("delta reconstructed as zero")
    coeffs = [Fraction(c, delta) for c in nums]
    return GammaResult(D, coeffs, delta, nums, bound, acc.primes, rejected)


# -- Algorithm 2 ---------------------------------------------------------------------

@dataclass(frozen=True)
class GoodFunctionSpec:
    """F = sum_n A_n(j) gamma^n with A_n = num_n(j) / den_n(j) over Z.

    terms maps n to (num, den), each an integer coefficient tuple low-to-high.
    """

    terms: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]
    c1: int = 1
    c2: int = 1
    name: str = "F"

    def __post_init__(self):
        if self.c1 < 1 or self.c2 < 1:
            raise ValueError("c1 and c2 must be positive integers")
        for _, num, den in self.terms:
            if not any(den):
                raise ValueError("zero denominator")

    def max_degree(self) -> int:
        return max(max(len(num), len(den)) - 1 for _, num, den in self.terms)

    def coefficient_height(self) -> float:
        return sum(math.log1p(max(map(abs, num + den))) for _, num, den in self.terms)

    def value_mod_p(self, j: int, gamma: int, p: int) -> int:
        total = 0
        for n, num, den in self.terms:
            d = fp.peval([c % p for c in den], j, p)
            if d == 0:
                raise PrimeRejected("a denominator A_n vanishes at a root mod p")
            total += fp.peval([c % p for c in num], j, p) * pow(d, -1, p) * pow(gamma, n, p)
        return total % p

    def denominators_divisible_by(self, p: int) -> bool:
        for _, num, den in self.terms:
            lead = [c for c in den if c]
            if lead and lead[-1] % p == 0:
                return True
        return False

    def to_text(self) -> str:
        lines = []
        for n, num, den in self.terms:
            lines.append(f"A {n}: num={','.join(map(str, num))} den={','.join(map(str, den))}")
        lines.append(f"c1={self.c1} c2={self.c2}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "F") -> "GoodFunctionSpec":
        terms = []
        c1 = c2 = None
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("A"):
                head, rest = line[1:].split(":", 1)
                fields = dict(part.split("=", 1) for part in rest.split())
                num = tuple(int(x) for x in fields["num"].split(","))
                den = tuple(int(x) for x in fields["den"].split(","))
                terms.append((int(head), num, den))
            else:
                for part in line.split():
                    key, val = part.split("=", 1)
                    if key == "c1":
                        c1 = int(val)
                    elif key == "c2":
                        c2 = int(val)
                    else:
                        raise ValueError(f"unknown key {key!r}")
        if not terms or c1 is None or c2 is None:
            raise ValueError("spec needs at least one A line and c1, c2")
        return cls(tuple(terms), c1, c2, name)


# K = j (j - 1728) gamma + 2 j - 1728, from rewriting E2* through gamma.
ZAGIER_K = GoodFunctionSpec(
    terms=((0, (-1728, 2), (1,)), (1, (0, -1728, 1), (1,))),
    c1=1, c2=1, name="K",
)


def bound_BF(spec: GoodFunctionSpec, D: int) -> float:
    """Height budget for c1 |D|^{c2 h} H_D(F; x).

    (1 + max deg A_n) B_j(D) + log c1 + c2 h log|D| + h sum log(1 + |A_n|) + h log 2.
    """
    h = qforms.class_number(D)
    return ((1 + spec.max_degree()) * bound_Bj(D) + math.log(spec.c1)
            + spec.c2 * h * math.log(-D) + h * spec.coefficient_height() + h * math.log(2))


@dataclass
class GoodResult:
    D: int
    coeffs: list[Fraction]
    numerators: list[int]
    scale: int
    bound: float
    primes: list[int] = field(default_factory=list)
    rejected: list = field(default_factory=list)

    def measured_height(self) -> float:
        return height(self.numerators)


def class_poly_good(spec: GoodFunctionSpec, D: int, *, setup: Setup | None = None,
                    jobs: int = 1, log=None, safety: float = 1.0) -> GoodResult:
    """H_D(F; x) in Q[x], low-to-high."""
    if setup is None:
        setup = make_setup(D, prime_filter=lambda p: not spec.denominators_divisible_by(p))
    h = len(setup.hilbert_D) - 1
    scale = spec.c1 * (-D) ** (spec.c2 * h)

    def per_prime(st: Setup, entry: PlanEntry) -> list[int]:
        p = entry.p
        roots, _, gammas = gamma_values_mod_p(st, entry)
        vals = [spec.value_mod_p(j, g, p) for j, g in zip(roots, gammas)]
        f = fp.pscale(fp.from_roots(vals, p), scale, p)
        return f + [0] * (h + 1 - len(f))

    bound = bound_BF(spec, D) * safety
    rejected: list = []
    acc = crt_run(setup, per_prime, h + 1, bound, jobs, log, rejected)
    nums = acc.values()
    return GoodResult(D, [Fraction(c, scale) for c in nums], nums, scale, bound, acc.primes, rejected)
