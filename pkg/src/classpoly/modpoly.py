"""Classical modular polynomials Phi_m: bounds, prime plans, Phi_m mod p and the CRT lift."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import ecfp
from . import fppoly as fp
from .arith import CRTAccumulator, batch_inverse as _batch_inverse, factorize, is_prime, parallel_map
from .qforms import find_suitable_order


# Seeds the random point sampling in the volcano step.  Results do not depend on it.
RNG_SEED = 0


def psi(m: int) -> int:
    """Dedekind psi: m * prod (1 + 1/q) over primes q | m; the degree of Phi_m."""
    if m < 1:
        raise ValueError("psi needs m >= 1")
    out = m
    for q in factorize(m):
        out = out // q * (q + 1)
    return out


_PHI2 = {
    (3, 0): 1, (0, 3): 1, (2, 2): -1,
    (2, 1): 1488, (1, 2): 1488,
    (2, 0): -162000, (0, 2): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000, (0, 1): 8748000000,
    (0, 0): -157464000000000,
}


def phi2() -> dict[tuple[int, int], int]:
    """Phi_2 as {(i, k): coeff} for X^i Y^k."""
    return dict(_PHI2)


def _prime_bound(ell: int) -> float:
    return 6 * ell * math.log(ell) + 18 * ell


def height_bound_phi(m: int) -> float:
    """Upper bound on log max |coeff| of Phi_m.

    Prime m uses the known prime-level bound.  Composite m uses
    psi(m)/m * sum_{l^k || m} k (6 l log l + 18 l) (m / l) + psi(m) log m,
    which is generous on purpose.
    """
    if m < 2:
        raise ValueError("height bound needs m > 1")
    f = factorize(m)
    if len(f) == 1 and next(iter(f.values())) == 1:
        return _prime_bound(m)
    s = sum(k * _prime_bound(ell) * (m // ell) for ell, k in f.items())
    return psi(m) / m * s + psi(m) * math.log(m)


# -- prime plans -----------------------------------------------------------------

class PrimeRejected(Exception):
    """A prime that cannot be used for this computation; the caller draws another."""


class PrimePoolExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class PlanEntry:
    p: int
    t: int
    v: int


@dataclass
class PrimePlan:
    m: int
    disc: int
    ell: int
    bound: float
    entries: list[PlanEntry] = field(default_factory=list)

    def log_modulus(self) -> float:
        return sum(math.log(e.p) for e in self.entries)

    def primes(self) -> list[int]:
        return [e.p for e in self.entries]


def largest_prime(m: int) -> int:
    return max(factorize(m))


def base_v(m: int, disc: int) -> int:
    """Smallest admissible v: a multiple of m/l, even when disc = 1 mod 8."""
    v = m // largest_prime(m)
    if disc % 8 == 1 and v % 2:
        v *= 2
    return v


def is_suitable_prime(m: int, disc: int, p: int, t: int, v: int) -> bool:
    """4p = t^2 - l^2 v^2 disc with t = 2 mod l, (m/l) | v, and l not dividing v/(m/l)."""
    ell = largest_prime(m)
    if 4 * p != t * t - ell * ell * v * v * disc:
        return False
    if not is_prime(p) or p % ell != 1 % ell:
        return False
    if (t - 2) % ell or v % (m // ell) or (v // (m // ell)) % ell == 0:
        return False
    return True


def suitable_primes(m: int, disc: int, *, t_limit: int | None = None,
                    prime_filter: Callable[[int], bool] | None = None) -> Iterator[PlanEntry]:
    """Suitable primes for (m, disc) in a fixed, reproducible order.

    First v is fixed at its base value and t runs upward over t = 2 mod l of
    the right parity.  Past t_limit the search widens to v = k * base_v for
    k = 2, 3, ... (k prime to l), each scanned to the same t limit.
    """
    ell = largest_prime(m)
    v0 = base_v(m, disc)
    if t_limit is None:
        t_limit = 1 << 24
    k = 1
    while True:
        if ell == 2 or k % ell:
            v = v0 * k
            c = ell * ell * v * v * disc
            step = ell if ell % 2 == 0 else 2 * ell
            t = 2
            while t <= t_limit:
                for tt in (t,) if ell == 2 else (t, t + ell):
                    n = tt * tt - c
                    if n % 4 == 0 and is_suitable_prime(m, disc, n // 4, tt, v):
                        p = n // 4
                        if prime_filter is None or prime_filter(p):
                            yield PlanEntry(p, tt, v)
                t += step
        k += 1
        if k > 64:
            return


def select_primes(m: int, disc: int, bound: float, *,
                  prime_filter: Callable[[int], bool] | None = None) -> PrimePlan:
    """Plan with sum log p >= bound + log 2."""
    plan = PrimePlan(m, disc, largest_prime(m), bound)
    for e in suitable_primes(m, disc, prime_filter=prime_filter):
        plan.entries.append(e)
        if plan.log_modulus() >= bound + math.log(2):
            return plan
    raise PrimePoolExhausted(f"not enough suitable primes for m={m}, D={disc}")


# -- Phi_m mod p -------------------------------------------------------------------

def _mulmod_vec(a, b, p: int):
    q = np.floor(a.astype(np.float64) * b.astype(np.float64) / p).astype(np.int64)
    return np.mod(a * b - q * p, p)


def matmul_mod(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """A @ B mod p, exact, using float64 BLAS on limbs small enough not to round."""
    n_inner = len(B)
    b = max(1, (52 - max(1, n_inner).bit_length()) // 2)
    nlimbs = -(-p.bit_length() // b)
    mask = (1 << b) - 1
    A_ = np.array(A, dtype=object)
    B_ = np.array(B, dtype=object)
    Al = [((A_ >> (b * s)) & mask).astype(np.float64) for s in range(nlimbs)]
    Bl = [((B_ >> (b * s)) & mask).astype(np.float64) for s in range(nlimbs)]
    acc = np.zeros((A_.shape[0], B_.shape[1]), dtype=object)
    for s in range(nlimbs):
        for t in range(nlimbs):
            part = (Al[s] @ Bl[t]).astype(np.int64) % p
            acc = (acc + part.astype(object) * pow(2, b * (s + t), p)) % p
    return [[int(x) for x in row] for row in acc]


class PhiModP:
    """Phi_m mod p in point-value form.

    With nodes x_1..x_n (n = psi(m) + 1) and R_i(Y) = Phi_m(x_i, Y), given by
    its roots, Phi_m(X, Y) = sum_i L_i(X) R_i(Y) where L_i is the Lagrange
    basis.  Values and low-order derivatives are cheap in this form; the full
    coefficient matrix is produced on demand.
    """

    def __init__(self, m: int, p: int, nodes: Sequence[int], rows: Sequence[Sequence[int]]):
        self.m, self.p = m, p
        self.nodes = list(nodes)
        self.rows = [sorted(r) for r in rows]
        self.degree = psi(m)
        if len(self.nodes) != self.degree + 1 or any(len(r) != self.degree for r in self.rows):
            raise ValueError("point-value data has the wrong shape")
        self._weights = fp.lagrange_weights(self.nodes, p)

    def _lagrange_at(self, x: int) -> tuple[list[int], list[int]]:
        """(L_i(x), L_i'(x)) for all i; x must not be a node."""
        p = self.p
        d = [(x - xi) % p for xi in self.nodes]
        if 0 in d:
            raise PrimeRejected("evaluation point coincides with an interpolation node")
        dinv = _batch_inverse(d, p)
        ell = 1
        for di in d:
            ell = ell * di % p
        S = sum(dinv) % p
        L = [ell * w % p * di % p for w, di in zip(self._weights, dinv)]
        dL = [Li * (S - di) % p for Li, di in zip(L, dinv)]
        return L, dL

    def _row_taylor(self, ys: Sequence[int]):
        """For each row i and point y_k: (R_i(y), R_i'(y), R_i''(y)/2) as n x K tables."""
        p = self.p
        n, K = len(self.rows), len(ys)
        if p < (1 << 50):
            R = np.array(self.rows, dtype=np.int64)
            Y = np.array(ys, dtype=np.int64)
            E0 = np.ones((n, K), dtype=np.int64)
            E1 = np.zeros((n, K), dtype=np.int64)
            E2 = np.zeros((n, K), dtype=np.int64)
            for s in range(self.degree):
                d = np.mod(Y[None, :] - R[:, s][:, None], p)
                E2 = np.mod(_mulmod_vec(E2, d, p) + E1, p)
                E1 = np.mod(_mulmod_vec(E1, d, p) + E0, p)
                E0 = _mulmod_vec(E0, d, p)
            return E0.tolist(), E1.tolist(), E2.tolist()
        E0 = [[1] * K for _ in range(n)]
        E1 = [[0] * K for _ in range(n)]
        E2 = [[0] * K for _ in range(n)]
        for i, row in enumerate(self.rows):
            for k, y in enumerate(ys):
                e0, e1, e2 = 1, 0, 0
                for s in row:
                    d = (y - s) % p
                    e0, e1, e2 = e0 * d % p, (e1 * d + e0) % p, (e2 * d + e1) % p
                E0[i][k], E1[i][k], E2[i][k] = e0, e1, e2
        return E0, E1, E2

    def masser_betas(self, points: Sequence[int]) -> list[tuple[int, int, int]]:
        """(beta01, beta11, beta02) of Phi_m at (j, j) for each j in points.

        beta01 = d/dY Phi(j, Y) at Y = j, beta02 = half the second Y-derivative,
        beta11 = the mixed derivative d/dX d/dY Phi at (j, j).
        """
        p = self.p
        _, R1, R2 = self._row_taylor(points)
        out = []
        for k, y in enumerate(points):
            L, dL = self._lagrange_at(y)
            b01 = sum(L[i] * R1[i][k] for i in range(len(L))) % p
            b02 = sum(L[i] * R2[i][k] for i in range(len(L))) % p
            b11 = sum(dL[i] * R1[i][k] for i in range(len(L))) % p
            out.append((b01, b11, b02))
        return out

    def evaluate(self, x: int, y: int) -> int:
        p = self.p
        R0, _, _ = self._row_taylor([y])
        if x % p in self.nodes:
            return R0[self.nodes.index(x % p)][0]
        L, _ = self._lagrange_at(x)
        return sum(Li * r[0] for Li, r in zip(L, R0)) % p

    def coefficients(self) -> list[list[int]]:
        """Matrix c[a][b] with Phi_m = sum c[a][b] X^a Y^b."""
        p = self.p
        n = len(self.nodes)
        W = fp.from_roots(self.nodes, p)
        Lrows = []
        for xi, wi in zip(self.nodes, self._weights):
            q, _ = fp._synthetic_div(W, xi, p)
            q = q + [0] * (n - len(q))
            Lrows.append([c * wi % p for c in q])
        Rrows = []
        for r in self.rows:
            c = fp.from_roots(r, p)
            Rrows.append(c + [0] * (n - len(c)))
        LT = [list(col) for col in zip(*Lrows)]  # LT[a][i] = L_i[a]
        if n <= 48:
            return [[sum(LT[a][i] * Rrows[i][b] for i in range(n)) % p for b in range(n)]
                    for a in range(n)]
        return matmul_mod(LT, Rrows, p)

    def to_dict(self) -> dict[tuple[int, int], int]:
        c = self.coefficients()
        return {(a, b): v for a, row in enumerate(c) for b, v in enumerate(row) if v}


def _reduce_phi(phi: dict[tuple[int, int], int], p: int) -> list[list[int]]:
    """Row k holds the X-polynomial multiplying Y^k."""
    d = max(i for i, _ in phi)
    rows = [[0] * (d + 1) for _ in range(d + 1)]
    for (i, k), c in phi.items():
        rows[k][i] = c % p
    return rows


def _phi_row_roots(rows: list[list[int]], j: int, p: int) -> list[int]:
    """Roots (with multiplicity) of Phi(j, Y) mod p."""
    d = len(rows) - 1
    pw = [1] * (d + 1)
    for i in range(1, d + 1):
        pw[i] = pw[i - 1] * j % p
    coeffs = [sum(a * b for a, b in zip(r, pw)) % p for r in rows]
    return fp.roots_split(coeffs, p)


def _split_m(m: int) -> tuple[int, list[int]]:
    """(l0, [l1 <= l2 <= ...]) with l0 the prime factor exceeding sqrt(m), or 1."""
    primes = []
    for q, e in factorize(m).items():
        primes.extend([q] * e)
    ell = primes[-1]
    if ell * ell > m:
        return ell, primes[:-1]
    return 1, primes


def _surface_neighbors(j: int, ell: int, p: int, t: int, rng: random.Random) -> list[int]:
    E = ecfp.curve_from_j(j, p)
    N = ecfp.order_from_trace(E, t, rng)
    return ecfp.ell_neighbor_js(E, ell, N, rng)


def phi_mod_p(m: int, entry: PlanEntry, disc: int, hilbert: Sequence[int],
              small: dict[int, dict[tuple[int, int], int]] | None = None,
              stats: dict | None = None) -> PhiModP:
    """Phi_m mod p from the CM structure at a suitable prime.

    ``hilbert`` is H_disc over Z (low-to-high); ``small`` maps each prime
    l used in the expansion steps to Phi_l over Z.  Raises PrimeRejected when
    the prime does not behave as required.
    """
    p = entry.p
    n = psi(m) + 1
    hp = [c % p for c in hilbert]
    roots = fp.roots_split(hp, p)
    if len(roots) != len(hilbert) - 1 or len(set(roots)) != len(roots):
        raise PrimeRejected("class polynomial does not split into distinct roots")
    nodes = roots[:n]
    if any(j in (0, 1728 % p) for j in nodes):
        raise PrimeRejected("j = 0 or 1728 among the surface roots")
    l0, chain = _split_m(m)
    if m == 2:
        l0, chain = 1, [2]
    rng = random.Random(p + (RNG_SEED << 64))

    # level 0: (j, predecessor) pairs
    if l0 > 1:
        levels = []
        for j in nodes:
            nb = _surface_neighbors(j, l0, p, entry.t, rng)
            if len(nb) != l0 + 1:
                raise PrimeRejected(f"{len(nb)} rational {l0}-isogenies from a surface curve")
            levels.append([(y, j) for y in nb])
    else:
        levels = [[(j, None)] for j in nodes]

    reduced = {ell: _reduce_phi((small or {})[ell] if ell != 2 else _PHI2, p) for ell in set(chain)}
    prev_ell = l0
    cache: dict[tuple[int, int], list[int]] = {}
    for ell in chain:
        rows = reduced[ell]
        new_levels = []
        for level in levels:
            nxt = []
            for j, parent in level:
                if j == 0 or j == 1728 % p:
                    raise PrimeRejected("expansion reached j = 0 or 1728")
                key = (ell, j)
                nb = cache.get(key)
                if nb is None:
                    nb = _phi_row_roots(rows, j, p)
                    cache[key] = nb
                if len(nb) != ell + 1:
                    raise PrimeRejected(f"Phi_{ell}({j}, Y) has {len(nb)} roots mod {p}")
                nb = list(nb)
                if ell == prev_ell and parent is not None:
                    nb.remove(parent)
                nxt.extend((y, j) for y in nb)
            new_levels.append(nxt)
        levels = new_levels
        prev_ell = ell
    rows = [[y for y, _ in level] for level in levels]
    if any(len(r) != n - 1 for r in rows):
        raise PrimeRejected("expansion produced the wrong number of isogenous curves")
    if stats is not None:
        stats["expansions"] = stats.get("expansions", 0) + len(cache)
    return PhiModP(m, p, nodes, rows)


# -- lifting to Z ------------------------------------------------------------------

def suitable_order(m: int) -> int:
    """A discriminant suitable for m (ell coprime to its conductor)."""
    return find_suitable_order(m)


def small_polys(m: int, lift: Callable[[int], dict]) -> dict[int, dict[tuple[int, int], int]]:
    """Phi_l over Z for the primes used in the expansion steps."""
    _, chain = _split_m(m)
    return {ell: (phi2() if ell == 2 else lift(ell)) for ell in set(chain)}


def phi_lift(m: int, *, hilbert_fn: Callable[[int], list[int]] | None = None,
             lift_fn: Callable[[int], dict] | None = None,
             jobs: int = 1, safety: float = 1.0, log=None) -> dict[tuple[int, int], int]:
    """Phi_m over Z by CRT from suitable primes; rejected primes are replaced."""
    if m < 2:
        raise ValueError("m must exceed 1")
    if m == 2:
        return phi2()
    from .analytic import hilbert_analytic

    hilbert_fn = hilbert_fn or hilbert_analytic
    lift_fn = lift_fn or phi_lift
    disc = suitable_order(m)
    H = hilbert_fn(disc)
    small = small_polys(m, lift_fn)
    bound = height_bound_phi(m) * safety
    d = psi(m)
    keys = [(i, k) for i in range(d + 1) for k in range(i + 1)]
    acc = CRTAccumulator(len(keys))

    def work(entry):
        try:
            return entry, phi_mod_p(m, entry, disc, H, small).coefficients()
        except PrimeRejected as exc:
            return entry, exc

    for entry, res in parallel_map(work, _until(suitable_primes(m, disc), acc, bound), jobs):
        if isinstance(res, PrimeRejected):
            if log:
                log(f"m={m}: prime {entry.p} rejected ({res})")
            continue
        if acc.log_modulus() >= bound + math.log(2):
            continue  # in flight when the bound was reached
        acc.add(entry.p, [res[i][k] for i, k in keys])
    if acc.log_modulus() < bound + math.log(2):
        raise PrimePoolExhausted(f"prime pool exhausted for m={m}")
    vals = acc.values()
    out = {}
    for (i, k), v in zip(keys, vals):
        if v:
            out[(i, k)] = v
            out[(k, i)] = v
    return out


class _until:
    """Iterator over plan entries that stops once the accumulator covers the bound.

    parallel_map pulls lazily, so the stopping test sees every result that
    has been folded in so far.
    """

    def __init__(self, source: Iterator[PlanEntry], acc: CRTAccumulator, bound: float):
        self.source, self.acc, self.bound = source, acc, bound

    def __iter__(self):
        return self

    def __next__(self) -> PlanEntry:
        if self.acc.log_modulus() >= self.bound + math.log(2):
            raise StopIteration
        return next(self.source)


def reduce_dict(phi: dict[tuple[int, int], int], p: int) -> dict[tuple[int, int], int]:
    return {k: v % p for k, v in phi.items() if v % p}


def is_symmetric(phi: dict[tuple[int, int], int]) -> bool:
    return all(phi.get((k, i)) == v for (i, k), v in phi.items())


def degrees(phi: dict[tuple[int, int], int]) -> tuple[int, int]:
    return max(i for i, _ in phi), max(k for _, k in phi)
