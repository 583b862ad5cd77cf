"""Acceptance criteria 1-9.

Each test prints one line ``CRITERION <k>: PASS|FAIL <detail>`` and then
asserts.  Run directly (``python tests/test_acceptance.py``) or through
pytest; the n = 24 partition polynomial makes a full run take about half an
hour.
"""

import itertools
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from classpoly import (analytic, cli, ecfp, fppoly as fp, gammapoly as gp,  # noqa: E402
                       modpoly, partition as pt, qforms)
from classpoly.arith import is_prime, sqrt_mod  # noqa: E402
from classpoly.modpoly import PrimeRejected  # noqa: E402
from classpoly import paperdata as paper  # noqa: E402

pytestmark = pytest.mark.acceptance


def report(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}", flush=True)
    assert ok, detail


def _split_primes(D, count=3, start=10**5):
    """Primes p = (t^2 - v^2 D)/4, which split completely in the ring class field of D."""
    out = []
    for t in itertools.count(1):
        for v in (1, 2):
            n = t * t - v * v * D
            if n % 4 == 0 and n // 4 > start and is_prime(n // 4) and D % (n // 4):
                out.append(n // 4)
                if len(out) == count:
                    return sorted(set(out))


# -- 1 ----------------------------------------------------------------------------------

def test_criterion_1_hilbert(ctx, capsys):
    t = time.time()
    ok = cli.parse_poly(cli.format_poly("H", ctx.hilbert(-23)))[1] == paper.HILBERT_M23
    bad = []
    discs = [D for D in range(-3, -501, -1) if D % 4 in (0, 1)]
    for D in discs:
        H = analytic.hilbert_analytic(D)
        h = qforms.class_number(D)
        if H[-1] != 1 or len(H) != h + 1 or not all(isinstance(c, int) for c in H):
            bad.append(D)
            continue
        for p in _split_primes(D):
            if len(fp.roots_split([c % p for c in H], p)) != h:
                bad.append((D, p))
    dt = time.time() - t
    ok = ok and not bad and dt < 5
    report(capsys, 1, ok, f"H_-23 exact; {len(discs)} discriminants |D| <= 500, failures {bad[:5]}; {dt:.1f} s (< 5 s)")


# -- 2 ----------------------------------------------------------------------------------

def test_criterion_2_modpoly(ctx, capsys):
    t = time.time()
    ok = modpoly.phi2()[(0, 0)] == paper.PHI2_CONSTANT and modpoly.phi2() == analytic.phi_analytic_oracle(2)
    bad = []
    for m in (3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 20, 23):
        text = cli.format_bipoly(m, ctx.phi(m))
        got = cli.parse_bipoly(text)
        want = analytic.phi_analytic_oracle(m)
        d = modpoly.psi(m)
        if got != want or not modpoly.is_symmetric(got) or modpoly.degrees(got) != (d, d):
            bad.append(m)
    dt = time.time() - t
    ok = ok and not bad and dt < 600
    report(capsys, 2, ok, f"Phi_2 exact; oracle mismatches {bad}; {dt:.0f} s (< 600 s)")


# -- 3 ----------------------------------------------------------------------------------

def test_criterion_3_gamma_tables(ctx, capsys):
    t = time.time()
    bad = {}
    for D, want in paper.GAMMA_TABLE.items():
        res = gp.class_poly_gamma(D, setup=ctx.gamma_setup(D), jobs=ctx.jobs)
        cli.audit_height(f"delta H_{D}(gamma)", res.measured_height(), res.bound)
        diff = [k for k, (a, b) in enumerate(zip(res.coeffs, want)) if a != b]
        if diff or len(res.coeffs) != len(want):
            bad[D] = {k: (str(res.coeffs[k]), str(want[k])) for k in diff}
    dt = time.time() - t
    ok = not bad and dt < 1800
    report(capsys, 3, ok, f"mismatches (computed, table) {bad}; {dt:.0f} s (< 1800 s)")


# -- 4 ----------------------------------------------------------------------------------

def test_criterion_4_micro(ctx, capsys):
    t = time.time()
    setup = pt.PSetup(-23, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(-23), psi=ctx.psi())
    traces = paper.micro_traces(setup, paper.MICRO_P)
    got = paper.micro_compare(traces)
    dt = time.time() - t
    bad = [k for k, v in got.items() if not v]
    tr = max(traces, key=lambda x: sum(paper.micro_compare([x]).values()))
    rows = sorted(zip(tr.j, tr.gamma, tr.a_hat, tr.b, tr.P))
    ok = not bad and dt < 30
    report(capsys, 4, ok, f"mismatched quantities {bad}; computed (j, gamma, a, b, P) {rows}; {dt:.1f} s (< 30 s)")


# -- 5 ----------------------------------------------------------------------------------

def test_criterion_5_partition_polys(ctx, capsys):
    bad = []
    t = time.time()
    got1 = ctx.partition_poly(1)
    t1 = time.time() - t
    for n, want in paper.PARTITION_TABLE.items():
        if ctx.partition_poly(n) != want:
            bad.append(n)
    t = time.time()
    got24 = ctx.partition_poly(24)
    t24 = time.time() - t
    bad24 = [k for k, c in paper.H24_PART.items() if got24[k] != c]
    shape = len(got24) == 22 and -got24[20] == 905625
    ok = not bad and not bad24 and shape and got1 == paper.PARTITION_TABLE[1] and t1 < 60 and t24 < 7200
    report(capsys, 5, ok, f"n=1..4 mismatches {bad}; n=24 degree {len(got24) - 1}, listed-coefficient mismatches "
                          f"{bad24}; n=1 {t1:.1f} s (< 60 s), n=24 {t24:.0f} s (< 7200 s)")


# -- 6 ----------------------------------------------------------------------------------

def test_criterion_6_pn(ctx, capsys):
    bad = []
    ns = list(range(1, 11)) + [24]
    for n in ns:
        coeffs = ctx.partition_poly(n)
        pn = -coeffs[-2] / (24 * n - 1)
        if pn != pt.pentagonal_pn(n):
            bad.append((n, pn))
    p1 = -ctx.partition_poly(1)[-2] / 23
    p24 = -ctx.partition_poly(24)[-2] / 575
    ok = not bad and p1 == 1 and p24 == 1575
    report(capsys, 6, ok, f"n = {ns}: mismatches {bad}; p(1) = {p1}, p(24) = {p24}")


# -- 7 ----------------------------------------------------------------------------------

def test_criterion_7_oracle(ctx, capsys):
    bad = [n for n in (1, 2, 3) if ctx.partition_poly(n) != analytic.partition_poly_oracle(n)]
    report(capsys, 7, not bad, f"CRT vs analytic for n = 1, 2, 3: mismatches {bad}")


# -- 8 ----------------------------------------------------------------------------------

def test_criterion_8_bounds(ctx, capsys):
    bj = analytic.bound_Bj(-23)
    bp = pt.bound_BP(-23, safety=1.0)
    near = abs(bj - paper.BJ_M23) <= 0.05 * paper.BJ_M23 and abs(bp - paper.BP_M23) <= 0.05 * paper.BP_M23
    over = []
    for D in (-23, -47, -71, -95):
        res = ctx.class_poly_P(D)
        if res.measured_height() > res.bound:
            over.append(D)
    for D in (-7, -15, -20):
        res = gp.class_poly_gamma(D, setup=ctx.gamma_setup(D))
        if res.measured_height() > res.bound:
            over.append(("gamma", D))
    for D in (-7, -20):
        res = gp.class_poly_good(gp.ZAGIER_K, D)
        if res.measured_height() > res.bound:
            over.append(("K", D))
    for n in (1, 2, 3, 4):
        try:
            cli.audit_partition(pt.partition_poly(n, class_poly=ctx.class_poly_P))
        except cli.AuditError:
            over.append(("part", n))
    ok = near and not over
    report(capsys, 8, ok, f"B_j(-23) = {bj:.3f}, B_P(-23) = {bp:.3f}; heights over budget {over}")


# -- 9 ----------------------------------------------------------------------------------

def _fresh_entry(stream, used):
    return next(e for e in stream if e.p not in used)


def _extra_prime_checks(ctx):
    bad = []
    # modular polynomials
    for m in (5, 6, 10):
        disc = modpoly.suitable_order(m)
        entry = next(itertools.islice(modpoly.suitable_primes(m, disc), 400, None))
        phi = modpoly.phi_mod_p(m, entry, disc, ctx.hilbert(disc), modpoly.small_polys(m, ctx.phi))
        if phi.to_dict() != modpoly.reduce_dict(ctx.phi(m), entry.p):
            bad.append(("phi", m))
    # gamma
    for D in (-15, -20):
        setup = ctx.gamma_setup(D)
        res = gp.class_poly_gamma(D, setup=setup)
        used = set(res.primes) | {p for p, _ in res.rejected}
        entry = _fresh_entry(gp.prime_stream(setup), used)
        f = gp.gamma_poly_mod_p(setup, entry)
        p = entry.p
        want = [c.numerator * pow(c.denominator, -1, p) % p for c in res.coeffs]
        if fp.pmonic(fp.normalize(f[:-1]), p) != want:
            bad.append(("gamma", D))
    # good function K
    D = -20
    setup = ctx.gamma_setup(D)
    res = gp.class_poly_good(gp.ZAGIER_K, D, setup=setup)
    entry = _fresh_entry(gp.prime_stream(setup), set(res.primes))
    roots, _, gammas = gp.gamma_values_mod_p(setup, entry)
    p = entry.p
    vals = [gp.ZAGIER_K.value_mod_p(j, g, p) for j, g in zip(roots, gammas)]
    if fp.from_roots(vals, p) != [c.numerator * pow(c.denominator, -1, p) % p for c in res.coeffs]:
        bad.append(("K", D))
    # partition class polynomials
    for D in (-23, -47):
        res = ctx.class_poly_P(D)
        setup = pt.PSetup(D, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(D), psi=ctx.psi())
        entry = _fresh_entry(gp.prime_stream(setup.gamma), set(res.primes))
        tr = pt.trace_at_prime(setup, entry)
        if tr.f != [c % tr.p for c in res.numerators]:
            bad.append(("P", D))
    return bad


def _conjugation_checks(ctx, D, count):
    setup = pt.PSetup(D, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(D), psi=ctx.psi())
    bad = 0
    for entry in itertools.islice(gp.prime_stream(setup.gamma), count):
        r = sqrt_mod(D % entry.p, entry.p)
        try:
            a = pt.trace_at_prime(setup, entry, r)
            b = pt.trace_at_prime(setup, entry, entry.p - r)
        except PrimeRejected:
            continue
        bad += a.f != b.f
    return bad


def _validator_rate(ctx, primes=40):
    setup = pt.PSetup(-23, hilbert_fn=ctx.hilbert, lift_fn=ctx.phi, kfield=ctx.kfield(-23), psi=ctx.psi())
    tried = accepted = pm = 0
    log = []
    for entry in itertools.islice(gp.prime_stream(setup.gamma), primes):
        tr = pt.trace_at_prime(setup, entry)
        for j, g, P in zip(tr.j, tr.gamma, tr.P):
            tried += 1
            try:
                counts = pt.combo36_counts(tr.p, j, g, pt.psi_at(setup.psiA, j, tr.p), pt.psi_at(setup.psiB, j, tr.p))
            except PrimeRejected as exc:
                log.append((tr.p, j, str(exc)))
                continue
            if pt.combo36_pattern_ok(counts, P, tr.p):
                accepted += 1
            else:
                log.append((tr.p, j, f"multiplicities {sorted(counts.values(), reverse=True)[:4]}"))
            pm += pt.combo36_pattern_ok(counts, P, tr.p, rule="pm")
    return tried, accepted, pm, log


def _neighbor_checks(ctx, pairs=100):
    rng = random.Random(2024)
    ells = (3, 5, 7, 11, 13)
    per = pairs // len(ells)
    checked, bad = 0, []
    for ell in ells:
        disc = modpoly.suitable_order(ell)
        H = ctx.hilbert(disc)
        for entry in itertools.islice(modpoly.suitable_primes(ell, disc), per):
            p = entry.p
            roots = [j for j in fp.roots_split([c % p for c in H], p) if j not in (0, 1728 % p)]
            j = rng.choice(roots)
            nb = ecfp.ell_neighbors(j, ell, p)
            checked += 1
            if len(nb) != ell + 1:
                bad.append((ell, p, j, "degree", len(nb)))
                continue
            for y in set(nb):
                if y in (0, 1728 % p):
                    continue
                back = ecfp.ell_neighbors(y, ell, p)
                if j not in back:
                    bad.append((ell, p, j, "symmetry", y))
    return checked, bad


def test_criterion_9_properties(ctx, capsys):
    extra = _extra_prime_checks(ctx)
    conj = _conjugation_checks(ctx, -23, 10) + _conjugation_checks(ctx, -47, 5)
    tried, accepted, pm, log = _validator_rate(ctx)
    for p, j, why in log:
        print(f"validator rejection: p={p} j={j}: {why}")
    rate = accepted / tried
    checked, nbad = _neighbor_checks(ctx)
    ok = not extra and conj == 0 and rate >= 0.95 and checked == 100 and not nbad
    report(capsys, 9, ok, f"extra-prime failures {extra}; conjugation failures {conj}; validator "
                          f"{accepted}/{tried} = {rate:.1%} (literal +-P rule {pm}/{tried}), {len(log)} rejections "
                          f"logged; neighbour checks {checked}, failures {nbad[:3]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
