"""Class polynomials of the nonholomorphic function gamma and of Zagier's K.

gamma is built from E2*, so its values at CM points are algebraic but not
given by any holomorphic modular function.  Mod p they come from the first
and second derivatives of Phi_m at (j, j), which is what class_poly_gamma
does at each prime.  The result is checked against direct evaluation.
"""

from mpmath import mp

from classpoly import analytic, gammapoly as gp

for D in (-7, -8, -15):
    res = gp.class_poly_gamma(D)
    print(f"H_{D}(gamma; x) = {[str(c) for c in res.coeffs]}  "
          f"({len(res.primes)} primes, height {res.measured_height():.1f} <= bound {res.bound:.1f})")
    vals = analytic.class_poly_values(analytic.eval_gamma, D, 200)
    with mp.workprec(200):
        print("   numeric gamma values:", [mp.nstr(v.real, 15) for v in vals])

# K = j (j - 1728) gamma + 2j - 1728 has integral class polynomials.
for D in (-7, -11, -20):
    res = gp.class_poly_good(gp.ZAGIER_K, D)
    print(f"H_{D}(K; x) = {[str(c) for c in res.coeffs]}")

# any F = sum A_n(j) gamma^n can be supplied as text
spec = gp.GoodFunctionSpec.from_text("A 1: num=1 den=1\nc1=637875 c2=1\n", name="gamma")
print("gamma through the generic path:", [str(c) for c in gp.class_poly_good(spec, -7).coeffs])
