"""Hilbert class polynomials and modular polynomials, two ways each.

H_D comes from evaluating j at the roots of the reduced forms and rounding.
Phi_m comes from its values mod many suitable primes, glued by CRT, and is
compared with the same polynomial read off from q-expansions.
"""

import time

from classpoly import analytic, fppoly as fp, modpoly, qforms
from classpoly.arith import is_prime

D = -23
H = analytic.hilbert_analytic(D)
print(f"H_{D}(x), low to high: {H}")
print(f"class number h({D}) = {qforms.class_number(D)}, forms: {qforms.primitive_reduced_forms(D)}")

# 4p = t^2 - v^2 D makes p split completely in the ring class field, so H_D has h roots mod p.
# With D = 1 mod 8 and v = 1 the quotient is even, so take v = 2, i.e. p = s^2 - D.
s = next(s for s in range(1000, 10**6) if is_prime(s * s - D))
p = s * s - D
print(f"roots of H_{D} mod {p}: {fp.roots_split([c % p for c in H], p)}")

for m in (3, 5, 6):
    t = time.time()
    crt = modpoly.phi_lift(m, hilbert_fn=analytic.hilbert_analytic)
    t_crt = time.time() - t
    t = time.time()
    oracle = analytic.phi_analytic_oracle(m)
    t_or = time.time() - t
    print(f"Phi_{m}: degree {modpoly.degrees(crt)}, {len(crt)} nonzero terms, "
          f"CRT {t_crt:.1f} s, analytic {t_or:.1f} s, equal: {crt == oracle}")

print(f"Phi_2 constant term: {modpoly.phi2()[(0, 0)]}")
