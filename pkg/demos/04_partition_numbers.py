"""p(n) as the trace of a class polynomial, divided by 24n - 1.

Pass a larger n on the command line (n = 24 takes about twenty minutes, most
of it building Phi_575 mod each prime).  Set CLASSPOLY_CACHE_DIR to keep the
expensive pieces between runs.
"""

import os
import sys
import time

from classpoly import cli, partition as pt

ctx = cli.Context(cli.Cache(os.environ.get("CLASSPOLY_CACHE_DIR")))
ns = [int(a) for a in sys.argv[1:]] or [1, 2, 3, 4]
for n in ns:
    t = time.time()
    res = pt.partition_poly(n, class_poly=ctx.class_poly_P)
    print(f"n = {n}: D = {1 - 24 * n}, degree {res.degree}, trace {res.trace}, "
          f"p(n) = {res.pn} (recurrence {pt.pentagonal_pn(n)}), {time.time() - t:.1f} s")
    for D, part in res.factors.items():
        print(f"   H_{D}(P): {len(part.primes)} primes, height {part.measured_height():.1f} "
              f"of budget {part.bound:.1f}")
print(cli.format_poly(f"Hpart[{ns[-1]}]", ctx.partition_poly(ns[-1])), end="")
