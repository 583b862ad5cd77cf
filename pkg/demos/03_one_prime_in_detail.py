"""Everything that happens at a single prime for H_-23(P; x).

At p = 1562207 the three roots j_k of H_-23 are paired with gamma_k, with
the unique common roots a_k, b_k of Psi_A(x, j_k) and H_-23(A; x) (and the
same for B), and with the value P_k = a_k / (j_k (j_k - 1728)) + b_k gamma_k.
Both square roots of -23 mod p are shown: the a_k and b_k change, the
polynomial f(x) = 23^3 prod (x - P_k) does not.
"""

from classpoly import partition as pt
from classpoly.paperdata import MICRO_P, micro_traces

setup = pt.PSetup(-23)
for tr in micro_traces(setup, MICRO_P):
    print(f"sqrt(-23) = {tr.root} mod {tr.p}")
    print(f"  {'j':>8} {'gamma':>8} {'a':>8} {'b':>8} {'P':>8}")
    for row in sorted(zip(tr.j, tr.gamma, tr.a_hat, tr.b, tr.P)):
        print("  " + " ".join(f"{x:>8}" for x in row))
    print(f"  f(x) low to high: {tr.f}")

    # the 36-combination cross-check: P_k is the only repeated candidate
    j, g, P = tr.j[0], tr.gamma[0], tr.P[0]
    counts = pt.combo36_counts(tr.p, j, g, pt.psi_at(setup.psiA, j, tr.p), pt.psi_at(setup.psiB, j, tr.p))
    print(f"  36 candidates at j = {j}: {len(counts)} distinct, P occurs {counts[P]} times")
