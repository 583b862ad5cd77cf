"""Command-line interface: class polynomials, modular polynomials, partition numbers.

Polynomials are printed in an exact text format::

    poly <name> deg=<d> var=x
    <k>: <num>[/<den>]          one line per nonzero coefficient, k descending

and modular polynomials as ``bipoly m=<m>`` followed by ``i j: <c>`` lines for
i >= j (the other half follows by symmetry).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import analytic, gammapoly, modpoly, partition, qforms
from .analytic import RoundingError

log = logging.getLogger("classpoly")

# Class polynomial coefficients run to tens of thousands of digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)

EXIT_BAD_INPUT = 2
EXIT_SPECIAL = 3
EXIT_POOL = 4
EXIT_ROUNDING = 5


# -- text formats -----------------------------------------------------------------------

def _fmt(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(name: str, coeffs: Sequence, var: str = "x") -> str:
    """Low-to-high coefficients to the poly text format."""
    lines = [f"poly {name} deg={len(coeffs) - 1} var={var}"]
    for k in range(len(coeffs) - 1, -1, -1):
        if coeffs[k]:
            lines.append(f"{k}: {_fmt(coeffs[k])}")
    return "\n".join(lines) + "\n"


def parse_poly(text: str) -> tuple[str, list[Fraction]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if head[0] != "poly":
        raise ValueError("not a poly file")
    fields = dict(part.split("=", 1) for part in head[2:])
    coeffs = [Fraction(0)] * (int(fields["deg"]) + 1)
    for ln in lines[1:]:
        k, c = ln.split(":", 1)
        coeffs[int(k)] = Fraction(c.strip())
    return head[1], coeffs


def format_bipoly(m: int, phi: dict[tuple[int, int], int], modulus: int | None = None) -> str:
    head = f"bipoly m={m}" + (f" mod={modulus}" if modulus else "")
    keys = sorted((k for k in phi if k[0] >= k[1] and phi[k]), reverse=True)
    return "\n".join([head] + [f"{i} {j}: {phi[(i, j)]}" for i, j in keys]) + "\n"


def parse_bipoly(text: str) -> dict[tuple[int, int], int]:
    out = {}
    for ln in text.splitlines()[1:]:
        if not ln.strip():
            continue
        ij, c = ln.split(":", 1)
        i, j = map(int, ij.split())
        out[(i, j)] = out[(j, i)] = int(c)
    return out


def _format_sparse(head: str, d: dict[tuple[int, int], int]) -> str:
    return "\n".join([head] + [f"{a} {b}: {c}" for (a, b), c in sorted(d.items(), reverse=True)]) + "\n"


def _parse_sparse(text: str) -> dict[tuple[int, int], int]:
    out = {}
    for ln in text.splitlines()[1:]:
        if ln.strip():
            ab, c = ln.split(":", 1)
            a, b = map(int, ab.split())
            out[(a, b)] = int(c)
    return out


def _format_kpoly(D: int, coeffs) -> str:
    lines = [f"kpoly D={D} deg={len(coeffs) - 1}"]
    lines += [f"{k}: {_fmt(u)} {_fmt(v)}" for k, (u, v) in reversed(list(enumerate(coeffs)))]
    return "\n".join(lines) + "\n"


def _parse_kpoly(text: str) -> list[tuple[Fraction, Fraction]]:
    lines = [ln for ln in text.splitlines()[1:] if ln.strip()]
    out = [None] * len(lines)
    for ln in lines:
        k, rest = ln.split(":", 1)
        u, v = rest.split()
        out[int(k)] = (Fraction(u), Fraction(v))
    return out


def _format_presult(res: partition.PResult) -> str:
    text = format_poly(f"HP[{res.D}]", res.coeffs)
    return text + "primes " + " ".join(map(str, res.primes)) + "\n"


def _parse_presult(D: int, text: str, safety: float) -> partition.PResult:
    body = [ln for ln in text.splitlines() if not ln.startswith("primes")]
    primes = [int(x) for ln in text.splitlines() if ln.startswith("primes") for x in ln.split()[1:]]
    coeffs = parse_poly("\n".join(body))[1]
    scale = (-D) ** (len(coeffs) - 1)
    nums = [int(c * scale) for c in coeffs]
    return partition.PResult(D, coeffs, nums, partition.bound_BP(D, safety), primes)


# -- cache ------------------------------------------------------------------------------------

class Cache:
    """One text file per entry plus a .sha256 sidecar; writes are atomic renames."""

    KINDS = ("hilbert", "phi", "psi", "kfield", "classP", "partition")

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, key) -> Path:
        assert kind in self.KINDS
        return self.root / f"{kind}_{key}.txt"

    def get(self, kind: str, key) -> str | None:
        if not self.root:
            return None
        path = self._path(kind, key)
        side = path.with_suffix(".sha256")
        if not path.exists() or not side.exists():
            return None
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != side.read_text().strip():
            log.warning("cache digest mismatch for %s; recomputing", path.name)
            return None
        return data.decode()

    def put(self, kind: str, key, text: str) -> None:
        if not self.root:
            return
        path = self._path(kind, key)
        data = text.encode()
        for target, payload in ((path, data), (path.with_suffix(".sha256"),
                                               (hashlib.sha256(data).hexdigest() + "\n").encode())):
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp_")
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, target)

    def memo(self, kind: str, key, compute: Callable, dump: Callable[[object], str],
             load: Callable[[str], object]):
        text = self.get(kind, key)
        if text is not None:
            return load(text)
        value = compute()
        self.put(kind, key, dump(value))
        return value


class Context:
    """Shared settings and cached building blocks for one CLI run."""

    def __init__(self, cache: Cache, jobs: int = 1, safety: float = partition.DEFAULT_SAFETY):
        self.cache = cache
        self.jobs = jobs
        self.safety = safety
        self._classP: dict[int, partition.PResult] = {}

    def logline(self, msg: str) -> None:
        log.info(msg)

    def hilbert(self, D: int) -> list[int]:
        return self.cache.memo(
            "hilbert", D, lambda: analytic.hilbert_analytic(D),
            lambda c: format_poly(f"H[{D}]", c),
            lambda t: [int(c) for c in parse_poly(t)[1]])

    def phi(self, m: int) -> dict[tuple[int, int], int]:
        if m == 2:
            return modpoly.phi2()
        return self.cache.memo(
            "phi", m,
            lambda: modpoly.phi_lift(m, hilbert_fn=self.hilbert, lift_fn=self.phi,
                                     jobs=self.jobs, log=self.logline),
            lambda d: format_bipoly(m, d), parse_bipoly)

    def psi(self):
        key = {"A": 0, "B": 1}

        def one(which):
            return self.cache.memo(
                "psi", which, lambda: analytic.psi_polynomials()[key[which]],
                lambda d: _format_sparse(f"psi {which}", d), _parse_sparse)
        return one("A"), one("B")

    def kfield(self, D: int):
        def one(which):
            return partition.KQuadPoly(D, tuple(self.cache.memo(
                "kfield", f"{which}{D}", lambda: analytic.kfield_class_poly(which, D),
                lambda c: _format_kpoly(D, c), _parse_kpoly)))
        return one("A"), one("B")

    def class_poly_P(self, D: int) -> partition.PResult:
        if D not in self._classP:
            self._classP[D] = self.cache.memo("classP", D, lambda: self._class_poly_P(D),
                                              _format_presult, lambda t: _parse_presult(D, t, self.safety))
        return self._classP[D]

    def _class_poly_P(self, D: int) -> partition.PResult:
        setup = partition.PSetup(D, hilbert_fn=self.hilbert, lift_fn=self.phi,
                                 kfield=self.kfield(D), psi=self.psi())
        return partition.class_poly_P(D, setup=setup, jobs=self.jobs, log=self.logline, safety=self.safety)

    def partition_poly(self, n: int) -> list[Fraction]:
        def compute():
            res = partition.partition_poly(n, class_poly=self.class_poly_P)
            audit_partition(res)
            return res.coeffs
        return self.cache.memo("partition", n, compute,
                               lambda c: format_poly(f"Hpart[{n}]", c), lambda t: parse_poly(t)[1])

    def gamma_setup(self, D: int, prime_filter=None) -> gammapoly.Setup:
        return gammapoly.make_setup(D, hilbert_fn=self.hilbert, lift_fn=self.phi, prime_filter=prime_filter)


# -- audits -----------------------------------------------------------------------------------

class AuditError(RuntimeError):
    pass


def audit_height(what: str, measured: float, bound: float) -> None:
    log.info("%s: measured height %.2f, bound %.2f", what, measured, bound)
    if measured > bound:
        raise AuditError(f"{what}: measured height {measured:.2f} exceeds bound {bound:.2f}")


def audit_partition(res: partition.PartitionResult) -> None:
    for D, part in res.factors.items():
        audit_height(f"|D|^h H_{D}(P)", part.measured_height(), part.bound)
    if res.pn != partition.pentagonal_pn(res.n):
        raise AuditError(f"trace gives p({res.n}) = {res.pn}, recurrence gives {partition.pentagonal_pn(res.n)}")


# -- subcommands ------------------------------------------------------------------------------

def _int_arg(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def cmd_hilbert(ctx: Context, args) -> str:
    qforms.check_discriminant(args.D)
    return format_poly(f"H[{args.D}]", ctx.hilbert(args.D))


def cmd_modpoly(ctx: Context, args) -> str:
    if args.m < 2:
        raise qforms.DiscriminantError("m must be at least 2")
    phi = ctx.phi(args.m)
    if args.mod:
        from .arith import is_prime
        if not is_prime(args.mod):
            raise qforms.DiscriminantError(f"{args.mod} is not prime")
        return format_bipoly(args.m, modpoly.reduce_dict(phi, args.mod), args.mod)
    return format_bipoly(args.m, phi)


def cmd_gamma(ctx: Context, args) -> str:
    res = gammapoly.class_poly_gamma(args.D, setup=ctx.gamma_setup(args.D), jobs=ctx.jobs, log=ctx.logline)
    audit_height(f"delta H_{args.D}(gamma)", res.measured_height(), res.bound)
    return format_poly(f"Hgamma[{args.D}]", res.coeffs)


def load_spec(path: str) -> gammapoly.GoodFunctionSpec:
    if path in ("K", "builtin:K"):
        return gammapoly.ZAGIER_K
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise qforms.DiscriminantError(f"cannot read spec file: {exc}")
    try:
        return gammapoly.GoodFunctionSpec.from_text(text, Path(path).stem)
    except (ValueError, KeyError) as exc:
        raise qforms.DiscriminantError(f"bad spec file: {exc}")


def cmd_good(ctx: Context, args) -> str:
    spec = load_spec(args.specfile)
    setup = ctx.gamma_setup(args.D, prime_filter=lambda p: not spec.denominators_divisible_by(p))
    res = gammapoly.class_poly_good(spec, args.D, setup=setup, jobs=ctx.jobs, log=ctx.logline)
    audit_height(f"scaled H_{args.D}({spec.name})", res.measured_height(), res.bound)
    return format_poly(f"H[{args.D};{spec.name}]", res.coeffs)


def cmd_partition(ctx: Context, args) -> str:
    if args.n < 1:
        raise qforms.DiscriminantError("n must be at least 1")
    return format_poly(f"Hpart[{args.n}]", ctx.partition_poly(args.n))


def cmd_pn(ctx: Context, args) -> str:
    if args.n < 1:
        raise qforms.DiscriminantError("n must be at least 1")
    coeffs = ctx.partition_poly(args.n)
    pn = -coeffs[-2] / (24 * args.n - 1)
    if args.check_oracle:
        want = partition.pentagonal_pn(args.n)
        if pn != want:
            raise AuditError(f"p({args.n}) from trace is {pn}, recurrence gives {want}")
    return f"{pn}\n"


def cmd_verify(ctx: Context, args) -> str:
    from . import paperdata

    rows = paperdata.run_checks(ctx, skip_slow=args.skip_slow)
    width = max(len(name) for name, _, _ in rows)
    out = [f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}" for name, ok, detail in rows]
    bad = sum(not ok for _, ok, _ in rows)
    out.append(f"{len(rows) - bad}/{len(rows)} checks passed")
    ctx.failed = bad
    return "\n".join(out) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="classpoly", description=__doc__.splitlines()[0])
    ap.add_argument("--cache-dir", default=os.environ.get("CLASSPOLY_CACHE_DIR"),
                    help="directory for cached polynomials (env CLASSPOLY_CACHE_DIR)")
    ap.add_argument("--jobs", type=_int_arg, default=int(os.environ.get("CLASSPOLY_JOBS", "1")),
                    help="worker processes for the per-prime loop (env CLASSPOLY_JOBS)")
    ap.add_argument("--safety", type=float, default=partition.DEFAULT_SAFETY,
                    help="safety factor on the heuristic partition height bound")
    ap.add_argument("--seed", type=_int_arg, default=0, help="seed for random point sampling")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hilbert", help="Hilbert class polynomial H_D")
    p.add_argument("D", type=_int_arg)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("modpoly", help="classical modular polynomial Phi_m")
    p.add_argument("m", type=_int_arg)
    p.add_argument("--mod", type=_int_arg, help="reduce modulo this prime")
    p.set_defaults(func=cmd_modpoly)

    p = sub.add_parser("classpoly-gamma", help="H_D(gamma; x)")
    p.add_argument("D", type=_int_arg)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("classpoly-good", help="H_D(F; x) for a good function F given in a spec file (or K)")
    p.add_argument("specfile")
    p.add_argument("D", type=_int_arg)
    p.set_defaults(func=cmd_good)

    p = sub.add_parser("partition-poly", help="partition class polynomial H_n^part")
    p.add_argument("n", type=_int_arg)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("pn", help="p(n) from the trace of H_n^part")
    p.add_argument("n", type=_int_arg)
    p.add_argument("--check-oracle", action="store_true", help="compare with the pentagonal recurrence")
    p.set_defaults(func=cmd_pn)

    p = sub.add_parser("verify-paper", help="reproduce the published tables and worked example")
    p.add_argument("--skip-slow", action="store_true", help="skip n = 24 (about an hour)")
    p.set_defaults(func=cmd_verify)
    return ap


def _fail(category: str, msg: str, code: int) -> int:
    print(f"error: {category}: {msg}", file=sys.stderr)
    return code


def main(argv: Iterable[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(None if argv is None else list(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(message)s", stream=sys.stderr)
    if args.jobs < 1:
        return _fail("bad input", "--jobs must be positive", EXIT_BAD_INPUT)
    if args.safety < 1:
        return _fail("bad input", "--safety must be at least 1", EXIT_BAD_INPUT)
    modpoly.RNG_SEED = args.seed
    ctx = Context(Cache(args.cache_dir), args.jobs, args.safety)
    ctx.failed = 0
    start = time.time()
    try:
        out = args.func(ctx, args)
    except gammapoly.SpecialDiscriminantError as exc:
        return _fail("special discriminant", str(exc), EXIT_SPECIAL)
    except (qforms.DiscriminantError, ValueError) as exc:
        return _fail("bad input", str(exc), EXIT_BAD_INPUT)
    except modpoly.PrimePoolExhausted as exc:
        return _fail("prime pool exhausted", str(exc), EXIT_POOL)
    except RoundingError as exc:
        return _fail("rounding failure", str(exc), EXIT_ROUNDING)
    except AuditError as exc:
        return _fail("audit failure", str(exc), 1)
    sys.stdout.write(out)
    log.info("%s finished in %.1f s", args.command, time.time() - start)
    return 1 if ctx.failed else 0


if __name__ == "__main__":
    sys.exit(main())
