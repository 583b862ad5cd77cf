import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from classpoly import cli, gammapoly, modpoly
from classpoly.paperdata import GAMMA_TABLE, HILBERT_M23, PARTITION_TABLE

SRC = str(Path(__file__).resolve().parents[1] / "src")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cache_dir(tmp_path):
    return str(tmp_path / "cache")


def test_poly_format_round_trip():
    coeffs = [Fraction(-3, 7), Fraction(0), Fraction(5), Fraction(1)]
    text = cli.format_poly("T", coeffs)
    assert text.splitlines() == ["poly T deg=3 var=x", "3: 1", "2: 5", "0: -3/7"]
    assert cli.parse_poly(text) == ("T", coeffs)


def test_bipoly_round_trip():
    phi = modpoly.phi2()
    text = cli.format_bipoly(2, phi)
    assert text.startswith("bipoly m=2\n3 0: 1\n")
    assert cli.parse_bipoly(text) == phi


def test_kpoly_and_sparse_round_trip():
    c = [(Fraction(1, 2), Fraction(-3, 2)), (Fraction(1), Fraction(0))]
    assert cli._parse_kpoly(cli._format_kpoly(-23, c)) == c
    d = {(3, 1): 5, (0, 0): -7}
    assert cli._parse_sparse(cli._format_sparse("psi A", d)) == d


def test_hilbert_command(capsys, cache_dir):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "hilbert", "-23")
    assert code == 0
    assert cli.parse_poly(out)[1] == HILBERT_M23


def test_modpoly_command(capsys, cache_dir):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "modpoly", "2")
    assert code == 0 and cli.parse_bipoly(out) == modpoly.phi2()
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "modpoly", "3", "--mod", "101")
    assert code == 0 and out.startswith("bipoly m=3 mod=101")
    assert all(0 <= c < 101 for c in cli.parse_bipoly(out).values())


def test_gamma_and_good_commands(capsys, cache_dir, tmp_path):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "classpoly-gamma", "-7")
    assert code == 0 and cli.parse_poly(out)[1] == GAMMA_TABLE[-7]
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "classpoly-good", "K", "-7")
    assert code == 0 and cli.parse_poly(out)[1] == [3591, 1]
    spec = tmp_path / "gamma.spec"
    spec.write_text("# gamma itself\nA 1: num=1 den=1\nc1=637875 c2=1\n")
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "classpoly-good", str(spec), "-7")
    assert code == 0 and cli.parse_poly(out)[1] == GAMMA_TABLE[-7]


def test_partition_and_pn(capsys, cache_dir):
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "partition-poly", "1")
    assert code == 0 and cli.parse_poly(out)[1] == PARTITION_TABLE[1]
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "pn", "1", "--check-oracle")
    assert (code, out) == (0, "1\n")


@pytest.mark.parametrize("argv,code,category", [
    (["hilbert", "-5"], 2, "bad input"),
    (["hilbert", "abc"], 2, None),
    (["classpoly-gamma", "-27"], 3, "special discriminant"),
    (["classpoly-gamma", "-4"], 2, "bad input"),
    (["pn", "0"], 2, "bad input"),
    (["modpoly", "3", "--mod", "100"], 2, "bad input"),
    (["classpoly-good", "/nonexistent.spec", "-7"], 2, "bad input"),
    (["--jobs", "0", "hilbert", "-23"], 2, "bad input"),
])
def test_error_exit_codes(capsys, cache_dir, argv, code, category):
    try:
        got = cli.main(["--cache-dir", cache_dir] + argv)
    except SystemExit as exc:  # argparse rejects the argument itself
        got = exc.code
    _, err = capsys.readouterr()
    assert got == code
    if category:
        assert f"error: {category}:" in err


def test_pool_exhaustion_exit_code(capsys, cache_dir, monkeypatch):
    monkeypatch.setattr(gammapoly, "prime_stream", lambda setup: iter(()))
    code, _, err = run(capsys, "--cache-dir", cache_dir, "classpoly-gamma", "-7")
    assert code == 4 and "error: prime pool exhausted:" in err


def test_cache_files_and_digest(capsys, cache_dir):
    run(capsys, "--cache-dir", cache_dir, "hilbert", "-71")
    path = Path(cache_dir) / "hilbert_-71.txt"
    side = path.with_suffix(".sha256")
    assert path.exists() and side.exists()
    first = path.read_bytes()
    # corrupt the payload: the digest check must catch it and recompute
    path.write_text(first.decode().replace("1", "2"))
    code, out, _ = run(capsys, "--cache-dir", cache_dir, "hilbert", "-71")
    assert code == 0
    assert path.read_bytes() == first
    assert not list(Path(cache_dir).glob(".tmp_*"))


def test_cache_hit_is_bit_identical(capsys, cache_dir):
    _, cold, _ = run(capsys, "--cache-dir", cache_dir, "partition-poly", "1")
    _, warm, _ = run(capsys, "--cache-dir", cache_dir, "partition-poly", "1")
    _, none, _ = run(capsys, "partition-poly", "1")
    assert cold == warm == none


def test_output_independent_of_jobs(capsys, tmp_path):
    _, one, _ = run(capsys, "--cache-dir", str(tmp_path / "a"), "--jobs", "1", "classpoly-gamma", "-15")
    _, two, _ = run(capsys, "--cache-dir", str(tmp_path / "b"), "--jobs", "2", "classpoly-gamma", "-15")
    assert one == two and cli.parse_poly(one)[1] == GAMMA_TABLE[-15]


def test_seed_changes_nothing_in_output(capsys, tmp_path):
    _, a, _ = run(capsys, "--seed", "0", "modpoly", "5")
    _, b, _ = run(capsys, "--seed", "7", "modpoly", "5")
    modpoly.RNG_SEED = 0
    assert a == b


def test_entry_point_subprocess(cache_dir):
    env = dict(os.environ, PYTHONPATH=SRC, CLASSPOLY_CACHE_DIR=cache_dir, CLASSPOLY_JOBS="1")
    res = subprocess.run([sys.executable, "-m", "classpoly.cli", "hilbert", "-23"],
                         capture_output=True, text=True, env=env, timeout=300)
    assert res.returncode == 0
    assert cli.parse_poly(res.stdout)[1] == HILBERT_M23
    assert (Path(cache_dir) / "hilbert_-23.txt").exists()
