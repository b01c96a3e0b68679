"""
The eight release criteria, one test each.  Every test prints a single
``PASS``/``FAIL`` line (visible even without ``-s``) before asserting.
"""

import random
import subprocess
import sys
import time
from itertools import product

import pytest

from bsv.claims import DEFAULT_SEED, verify_all, verify_step
from bsv.matrices import delta_support, minor_factor, set_cache_dir
from bsv.poly import GF, PolyRing, chart_ring, parse_poly
from bsv.poset import PosetIdeal, enumerate_ideals
from bsv.splitting import chart_universe, compatible_with_coordinate, is_splitting

from test_splitting import brute_force_compatible, random_poly


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip())
        assert ok, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_ideal_enumeration(report):
    cells = lambda n: [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    ok = True
    start = time.perf_counter()
    counts = []
    for n in (1, 2, 3):
        got = {S.members for S in enumerate_ideals(n)}
        brute = set()
        for bits in product([0, 1], repeat=n * n):
            chosen = frozenset(c for c, b in zip(cells(n), bits) if b)
            if all((i, j) in chosen for r, s in chosen for i, j in cells(n) if i >= r and j <= s):
                brute.add(chosen)
        ok &= got == brute
        counts.append(len(got))
    elapsed = time.perf_counter() - start
    ok &= counts[:2] == [2, 6] and elapsed < 1.0
    report(1, "ideal enumeration vs brute force", ok, f"counts={counts} {elapsed:.3f}s")


def test_criterion_2_claim_suite(report):
    set_cache_dir(None)
    wanted = ("degree_one", "divisibility", "residue_identity", "rank_drop", "block_zeros", "base_case")
    ok = True
    details = []
    for n in (2, 3):
        start = time.perf_counter()
        summary = verify_all(n)
        elapsed = time.perf_counter() - start
        counts = summary.check_counts()
        ok &= summary.passed and all(counts[k]["fail"] == 0 for k in wanted)
        ok &= all(counts[k]["pass"] > 0 for k in wanted)
        if n == 3:
            ok &= elapsed < 10.0
        details.append(f"n={n}: {summary.passed_count}/{len(summary.chains)} in {elapsed:.2f}s")
    report(2, "claim suite n=2,3", ok, "; ".join(details))


def test_criterion_3_fixtures(report):
    R2, R3 = chart_ring(2), chart_ring(3)
    a = minor_factor(PosetIdeal(2, frozenset({(2, 1)})), 2) == parse_poly("x11*x22", R2)
    b = minor_factor(PosetIdeal.full(3).without((1, 3)), 1) == parse_poly("x13*u21*u32 - x13*u31", R3)
    S_prime = PosetIdeal(2, frozenset({(2, 1)}))
    residue = minor_factor(S_prime, 2).divide_by_variable("x11").substitute("x11", 0)
    c = residue == parse_poly("x22", R2) and verify_step(S_prime, (1, 1)).passed
    report(3, "hand-derived fixtures", a and b and c, f"F2={a} F1={b} residue={c}")


@pytest.mark.slow
def test_criterion_4_n4(report):
    set_cache_dir(None)
    start = time.perf_counter()
    first = verify_all(4, trials=20, seed=DEFAULT_SEED)
    second = verify_all(4, trials=20, seed=DEFAULT_SEED ^ 0xFFFF)
    elapsed = time.perf_counter() - start
    verdicts = lambda s: [(c.passed, [(st.position, {k: v.passed for k, v in st.checks.items()})
                                      for st in c.steps]) for c in s.chains]
    same = verdicts(first) == verdicts(second)
    ok = first.passed and second.passed and same and elapsed < 600
    report(4, "n=4 with randomized rank checks", ok,
           f"{first.passed_count}/{len(first.chains)} ideals, seed flip stable={same}, {elapsed:.1f}s")


def test_criterion_5_mutation(report):
    def drop_one(S, r):
        return frozenset(sorted(delta_support(S, r))[1:])

    def witnessed_failure(summary):
        bad_bases = [c.base_case for c in summary.chains if not c.base_case.passed]
        bad_checks = [ch for c in summary.chains for s in c.steps for ch in s.failures().values()]
        found = bad_bases + bad_checks
        return bool(found) and all(x.witness for x in found)

    mutants = {
        "drop stripe entry": verify_all(2, support_fn=drop_one),
        "flip row inequality": verify_all(2, leq=lambda a, b: a[0] <= b[0] and a[1] <= b[1]),
        "flip column inequality": verify_all(2, leq=lambda a, b: a[0] >= b[0] and a[1] >= b[1]),
    }
    caught = {name: witnessed_failure(s) for name, s in mutants.items()}
    report(5, "mutation sensitivity", all(caught.values()), str(caught))


def test_criterion_6_trace_oracle(report):
    rng = random.Random(DEFAULT_SEED)
    mismatches = 0
    outcomes = {True: 0, False: 0}
    for trial in range(200):
        p = (2, 3)[trial % 2]
        k = rng.randint(1, 10)
        names = [f"v{i}" for i in range(k)]
        R = PolyRing.from_names(",".join(names), GF(p))
        f = random_poly(R, rng, p)
        v = rng.choice(names)
        got = compatible_with_coordinate(f, v, names).compatible
        mismatches += got != brute_force_compatible(f, v, names)
        outcomes[got] += 1
    report(6, "bucketing vs exhaustive multipliers", mismatches == 0,
           f"200 polynomials, mismatches={mismatches}, outcomes={outcomes}")


def test_criterion_7_splitting_fixtures(report):
    ok = True
    for p in (2, 3, 5):
        for n in (1, 2):
            R = chart_ring(n, GF(p))
            f = R.one()
            for g in R.gens:
                f = f * g ** (p - 1)
            universe = chart_universe(n)
            ok &= is_splitting(f, universe)
            ok &= all(compatible_with_coordinate(f, v, universe).compatible for v in universe)
    R, (x, y) = PolyRing.from_names("x,y", GF(2)).with_gens()
    rep = compatible_with_coordinate(x * y + y**2, "x", ["x", "y"])
    counter = not rep.compatible and rep.witness["trace_monomial"] == "y"
    report(7, "splitting fixtures", ok and counter, f"standard={ok} counterexample={rep.witness}")


def test_criterion_8_determinism(report):
    def run(jobs):
        return subprocess.run(
            [sys.executable, "-m", "bsv", "verify", "--n", "3", "--json", "--no-timing", "--jobs", str(jobs)],
            capture_output=True,
        )
    one, eight = run(1), run(8)
    ok = one.returncode == eight.returncode == 0 and one.stdout == eight.stdout
    report(8, "jobs 1 vs 8 byte-identical", ok, f"{len(one.stdout)} bytes")
