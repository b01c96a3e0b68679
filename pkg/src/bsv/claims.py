"""
Step-by-step verification of the peeling induction.

For an ideal S' and a maximal (s, t) of S = S' + {(s, t)} with s <= t, put
r = s + n - t and M = X + delta_r[S'].  Each step checks that

* F_r[S'] has degree one in x_st and is divisible by it,
* setting x_st = 0 in the quotient gives F_r[S],
* the first r rows of M lose rank once x_st = 0, and the zero blocks that
  force this are really there,
* the conjugated leading minor vanishes numerically at x_st = 0.

Failures are recorded with a witness, never raised.
"""

import hashlib
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import CapacityError, DomainError, NotDivisible
from .matrices import (
    LARGE_PRIME,
    default_cache,
    delta_matrix,
    delta_support,
    det_mod_p,
    find_nonzero_minor,
    minor_factor,
    rank_mod_p,
    set_cache_dir,
    shifted_element,
)
from .poly import NEG_INF, chart_ring
from .poset import PosetIdeal, enumerate_ideals, is_ideal, leq, maximal_elements, peel_sequence

poset_leq = leq

DEFAULT_SEED = int.from_bytes(b"B0REL", "big")
CHECK_NAMES = (
    "degree_at_most_one",
    "degree_one",
    "divisibility",
    "residue_identity",
    "rank_drop",
    "block_zeros",
    "minor_vanishes",
)


@dataclass
class Check:
    passed: bool
    witness: object = None

    def to_json(self):
        out = {"pass": self.passed}
        if not self.passed:
            out["witness"] = self.witness
        return out


PASS = Check(True)


@dataclass
class StepReport:
    S_prime: PosetIdeal
    position: tuple
    r: int
    checks: dict

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return {k: c for k, c in self.checks.items() if not c.passed}

    def to_json(self):
        return {
            "st": list(self.position),
            "r": self.r,
            "S_prime": [list(p) for p in self.S_prime.sorted_members()],
            "checks": {k: self.checks[k].to_json() for k in CHECK_NAMES if k in self.checks},
        }


@dataclass
class ChainReport:
    S: PosetIdeal
    steps: list
    base_case: Check
    seconds: float = field(default=0.0, compare=False)

    @property
    def passed(self):
        return self.base_case.passed and all(s.passed for s in self.steps)

    def to_json(self, timing=True):
        out = {
            "n": self.S.n,
            "ideal": self.S.to_json()["members"],
            "passed": self.passed,
            "base_case": self.base_case.to_json(),
            "steps": [s.to_json() for s in self.steps],
        }
        if timing:
            out["seconds"] = round(self.seconds, 6)
        return out


def step_rng(seed, S_prime, st):
    tag = f"{seed}|{S_prime.n}|{S_prime.sorted_members()}|{tuple(st)}"
    return random.Random(int.from_bytes(hashlib.sha256(tag.encode()).digest()[:8], "big"))


# ---------------------------------------------------------------------------
# numeric path, independent of the symbolic determinant


def numeric_conjugated_minor(M_values, u_values, k, p):
    """det of the leading k x k block of g M g^-1 over F_p, from numeric M and g."""
    n = len(M_values)
    g = [[1 if i == j else (u_values.get((i + 1, j + 1), 0) if i > j else 0) for j in range(n)]
         for i in range(n)]
    ginv = [[0] * n for _ in range(n)]
    for i in range(n):
        ginv[i][i] = 1
        for j in range(i - 1, -1, -1):
            ginv[i][j] = -sum(g[i][m] * ginv[m][j] for m in range(j, i)) % p
    gm = [[sum(g[i][m] * M_values[m][j] for m in range(n)) % p for j in range(n)] for i in range(k)]
    block = [[sum(gm[i][m] * ginv[m][j] for m in range(n)) % p for j in range(k)] for i in range(k)]
    return det_mod_p(block, p)


def numeric_minor_factor(S, r, point, p, support_fn=delta_support):
    """F_r[S] evaluated at ``point`` by numeric linear algebra over F_p."""
    n = S.n
    M = shifted_element(S, r, support_fn)
    M_values = M.evaluate(point, p)
    u_values = {(i, j): point[f"u{i}{j}"] % p for i in range(1, n + 1) for j in range(1, i)}
    return numeric_conjugated_minor(M_values, u_values, min(r, n), p)


# ---------------------------------------------------------------------------
# base case and steps


def verify_base_case(S, support_fn=delta_support):
    """delta_r[S] = 0 for every r <= n, for S inside the strict lower triangle."""
    if S.upper_members():
        raise DomainError(f"{S} meets the upper triangle; b[S] != b")
    for r in range(1, S.n + 1):
        delta = delta_matrix(S, r, support_fn)
        if not delta.is_zero():
            return Check(False, {"r": r, "support": sorted(map(list, delta.support))})
    return PASS


def _first_term(poly):
    return str(poly.term(poly.sorted_terms()[0][0]))


def verify_step(S_prime, st, support_fn=delta_support, leq=leq, rank_mode="auto",
                trials=20, seed=DEFAULT_SEED, p=LARGE_PRIME):
    """Check every claim of one peeling step; returns a :class:`StepReport`."""
    n = S_prime.n
    s, t = st
    if tuple(st) in S_prime.members:
        raise DomainError(f"{tuple(st)} already lies in S'")
    S = S_prime.with_member(st)
    if not is_ideal(S.members, n, leq=leq):
        raise DomainError(f"S' + {tuple(st)} is not an ideal")
    if tuple(st) not in maximal_elements(S, leq):
        raise DomainError(f"{tuple(st)} is not maximal in S")
    if s > t:
        raise DomainError(f"peeled element {tuple(st)} lies below the diagonal")
    r = s + n - t
    assert 1 <= r <= n, "peel levels never exceed n"

    ring = chart_ring(n)
    xv = f"x{s}{t}"
    checks = {}

    F_prime = minor_factor(S_prime, r, support_fn)
    F = minor_factor(S, r, support_fn)

    deg = F_prime.degree_in(xv)
    checks["degree_at_most_one"] = PASS if deg <= 1 else Check(False, {
        "degree": deg, "term": _first_term(F_prime.coefficient_in(xv, deg)) + f"*{xv}^{deg}",
    })
    if deg == 1:
        checks["degree_one"] = PASS
    else:
        checks["degree_one"] = Check(False, {
            "degree": "-inf" if deg == NEG_INF else deg, "factor": str(F_prime),
        })

    quotient = None
    try:
        quotient = F_prime.divide_by_variable(xv)
        checks["divisibility"] = PASS
    except NotDivisible as exc:
        checks["divisibility"] = Check(False, {"term": str(exc.witness), "factor": str(F_prime)})

    if quotient is None:
        checks["residue_identity"] = Check(False, {"reason": "no quotient"})
    else:
        residue = quotient.substitute(xv, 0)
        diff = residue - F
        checks["residue_identity"] = PASS if not diff else Check(False, {
            "residue": str(residue), "expected": str(F), "first_difference": _first_term(diff),
        })

    M = shifted_element(S_prime, r, support_fn, ring)
    top = M.leading(r, n).substitute(xv, 0)

    mode = rank_mode
    if mode == "auto":
        mode = "symbolic" if n <= 3 else "randomized"
    rng = step_rng(seed, S_prime, st)
    if mode == "symbolic":
        hit = find_nonzero_minor(top, r)
        checks["rank_drop"] = PASS if hit is None else Check(False, {
            "rows": [i + 1 for i in hit[0]], "cols": [j + 1 for j in hit[1]],
        })
    elif mode == "randomized":
        best = 0
        for _ in range(trials):
            point = {name: rng.randrange(p) for name in ring.names}
            best = max(best, rank_mod_p(top.evaluate(point, p), p))
        checks["rank_drop"] = PASS if best < r else Check(False, {"rank": best, "r": r})
    else:
        raise DomainError(f"unknown rank mode {rank_mode!r}")

    bad = None
    for i in range(s, r + 1):
        for j in range(1, t + 1):
            if top[i - 1, j - 1]:
                bad = {"position": [i, j], "entry": str(top[i - 1, j - 1])}
                break
        if bad:
            break
    checks["block_zeros"] = PASS if bad is None else Check(False, bad)

    vanish = PASS
    for _ in range(trials):
        point = {name: rng.randrange(p) for name in ring.names}
        point[xv] = 0
        val = numeric_conjugated_minor(
            M.evaluate(point, p),
            {(i, j): point[f"u{i}{j}"] for i in range(1, n + 1) for j in range(1, i)},
            r, p,
        )
        if val:
            vanish = Check(False, {"point": point, "value": val})
            break
    checks["minor_vanishes"] = vanish

    return StepReport(S_prime, tuple(st), r, checks)


def verify_chain(S, support_fn=delta_support, leq=leq, rank_mode="auto",
                 trials=20, seed=DEFAULT_SEED):
    """Run the induction for S: base case on the unpeelable remainder, then
    every step in build-up order (reverse of the peel sequence)."""
    start = time.perf_counter()
    peel = peel_sequence(S, leq=leq)
    remainder = S
    for st, _ in peel:
        remainder = remainder.without(st)
    stuck = remainder.upper_members()
    if stuck:
        base = Check(False, {"unpeeled": [list(p) for p in stuck]})
    else:
        base = verify_base_case(remainder, support_fn)
    steps = []
    current = remainder
    for st, _ in reversed(peel):
        steps.append(verify_step(current, st, support_fn=support_fn, leq=leq,
                                 rank_mode=rank_mode, trials=trials, seed=seed))
        current = current.with_member(st)
    return ChainReport(S, steps, base, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# all ideals


@dataclass
class Summary:
    n: int
    chains: list
    seconds: float = 0.0
    cache: dict = None

    @property
    def passed(self):
        return all(c.passed for c in self.chains)

    @property
    def passed_count(self):
        return sum(c.passed for c in self.chains)

    def check_counts(self):
        counts = {name: [0, 0] for name in CHECK_NAMES + ("base_case",)}
        for chain in self.chains:
            counts["base_case"][0 if chain.base_case.passed else 1] += 1
            for step in chain.steps:
                for name, check in step.checks.items():
                    counts[name][0 if check.passed else 1] += 1
        return {k: {"pass": v[0], "fail": v[1]} for k, v in counts.items()}

    def to_json(self, timing=True):
        out = {
            "schema": "1",
            "n": self.n,
            "passed": self.passed,
            "ideals_total": len(self.chains),
            "ideals_passed": self.passed_count,
            "checks": self.check_counts(),
            "chains": [c.to_json(timing) for c in self.chains],
        }
        if timing:
            out["timing"] = {"seconds": round(self.seconds, 6), "cache": self.cache}
        return out


def _chain_worker(args):
    members, n, rank_mode, trials, seed, cache_dir = args
    if cache_dir is not None and default_cache().directory is None:
        set_cache_dir(cache_dir)
    S = PosetIdeal(n, frozenset(members))
    return verify_chain(S, rank_mode=rank_mode, trials=trials, seed=seed)


def verify_all(n, max_n=4, rank_mode="auto", trials=20, seed=DEFAULT_SEED, jobs=1,
               support_fn=delta_support, leq=leq):
    """verify_chain over every ideal of [1,n]^2, in canonical ideal order."""
    if n > max_n:
        raise CapacityError(f"n={n} exceeds max_n={max_n}")
    start = time.perf_counter()
    ideals = enumerate_ideals(n, max_n=max(max_n, n), leq=leq)
    mutated = support_fn is not delta_support or leq is not poset_leq
    if jobs > 1 and not mutated:
        cache_dir = default_cache().directory
        work = [(S.members, n, rank_mode, trials, seed, cache_dir) for S in ideals]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chains = list(pool.map(_chain_worker, work))
    else:
        chains = [verify_chain(S, support_fn=support_fn, leq=leq, rank_mode=rank_mode,
                               trials=trials, seed=seed) for S in ideals]
    cache = default_cache()
    return Summary(n, chains, time.perf_counter() - start,
                   {"hits": cache.hits, "misses": cache.misses})
