import json
import random

import pytest

from bsv.claims import (
    CHECK_NAMES,
    DEFAULT_SEED,
    numeric_minor_factor,
    verify_all,
    verify_base_case,
    verify_chain,
    verify_step,
)
from bsv.errors import CapacityError, DomainError
from bsv.matrices import LARGE_PRIME, delta_support, minor_factor
from bsv.poly import chart_ring
from bsv.poset import PosetIdeal, enumerate_ideals, parabolic_to_ideal, peel_sequence


def ideal(n, *members):
    return PosetIdeal(n, frozenset(members))


def drop_one_stripe_entry(S, r):
    support = sorted(delta_support(S, r))
    return frozenset(support[1:])


def test_base_case():
    assert verify_base_case(ideal(2, (2, 1))).passed
    assert verify_base_case(PosetIdeal.empty(3)).passed
    assert verify_base_case(PosetIdeal.lower(3)).passed
    with pytest.raises(DomainError):
        verify_base_case(ideal(2, (2, 1), (1, 1)))


def test_step_n2_first():
    rep = verify_step(ideal(2, (2, 1)), (1, 1))
    assert rep.r == 2 and rep.passed
    assert set(rep.checks) == set(CHECK_NAMES)


def test_step_n2_second():
    S_prime = ideal(2, (2, 1), (1, 1))
    rep = verify_step(S_prime, (2, 2))
    assert rep.passed
    assert str(minor_factor(S_prime, 2)) == "x22"
    assert minor_factor(S_prime.with_member((2, 2)), 2) == 1


def test_step_n3_corner():
    S_prime = PosetIdeal.full(3).without((1, 3))
    rep = verify_step(S_prime, (1, 3))
    assert rep.r == 1 and rep.passed
    assert str(minor_factor(PosetIdeal.full(3), 1)) == "u21*u32 - u31"


def test_step_preconditions():
    with pytest.raises(DomainError):
        verify_step(ideal(2, (2, 1)), (2, 1))       # already present
    with pytest.raises(DomainError):
        verify_step(PosetIdeal.empty(2), (1, 1))    # S' + (1,1) is not an ideal
    with pytest.raises(DomainError):
        verify_step(PosetIdeal.empty(2), (2, 1))    # below the diagonal


def test_chain_full_n2():
    chain = verify_chain(PosetIdeal.full(2))
    assert chain.passed
    assert [s.position for s in chain.steps] == [(2, 2), (1, 1), (1, 2)]
    # every intermediate set is an ideal, so both diagonal orders are legitimate
    for order in ([(1, 1), (2, 2), (1, 2)], [(2, 2), (1, 1), (1, 2)]):
        cur = ideal(2, (2, 1))
        for st in order:
            assert verify_step(cur, st).passed
            cur = cur.with_member(st)


def test_chain_lower_triangle():
    chain = verify_chain(PosetIdeal.lower(3))
    assert chain.steps == [] and chain.passed


def test_chain_borel_case():
    assert verify_chain(parabolic_to_ideal((1, 1, 1))).passed


def test_chain_steps_are_reversed_peel():
    S = PosetIdeal.full(3)
    chain = verify_chain(S)
    assert [s.position for s in chain.steps] == [st for st, _ in reversed(peel_sequence(S))]


def test_verify_all_small():
    one = verify_all(1)
    assert one.passed and len(one.chains) == 2 and sum(len(c.steps) for c in one.chains) == 1
    two = verify_all(2)
    assert two.passed and two.passed_count == 6


def test_verify_all_n3():
    summary = verify_all(3)
    assert summary.passed and summary.passed_count == 20
    counts = summary.check_counts()
    assert all(c["fail"] == 0 for c in counts.values())
    assert counts["degree_one"]["pass"] == 39


def test_verify_all_cap():
    with pytest.raises(CapacityError):
        verify_all(5)


def test_report_json_shape():
    chain = verify_chain(ideal(2, (2, 1), (1, 1)))
    obj = json.loads(json.dumps(chain.to_json(timing=False)))
    assert obj["ideal"] == [[1, 1], [2, 1]]
    assert obj["steps"][0]["st"] == [1, 1] and obj["steps"][0]["r"] == 2
    assert obj["base_case"] == {"pass": True}
    assert "seconds" not in obj


@pytest.mark.parametrize("n", [2, 3])
def test_identities_hold_at_random_points(n):
    """Re-derive each step numerically: F' = x_st * Q with Q(x_st=0) = F."""
    rng = random.Random(DEFAULT_SEED)
    p = LARGE_PRIME
    names = chart_ring(n).names
    for S in enumerate_ideals(n):
        cur = S
        for (s, t), r in peel_sequence(S):
            S_prime = cur.without((s, t))
            xv = f"x{s}{t}"
            Q = minor_factor(S_prime, r).divide_by_variable(xv)
            for _ in range(20):
                point = {v: rng.randrange(p) for v in names}
                assert numeric_minor_factor(S_prime, r, point, p) == minor_factor(S_prime, r).evaluate(point, p)
                assert numeric_minor_factor(S_prime, r, point, p) == point[xv] * Q.evaluate(point, p) % p
                point[xv] = 0
                assert Q.evaluate(point, p) == numeric_minor_factor(cur, r, point, p)
            cur = S_prime


@pytest.mark.parametrize("p", [2, 3, 5])
def test_residue_identity_mod_p(p):
    for S in enumerate_ideals(3):
        cur = S
        for (s, t), r in peel_sequence(S):
            S_prime = cur.without((s, t))
            xv = f"x{s}{t}"
            residue = minor_factor(S_prime, r).divide_by_variable(xv).substitute(xv, 0)
            assert residue.reduce_mod_p(p) == minor_factor(cur, r).reduce_mod_p(p)
            cur = S_prime


def test_mutation_dropped_stripe_entry():
    summary = verify_all(2, support_fn=drop_one_stripe_entry)
    assert not summary.passed
    failing = [s for c in summary.chains for s in c.steps if not s.passed]
    assert failing
    assert all(check.witness for s in failing for check in s.failures().values())


def test_mutation_flipped_order():
    summary = verify_all(2, leq=lambda a, b: a[0] <= b[0] and a[1] <= b[1])
    assert not summary.passed
    bases = [c.base_case for c in summary.chains if not c.base_case.passed]
    steps = [s for c in summary.chains for s in c.steps if not s.passed]
    assert bases or steps
    assert all(b.witness for b in bases)
    assert all(check.witness for s in steps for check in s.failures().values())


def test_mutation_flipped_column_order():
    summary = verify_all(2, leq=lambda a, b: a[0] >= b[0] and a[1] >= b[1])
    failed = {name for c in summary.chains for s in c.steps for name in s.failures()}
    assert failed


def test_seed_does_not_change_verdicts_n3():
    a = verify_all(3, rank_mode="randomized", seed=1)
    b = verify_all(3, rank_mode="randomized", seed=2)
    assert a.to_json(False)["checks"] == b.to_json(False)["checks"]


@pytest.mark.slow
def test_verify_all_n4():
    summary = verify_all(4)
    assert summary.passed and summary.passed_count == 70
