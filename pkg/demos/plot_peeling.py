"""
Checking the peeling induction
==============================

Each step adds a maximal (s, t) back to S' and compares F_r[S'] with F_r[S]
at r = s + n - t.  The quotient by x_st, evaluated at x_st = 0, should give
back F_r[S].
"""

from bsv import PosetIdeal, verify_all, verify_chain, verify_step

S_prime = PosetIdeal(2, frozenset({(2, 1)}))
step = verify_step(S_prime, (1, 1))
print(step.r, {k: c.passed for k, c in step.checks.items()})

chain = verify_chain(PosetIdeal.full(3))
for s in chain.steps:
    print(s.position, s.r, s.passed)

for n in (1, 2, 3):
    summary = verify_all(n)
    print(n, summary.passed_count, len(summary.chains))

# a broken shift matrix is noticed, with a witness
broken = verify_all(2, support_fn=lambda S, r: frozenset())
for c in broken.chains:
    for s in c.steps:
        for name, check in s.failures().items():
            print(c.S.sorted_members(), s.position, name, check.witness)
