"""
Frobenius splittings of the chart
=================================

Over F_p a polynomial f gives a splitting when the trace of f is 1, and
{v = 0} is compatibly split when the trace never leaves (v).
"""

from bsv.poly import GF, PolyRing
from bsv.splitting import (
    CandidateExpr,
    MinorFactor,
    Var,
    compatible_with_coordinate,
    search_candidates,
    simultaneous_report,
    trace_map,
)
from bsv import PosetIdeal, enumerate_ideals

R, (x, y) = PolyRing.from_names("x,y", GF(2)).with_gens()
f = x * y + y**2
print(trace_map(f, ["x", "y"]))
print(compatible_with_coordinate(f, "x", ["x", "y"]).to_json())

# the product of all chart coordinates splits every b[S] at once
c = CandidateExpr(tuple((Var(v), 1) for v in ["u21", "x11", "x12", "x22"]), n=2)
report = simultaneous_report(c, 2, enumerate_ideals(2))
print(report.splits, sum(row["compatibly_split"] for row in report.ideals))

# exhaustive search over products of minors and coordinates
atoms = [MinorFactor(PosetIdeal.empty(2), 1), MinorFactor(PosetIdeal.empty(2), 2),
         Var("u21"), Var("x11"), Var("x12"), Var("x22")]
for cand in search_candidates(2, 2, atoms, 1, enumerate_ideals(2)):
    print(cand.dumps())
