"""
Leading minors after a generic conjugation
==========================================

F_r[S] is the leading min(r, n) minor of g (X + delta_r[S]) g^-1, with g
lower unitriangular and X generic in b[S].  Its variables are the u_ij of
g and the x_ij of X.
"""

from bsv import PosetIdeal, minor_factor
from bsv.matrices import generic_conjugator, shifted_element

n = 3
g, ginv = generic_conjugator(n)
print(g.to_json())
print(ginv.to_json())

S = PosetIdeal.full(3).without((1, 3))
print(shifted_element(S, 1).to_json())
print(minor_factor(S, 1))

# at level r = n conjugation drops out and F_n is a plain determinant
for T in [PosetIdeal.empty(2), PosetIdeal(2, frozenset({(2, 1)})), PosetIdeal.full(2)]:
    print(T.sorted_members(), minor_factor(T, 2))
