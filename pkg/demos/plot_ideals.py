"""
Order ideals of the square grid
===============================

Positions (i, j) of an n x n matrix are ordered by (i, j) <= (r, s) when
i >= r and j <= s, so the bottom-left corner is the minimum.  Downward
closed sets S pick out the subspaces b[S] of upper triangular matrices.
"""

from bsv import enumerate_ideals, parabolic_to_ideal
from bsv.poset import coordinate_lie_ideal_census, free_positions, peel_sequence

# counts grow like central binomials
for n in range(1, 5):
    print(n, len(enumerate_ideals(n)))

# the six ideals for n = 2 and the free positions of each b[S]
for S in enumerate_ideals(2):
    print(S.sorted_members(), "->", free_positions(S))

# a parabolic with blocks (1, 2): its nilradical is what stays free
S = parabolic_to_ideal((1, 2))
print(free_positions(S))

# peeling removes maximal elements above the diagonal, one level at a time
for st, r in peel_sequence(S):
    print("remove", st, "at level", r)

# every B-stable coordinate Lie ideal of b is some b[S]
census = coordinate_lie_ideal_census(3)
print(census["b_S_family"], census["b_stable_lie_ideals"])
