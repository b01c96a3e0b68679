"""
Order ideals of the index poset [1,n] x [1,n].

The order is ``(i, j) <= (r, s)  iff  i >= r and j <= s``: moving down a
column or left along a row goes down in the poset, so the minimum is the
bottom-left corner (n, 1) and the maximum the top-right corner (1, n).
An ideal S cuts out the coordinate subspace b[S] of upper triangular matrices
vanishing on S.  Positions are 1-based throughout.
"""

import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import NamedTuple

from .errors import CapacityError, DomainError
from .poly import is_prime


class Position(NamedTuple):
    i: int
    j: int

    def level(self, n):
        """Stripe index ``i + n - j``; equals 1 at (1, n) and n on the diagonal."""
        return self.i + n - self.j

    def __str__(self):
        return f"({self.i},{self.j})"


def _as_position(p, n):
    pos = Position(*p)
    if not (1 <= pos.i <= n and 1 <= pos.j <= n):
        raise DomainError(f"position {tuple(pos)} is outside [1,{n}]^2")
    return pos


def leq(a, b):
    """The partial order on positions."""
    return a[0] >= b[0] and a[1] <= b[1]


def all_positions(n):
    return [Position(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]


def upper_positions(n):
    return [Position(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def is_ideal(members, n, leq=leq):
    """True iff ``members`` is downward closed in [1,n]^2."""
    members = {_as_position(p, n) for p in members}
    for a in all_positions(n):
        if a in members:
            continue
        if any(leq(a, b) for b in members):
            return False
    return True


@dataclass(frozen=True)
class PosetIdeal:
    """A downward-closed subset of [1,n]^2.

    The constructor checks ideality against the true order.  Use
    :meth:`unchecked` to build sets for experiments with other orders.
    """

    n: int
    members: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        members = frozenset(_as_position(p, self.n) for p in self.members)
        object.__setattr__(self, "members", members)
        if not is_ideal(members, self.n):
            raise DomainError(f"{sorted(map(tuple, members))} is not an ideal for n={self.n}")

    @classmethod
    def unchecked(cls, n, members):
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "members", frozenset(_as_position(p, n) for p in members))
        return obj

    @classmethod
    def empty(cls, n):
        return cls(n, frozenset())

    @classmethod
    def full(cls, n):
        return cls(n, frozenset(all_positions(n)))

    @classmethod
    def lower(cls, n):
        """The strict lower triangle: b[S] is all of b."""
        return cls(n, frozenset(Position(i, j) for i in range(1, n + 1) for j in range(1, i)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.sorted_members())

    def __contains__(self, pos):
        return tuple(pos) in self.members

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.n, len(self.members), self.sorted_members())

    def sorted_members(self):
        return sorted(self.members)

    def upper_members(self):
        return [p for p in self.sorted_members() if p.i <= p.j]

    def without(self, pos):
        return type(self).unchecked(self.n, self.members - {Position(*pos)})

    def with_member(self, pos):
        return type(self).unchecked(self.n, self.members | {Position(*pos)})

    def to_json(self):
        return {"n": self.n, "members": [list(p) for p in self.sorted_members()]}

    @classmethod
    def from_json(cls, obj, n=None):
        """Accepts ``{"n": .., "members": [[i,j],..]}`` or a bare member list (needs ``n``)."""
        if isinstance(obj, dict):
            n_obj = obj.get("n")
            if n is not None and n_obj is not None and n != n_obj:
                raise DomainError(f"ideal is for n={n_obj}, expected n={n}")
            n = n_obj if n_obj is not None else n
            obj = obj.get("members", [])
        if n is None:
            raise DomainError("ideal JSON needs n")
        try:
            members = [tuple(int(c) for c in p) for p in obj]
        except (TypeError, ValueError):
            raise DomainError(f"cannot read ideal members from {obj!r}") from None
        if any(len(p) != 2 for p in members):
            raise DomainError("ideal members must be [i, j] pairs")
        return cls(n, frozenset(members))

    def __str__(self):
        return "{" + ",".join(str(p) for p in self.sorted_members()) + "}"


def _grow_ideals(n, leq=leq):
    """All ideals, grown from the empty set one admissible element at a time."""
    positions = all_positions(n)
    below = {b: [a for a in positions if a != b and leq(a, b)] for b in positions}
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for ideal in frontier:
            for b in positions:
                if b in ideal or not all(a in ideal for a in below[b]):
                    continue
                grown = ideal | {b}
                if grown not in seen:
                    seen.add(grown)
                    nxt.append(grown)
        frontier = nxt
    return seen


def _brute_force_ideals(n, leq=leq):
    positions = all_positions(n)
    found = []
    for mask in range(1 << len(positions)):
        members = [p for k, p in enumerate(positions) if mask >> k & 1]
        if is_ideal(members, n, leq=leq):
            found.append(frozenset(members))
    return found


def enumerate_ideals(n, max_n=5, leq=leq):
    """Every ideal of [1,n]^2, ordered by size then by sorted member list.

    Exhaustive subset filtering for n <= 3, incremental growth above.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > max_n:
        raise CapacityError(f"n={n} exceeds the enumeration cap max_n={max_n}")
    sets = _brute_force_ideals(n, leq) if n <= 3 else _grow_ideals(n, leq)
    ideals = [PosetIdeal.unchecked(n, s) for s in sets]
    ideals.sort(key=PosetIdeal.sort_key)
    return ideals


def maximal_elements(S, leq=leq):
    """Members of S with no strictly larger member, in row-major order."""
    members = S.sorted_members()
    return [a for a in members if not any(b != a and leq(a, b) for b in members)]


def peel_sequence(S, leq=leq):
    """Removal order ``[(position, r), ...]`` taking S down to the strict lower triangle.

    At each stage the eligible elements are the maximal (s, t) with s <= t;
    the one with smallest ``r = s + n - t`` is removed, ties broken by (s, t).
    Stops early if no eligible element remains (only possible under a
    mutated order).
    """
    if not is_ideal(S.members, S.n, leq=leq):
        raise DomainError(f"{S} is not an ideal")
    n = S.n
    cur = S
    seq = []
    while True:
        eligible = [m for m in maximal_elements(cur, leq) if m.i <= m.j]
        if not eligible:
            break
        st = min(eligible, key=lambda m: (m.i + n - m.j, m))
        seq.append((st, st.i + n - st.j))
        cur = cur.without(st)
    return seq


def free_positions(S):
    """Coordinates of b[S]: upper positions outside S, row-major."""
    return [p for p in upper_positions(S.n) if p not in S.members]


def validate_blocks(blocks):
    sizes = tuple(int(b) for b in blocks)
    if not sizes or any(b < 1 for b in sizes):
        raise DomainError(f"block sizes must be positive integers, got {list(blocks)}")
    return sizes


def parabolic_to_ideal(blocks):
    """Ideal S with b[S] = n_P for the standard parabolic with the given diagonal blocks."""
    sizes = validate_blocks(blocks)
    n = sum(sizes)
    block_of = []
    for k, size in enumerate(sizes):
        block_of.extend([k] * size)
    members = {
        Position(i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i > j or block_of[i - 1] == block_of[j - 1]
    }
    return PosetIdeal(n, frozenset(members))


def is_coordinate_lie_ideal(upper_subset, n):
    """Is the span of ``E_ij`` over ``upper_subset`` a Lie ideal of b?

    Brackets every basis element of b against every element of the subset
    with ``[E_ij, E_kl] = d_jk E_il - d_li E_kj``.
    """
    span = {_as_position(p, n) for p in upper_subset}
    if any(p.i > p.j for p in span):
        raise DomainError("upper_subset must lie on or above the diagonal")
    for (a, b), (k, l) in product(upper_positions(n), span):
        bracket = {}
        if b == k:
            bracket[(a, l)] = bracket.get((a, l), 0) + 1
        if l == a:
            bracket[(k, b)] = bracket.get((k, b), 0) - 1
        for pos, c in bracket.items():
            if c and pos not in span:
                return False
    return True


def coordinate_lie_ideal_census(n, p=101, trials=20, seed=0):
    """Compare coordinate subspaces of b that are Lie ideals or B-stable with
    the family b[S].  Scans every subset of upper positions; backs
    ``ideals --census``."""
    ups = upper_positions(n)
    family = {frozenset(free_positions(S)) for S in enumerate_ideals(n)}
    everything = set(all_positions(n))
    lie, stable = set(), set()
    for size in range(len(ups) + 1):
        for subset in combinations(ups, size):
            subset = frozenset(subset)
            if is_coordinate_lie_ideal(subset, n):
                lie.add(subset)
            zeros = sorted(everything - subset)
            if _b_invariance(n, sorted(subset), zeros, p, trials, seed).passed:
                stable.add(subset)

    def listing(sets):
        return sorted(sorted(map(list, s)) for s in sets)

    return {
        "n": n,
        "subsets_scanned": 2 ** len(ups),
        "b_S_family": len(family),
        "coordinate_lie_ideals": len(lie),
        "b_stable": len(stable),
        "b_stable_lie_ideals": len(lie & stable),
        "b_stable_lie_ideals_not_b_S": listing((lie & stable) - family),
        "b_S_not_b_stable_lie_ideals": listing(family - (lie & stable)),
        "lie_ideals_not_b_stable": listing(lie - stable),
    }


# ---------------------------------------------------------------------------
# randomized B-invariance


def _random_borel(n, p, rng):
    while True:
        b = [[rng.randrange(p) if j >= i else 0 for j in range(n)] for i in range(n)]
        if all(b[i][i] for i in range(n)):
            return b


def _invert_upper_mod_p(b, p):
    n = len(b)
    inv = [[0] * n for _ in range(n)]
    for i in range(n - 1, -1, -1):
        d = pow(b[i][i], -1, p)
        inv[i][i] = d
        for j in range(i + 1, n):
            acc = sum(b[i][k] * inv[k][j] for k in range(i + 1, j + 1))
            inv[i][j] = -acc * d % p
    return inv


@dataclass
class InvarianceReport:
    passed: bool
    trials: int
    witness: dict = None

    def to_json(self):
        return {"passed": self.passed, "trials": self.trials, "witness": self.witness}


def check_b_invariance(S, p, trials=50, seed=0):
    """Conjugate the basis of b[S] by random invertible upper triangular
    matrices over F_p and check the result still vanishes on S."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if trials < 1:
        raise DomainError("trials must be >= 1")
    return _b_invariance(S.n, free_positions(S), S.sorted_members(), p, trials, seed)


def _b_invariance(n, basis, zeros, p, trials, seed):
    rng = random.Random(seed)
    for trial in range(trials):
        b = _random_borel(n, p, rng)
        binv = _invert_upper_mod_p(b, p)
        for k, l in basis:
            # b E_kl b^-1 has (i, j) entry b[i][k] * binv[l][j]
            for i, j in zeros:
                if b[i - 1][k - 1] * binv[l - 1][j - 1] % p:
                    return InvarianceReport(False, trial + 1, {
                        "trial": trial, "basis": [k, l], "position": [i, j], "b": b,
                    })
    return InvarianceReport(True, trials)
