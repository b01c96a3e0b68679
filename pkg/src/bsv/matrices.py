"""
Matrices over the chart ring and the determinant factors F_r[S].

F_r[S] is the leading min(r, n) x min(r, n) minor of g (X + delta_r[S]) g^-1,
where g is the generic lower unitriangular matrix (coordinates u_ij) and X the
generic element of b[S] (coordinates x_ij at the free positions).

Matrix indices are 0-based (``A[i, j]``); poset positions stay 1-based.
"""

import hashlib
import json
import os
import random
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path

from .errors import DomainError
from .poly import ZZ, Domain, Polynomial, chart_ring, parse_poly
from .poset import Position, PosetIdeal, free_positions

LARGE_PRIME = 2**31 - 1


class PolyMatrix:
    """Dense matrix of polynomials sharing one ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring, entries):
        entries = tuple(tuple(ring(e) for e in row) for row in entries)
        if not entries or not entries[0]:
            raise DomainError("matrix dimensions must be positive")
        if any(len(row) != len(entries[0]) for row in entries):
            raise DomainError("ragged matrix rows")
        self.ring = ring
        self.rows = len(entries)
        self.cols = len(entries[0])
        self.entries = entries

    @classmethod
    def zeros(cls, ring, rows, cols=None):
        z = ring.zero()
        return cls(ring, [[z] * (cols or rows) for _ in range(rows)])

    @classmethod
    def identity(cls, ring, n):
        z, one = ring.zero(), ring.one()
        return cls(ring, [[one if i == j else z for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_square(self):
        return self.rows == self.cols

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DomainError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix(self.ring, [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        ])

    def __sub__(self, other):
        if self.shape != other.shape:
            raise DomainError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix(self.ring, [
            [a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)
        ])

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise DomainError(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.ring.zero()
        out = []
        for row in self.entries:
            new = []
            for j in range(other.cols):
                acc = zero
                for k, a in enumerate(row):
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                new.append(acc)
            out.append(new)
        return PolyMatrix(self.ring, out)

    def submatrix(self, rows, cols):
        return PolyMatrix(self.ring, [[self.entries[i][j] for j in cols] for i in rows])

    def leading(self, r, c=None):
        c = r if c is None else c
        return self.submatrix(range(r), range(c))

    def transpose(self):
        return PolyMatrix(self.ring, list(zip(*self.entries)))

    def map(self, fn):
        return PolyMatrix(self.ring, [[fn(e) for e in row] for row in self.entries])

    def substitute(self, v, c):
        return self.map(lambda e: e.substitute(v, c))

    def evaluate(self, point, p):
        return [[e.evaluate(point, p) if e else 0 for e in row] for row in self.entries]

    def is_zero(self):
        return all(not e for row in self.entries for e in row)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"PolyMatrix[{body}]"

    def to_json(self):
        return [[str(e) for e in row] for row in self.entries]


# ---------------------------------------------------------------------------
# generic matrices


def generic_unitriangular_lower(n, ring=None):
    ring = ring or chart_ring(n)
    z, one = ring.zero(), ring.one()
    return PolyMatrix(ring, [
        [one if i == j else (ring.var(f"u{i + 1}{j + 1}") if i > j else z) for j in range(n)]
        for i in range(n)
    ])


def _unitriangular_side(A):
    n = A.rows
    one = A.ring.one()
    if not A.is_square() or any(A[i, i] != one for i in range(n)):
        return None
    if all(not A[i, j] for i in range(n) for j in range(i + 1, n)):
        return "lower"
    if all(not A[i, j] for i in range(n) for j in range(i)):
        return "upper"
    return None


def invert_unitriangular(A):
    """Exact inverse of a lower or upper unitriangular polynomial matrix."""
    side = _unitriangular_side(A)
    if side is None:
        raise DomainError("matrix is not unitriangular")
    if side == "upper":
        return invert_unitriangular(A.transpose()).transpose()
    n = A.rows
    ring = A.ring
    inv = [[ring.zero()] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = ring.one()
        for j in range(i - 1, -1, -1):
            acc = ring.zero()
            for k in range(j, i):
                if A[i, k] and inv[k][j]:
                    acc = acc + A[i, k] * inv[k][j]
            inv[i][j] = -acc
    return PolyMatrix(ring, inv)


@lru_cache(maxsize=None)
def _generic_pair(n, domain):
    ring = chart_ring(n, domain)
    g = generic_unitriangular_lower(n, ring)
    return g, invert_unitriangular(g)


def generic_conjugator(n, domain=ZZ):
    """``(g, g^-1)`` for the generic big-cell element; computed once per n."""
    return _generic_pair(n, domain)


def generic_borel_element(S, ring=None):
    """Upper triangular matrix with ``x_ij`` at the free positions of S."""
    n = S.n
    ring = ring or chart_ring(n)
    free = set(free_positions(S))
    z = ring.zero()
    return PolyMatrix(ring, [
        [ring.var(f"x{i}{j}") if (i, j) in free else z for j in range(1, n + 1)]
        for i in range(1, n + 1)
    ])


@dataclass(frozen=True)
class DeltaMatrix:
    """0/1 matrix with ones on ``support``: the stripe ``i + n - j = r`` of S's upper members."""

    n: int
    r: int
    support: frozenset

    def matrix(self, ring=None):
        ring = ring or chart_ring(self.n)
        z, one = ring.zero(), ring.one()
        return PolyMatrix(ring, [
            [one if (i, j) in self.support else z for j in range(1, self.n + 1)]
            for i in range(1, self.n + 1)
        ])

    def is_zero(self):
        return not self.support


def delta_support(S, r):
    return frozenset(
        Position(i, j) for i, j in S.members if i <= j and i + S.n - j == r
    )


def delta_matrix(S, r, support_fn=delta_support):
    if not 1 <= r <= 2 * S.n - 1:
        raise DomainError(f"level r={r} outside [1, {2 * S.n - 1}]")
    return DeltaMatrix(S.n, r, frozenset(support_fn(S, r)))


def shifted_element(S, r, support_fn=delta_support, ring=None):
    """M = X + delta_r[S] for the generic X in b[S]."""
    ring = ring or chart_ring(S.n)
    return generic_borel_element(S, ring) + delta_matrix(S, r, support_fn).matrix(ring)


def conjugate(g, M, ginv=None):
    """g M g^-1 for unitriangular g."""
    if not (g.is_square() and M.is_square()) or g.rows != M.rows:
        raise DomainError(f"cannot conjugate {M.shape} by {g.shape}")
    if g.ring != M.ring:
        raise DomainError("g and M live in different rings")
    if ginv is None:
        ginv = invert_unitriangular(g)
    return g @ M @ ginv


# ---------------------------------------------------------------------------
# determinants


def determinant(A, method="auto"):
    """Exact determinant.

    ``method`` is ``"cofactor"`` (Laplace expansion with memoized minors),
    ``"bareiss"`` (fraction-free elimination with exact division) or
    ``"auto"``: cofactor up to 4 x 4, Bareiss above.
    """
    if not A.is_square():
        raise DomainError(f"determinant of non-square {A.shape} matrix")
    if method == "auto":
        method = "cofactor" if A.rows <= 4 else "bareiss"
    if method == "cofactor":
        return _det_cofactor(A)
    if method == "bareiss":
        return _det_bareiss(A)
    raise DomainError(f"unknown determinant method {method!r}")


def _det_cofactor(A):
    n = A.rows
    ring = A.ring
    # minors[cols] = det of the last len(cols) rows restricted to cols
    minors = {(): ring.one()}
    for size in range(1, n + 1):
        row = n - size
        nxt = {}
        for cols in combinations(range(n), size):
            acc = ring.zero()
            for pos, c in enumerate(cols):
                a = A[row, c]
                if not a:
                    continue
                sub = minors[cols[:pos] + cols[pos + 1:]]
                if not sub:
                    continue
                term = a * sub
                acc = acc - term if pos % 2 else acc + term
            nxt[cols] = acc
        minors = nxt
    return minors[tuple(range(n))]


def _det_bareiss(A):
    n = A.rows
    ring = A.ring
    M = [list(row) for row in A.entries]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return ring.zero()
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num.exquo(prev) if k else num
            M[i][k] = ring.zero()
        prev = pivot
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


def find_nonzero_minor(A, k):
    """First ``(rows, cols)`` (0-based) whose k x k minor is a nonzero polynomial, else None."""
    if k <= 0:
        return ((), ())
    if k > min(A.rows, A.cols):
        return None
    for rows in combinations(range(A.rows), k):
        for cols in combinations(range(A.cols), k):
            if determinant(A.submatrix(rows, cols)):
                return rows, cols
    return None


def rank_mod_p(rows, p):
    """Rank of an integer matrix over F_p (Gaussian elimination)."""
    M = [[v % p for v in row] for row in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        for i in range(len(M)):
            if i != rank and M[i][c]:
                f = M[i][c] * inv % p
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def det_mod_p(rows, p):
    M = [[v % p for v in row] for row in rows]
    n = len(M)
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c] % p
        inv = pow(M[c][c], -1, p)
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv % p
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[c])]
    return det % p


def random_point(ring, rng, p):
    return {name: rng.randrange(p) for name in ring.names}


def symbolic_rank(A, mode="symbolic", trials=20, p=LARGE_PRIME, seed=0):
    """Rank over the fraction field of the polynomial ring.

    ``symbolic``: exact, by fraction-free elimination.
    ``randomized``: largest rank seen over ``trials`` evaluations at random
    points of F_p; a lower bound that is exact with probability at least
    1 - trials * deg / p.
    """
    if mode == "symbolic":
        return _rank_fraction_free(A)
    if mode == "randomized":
        rng = random.Random(seed)
        best = 0
        for _ in range(trials):
            best = max(best, rank_mod_p(A.evaluate(random_point(A.ring, rng, p), p), p))
        return best
    raise DomainError(f"unknown rank mode {mode!r}")


def _rank_fraction_free(A):
    M = [list(row) for row in A.entries]
    nrows, ncols = A.rows, A.cols
    ring = A.ring
    prev = ring.one()
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        pivot = M[rank][c]
        for i in range(rank + 1, nrows):
            for j in range(c + 1, ncols):
                num = pivot * M[i][j] - M[i][c] * M[rank][j]
                M[i][j] = num.exquo(prev)
            M[i][c] = ring.zero()
        prev = pivot
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# F_r[S] and its cache


class MinorCache:
    """Memo table for F_r[S], optionally backed by a content-addressed directory.

    Each key ``(n, S, r, domain)`` maps to one file named by the SHA-256 of the
    key; the file holds a JSON header line and the polynomial's text form.
    Concurrent writers may race on a key; both write the same canonical text
    and the rename is atomic.
    """

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory else None
        self.memory = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def header(S, r, domain):
        return {"n": S.n, "S": [list(p) for p in S.sorted_members()], "r": r, "domain": str(domain)}

    def _path(self, header):
        digest = hashlib.sha256(json.dumps(header, sort_keys=True).encode()).hexdigest()
        return self.directory / digest[:2] / f"{digest}.poly"

    def get(self, S, r, domain, compute):
        key = (S.n, S.members, r, domain)
        if key in self.memory:
            self.hits += 1
            return self.memory[key]
        header = self.header(S, r, domain)
        value = None
        if self.directory is not None:
            path = self._path(header)
            if path.exists():
                value = self._read(path, header, chart_ring(S.n, domain))
        if value is None:
            self.misses += 1
            value = compute()
            if self.directory is not None:
                self._write(self._path(header), header, value)
        else:
            self.hits += 1
        self.memory[key] = value
        return value

    @staticmethod
    def _read(path, header, ring):
        try:
            head, body = path.read_text().split("\n", 1)
        except (OSError, ValueError):
            return None
        if json.loads(head) != header:
            return None
        return parse_poly(body.strip(), ring)

    @staticmethod
    def _write(path, header, value):
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n" + value.to_text() + "\n")
        os.replace(tmp, path)

    def clear(self):
        self.memory.clear()


_default_cache = MinorCache(os.environ.get("BSV_CACHE_DIR") or None)


def default_cache():
    return _default_cache


def set_cache_dir(directory):
    """Point the process-wide F_r cache at ``directory`` (None: memory only)."""
    global _default_cache
    _default_cache = MinorCache(directory)
    return _default_cache


def compute_minor_factor(S, r, support_fn=delta_support, domain=ZZ):
    n = S.n
    g, ginv = generic_conjugator(n, domain)
    ring = g.ring
    M = shifted_element(S, r, support_fn, ring)
    k = min(r, n)
    # only the first k rows of g and first k columns of g^-1 reach the leading block
    conj = g.leading(k, n) @ M @ ginv.submatrix(range(n), range(k))
    return determinant(conj)


def minor_factor(S, r, support_fn=None, domain=ZZ, cache=None):
    """F_r[S]: leading min(r, n) minor of g (X + delta_r[S]) g^-1.

    Levels n < r <= 2n - 1 use the full determinant.  A custom
    ``support_fn`` (an alternative delta_r) bypasses the cache.
    """
    if not 1 <= r <= 2 * S.n - 1:
        raise DomainError(f"level r={r} outside [1, {2 * S.n - 1}]")
    if support_fn is not None and support_fn is not delta_support:
        return compute_minor_factor(S, r, support_fn, domain)
    cache = cache or _default_cache
    return cache.get(S, r, domain, lambda: compute_minor_factor(S, r, delta_support, domain))
