"""
Frobenius splittings of affine space given by a polynomial over F_p.

A polynomial f defines phi(g) = Tr(f g), where the trace sends the monomial
x^a to x^((a - (p-1)) / p) when every exponent is congruent to p-1 mod p and
kills it otherwise.  phi splits Frobenius iff Tr(f) = 1, and the coordinate
hyperplane {v = 0} is compatibly split iff Tr(f v m) lies in (v) for every
monomial m.

The trace only makes sense relative to an explicit list of coordinates (the
*universe*): a monomial missing some coordinate has exponent 0 there, which
is not p-1.  Every function here takes the universe as an argument.
"""

import json
from dataclasses import dataclass
from itertools import product

from .errors import CapacityError, DomainError
from .matrices import minor_factor
from .poly import GF, MASK, chart_ring, is_prime, parse_poly
from .poset import PosetIdeal

DEFAULT_MAX_TERMS = 5 * 10**6
DEFAULT_MAX_SEARCH = 10**6


def _universe_indices(ring, universe):
    idx = [ring.index(v) for v in universe]
    if len(set(idx)) != len(idx):
        raise DomainError("universe lists a variable twice")
    return idx


def _prime_of(f):
    dom = f.ring.domain
    if dom.kind != "GF":
        raise DomainError(f"trace map needs prime-field coefficients, got {dom}")
    return dom.p


def trace_map(f, universe):
    """The p^-1-linear trace of ``f`` with respect to the coordinates in ``universe``."""
    p = _prime_of(f)
    ring = f.ring
    idx = _universe_indices(ring, universe)
    inside = set(idx)
    shifts = ring._shifts
    stray = [v for v in f.variables() if ring.index(v) not in inside]
    if stray:
        raise DomainError(f"variables {stray} occur in f but not in the universe")
    target = p - 1
    out = {}
    for key, c in f.terms.items():
        new = 0
        for k in idx:
            e = (key >> shifts[k]) & MASK
            if e % p != target:
                break
            new |= ((e - target) // p) << shifts[k]
        else:
            out[new] = out.get(new, 0) + c
    return ring._make(out)


def is_splitting(f, universe):
    """True iff Tr(f) is the constant 1."""
    if f.is_zero():
        return False
    return trace_map(f, universe) == 1


@dataclass
class CompatReport:
    variable: str
    compatible: bool
    witness: dict = None

    def to_json(self):
        out = {"variable": self.variable, "compatible": self.compatible}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def compatible_with_coordinate(f, v, universe):
    """Is {v = 0} compatibly split by the splitting defined by ``f``?

    Only terms with v-exponent at most p-2 can produce a trace term free of
    v after multiplying by v*m, and for each such term the multiplier m (with
    exponents in [0, p-1]) is forced.  Contributions are summed per
    (multiplier, output monomial); any nonzero sum is a violation.
    """
    p = _prime_of(f)
    ring = f.ring
    idx = _universe_indices(ring, universe)
    vk = ring.index(v)
    if vk not in idx:
        raise DomainError(f"{v} is not in the universe")
    stray = [w for w in f.variables() if ring.index(w) not in set(idx)]
    if stray:
        raise DomainError(f"variables {stray} occur in f but not in the universe")
    shifts = ring._shifts
    buckets = {}
    for key, c in f.terms.items():
        av = (key >> shifts[vk]) & MASK
        if av > p - 2:
            continue
        mult = 0
        out = 0
        for k in idx:
            a = (key >> shifts[k]) & MASK
            if k == vk:
                b = p - 2 - a
                # a + 1 + b = p - 1, so the output exponent of v is 0
            else:
                b = (p - 1 - a) % p
                out |= ((a + b - (p - 1)) // p) << shifts[k]
            mult |= b << shifts[k]
        bucket = buckets.setdefault(mult, {})
        bucket[out] = (bucket.get(out, 0) + c) % p
    name = ring.names[vk]
    for mult in sorted(buckets, key=ring.sort_key):
        for out in sorted(buckets[mult], key=ring.sort_key):
            if buckets[mult][out]:
                return CompatReport(name, False, {
                    "multiplier": ring.monomial_str(mult),
                    "trace_monomial": ring.monomial_str(out),
                    "coefficient": buckets[mult][out],
                })
    return CompatReport(name, True)


# ---------------------------------------------------------------------------
# candidate sections


@dataclass(frozen=True)
class MinorFactor:
    S: PosetIdeal
    r: int

    def polynomial(self, n, p):
        if self.S.n != n:
            raise DomainError(f"minor atom is for n={self.S.n}, candidate for n={n}")
        return minor_factor(self.S, self.r).reduce_mod_p(p)

    def to_json(self):
        return {"minor": {"S": [list(q) for q in self.S.sorted_members()], "r": self.r}}


@dataclass(frozen=True)
class Var:
    name: str

    def polynomial(self, n, p):
        return chart_ring(n, GF(p)).var(self.name)

    def to_json(self):
        return {"var": self.name}


@dataclass(frozen=True)
class Literal:
    text: str

    def polynomial(self, n, p):
        return parse_poly(self.text, chart_ring(n, GF(p)))

    def to_json(self):
        return {"lit": self.text}


@dataclass(frozen=True)
class CandidateExpr:
    """``(prod atom^exp) ^ outer`` over the chart ring of size ``n``."""

    factors: tuple
    outer: int = 1
    n: int = None

    def __post_init__(self):
        factors = tuple((atom, int(e)) for atom, e in self.factors)
        if any(e < 0 for _, e in factors) or self.outer < 0:
            raise DomainError("candidate exponents must be nonnegative")
        object.__setattr__(self, "factors", factors)
        ns = {atom.S.n for atom, _ in factors if isinstance(atom, MinorFactor)}
        if self.n is not None:
            ns.add(self.n)
        if len(ns) > 1:
            raise DomainError(f"atoms disagree on n: {sorted(ns)}")
        if self.n is None and ns:
            object.__setattr__(self, "n", ns.pop())

    def to_json(self):
        out = {
            "factors": [{"atom": atom.to_json(), "exp": e} for atom, e in self.factors],
            "outer": self.outer,
        }
        if self.n is not None:
            out["n"] = self.n
        return out

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj, n=None):
        if not isinstance(obj, dict) or "factors" not in obj:
            raise DomainError("candidate JSON needs a 'factors' list")
        n = obj.get("n", n)
        factors = []
        for item in obj["factors"]:
            try:
                spec, e = item["atom"], item.get("exp", 1)
            except (TypeError, KeyError):
                raise DomainError(f"bad factor entry {item!r}") from None
            if not isinstance(spec, dict) or len(spec) != 1:
                raise DomainError(f"atom must have exactly one of minor/var/lit: {spec!r}")
            (kind, val), = spec.items()
            if kind == "minor":
                if n is None and not isinstance(val.get("S"), dict):
                    raise DomainError("minor atom needs n")
                S = PosetIdeal.from_json(val["S"], n=n)
                factors.append((MinorFactor(S, int(val["r"])), e))
            elif kind == "var":
                factors.append((Var(str(val)), e))
            elif kind == "lit":
                factors.append((Literal(str(val)), e))
            else:
                raise DomainError(f"unknown atom kind {kind!r}")
            if not isinstance(e, int) or e < 0:
                raise DomainError(f"exponent must be a nonnegative integer, got {e!r}")
        outer = obj.get("outer", 1)
        if not isinstance(outer, int):
            raise DomainError(f"outer exponent must be an integer, got {outer!r}")
        return cls(tuple(factors), outer, n)

    @classmethod
    def loads(cls, text, n=None):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"candidate is not valid JSON: {exc}") from None
        return cls.from_json(obj, n)


def _guard(f, max_terms):
    if len(f) > max_terms:
        raise CapacityError(f"candidate has {len(f)} terms, over the cap of {max_terms}")
    return f


def _power(f, e, max_terms):
    result = f.ring.one()
    for _ in range(e):
        result = _guard(result * f, max_terms)
    return result


def build_candidate(c, p, n=None, max_terms=DEFAULT_MAX_TERMS):
    """Expand a candidate into a polynomial over F_p on the chart of size n."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    n = n if n is not None else c.n
    if n is None:
        raise DomainError("candidate does not determine n")
    f = chart_ring(n, GF(p)).one()
    for atom, e in c.factors:
        f = _guard(f * _power(atom.polynomial(n, p), e, max_terms), max_terms)
    return _power(f, c.outer, max_terms) if c.outer != 1 else f


def chart_universe(n):
    return list(chart_ring(n).names)


def ideal_variables(S):
    """Chart equations of b[S] inside b: the x_ij with (i, j) in S on or above the diagonal."""
    return [f"x{i}{j}" for i, j in S.upper_members()]


@dataclass
class SplitReport:
    splits: bool
    trace: str
    ideals: list

    def to_json(self):
        return {"schema": "1", "splits": self.splits, "trace": self.trace, "ideals": self.ideals}


def simultaneous_report(c, p, ideals, n=None, universe=None, max_terms=DEFAULT_MAX_TERMS):
    """Does the candidate split the chart, and which b[S] does it split compatibly?"""
    ns = {S.n for S in ideals}
    if n is None:
        n = c.n if c.n is not None else (ns.pop() if len(ns) == 1 else None)
        ns = {S.n for S in ideals}
    if n is None or ns - {n}:
        raise DomainError("ideals and candidate must share one n")
    f = build_candidate(c, p, n, max_terms)
    universe = list(universe) if universe is not None else chart_universe(n)
    tr = trace_map(f, universe)
    splits = tr == 1
    if not splits:
        return SplitReport(False, str(tr), [])
    per_var = {}
    rows = []
    for S in ideals:
        reports = []
        for v in ideal_variables(S):
            if v not in per_var:
                per_var[v] = compatible_with_coordinate(f, v, universe)
            reports.append(per_var[v])
        rows.append({
            "ideal": [list(q) for q in S.sorted_members()],
            "compatibly_split": all(r.compatible for r in reports),
            "variables": [r.to_json() for r in reports],
        })
    return SplitReport(True, str(tr), rows)


def search_candidates(n, p, atoms, exponent_bound, target_ideals, outer=1,
                      max_search=DEFAULT_MAX_SEARCH, max_terms=DEFAULT_MAX_TERMS):
    """Every exponent vector in [0, bound]^len(atoms) whose product splits the chart
    and compatibly splits each target ideal; lexicographic order."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    size = (exponent_bound + 1) ** len(atoms)
    if size > max_search:
        raise CapacityError(f"{size} candidates exceed the search cap of {max_search}")
    universe = chart_universe(n)
    variables = sorted({v for S in target_ideals for v in ideal_variables(S)})
    base = [atom.polynomial(n, p) for atom in atoms]
    powers = [[_power(b, e, max_terms) for e in range(exponent_bound + 1)] for b in base]
    one = chart_ring(n, GF(p)).one()
    found = []
    for exps in product(range(exponent_bound + 1), repeat=len(atoms)):
        f = one
        for k, e in enumerate(exps):
            if e:
                f = _guard(f * powers[k][e], max_terms)
        if outer != 1:
            f = _power(f, outer, max_terms)
        if not is_splitting(f, universe):
            continue
        if all(compatible_with_coordinate(f, v, universe).compatible for v in variables):
            found.append(CandidateExpr(tuple(zip(atoms, exps)), outer, n))
    return found
