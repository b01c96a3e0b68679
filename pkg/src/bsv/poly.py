"""
Exact sparse multivariate polynomials.

A polynomial lives in a :class:`PolyRing`, which fixes an ordered tuple of
variable names and a coefficient domain (``ZZ``, ``QQ`` or ``GF(p)``).  Terms
are stored in a dict keyed by a *packed* exponent vector: every variable owns
a 32-bit field of one Python integer, the first variable in the most
significant field.  Multiplying monomials is then integer addition, and
comparing keys is lexicographic comparison of exponent vectors.

Canonical term order is graded lex (total degree first, then lex on exponent
vectors), highest term first.  Two polynomials are equal iff their text
serializations are identical.

    >>> R, (x, y) = PolyRing.from_names("x,y", ZZ).with_gens()
    >>> print((x + 1) * (x - 1))
    x^2 - 1
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, EvaluationError, NotDivisible

BITS = 32
MASK = (1 << BITS) - 1

#: degree of the zero polynomial; kept distinct from every integer degree
NEG_INF = -math.inf


def is_prime(p):
    """Deterministic Miller-Rabin, exact for p < 3.3e24."""
    if not isinstance(p, int) or p < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# coefficient domains


@dataclass(frozen=True)
class Domain:
    """Coefficient domain: ``ZZ``, ``QQ`` or the prime field ``GF(p)``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise DomainError(f"unknown coefficient domain {self.kind!r}")
        if self.kind == "GF" and not is_prime(self.p):
            raise DomainError(f"GF(p) needs a prime, got {self.p}")

    def __str__(self):
        return f"GF({self.p})" if self.kind == "GF" else self.kind

    @classmethod
    def parse(cls, text):
        text = text.strip()
        if text in ("ZZ", "QQ"):
            return cls(text)
        m = re.fullmatch(r"GF\((\d+)\)", text)
        if not m:
            raise DomainError(f"cannot parse domain {text!r}")
        return cls("GF", int(m.group(1)))

    @property
    def is_field(self):
        return self.kind != "ZZ"

    def convert(self, c):
        """Map an int or Fraction into this domain."""
        if isinstance(c, bool):
            c = int(c)
        if self.kind == "ZZ":
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise DomainError(f"{c} is not an integer")
                return c.numerator
            if not isinstance(c, int):
                raise DomainError(f"cannot convert {c!r} to ZZ")
            return c
        if self.kind == "QQ":
            if not isinstance(c, (int, Fraction)):
                raise DomainError(f"cannot convert {c!r} to QQ")
            return Fraction(c)
        if isinstance(c, Fraction):
            if c.denominator % self.p == 0:
                raise EvaluationError(f"denominator {c.denominator} vanishes mod {self.p}")
            return c.numerator * pow(c.denominator, -1, self.p) % self.p
        if not isinstance(c, int):
            raise DomainError(f"cannot convert {c!r} to {self}")
        return c % self.p

    def inverse(self, c):
        if self.kind == "GF":
            if c % self.p == 0:
                raise ZeroDivisionError("inverse of 0 in GF(p)")
            return pow(c, -1, self.p)
        if self.kind == "QQ":
            return 1 / Fraction(c)
        if c in (1, -1):
            return c
        raise NotDivisible(f"{c} is not a unit in ZZ")

    def exquo(self, a, b):
        """Exact quotient a/b in the domain."""
        if self.kind == "ZZ":
            q, rem = divmod(a, b)
            if rem:
                raise NotDivisible(f"{a} is not divisible by {b} in ZZ")
            return q
        if self.kind == "QQ":
            return Fraction(a) / b
        return a * pow(b, -1, self.p) % self.p


ZZ = Domain("ZZ")
QQ = Domain("QQ")


def GF(p):
    return Domain("GF", p)


# ---------------------------------------------------------------------------
# variables of the big-cell chart


@dataclass(frozen=True, order=True)
class VarId:
    """A chart coordinate: ``G`` variables ``u_ij`` (i > j) of the lower
    unitriangular matrix, ``X`` variables ``x_ij`` (i <= j) of the Borel element."""

    kind: str
    i: int
    j: int

    def __post_init__(self):
        if self.kind == "G":
            if not self.i > self.j >= 1:
                raise DomainError(f"G-variable needs i > j >= 1, got ({self.i},{self.j})")
        elif self.kind == "X":
            if not 1 <= self.i <= self.j:
                raise DomainError(f"X-variable needs 1 <= i <= j, got ({self.i},{self.j})")
        else:
            raise DomainError(f"variable kind must be 'G' or 'X', got {self.kind!r}")

    @property
    def name(self):
        return f"{'u' if self.kind == 'G' else 'x'}{self.i}{self.j}"

    def __str__(self):
        return self.name

    @classmethod
    def parse(cls, name):
        m = re.fullmatch(r"([ux])(\d)(\d)", name)
        if not m:
            raise DomainError(f"not a chart variable name: {name!r}")
        return cls("G" if m.group(1) == "u" else "X", int(m.group(2)), int(m.group(3)))


def x(i, j):
    return VarId("X", i, j)


def u(i, j):
    return VarId("G", i, j)


# ---------------------------------------------------------------------------
# rings


class PolyRing:
    """Polynomial ring over ``domain`` in the ordered variables ``names``."""

    def __init__(self, names, domain=ZZ):
        names = tuple(str(v) for v in names)
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise DomainError(f"bad variable name {name!r}")
        self.names = names
        self.domain = domain
        self.nvars = len(names)
        self._index = {name: k for k, name in enumerate(names)}
        self._shifts = tuple((self.nvars - 1 - k) * BITS for k in range(self.nvars))
        self._key = (names, domain)

    @classmethod
    def from_names(cls, spec, domain=ZZ):
        return cls([s.strip() for s in spec.split(",") if s.strip()], domain)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)}; {self.domain})"

    def with_domain(self, domain):
        return PolyRing(self.names, domain)

    def with_gens(self):
        return self, self.gens

    @property
    def gens(self):
        return tuple(self.var(name) for name in self.names)

    # -- constructors --

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {0: self.domain.convert(1)})

    def constant(self, c):
        c = self.domain.convert(c)
        return Polynomial(self, {0: c} if c else {})

    def var(self, v):
        return Polynomial(self, {1 << self._shifts[self.index(v)]: self.domain.convert(1)})

    def __call__(self, value):
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise DomainError(f"polynomial belongs to {value.ring}, not {self}")
            return value
        if isinstance(value, str):
            return parse_poly(value, self)
        return self.constant(value)

    def from_terms(self, terms):
        """Build from ``{exponent tuple or {name: exp}: coefficient}``."""
        acc = {}
        for mono, c in terms.items():
            key = self.pack(mono)
            acc[key] = acc.get(key, 0) + self.domain.convert(c)
        return self._make(acc)

    # -- variables and monomials --

    def index(self, v):
        if isinstance(v, Polynomial):
            if v.ring != self or len(v.terms) != 1:
                raise DomainError(f"{v} is not a generator of {self}")
            (key, c), = v.terms.items()
            exps = self.unpack(key)
            if c != 1 or sorted(exps) != [0] * (self.nvars - 1) + [1]:
                raise DomainError(f"{v} is not a generator of {self}")
            return exps.index(1)
        name = str(v)
        try:
            return self._index[name]
        except KeyError:
            raise DomainError(f"variable {name} is not in {self}") from None

    def pack(self, mono):
        if isinstance(mono, dict):
            exps = [0] * self.nvars
            for v, e in mono.items():
                exps[self.index(v)] += e
            mono = exps
        if len(mono) != self.nvars:
            raise DomainError(f"exponent vector of length {len(mono)} in a ring of {self.nvars} variables")
        key = 0
        for e in mono:
            if not 0 <= e <= MASK:
                raise DomainError(f"exponent {e} out of range")
            key = (key << BITS) | e
        return key

    def unpack(self, key):
        return tuple((key >> s) & MASK for s in self._shifts)

    def exponent(self, key, k):
        return (key >> self._shifts[k]) & MASK

    def degree_of(self, key):
        d = 0
        while key:
            d += key & MASK
            key >>= BITS
        return d

    def sort_key(self, key):
        return (self.degree_of(key), key)

    def monomial_str(self, key):
        parts = []
        for name, e in zip(self.names, self.unpack(key)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def monomial_dict(self, key):
        return {name: e for name, e in zip(self.names, self.unpack(key)) if e}

    # -- internals --

    def _make(self, acc):
        dom = self.domain
        if dom.kind == "GF":
            p = dom.p
            terms = {}
            for k, c in acc.items():
                c %= p
                if c:
                    terms[k] = c
            return Polynomial(self, terms)
        return Polynomial(self, {k: c for k, c in acc.items() if c})


@lru_cache(maxsize=None)
def chart_variables(n):
    """Ordered chart coordinates for size ``n``: G-block row-major, then X-block row-major."""
    gs = [VarId("G", i, j) for i in range(1, n + 1) for j in range(1, i)]
    xs = [VarId("X", i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    return tuple(gs + xs)


@lru_cache(maxsize=None)
def chart_ring(n, domain=ZZ):
    """Coordinate ring of the chart U^- x b for n x n matrices."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > 9:
        raise DomainError("chart variable names assume single-digit indices (n <= 9)")
    return PolyRing([v.name for v in chart_variables(n)], domain)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial.  Use the ring to construct one."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic predicates --

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self):
        return self.terms.get(0, self.ring.domain.convert(0))

    def __len__(self):
        return len(self.terms)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise DomainError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    # -- ring operations --

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) + c
        return self.ring._make(acc)

    __radd__ = __add__

    def __neg__(self):
        return self.ring._make({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self.terms)
        for k, c in other.terms.items():
            acc[k] = acc.get(k, 0) - c
        return self.ring._make(acc)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        acc = {}
        get = acc.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                acc[k] = get(k, 0) + ca * cb
        return self.ring._make(acc)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise DomainError(f"exponent must be a nonnegative integer, got {e!r}")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c):
        c = self.ring.domain.convert(c)
        return self.ring._make({k: v * c for k, v in self.terms.items()})

    # -- comparison --

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- inspection --

    def sorted_terms(self):
        """Terms as ``(key, coeff)``, highest in graded-lex order first."""
        return sorted(self.terms.items(), key=lambda kc: self.ring.sort_key(kc[0]), reverse=True)

    def monomials(self):
        """Exponent vectors, canonical order."""
        return [self.ring.unpack(k) for k, _ in self.sorted_terms()]

    def coefficients(self):
        return [c for _, c in self.sorted_terms()]

    def leading_term(self):
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        k = max(self.terms, key=self.ring.sort_key)
        return k, self.terms[k]

    def total_degree(self):
        if not self.terms:
            return NEG_INF
        return max(self.ring.degree_of(k) for k in self.terms)

    def variables(self):
        """Names of the variables that occur, in ring order."""
        seen = 0
        for k in self.terms:
            seen |= k
        return [name for idx, name in enumerate(self.ring.names) if self.ring.exponent(seen, idx)]

    def term(self, key):
        return Polynomial(self.ring, {key: self.terms[key]})

    def degree_in(self, v):
        """Largest exponent of ``v``; ``NEG_INF`` for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        idx = self.ring.index(v)
        return max(self.ring.exponent(k, idx) for k in self.terms)

    def coefficient_in(self, v, e):
        """Coefficient of ``v**e`` as a polynomial free of ``v``."""
        idx = self.ring.index(v)
        shift = self.ring._shifts[idx]
        return Polynomial(self.ring, {
            k - (e << shift): c for k, c in self.terms.items() if (k >> shift) & MASK == e
        })

    # -- substitution and division --

    def substitute(self, v, c):
        """Set variable ``v`` to the constant ``c``."""
        ring = self.ring
        idx = ring.index(v)
        shift = ring._shifts[idx]
        c = ring.domain.convert(c)
        acc = {}
        for k, coeff in self.terms.items():
            e = (k >> shift) & MASK
            if e:
                if not c:
                    continue
                k -= e << shift
                coeff = coeff * c ** e
            acc[k] = acc.get(k, 0) + coeff
        return ring._make(acc)

    def divide_by_variable(self, v):
        """Exact quotient by the variable ``v``; raises :class:`NotDivisible` with the
        first term (canonical order) that does not contain ``v``."""
        ring = self.ring
        idx = ring.index(v)
        shift = ring._shifts[idx]
        one = 1 << shift
        out = {}
        for k, c in self.sorted_terms():
            if not (k >> shift) & MASK:
                witness = self.term(k)
                raise NotDivisible(f"term {witness} is not divisible by {ring.names[idx]}", witness)
            out[k - one] = c
        return Polynomial(ring, out)

    def exquo(self, other):
        """Exact quotient ``self / other``; raises :class:`NotDivisible` otherwise."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        ring = self.ring
        dom = ring.domain
        lk, lc = other.leading_term()
        if len(other.terms) == 1:
            out = {}
            for k, c in self.terms.items():
                if not _divides(ring, lk, k):
                    raise NotDivisible(f"{self.term(k)} is not divisible by {other}", self.term(k))
                out[k - lk] = dom.exquo(c, lc)
            return ring._make(out)
        rest = dict(self.terms)
        quot = {}
        skey = ring.sort_key
        while rest:
            k = max(rest, key=skey)
            c = rest[k]
            if not _divides(ring, lk, k):
                raise NotDivisible(f"{self} is not divisible by {other}", Polynomial(ring, {k: c}))
            qk, qc = k - lk, dom.exquo(c, lc)
            quot[qk] = qc
            for ok, oc in other.terms.items():
                kk = ok + qk
                val = rest.get(kk, 0) - oc * qc
                if dom.kind == "GF":
                    val %= dom.p
                if val:
                    rest[kk] = val
                else:
                    rest.pop(kk, None)
        return ring._make(quot)

    # -- evaluation and change of domain --

    def evaluate(self, point, p):
        """Value in F_p at ``point`` (a map from variables to integers)."""
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        ring = self.ring
        values = {}
        for v, val in point.items():
            values[ring.index(v)] = val % p
        used = self.variables()
        missing = [name for name in used if ring.index(name) not in values]
        if missing:
            raise DomainError(f"no value given for {', '.join(missing)}")
        order = [ring.index(name) for name in used]
        total = 0
        for k, c in self.terms.items():
            if isinstance(c, Fraction):
                if c.denominator % p == 0:
                    raise EvaluationError(f"denominator {c.denominator} vanishes mod {p}")
                c = c.numerator * pow(c.denominator, -1, p)
            t = c % p
            for idx in order:
                e = ring.exponent(k, idx)
                if e:
                    t = t * pow(values[idx], e, p) % p
            total += t
        return total % p

    def reduce_mod_p(self, p):
        """Image over GF(p) of a polynomial with integer coefficients."""
        if self.ring.domain.kind != "ZZ":
            raise DomainError(f"reduce_mod_p expects integer coefficients, got {self.ring.domain}")
        ring = self.ring.with_domain(GF(p))
        return ring._make(dict(self.terms))

    def change_domain(self, domain):
        ring = self.ring.with_domain(domain)
        return ring._make({k: domain.convert(c) for k, c in self.terms.items()})

    # -- serialization --

    def to_text(self):
        if not self.terms:
            return "0"
        ring = self.ring
        out = []
        for idx, (k, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            c = -c if neg else c
            mono = ring.monomial_str(k)
            if mono == "1":
                body = str(c)
            elif c == 1:
                body = mono
            else:
                body = f"{c}*{mono}"
            if idx == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(out)

    __str__ = to_text

    def __repr__(self):
        return f"Polynomial({self.to_text()!r}, {self.ring.domain})"

    def to_json(self):
        return {
            "vars": list(self.ring.names),
            "domain": str(self.ring.domain),
            "terms": [[self.ring.monomial_dict(k), str(c)] for k, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj):
        ring = PolyRing(obj["vars"], Domain.parse(obj["domain"]))
        return ring._make(_terms_from_json(ring, obj["terms"]))


def _terms_from_json(ring, items):
    acc = {}
    for mono, c in items:
        key = ring.pack(mono)
        acc[key] = acc.get(key, 0) + ring.domain.convert(Fraction(c))
    return acc


def _divides(ring, a, b):
    """Monomial a divides monomial b (packed keys)."""
    for s in ring._shifts:
        if (a >> s) & MASK > (b >> s) & MASK:
            return False
    return True


# ---------------------------------------------------------------------------
# parsing

_TERM = re.compile(r"([+-]?)([^+-]+)")
_NUMBER = re.compile(r"(\d+)(?:/(\d+))?")
_FACTOR = re.compile(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?")


def parse_poly(text, ring):
    """Parse the text serialization (``3*u21^2*x12 - x11``) into ``ring``.

    ``**`` is accepted for powers; parentheses are not.
    """
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise DomainError("empty polynomial text")
    pos = 0
    acc = {}
    for m in _TERM.finditer(s):
        if m.start() != pos:
            raise DomainError(f"cannot parse {text!r}")
        pos = m.end()
        sign, body = m.groups()
        coeff = Fraction(-1 if sign == "-" else 1)
        exps = [0] * ring.nvars
        for factor in body.split("*"):
            num = _NUMBER.fullmatch(factor)
            if num:
                coeff *= Fraction(int(num.group(1)), int(num.group(2) or 1))
                continue
            fm = _FACTOR.fullmatch(factor)
            if not fm:
                raise DomainError(f"cannot parse factor {factor!r} in {text!r}")
            exps[ring.index(fm.group(1))] += int(fm.group(2) or 1)
        key = ring.pack(exps)
        acc[key] = acc.get(key, 0) + ring.domain.convert(coeff)
    if pos != len(s):
        raise DomainError(f"cannot parse {text!r}")
    return ring._make(acc)


# ---------------------------------------------------------------------------
# functional interface


def degree_in(f, v):
    return f.degree_in(v)


def substitute(f, v, c):
    return f.substitute(v, c)


def divide_by_variable(f, v):
    return f.divide_by_variable(v)


def evaluate(f, point, p):
    return f.evaluate(point, p)


def reduce_mod_p(f, p):
    return f.reduce_mod_p(p)
