"""Negative discriminants, binary quadratic forms and their class groups.

Forms are written (a, b, c) for a*x^2 + b*x*y + c*y^2.  A class group is
stored as the lexicographically sorted list of reduced forms together with
a full composition table on their indices, so index 0 is always the
principal form.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .errors import InvalidDiscriminant, InvalidForm, Mismatch, TooLarge

# Largest |D| for which class_group builds a full table.
MAX_ABS_DISCRIMINANT = 200_000


# ---------------------------------------------------------------------------
# Symbols and discriminants
# ---------------------------------------------------------------------------

def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        if a in (1, -1):
            return 1
        raise ValueError("kronecker(a, 0) is only defined for a = +-1")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _squarefree(m: int) -> bool:
    m = abs(m)
    d = 2
    while d * d <= m:
        if m % (d * d) == 0:
            return False
        d += 1
    return m != 0


def is_discriminant(D: int) -> bool:
    return D < 0 and D % 4 in (0, 1)


def is_fundamental(D: int) -> bool:
    if not is_discriminant(D):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    m = D // 4
    return m % 4 in (2, 3) and _squarefree(m)


def unit_count(D: int) -> int:
    """Number of units w of the order of discriminant D."""
    return {-3: 6, -4: 4}.get(D, 2)


@dataclass(frozen=True)
class Discriminant:
    D: int

    def __post_init__(self):
        if not is_discriminant(self.D):
            raise InvalidDiscriminant(f"{self.D} is not a negative discriminant")

    @property
    def d_K(self) -> int:
        return -self.D

    @property
    def fundamental(self) -> bool:
        return is_fundamental(self.D)


def check_discriminant(D: int) -> int:
    if not isinstance(D, int) or not is_discriminant(D):
        raise InvalidDiscriminant(f"{D!r} is not a negative discriminant (D < 0, D = 0,1 mod 4)")
    return D


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_positive_definite(self) -> bool:
        return self.a > 0 and self.discriminant < 0

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def opposite(self) -> "QuadForm":
        return QuadForm(self.a, -self.b, self.c)

    def as_list(self) -> List[int]:
        return [self.a, self.b, self.c]


def _validate(f: QuadForm) -> None:
    if not f.is_positive_definite():
        raise InvalidForm(f"{f} is not positive definite")
    if not f.is_primitive():
        raise InvalidForm(f"{f} is not primitive")


def reduce(f: QuadForm) -> QuadForm:
    """Unique reduced form properly equivalent to f."""
    _validate(f)
    a, b, c = f.a, f.b, f.c
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, u, v) with u*a + v*b = g = gcd(a, b) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        a, u0, v0 = -a, -u0, -v0
    return a, u0, v0


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced Dirichlet composite of two forms of equal discriminant."""
    D = f.discriminant
    if g.discriminant != D:
        raise Mismatch(f"discriminants differ: {D} vs {g.discriminant}")
    _validate(f)
    _validate(g)
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    return reduce(QuadForm(a3, b3, c3))


def principal_form(D: int) -> QuadForm:
    check_discriminant(D)
    if D % 4 == 0:
        return QuadForm(1, 0, -D // 4)
    return QuadForm(1, 1, (1 - D) // 4)


def reduced_forms(D: int) -> List[QuadForm]:
    """All reduced primitive forms of discriminant D, sorted by (a, b, c)."""
    check_discriminant(D)
    out = []
    amax = math.isqrt(-D // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(QuadForm(a, b, c))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# Class group
# ---------------------------------------------------------------------------

def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class ClassGroup:
    D: int
    reduced_forms: Tuple[QuadForm, ...]
    composition_table: Tuple[Tuple[int, ...], ...]
    structure: Tuple[int, ...]
    generators: Tuple[int, ...]

    @property
    def h(self) -> int:
        return len(self.reduced_forms)

    @property
    def fundamental(self) -> bool:
        return is_fundamental(self.D)

    @property
    def w(self) -> int:
        return unit_count(self.D)

    @property
    def identity(self) -> int:
        return 0

    def index(self, f: QuadForm) -> int:
        return self._index_map()[reduce(f)]

    def _index_map(self) -> Dict[QuadForm, int]:
        cached = self.__dict__.get("_imap")
        if cached is None:
            cached = {q: i for i, q in enumerate(self.reduced_forms)}
            object.__setattr__(self, "_imap", cached)
        return cached

    def mul(self, i: int, j: int) -> int:
        return self.composition_table[i][j]

    def inverse(self, i: int) -> int:
        return self.index(self.reduced_forms[i].opposite())

    def power(self, i: int, k: int) -> int:
        k %= self.order(i)
        out, base = 0, i
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def order(self, i: int) -> int:
        k, cur = 1, i
        while cur != 0:
            cur = self.mul(cur, i)
            k += 1
        return k


def _invariant_factors(table: Sequence[Sequence[int]], orders: List[int]) -> List[int]:
    """Invariant factors d1 | d2 | ... (ascending, 1s dropped) from element orders."""
    h = len(orders)
    per_prime: Dict[int, List[int]] = {}
    for p in _prime_factors(h):
        # n_k = log_p #{g : g^(p^k) = 1}
        counts = []
        k = 1
        while True:
            size = sum(1 for o in orders if (p ** k) % o == 0)
            nk = round(math.log(size, p))
            counts.append(nk)
            if size == p ** _valuation(h, p):
                break
            k += 1
        ranks = [counts[0]] + [counts[i] - counts[i - 1] for i in range(1, len(counts))]
        # ranks[k-1] = number of cyclic p-factors with exponent >= k
        exps = []
        for k in range(len(ranks), 0, -1):
            nxt = ranks[k] if k < len(ranks) else 0
            exps.extend([k] * (ranks[k - 1] - nxt))
        per_prime[p] = sorted(exps, reverse=True)
    length = max((len(v) for v in per_prime.values()), default=0)
    factors = []
    for i in range(length):
        d = 1
        for p, exps in per_prime.items():
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return sorted(factors)


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _greedy_generators(table: Sequence[Sequence[int]], orders: List[int]) -> List[int]:
    h = len(orders)
    subgroup = {0}
    gens = []
    for g in sorted(range(h), key=lambda i: (-orders[i], i)):
        if len(subgroup) == h:
            break
        if g in subgroup:
            continue
        gens.append(g)
        powers = [0]
        cur = g
        while cur != 0:
            powers.append(cur)
            cur = table[cur][g]
        subgroup = {table[s][q] for s in subgroup for q in powers}
    return gens


@lru_cache(maxsize=256)
def class_group(D: int, limit: int = MAX_ABS_DISCRIMINANT) -> ClassGroup:
    """Form class group of discriminant D with full composition table."""
    check_discriminant(D)
    if -D > limit:
        raise TooLarge(f"|D| = {-D} exceeds the configured limit {limit}")
    forms = reduced_forms(D)
    index = {f: i for i, f in enumerate(forms)}
    h = len(forms)
    table = [[0] * h for _ in range(h)]
    for i in range(h):
        for j in range(i, h):
            k = index[compose(forms[i], forms[j])]
            table[i][j] = table[j][i] = k
    return _assemble(D, forms, table)


def _assemble(D: int, forms, table) -> ClassGroup:
    h = len(forms)
    orders = []
    for i in range(h):
        k, cur = 1, i
        while cur != 0:
            cur = table[cur][i]
            k += 1
        orders.append(k)
    return ClassGroup(
        D=D,
        reduced_forms=tuple(forms),
        composition_table=tuple(tuple(r) for r in table),
        structure=tuple(_invariant_factors(table, orders)),
        generators=tuple(_greedy_generators(table, orders)),
    )


def table_axioms_hold(table: Sequence[Sequence[int]], random_triples: int = 1000, seed: int = 0) -> bool:
    """Latin-square, identity, inverse, commutativity and associativity checks on a raw table."""
    h = len(table)
    t = table
    full = set(range(h))
    for i in range(h):
        if len(t[i]) != h or set(t[i]) != full or {t[j][i] for j in range(h)} != full:
            return False
        if t[0][i] != i:
            return False
        if not any(t[i][j] == 0 for j in range(h)):
            return False
        for j in range(h):
            if t[i][j] != t[j][i]:
                return False
    if h <= 30:
        triples = ((i, j, k) for i in range(h) for j in range(h) for k in range(h))
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(h), rng.randrange(h), rng.randrange(h)) for _ in range(random_triples))
    return all(t[t[i][j]][k] == t[i][t[j][k]] for i, j, k in triples)


def group_axioms_hold(G: ClassGroup, random_triples: int = 1000, seed: int = 0) -> bool:
    """Group axioms on the composition table, plus inverses matching opposite forms."""
    if not table_axioms_hold(G.composition_table, random_triples, seed):
        return False
    return all(G.composition_table[i][G.inverse(i)] == 0 for i in range(G.h))


def fundamental_discriminants(dmin: int, dmax: int) -> List[int]:
    """Negative fundamental discriminants D with dmin <= D <= dmax, descending."""
    hi = min(dmax, -3)
    return [D for D in range(hi, dmin - 1, -1) if is_fundamental(D)]
