"""Prime ideals and factored ideals of the maximal order of Q(sqrt(D)).

Ideals are carried only as factorizations over prime ideals.  A prime ideal
is identified by the rational prime below it and, for split primes, a root
label 0/1 picking one of the two conjugates.  Root 0 corresponds to the form
(p, b, (b^2 - D)/4p) with the smaller square root of D mod p; root 1 to the
opposite form, so conjugates land in inverse classes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .errors import Inconsistent, TooLarge
from .qfield import ClassGroup, QuadForm, check_discriminant, class_group, kronecker, reduce

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"

_KIND_NAMES = {K.KIND_SPLIT: SPLIT, K.KIND_INERT: INERT, K.KIND_RAMIFIED: RAMIFIED}

# Guard for the pure-Python enumerator.
MAX_ENUMERATION_NORM = 5_000_000


def split_type(D: int, p: int) -> str:
    k = kronecker(D, p)
    return SPLIT if k == 1 else INERT if k == -1 else RAMIFIED


class PrimeIdeal(NamedTuple):
    p: int
    kind: str
    root: int
    norm: int
    class_index: int

    def __repr__(self):
        tag = {SPLIT: "s", INERT: "i", RAMIFIED: "r"}[self.kind]
        return f"P{self.p}{tag}{self.root if self.kind == SPLIT else ''}"


@dataclass(frozen=True)
class IdealOrdering:
    """Norm-compatible total order on prime ideals.

    Equal norms only occur for the two conjugates above a split prime, so the
    tie-break decides which conjugate comes first: ``by_p_then_root`` puts
    root 0 first, ``by_root_then_p`` puts root 1 first.
    """

    tie_break: str = "by_p_then_root"

    def __post_init__(self):
        if self.tie_break not in ("by_p_then_root", "by_root_then_p"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")

    def key(self, P: PrimeIdeal) -> Tuple[int, int, int]:
        if self.tie_break == "by_p_then_root":
            return (P.norm, P.p, P.root)
        return (P.norm, 1 - P.root, P.p)

    def precedes(self, P: PrimeIdeal, Q: PrimeIdeal) -> bool:
        return self.key(P) < self.key(Q)

    def sort(self, primes: Iterable[PrimeIdeal]) -> List[PrimeIdeal]:
        return sorted(primes, key=self.key)


DEFAULT_ORDERING = IdealOrdering()


# ---------------------------------------------------------------------------
# Classes of prime ideals (pure Python)
# ---------------------------------------------------------------------------

def sqrt_mod(a: int, p: int) -> int:
    """A square root of a modulo the prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise Inconsistent(f"{a} is not a square mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _middle_coefficient(D: int, p: int, kind: str) -> int:
    if p == 2:
        if kind == SPLIT:
            return 1
        return 0 if D % 8 == 0 else 2
    if kind == RAMIFIED:
        return 0 if D % 2 == 0 else p
    r = sqrt_mod(D, p)
    b = min(r, p - r)
    if (b - D) % 2:
        b += p
    return b


def prime_form(D: int, p: int, kind: str, root: int) -> QuadForm:
    """Form (p, b, c) attached to the prime ideal above p with the given root."""
    b = _middle_coefficient(D, p, kind)
    if root == 1:
        b = -b
    if (b * b - D) % (4 * p):
        raise Inconsistent(f"no square root of {D} mod {4 * p}")
    return QuadForm(p, b, (b * b - D) // (4 * p))


def class_of_prime(P: PrimeIdeal, G: ClassGroup) -> int:
    if P.kind == INERT:
        return 0
    return G.index(reduce(prime_form(G.D, P.p, P.kind, P.root)))


def prime_ideals_above(p: int, G: ClassGroup) -> List[PrimeIdeal]:
    D = G.D
    kind = split_type(D, p)
    if kind == INERT:
        return [PrimeIdeal(p, INERT, 0, p * p, 0)]
    roots = (0, 1) if kind == SPLIT else (0,)
    out = []
    for r in roots:
        P = PrimeIdeal(p, kind, r, p, 0)
        out.append(P._replace(class_index=class_of_prime(P, G)))
    return out


# ---------------------------------------------------------------------------
# Compiled prime tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeTable:
    """Prime ideals of norm <= N as parallel arrays sorted by (norm, p, root)."""

    D: int
    N: int
    p: np.ndarray
    kind: np.ndarray
    root: np.ndarray
    norm: np.ndarray
    cls: np.ndarray

    def __len__(self):
        return int(self.p.shape[0])

    def ideals(self) -> List[PrimeIdeal]:
        return [PrimeIdeal(p, _KIND_NAMES[k], r, n, c) for p, k, r, n, c in zip(
            self.p.tolist(), self.kind.tolist(), self.root.tolist(),
            self.norm.tolist(), self.cls.tolist())]


def _form_lookup(G: ClassGroup) -> Tuple[np.ndarray, int]:
    amax = max(f.a for f in G.reduced_forms)
    lookup = np.full((amax + 1, 2 * amax + 1), -1, dtype=np.int64)
    for i, f in enumerate(G.reduced_forms):
        lookup[f.a, f.b + amax] = i
    return lookup, amax


def table_array(G: ClassGroup) -> np.ndarray:
    return np.asarray(G.composition_table, dtype=np.int64).reshape(G.h, G.h)


_TABLES = {}


def _build_table(D: int, N: int) -> PrimeTable:
    G = class_group(D)
    lookup, amax = _form_lookup(G)
    P, kd, R, NN, C = K.build_prime_table(D, K.primes_below(N), N, lookup, amax)
    if (C < 0).any():
        raise Inconsistent("prime ideal mapped outside the reduced-form list")
    order = np.lexsort((R, P, NN))
    return PrimeTable(D, N, P[order], kd[order], R[order], NN[order], C[order])


def prime_table(D: int, N: int) -> PrimeTable:
    """Prime ideals of norm <= N; one growing table is kept per discriminant."""
    check_discriminant(D)
    N = int(N)
    full = _TABLES.get(D)
    if full is None or full.N < N:
        full = _build_table(D, max(N, 1000))
        _TABLES[D] = full
    if full.N == N:
        return full
    k = int(np.searchsorted(full.norm, N, side="right"))
    return PrimeTable(D, N, full.p[:k], full.kind[:k], full.root[:k], full.norm[:k], full.cls[:k])


def primes_up_to(D: int, X: int, ordering: IdealOrdering = DEFAULT_ORDERING) -> List[PrimeIdeal]:
    """All prime ideals of norm <= X, sorted by the ordering."""
    if X < 2:
        return []
    primes = prime_table(D, int(X)).ideals()
    if ordering != DEFAULT_ORDERING:
        primes = ordering.sort(primes)
    return primes


# ---------------------------------------------------------------------------
# Factored ideals
# ---------------------------------------------------------------------------

def _canonical(P: PrimeIdeal) -> Tuple[int, int, int]:
    return (P.norm, P.p, P.root)


@dataclass(frozen=True)
class IdealFactorization:
    factors: Tuple[Tuple[PrimeIdeal, int], ...]
    norm: int
    squarefree: bool
    class_index: int

    @classmethod
    def unit(cls) -> "IdealFactorization":
        return cls((), 1, True, 0)

    @classmethod
    def from_factors(cls, factors: Iterable[Tuple[PrimeIdeal, int]], G: ClassGroup) -> "IdealFactorization":
        merged = {}
        for P, e in factors:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                merged[P] = merged.get(P, 0) + e
        fs = tuple(sorted(merged.items(), key=lambda t: _canonical(t[0])))
        norm, c = 1, 0
        for P, e in fs:
            norm *= P.norm ** e
            for _ in range(e):
                c = G.mul(c, P.class_index)
        return cls(fs, norm, all(e == 1 for _, e in fs), c)

    @classmethod
    def from_primes(cls, primes: Iterable[PrimeIdeal], G: ClassGroup) -> "IdealFactorization":
        return cls.from_factors(((P, 1) for P in primes), G)

    @property
    def primes(self) -> Tuple[PrimeIdeal, ...]:
        return tuple(P for P, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    def is_unit(self) -> bool:
        return not self.factors

    def __repr__(self):
        if not self.factors:
            return "(1)"
        return "*".join(repr(P) if e == 1 else f"{P!r}^{e}" for P, e in self.factors)


def enumerate_ideals(D: int, G: ClassGroup, X: int, *, squarefree: bool = False,
                     allowed=None, limit: int = MAX_ENUMERATION_NORM) -> Iterator[IdealFactorization]:
    """Every integral ideal of norm <= X exactly once (depth first).

    ``squarefree`` restricts to squarefree ideals and ``allowed`` (a predicate
    on PrimeIdeal) restricts the primes that may occur.
    """
    if X > limit:
        raise TooLarge(f"enumeration norm {X} exceeds limit {limit}")
    primes = [P for P in primes_up_to(D, X) if allowed is None or allowed(P)]
    table = G.composition_table
    stack: List[Tuple[PrimeIdeal, int]] = []

    def walk(start: int, norm: int, c: int, sqfree: bool):
        yield IdealFactorization(tuple(stack), norm, sqfree, c)
        for i in range(start, len(primes)):
            P = primes[i]
            q = P.norm
            if norm * q > X:
                break
            n, cc, e = norm, c, 0
            while n * q <= X:
                n *= q
                cc = table[cc][P.class_index]
                e += 1
                stack.append((P, e))
                yield from walk(i + 1, n, cc, sqfree and e == 1)
                stack.pop()
                if squarefree:
                    break

    yield from walk(0, 1, 0, True)


def mobius(n: IdealFactorization) -> int:
    if not n.squarefree:
        return 0
    return -1 if len(n.factors) % 2 else 1


def divisors(n: IdealFactorization, G: ClassGroup) -> Iterator[IdealFactorization]:
    """All divisors of n; there are prod(e_i + 1) of them."""
    table = G.composition_table

    def walk(i: int, acc: List[Tuple[PrimeIdeal, int]], norm: int, c: int):
        if i == len(n.factors):
            yield IdealFactorization(tuple(acc), norm, all(e == 1 for _, e in acc), c)
            return
        P, emax = n.factors[i]
        yield from walk(i + 1, acc, norm, c)
        for e in range(1, emax + 1):
            norm *= P.norm
            c = table[c][P.class_index]
            acc.append((P, e))
            yield from walk(i + 1, acc, norm, c)
            acc.pop()

    yield from walk(0, [], 1, 0)


# ---------------------------------------------------------------------------
# Compiled multiplicative sums
# ---------------------------------------------------------------------------

MODES = {"count": K.MODE_COUNT, "lambda": K.MODE_LAMBDA, "rho": K.MODE_RHO,
         "psi": K.MODE_PSI, "mu": K.MODE_MU}


def _walk_arrays(D: int, N: int, signs: Optional[Sequence[int]], exclude: Iterable[PrimeIdeal]):
    table = prime_table(D, max(int(N), 2))
    G = class_group(D)
    cls = table.cls
    if signs is None:
        sgn = np.ones(len(table), dtype=np.int64)
    else:
        sgn = np.asarray(signs, dtype=np.int64)[cls]
    excl = np.zeros(len(table), dtype=np.bool_)
    ex = list(exclude)
    if ex:
        keys = {(P.p, P.norm, P.root) for P in ex}
        for i, key in enumerate(zip(table.p.tolist(), table.norm.tolist(), table.root.tolist())):
            if key in keys:
                excl[i] = True
    return table, G, sgn, excl


def multiplicative_coefficients(D: int, N: int, mode: str, signs=None, *, rho1: float = 1.0,
                                exclude: Iterable[PrimeIdeal] = (), by_class: bool = False) -> np.ndarray:
    """Norm coefficients sum_{Nn = k} f(n) for k <= N of a multiplicative f.

    ``signs`` gives a +-1 value per class (a real character); ``mode`` picks
    the local factor (see ``_kernels``).  With ``by_class`` the result has one
    row per ideal class.
    """
    table, G, sgn, excl = _walk_arrays(D, N, signs, exclude)
    out = K.norm_coefficients(table.norm, table.cls, sgn, excl, table_array(G), int(N),
                              MODES[mode], float(rho1))
    return out if by_class else out.sum(axis=0)


def multiplicative_class_sums(D: int, N: int, mode: str, signs=None, *, rho1: float = 1.0,
                              exclude: Iterable[PrimeIdeal] = (), scale: float = 0.0,
                              sigma: float = 0.0) -> np.ndarray:
    """Per-class sums of f(n) Nn^-sigma exp(-scale Nn) over Nn <= N."""
    table, G, sgn, excl = _walk_arrays(D, N, signs, exclude)
    return K.weighted_class_sums(table.norm, table.cls, sgn, excl, table_array(G), int(N),
                                 MODES[mode], float(rho1), float(scale), float(sigma))
