"""Combinatorial sieve over ideal-indexed sequences.

A sequence is a finitely supported map n -> a_n >= 0 on integral ideals.
Sifting by a set of prime ideals P below z removes every n sharing a prime
of P with norm < z.  The beta-sieve truncation keeps squarefree
d = p_1 ... p_l (p_1 > ... > p_l in the ideal ordering) whose prefixes obey
N(p_1 ... p_{m-1}) N(p_m)^2 < level at odd positions m (upper sieve) or even
positions m (lower sieve), and N(d) < level.

Several routines aggregate a sequence by its "signature": the set of small
sifting primes dividing each n.  Every sieve quantity depends on the
sequence only through these aggregated weights.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Tuple

from .ideals import DEFAULT_ORDERING, IdealFactorization, IdealOrdering, PrimeIdeal

REL_TOL = 1e-9

Signature = FrozenSet[PrimeIdeal]


@dataclass(eq=False)
class SieveSequence:
    entries: Dict[IdealFactorization, float]
    _profiles: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for n, a in self.entries.items():
            if not a >= 0:
                raise ValueError(f"negative or NaN weight {a} at {n!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[IdealFactorization, float]]) -> "SieveSequence":
        entries: Dict[IdealFactorization, float] = {}
        for n, a in pairs:
            entries[n] = entries.get(n, 0.0) + a
        return cls(entries)

    @property
    def total(self) -> float:
        return math.fsum(self.entries.values())

    def __len__(self):
        return len(self.entries)

    def profile(self, small: FrozenSet[PrimeIdeal]) -> Dict[Signature, float]:
        """Weights aggregated by the set of ``small`` primes dividing n."""
        prof = self._profiles.get(small)
        if prof is None:
            acc: Dict[Signature, List[float]] = {}
            for n, a in self.entries.items():
                sig = frozenset(P for P, _ in n.factors if P in small)
                acc.setdefault(sig, []).append(a)
            prof = {s: math.fsum(v) for s, v in acc.items()}
            self._profiles[small] = prof
        return prof


@dataclass(frozen=True)
class DensityModel:
    """Multiplicative density g on prime ideals (0 off the given primes) and size X."""

    g: Mapping[PrimeIdeal, float]
    X: float

    def __post_init__(self):
        if not self.X > 0:
            raise ValueError("X must be positive")
        for P, v in self.g.items():
            if not 0 <= v < 1:
                raise ValueError(f"g({P!r}) = {v} outside [0, 1)")

    def of(self, primes: Iterable[PrimeIdeal]) -> float:
        out = 1.0
        for P in primes:
            out *= self.g.get(P, 0.0)
        return out


@dataclass(frozen=True)
class SieveParams:
    z: float
    level: float
    ordering: IdealOrdering = DEFAULT_ORDERING

    def __post_init__(self):
        if self.z < 2:
            raise ValueError("z must be at least 2")
        if self.level < 1:
            raise ValueError("level must be at least 1")

    @property
    def tau(self) -> float:
        return math.log(self.level) / math.log(self.z)


class SieveBounds(NamedTuple):
    S_plus: float
    S_minus: float
    V_plus: float
    V_minus: float
    R_plus: float
    R_minus: float


@dataclass(frozen=True)
class FLReport:
    S_direct: float
    S_mobius: float
    S_plus: float
    S_minus: float
    V: float
    V_plus: float
    V_minus: float
    R_plus: float
    R_minus: float
    X: float
    z: float
    level: float
    tau: float
    tie_break: str
    E0: float
    E1: float
    C_used: float
    fl_lower: float
    fl_upper: float
    sandwich_ok: bool
    mobius_ok: bool
    buchstab_ok: bool
    buchstab_S_ok: bool
    buchstab_V_ok: bool
    vanishing_ok: bool
    fl_ok: bool
    level_covers_z: bool
    S_terms: Tuple[float, ...]
    V_terms: Tuple[float, ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["buchstab_terms"] = {"S_n": list(d.pop("S_terms")), "V_n": list(d.pop("V_terms"))}
        return d


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def sifting_primes(P: Iterable[PrimeIdeal], z: float, ordering: IdealOrdering = DEFAULT_ORDERING) -> List[PrimeIdeal]:
    """Primes of P with norm < z, ascending in the ordering."""
    return ordering.sort({Q for Q in P if Q.norm < z})


def _close(a: float, b: float, scale: float, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= tol * max(abs(scale), 1e-300)


def _le(a: float, b: float, scale: float, tol: float = REL_TOL) -> bool:
    return a <= b + tol * max(abs(scale), 1e-300)


# ---------------------------------------------------------------------------
# sifted sums
# ---------------------------------------------------------------------------

def S_direct(A: SieveSequence, P: Iterable[PrimeIdeal], z: float) -> float:
    """Sum of a_n over n with no prime factor in P of norm < z."""
    small = {Q for Q in P if Q.norm < z}
    return math.fsum(a for n, a in A.entries.items()
                     if not any(Q in small for Q, _ in n.factors))


def divisor_counts(A: SieveSequence, small: FrozenSet[PrimeIdeal]) -> Dict[Signature, float]:
    """|A_d| for every squarefree d over ``small`` dividing some n."""
    acc: Dict[Signature, List[float]] = {}
    for sig, w in A.profile(small).items():
        members = tuple(sig)
        for r in range(len(members) + 1):
            for sub in combinations(members, r):
                acc.setdefault(frozenset(sub), []).append(w)
    return {d: math.fsum(v) for d, v in acc.items()}


def S_mobius(A: SieveSequence, P: Iterable[PrimeIdeal], z: float) -> float:
    """Inclusion-exclusion: sum over d | P(z) of mu(d) |A_d|."""
    small = frozenset(Q for Q in P if Q.norm < z)
    counts = divisor_counts(A, small)
    return math.fsum((-1) ** len(d) * v for d, v in counts.items())


def beta_weights(P: Iterable[PrimeIdeal], params: SieveParams, sign: str) -> Dict[Tuple[PrimeIdeal, ...], int]:
    """Truncated Moebius weights of the upper (+) or lower (-) beta sieve.

    Keys are prime tuples in decreasing order; the empty tuple is the unit.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    checked = 1 if sign == "+" else 0
    primes = sifting_primes(P, params.z, params.ordering)
    norms = [Q.norm for Q in primes]
    level = params.level
    out: Dict[Tuple[PrimeIdeal, ...], int] = {(): 1}
    chain: List[PrimeIdeal] = []

    def extend(j: int, prod: int):
        m = len(chain) + 1
        constrained = m % 2 == checked
        for i in range(j - 1, -1, -1):
            q = norms[i]
            if prod * q >= level:
                continue
            if constrained and prod * q * q >= level:
                continue
            chain.append(primes[i])
            out[tuple(chain)] = -1 if m % 2 else 1
            extend(i, prod * q)
            chain.pop()

    extend(len(primes), 1)
    return out


def S_bounds(A: SieveSequence, P: Iterable[PrimeIdeal], params: SieveParams, model: DensityModel) -> SieveBounds:
    P = list(P)
    small = frozenset(Q for Q in P if Q.norm < params.z)
    counts = divisor_counts(A, small)
    res = []
    for sign in ("+", "-"):
        w = beta_weights(P, params, sign)
        S, V, R = [], [], []
        for d, lam in w.items():
            ad = counts.get(frozenset(d), 0.0)
            gd = model.of(d)
            S.append(lam * ad)
            V.append(lam * gd)
            R.append(lam * (ad - gd * model.X))
        res.append((math.fsum(S), math.fsum(V), math.fsum(R)))
    (sp, vp, rp), (sm, vm, rm) = res
    return SieveBounds(sp, sm, vp, vm, rp, rm)


def V_of_z(P: Iterable[PrimeIdeal], model: DensityModel, z: float) -> float:
    out = 1.0
    for Q in sorted({Q for Q in P if Q.norm < z}, key=DEFAULT_ORDERING.key):
        out *= 1 - model.g.get(Q, 0.0)
    return out


def dimension_ratio(P: Iterable[PrimeIdeal], model: DensityModel, w: float, z: float) -> float:
    """V(w)/V(z) = product over w <= N p < z of (1 - g(p))^-1."""
    if w > z:
        raise ValueError("need w <= z")
    out = 1.0
    for Q in sorted({Q for Q in P if w <= Q.norm < z}, key=DEFAULT_ORDERING.key):
        out /= 1 - model.g.get(Q, 0.0)
    return out


def E0_E1(C: float, tau: float) -> Tuple[float, float]:
    """Tail sums of C (log C)^n / n! over even (E0) and odd (E1) n > tau - 1."""
    if not C > 1:
        raise ValueError("C must exceed 1")
    L = math.log(C)
    first = math.floor(tau - 1) + 1  # least integer > tau - 1
    n1 = first if first % 2 == 1 else first + 1
    n0 = first if first % 2 == 0 else first + 1
    odd = math.fsum(L ** k / math.factorial(k) for k in range(1, max(n1, 1), 2))
    even = math.fsum(L ** k / math.factorial(k) for k in range(0, max(n0, 0), 2))
    E1 = (C * C - 1) / 2 - C * odd
    E0 = (C * C + 1) / 2 - C * even
    return E0, E1


# ---------------------------------------------------------------------------
# Buchstab decompositions
# ---------------------------------------------------------------------------

def _chain_ok(norms: List[int], level: float) -> int:
    """Length n if the decreasing chain with these norms is a Buchstab chain, else 0.

    Positions m < n of the parity of n must satisfy the truncation condition
    and position n must violate it.
    """
    n = len(norms)
    prod = 1
    for m, q in enumerate(norms, start=1):
        inside = prod * q * q < level
        if m == n:
            return n if not inside else 0
        if m % 2 == n % 2 and not inside:
            return 0
        prod *= q
    return 0


def buchstab_S_terms(A: SieveSequence, primes: List[PrimeIdeal], level: float) -> Dict[int, float]:
    """S_n = sum over Buchstab chains p_1 > ... > p_n of S(A_{p_1...p_n}, p_n).

    An entry n contributes to a chain exactly when the chain's last prime is
    the smallest sifting prime dividing n and the other chain primes divide n.
    """
    rank = {Q: i for i, Q in enumerate(primes)}
    acc: Dict[int, List[float]] = {}
    for sig, w in A.profile(frozenset(primes)).items():
        if not sig:
            continue
        members = sorted(sig, key=rank.__getitem__, reverse=True)
        last = members[-1]
        rest = members[:-1]
        for r in range(len(rest) + 1):
            for sub in combinations(rest, r):
                n = _chain_ok([Q.norm for Q in sub] + [last.norm], level)
                if n:
                    acc.setdefault(n, []).append(w)
    return {n: math.fsum(v) for n, v in acc.items()}


def buchstab_V_terms(primes: List[PrimeIdeal], model: DensityModel, level: float) -> Dict[int, float]:
    """V_n = sum over Buchstab chains of g(p_1...p_n) V(p_n).

    Depth-first over chain prefixes; the last step of every chain is summed
    in one go from prefix sums of g(p) V(p).
    """
    K = len(primes)
    norms = [Q.norm for Q in primes]
    g = [model.g.get(Q, 0.0) for Q in primes]
    Vp = [1.0] * (K + 1)
    for i in range(K):
        Vp[i + 1] = Vp[i] * (1 - g[i])
    cum = [0.0] * (K + 1)
    for i in range(K):
        cum[i + 1] = cum[i] + g[i] * Vp[i]
    sq = [q * q for q in norms]
    acc: Dict[int, List[float]] = {}

    def walk(j: int, prod: int, gprod: float, ok: Tuple[bool, bool], m: int):
        pos = m + 1
        par = pos % 2
        lo = bisect.bisect_left(sq, level / prod)
        while lo > 0 and prod * sq[lo - 1] >= level:
            lo -= 1
        while lo < K and prod * sq[lo] < level:
            lo += 1
        if ok[par] and lo < j:
            acc.setdefault(pos, []).append(gprod * (cum[j] - cum[lo]))
        other = ok[1 - par]
        top = j if other else min(j, lo)
        for i in range(top):
            inside = i < lo
            new = list(ok)
            new[par] = ok[par] and inside
            if new[0] or new[1]:
                walk(i, prod * norms[i], gprod * g[i], (new[0], new[1]), pos)

    walk(K, 1, 1.0, (True, True), 0)
    return {n: math.fsum(v) for n, v in acc.items()}


def buchstab_check(A: SieveSequence, P: Iterable[PrimeIdeal], params: SieveParams,
                   model: DensityModel) -> FLReport:
    P = list(P)
    primes = sifting_primes(P, params.z, params.ordering)
    S = S_direct(A, P, params.z)
    Sm = S_mobius(A, P, params.z)
    b = S_bounds(A, P, params, model)
    V = V_of_z(P, model, params.z)
    s_terms = buchstab_S_terms(A, primes, params.level)
    v_terms = buchstab_V_terms(primes, model, params.level)
    nmax = max([0, *s_terms, *v_terms])
    S_n = tuple(s_terms.get(n, 0.0) for n in range(1, nmax + 1))
    V_n = tuple(v_terms.get(n, 0.0) for n in range(1, nmax + 1))
    odd = lambda xs: math.fsum(xs[0::2])
    even = lambda xs: math.fsum(xs[1::2])

    # rounding error of signed sums scales with the total mass
    mass = A.total
    s_scale = max(abs(S), abs(b.S_plus), abs(b.S_minus), math.fsum(map(abs, S_n)), mass)
    v_scale = max(abs(V), abs(b.V_plus), abs(b.V_minus), math.fsum(map(abs, V_n)))
    s_ok = _close(S, b.S_plus - odd(S_n), s_scale) and _close(S, b.S_minus + even(S_n), s_scale)
    v_ok = _close(V, b.V_plus - odd(V_n), v_scale) and _close(V, b.V_minus + even(V_n), v_scale)
    tau = params.tau
    vanishing = all(V_n[n - 1] == 0.0 for n in range(1, nmax + 1) if n <= tau - 1)

    C = max(dimension_ratio(P, model, 2, params.z), 1 + 1e-12)
    E0, E1 = E0_E1(C, tau)
    lower = model.X * V * (1 - E0) + b.R_minus
    upper = model.X * V * (1 + E1) + b.R_plus
    fl_scale = max(abs(S), abs(lower), abs(upper), model.X * V, mass)
    return FLReport(
        S_direct=S, S_mobius=Sm,
        S_plus=b.S_plus, S_minus=b.S_minus,
        V=V, V_plus=b.V_plus, V_minus=b.V_minus,
        R_plus=b.R_plus, R_minus=b.R_minus,
        X=model.X, z=params.z, level=params.level, tau=tau,
        tie_break=params.ordering.tie_break,
        E0=E0, E1=E1, C_used=C,
        fl_lower=lower, fl_upper=upper,
        sandwich_ok=_le(b.S_minus, S, s_scale) and _le(S, b.S_plus, s_scale),
        mobius_ok=_close(S, Sm, max(abs(S), abs(Sm), mass)),
        buchstab_ok=s_ok and v_ok,
        buchstab_S_ok=s_ok, buchstab_V_ok=v_ok,
        vanishing_ok=vanishing,
        fl_ok=_le(lower, S, fl_scale) and _le(S, upper, fl_scale),
        level_covers_z=params.level >= params.z,
        S_terms=S_n, V_terms=V_n,
    )
