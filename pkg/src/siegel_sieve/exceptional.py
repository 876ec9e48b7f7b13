"""Sifting the rho-weighted sequence of a class and least primes in classes.

The sequence attached to a class C and a real character psi with psi(C) = 1
is a_n = rho(n) exp(-y Nn / x) for n in C.  This module builds it, supplies
the local densities and the expected size X, evaluates the hypothesis
windows numerically, assembles the lower-bound report for prime ideals in C,
and scans discriminants for least primes represented by each class.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import oracles
from .characters import (DEFAULT_EULER_CUTOFF, DEFAULT_L1_CUTOFF, PRINCIPAL, QUADRATIC,
                         SMOOTH_FACTOR, RealCharacter, b_psi_and_Delta_psi, beta_from_eta,
                         kappa_K, kappa_psi, real_characters, rho_prime_value)
from .errors import InvalidDiscriminant, NonResidueClass, NotFoundBelow, TooSmall
from .ideals import (DEFAULT_ORDERING, IdealFactorization, IdealOrdering,
                     PrimeIdeal, enumerate_ideals, multiplicative_class_sums, prime_table,
                     primes_up_to)
from .qfield import ClassGroup, QuadForm, class_group, fundamental_discriminants, is_fundamental
from .sieve import DensityModel, E0_E1, S_direct, SieveSequence, V_of_z

# Lower-bound constants and the y values they are tuned for.
C_PSI = {QUADRATIC: 0.00466, PRINCIPAL: 0.0557}
DEFAULT_Y = {QUADRATIC: 7.37, PRINCIPAL: 4.54}
# Matching upper-bound constants (stated without proof; reported as experimental).
C_TILDE = {QUADRATIC: 8.62, PRINCIPAL: 4.02}
# Constants for the alternate x-range with ell = 2 (their error term is not modeled).
C_ALTERNATE = {QUADRATIC: 0.0275, PRINCIPAL: 0.0749}
# Exponents (A, B, C) of the x-range and their h-free variants.
EXPONENTS = {QUADRATIC: (16, 8.5, 6), PRINCIPAL: (6, 5, 3)}
EXPONENTS_H_FREE = {QUADRATIC: (16, 9.5, 8), PRINCIPAL: (6, 6, 5)}
# Least-prime exponents for comparison in scan output.
LEAST_PRIME_EXPONENT = {QUADRATIC: 9.5, PRINCIPAL: 6.0}
REFERENCE_LINES = (
    ("quadratic_exponent", 9.5),
    ("principal_exponent", 6.0),
    ("unconditional_linnik_type", 5.2),
    ("weiss_type", "3+delta"),
    ("average_type", "2-1/59"),
    ("grh", "2+epsilon"),
)
ETA_MIN = 20.0
DEFAULT_ETA = 1e4
DEFAULT_ETA_DELTA = 1e4
DEFAULT_DELTA = 0.1
DEFAULT_M_DELTA = 1.0
N_K = 2

IDENTITY_TOL = 1e-9


# ---------------------------------------------------------------------------
# Setup
# ---------------------------------------------------------------------------

@dataclass
class ExceptionalSetup:
    D: int
    psi: RealCharacter
    C: int
    x: float
    y: float = 1.0
    z: Optional[float] = None
    delta: float = DEFAULT_DELTA
    eta: float = DEFAULT_ETA
    eta_delta: float = DEFAULT_ETA_DELTA
    M_delta: float = DEFAULT_M_DELTA
    enumeration_cutoff: Optional[int] = None
    ramified_included: bool = True
    ordering: IdealOrdering = DEFAULT_ORDERING
    l1_cutoff: int = DEFAULT_L1_CUTOFF
    euler_cutoff: int = DEFAULT_EULER_CUTOFF

    def __post_init__(self):
        if not is_fundamental(self.D):
            raise InvalidDiscriminant(f"{self.D} is not a negative fundamental discriminant")
        if self.psi.D != self.D:
            raise ValueError("character belongs to a different discriminant")
        if not 1 <= self.y <= 10:
            raise ValueError(f"y = {self.y} outside [1, 10]")
        if not self.x >= 2:
            raise ValueError("x must be at least 2")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not 0 <= self.C < self.G.h:
            raise ValueError(f"class index {self.C} out of range")
        if self.enumeration_cutoff is not None and self.enumeration_cutoff < SMOOTH_FACTOR * self.x / self.y:
            raise TooSmall(f"enumeration cutoff {self.enumeration_cutoff} below 40 x / y")

    @property
    def G(self) -> ClassGroup:
        return class_group(self.D)

    @property
    def residue_ok(self) -> bool:
        return self.psi(self.C) == 1

    def cutoff(self, y: Optional[float] = None) -> int:
        y = self.y if y is None else y
        need = math.ceil(SMOOTH_FACTOR * self.x / y)
        return max(need, self.enumeration_cutoff or 0)

    def with_(self, **kw) -> "ExceptionalSetup":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return ExceptionalSetup(**d)


# ---------------------------------------------------------------------------
# Constants attached to (D, psi)
# ---------------------------------------------------------------------------

class CharacterConstants(NamedTuple):
    h: int
    kappa_K: float
    kappa_psi: float
    b_psi: float
    Delta_psi: float
    euler_tail: float


@lru_cache(maxsize=None)
def _constants(D: int, values: Tuple[int, ...], kind: str, l1_cutoff: int, euler_cutoff: int) -> CharacterConstants:
    G = class_group(D)
    psi = RealCharacter(D, values, kind)
    e = b_psi_and_Delta_psi(psi, euler_cutoff, l1_cutoff)
    return CharacterConstants(G.h, kappa_K(G), kappa_psi(psi, G, l1_cutoff), e.b_psi, e.Delta_psi, e.tail_estimate)


def character_constants(setup: ExceptionalSetup) -> CharacterConstants:
    p = setup.psi
    return _constants(setup.D, p.values, p.kind, setup.l1_cutoff, setup.euler_cutoff)


def local_g(P: PrimeIdeal, psi: RealCharacter) -> float:
    if psi.of_prime(P) != 1:
        return 0.0
    return 1.0 / (P.norm + 1) if psi.is_principal else 2.0 / (P.norm + 2)


def X_value(setup: ExceptionalSetup, y_weighted: bool = False) -> float:
    """b_psi kappa_psi x / h, with x / y in place of x for the y-weighted sequence."""
    c = character_constants(setup)
    size = setup.x / setup.y if y_weighted else setup.x
    return c.b_psi * c.kappa_psi * size / c.h


def sieve_primes(setup: ExceptionalSetup, bound: float) -> List[PrimeIdeal]:
    """Prime ideals with psi = 1 and norm < bound, in the setup's ordering."""
    if bound <= 2:
        return []
    ps = [P for P in primes_up_to(setup.D, math.ceil(bound) - 1) if setup.psi.of_prime(P) == 1]
    return setup.ordering.sort(ps)


def density_model(setup: ExceptionalSetup, bound: float, y_weighted: bool = True) -> DensityModel:
    g = {P: local_g(P, setup.psi) for P in sieve_primes(setup, bound)}
    return DensityModel(g, X_value(setup, y_weighted))


# ---------------------------------------------------------------------------
# The sequence
# ---------------------------------------------------------------------------

class _Support(NamedTuple):
    N: int
    ideals: List[IdealFactorization]
    norms: np.ndarray
    classes: np.ndarray


_SUPPORT: Dict[Tuple[int, Tuple[int, ...]], _Support] = {}


def _support(D: int, psi: RealCharacter, N: int) -> _Support:
    """Squarefree ideals of norm <= N built from primes with psi = 1 (cached per character)."""
    key = (D, psi.values)
    s = _SUPPORT.get(key)
    if s is None or s.N < N:
        G = class_group(D)
        ideals = sorted(enumerate_ideals(D, G, N, squarefree=True, allowed=lambda P: psi.of_prime(P) == 1),
                        key=lambda n: n.norm)
        s = _Support(N, ideals, np.array([n.norm for n in ideals], dtype=np.int64),
                     np.array([n.class_index for n in ideals], dtype=np.int64))
        _SUPPORT[key] = s
    return s


def build_sequence(setup: ExceptionalSetup, y: Optional[float] = None) -> SieveSequence:
    """a_n = rho(n) exp(-y Nn / x) on ideals n in C with Nn <= cutoff."""
    y = setup.y if y is None else y
    N = setup.cutoff(y)
    s = _support(setup.D, setup.psi, N)
    k = int(np.searchsorted(s.norms, N, side="right"))
    r1 = rho_prime_value(setup.psi)
    entries = {}
    for i in np.flatnonzero(s.classes[:k] == setup.C).tolist():
        n = s.ideals[i]
        entries[n] = r1 ** n.omega * math.exp(-y * n.norm / setup.x)
    return SieveSequence(entries)


# ---------------------------------------------------------------------------
# Remainders
# ---------------------------------------------------------------------------

def measured_count(setup: ExceptionalSetup, d: IdealFactorization) -> float:
    """|A_d| for the y-weighted sequence, through the compiled walk."""
    if not d.squarefree:
        raise ValueError("d must be squarefree")
    if any(setup.psi.of_prime(P) != 1 for P in d.primes):
        return 0.0
    G = setup.G
    r1 = rho_prime_value(setup.psi)
    N = setup.cutoff() // d.norm
    if N < 1:
        return 0.0
    sums = multiplicative_class_sums(setup.D, max(N, 2), "rho", setup.psi.values, rho1=r1,
                                     exclude=d.primes, scale=setup.y * d.norm / setup.x)
    if N < 2:  # only the cofactor 1 fits
        sums = np.zeros(G.h)
        sums[0] = math.exp(-setup.y * d.norm / setup.x)
    target = G.mul(setup.C, G.inverse(d.class_index))
    return r1 ** d.omega * float(sums[target])


def remainder_empirical(setup: ExceptionalSetup, d: IdealFactorization) -> float:
    """r_d = |A_d| - g(d) X for the y-weighted sequence."""
    g = 1.0
    for P in d.primes:
        g *= local_g(P, setup.psi)
    return measured_count(setup, d) - g * X_value(setup, y_weighted=True)


class RemainderProfile(NamedTuple):
    level: float
    count: int
    max_scaled: float
    argmax: str


def remainder_profile(setup: ExceptionalSetup, level: float) -> RemainderProfile:
    """max |r_d| sqrt(Nd) over squarefree d on psi = 1 primes with Nd < level."""
    best, arg, count = 0.0, "(1)", 0
    for d in enumerate_ideals(setup.D, setup.G, max(int(math.ceil(level)) - 1, 1), squarefree=True,
                              allowed=lambda P: setup.psi.of_prime(P) == 1):
        if d.norm >= level:
            continue
        count += 1
        v = abs(remainder_empirical(setup, d)) * math.sqrt(d.norm)
        if v > best:
            best, arg = v, repr(d)
    return RemainderProfile(level, count, best, arg)


# ---------------------------------------------------------------------------
# Structural constants and hypothesis windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StructuralConstants:
    kind: str
    d_K: int
    n_K: int
    W: float
    Q: float
    d_psi: float
    exponents: Tuple[float, float, float]
    exponents_h_free: Tuple[float, float, float]
    h: int
    h_bound: float
    x_lower_with_h: float
    x_lower_h_free: float


def structural_constants(setup: ExceptionalSetup) -> StructuralConstants:
    d = -setup.D
    kind = setup.psi.kind
    if kind == QUADRATIC:
        W, Q, dpsi = N_K ** (2 * N_K) * d ** 2, (4 * d) ** 0.5, float(d ** 2)
    else:
        W, Q, dpsi = N_K ** N_K * d, (4 * d) ** 0.25, float(d)
    A, B, C = EXPONENTS[kind]
    A2, B2, C2 = EXPONENTS_H_FREE[kind]
    h = setup.G.h
    # both variants without the (1+delta) power and e^{M n_K}; N q = 1
    return StructuralConstants(
        kind=kind, d_K=d, n_K=N_K, W=float(W), Q=Q, d_psi=dpsi,
        exponents=(A, B, C), exponents_h_free=(A2, B2, C2),
        h=h, h_bound=math.e ** N_K * math.sqrt(d),
        x_lower_with_h=N_K ** (A * N_K) * d ** B * h ** 2,
        x_lower_h_free=N_K ** (A2 * N_K) * d ** B2,
    )


@dataclass(frozen=True)
class Check:
    holds: bool
    lhs: float
    rhs: float
    margin: float
    scale: str

    @classmethod
    def at_least(cls, lhs: float, rhs: float, scale: str = "log") -> "Check":
        return cls(lhs >= rhs, lhs, rhs, lhs - rhs, scale)

    @classmethod
    def at_most(cls, lhs: float, rhs: float, scale: str = "log") -> "Check":
        return cls(lhs <= rhs, lhs, rhs, rhs - lhs, scale)


@dataclass(frozen=True)
class HypothesisReport:
    checks: Dict[str, Check]

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks.values())

    def to_dict(self) -> dict:
        return {k: asdict(v) for k, v in self.checks.items()}


def z_formula(setup: ExceptionalSetup) -> float:
    """(kappa^-1 + 1)^{1+delta} W^{1/2+delta} e^{M n_K}."""
    c = character_constants(setup)
    W = structural_constants(setup).W
    dl = setup.delta
    return math.exp((1 + dl) * math.log(1 / c.kappa_psi + 1) + (0.5 + dl) * math.log(W) + setup.M_delta * N_K)


def effective_z(setup: ExceptionalSetup) -> float:
    """The configured z (or the formula value) clamped to [2, sqrt(x)]."""
    z = setup.z if setup.z is not None else z_formula(setup)
    return max(2.0, min(z, math.sqrt(setup.x)))


def small_prime_sum(setup: ExceptionalSetup, z: float) -> Fraction:
    return sum((Fraction(1, P.norm) for P in sieve_primes(setup, z)), Fraction(0))


def hypothesis_report(setup: ExceptionalSetup) -> HypothesisReport:
    c = character_constants(setup)
    s = structural_constants(setup)
    dl, M = setup.delta, setup.M_delta * N_K
    lx = math.log(setup.x)
    lk = math.log(1 / c.kappa_psi + 1)
    lW, lQ, lh = math.log(s.W), math.log(s.Q), math.log(c.h)
    z = effective_z(setup)
    checks = {
        "x_upper": Check.at_most(lx, 100 * math.log(N_K ** N_K * s.d_K) + M),
        "x_lower_1": Check.at_least(lx, (1 + 50 * dl) * (4 * lk + lW + 4 * lQ + 4 * lh) + M),
    }
    if setup.psi.kind == QUADRATIC:
        l2 = 5 * lk + 2.5 * lW + 2 * lQ + 2 * lh
    else:
        l2 = 3 * lk + 1.5 * lW + 2 * lQ + 2 * lh
    checks["x_lower_2"] = Check.at_least(lx, (1 + 50 * dl) * l2 + M)
    checks["z_window"] = Check.at_least(math.log(z), (1 + dl) * lk + (0.5 + dl) * lW + M)
    sps = small_prime_sum(setup, z)
    checks["small_prime_sum"] = Check.at_most(float(sps), 1 + dl, "linear")
    checks["eta_min"] = Check.at_least(setup.eta, ETA_MIN, "linear")
    checks["eta_delta"] = Check.at_least(setup.eta, setup.eta_delta, "linear")
    V = V_of_z(sieve_primes(setup, z), density_model(setup, z), z)
    dim_exp = (2 if setup.psi.kind == QUADRATIC else 1) + dl
    checks["dimension"] = Check.at_most(math.log(1 / V), dim_exp)
    return HypothesisReport(checks)


# ---------------------------------------------------------------------------
# Lower-bound constants
# ---------------------------------------------------------------------------

def sifting_dimension_constant(kind: str, delta: float = 0.0) -> float:
    return math.exp((2 if kind == QUADRATIC else 1) + delta)


def lower_bound_constant(C: float, tau: float, y: float) -> float:
    """(1/C) [ (1 - E0)/y - e^{1-y} (1 + E1) ] at dimension constant C and sifting variable tau."""
    E0, E1 = E0_E1(C, tau)
    return ((1 - E0) / y - math.exp(1 - y) * (1 + E1)) / C


def limiting_constant(kind: str, y: Optional[float] = None) -> float:
    """The lower-bound constant at delta -> 0 with tau just above 5 (quadratic) or 3 (principal)."""
    y = DEFAULT_Y[kind] if y is None else y
    tau = 5.0 if kind == QUADRATIC else 3.0
    return lower_bound_constant(sifting_dimension_constant(kind), tau, y)


# ---------------------------------------------------------------------------
# Lower-bound report
# ---------------------------------------------------------------------------

def count_primes_in_class(D: int, C: int, x: float, ramified_included: bool = True) -> int:
    """#{prime ideals P in class C with NP < x} by splitting type and class."""
    if x <= 2:
        return 0
    t = prime_table(D, math.ceil(x) - 1)
    mask = (t.cls == C) & (t.norm < x)
    if not ramified_included:
        mask &= t.kind != 0
    return int(mask.sum())


@dataclass(frozen=True)
class LargePrimeRow:
    norm: int
    prime: str
    sifted: float
    comparison: float
    ratio: float


@dataclass(frozen=True)
class LargePrimeProfile:
    rows: Tuple[LargePrimeRow, ...]
    total: float
    S_z: float
    S_sqrt_x: float
    identity_ok: bool
    psi_large_sum: float
    one_minus_beta_log_x: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [asdict(r) for r in self.rows]
        return d


def _min_prime_weights(A: SieveSequence, primes: Sequence[PrimeIdeal], ordering: IdealOrdering) -> Dict[PrimeIdeal, float]:
    """For each prime, the weight of entries whose least prime factor (in the ordering) it is."""
    wanted = set(primes)
    acc: Dict[PrimeIdeal, List[float]] = {}
    for n, a in A.entries.items():
        if not n.factors:
            continue
        least = min(n.primes, key=ordering.key)
        if least in wanted:
            acc.setdefault(least, []).append(a)
    return {P: math.fsum(v) for P, v in acc.items()}


def large_prime_profile(setup: ExceptionalSetup, A: Optional[SieveSequence] = None) -> LargePrimeProfile:
    """S(A_p, p) for psi = 1 primes with z <= Np < sqrt(x), against X V(z) / Np."""
    z = effective_z(setup)
    rx = math.sqrt(setup.x)
    A = build_sequence(setup) if A is None else A
    P_all = sieve_primes(setup, setup.x)
    S_z = S_direct(A, P_all, z)
    S_rx = S_direct(A, P_all, rx)
    hyp = beta_from_eta(setup.D, max(setup.eta, ETA_MIN))
    psi_sum = math.fsum(1 / P.norm for P in P_all if P.norm >= z)
    olx = (1 - hyp.beta) * math.log(setup.x)
    if z >= rx:
        return LargePrimeProfile((), 0.0, S_z, S_rx, _close(S_z, S_rx), psi_sum, olx)
    mid = [P for P in P_all if z <= P.norm < rx]
    weights = _min_prime_weights(A, mid, setup.ordering)
    model = density_model(setup, z)
    XV = model.X * V_of_z(P_all, model, z)
    rows = []
    for P in mid:
        s = weights.get(P, 0.0)
        comp = XV / P.norm
        rows.append(LargePrimeRow(P.norm, repr(P), s, comp, s / comp))
    total = math.fsum(r.sifted for r in rows)
    ok = _close(S_z - S_rx, total, max(abs(S_z), abs(total)))
    return LargePrimeProfile(tuple(rows), total, S_z, S_rx, ok, psi_sum, olx)


def _close(a: float, b: float, scale: float = 0.0) -> bool:
    return abs(a - b) <= IDENTITY_TOL * max(abs(a), abs(b), abs(scale), 1e-300)


@dataclass(frozen=True)
class Theorem1Report:
    kind: str
    x: float
    y: float
    z: float
    z_formula: float
    level_y: float
    tau_y: float
    X: float
    X_y: float
    V_z: float
    h: int
    kappa_K: float
    kappa_psi: float
    b_psi: float
    Delta_psi: float
    c_psi_used: float
    c_psi_limit: float
    c_psi_at_tau_y: float
    E0: float
    E1: float
    dimension_constant: float
    S_y_weighted: float
    S_y_z: float
    large_prime_sum: float
    buchstab_identity_ok: bool
    unit_term: float
    S1_prime_sum: float
    S1_sifted_part: float
    S2: float
    cutoff_split_ok: bool
    S2_bound: float
    S2_ok: bool
    S1_target: float
    S1_ge_target: bool
    lhs_count: int
    lhs_count_oracle: Optional[int]
    ramified_included: bool
    rhs_bound: float
    lhs_ge_rhs: bool
    rhs_alternate: float
    upper_experimental: float
    lhs_le_upper_experimental: bool
    hypothesis: HypothesisReport

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "hypothesis"}
        d["hypothesis"] = self.hypothesis.to_dict()
        return d


def theorem1_report(setup: ExceptionalSetup, with_oracle: bool = False) -> Theorem1Report:
    if not setup.residue_ok:
        raise NonResidueClass(f"psi(C) = -1 for class {setup.C}")
    kind = setup.psi.kind
    c = character_constants(setup)
    s = structural_constants(setup)
    z = effective_z(setup)
    dl = setup.delta
    x, y = setup.x, setup.y
    level_y = (x / y) ** (1 - 4 * dl) / (c.h ** 2 * s.Q ** (2 + 2 * dl))
    tau_y = math.log(level_y) / math.log(z)
    Cpsi = sifting_dimension_constant(kind, dl)
    E0, E1 = E0_E1(Cpsi, tau_y)

    A = build_sequence(setup)
    A1 = build_sequence(setup, y=1.0)
    P_all = sieve_primes(setup, x)
    model = density_model(setup, z)
    V = V_of_z(P_all, model, z)
    prof = large_prime_profile(setup, A)
    S_rx = prof.S_sqrt_x

    rx = math.sqrt(x)
    small = {P for P in P_all if P.norm < rx}
    unit = math.fsum(a for n, a in A.entries.items() if n.is_unit())
    S1 = math.fsum(a for n, a in A.entries.items() if n.omega == 1 and n.norm < x)
    S1_sifted = math.fsum(a for n, a in A.entries.items()
                          if n.omega == 1 and rx <= n.norm < x)
    S2 = math.fsum(a for n, a in A.entries.items()
                   if n.norm >= x and not any(P in small for P in n.primes))
    S2_bound = math.exp(1 - y) * S_direct(A1, P_all, z)

    X = X_value(setup)
    c_used = C_PSI[kind]
    lhs = count_primes_in_class(setup.D, setup.C, x, setup.ramified_included)
    oracle = None
    if with_oracle:
        fi = setup.C
        oracle = oracles.count_prime_ideals_by_form(setup.D, fi, math.ceil(x), setup.ramified_included)
    base = c.Delta_psi * c.kappa_K * x / c.h
    rhs = c_used * base
    upper = C_TILDE[kind] * base
    return Theorem1Report(
        kind=kind, x=x, y=y, z=z, z_formula=z_formula(setup),
        level_y=level_y, tau_y=tau_y,
        X=X, X_y=X_value(setup, y_weighted=True), V_z=V,
        h=c.h, kappa_K=c.kappa_K, kappa_psi=c.kappa_psi, b_psi=c.b_psi, Delta_psi=c.Delta_psi,
        c_psi_used=c_used, c_psi_limit=limiting_constant(kind, y),
        c_psi_at_tau_y=lower_bound_constant(Cpsi, tau_y, y),
        E0=E0, E1=E1, dimension_constant=Cpsi,
        S_y_weighted=S_rx, S_y_z=prof.S_z, large_prime_sum=prof.total,
        buchstab_identity_ok=prof.identity_ok,
        unit_term=unit, S1_prime_sum=S1, S1_sifted_part=S1_sifted, S2=S2,
        cutoff_split_ok=_close(S_rx, unit + S1_sifted + S2),
        S2_bound=S2_bound, S2_ok=S2 <= S2_bound * (1 + IDENTITY_TOL),
        S1_target=c_used * X, S1_ge_target=S1 >= c_used * X,
        lhs_count=lhs, lhs_count_oracle=oracle, ramified_included=setup.ramified_included,
        rhs_bound=rhs, lhs_ge_rhs=lhs >= rhs,
        rhs_alternate=C_ALTERNATE[kind] * base,
        upper_experimental=upper, lhs_le_upper_experimental=lhs <= upper,
        hypothesis=hypothesis_report(setup),
    )


# ---------------------------------------------------------------------------
# Least primes
# ---------------------------------------------------------------------------

DEFAULT_PRIME_BOUND = 10_000
MAX_PRIME_BOUND = 10_000_000


@dataclass(frozen=True)
class LeastPrime:
    D: int
    C: int
    form: Tuple[int, int, int]
    p_all: int
    witness_all: Tuple[int, int]
    p_split: int
    witness_split: Tuple[int, int]
    least_ideal_norm: int
    bound: int


def represent(f: QuadForm, n: int) -> Optional[Tuple[int, int]]:
    """Some (x, y) with y >= 0 and f(x, y) = n, by solving for x at each y."""
    a, b, c = f.a, f.b, f.c
    D = f.discriminant
    ymax = math.isqrt(4 * a * n // (-D)) + 1
    for yy in range(0, ymax + 1):
        disc = 4 * a * n + D * yy * yy
        if disc < 0:
            break
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for s in (r, -r):
            num = -b * yy + s
            if num % (2 * a) == 0:
                xx = num // (2 * a)
                if a * xx * xx + b * xx * yy + c * yy * yy == n:
                    return (xx, yy)
    return None


def _least_in_class(D: int, C: int, bound: int):
    t = prime_table(D, bound)
    in_c = t.cls == C
    prime_norm = t.kind != -1
    all_idx = np.flatnonzero(in_c & prime_norm)
    split_idx = np.flatnonzero(in_c & (t.kind == 1))
    any_idx = np.flatnonzero(in_c)
    p_all = int(t.p[all_idx].min()) if all_idx.size else None
    p_split = int(t.p[split_idx].min()) if split_idx.size else None
    least_norm = int(t.norm[any_idx].min()) if any_idx.size else None
    return p_all, p_split, least_norm


def least_prime(D: int, G: Optional[ClassGroup], psi: Optional[RealCharacter], C: int,
                bound: int = DEFAULT_PRIME_BOUND, max_bound: int = MAX_PRIME_BOUND) -> LeastPrime:
    """Least rational primes represented by the class C, with and without ramified primes.

    The search bound doubles from ``bound`` up to ``max_bound``.
    """
    G = G or class_group(D)
    f = G.reduced_forms[C]
    B = int(bound)
    while True:
        p_all, p_split, least_norm = _least_in_class(D, C, B)
        if p_all is not None and p_split is not None:
            break
        if B >= max_bound:
            raise NotFoundBelow(B)
        B = min(2 * B, max_bound)
    w_all = represent(f, p_all)
    w_split = represent(f, p_split)
    if w_all is None or w_split is None:
        raise ArithmeticError(f"class {C} of D={D}: least prime not represented by its form")
    return LeastPrime(D, C, (f.a, f.b, f.c), p_all, w_all, p_split, w_split, least_norm, B)


@dataclass(frozen=True)
class ScanRow:
    D: int
    h: int
    structure: Tuple[int, ...]
    char_index: int
    char_kind: str
    char_class_ok: bool
    class_index: int
    form: Tuple[int, int, int]
    least_prime_all: int
    least_prime_split: int
    least_ideal_norm: int
    ratio_all: float
    ratio_split: float
    verified: bool


@dataclass(frozen=True)
class ScanFailure:
    D: int
    error: str


def _scan_one(D: int, verify: bool) -> Tuple[List[ScanRow], Optional[ScanFailure]]:
    try:
        G = class_group(D)
        rows = []
        cache: Dict[int, LeastPrime] = {}
        for psi in real_characters(G):
            for C in range(G.h):
                if psi(C) != 1:
                    continue
                lp = cache.get(C)
                if lp is None:
                    lp = cache[C] = least_prime(D, G, psi, C)
                ok = True
                if verify:
                    f = G.reduced_forms[C]
                    ra = oracles.least_prime_by_form(f, lp.p_all, True)
                    rs = oracles.least_prime_by_form(f, lp.p_split, False)
                    ok = (ra is not None and ra[0] == lp.p_all and rs is not None and rs[0] == lp.p_split)
                lD = math.log(-D)
                rows.append(ScanRow(D, G.h, G.structure, psi.index, psi.kind, True, C, lp.form,
                                    lp.p_all, lp.p_split, lp.least_ideal_norm,
                                    math.log(lp.p_all) / lD, math.log(lp.p_split) / lD, ok))
        return rows, None
    except Exception as exc:  # recorded per discriminant; the scan goes on
        return [], ScanFailure(D, f"{type(exc).__name__}: {exc}")


def _scan_task(args):
    return _scan_one(*args)


@dataclass(frozen=True)
class ScanTable:
    rows: Tuple[ScanRow, ...]
    failures: Tuple[ScanFailure, ...]
    discriminants: Tuple[int, ...]

    @property
    def max_ratio(self) -> Dict[str, float]:
        out = {}
        for kind in (PRINCIPAL, QUADRATIC):
            vals = [r.ratio_all for r in self.rows if r.char_kind == kind]
            out[kind] = max(vals) if vals else float("nan")
        return out


def scan(dmin: int, dmax: int, *, verify: bool = True, workers: int = 1) -> ScanTable:
    """Least primes for every fundamental D in [dmin, dmax], every real character and class with psi(C) = 1."""
    Ds = fundamental_discriminants(dmin, dmax)
    tasks = [(D, verify) for D in Ds]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_task, tasks, chunksize=8))
    else:
        results = [_scan_task(t) for t in tasks]
    rows, fails = [], []
    for r, f in results:
        rows.extend(r)
        if f is not None:
            fails.append(f)
    return ScanTable(tuple(rows), tuple(fails), tuple(Ds))
