"""Real class-group characters and the arithmetic built on them.

Covers the divisor-sum weight lam(n) = sum_{m | n} psi(m) and its
squarefree part rho, the values L(1, psi), the residues kappa, the Euler
products b and Delta, and smoothed sums of lam against N^-beta e^{-N/y}.
Large sums run through the compiled ideal walk in ``ideals``; results carry a
heuristic truncation estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .errors import BadWindow, HypothesisViolated, TooSmall, Unstable, WrongKind
from .ideals import IdealFactorization, PrimeIdeal, multiplicative_coefficients, prime_table
from .qfield import ClassGroup, class_group

PRINCIPAL = "principal"
QUADRATIC = "quadratic"

# Truncation rule for every smoothed sum: enumerate norms up to 40 y.
SMOOTH_FACTOR = 40
DEFAULT_L1_CUTOFF = 400_000
DEFAULT_EULER_CUTOFF = 100_000


@dataclass(frozen=True)
class RealCharacter:
    D: int
    values: Tuple[int, ...]
    kind: str
    index: int = 0

    def __call__(self, class_index: int) -> int:
        return self.values[class_index]

    def of_prime(self, P: PrimeIdeal) -> int:
        return self.values[P.class_index]

    def of_ideal(self, n: IdealFactorization) -> int:
        return self.values[n.class_index]

    @property
    def is_principal(self) -> bool:
        return self.kind == PRINCIPAL


class SmoothedSumResult(NamedTuple):
    value: float
    cutoff: int
    tail_estimate: float


@dataclass(frozen=True)
class ZeroHypothesis:
    eta: float
    beta: float
    d_K: int
    n_K: int = 2
    Nq: int = 1


def real_characters(G: ClassGroup) -> List[RealCharacter]:
    """All homomorphisms Cl -> {+-1}, principal first.

    Works through Cl / Cl^2: cosets of the squares get F_2 coordinates by
    adjoining one coset representative at a time; each sign vector on those
    coordinates is a character.
    """
    h = G.h
    t = G.composition_table
    label = {t[i][i]: 0 for i in range(h)}
    bits = 0
    for g in range(h):
        if g in label:
            continue
        for x, lab in list(label.items()):
            label[t[x][g]] = lab | (1 << bits)
        bits += 1
    chars = []
    for s in range(1 << bits):
        vals = tuple(-1 if bin(label[i] & s).count("1") % 2 else 1 for i in range(h))
        chars.append(RealCharacter(G.D, vals, PRINCIPAL if s == 0 else QUADRATIC, s))
    return chars


def is_homomorphism(psi: RealCharacter, G: ClassGroup) -> bool:
    t = G.composition_table
    return all(psi(t[i][j]) == psi(i) * psi(j) for i in range(G.h) for j in range(G.h))


# ---------------------------------------------------------------------------
# lam and rho
# ---------------------------------------------------------------------------

def lam(psi: RealCharacter, n: IdealFactorization) -> int:
    """Sum of psi over the divisors of n (identically 1 for the principal character)."""
    if psi.is_principal:
        return 1
    out = 1
    for P, e in n.factors:
        if psi.of_prime(P) == 1:
            out *= e + 1
        elif e % 2:
            return 0
    return out


def rho(psi: RealCharacter, n: IdealFactorization) -> int:
    return lam(psi, n) if n.squarefree else 0


def rho_prime_value(psi: RealCharacter) -> int:
    """rho at a prime with psi(P) = 1."""
    return 1 if psi.is_principal else 2


# ---------------------------------------------------------------------------
# L(1, psi) and residues
# ---------------------------------------------------------------------------

def _fsum_weighted(coeffs: np.ndarray, weights: np.ndarray) -> float:
    terms = coeffs * weights
    return math.fsum(terms[terms != 0].tolist())


def L1(psi: RealCharacter, cutoff: int = DEFAULT_L1_CUTOFF, rel_tol: float = 1e-2) -> SmoothedSumResult:
    """L(1, psi) from smoothed sums at y = cutoff/40 and half of that."""
    if psi.is_principal:
        raise WrongKind("L(1, psi) diverges for the principal character")
    cutoff = int(cutoff)
    coeffs = multiplicative_coefficients(psi.D, cutoff, "psi", psi.values)
    n = np.arange(cutoff + 1, dtype=np.float64)
    n[0] = 1.0
    y2 = cutoff / SMOOTH_FACTOR
    y1 = y2 / 2
    s2 = _fsum_weighted(coeffs[1:], np.exp(-n[1:] / y2) / n[1:])
    s1 = _fsum_weighted(coeffs[1:], np.exp(-n[1:] / y1) / n[1:])
    gap = abs(s2 - s1)
    if gap > rel_tol * abs(s2):
        raise Unstable(f"smoothed L(1) sums at y={y1:g}, {y2:g} differ by {gap:.3g}")
    return SmoothedSumResult(s2, cutoff, gap)


def kappa_K(G: ClassGroup) -> float:
    """Residue of the Dedekind zeta function at s = 1."""
    return 2 * math.pi * G.h / (G.w * math.sqrt(-G.D))


def kappa_psi(psi: RealCharacter, G: Optional[ClassGroup] = None, cutoff: int = DEFAULT_L1_CUTOFF) -> float:
    G = G or class_group(psi.D)
    if psi.is_principal:
        return kappa_K(G)
    return kappa_K(G) * L1(psi, cutoff).value


def smoothed_residue(psi: RealCharacter, cutoff: int) -> float:
    """(1/y) sum lam(n) e^{-Nn/y} with y = cutoff/40; tends to kappa_psi."""
    mode = "count" if psi.is_principal else "lambda"
    coeffs = multiplicative_coefficients(psi.D, int(cutoff), mode, psi.values)
    y = cutoff / SMOOTH_FACTOR
    n = np.arange(1, int(cutoff) + 1, dtype=np.float64)
    return _fsum_weighted(coeffs[1:], np.exp(-n / y)) / y


class EulerConstants(NamedTuple):
    b_psi: float
    Delta_psi: float
    tail_estimate: float


def _euler_log_factors(psi: RealCharacter, cutoff: int) -> List[float]:
    table = prime_table(psi.D, cutoff)
    N = table.norm.astype(np.float64)
    if psi.is_principal:
        return np.log1p(-1.0 / N ** 2).tolist()
    sgn = np.asarray(psi.values)[table.cls]
    plus = np.log1p(-3.0 / N ** 2 + 2.0 / N ** 3)
    minus = np.log1p(-1.0 / N ** 2)
    return np.where(sgn == 1, plus, minus).tolist()


def euler_tail_bound(cutoff: int) -> float:
    """Relative bound on the omitted Euler factors beyond the cutoff.

    Uses |log factor| <= 3.1/N^2 per prime ideal and #{ideals of norm n} <= d(n),
    with sum_{n > M} d(n)/n^2 <= (log M + 2)/M.
    """
    M = float(cutoff)
    return math.expm1(3.1 * (math.log(M) + 2) / M)


def b_psi_and_Delta_psi(psi: RealCharacter, cutoff: int = DEFAULT_EULER_CUTOFF,
                        l1_cutoff: int = DEFAULT_L1_CUTOFF) -> EulerConstants:
    if cutoff < 100:
        raise TooSmall("Euler product cutoff must be at least 100")
    prod = math.exp(math.fsum(_euler_log_factors(psi, int(cutoff))))
    tail = euler_tail_bound(cutoff)
    if psi.is_principal:
        return EulerConstants(prod, prod, tail * prod)
    b = 2 * prod
    delta = L1(psi, l1_cutoff).value * prod
    return EulerConstants(b, delta, tail * b)


def euler_product(psi: RealCharacter, cutoff: int = DEFAULT_EULER_CUTOFF) -> float:
    """The bare product over prime ideals (b_psi without the leading 2)."""
    return math.exp(math.fsum(_euler_log_factors(psi, int(cutoff))))


# ---------------------------------------------------------------------------
# Smoothed sums of lam
# ---------------------------------------------------------------------------

def _gamma_tail(a: float, T: float, y: float) -> float:
    """Upper bound for int_T^inf t^a e^{-t/y} dt, valid when T > a*y."""
    return y * T ** a * math.exp(-T / y) / (1 - a * y / T)


def _lambda_coeffs(psi: RealCharacter, N: int) -> np.ndarray:
    mode = "count" if psi.is_principal else "lambda"
    return multiplicative_coefficients(psi.D, N, mode, psi.values)


def _resolve_cutoff(y: float, cutoff: Optional[int]) -> int:
    need = math.ceil(SMOOTH_FACTOR * y)
    if cutoff is None:
        return need
    if cutoff < SMOOTH_FACTOR * y:
        raise TooSmall(f"cutoff {cutoff} below {SMOOTH_FACTOR}*y = {SMOOTH_FACTOR * y:g}")
    return int(cutoff)


# Norm coefficients of lam are at most d(k)^3 <= 8 k^1.5.
_COEFF_EXPONENT = 1.5
_COEFF_CONSTANT = 8.0


def smoothed_lambda_sum(psi: RealCharacter, beta: float, y: float,
                        cutoff: Optional[int] = None) -> SmoothedSumResult:
    """sum lam(n) Nn^-beta e^{-Nn/y} truncated at norm cutoff (>= 40 y)."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if y < 1:
        raise ValueError("y must be at least 1")
    M = _resolve_cutoff(y, cutoff)
    c = _lambda_coeffs(psi, M)
    n = np.arange(1, M + 1, dtype=np.float64)
    value = _fsum_weighted(c[1:], n ** (-beta) * np.exp(-n / y))
    tail = _COEFF_CONSTANT * _gamma_tail(_COEFF_EXPONENT, float(M), y)
    return SmoothedSumResult(value, M, tail)


def smoothed_lambda_window(psi: RealCharacter, y1: float, y2: float,
                           cutoff: Optional[int] = None) -> SmoothedSumResult:
    """sum lam(n)/Nn (e^{-Nn/y2} - e^{-Nn/y1}); needs y2 >= 3 y1 >= 3."""
    if not (y1 >= 1 and y2 >= 3 * y1):
        raise BadWindow(f"need y2 >= 3*y1 >= 3, got y1={y1}, y2={y2}")
    M = _resolve_cutoff(y2, cutoff)
    c = _lambda_coeffs(psi, M)
    n = np.arange(1, M + 1, dtype=np.float64)
    value = _fsum_weighted(c[1:], (np.exp(-n / y2) - np.exp(-n / y1)) / n)
    tail = _COEFF_CONSTANT * _gamma_tail(_COEFF_EXPONENT - 1, float(M), y2)
    return SmoothedSumResult(value, M, tail)


def beta_from_eta(D: int, eta: float) -> ZeroHypothesis:
    """Hypothetical real zero beta = 1 - 1/(eta log(4|D|))."""
    if eta < 20:
        raise HypothesisViolated(f"eta = {eta} < 20")
    d_K = -D
    beta = 1 - 1 / (eta * math.log(4 * d_K))
    return ZeroHypothesis(eta=float(eta), beta=beta, d_K=d_K)
