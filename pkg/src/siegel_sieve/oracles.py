"""Brute-force reference computations.

Nothing here touches prime-ideal splitting or the compiled walks: counts
come from lattice points of reduced forms, residues from squaring, class
numbers from the analytic formula.  Tests and the scan use these to check
the main pipelines.
"""
from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np

from .qfield import QuadForm, kronecker, reduced_forms, unit_count


def brute_legendre(a: int, p: int) -> int:
    """(a/p) for an odd prime p by listing squares."""
    a %= p
    if a == 0:
        return 0
    return 1 if a in {x * x % p for x in range(1, p)} else -1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def exhaustive_reduced_forms(D: int) -> List[QuadForm]:
    """Reduced primitive forms of discriminant D by scanning every a <= |D|."""
    out = []
    for a in range(1, -D + 1):
        for b in range(-a, a + 1):
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadForm(a, b, c)
            if f.is_reduced() and f.is_primitive():
                out.append(f)
    return sorted(out)


def analytic_class_number(D: int) -> int:
    """h(D) = -(w / 2|D|) * sum_{n < |D|} (D/n) n for fundamental D < 0."""
    d = -D
    s = sum(kronecker(D, n) * n for n in range(1, d))
    h = -unit_count(D) * s / (2 * d)
    return round(h)


def form_representation_counts(f: QuadForm, N: int) -> np.ndarray:
    """r[n] = #{(x, y) != (0, 0) : f(x, y) = n} for 0 <= n <= N."""
    a, b, c = f.a, f.b, f.c
    D = f.discriminant
    counts = np.zeros(N + 1, dtype=np.int64)
    ymax = math.isqrt(4 * a * N // (-D)) + 1
    for y in range(-ymax, ymax + 1):
        disc = 4 * a * N + D * y * y
        if disc < 0:
            continue
        r = math.isqrt(disc)
        lo = (-b * y - r) // (2 * a) - 1
        hi = (-b * y + r) // (2 * a) + 1
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        vals = a * xs * xs + b * xs * y + c * y * y
        vals = vals[(vals >= 1) & (vals <= N)]
        counts += np.bincount(vals, minlength=N + 1)
    return counts


def ideal_counts_by_class(D: int, N: int) -> np.ndarray:
    """rows[i, n] = number of ideals of norm n in the class of the i-th reduced form."""
    w = unit_count(D)
    rows = []
    for f in reduced_forms(D):
        r = form_representation_counts(f, N)
        if np.any(r % w):
            raise ArithmeticError("representation count not divisible by the unit count")
        rows.append(r // w)
    out = np.array(rows)
    out[0, 1] = 1  # the unit ideal; (0,0) is excluded above
    return out


def dedekind_coefficients(D: int, N: int) -> np.ndarray:
    return ideal_counts_by_class(D, N).sum(axis=0)


def inverse_zeta_at_2(D: int, N: int) -> float:
    """1 / sum_{n <= N} a_K(n)/n^2."""
    a = dedekind_coefficients(D, N)
    n = np.arange(1, N + 1, dtype=np.float64)
    return 1.0 / math.fsum((a[1:] / n ** 2).tolist())


def _primes_upto(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return sieve


def count_prime_ideals_by_form(D: int, form_index: int, x: int, include_ramified: bool = True) -> int:
    """#{prime ideals of norm < x in the class of the form_index-th reduced form}.

    Prime ideals of prime norm p are counted as r_Q(p)/w.  Inert primes
    enter (in the principal class) as the rational primes p with p^2 < x
    that no reduced form of discriminant D represents.
    """
    forms = reduced_forms(D)
    w = unit_count(D)
    limit = max(x - 1, 1)
    is_p = _primes_upto(limit)
    r = form_representation_counts(forms[form_index], limit)
    total = 0
    for p in np.flatnonzero(is_p).tolist():
        if not include_ramified and D % p == 0:
            continue
        total += int(r[p]) // w
    if form_index == 0:
        root = math.isqrt(limit)
        any_rep = np.zeros(root + 1, dtype=bool)
        for f in forms:
            any_rep |= form_representation_counts(f, root) > 0
        total += sum(1 for p in range(2, root + 1)
                     if is_p[p] and p * p < x and not any_rep[p])
    return total


def least_prime_by_form(f: QuadForm, bound: int, include_ramified: bool = True) -> Optional[Tuple[int, Tuple[int, int]]]:
    """Least prime p <= bound with p = f(x, y), by scanning lattice points."""
    D = f.discriminant
    a, b, c = f.a, f.b, f.c
    best = None
    ymax = math.isqrt(4 * a * bound // (-D)) + 1
    for y in range(0, ymax + 1):
        disc = 4 * a * bound + D * y * y
        if disc < 0:
            continue
        r = math.isqrt(disc)
        for x in range((-b * y - r) // (2 * a) - 1, (-b * y + r) // (2 * a) + 2):
            v = a * x * x + b * x * y + c * y * y
            if v < 2 or v > bound or (best is not None and v >= best[0]):
                continue
            if not include_ramified and D % v == 0:
                continue
            if is_prime(v):
                best = (v, (x, y))
    return best
