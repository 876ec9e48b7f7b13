"""Compiled inner loops: prime-ideal tables and walks over ideals by norm.

Everything here works on flat integer arrays so numba can compile it.  The
pure-Python routines in ``ideals`` and ``oracles`` compute the same objects
independently and the test suite compares the two.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

# local-factor modes for the ideal walks
MODE_COUNT = 0   # 1 for every prime power
MODE_LAMBDA = 1  # divisor sum of a real character
MODE_RHO = 2     # squarefree, supported on sign +1 primes, value rho1 per prime
MODE_PSI = 3     # completely multiplicative character value
MODE_MU = 4      # Moebius

KIND_SPLIT = 1
KIND_RAMIFIED = 0
KIND_INERT = -1


def primes_below(n: int) -> np.ndarray:
    """Rational primes p <= n (numpy sieve)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p::2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@njit(cache=True)
def _powmod(b, e, m):
    r = 1
    b %= m
    while e > 0:
        if e & 1:
            r = (r * b) % m
        b = (b * b) % m
        e >>= 1
    return r


@njit(cache=True)
def _sqrt_mod(a, p):
    """Square root of a quadratic residue a modulo an odd prime p."""
    a %= p
    if a == 0:
        return 0
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if s == 1:
        return _powmod(a, (p + 1) // 4, p)
    z = 2
    while _powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m = s
    c = _powmod(z, q, p)
    t = _powmod(a, q, p)
    r = _powmod(a, (q + 1) // 2, p)
    while t != 1:
        i = 0
        t2 = t
        while t2 != 1:
            t2 = (t2 * t2) % p
            i += 1
        b = c
        for _ in range(m - i - 1):
            b = (b * b) % p
        m = i
        c = (b * b) % p
        t = (t * c) % p
        r = (r * b) % p
    return r


@njit(cache=True)
def _reduce(a, b, c):
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * r * a
        if a > c:
            t = a
            a = c
            c = t
            b = -b
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


@njit(cache=True)
def _splitting(D, p):
    """1 split, -1 inert, 0 ramified."""
    if p == 2:
        r = D % 8
        if r == 1:
            return 1
        if r == 5:
            return -1
        return 0
    a = D % p
    if a == 0:
        return 0
    return 1 if _powmod(a, (p - 1) // 2, p) == 1 else -1


@njit(cache=True)
def _root_b(D, p, kind):
    """Middle coefficient b with b^2 = D mod 4p, b = D mod 2, for root 0."""
    if p == 2:
        if kind == 1:
            return 1
        return 0 if D % 8 == 0 else 2
    if kind == 0:
        return 0 if D % 2 == 0 else p
    r = _sqrt_mod(D % p, p)
    b0 = min(r, p - r)
    if (b0 - D) % 2 != 0:
        b0 += p
    return b0


@njit(cache=True)
def _lookup(D, p, b, lookup, amax):
    c = (b * b - D) // (4 * p)
    a2, b2, c2 = _reduce(p, b, c)
    return lookup[a2, b2 + amax]


@njit(cache=True)
def build_prime_table(D, primes, N, lookup, amax):
    """Unsorted arrays (p, kind, root, norm, class) of prime ideals of norm <= N."""
    cap = 2 * primes.shape[0]
    P = np.empty(cap, dtype=np.int64)
    K = np.empty(cap, dtype=np.int64)
    R = np.empty(cap, dtype=np.int64)
    NN = np.empty(cap, dtype=np.int64)
    C = np.empty(cap, dtype=np.int64)
    k = 0
    for idx in range(primes.shape[0]):
        p = primes[idx]
        if p > N:
            break
        kind = _splitting(D, p)
        if kind == -1:
            if p * p <= N:
                P[k] = p; K[k] = -1; R[k] = 0; NN[k] = p * p; C[k] = 0
                k += 1
            continue
        b = _root_b(D, p, kind)
        P[k] = p; K[k] = kind; R[k] = 0; NN[k] = p
        C[k] = _lookup(D, p, b, lookup, amax)
        k += 1
        if kind == 1:
            P[k] = p; K[k] = 1; R[k] = 1; NN[k] = p
            C[k] = _lookup(D, p, -b, lookup, amax)
            k += 1
    return P[:k], K[:k], R[:k], NN[:k], C[:k]


# ---------------------------------------------------------------------------
# Ideal walks
# ---------------------------------------------------------------------------

@njit(cache=True)
def _local(mode, sgn, e, rho1):
    if mode == MODE_COUNT:
        return 1.0
    if mode == MODE_LAMBDA:
        if sgn == 1:
            return e + 1.0
        return 1.0 if e % 2 == 0 else 0.0
    if mode == MODE_RHO:
        return rho1 if (e == 1 and sgn == 1) else 0.0
    if mode == MODE_PSI:
        return 1.0 if (sgn == 1 or e % 2 == 0) else -1.0
    return -1.0 if e == 1 else 0.0


@njit(cache=True)
def _walk(norms, cls, sgn, excl, table, N, mode, rho1, scale, sigma, coeffs, acc, comp, want_coeffs):
    """Depth-first walk over ideals of norm <= N with an explicit stack.

    Each stack level holds one prime ideal (index pi) raised to exponent pe
    on top of its parent's norm/class/value (bn, bc, bv).
    """
    maxe = 1 if (mode == MODE_RHO or mode == MODE_MU) else 64
    P = norms.shape[0]
    depth_cap = 64
    pi = np.empty(depth_cap, dtype=np.int64)
    pe = np.empty(depth_cap, dtype=np.int64)
    pm = np.empty(depth_cap, dtype=np.int64)
    pc = np.empty(depth_cap, dtype=np.int64)
    bn = np.empty(depth_cap, dtype=np.int64)
    bc = np.empty(depth_cap, dtype=np.int64)
    bv = np.empty(depth_cap)
    depth = 0
    # open the first level
    j = 0
    while j < P and norms[j] <= N and excl[j]:
        j += 1
    if j < P and norms[j] <= N:
        pi[0] = j; pe[0] = 0; pm[0] = 1; pc[0] = 0; bn[0] = 1; bc[0] = 0; bv[0] = 1.0
        depth = 1
    while depth > 0:
        d = depth - 1
        i = pi[d]
        q = norms[i]
        if pe[d] < maxe and pm[d] <= N // q:
            pm[d] *= q
            pe[d] += 1
            pc[d] = table[pc[d], cls[i]]
            lv = _local(mode, sgn[i], pe[d], rho1)
            if lv != 0.0:
                val = bv[d] * lv
                m = pm[d]
                cc = pc[d]
                if want_coeffs:
                    coeffs[cc, m] += val
                else:
                    term = val * math.exp(-scale * m)
                    if sigma != 0.0:
                        term *= m ** (-sigma)
                    s = acc[cc]
                    t = s + term
                    if abs(s) >= abs(term):
                        comp[cc] += (s - t) + term
                    else:
                        comp[cc] += (term - t) + s
                    acc[cc] = t
                # open a child level on the next admissible prime
                j = i + 1
                while j < P and m * norms[j] <= N and excl[j]:
                    j += 1
                if j < P and m * norms[j] <= N:
                    pi[depth] = j; pe[depth] = 0; pm[depth] = m; pc[depth] = cc
                    bn[depth] = m; bc[depth] = cc; bv[depth] = val
                    depth += 1
            continue
        # exponents exhausted: next prime at this level
        j = i + 1
        while j < P and bn[d] * norms[j] <= N and excl[j]:
            j += 1
        if j < P and bn[d] * norms[j] <= N:
            pi[d] = j; pe[d] = 0; pm[d] = bn[d]; pc[d] = bc[d]
        else:
            depth -= 1


@njit(cache=True)
def norm_coefficients(norms, cls, sgn, excl, table, N, mode, rho1):
    """out[c, n] = sum of f(ideal) over ideals of norm n in class c."""
    h = table.shape[0]
    out = np.zeros((h, N + 1))
    out[0, 1] = 1.0
    dummy = np.zeros(1)
    _walk(norms, cls, sgn, excl, table, N, mode, rho1, 0.0, 0.0, out, dummy, dummy, True)
    return out


@njit(cache=True)
def weighted_class_sums(norms, cls, sgn, excl, table, N, mode, rho1, scale, sigma):
    """Per-class sums of f(n) * Nn^(-sigma) * exp(-scale * Nn) over Nn <= N."""
    h = table.shape[0]
    acc = np.zeros(h)
    comp = np.zeros(h)
    acc[0] = math.exp(-scale)
    dummy = np.zeros((1, 1))
    _walk(norms, cls, sgn, excl, table, N, mode, rho1, scale, sigma, dummy, acc, comp, False)
    return acc + comp
