import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from siegel_sieve import oracles
from siegel_sieve.characters import (PRINCIPAL, QUADRATIC, L1, b_psi_and_Delta_psi, beta_from_eta,
                                     euler_product, is_homomorphism, kappa_K, kappa_psi, lam,
                                     real_characters, rho, smoothed_lambda_sum, smoothed_lambda_window,
                                     smoothed_residue)
from siegel_sieve.errors import BadWindow, HypothesisViolated, TooSmall, WrongKind
from siegel_sieve.ideals import IdealFactorization, divisors, enumerate_ideals, primes_up_to
from siegel_sieve.qfield import class_group, fundamental_discriminants, kronecker


def _two_rank(D):
    return sum(1 for s in class_group(D).structure if s % 2 == 0)


@pytest.mark.parametrize("D", fundamental_discriminants(-400, -3)[::4])
def test_character_count_and_homomorphism(D):
    G = class_group(D)
    chars = real_characters(G)
    assert len(chars) == 2 ** _two_rank(D)
    assert chars[0].kind == PRINCIPAL and all(c.kind == QUADRATIC for c in chars[1:])
    assert len({c.values for c in chars}) == len(chars)
    assert all(is_homomorphism(c, G) for c in chars)


@pytest.mark.parametrize("D", fundamental_discriminants(-400, -3)[::9])
def test_genus_theory_two_rank(D):
    # 2-rank = (number of prime divisors of D) - 1
    primes = [p for p in range(2, -D + 1) if (-D) % p == 0 and oracles.is_prime(p)]
    assert _two_rank(D) == len(primes) - 1


def test_d20_quadratic_character_is_genus(chars20):
    # psi(P) = (-4/p) on split primes: the genus character of Q(sqrt(-5))
    psi = chars20[1]
    for P in primes_up_to(-20, 2000):
        if P.kind == "split":
            assert psi.of_prime(P) == kronecker(-4, P.p)


@given(st.sampled_from([-20, -84, -23, -56]), st.data())
def test_lam_is_divisor_sum(D, data):
    G = class_group(D)
    ps = primes_up_to(D, 60)
    picks = data.draw(st.lists(st.tuples(st.sampled_from(ps), st.integers(1, 3)), max_size=3))
    n = IdealFactorization.from_factors(picks, G)
    for psi in real_characters(G):
        if psi.is_principal:
            assert lam(psi, n) == 1
        else:
            assert lam(psi, n) == sum(psi.of_ideal(d) for d in divisors(n, G))
        assert lam(psi, n) >= 0
        assert rho(psi, n) == (lam(psi, n) if n.squarefree else 0)


def test_lam_inert_square_and_rho_support(chars20, G20):
    psi = chars20[1]
    inert = [P for P in primes_up_to(-20, 200) if P.kind == "inert"][0]
    bad = [P for P in primes_up_to(-20, 200) if psi.of_prime(P) == -1][0]
    assert lam(psi, IdealFactorization.from_factors([(bad, 1)], G20)) == 0
    assert lam(psi, IdealFactorization.from_factors([(bad, 2)], G20)) == 1
    assert rho(psi, IdealFactorization.from_factors([(bad, 2)], G20)) == 0
    assert lam(psi, IdealFactorization.from_factors([(inert, 1)], G20)) == 2


def test_L1_d20_against_closed_form(chars20):
    # L(1, psi) = L(1, chi_-4) L(1, chi_5) = (pi/4)(2 log((1+sqrt5)/2)/sqrt5)
    expected = (math.pi / 4) * (2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5))
    assert L1(chars20[1]).value == pytest.approx(expected, rel=1e-4)


def test_L1_principal_raises(chars20):
    with pytest.raises(WrongKind):
        L1(chars20[0])


def test_kappa_K_class_number_formula(G20):
    assert kappa_K(G20) == pytest.approx(2 * math.pi * 2 / (2 * math.sqrt(20)))
    assert smoothed_residue(real_characters(G20)[0], 1_000_000) == pytest.approx(kappa_K(G20), rel=1e-3)


def test_kappa_psi_is_limit_of_smoothed_sums(chars84):
    for psi in chars84[1:]:
        assert smoothed_residue(psi, 400_000) == pytest.approx(kappa_psi(psi), rel=1e-2)


def test_principal_b_is_inverse_zeta2(chars20):
    e = b_psi_and_Delta_psi(chars20[0])
    assert e.b_psi == pytest.approx(oracles.inverse_zeta_at_2(-20, 20000), rel=1e-4)
    # zeta_K(2) = zeta(2) L(2, chi_-20)
    L2 = float(sum(kronecker(-20, a) * mpmath.zeta(2, mpmath.mpf(a) / 20) for a in range(1, 21)) / 400)
    assert e.b_psi == pytest.approx(1 / (math.pi ** 2 / 6 * L2), rel=1e-4)
    assert e.Delta_psi == e.b_psi


def test_quadratic_b_and_delta(chars20):
    psi = chars20[1]
    e = b_psi_and_Delta_psi(psi)
    assert e.b_psi == pytest.approx(2 * euler_product(psi))
    assert e.Delta_psi == pytest.approx(L1(psi).value * e.b_psi / 2)
    assert 0 < e.Delta_psi < e.b_psi < 2


@pytest.mark.parametrize("kind_index", [0, 1])
def test_euler_constants_stable_under_cutoff_doubling(chars84, kind_index):
    psi = chars84[kind_index]
    a = b_psi_and_Delta_psi(psi, 50_000)
    b = b_psi_and_Delta_psi(psi, 100_000)
    assert abs(a.b_psi - b.b_psi) <= a.tail_estimate
    with pytest.raises(TooSmall):
        b_psi_and_Delta_psi(psi, 50)


def test_smoothed_sum_cutoff_rules(chars20):
    psi = chars20[1]
    with pytest.raises(TooSmall):
        smoothed_lambda_sum(psi, 0.9, 100, cutoff=100)
    r1 = smoothed_lambda_sum(psi, 0.9, 100)
    r2 = smoothed_lambda_sum(psi, 0.9, 100, cutoff=8000)
    assert r1.cutoff == 4000
    assert abs(r1.value - r2.value) <= r1.tail_estimate + 1e-12


def test_smoothed_sum_matches_enumeration(chars20, G20):
    psi = chars20[1]
    beta, y = 0.8, 20.0
    direct = math.fsum(lam(psi, n) * n.norm ** -beta * math.exp(-n.norm / y)
                       for n in enumerate_ideals(-20, G20, 800))
    assert smoothed_lambda_sum(psi, beta, y).value == pytest.approx(direct, rel=1e-12)


def test_window_sum(chars20):
    psi = chars20[1]
    with pytest.raises(BadWindow):
        smoothed_lambda_window(psi, 10, 20)
    r = smoothed_lambda_window(psi, 1000, 10000)
    # sum lam(n)/N(n) over a dyadic-type window is kappa_psi log(y2/y1) up to lower order
    assert r.value == pytest.approx(kappa_psi(psi) * math.log(10), rel=0.05)


def test_beta_from_eta():
    z = beta_from_eta(-20, 1e4)
    assert z.beta == pytest.approx(1 - 1 / (1e4 * math.log(80)))
    with pytest.raises(HypothesisViolated):
        beta_from_eta(-20, 19.9)


@given(st.floats(20, 1e6))
def test_beta_in_unit_interval(eta):
    b = beta_from_eta(-84, eta).beta
    assert 0 < b < 1


def test_dirichlet_series_factorisation(chars20):
    # sum lam(n) N(n)^-s for psi quadratic = zeta_K(s) L(s, psi); check coefficients against convolution
    psi = chars20[1]
    N = 3000
    from siegel_sieve.ideals import multiplicative_coefficients
    lam_c = multiplicative_coefficients(-20, N, "lambda", psi.values)
    a = oracles.dedekind_coefficients(-20, N)
    chi = multiplicative_coefficients(-20, N, "psi", psi.values)
    conv = np.zeros(N + 1)
    for m in range(1, N + 1):
        if a[m]:
            conv[m::m] += a[m] * chi[1:N // m + 1]
    assert np.array_equal(lam_c[1:], conv[1:])
