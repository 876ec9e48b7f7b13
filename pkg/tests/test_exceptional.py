import math

import pytest
from hypothesis import given, settings, strategies as st

from siegel_sieve import oracles
from siegel_sieve.characters import PRINCIPAL, QUADRATIC
from siegel_sieve.errors import InvalidDiscriminant, NonResidueClass, NotFoundBelow, TooSmall
from siegel_sieve.exceptional import (C_PSI, ExceptionalSetup, X_value, build_sequence, count_primes_in_class,
                                      effective_z, hypothesis_report, large_prime_profile, least_prime,
                                      limiting_constant, local_g, lower_bound_constant, measured_count,
                                      remainder_empirical, remainder_profile, represent, scan,
                                      sieve_primes, structural_constants, theorem1_report)
from siegel_sieve.ideals import IdealFactorization, IdealOrdering, primes_up_to
from siegel_sieve.qfield import QuadForm, class_group
from siegel_sieve.sieve import divisor_counts


def _setup(chars, k, C=0, x=1e3, **kw):
    return ExceptionalSetup(chars[k].D, chars[k], C, x, **kw)


# --- setup validation ----------------------------------------------------------

def test_setup_validation(chars20):
    with pytest.raises(InvalidDiscriminant):
        ExceptionalSetup(-12, chars20[0], 0, 1e3)
    with pytest.raises(ValueError):
        _setup(chars20, 0, y=11)
    with pytest.raises(ValueError):
        _setup(chars20, 0, x=1)
    with pytest.raises(ValueError):
        _setup(chars20, 0, C=2)
    with pytest.raises(TooSmall):
        _setup(chars20, 0, enumeration_cutoff=100)
    s = _setup(chars20, 0, y=2)
    assert s.cutoff() == 20_000 and s.cutoff(1.0) == 40_000
    assert s.with_(x=2e3).x == 2e3


def test_residue_classes(chars20):
    assert _setup(chars20, 1, C=0).residue_ok
    assert not _setup(chars20, 1, C=1).residue_ok
    assert _setup(chars20, 0, C=1).residue_ok


# --- sequence ------------------------------------------------------------------

def test_sequence_examples(chars20):
    s = _setup(chars20, 1, y=2.0)
    A = build_sequence(s)
    unit = [a for n, a in A.entries.items() if n.is_unit()]
    assert unit == [pytest.approx(math.exp(-2.0 / 1e3))]
    assert A.total > 0
    for n in A.entries:
        assert n.squarefree and n.class_index == 0
        assert all(chars20[1].of_prime(P) == 1 for P in n.primes)
        assert n.norm <= s.cutoff()


def test_principal_sequence_weights_are_exponential(chars20):
    s = _setup(chars20, 0, C=1)
    A = build_sequence(s)
    for n, a in list(A.entries.items())[:200]:
        assert a == pytest.approx(math.exp(-n.norm / 1e3))
        assert n.class_index == 1


def test_local_densities(chars20):
    ps = primes_up_to(-20, 100)
    split = next(P for P in ps if P.kind == "split" and P.class_index == 0)
    other = next(P for P in ps if P.kind == "split" and P.class_index == 1)
    assert split.norm == 29
    assert local_g(split, chars20[1]) == pytest.approx(2 / 31)
    assert local_g(split, chars20[0]) == pytest.approx(1 / 30)
    assert local_g(other, chars20[1]) == 0
    five = next(P for P in ps if P.p == 5)
    assert local_g(five, chars20[1]) == pytest.approx(2 / 7)
    three = next(P for P in ps if P.p == 3)
    assert local_g(three, chars20[0]) == pytest.approx(1 / 4)


@given(st.floats(2, 1e6), st.floats(1, 10))
@settings(max_examples=30)
def test_X_is_linear_in_size(x, y):
    G = class_group(-20)
    from siegel_sieve.characters import real_characters
    psi = real_characters(G)[1]
    s = ExceptionalSetup(-20, psi, 0, x, y=y)
    base = ExceptionalSetup(-20, psi, 0, 2.0)
    assert X_value(s) == pytest.approx(X_value(base) * x / 2)
    assert X_value(s, y_weighted=True) == pytest.approx(X_value(s) / y)


# --- remainders ----------------------------------------------------------------

@pytest.mark.parametrize("k,C", [(0, 0), (0, 1), (1, 0)])
def test_measured_count_matches_divisor_counts(chars20, G20, k, C):
    s = _setup(chars20, k, C=C, x=500, y=3.0)
    A = build_sequence(s)
    ps = sieve_primes(s, 60)
    counts = divisor_counts(A, frozenset(ps))
    for d, v in list(counts.items())[:40]:
        n = IdealFactorization.from_factors([(P, 1) for P in d], G20)
        assert measured_count(s, n) == pytest.approx(v, rel=1e-9, abs=1e-12)


def test_remainder_cases(chars20, G20):
    s = _setup(chars20, 1, x=1e4)
    unit = IdealFactorization.from_factors([], G20)
    assert remainder_empirical(s, unit) == pytest.approx(build_sequence(s).total - X_value(s, True))
    bad = next(P for P in primes_up_to(-20, 100) if chars20[1].of_prime(P) == -1)
    d = IdealFactorization.from_factors([(bad, 1)], G20)
    assert measured_count(s, d) == 0 and remainder_empirical(s, d) == 0
    with pytest.raises(ValueError):
        measured_count(s, IdealFactorization.from_factors([(bad, 2)], G20))


def test_remainder_profile(chars20):
    r = remainder_profile(_setup(chars20, 0, x=1e4), 50)
    assert r.count > 1 and r.max_scaled >= 0 and r.level == 50


# --- structural constants and windows -----------------------------------------

def test_structural_constants(chars20):
    q = structural_constants(_setup(chars20, 1))
    assert q.W == 6400 and q.Q == pytest.approx(math.sqrt(80)) and q.d_psi == 400
    p = structural_constants(_setup(chars20, 0))
    assert p.W == 80 and p.Q == pytest.approx(80 ** 0.25) and p.d_psi == 20
    assert q.h_bound == pytest.approx(math.e ** 2 * math.sqrt(20))
    assert q.x_lower_with_h == pytest.approx(2 ** 32 * 20 ** 8.5 * 4)


def test_hypothesis_report_at_desk_scale(chars20):
    r = hypothesis_report(_setup(chars20, 0, x=1e4))
    assert set(r.checks) == {"x_upper", "x_lower_1", "x_lower_2", "z_window", "small_prime_sum",
                             "eta_min", "eta_delta", "dimension"}
    assert all(math.isfinite(c.lhs) and math.isfinite(c.rhs) and math.isfinite(c.margin)
               for c in r.checks.values())
    assert r.checks["x_upper"].holds
    assert r.checks["eta_min"].holds
    assert not r.checks["x_lower_1"].holds  # the lower window is out of reach at x = 1e4
    assert not r.all_hold
    huge = hypothesis_report(_setup(chars20, 0, x=1e300))
    assert not huge.checks["x_upper"].holds and huge.checks["x_upper"].margin < 0


def test_effective_z_is_clamped(chars20):
    assert effective_z(_setup(chars20, 0, x=1e4)) == pytest.approx(100)
    assert effective_z(_setup(chars20, 0, x=1e4, z=1.0)) == 2.0
    assert effective_z(_setup(chars20, 0, x=1e4, z=30)) == 30


# --- lower-bound constants -----------------------------------------------------

def test_limiting_constants():
    assert limiting_constant(QUADRATIC) == pytest.approx(0.0046668, abs=5e-7)
    assert limiting_constant(PRINCIPAL) == pytest.approx(0.055785, abs=5e-6)
    assert limiting_constant(QUADRATIC) >= C_PSI[QUADRATIC]
    assert limiting_constant(PRINCIPAL) >= C_PSI[PRINCIPAL]


@given(st.floats(5.01, 40))
def test_lower_bound_constant_increases_with_tau(tau):
    C = math.e ** 2
    assert lower_bound_constant(C, tau + 1, 7.37) >= lower_bound_constant(C, tau, 7.37) - 1e-15


# --- lower-bound report ------------------------------------------------------

def test_lower_bound_report_principal(chars20):
    s = _setup(chars20, 0, x=1e4, z=30)
    r = theorem1_report(s, with_oracle=True)
    assert r.lhs_count == r.lhs_count_oracle
    assert r.c_psi_used == 0.0557
    assert r.buchstab_identity_ok and r.cutoff_split_ok and r.S2_ok
    d = r.to_dict()
    assert set(d["hypothesis"]) >= {"x_upper", "dimension"}
    assert all(set(v) == {"holds", "lhs", "rhs", "margin", "scale"} for v in d["hypothesis"].values())


def test_lower_bound_report_rejects_nonresidue_class(chars20):
    with pytest.raises(NonResidueClass):
        theorem1_report(_setup(chars20, 1, C=1))


def test_lower_bound_report_tie_break_invariance(chars84):
    a = theorem1_report(_setup(chars84, 1, x=3e3, z=20))
    b = theorem1_report(_setup(chars84, 1, x=3e3, z=20, ordering=IdealOrdering("by_root_then_p")))
    assert a.S_y_weighted == pytest.approx(b.S_y_weighted, rel=1e-12)
    assert a.lhs_count == b.lhs_count
    assert a.large_prime_sum == pytest.approx(b.large_prime_sum, rel=1e-9)


@pytest.mark.parametrize("D", [-20, -84, -23])
def test_prime_counts_match_oracle(D):
    G = class_group(D)
    for C in range(G.h):
        for ram in (True, False):
            assert count_primes_in_class(D, C, 3000, ram) == oracles.count_prime_ideals_by_form(D, C, 3000, ram)


def test_large_prime_profile(chars20):
    s = _setup(chars20, 0, x=1e4, z=20)
    p = large_prime_profile(s)
    assert p.identity_ok and len(p.rows) > 0
    assert all(r.sifted >= 0 and r.comparison > 0 for r in p.rows)
    empty = large_prime_profile(s.with_(z=1e3))
    assert empty.rows == () and empty.identity_ok


# --- least primes and scan -----------------------------------------------------

@pytest.mark.parametrize("D,C,p_all,w_all,p_split", [
    (-20, 0, 5, (0, 1), 29), (-20, 1, 2, (1, 0), 3), (-3, 0, 3, None, 7), (-84, 0, 37, (4, 1), 37),
])
def test_least_prime_examples(D, C, p_all, w_all, p_split):
    lp = least_prime(D, None, None, C)
    assert lp.p_all == p_all and lp.p_split == p_split
    if w_all is not None:
        assert lp.witness_all == w_all
    f = QuadForm(*lp.form)
    assert f(*lp.witness_all) == lp.p_all and f(*lp.witness_split) == lp.p_split
    assert lp.witness_split == (3, 2) or D != -20 or C != 0


def test_least_prime_bound_exhausted():
    with pytest.raises(NotFoundBelow):
        least_prime(-20, None, None, 0, bound=10, max_bound=20)


@given(st.sampled_from([-20, -84, -23, -56, -163]), st.integers(1, 500))
def test_represent_agrees_with_lattice(D, n):
    for f in class_group(D).reduced_forms:
        w = represent(f, n)
        hits = oracles.form_representation_counts(f, n)[n]
        assert (w is not None) == (hits > 0)
        if w is not None:
            assert f(*w) == n


def test_scan_small_range():
    t = scan(-30, -3)
    assert not t.failures and all(r.verified for r in t.rows)
    assert t.discriminants == (-3, -4, -7, -8, -11, -15, -19, -20, -23, -24)
    assert {(r.D, r.class_index) for r in t.rows if r.char_kind == PRINCIPAL} == \
        {(D, C) for D in t.discriminants for C in range(class_group(D).h)}
    assert max(t.max_ratio.values()) < 9.5


def test_scan_empty_range():
    t = scan(-2, -1)
    assert t.rows == () and t.discriminants == ()
    assert all(math.isnan(v) for v in t.max_ratio.values())
