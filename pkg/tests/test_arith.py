import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from diophsieve.arith import (
    big_omega_range,
    continued_fraction,
    dimension_check,
    factor_counts,
    factorize,
    floor_pow,
    g2,
    gamma_of,
    is_almost_prime,
    is_probable_prime,
    li_offset,
    mertens_checks,
    pi_c,
    pi_c_ratio,
    ps_indicator,
    ps_indicator_array,
    ps_set_bruteforce,
    sieve_primes,
)
from diophsieve.arith.primes import SEGMENT, _simple_sieve
from diophsieve.errors import CapacityError, DomainError, PrecisionError

MERTENS_M = 0.2614972128476428


# -- primes ---------------------------------------------------------------


def test_small_sieve():
    assert sieve_primes(10).tolist() == [2, 3, 5, 7]
    assert sieve_primes(2).tolist() == [2]


def test_prime_count_one_million():
    ps = sieve_primes(10**6)
    assert ps.size == 78498 == int(sympy.primepi(10**6))
    sample = ps[::997]
    assert all(sympy.isprime(int(p)) for p in sample)


def test_segmented_matches_simple():
    n = SEGMENT * 2 + 12_345
    assert np.array_equal(sieve_primes(n), _simple_sieve(n))


def test_sieve_limits():
    with pytest.raises(DomainError):
        sieve_primes(1)
    with pytest.raises(CapacityError):
        sieve_primes(10**9 + 1)


def test_miller_rabin_against_sympy():
    rng = np.random.default_rng(11)
    for n in rng.integers(2, 10**15, 500):
        assert is_probable_prime(int(n)) == sympy.isprime(int(n))
    # strong pseudoprimes to small base sets
    for n in (2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383):
        assert not is_probable_prime(n)


@pytest.mark.parametrize("n", [1, 2, 12, 97 * 97, 2**49, 999_983 * 999_979,
                               10**15, 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23])
def test_factorize_against_sympy(n):
    f = factorize(n)
    assert dict(f.pairs) == sympy.factorint(n)
    assert f.product() == n


def test_factorize_random_roundtrip():
    rng = np.random.default_rng(5)
    for n in rng.integers(1, 10**15, 100_000):
        n = int(n)
        f = factorize(n)
        assert f.product() == n
    for n in rng.integers(10**12, 10**15, 200):
        assert dict(factorize(int(n)).pairs) == sympy.factorint(int(n))


def test_factorize_limits():
    with pytest.raises(DomainError):
        factorize(0)
    with pytest.raises(CapacityError):
        factorize(10**15 + 1)


def test_almost_prime_conventions():
    assert is_almost_prime(12, 3)
    assert not is_almost_prime(12, 2)
    assert is_almost_prime(12, 2, "distinct")
    assert is_almost_prime(7, 1)
    with pytest.raises(DomainError):
        is_almost_prime(1, 3)
    with pytest.raises(DomainError):
        is_almost_prime(12, 3, "weighted")


def test_factor_counts_and_range_agree():
    vals = np.arange(1, 50_001)
    big = factor_counts(vals)
    assert np.array_equal(big, big_omega_range(1, 50_001))
    for n in (1, 2, 360, 49_999, 50_000):
        assert big[n - 1] == sum(sympy.factorint(n).values())
        assert factor_counts([n], "distinct")[0] == len(sympy.factorint(n))


# -- continued fractions ------------------------------------------------------


def test_sqrt2_convergents():
    cf = continued_fraction(math.sqrt(2), 10**6)
    assert cf.convergents[:5] == ((1, 1), (3, 2), (7, 5), (17, 12), (41, 29))
    assert cf.partial_quotients[:4] == (1, 2, 2, 2)
    assert cf.best(100) == (99, 70)


def test_golden_ratio_denominators():
    phi = (1 + math.sqrt(5)) / 2
    cf = continued_fraction(phi, 10**6)
    qs = [q for _, q in cf.convergents]
    assert qs[:6] == [1, 1, 2, 3, 5, 8]
    assert all(a < b for a, b in zip(qs[1:], qs[2:]))


def test_rational_terminates():
    cf = continued_fraction(Fraction(355, 113), 10**9)
    assert cf.exact and cf.convergents[-1] == (355, 113)
    assert cf.partial_quotients == (3, 7, 16)


def test_float_precision_runs_out():
    with pytest.raises(PrecisionError):
        continued_fraction(math.sqrt(2), 10**12)


def test_mpf_extends_reach():
    with mpmath.workdps(60):
        cf = continued_fraction(mpmath.sqrt(2), 10**25)
    assert cf.convergents[-1][1] > 10**20
    a, q = cf.convergents[-1]
    assert a * a - 2 * q * q in (1, -1)


@given(st.floats(0.01, 100.0).filter(lambda x: x != int(x)))
def test_convergent_invariants(x):
    try:
        cf = continued_fraction(x, 10**5)
    except PrecisionError:
        return
    X = Fraction(x)
    conv = cf.convergents
    for k, (a, q) in enumerate(conv):
        assert abs(X - Fraction(a, q)) <= Fraction(1, q * q)
        if k:
            a0, q0 = conv[k - 1]
            assert a * q0 - a0 * q in (1, -1)
    qs = [q for _, q in conv]
    assert all(u < v for u, v in zip(qs[1:], qs[2:]))


def test_contfrac_domain():
    with pytest.raises(DomainError):
        continued_fraction(-1.0, 10)
    with pytest.raises(DomainError):
        continued_fraction(float("nan"), 10)
    with pytest.raises(DomainError):
        continued_fraction(1.5, 0)


# -- Piatetski-Shapiro ---------------------------------------------------------


def _exact_floor_pow(n, c):
    # integer-root oracle for rational exponents
    return sympy.integer_nthroot(n**c.numerator, c.denominator)[0]


def test_floor_pow_exact_cases():
    assert floor_pow(4, 1.5) == 8
    assert floor_pow(2, Fraction(1, 2)) == 1
    assert floor_pow(10**6, Fraction(1, 3)) == 100
    assert floor_pow(10**6 - 1, Fraction(1, 3)) == 99


@pytest.mark.parametrize("c", [Fraction(101, 100), Fraction(11, 10)])
def test_ps_equivalence_integer_oracle(c):
    p_max = 20_000 if c.numerator > 100 else 100_000
    n_max = int(p_max ** (1 / float(c))) + 2
    members = {_exact_floor_pow(n, c) for n in range(1, n_max + 1)}
    ind = ps_indicator_array(np.arange(1, p_max + 1), 1 / c)
    expected = np.array([p in members for p in range(1, p_max + 1)])
    assert np.array_equal(ind, expected)
    brute = ps_set_bruteforce(n_max, c)
    assert set(int(v) for v in brute if v <= p_max) == {m for m in members if m <= p_max}


def test_ps_equivalence_near_upper_exponent():
    c = 755 / 662 - 1e-6
    p_max = 100_000
    n_max = int(p_max ** (1 / c)) + 2
    with mpmath.workdps(50):
        ce = mpmath.mpf(Fraction(repr(c)).numerator) / Fraction(repr(c)).denominator
        members = {int(mpmath.floor(mpmath.power(n, ce))) for n in range(1, n_max + 1)}
    ind = ps_indicator_array(np.arange(1, p_max + 1), gamma_of(c))
    expected = np.array([p in members for p in range(1, p_max + 1)])
    assert np.array_equal(ind, expected)


def test_ps_indicator_scalar_and_gamma_reading():
    g = gamma_of(1.1)
    assert g == Fraction(10, 11)
    assert ps_indicator(1, g) and ps_indicator(2, g) and ps_indicator(4, g) and not ps_indicator(6, g)
    with pytest.raises(DomainError):
        ps_indicator(0, g)
    with pytest.raises(DomainError):
        ps_indicator(5, 1.2)


def test_pi_c_hand_check():
    # floor(n^1.1) for n <= 10: 1 2 3 4 5 7 8 9 11 12 -> primes 2 3 5 7 11
    assert pi_c(10, 1.1) == 5


def test_pi_c_domain():
    with pytest.raises(DomainError):
        pi_c(100, 1.2)
    with pytest.raises(CapacityError):
        pi_c(10**7 + 1, 1.1)


def test_pi_c_ratio_trend():
    assert abs(pi_c_ratio(10**6, 1.1) - 1) < abs(pi_c_ratio(10**4, 1.1) - 1)


def test_li_offset():
    assert li_offset(10**6) == pytest.approx(float(mpmath.li(10**6) - mpmath.li(2)), rel=1e-10)
    assert li_offset(2) == 0.0


# -- Mertens and dimension --------------------------------------------------------


def test_mertens_examples():
    r100, _ = mertens_checks(100)
    r6, s6 = mertens_checks(10**6)
    assert abs(r6 - 1) < abs(r100 - 1)
    assert 0.99 <= r6 <= 1.01
    assert s6 == pytest.approx(MERTENS_M, abs=1e-3)
    with pytest.raises(DomainError):
        mertens_checks(99)


def test_dimension_residual_settles():
    res = dimension_check([10**3, 10**4, 10**5, 10**6])
    assert abs(res[3] - res[1]) < 0.05
    assert abs(res[3] - res[2]) < abs(res[1] - res[0])
    with pytest.raises(DomainError):
        dimension_check([500])


def test_g2_values():
    assert g2(1) == 1.0
    assert g2(6) == pytest.approx(0.75 * (2 / 3 - 1 / 9))
    assert g2(12) == g2(6)


def test_convergent_laws_on_quadratic_irrationals():
    rng = np.random.default_rng(50)
    ns = [int(n) for n in rng.choice([k for k in range(2, 2000) if math.isqrt(k) ** 2 != k],
                                     50, replace=False)]
    for n in ns:
        with mpmath.workdps(60):
            x = mpmath.sqrt(n)
            cf = continued_fraction(x, 10**20)
            conv = cf.convergents
            for k, (a, q) in enumerate(conv):
                assert math.gcd(a, q) == 1
                err = abs(x - mpmath.mpf(a) / q)
                assert err < mpmath.mpf(1) / (q * q)
                if k + 1 < len(conv):
                    assert err < mpmath.mpf(1) / (q * conv[k + 1][1])
        qs = [q for _, q in conv]
        # q_0 = q_1 = 1 whenever the first partial quotient after the integer part is 1
        assert all(u < v for u, v in zip(qs[1:], qs[2:]))
        assert qs[0] <= qs[1]
