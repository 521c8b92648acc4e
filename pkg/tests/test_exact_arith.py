from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from thetalab import PreconditionError
from thetalab.exact_arith import (
    EighthRootPhase,
    ReducedRational,
    epsilon_factor,
    gcd,
    kronecker,
    liouville_sieve,
    reduce,
)


def test_reduce_examples():
    assert reduce(6, 4) == ReducedRational(3, 2)
    assert reduce(-3, 6) == ReducedRational(-1, 2)
    assert reduce(3, -6) == ReducedRational(-1, 2)
    assert reduce(0, 5) == ReducedRational(0, 1)
    with pytest.raises(PreconditionError):
        reduce(1, 0)


def test_parse_and_str():
    r = ReducedRational.parse("10/4")
    assert (r.num, r.den) == (5, 2)
    assert str(r) == "5/2"
    assert ReducedRational.parse("7").fraction == Fraction(7)
    assert ReducedRational.parse(Fraction(-2, 6)) == ReducedRational(-1, 3)


@pytest.mark.parametrize("bad", ["1/0", "x", "1.5/2", ""])
def test_parse_rejects(bad):
    with pytest.raises((PreconditionError, ValueError)):
        ReducedRational.parse(bad)


def test_gcd():
    assert gcd(12, 18) == 6
    assert gcd(-4, 6) == 2
    assert gcd(0, 0) == 0


@pytest.mark.parametrize(
    "a,n,expected",
    [(2, 7, 1), (3, 7, -1), (5, -7, -1), (-1, 8, 1), (3, 8, -1), (0, 1, 1), (2, 4, 0), (-3, -8, 1)],
)
def test_kronecker_table(a, n, expected):
    assert kronecker(a, n) == oracles.kronecker(a, n)
    assert kronecker(a, n) == expected


def test_kronecker_exhaustive_small():
    for a in range(-60, 61):
        for n in range(-60, 61):
            assert kronecker(a, n) == oracles.kronecker(a, n), (a, n)


@settings(max_examples=300, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(1, 10**5))
def test_kronecker_multiplicative_in_top(a, b, n):
    assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)


@settings(max_examples=300, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(0, 10**4).map(lambda k: 2 * k + 1))
def test_kronecker_periodic_for_odd_modulus(a, n):
    assert kronecker(a + n, n) == kronecker(a, n)


_PRIMES = [p for p in range(3, 400) if all(p % d for d in range(2, int(p**0.5) + 1))]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(_PRIMES), st.sampled_from(_PRIMES))
def test_quadratic_reciprocity(p, q):
    if p == q:
        return
    assert kronecker(p, q) * kronecker(q, p) == (-1) ** (((p - 1) // 2) * ((q - 1) // 2))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(_PRIMES), st.integers(-10**4, 10**4))
def test_kronecker_matches_euler_criterion(p, a):
    assert kronecker(a, p) == oracles.legendre(a, p)


def test_epsilon_factor():
    assert epsilon_factor(1) == EighthRootPhase(0)
    assert epsilon_factor(5) == EighthRootPhase(0)
    assert epsilon_factor(3) == EighthRootPhase(2)
    with pytest.raises(PreconditionError):
        epsilon_factor(4)


def test_eighth_root_phase_arithmetic():
    w = EighthRootPhase(3)
    assert w * EighthRootPhase(6) == EighthRootPhase(1)
    assert w.conjugate() == EighthRootPhase(5)
    assert EighthRootPhase(-1) == EighthRootPhase(7)
    assert abs(complex(EighthRootPhase(2).value(64)) - 1j) < 1e-18


def test_liouville_small_values():
    t = liouville_sieve(12)
    assert list(t.values[1:13]) == [1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1]
    assert t[1] == 1
    assert t.limit == 12


def test_liouville_table_is_read_only():
    t = liouville_sieve(100)
    with pytest.raises(ValueError):
        t.values[3] = 1


def test_liouville_rejects_bad_limit():
    with pytest.raises(PreconditionError):
        liouville_sieve(0)


def test_liouville_trial_division_1e5():
    N = 10**5
    t = liouville_sieve(N)
    expected = np.array([0] + [oracles.liouville(n) for n in range(1, N + 1)], dtype=np.int8)
    assert np.array_equal(t.values, expected)


def test_liouville_completely_multiplicative_1e4():
    N = 10**4
    t = liouville_sieve(N)
    for m in range(1, 101):
        n = np.arange(1, N // m + 1)
        assert np.array_equal(t.values[m * n], t[m] * t.values[n])


def test_liouville_segment_boundaries():
    # values near the 2**20 block edge agree with trial division
    N = 2**20 + 50
    t = liouville_sieve(N)
    for n in range(2**20 - 50, N + 1):
        assert t[n] == oracles.liouville(n), n
