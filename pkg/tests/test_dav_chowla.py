import math
import random
from fractions import Fraction

import pytest

import oracles
from thetalab import PreconditionError
from thetalab.dav_chowla import dc_lhs, dc_lhs_partials, dc_report, dc_rhs
from thetalab.exact_arith import liouville_sieve


@pytest.fixture(scope="module")
def table():
    return liouville_sieve(10**5)


def test_lhs_hand_value(table):
    assert dc_lhs(Fraction(1, 4), 4, table) == pytest.approx(-1 / 3, abs=1e-15)
    assert dc_lhs(0.25, 4, table) == pytest.approx(-1 / 3, abs=1e-15)


@pytest.mark.parametrize("x", [0, 3, Fraction(1, 2), Fraction(5, 2), 0.5])
def test_lhs_zero_at_half_integers(table, x):
    assert dc_lhs_partials(x, [10, 1000, 10**5], table) == [0.0, 0.0, 0.0]


def test_lhs_against_direct_sum(table):
    x = 0.1234567
    want = math.fsum(oracles.liouville(n) * oracles.psi(n * x) / n for n in range(1, 3001))
    assert dc_lhs(x, 3000, table) == pytest.approx(want, abs=1e-12)


def test_lhs_partials_are_prefixes(table):
    x = 1 / math.sqrt(2)
    parts = dc_lhs_partials(x, [100, 5000, 70000], table)
    assert parts == [dc_lhs(x, N, table) for N in (100, 5000, 70000)]


def test_lhs_rejects_small_table():
    with pytest.raises(PreconditionError):
        dc_lhs(0.3, 100, liouville_sieve(50))


def test_rhs_trivial_points():
    assert dc_rhs(0)[0] == 0
    assert abs(dc_rhs(Fraction(1, 2))[0]) < 1e-18
    assert abs(dc_rhs(0.5)[0]) < 1e-18


def test_rhs_quarter():
    # sin(pi n^2/2)/n^2 is zero for even n and 1/n^2 for odd n, so the sum is -(1/pi)(pi^2/8)
    v, err = dc_rhs(Fraction(1, 4))
    assert abs(v + math.pi / 8) <= err + 1e-16
    direct = [-math.fsum(math.sin(math.pi * n * n / 2) / n**2 for n in range(1, N + 1)) / math.pi for N in (10**4, 2 * 10**4)]
    assert abs(direct[0] - v) < 1 / (math.pi * 10**4)
    assert abs(direct[1] - v) < 1 / (math.pi * 2 * 10**4)


def test_rhs_certified_below_1e8():
    _, err = dc_rhs(1 / math.sqrt(2))
    assert err < 1e-8


def test_rhs_error_bound_honest():
    rng = random.Random(11)
    for _ in range(50):
        x = rng.uniform(-1, 1)
        v, err = dc_rhs(x, tol=1e-4)
        v2, err2 = dc_rhs(x, tol=0.5e-4)
        assert abs(v - v2) <= err + err2, x


def test_report_quarter(table):
    r = dc_report(Fraction(1, 4), [4], table)
    assert r.residuals[0] == pytest.approx(abs(-1 / 3 + math.pi / 8), abs=1e-15)


def test_report_half_all_zero(table):
    r = dc_report(0.5, [10, 100, 1000], table)
    assert all(v < 1e-18 for v in r.residuals)
    assert r.final_below_bound and r.trend_non_increasing


def test_report_irrational_small(table):
    r = dc_report(1 / math.sqrt(2), [10**3, 10**4, 10**5], table)
    assert r.final_below_bound
    assert len(r.lhs_partials) == 3 and r.rhs_error_bound < 1e-8
