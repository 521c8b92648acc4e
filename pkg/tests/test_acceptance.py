"""Acceptance criteria 1-11.

Each criterion has a ``compute_*`` function returning a JSON-ready summary;
the test asserts on it, and criterion 11 reruns every function with eight
worker threads and compares the serialised bytes.  ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the session.
"""

import json
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest

import oracles
from thetalab import threads
from thetalab.cli import jsonable
from thetalab.dav_chowla import dc_report
from thetalab.exact_arith import liouville_sieve
from thetalab.gauss import gauss_sum_bruteforce, gauss_sum_closed, landsberg_schaar_residual, reciprocity_ratio
from thetalab.local_analysis import (
    classify_rational,
    derivative_estimate,
    expansion_check,
    fit_exponent,
    holder_exponent,
    infinite_derivative_probe,
)
from thetalab.series import SeriesSpec, theta_transform_residual

PREC = 192
_TIMES = {}


def timed(n, fn):
    t = time.perf_counter()
    out = fn()
    _TIMES[n] = time.perf_counter() - t
    return out


# ---------------------------------------------------------------- computations


def compute_1():
    tol = mpmath.ldexp(1, -48)
    worst, pairs, bad = mpmath.mpf(0), 0, []
    for p in range(1, 1000):
        for q in range(-99, 100):
            if math.gcd(p, q) != 1:
                continue
            with mpmath.workprec(PREC):
                d = abs(gauss_sum_closed(p, q).value(PREC) - gauss_sum_bruteforce(p, q, PREC))
            pairs += 1
            worst = max(worst, d)
            if d > tol:
                bad.append((p, q))
    return {"pairs": pairs, "max_error": float(worst), "failures": bad[:10]}


def compute_2():
    rng = random.Random(2024)
    values, skipped = [], 0
    while len(values) < 500:
        p, q = rng.randint(1, 999), rng.choice([-1, 1]) * rng.randint(1, 999)
        if math.gcd(p, q) != 1:
            continue
        r = reciprocity_ratio(p, q, PREC)
        if r.degenerate:
            skipped += 1
            continue
        values.append(r.value)
    with mpmath.workprec(PREC):
        dev = max(abs(a - values[0]) for a in values)
        const = values[0]
    return {"pairs": len(values), "degenerate_skipped": skipped, "constant": const, "max_deviation": float(dev)}


def compute_3():
    worst = max(landsberg_schaar_residual(p, q, PREC) for p in range(1, 51) for q in range(1, 51))
    return {"max_residual": float(worst)}


def compute_4():
    rng = random.Random(4)
    worst = mpmath.mpf(0)
    for _ in range(100):
        z = mpmath.mpc(rng.uniform(-5, 5), rng.uniform(0.05, 10))
        worst = max(worst, theta_transform_residual(z, PREC))
    return {"samples": 100, "max_residual": float(worst), "below_2_minus_90": bool(worst <= mpmath.ldexp(1, -90))}


C5_POINTS = ["1/1", "1/3", "3/5", "5/7"]


def compute_5():
    out = {}
    for xi in C5_POINTS:
        r = derivative_estimate(xi, PREC)
        out[xi] = {"value": r.value, "right": r.right, "left": r.left}
    return out


C6_NONZERO = ["0/1", "1/2", "1/4", "2/3", "1/6"]
C6_ZERO = ["1/1", "1/3", "3/5"]


def compute_6():
    out = {}
    for xi in C6_NONZERO + C6_ZERO:
        r = expansion_check(xi, precision=PREC)
        out[xi] = {
            "kappa_fitted": r.kappa_fitted,
            "kappa_predicted": r.kappa_predicted,
            "kappa_error": r.kappa_error,
            "abs_kappa_fitted": abs(r.kappa_fitted),
            "fitted_exponent": r.fitted_exponent,
        }
    return out


def compute_7():
    checked, mismatches = 0, []
    for s in range(1, 101):
        for r in range(0, 101):
            if math.gcd(r, s) != 1:
                continue
            v = classify_rational(f"{r}/{s}")
            got = (v.right, v.left, v.symmetric)
            checked += 1
            if got != oracles.smith_table(r, s) or (v.two_sided == "derivative_zero_for_g") != bool(r * s % 2):
                mismatches.append(f"{r}/{s}")
    return {"checked": checked, "mismatches": mismatches}


def compute_8():
    out = {}
    for a, b in [(0.6, 3), (0.5, 4)]:
        spec = SeriesSpec("weierstrass_cos", a=a, b=b)
        r = holder_exponent(spec, 0, precision=PREC)
        out[f"weierstrass_{a}_{b}"] = {"estimate": r.estimated_exponent, "expected": spec.xi}
    with mpmath.workprec(PREC + 32):
        x = mpmath.pi / 2
    r = holder_exponent(SeriesSpec("riemann_sin"), x, precision=PREC)
    out["riemann_half"] = {"estimate": r.estimated_exponent, "expected": 0.5}
    hs = [10.0**-k for k in range(1, 9)]
    for c in (0.25, 0.5, 0.75):
        out[f"synthetic_{c}"] = {"estimate": fit_exponent(hs, [h**c for h in hs])[0], "expected": c}
    return out


def compute_9():
    r = infinite_derivative_probe(Fraction(2, 5), 3, "sine", 20, PREC)
    return {
        "quotient_k5": r.rows[4][2],
        "quotient_k20": r.rows[-1][2],
        "strictly_increasing": r.strictly_increasing,
        "exceeds_1e3": r.exceeds_1e3,
    }


def compute_10():
    with mpmath.workprec(160):
        x = 1 / mpmath.sqrt(2)
    schedule = [10**3, 10**4, 10**5, 10**6, 10**7]
    r = dc_report(x, schedule, liouville_sieve(10**7))
    return {
        "schedule": schedule,
        "residuals": r.residuals,
        "rhs_value": r.rhs_value,
        "rhs_error_bound": r.rhs_error_bound,
        "final_below_bound": r.final_below_bound,
    }


COMPUTE = {n: globals()[f"compute_{n}"] for n in range(1, 11)}
_CACHE = {}


def summary(n: int, thread_count: int = 1) -> str:
    key = (n, thread_count)
    if key not in _CACHE:
        with threads(thread_count):
            data = timed(n, COMPUTE[n]) if thread_count == 1 else COMPUTE[n]()
        _CACHE[key] = json.dumps(jsonable(data, 30), sort_keys=True)
    return _CACHE[key]


def result(n):
    return json.loads(summary(n))


# ---------------------------------------------------------------- criteria


@pytest.mark.acceptance(1, "closed-form Gauss sums match brute force, p <= 999, |q| <= 99")
def test_criterion_01():
    r = result(1)
    assert r["failures"] == [] and r["max_error"] <= 2**-48
    assert _TIMES[1] < 60


@pytest.mark.acceptance(2, "reciprocity ratio constant (1/2) over 500 random pairs")
def test_criterion_02():
    r = result(2)
    assert r["pairs"] == 500 and r["max_deviation"] <= 1e-12
    assert abs(float(r["constant"]["re"]) - 0.5) <= 1e-12 and abs(float(r["constant"]["im"])) <= 1e-12


@pytest.mark.acceptance(3, "Landsberg-Schaar residual <= 1e-12 for 1 <= p, q <= 50")
def test_criterion_03():
    assert result(3)["max_residual"] <= 1e-12
    assert _TIMES[3] < 10


@pytest.mark.acceptance(4, "theta transformation residual <= 2^-90 at 100 random points")
def test_criterion_04():
    r = result(4)
    assert r["below_2_minus_90"] and r["max_residual"] <= 2.0**-90


@pytest.mark.acceptance(5, "derivative -1/2 +- 5e-3 at 1/1, 1/3, 3/5, 5/7")
def test_criterion_05():
    r = result(5)
    for xi in C5_POINTS:
        assert r[xi]["value"] is not None and abs(r[xi]["value"] + 0.5) <= 5e-3, xi
    assert _TIMES[5] / len(C5_POINTS) < 30


@pytest.mark.acceptance(6, "fitted local coefficient matches prediction; vanishes at odd/odd points")
def test_criterion_06():
    r = result(6)
    for xi in C6_NONZERO:
        assert r[xi]["kappa_error"] <= 1e-3, xi
    for xi in C6_ZERO:
        assert r[xi]["abs_kappa_fitted"] <= 1e-4, xi


@pytest.mark.acceptance(7, "classification table exhaustive for r, s <= 100")
def test_criterion_07():
    r = result(7)
    assert r["mismatches"] == [] and r["checked"] > 6000


@pytest.mark.acceptance(8, "Hoelder exponents: Weierstrass, Riemann at 1/2, synthetic")
def test_criterion_08():
    r = result(8)
    for key in ("weierstrass_0.6_3", "weierstrass_0.5_4"):
        assert abs(r[key]["estimate"] - r[key]["expected"]) <= 0.05, key
    assert abs(r["riemann_half"]["estimate"] - 0.5) <= 0.03
    for c in (0.25, 0.5, 0.75):
        assert abs(r[f"synthetic_{c}"]["estimate"] - c) <= 1e-6


@pytest.mark.acceptance(9, "HT3 probe at (0.4, 3): increasing and above 1e3 by k = 20")
def test_criterion_09():
    r = result(9)
    assert r["strictly_increasing"]
    assert r["exceeds_1e3"], f"quotient at k=20 is {r['quotient_k20']:.2f}"


@pytest.mark.acceptance(10, "Davenport-Chowla diagnostic at 1/sqrt(2), N = 1e7")
def test_criterion_10():
    r = result(10)
    res = dict(zip(r["schedule"], r["residuals"]))
    assert res[10**7] < 0.1
    assert res[10**7] < res[10**4]
    assert r["rhs_error_bound"] <= 1e-8
    assert _TIMES[10] < 60


@pytest.mark.acceptance(11, "byte-identical summaries across runs and thread counts {1, 8}")
def test_criterion_11():
    diffs = [n for n in COMPUTE if summary(n, 1) != summary(n, 8)]
    assert diffs == []
