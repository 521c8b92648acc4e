"""Behaviour of F and Riemann's function near rational points, Hoelder
exponents of trigonometric series and the infinite-derivative probe.

Conventions: a rational point xi = num/den refers to x = xi in F and to
x = pi xi in Riemann's f, since f(pi x) = pi Re F(x) and Smith's
g(x) = x + 2 Re F(x).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import mpmath
import numpy as np

from ._config import GUARD_BITS, PreconditionError, check_precision, default_precision
from .exact_arith import EighthRootPhase, ReducedRational
from .gauss import itatsu_R
from .series import (
    Evaluation,
    F_near_axis,
    F_rational,
    SeriesSpec,
    riemann_series,
    to_mpf,
    weierstrass_eval,
)

__all__ = [
    "PredictedKappa",
    "Verdict",
    "ExpansionReport",
    "DerivativeReport",
    "HolderReport",
    "ProbeReport",
    "classify_rational",
    "predicted_kappa",
    "expansion_check",
    "derivative_estimate",
    "holder_exponent",
    "fit_exponent",
    "infinite_derivative_probe",
]


# ---------------------------------------------------------------- exact side


@dataclass(frozen=True)
class PredictedKappa:
    """Zero, or e^{i k pi/4}/sqrt(p)."""

    is_zero: bool
    phase: EighthRootPhase
    p: int

    def value(self, precision: Optional[int] = None):
        precision = precision or default_precision()
        if self.is_zero:
            return mpmath.mpc(0)
        with mpmath.workprec(precision):
            return self.phase.value(precision + GUARD_BITS) / mpmath.sqrt(self.p)

    def __complex__(self):
        return complex(self.value(64))

    def __str__(self):
        return "0" if self.is_zero else f"e^(i*{self.phase.k}π/4)/sqrt({self.p})"


def predicted_kappa(xi) -> PredictedKappa:
    """kappa = e^{i pi/4} R(den, num)/sqrt(den), so F(xi + z) - F(xi) ~ kappa sqrt(z) - z/2."""
    xi = ReducedRational.parse(xi)
    R = itatsu_R(xi.den, xi.num)
    if R.is_zero:
        return PredictedKappa(True, EighthRootPhase(0), xi.den)
    return PredictedKappa(False, R.phase * EighthRootPhase(1), xi.den)


@dataclass(frozen=True)
class Verdict:
    point: ReducedRational
    two_sided: str
    right: str
    left: str
    symmetric: str
    kappa: PredictedKappa


def classify_rational(xi) -> Verdict:
    """Derivatives of Smith's g at xi, from the parities of num and den alone."""
    xi = ReducedRational.parse(xi)
    r, s = xi.num, xi.den
    kappa = predicted_kappa(xi)
    if r % 2 and s % 2:
        return Verdict(xi, "derivative_zero_for_g", "zero", "zero", "zero", kappa)

    def status(zero: bool) -> str:
        return "zero" if zero else "infinite"

    return Verdict(
        xi,
        "none",
        right=status(s % 2 == 0 and r % 4 == 1),
        left=status(s % 2 == 0 and r % 4 == 3),
        symmetric=status(s % 4 == 3 and r % 2 == 0),
        kappa=kappa,
    )


# ---------------------------------------------------------------- expansion


@dataclass
class ExpansionReport:
    point: ReducedRational
    epsilon: float
    h_grid: list
    kappa_fitted: complex
    kappa_predicted: complex
    kappa_error: float
    max_model_residual: float
    fitted_exponent: float
    error_bound: float
    exact_match: bool
    terms: int
    rows: list = field(default_factory=list)


def _wls_kappa(s, b, w):
    return complex(np.sum(w * np.conj(s) * b) / np.sum(w * np.abs(s) ** 2))


def expansion_check(
    xi,
    h_min: float = 1e-5,
    h_max: float = 1e-2,
    steps: int = 11,
    precision: Optional[int] = None,
    epsilon: Optional[float] = None,
) -> ExpansionReport:
    """Fit kappa in F(xi + z) - F(xi + i eps) against the square-root model.

    z = h + i eps runs over a geometric grid of both signs of h.  The base
    point sits at height eps too, so the model is taken relative to it:
    kappa (sqrt(z) - sqrt(i eps)) - (z - i eps)/2, and z - i eps = h.
    kappa enters linearly and is found by weighted least squares with
    weights |z|^-3, which equalises the O(|z|^{3/2}) remainder across scales.
    """
    xi = ReducedRational.parse(xi)
    precision = check_precision(precision or default_precision())
    if not (0 < h_min < h_max <= 0.1):
        raise PreconditionError("expansion_check needs 0 < h_min < h_max <= 0.1")
    if steps < 8:
        raise PreconditionError("expansion_check needs at least 8 grid steps")
    eps = float(epsilon) if epsilon is not None else h_min * h_min / 100
    mags = np.geomspace(h_min, h_max, steps)
    hs = np.concatenate([mags, -mags])
    base = xi.fraction
    evals = F_near_axis([base] + [(base, float(h)) for h in hs], eps)
    f0 = evals[0].value
    dF = np.array([e.value - f0 for e in evals[1:]])
    err = 2 * evals[0].error

    z = hs + 1j * eps
    s = np.sqrt(z) - cmath.sqrt(1j * eps)
    absz = np.abs(z)
    kappa_fit = _wls_kappa(s, dF + hs / 2, absz**-3.0)
    kp = complex(predicted_kappa(xi))

    fit_model = kappa_fit * s - hs / 2
    pred_model = kp * s - hs / 2
    normalized = np.abs(dF - fit_model) / absz**1.5
    pred_resid = np.abs(dF - pred_model)
    exact = bool(np.all(pred_resid <= 10 * err))
    if exact:
        exponent = float("nan")
    else:
        interior = (np.abs(hs) > h_min * 1.0001) & (np.abs(hs) < h_max * 0.9999)
        exponent = float(np.polyfit(np.log(absz[interior]), np.log(pred_resid[interior]), 1)[0])
    rows = [
        (float(h), complex(d), complex(m), float(r))
        for h, d, m, r in zip(hs, dF, fit_model, normalized)
    ]
    return ExpansionReport(
        point=xi,
        epsilon=eps,
        h_grid=[float(h) for h in hs],
        kappa_fitted=kappa_fit,
        kappa_predicted=kp,
        kappa_error=abs(kappa_fit - kp),
        max_model_residual=float(np.max(normalized)),
        fitted_exponent=exponent,
        error_bound=err,
        exact_match=exact,
        terms=evals[0].terms,
        rows=rows,
    )


# ---------------------------------------------------------------- derivative

DERIVATIVE_SCALE = 0.004
_SMOOTH_RATIO = 8


@dataclass
class DerivativeReport:
    point: ReducedRational
    scales: list
    right_quotients: list
    left_quotients: list
    right: float
    left: float
    right_growth: float
    left_growth: float
    right_converged: bool
    left_converged: bool
    value: Optional[float]


def _richardson(values, exponent):
    f = 2.0**exponent
    return [(f * values[i + 1] - values[i]) / (f - 1) for i in range(len(values) - 1)]


def _smoothed_re_F(xi: ReducedRational, H, sign: int, wp: int):
    """E[Re F(xi + sign rho)] for rho ~ Normal(H, (H/8)^2), in closed form.

    Averaging e^{i pi n^2 rho} over the Gaussian gives
    e^{i pi n^2 H - (pi n^2 sigma)^2 / 2}; past n = sqrt(12/(pi sigma)) the
    damping factor is below e^-72 and the remaining terms are dropped.
    """
    q, p = xi.num, xi.den
    with mpmath.workprec(wp):
        H = mpmath.mpf(H)
        sigma = H / _SMOOTH_RATIO
        N = math.isqrt(int(12 / (math.pi * float(sigma)))) + 2
        acc = mpmath.mpc(0)
        for n in range(1, N + 1):
            n2 = n * n
            c = mpmath.expjpi(mpmath.mpf((n2 * q) % (2 * p)) / p + sign * n2 * H)
            acc += c * mpmath.exp(-((mpmath.pi * n2 * sigma) ** 2) / 2) / n2
        return (acc / (mpmath.j * mpmath.pi)).real


def derivative_estimate(xi, precision: Optional[int] = None, scale: Optional[float] = None) -> DerivativeReport:
    """One-sided difference quotients of x -> Re F(x) at xi, i.e. f'(pi xi).

    Each quotient averages the increment over a narrow Gaussian of offsets
    with mean H (so the oscillating O(H^{3/2}) remainder is smoothed out),
    at H0, H0/2, H0/4 with H0 = 0.004/den^2, followed by Richardson steps
    for the H^{1/2} and H terms.  A side whose quotients grow as H shrinks
    is reported as divergent with its fitted growth exponent.
    """
    xi = ReducedRational.parse(xi)
    precision = check_precision(precision or default_precision())
    wp = precision + GUARD_BITS
    H0 = (scale or DERIVATIVE_SCALE) / xi.den**2
    scales = [H0, H0 / 2, H0 / 4]
    base = F_rational(xi.fraction, wp).value.real
    quotients = {}
    for sign in (1, -1):
        with mpmath.workprec(wp):
            quotients[sign] = [
                float(sign * (_smoothed_re_F(xi, H, sign, wp) - base) / H) for H in scales
            ]
    logH = np.log(scales)

    def side(qs):
        growth = float(np.polyfit(logH, np.log(np.abs(qs)), 1)[0])
        extrapolated = _richardson(_richardson(qs, 0.5), 1.0)[0]
        return extrapolated, growth, growth > -0.25

    right, rg, rc = side(quotients[1])
    left, lg, lc = side(quotients[-1])
    value = (right + left) / 2 if rc and lc and abs(right - left) < 1e-2 else None
    return DerivativeReport(
        point=xi,
        scales=scales,
        right_quotients=quotients[1],
        left_quotients=quotients[-1],
        right=right,
        left=left,
        right_growth=rg,
        left_growth=lg,
        right_converged=rc,
        left_converged=lc,
        value=value,
    )


# ---------------------------------------------------------------- Hoelder


@dataclass
class HolderReport:
    spec: Optional[SeriesSpec]
    point: float
    estimated_exponent: float
    regression_residual: float
    h_range: tuple
    h_grid: list
    increments: list
    used: int
    inconclusive: bool
    expected: Optional[float] = None


def fit_exponent(hs, increments):
    """Slope and RMS residual of log(increment) against log(h)."""
    x = np.log(np.asarray(hs, dtype=float))
    y = np.log(np.asarray(increments, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


def holder_exponent(
    target: Union[SeriesSpec, Callable],
    x,
    h_min: float = 1e-8,
    h_max: float = 1e-2,
    steps: int = 21,
    precision: Optional[int] = None,
) -> HolderReport:
    """Log-log slope of max(|g(x+h)-g(x)|, |g(x-h)-g(x)|) over a geometric grid.

    ``target`` is a SeriesSpec or any callable returning a number or an
    Evaluation.  Increments within ten times the evaluation error are
    discarded; the two grid endpoints are always left out of the fit.
    """
    precision = check_precision(precision or default_precision())
    if not 0 < h_min < h_max:
        raise PreconditionError("holder_exponent needs 0 < h_min < h_max")
    if steps < 4:
        raise PreconditionError("holder_exponent needs at least 4 grid steps")
    if isinstance(target, SeriesSpec):
        evaluator = riemann_series if target.is_riemann else weierstrass_eval

        def g(t):
            return evaluator(target, t, precision)
    else:
        g = target

    def ev(t):
        out = g(t)
        return out if isinstance(out, Evaluation) else Evaluation(out, 0.0, 0)

    wp = precision + GUARD_BITS
    with mpmath.workprec(wp):
        x0 = to_mpf(x)
        hs = [mpmath.mpf(h) for h in np.geomspace(h_min, h_max, steps)]
        centre = ev(x0)
        incs, noise = [], []
        for h in hs:
            up, down = ev(x0 + h), ev(x0 - h)
            incs.append(max(abs(up.value - centre.value), abs(down.value - centre.value)))
            noise.append(max(up.error, down.error) + centre.error)
    keep = [i for i in range(1, steps - 1) if incs[i] > 10 * noise[i]]
    if len(keep) < 3:
        slope, resid, inconclusive = float("nan"), float("nan"), True
    else:
        slope, resid = fit_exponent([float(hs[i]) for i in keep], [float(incs[i]) for i in keep])
        inconclusive = False
    spec = target if isinstance(target, SeriesSpec) else None
    return HolderReport(
        spec=spec,
        point=float(x0),
        estimated_exponent=slope,
        regression_residual=resid,
        h_range=(float(h_min), float(h_max)),
        h_grid=[float(h) for h in hs],
        increments=[float(v) for v in incs],
        used=len(keep),
        inconclusive=inconclusive,
        expected=spec.xi if spec is not None else None,
    )


# ---------------------------------------------------------------- HT3 probe


@dataclass
class ProbeReport:
    a: str
    b: str
    kind: str
    hypothesis_met: bool
    rows: list
    strictly_increasing: bool
    exceeds_1e3: bool
    claim_holds: bool


def infinite_derivative_probe(a, b, kind: str = "sine", k_max: int = 20, precision: Optional[int] = None) -> ProbeReport:
    """Difference quotients at h = b^-k for the sine series at 0, or the cosine
    series at 1/2 (``cosine_shifted``), k = 1..k_max.

    The positive claim (hypothesis ab >= 1 and a(b+1) < 2, plus b = 1 mod 4
    for the cosine case) is that the quotient magnitudes increase strictly
    from k = 5 on and pass 1000 by k_max.  Rows keep the sign: the shifted
    cosine series is minus the sine series, so its quotients go to -inf.
    """
    precision = check_precision(precision or default_precision())
    if kind not in ("sine", "cosine_shifted"):
        raise PreconditionError("kind must be 'sine' or 'cosine_shifted'")
    if k_max < 1:
        raise PreconditionError("k_max must be positive")
    spec = SeriesSpec("weierstrass_sin" if kind == "sine" else "weierstrass_cos", a=a, b=b)
    wp = precision + GUARD_BITS
    with mpmath.workprec(wp):
        A, B = to_mpf(a), to_mpf(b)
        hypothesis = bool(A * B >= 1 and A * (B + 1) < 2)
        if kind == "cosine_shifted":
            # the shifted cosine case also needs b = 1 mod 4
            hypothesis = hypothesis and B == int(B) and int(B) % 4 == 1
    origin = Fraction(0) if kind == "sine" else Fraction(1, 2)
    # integer b keeps every evaluation point an exact rational
    int_b = int(B) if B == int(B) else None
    base = weierstrass_eval(spec, origin, precision).value
    rows = []
    for k in range(1, k_max + 1):
        with mpmath.workprec(wp):
            if int_b is not None:
                h = Fraction(1, int_b**k)
                pt = origin + h
                h = to_mpf(h)
            else:
                h = B**-k
                pt = to_mpf(origin) + h
        v = weierstrass_eval(spec, pt, precision).value
        with mpmath.workprec(wp):
            rows.append((k, float(h), float((v - base) / h)))
    qs = [abs(r[2]) for r in rows]
    increasing = all(qs[i + 1] > qs[i] for i in range(len(qs) - 1) if rows[i][0] >= 5)
    exceeds = qs[-1] > 1e3
    return ProbeReport(
        a=str(a), b=str(b), kind=kind, hypothesis_met=hypothesis, rows=rows,
        strictly_increasing=increasing, exceeds_1e3=exceeds, claim_holds=increasing and exceeds,
    )
