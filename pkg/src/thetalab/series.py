"""Theta functions, the integrated theta series F, Riemann-type and
Weierstrass-type trigonometric series, with explicit truncation bounds.

Every evaluator returns ``Evaluation(value, error, terms)`` where ``error`` is
a bound on |computed - exact| (truncation tail plus a rounding allowance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, NamedTuple, Optional

import mpmath
import numpy as np

from . import _phase
from ._config import GUARD_BITS, PreconditionError, check_precision, default_precision

__all__ = [
    "Evaluation",
    "SeriesSpec",
    "CriteriaReport",
    "theta_upper",
    "theta_right",
    "F_eval",
    "F_near_axis",
    "F_rational",
    "riemann_series",
    "weierstrass_eval",
    "sawtooth_psi",
    "theta_transform_residual",
    "nondiff_criteria",
]

IM_FLOOR = 1e-12
MP_TERM_LIMIT = 20000
RIEMANN_MAX_TERMS = 1 << 21
REAL_AXIS_TERMS = 1 << 22
HURWITZ_MAX_DEN = 1 << 14
_MP_SERIES_TERMS = 4096


class Evaluation(NamedTuple):
    value: Any
    error: float
    terms: int


def bound(x) -> float:
    """x as a float rounded upward, so reported error bounds never shrink."""
    return math.nextafter(float(x), math.inf)


def _prec(precision):
    return check_precision(precision or default_precision())


def to_mpf(x, wp: Optional[int] = None):
    """Read a real from str, int, float, Fraction or mpf without double rounding."""
    with mpmath.workprec(wp or mpmath.mp.prec):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / x.denominator
        return mpmath.mpf(x)


def to_mpc(z, wp: Optional[int] = None):
    with mpmath.workprec(wp or mpmath.mp.prec):
        if isinstance(z, Fraction):
            return mpmath.mpc(to_mpf(z))
        if isinstance(z, str):
            return mpmath.mpmathify(z.replace("i", "j"))
        return mpmath.mpc(z)


# ---------------------------------------------------------------- theta and F


def _geometric_terms(y, precision: int) -> int:
    """Smallest N with pi N^2 y > (precision + 16) ln 2."""
    need = (precision + 16) * math.log(2) / (math.pi * float(y))
    n = max(1, math.isqrt(int(need)))
    while math.pi * n * n * float(y) <= (precision + 16) * math.log(2):
        n += 1
    return n


def _theta_tail(y, N: int, wp: int):
    """Bound on sum_{n > N} e^{-pi n^2 y}."""
    with mpmath.workprec(wp):
        y = mpmath.mpf(y)
        return mpmath.exp(-mpmath.pi * (N + 1) ** 2 * y) / (1 - mpmath.exp(-mpmath.pi * (2 * N + 3) * y))


def _q_power_sum(z, N: int, wp: int, weighted: bool):
    """sum_{n=1}^N e^{i pi n^2 z} (divided by i pi n^2 when ``weighted``)."""
    with mpmath.workprec(wp):
        q = mpmath.expjpi(z)
        q2 = q * q
        term, ratio = q, q * q2
        acc = mpmath.mpc(0)
        for n in range(1, N + 1):
            acc += term / (n * n) if weighted else term
            term *= ratio
            ratio *= q2
        if weighted:
            acc /= mpmath.j * mpmath.pi
        return acc


def theta_upper(z, precision: Optional[int] = None, terms: Optional[int] = None) -> Evaluation:
    """Theta(z) = sum over all integers n of e^{i pi n^2 z}, Im z >= 1e-12."""
    precision = _prec(precision)
    z = to_mpc(z, precision + GUARD_BITS)
    if z.imag < IM_FLOOR:
        raise PreconditionError(
            f"theta_upper needs Im z >= {IM_FLOOR}; closer to the real line use F_eval or F_near_axis"
        )
    N = terms or _geometric_terms(z.imag, precision)
    wp = precision + GUARD_BITS + 2 * N.bit_length()
    s = _q_power_sum(z, N, wp, weighted=False)
    with mpmath.workprec(wp):
        v = 1 + 2 * s
        err = 2 * _theta_tail(z.imag, N, wp) + mpmath.ldexp(1, -precision)
    with mpmath.workprec(precision):
        return Evaluation(+v, bound(err), N)


def theta_right(s, precision: Optional[int] = None, terms: Optional[int] = None) -> Evaluation:
    """theta(s) = Theta(i s) for Re s > 0."""
    precision = _prec(precision)
    s = to_mpc(s, precision + GUARD_BITS)
    if s.real <= 0:
        raise PreconditionError("theta_right needs Re s > 0")
    with mpmath.workprec(precision + GUARD_BITS):
        z = mpmath.j * s
    return theta_upper(z, precision, terms)


def F_rational(x, precision: Optional[int] = None) -> Evaluation:
    """F at a rational point of the real axis, exactly through Hurwitz zeta values.

    n^2 x mod 2 depends only on n mod 2p, so the series splits into 2p
    residue classes, each a Hurwitz zeta value at s = 2.
    """
    precision = _prec(precision)
    x = Fraction(x)
    p, q = x.denominator, x.numerator
    if 2 * p > 2 * HURWITZ_MAX_DEN:
        raise PreconditionError(f"F_rational supports denominators up to {HURWITZ_MAX_DEN}")
    m = 2 * p
    wp = precision + GUARD_BITS + m.bit_length()
    with mpmath.workprec(wp):
        acc = mpmath.mpc(0)
        for b in range(1, m + 1):
            acc += mpmath.expjpi(mpmath.mpf((b * b * q) % m) / p) * mpmath.zeta(2, mpmath.mpf(b) / m)
        v = acc / (m * m) / (mpmath.j * mpmath.pi)
    with mpmath.workprec(precision):
        return Evaluation(+v, bound(mpmath.ldexp(1, -precision)), 0)


def _axis_tail(N: int, y: float) -> float:
    """Bound on sum_{n > N} e^{-pi n^2 y}/(pi n^2)."""
    plain = 1 / (math.pi * N)
    if y <= 0:
        return plain
    t = math.exp(-math.pi * (N + 1) ** 2 * y) / (math.pi * (N + 1) ** 2)
    return min(plain, t / -math.expm1(-math.pi * (2 * N + 3) * y))


def axis_terms(y: float, tol: float) -> int:
    """Smallest N (capped at the vector limit) whose F tail is below ``tol``."""
    lo, hi = 1, _phase.MAX_INDEX
    if _axis_tail(hi, y) > tol:
        return hi
    while lo < hi:
        mid = (lo + hi) // 2
        if _axis_tail(mid, y) <= tol:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _half(x):
    """Phase of x/2, where x is a real or a pair (exact rational, float offset)."""
    if isinstance(x, tuple):
        base, off = x
        return _phase.Phase.of(Fraction(base) / 2).shifted(float(off) / 2)
    if isinstance(x, (int, Fraction)):
        return _phase.Phase.of(Fraction(x) / 2)
    with mpmath.workprec(160):
        return _phase.Phase.of(to_mpf(x, 160) / 2)


def F_near_axis(xs, y: float, tol: float = 1e-14, terms: Optional[int] = None) -> list:
    """F(x + i y) in double precision for many x sharing one y >= 0.

    Each x is a real or a pair ``(Fraction, float)`` whose rational part is
    reduced exactly.  The index range, weights and squares are shared across
    points, which is what makes dense grids near the axis affordable.
    """
    y = float(y)
    if y < 0:
        raise PreconditionError("F is defined for Im z >= 0")
    N = terms or axis_terms(y, tol)
    phases = [_half(x) for x in xs]

    def weight(n, n2):
        return np.exp(-math.pi * y * n2) / (math.pi * n2)

    sums, mass = _phase.quadratic_sums(phases, weight, N)
    err = bound(_axis_tail(N, y) + _phase.ROUNDOFF_REL * mass)
    return [Evaluation(complex(s.imag, -s.real), err, N) for s in sums]


def F_eval(z, precision: Optional[int] = None, terms: Optional[int] = None) -> Evaluation:
    """F(z) = sum_{n>=1} e^{i pi n^2 z}/(i pi n^2) for Im z >= 0.

    Above the axis the series is geometric and summed at full precision
    while that takes at most 20000 terms; closer in, and at irrational points
    of the axis, the double-precision engine is used and the achieved
    accuracy is reported.  Rational points of the axis are exact.
    """
    precision = _prec(precision)
    if isinstance(z, (int, Fraction)) and Fraction(z).denominator <= HURWITZ_MAX_DEN and terms is None:
        return F_rational(z, precision)
    zc = to_mpc(z, precision + GUARD_BITS)
    y = zc.imag
    if y < 0:
        raise PreconditionError("F is defined for Im z >= 0")
    if y == 0 and terms is None:
        man, exp = zc.real.man_exp
        r = Fraction(man) * Fraction(2) ** exp if man else Fraction(0)
        if r.denominator <= HURWITZ_MAX_DEN:
            return F_rational(r, precision)
    if y > 0:
        N = terms or _geometric_terms(y, precision)
        if N <= MP_TERM_LIMIT:
            wp = precision + GUARD_BITS + 2 * N.bit_length()
            v = _q_power_sum(zc, N, wp, weighted=True)
            with mpmath.workprec(wp):
                err = _theta_tail(y, N, wp) / (mpmath.pi * (N + 1) ** 2) + mpmath.ldexp(1, -precision)
            with mpmath.workprec(precision):
                return Evaluation(+v, bound(err), N)
    n_terms = terms or (REAL_AXIS_TERMS if y == 0 else axis_terms(float(y), 1e-17))
    (ev,) = F_near_axis([zc.real], float(y), terms=n_terms)
    with mpmath.workprec(precision):
        return Evaluation(mpmath.mpc(ev.value), ev.error, ev.terms)


# ------------------------------------------------------------ trigonometric series

_KINDS = ("riemann_sin", "riemann_cos", "weierstrass_cos", "weierstrass_sin")


@dataclass(frozen=True)
class SeriesSpec:
    kind: str
    alpha: Any = 2
    a: Any = None
    b: Any = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PreconditionError(f"unknown series kind {self.kind!r}")
        if self.is_riemann:
            if not to_mpf(self.alpha, 64) > 1:
                raise PreconditionError("riemann series need alpha > 1")
        else:
            if self.a is None or self.b is None:
                raise PreconditionError("weierstrass series need a and b")
            if not 0 < to_mpf(self.a, 64) < 1:
                raise PreconditionError("weierstrass series need 0 < a < 1")
            if not to_mpf(self.b, 64) > 1:
                raise PreconditionError("weierstrass series need b > 1")

    @property
    def is_riemann(self) -> bool:
        return self.kind.startswith("riemann")

    @property
    def xi(self) -> Optional[float]:
        """Hardy's exponent log(1/a)/log b (weierstrass kinds only)."""
        if self.is_riemann:
            return None
        return float(mpmath.log(1 / to_mpf(self.a, 128)) / mpmath.log(to_mpf(self.b, 128)))


def _riemann_terms(alpha, precision: int) -> int:
    # N^{1-alpha}/(alpha-1) < 2^-precision
    a = float(alpha)
    logN = ((precision) * math.log(2) - math.log(a - 1)) / (a - 1)
    if logN > math.log(RIEMANN_MAX_TERMS):
        return RIEMANN_MAX_TERMS
    return max(1, math.ceil(math.exp(logN)))


def riemann_series(spec: SeriesSpec, x, precision: Optional[int] = None, terms: Optional[int] = None) -> Evaluation:
    """sum sin(n^2 x)/n^alpha (or cos), x in radians."""
    precision = _prec(precision)
    if not spec.is_riemann:
        raise PreconditionError("riemann_series needs a riemann kind")
    wp = precision + GUARD_BITS
    with mpmath.workprec(wp):
        alpha = to_mpf(spec.alpha)

        def tail_at(n):
            return mpmath.mpf(n) ** (1 - alpha) / (alpha - 1)

        N = terms or _riemann_terms(spec.alpha, precision)
        # a short full-precision sum beats the double-precision floor for large alpha
        if terms is None and N > _MP_SERIES_TERMS:
            if tail_at(_MP_SERIES_TERMS) <= tail_at(N) + _phase.ROUNDOFF_REL * mpmath.zeta(alpha):
                N = _MP_SERIES_TERMS
        tail = tail_at(N)
        xv = to_mpf(x)
        if N <= _MP_SERIES_TERMS:
            trig = mpmath.sin if spec.kind == "riemann_sin" else mpmath.cos
            v = mpmath.fsum(trig(n * n * xv) / mpmath.mpf(n) ** alpha for n in range(1, N + 1))
            err = tail + mpmath.ldexp(1, -precision)
            with mpmath.workprec(precision):
                return Evaluation(+v, bound(err), N)
        t = _phase.Phase.of(xv / (2 * mpmath.pi))
    af = float(alpha)

    def weight(n, n2):
        return n ** -af

    (s,), mass = _phase.quadratic_sums([t], weight, N)
    v = s.imag if spec.kind == "riemann_sin" else s.real
    err = bound(bound(tail) + _phase.ROUNDOFF_REL * mass)
    with mpmath.workprec(precision):
        return Evaluation(mpmath.mpf(v), err, N)


def weierstrass_eval(spec: SeriesSpec, x, precision: Optional[int] = None, terms: Optional[int] = None) -> Evaluation:
    """sum_{n>=0} a^n cos(b^n pi x) (or sin)."""
    precision = _prec(precision)
    if spec.is_riemann:
        raise PreconditionError("weierstrass_eval needs a weierstrass kind")
    with mpmath.workprec(precision + GUARD_BITS):
        a, b = to_mpf(spec.a), to_mpf(spec.b)
        if terms is None:
            # a^N/(1-a) < 2^-precision
            N = int(mpmath.ceil((precision * mpmath.log(2) - mpmath.log(1 - a)) / -mpmath.log(a))) + 1
        else:
            N = terms
        grow = int(mpmath.ceil(N * mpmath.log(b, 2))) + 8
    wp = precision + GUARD_BITS + grow
    with mpmath.workprec(wp):
        a, b, xv = to_mpf(spec.a), to_mpf(spec.b), to_mpf(x)
        trig = mpmath.cospi if spec.kind == "weierstrass_cos" else mpmath.sinpi
        v = mpmath.fsum(a**n * trig(b**n * xv) for n in range(N))
        err = a**N / (1 - a) + mpmath.ldexp(1, -precision)
    with mpmath.workprec(precision):
        return Evaluation(+v, bound(err), N)


def sawtooth_psi(x):
    """((x)) = x - floor(x) - 1/2, and 0 at integers."""
    if isinstance(x, (int, Fraction)):
        f = Fraction(x) - math.floor(Fraction(x))
        return Fraction(0) if f == 0 else f - Fraction(1, 2)
    if isinstance(x, mpmath.mpf):
        f = x - mpmath.floor(x)
        return mpmath.mpf(0) if f == 0 else f - mpmath.mpf(0.5)
    x = float(x)
    f = x - math.floor(x)
    return 0.0 if f == 0 else f - 0.5


def theta_transform_residual(z, precision: Optional[int] = None):
    """|Theta(z) - e^{i pi/4} z^{-1/2} Theta(-1/z)|, principal branch."""
    precision = _prec(precision)
    wp = precision + GUARD_BITS
    z = to_mpc(z, wp)
    lhs = theta_upper(z, wp).value
    with mpmath.workprec(wp):
        w = -1 / z
    rhs = theta_upper(w, wp).value
    with mpmath.workprec(wp):
        d = abs(lhs - mpmath.expjpi(mpmath.mpf(1) / 4) * rhs / mpmath.sqrt(z))
    with mpmath.workprec(precision):
        return +d


# ------------------------------------------------------------ classical criteria


@dataclass(frozen=True)
class CriteriaReport:
    """Each field is True/False, or None where the condition is not defined."""

    a: str
    b: str
    weierstrass: bool
    bromwich: bool
    dini_pair: bool
    lerch_pair: bool
    dini_general: Optional[bool]
    dini_general2: Optional[bool]
    hardy: bool


def _exact(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def nondiff_criteria(a, b) -> CriteriaReport:
    """Evaluate the classical sufficient conditions for non-differentiability.

    a and b are read as exact rationals (floats by their shortest repr);
    comparisons against expressions in pi use 256-bit arithmetic, which
    cannot produce a tie for rational inputs.
    """
    fa, fb = _exact(a), _exact(b)
    if not (0 < fa < 1 and fb > 1):
        raise PreconditionError("criteria need 0 < a < 1 and b > 1")
    ab, ab2 = fa * fb, fa * fb * fb
    with mpmath.workprec(256):
        pi = mpmath.pi
        A, B = to_mpf(fa), to_mpf(fb)
        mab, mab2 = A * B, A * B * B
        weier = mab > 1 + 3 * pi / 2
        brom = mab > 1 + (3 * pi / 2) * (1 - A)
        dini1 = ab >= 1 and mab2 > 1 + 3 * pi**2
        lerch = ab >= 1 and mab2 > 1 + pi**2
        dini2 = None
        if fa < Fraction(1, 3):
            dini2 = bool(mab > 1 + (3 * pi / 2) * (1 - A) / (1 - 3 * A))
        dini3 = None
        if fa < Fraction(5, 21):
            dini3 = bool(ab > 1 and mab2 > 1 + 15 * pi**2 * (1 - A) / (5 - 21 * A))
    return CriteriaReport(
        a=str(fa), b=str(fb),
        weierstrass=bool(weier), bromwich=bool(brom), dini_pair=bool(dini1), lerch_pair=bool(lerch),
        dini_general=dini2, dini_general2=dini3, hardy=ab >= 1,
    )
