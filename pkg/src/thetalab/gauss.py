"""Quadratic Gauss sums: brute force, closed forms, the Itatsu coefficient and
oracle checks of the reciprocity-type identities.

Brute-force sums reduce every exponent exactly (j^2 a mod m) and then add
precomputed m-th roots of unity held as fixed-point integers, so the only
rounding is in the table itself.  Sums are exact integer dot products split
into int64 limbs; no floating-point accumulation is involved.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from ._config import GUARD_BITS, PreconditionError, check_precision, default_precision
from .exact_arith import EighthRootPhase, epsilon_factor, kronecker

__all__ = [
    "ExactGaussSum",
    "Ratio",
    "gauss_sum_bruteforce",
    "smith_G",
    "gauss_sum_closed",
    "itatsu_R",
    "reciprocity_ratio",
    "landsberg_schaar_residual",
    "scaling_ratio",
]

MAX_MODULUS = 4 * 10**6
_ANCHOR = 64
_TABLE_GUARD = 24


@dataclass(frozen=True)
class ExactGaussSum:
    """Zero, or sqrt(radicand) * e^{i k pi/4}."""

    is_zero: bool
    phase: EighthRootPhase = EighthRootPhase(0)
    radicand: int = 1

    @classmethod
    def zero(cls) -> "ExactGaussSum":
        return cls(True, EighthRootPhase(0), 0)

    def value(self, precision: Optional[int] = None):
        precision = precision or default_precision()
        if self.is_zero:
            return mpmath.mpc(0)
        with mpmath.workprec(precision + GUARD_BITS):
            v = mpmath.sqrt(self.radicand) * self.phase.value(precision + GUARD_BITS)
        with mpmath.workprec(precision):
            return +v

    def conjugate(self) -> "ExactGaussSum":
        if self.is_zero:
            return self
        return ExactGaussSum(False, self.phase.conjugate(), self.radicand)

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"sqrt({self.radicand})*e^(i*{self.phase.k}π/4)"


class Ratio(NamedTuple):
    value: Optional[mpmath.mpc]
    degenerate: bool


# ---------------------------------------------------------------- root tables


def _work_bits(m: int, precision: int) -> int:
    return precision + GUARD_BITS + m.bit_length()


def _limb_width(m: int) -> int:
    # a dot product of at most m counts summing to <= m stays below 2**62
    return 62 - m.bit_length()


@functools.lru_cache(maxsize=8)
def _root_limbs(m: int, L: int) -> tuple:
    """cos and sin of 2 pi r/m, r < m, scaled by 2**L, as (m, limbs) int64 arrays.

    Anchors come from mpmath every 64 steps; in between the table advances by
    exact integer multiplication with the unit root, with 24 extra bits to
    absorb the accumulated rounding.
    """
    G = L + _TABLE_GUARD
    one = 1 << G
    half = m // 2 + 1
    cos = [0] * m
    sin = [0] * m
    with mpmath.workprec(G + 16):
        def anchor(r):
            a = mpmath.mpf(2 * r) / m
            return int(mpmath.nint(mpmath.cospi(a) * one)), int(mpmath.nint(mpmath.sinpi(a) * one))

        wc, ws = anchor(1)
        for start in range(0, half, _ANCHOR):
            c, s = anchor(start)
            for r in range(start, min(start + _ANCHOR, half)):
                cos[r] = c >> _TABLE_GUARD
                sin[r] = s >> _TABLE_GUARD
                c, s = (c * wc - s * ws) >> G, (c * ws + s * wc) >> G
    # exact values at quarter turns keep the table mirror-symmetric bit for bit
    unit = 1 << L
    for r, c, s in ((0, unit, 0), (m / 4, 0, unit), (m / 2, -unit, 0)):
        if r == int(r) and r < half:
            cos[int(r)], sin[int(r)] = c, s
    for r in range(half, m):
        cos[r] = cos[m - r]
        sin[r] = -sin[m - r]
    W = _limb_width(m)
    n_limbs = L // W + 2
    mask = (1 << W) - 1

    def split(vals):
        arr = np.array(vals, dtype=object)
        out = np.empty((m, n_limbs), dtype=np.int64)
        for i in range(n_limbs - 1):
            out[:, i] = ((arr >> (W * i)) & mask).astype(np.int64)
        out[:, -1] = (arr >> (W * (n_limbs - 1))).astype(np.int64)
        return out

    return split(cos), split(sin), W


def _root_sum(m: int, residues: np.ndarray, precision: int):
    """Sum of e^{2 pi i r/m} over an int64 array of residues in [0, m)."""
    if len(residues) > m:
        raise PreconditionError("more terms than the table modulus")
    L = _work_bits(m, precision)
    cos, sin, W = _root_limbs(m, L)
    counts = np.bincount(residues, minlength=m).astype(np.int64)
    idx = np.flatnonzero(counts)
    c = counts[idx]

    def combine(table):
        limbs = c @ table[idx]
        return sum(int(v) << (W * i) for i, v in enumerate(limbs))

    re, im = combine(cos), combine(sin)
    with mpmath.workprec(precision):
        return mpmath.mpc(mpmath.mpf((re, -L)), mpmath.mpf((im, -L)))


def _square_residues(n_terms: int, a: int, m: int) -> np.ndarray:
    j = np.arange(n_terms, dtype=np.int64)
    return ((j * j) % m) * (a % m) % m


def _check_modulus(m: int):
    if m > MAX_MODULUS:
        raise PreconditionError(f"modulus {m} exceeds the direct summation bound {MAX_MODULUS}")


# ------------------------------------------------------------------ operations


def gauss_sum_bruteforce(b: int, a: int, precision: Optional[int] = None):
    """S(b, a) = sum_{j<|b|} e^{2 pi i j^2 sgn(b) a/|b|}, error below 2^-(precision+30)."""
    precision = check_precision(precision or default_precision())
    if b == 0:
        raise PreconditionError("S(b, a) needs b != 0")
    if b < 0:
        b, a = -b, -a
    if b > 10**6:
        raise PreconditionError("direct summation is limited to |b| <= 10**6")
    return _root_sum(b, _square_residues(b, a, b), precision)


def smith_G(r: int, s: int, precision: Optional[int] = None):
    """sum_{t<s} e^{i pi t^2 r/s} for reduced r/s."""
    precision = check_precision(precision or default_precision())
    if s < 1 or math.gcd(r, s) != 1:
        raise PreconditionError(f"smith_G needs a reduced r/s with s >= 1, got {r}/{s}")
    _check_modulus(2 * s)
    return _root_sum(2 * s, _square_residues(s, r, 2 * s), precision)


def gauss_sum_closed(p: int, q: int) -> ExactGaussSum:
    if p < 1 or math.gcd(p, q) != 1:
        raise PreconditionError(f"gauss_sum_closed needs p >= 1 and gcd(p, q) = 1, got ({p}, {q})")
    if p % 2:
        k = epsilon_factor(p).k + (4 if kronecker(q, p) < 0 else 0)
        return ExactGaussSum(False, EighthRootPhase(k), p)
    if p % 4 == 2:
        return ExactGaussSum.zero()
    # p = 0 mod 4: (1 + i) conj(eps(q)) (p/q) sqrt(p) for q > 0, conjugate for q < 0
    aq = abs(q)
    k = 1 - epsilon_factor(aq).k + (4 if kronecker(p, aq) < 0 else 0)
    out = ExactGaussSum(False, EighthRootPhase(k), 2 * p)
    return out if q > 0 else out.conjugate()


def itatsu_R(p: int, q: int) -> ExactGaussSum:
    if p < 1 or math.gcd(p, q) != 1:
        raise PreconditionError(f"itatsu_R needs p >= 1 and gcd(p, q) = 1, got ({p}, {q})")
    if p % 2 and q % 2:
        return ExactGaussSum.zero()
    if p % 2:
        k = -(p - 1) + (4 if kronecker(q, p) < 0 else 0)
    else:
        k = q + (4 if kronecker(p, abs(q)) < 0 else 0)
    return ExactGaussSum(False, EighthRootPhase(k), 1)


def _degenerate(v, precision) -> bool:
    return abs(v) < mpmath.ldexp(1, -(precision // 2))


def reciprocity_ratio(p: int, q: int, precision: Optional[int] = None) -> Ratio:
    """S(p, q) divided by e^{i pi sgn(q)/4} (p/2|q|)^{1/2} S(4|q|, -sgn(q) p)."""
    precision = check_precision(precision or default_precision())
    if p < 1 or q == 0 or math.gcd(p, q) != 1:
        raise PreconditionError(f"reciprocity_ratio needs p >= 1, q != 0, gcd(p, q) = 1, got ({p}, {q})")
    sg = 1 if q > 0 else -1
    wp = precision + GUARD_BITS
    lhs = gauss_sum_bruteforce(p, q, wp)
    other = gauss_sum_bruteforce(4 * abs(q), -sg * p, wp)
    with mpmath.workprec(wp):
        rhs = mpmath.expjpi(mpmath.mpf(sg) / 4) * mpmath.sqrt(mpmath.mpf(p) / (2 * abs(q))) * other
        if _degenerate(rhs, precision):
            return Ratio(None, True)
        ratio = lhs / rhs
    with mpmath.workprec(precision):
        return Ratio(+ratio, False)


def landsberg_schaar_residual(p: int, q: int, precision: Optional[int] = None):
    """|p^{-1/2} S(p, q) - e^{i pi/4} (2q)^{-1/2} sum_{j<2q} e^{-i pi j^2 p/(2q)}|."""
    precision = check_precision(precision or default_precision())
    if p < 1 or q < 1:
        raise PreconditionError("landsberg_schaar_residual needs p, q >= 1")
    wp = precision + GUARD_BITS
    _check_modulus(4 * q)
    lhs = gauss_sum_bruteforce(p, q, wp)
    rhs = _root_sum(4 * q, _square_residues(2 * q, -p, 4 * q), wp)
    with mpmath.workprec(wp):
        d = lhs / mpmath.sqrt(p) - mpmath.expjpi(mpmath.mpf(1) / 4) * rhs / mpmath.sqrt(2 * q)
        r = abs(d)
    with mpmath.workprec(precision):
        return +r


def scaling_ratio(a: int, b: int, k: int, precision: Optional[int] = None) -> Ratio:
    """S(ka, kb)/S(a, b) by direct summation."""
    precision = check_precision(precision or default_precision())
    if a < 1 or k < 1 or math.gcd(a, b) != 1:
        raise PreconditionError(f"scaling_ratio needs a, k >= 1 and gcd(a, b) = 1, got ({a}, {b}, {k})")
    wp = precision + GUARD_BITS
    base = gauss_sum_bruteforce(a, b, wp)
    scaled = gauss_sum_bruteforce(k * a, k * b, wp)
    with mpmath.workprec(wp):
        if _degenerate(base, precision):
            return Ratio(None, True)
        ratio = scaled / base
    with mpmath.workprec(precision):
        return Ratio(+ratio, False)
