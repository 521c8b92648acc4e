"""Float64 sums of e^{2 pi i n^2 t} with the phase reduced before any trig call.

The rational part of ``t`` is reduced in integer arithmetic and the real
remainder through error-free split products, so the phase of every term is
known modulo 1 to a few ulp even when n^2 t is of size 2**50.  Results are
plain floats; callers add ``ROUNDOFF_REL * mass`` to their error budget.

Sums are formed chunk by chunk over fixed index ranges and the chunk results
are combined in ascending order with ``math.fsum``, so the output does not
depend on the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import _config

CHUNK = 1 << 18
MAX_INDEX = 1 << 26  # keeps n^2 < 2**52
# phase error < 8 ulp(1) plus sin/cos/exp and pairwise summation, per unit weight
ROUNDOFF_REL = 1e-13

_SPLITTER = 134217729.0  # 2**27 + 1
_LOW26 = (1 << 26) - 1
_MAX_DEN = 1 << 31
_TWO_PI = 2 * math.pi


def _frac(x):
    return x - np.floor(x)


def _split(t: float):
    c = _SPLITTER * t
    hi = c - (c - t)
    return hi, t - hi


def frac_mul(k: np.ndarray, t: float) -> np.ndarray:
    """Fractional part of ``k * t`` for integers 0 <= k < 2**52, to ~1e-15."""
    khi = ((k >> 26) << 26).astype(np.float64)
    klo = (k & _LOW26).astype(np.float64)
    t1, t2 = _split(t)
    s = _frac(khi * t1) + _frac(khi * t2) + _frac(klo * t1) + _frac(klo * t2)
    return _frac(s)


def _two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@dataclass(frozen=True)
class Phase:
    """A real number t = rational + hi + lo, used modulo 1.

    ``rational`` carries an exactly known part with denominator below 2**31;
    ``hi + lo`` is a double-double remainder.
    """

    rational: Fraction = Fraction(0)
    hi: float = 0.0
    lo: float = 0.0

    @classmethod
    def of(cls, t) -> "Phase":
        if isinstance(t, Phase):
            return t
        if isinstance(t, (int, Fraction)):
            t = Fraction(t)
            if t.denominator < _MAX_DEN:
                return cls(Fraction(t.numerator % t.denominator, t.denominator))
            t = mpmath.mpf(t.numerator) / t.denominator
        if isinstance(t, float):
            r = Fraction(t)
            if r.denominator < _MAX_DEN:
                return cls.of(r)
            return cls(Fraction(0), t - math.floor(t), 0.0)
        with mpmath.workprec(160):
            t = mpmath.mpf(t)
            f = t - mpmath.floor(t)
            hi = float(f)
            lo = float(f - hi)
        return cls(Fraction(0), hi, lo)

    def shifted(self, offset: float) -> "Phase":
        hi, err = _two_sum(self.hi, float(offset))
        return Phase(self.rational, hi, self.lo + err)

    def frac_times(self, k) -> np.ndarray:
        """Fractional part of ``k * t`` for integers 0 <= k < 2**52.

        ``k`` is an int64 array or a ``Multiplier`` that caches its splits.
        """
        m = k if isinstance(k, Multiplier) else Multiplier(k)
        f = np.zeros(m.k.shape, dtype=np.float64)
        if self.rational:
            f += m.rational_frac(self.rational)
        if self.hi:
            t1, t2 = _split(self.hi)
            f += _frac(m.khi * t1) + _frac(m.khi * t2) + _frac(m.klo * t1) + _frac(m.klo * t2)
        if self.lo:
            f += _frac(m.kf * self.lo)
        return _frac(f)


class Multiplier:
    """An int64 array with the pieces every phase needs, computed once."""

    def __init__(self, k: np.ndarray):
        self.k = k
        self.khi = ((k >> 26) << 26).astype(np.float64)
        self.klo = (k & _LOW26).astype(np.float64)
        self.kf = k.astype(np.float64)
        self._fracs = {}

    def rational_frac(self, r: Fraction) -> np.ndarray:
        """Exact-residue fractional part of k * r, as a float array."""
        if r not in self._fracs:
            d = r.denominator
            self._fracs[r] = ((self.k % d) * (r.numerator % d)) % d / d
        return self._fracs[r]


def sincos2pi(f: np.ndarray):
    """(cos 2 pi f, sin 2 pi f)."""
    ang = _TWO_PI * f
    return np.cos(ang), np.sin(ang)


def _chunks(n_start: int, n_stop: int):
    return [(s, min(s + CHUNK, n_stop + 1)) for s in range(n_start, n_stop + 1, CHUNK)]


def _combine(parts, width):
    re = [math.fsum(p[0][i] for p in parts) for i in range(width)]
    im = [math.fsum(p[1][i] for p in parts) for i in range(width)]
    mass = math.fsum(p[2] for p in parts)
    return [complex(a, b) for a, b in zip(re, im)], mass


def _run(worker, chunks):
    n = _config.thread_count()
    if n > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(worker, chunks))
    return [worker(c) for c in chunks]


def quadratic_sums(phases, weight, n_stop: int, n_start: int = 1):
    """Sum w(n) e^{2 pi i n^2 t} over n_start <= n <= n_stop for each t.

    ``weight(n, n2)`` receives float arrays and returns real weights.
    Returns ``(sums, mass)`` with ``mass = sum |w(n)|``.
    """
    if n_stop > MAX_INDEX:
        raise _config.PreconditionError(f"vectorised sums support n <= {MAX_INDEX}")
    phases = [Phase.of(t) for t in phases]

    def worker(chunk):
        n = np.arange(chunk[0], chunk[1], dtype=np.int64)
        n2 = Multiplier(n * n)
        w = weight(n.astype(np.float64), n2.kf)
        re, im = [], []
        for ph in phases:
            c, s = sincos2pi(ph.frac_times(n2))
            re.append(float(np.sum(w * c)))
            im.append(float(np.sum(w * s)))
        return re, im, float(np.sum(np.abs(w)))

    if n_stop < n_start:
        return [0j] * len(phases), 0.0
    return _combine(_run(worker, _chunks(n_start, n_stop)), len(phases))


def linear_map(fn, n_stop: int, n_start: int = 1):
    """Apply ``fn(n_int64_array) -> (values, ...)`` chunkwise; concatenate in order."""
    chunks = _chunks(n_start, n_stop)
    parts = _run(lambda c: fn(np.arange(c[0], c[1], dtype=np.int64)), chunks)
    return parts
