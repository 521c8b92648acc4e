"""Exact integer helpers: reduced rationals, Kronecker symbols, eighth roots of
unity and a segmented Liouville sieve."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ._config import PreconditionError, ResourceError

__all__ = [
    "ReducedRational",
    "EighthRootPhase",
    "LiouvilleTable",
    "gcd",
    "reduce",
    "kronecker",
    "epsilon_factor",
    "liouville_sieve",
]


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


@dataclass(frozen=True, order=True)
class ReducedRational:
    num: int
    den: int = 1

    def __post_init__(self):
        if self.den < 1 or math.gcd(self.num, self.den) != 1:
            raise PreconditionError(f"{self.num}/{self.den} is not in lowest terms")

    @classmethod
    def parse(cls, text) -> "ReducedRational":
        """Accept ``"q/p"``, ``"q"``, an int, a Fraction or a ReducedRational."""
        if isinstance(text, ReducedRational):
            return text
        if isinstance(text, (int, Fraction)):
            f = Fraction(text)
            return cls(f.numerator, f.denominator)
        parts = str(text).strip().split("/")
        try:
            if len(parts) == 1:
                return cls(int(parts[0]), 1)
            if len(parts) == 2:
                return reduce(int(parts[0]), int(parts[1]))
        except ValueError:
            pass
        raise PreconditionError(f"cannot read a rational from {text!r}")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self):
        return f"{self.num}/{self.den}"


def reduce(num: int, den: int) -> ReducedRational:
    if den == 0:
        raise PreconditionError("zero denominator")
    f = Fraction(num, den)
    return ReducedRational(f.numerator, f.denominator)


@dataclass(frozen=True)
class EighthRootPhase:
    """e^{i k pi/4}."""

    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 8)

    def __mul__(self, other: "EighthRootPhase") -> "EighthRootPhase":
        return EighthRootPhase(self.k + other.k)

    def conjugate(self) -> "EighthRootPhase":
        return EighthRootPhase(-self.k)

    def value(self, precision: int = 53):
        with mpmath.workprec(precision):
            return mpmath.mpc(mpmath.cospi(mpmath.mpf(self.k) / 4), mpmath.sinpi(mpmath.mpf(self.k) / 4))


# (a/2) for odd a, indexed by a mod 8
_KRON2 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), without factoring n."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    v = (n & -n).bit_length() - 1
    n >>= v
    k = 1 if v % 2 == 0 else _KRON2[a & 7]
    if n < 0:
        n = -n
        if a < 0:
            k = -k
    # n odd and positive from here: Jacobi loop
    a %= n
    while a:
        v = (a & -a).bit_length() - 1
        a >>= v
        if v % 2 and n & 7 in (3, 5):
            k = -k
        if a & n & 2:
            k = -k
        a, n = n % a, a
    return k if n == 1 else 0


def epsilon_factor(p: int) -> EighthRootPhase:
    if p < 1 or p % 2 == 0:
        raise PreconditionError(f"epsilon_factor needs an odd positive integer, got {p}")
    return EighthRootPhase(0 if p % 4 == 1 else 2)


@dataclass(frozen=True)
class LiouvilleTable:
    """lambda(n) for 1 <= n <= limit; ``values[0]`` is unused and set to 0."""

    limit: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(n)
        return int(self.values[n])


_BLOCK = 1 << 20


def _small_primes(m: int) -> np.ndarray:
    is_p = np.ones(m + 1, dtype=bool)
    is_p[:2] = False
    for i in range(2, math.isqrt(m) + 1):
        if is_p[i]:
            is_p[i * i :: i] = False
    return np.flatnonzero(is_p)


def liouville_sieve(N: int) -> LiouvilleTable:
    """(-1)^Omega(n) with Omega counted with multiplicity.

    Segmented trial division by primes up to sqrt(N): each block keeps the
    unfactored cofactor, which is 1 or a single large prime at the end.
    Memory is one byte per entry plus two fixed-size block buffers.
    """
    if N < 1:
        raise PreconditionError("liouville_sieve needs N >= 1")
    try:
        values = np.empty(N + 1, dtype=np.int8)
    except (MemoryError, ValueError) as exc:
        raise ResourceError(f"cannot allocate a Liouville table of size {N}") from exc
    values[0] = 0
    primes = _small_primes(math.isqrt(N)).tolist()
    for lo in range(1, N + 1, _BLOCK):
        hi = min(lo + _BLOCK, N + 1)
        rest = np.arange(lo, hi, dtype=np.int64)
        omega = np.zeros(hi - lo, dtype=np.int8)
        for p in primes:
            if p * p >= hi:
                break
            pk = p
            while pk < hi:
                start = (-lo) % pk
                rest[start::pk] //= p
                omega[start::pk] += 1
                pk *= p
        omega += rest > 1
        values[lo:hi] = 1 - 2 * (omega & 1)
    values.flags.writeable = False
    return LiouvilleTable(N, values)
