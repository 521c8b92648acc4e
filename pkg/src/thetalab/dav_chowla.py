"""Both sides of the Davenport-Chowla identity

    sum_n lambda(n) psi(n x)/n = -(1/pi) sum_n sin(2 pi n^2 x)/n^2,

with psi the centred saw-tooth.  The left side converges slowly and only
its partial sums are reported; the right side is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from . import _phase
from ._config import PreconditionError
from .exact_arith import LiouvilleTable
from .series import HURWITZ_MAX_DEN, to_mpf

__all__ = ["DcReport", "dc_lhs", "dc_lhs_partials", "dc_rhs", "dc_report", "RHS_TOL"]

RHS_TOL = 0.9e-8
RESIDUAL_BOUND = 0.1
TREND_FROM = 10**4


def _phase_of(x) -> _phase.Phase:
    if isinstance(x, (int, Fraction)):
        return _phase.Phase.of(Fraction(x))
    if isinstance(x, float):
        return _phase.Phase.of(x)
    with mpmath.workprec(160):
        return _phase.Phase.of(to_mpf(x, 160))


def _psi_terms(ph: _phase.Phase, n: np.ndarray, lam: np.ndarray) -> np.ndarray:
    f = ph.frac_times(n)
    psi = np.where(f == 0.0, 0.0, f - 0.5)
    return lam * psi / n


def dc_lhs_partials(x, schedule, table: LiouvilleTable) -> list:
    """Partial sums sum_{n<=N} lambda(n) psi(n x)/n at each N of the schedule.

    x may be a Fraction (exact residues), a float or an mpf/str (double-double
    phase).  Chunks are summed in index order with fsum, so the result does
    not depend on the thread count.
    """
    schedule = sorted(int(N) for N in schedule)
    if not schedule or schedule[0] < 1:
        raise PreconditionError("schedule entries must be positive")
    if schedule[-1] > table.limit:
        raise PreconditionError(f"Liouville table covers n <= {table.limit}, schedule needs {schedule[-1]}")
    if schedule[-1] > _phase.MAX_INDEX:
        raise PreconditionError(f"left side supports N <= {_phase.MAX_INDEX}")
    ph = _phase_of(x)
    lam = table.values

    def chunk_sum(lo, hi):
        n = np.arange(lo, hi, dtype=np.int64)
        return float(np.sum(_psi_terms(ph, n, lam[lo:hi].astype(np.float64))))

    # split the index range at every checkpoint so each partial is a prefix of chunk sums
    bounds = sorted(set(range(1, schedule[-1] + 1, _phase.CHUNK)) | {N + 1 for N in schedule})
    pieces = list(zip(bounds[:-1], bounds[1:]))
    sums = _phase._run(lambda c: chunk_sum(*c), pieces)
    partials, acc, i = [], [], 0
    for (lo, hi), v in zip(pieces, sums):
        acc.append(v)
        while i < len(schedule) and schedule[i] == hi - 1:
            partials.append(math.fsum(acc))
            i += 1
    return partials


def dc_lhs(x, N: int, table: LiouvilleTable) -> float:
    return dc_lhs_partials(x, [N], table)[0]


def _rational_rhs(x: Fraction, wp: int):
    """Exact right side at a rational point through Hurwitz zeta values."""
    d = x.denominator
    with mpmath.workprec(wp):
        acc = mpmath.mpf(0)
        for b in range(1, d + 1):
            s = mpmath.sinpi(mpmath.mpf(2 * ((b * b * x.numerator) % d)) / d)
            if s:
                acc += s * mpmath.zeta(2, mpmath.mpf(b) / d)
        return -acc / (d * d) / mpmath.pi


def dc_rhs(x, precision: Optional[int] = None, tol: float = RHS_TOL):
    """(value, error_bound) of -(1/pi) sum sin(2 pi n^2 x)/n^2.

    Rationals with small denominators are summed exactly; otherwise the series
    is cut at N = ceil(1/(pi tol)) terms, whose tail is below 1/(pi N).
    """
    if isinstance(x, float) and Fraction(x).denominator <= HURWITZ_MAX_DEN:
        x = Fraction(x)
    if isinstance(x, (int, Fraction)) and Fraction(x).denominator <= HURWITZ_MAX_DEN:
        wp = (precision or 64) + 32
        v = _rational_rhs(Fraction(x), wp)
        return float(v), 2.0 ** -(precision or 64)
    N = math.ceil(1 / (math.pi * tol))
    if N > _phase.MAX_INDEX:
        raise PreconditionError("requested tolerance needs too many terms")
    ph = _phase_of(x)

    def weight(n, n2):
        return 1.0 / n2

    (s,), mass = _phase.quadratic_sums([ph], weight, N)
    value = -s.imag / math.pi
    err = 1 / (math.pi * N) + _phase.ROUNDOFF_REL * mass / math.pi
    return value, err


@dataclass
class DcReport:
    x: str
    schedule: list
    lhs_partials: list
    rhs_value: float
    rhs_error_bound: float
    residuals: list
    final_below_bound: bool
    trend_non_increasing: bool


def dc_report(x, schedule, table: LiouvilleTable, bound: float = RESIDUAL_BOUND) -> DcReport:
    """Partial sums against the right side, with two loose diagnostics.

    ``final_below_bound``: the last residual is under ``bound``.
    ``trend_non_increasing``: among checkpoints N >= 10**4, no residual
    exceeds the largest one seen at an earlier such checkpoint.
    """
    schedule = sorted(int(N) for N in schedule)
    partials = dc_lhs_partials(x, schedule, table)
    rhs, rhs_err = dc_rhs(x)
    residuals = [abs(p - rhs) for p in partials]
    late = [r for N, r in zip(schedule, residuals) if N >= TREND_FROM]
    trend = all(late[i] <= max(late[:i]) for i in range(1, len(late)))
    return DcReport(
        x=str(x),
        schedule=schedule,
        lhs_partials=partials,
        rhs_value=rhs,
        rhs_error_bound=rhs_err,
        residuals=residuals,
        final_below_bound=residuals[-1] < bound,
        trend_non_increasing=trend,
    )
