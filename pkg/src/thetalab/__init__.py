"""Quadratic Gauss sums, theta series and the local behaviour of Riemann's
function and Weierstrass-type series."""

from ._config import PreconditionError, ResourceError, set_thread_count, threads
from .dav_chowla import dc_lhs, dc_report, dc_rhs
from .exact_arith import (
    EighthRootPhase,
    LiouvilleTable,
    ReducedRational,
    epsilon_factor,
    gcd,
    kronecker,
    liouville_sieve,
    reduce,
)
from .gauss import (
    ExactGaussSum,
    gauss_sum_bruteforce,
    gauss_sum_closed,
    itatsu_R,
    landsberg_schaar_residual,
    reciprocity_ratio,
    scaling_ratio,
    smith_G,
)
from .local_analysis import (
    classify_rational,
    derivative_estimate,
    expansion_check,
    holder_exponent,
    infinite_derivative_probe,
    predicted_kappa,
)
from .series import (
    Evaluation,
    SeriesSpec,
    F_eval,
    nondiff_criteria,
    riemann_series,
    sawtooth_psi,
    theta_right,
    theta_transform_residual,
    theta_upper,
    weierstrass_eval,
)

__version__ = "0.1.0"
