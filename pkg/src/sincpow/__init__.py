"""Certified evaluation of periodized sinc power sums and one-crossing dominance."""

from .core import (
    CertifiedValue,
    EvalParams,
    EvaluationError,
    PhiPoint,
    f_half_closed,
    f_r_certified,
    h,
    phi,
    phi_log_deriv,
    s_m,
    sinc,
    tail_bound,
    y_half,
)
from .dominance import (
    CrossingInstance,
    TransferStep,
    check_one_crossing,
    dominance_verify,
    random_instance,
    transfer_sequence,
)

__version__ = "0.1.0"
