"""Numerical experiments around the zeros of zeta on the critical line.

Modules: special_fns (log-gamma, theta), zeta_eval (zeta, Hurwitz, Z), zeros
(zero scans, Lehmer pairs), davenport_heilbronn, gelfand_shilov (test
functions), convolution (smoothed Z, divided differences), moments, arithmetic,
cli.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConsistencyError,
    CritlineError,
    DomainError,
    NumericError,
    PoleError,
    RepositionError,
    UsageError,
)
from .special_fns import chi, log_gamma, theta_exact  # noqa: E402
from .zeta_eval import z_oracle, z_rs, z_values, zeta_values  # noqa: E402
from .zeros import count_and_s, lehmer_scan, scan_zeros  # noqa: E402

__all__ = [
    "ConsistencyError",
    "CritlineError",
    "DomainError",
    "NumericError",
    "PoleError",
    "RepositionError",
    "UsageError",
    "chi",
    "count_and_s",
    "lehmer_scan",
    "log_gamma",
    "scan_zeros",
    "theta_exact",
    "z_oracle",
    "z_rs",
    "z_values",
    "zeta_values",
]
