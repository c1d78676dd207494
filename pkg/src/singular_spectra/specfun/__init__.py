"""Adjustable-precision special functions: Kummer, Whittaker, Laguerre, Bessel zeros."""

from .bessel import bessel_j, bessel_zero, mcmahon_guess
from .gamma import digamma, pochhammer
from .kummer import (
    KummerArgs,
    SecondSolutionBranch,
    count_positive_z_zeros,
    count_z_sign_changes,
    kummer_m,
    kummer_m_scaled,
    kummer_m_second,
    kummer_reflect,
    second_solution_branch,
    whittaker_m,
    z_scan_limit,
)
from .laguerre import (
    Regime,
    laguerre,
    laguerre_all,
    laguerre_recurrence_step,
    plancherel_rotach,
    plancherel_rotach_point,
)
from .precision import DEFAULT_POLICY, PREC_ENV_VAR, PrecisionPolicy

__all__ = [
    "DEFAULT_POLICY",
    "KummerArgs",
    "PREC_ENV_VAR",
    "PrecisionPolicy",
    "Regime",
    "SecondSolutionBranch",
    "bessel_j",
    "bessel_zero",
    "count_positive_z_zeros",
    "count_z_sign_changes",
    "digamma",
    "kummer_m",
    "kummer_m_scaled",
    "kummer_m_second",
    "kummer_reflect",
    "laguerre",
    "laguerre_all",
    "laguerre_recurrence_step",
    "mcmahon_guess",
    "pochhammer",
    "plancherel_rotach",
    "plancherel_rotach_point",
    "second_solution_branch",
    "whittaker_m",
    "z_scan_limit",
]
