"""Working-precision selection and the mandatory +32-bit recheck.

Every high-precision routine in the package is written as a function
``fn(bits) -> (value, scale)`` that computes a value at ``bits`` of binary
precision and reports ``scale``, the largest magnitude that entered the sum.
:func:`evaluate` picks the precision from the policy, escalates it when the
measured cancellation ``scale / |value|`` eats into the tolerance, and only
accepts a value that survives recomputation at 32 extra bits.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Tuple

import gmpy2
from gmpy2 import mpfr

from ..errors import PrecisionExhausted

PREC_ENV_VAR = "SINGULAR_SPECTRA_PREC_BITS"
RECHECK_BITS = 32

Evaluator = Callable[[int], Tuple[mpfr, mpfr]]


def _default_min_bits() -> int:
    raw = os.environ.get(PREC_ENV_VAR)
    if raw is None or not raw.strip():
        return 53
    return max(53, int(raw))


@dataclass(frozen=True)
class PrecisionPolicy:
    """How precise a special-function value has to be.

    Attributes
    ----------
    target_tol:
        Relative tolerance of accepted values. Near a zero of the function
        the tolerance becomes absolute, measured against the largest term of
        the underlying series.
    min_bits:
        Floor for the working precision. Defaults to 53 or to the value of
        the ``SINGULAR_SPECTRA_PREC_BITS`` environment variable.
    guard_bits:
        Extra bits on top of what the tolerance and cancellation require.
    max_bits:
        Escalation cap; exceeding it raises :class:`PrecisionExhausted`.
    zero_floor_bits:
        Values smaller than ``2**-zero_floor_bits`` times the largest series
        term are treated as zero: their accuracy is absolute, relative to
        that floor. Everything above it is resolved to ``target_tol``
        relative accuracy however much cancellation that takes.
    """

    target_tol: float = 1e-10
    min_bits: int = field(default_factory=_default_min_bits)
    guard_bits: int = 32
    max_bits: int = 1 << 16
    zero_floor_bits: int = 1024

    def __post_init__(self) -> None:
        if not (0.0 < self.target_tol < 1.0):
            raise ValueError(f"target_tol must lie in (0, 1), got {self.target_tol}")
        if self.min_bits < 53:
            raise ValueError(f"min_bits must be >= 53, got {self.min_bits}")
        if self.guard_bits < 32:
            raise ValueError(f"guard_bits must be >= 32, got {self.guard_bits}")
        if self.max_bits < self.min_bits:
            raise ValueError("max_bits must be >= min_bits")
        if self.zero_floor_bits < self.tol_bits:
            raise ValueError("zero_floor_bits must be at least the bits of target_tol")

    @property
    def tol_bits(self) -> int:
        return int(math.ceil(-math.log2(self.target_tol)))

    def working_bits(self, z: float = 0.0) -> int:
        """Starting precision for a series in the argument ``z``."""
        z = abs(float(z))
        formula = (
            int(math.ceil(z * math.log2(math.e)))
            + int(math.ceil(10 * math.log2(z + 2)))
            + self.guard_bits
        )
        return max(self.min_bits, formula, self.tol_bits + self.guard_bits)

    def with_tol(self, target_tol: float) -> "PrecisionPolicy":
        return PrecisionPolicy(
            target_tol=target_tol,
            min_bits=self.min_bits,
            guard_bits=self.guard_bits,
            max_bits=self.max_bits,
            zero_floor_bits=self.zero_floor_bits,
        )


DEFAULT_POLICY = PrecisionPolicy()


def log2_abs(x) -> float:
    """Approximate log2|x| for an mpfr of any exponent; -inf for zero."""
    if gmpy2.is_zero(x):
        return -math.inf
    e, m = gmpy2.frexp(x)
    return math.log2(abs(float(m))) + e


def floor_log2(value: mpfr, scale: mpfr, policy: PrecisionPolicy) -> float:
    """log2 of the magnitude against which the error of ``value`` is measured."""
    return max(log2_abs(value), log2_abs(scale) - policy.zero_floor_bits)


def needed_bits(value: mpfr, scale: mpfr, policy: PrecisionPolicy) -> int:
    """Bits required so that rounding in a sum of size ``scale`` stays within tol."""
    if gmpy2.is_zero(scale):
        return 0
    cancel = log2_abs(scale) - floor_log2(value, scale, policy)
    return int(math.ceil(max(cancel, 0.0))) + policy.tol_bits + policy.guard_bits


def agree(v1: mpfr, v2: mpfr, scale: mpfr, policy: PrecisionPolicy) -> bool:
    if gmpy2.is_zero(scale):
        return v1 == v2
    diff = abs(v1 - v2)
    if gmpy2.is_zero(diff):
        return True
    return log2_abs(diff) <= floor_log2(v2, scale, policy) + math.log2(policy.target_tol)


def evaluate(fn: Evaluator, policy: PrecisionPolicy, start_bits: int = 0, what: str = "value"):
    """Run ``fn`` at an adequate precision and certify it with a recheck.

    Returns ``(value, scale, bits)`` where ``value`` is the result of the
    higher-precision (+32 bits) evaluation.
    """
    bits = max(start_bits, policy.min_bits, policy.tol_bits + policy.guard_bits)
    while True:
        if bits > policy.max_bits:
            raise PrecisionExhausted(
                f"{what}: needs {bits} bits, above the cap of {policy.max_bits}"
            )
        value, scale = fn(bits)
        req = needed_bits(value, scale, policy)
        if req > bits:
            bits = req + 8
            continue
        check, check_scale = fn(bits + RECHECK_BITS)
        if agree(value, check, check_scale, policy):
            return check, check_scale, bits + RECHECK_BITS
        bits = 2 * bits


def with_bits(bits: int):
    """Context manager setting the gmpy2 working precision."""
    return gmpy2.context(precision=int(bits))


def to_mpfr(x, bits: int) -> mpfr:
    return mpfr(x, int(bits))
