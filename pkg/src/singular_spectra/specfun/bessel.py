"""Zeros of the Bessel function J_nu from its power series."""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from ..errors import ConvergenceFailure, InvalidParams
from .precision import DEFAULT_POLICY, PrecisionPolicy, evaluate, with_bits

NEWTON_MAX_ITER = 60


def _entire_part(nu, x, bits: int, with_derivative: bool = False):
    """S(x) = sum_m (-x^2/4)^m / (m! (nu+1)_m), so J_nu(x) = (x/2)^nu S(x) / Gamma(nu+1).

    Returns (S, largest |term|) or, with ``with_derivative``, (S, S', largest |term|).
    """
    with with_bits(bits):
        x = mpfr(x)
        nu = mpfr(nu)
        q = -(x * x) / 4
        t = mpfr(1)
        s = mpfr(1)
        d = mpfr(0)
        big = mpfr(1)
        eps = mpfr(2) ** (-bits)
        xf = float(x)
        m = 0
        while True:
            m += 1
            t = t * q / (m * (nu + m))
            s += t
            d += m * t
            at = abs(t)
            if at > big:
                big = at
            if m > xf and at <= eps * big:
                break
            if m > 10_000_000:
                raise ConvergenceFailure("Bessel series did not converge")
        if with_derivative:
            return s, 2 * d / x, big
        return s, big


def bessel_j(nu, x, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """J_nu(x) for real nu >= 0 and x >= 0, summed from the power series."""
    if nu < 0:
        raise InvalidParams("bessel_j is implemented for nu >= 0 only")

    def fn(bits):
        s, big = _entire_part(nu, x, bits)
        with with_bits(bits):
            pref = (mpfr(x) / 2) ** mpfr(nu) / gmpy2.gamma(mpfr(nu) + 1)
            return pref * s, pref * big

    value, _, _ = evaluate(fn, policy, policy.working_bits(x), what="J_nu(x)")
    return value


def mcmahon_guess(nu: float, k: int) -> float:
    """McMahon's large-zero expansion for j_{nu,k} (k counted from 0)."""
    mu = 4.0 * nu * nu
    beta = (k + 1 + nu / 2.0 - 0.25) * math.pi
    e = 8.0 * beta
    return (
        beta
        - (mu - 1) / e
        - 4 * (mu - 1) * (7 * mu - 31) / (3 * e**3)
        - 32 * (mu - 1) * (83 * mu * mu - 982 * mu + 3779) / (15 * e**5)
    )


def _sign_at(nu, x, policy) -> int:
    value, _, _ = evaluate(lambda bits: _entire_part(nu, x, bits), policy, policy.working_bits(x))
    if gmpy2.is_zero(value):
        return 0
    return 1 if value > 0 else -1


def _scan_bracket(nu: float, k: int, policy) -> tuple:
    # J_nu has no zeros in (0, nu]; count sign changes upward from there.
    step = 0.25
    x = max(nu, step)
    prev = _sign_at(nu, x, policy)
    found = -1
    while True:
        nxt = _sign_at(nu, x + step, policy)
        if nxt != prev:
            found += 1
            if found == k:
                return x, x + step
        x += step
        prev = nxt
        if x > (k + nu + 10) * math.pi * 2:
            raise ConvergenceFailure(f"scan failed to bracket j_({nu},{k})")


@lru_cache(maxsize=4096)
def _bessel_zero_cached(nu: float, k: int, policy: PrecisionPolicy) -> mpfr:
    seed = mcmahon_guess(nu, k)
    # Zeros are about pi apart, so [seed - 1, seed + 1] holds at most one.
    lo, hi = max(seed - 1.0, 1e-8), seed + 1.0
    s_lo, s_hi = _sign_at(nu, lo, policy), _sign_at(nu, hi, policy)
    if nu > 3.0 or s_lo == s_hi:
        lo, hi = _scan_bracket(nu, k, policy)
        seed = 0.5 * (lo + hi)
        s_lo, s_hi = _sign_at(nu, lo, policy), _sign_at(nu, hi, policy)
    bits = policy.working_bits(hi) + 16
    with with_bits(bits):
        lo_m, hi_m = mpfr(lo), mpfr(hi)
        x = mpfr(seed)
        tol = mpfr(policy.target_tol) * x / 4
        for _ in range(NEWTON_MAX_ITER):
            s, ds, _ = _entire_part(nu, x, bits, with_derivative=True)
            step = s / ds
            new = x - step
            if not (lo_m < new < hi_m):
                new = (lo_m + hi_m) / 2
            sgn = _sign_at(nu, new, policy)
            if sgn == 0:
                return new
            if sgn == s_lo:
                lo_m = new
            else:
                hi_m = new
            x = new
            if abs(step) < tol or hi_m - lo_m < tol:
                break
        else:
            raise ConvergenceFailure(f"Newton did not converge for j_({nu},{k})")
        # Certify a sign change across a tolerance-sized interval.
        width = mpfr(policy.target_tol) * x / 2
        if _sign_at(nu, x - width, policy) == _sign_at(nu, x + width, policy):
            raise ConvergenceFailure(f"j_({nu},{k}) not certified within tolerance")
        return x


def bessel_zero(nu: float, k: int, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """The (k+1)-th positive zero j_{nu,k} of J_nu, counting from k = 0.

    Newton iteration on the power series of J_nu, seeded by McMahon's
    expansion and safeguarded by a sign bracket around the seed.
    """
    if nu < 0:
        raise InvalidParams("bessel_zero is implemented for nu >= 0 only")
    if k < 0:
        raise InvalidParams(f"zero index must be >= 0, got {k}")
    return _bessel_zero_cached(float(nu), int(k), policy)
