"""Kummer's confluent hypergeometric function and its relatives.

All values are summed from power series in gmpy2 ``mpfr`` arithmetic at a
precision chosen by :mod:`.precision`; the returned objects are ``mpfr``
numbers carrying that precision (``float(v)`` gives a double).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from ..errors import AmbiguousSign, ConvergenceFailure, InvalidParams
from .gamma import digamma
from .precision import DEFAULT_POLICY, PrecisionPolicy, evaluate, log2_abs, with_bits

MAX_TERMS = 2_000_000


def _is_int(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, float):
        return x.is_integer()
    return bool(gmpy2.is_integer(mpfr(x)))


def _is_nonpositive_int(x) -> bool:
    return _is_int(x) and x <= 0


@dataclass(frozen=True)
class KummerArgs:
    """Parameters (a, b) and argument z of M(a, b, z).

    ``a`` and ``z`` may be floats, ints or mpfr values; ``b`` must not be a
    nonpositive integer.
    """

    a: object
    b: object
    z: object

    def __post_init__(self) -> None:
        if _is_nonpositive_int(self.b):
            raise InvalidParams(f"M(a, b, z) is undefined for b = {self.b}")


class SecondSolutionBranch(enum.Enum):
    NonIntegerB = "non-integer b"
    IntegerB_GenericA = "integer b, generic a"
    IntegerB_NegIntA = "integer b, a in {0, -1, -2, ...}"
    IntegerB_PosIntA = "integer b, a in {1, ..., b-1}"


def second_solution_branch(a, b) -> SecondSolutionBranch:
    """Classify (a, b) into the four definitions of the second solution."""
    if not _is_int(b):
        return SecondSolutionBranch.NonIntegerB
    n = int(b) - 1
    if n < 0:
        raise InvalidParams(f"no second solution is defined for integer b = {b} < 1")
    if _is_nonpositive_int(a):
        return SecondSolutionBranch.IntegerB_NegIntA
    if _is_int(a) and 1 <= a <= n:
        return SecondSolutionBranch.IntegerB_PosIntA
    return SecondSolutionBranch.IntegerB_GenericA


def _peak_log2(a: float, b: float, z: float) -> float:
    """log2 of the largest |term| of the Kummer series, in double arithmetic."""
    if z == 0:
        return 0.0
    lz = math.log2(abs(z))
    cur = best = 0.0
    k = 0
    while k < MAX_TERMS:
        num = abs(a + k)
        if num == 0:
            break
        step = math.log2(num) + lz - math.log2(abs(b + k)) - math.log2(k + 1)
        cur += step
        k += 1
        best = max(best, cur)
        if cur < best - 64 and _ratio_bound(a, b, z, k) < 0.5:
            break
    return best


def _ratio_bound(a: float, b: float, z: float, k: int) -> float:
    """Upper bound, valid for every j >= k, on |term_{j+1} / term_j|.

    Uses |a + j| <= j + |a| and |b + j| >= j - |b|; the bound decreases in k
    once k > |b| + 1.
    """
    if k <= abs(b) + 1:
        return math.inf
    return (k + abs(a)) * abs(z) / ((k - abs(b)) * (k + 1))


def _kummer_series(a, b, z, bits: int):
    """Sum M(a, b, z) at ``bits``; returns (sum, largest |term|)."""
    with with_bits(bits):
        a = mpfr(a)
        b = mpfr(b)
        z = mpfr(z)
        af, bf, zf = float(a), float(b), float(z)
        terminate = -int(af) if _is_nonpositive_int(a) else None
        t = mpfr(1)
        s = mpfr(1)
        big = mpfr(1)
        if gmpy2.is_zero(z):
            return s, big
        eps = mpfr(2) ** (-bits)
        k = 0
        while True:
            if terminate is not None and k == terminate:
                break
            t = t * (a + k) * z / ((b + k) * (k + 1))
            k += 1
            s += t
            at = abs(t)
            if at > big:
                big = at
            # The rest of the tail is below 2|t| once the ratio bound is < 1/2.
            if at <= eps * big and _ratio_bound(af, bf, zf, k) < 0.5:
                break
            if k > MAX_TERMS:
                raise ConvergenceFailure(f"Kummer series did not converge for a={af}, b={bf}, z={zf}")
        return s, big


def _start_bits(a, b, z, policy: PrecisionPolicy) -> int:
    peak = _peak_log2(float(a), float(b), float(z))
    # Never round away digits of a parameter that was handed in at higher precision.
    given = max(getattr(a, "precision", 0), getattr(z, "precision", 0))
    return max(policy.working_bits(float(z)), int(peak) + policy.tol_bits + policy.guard_bits, given)


def kummer_m(args: KummerArgs, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """M(a, b, z) = sum_k (a)_k / ((b)_k k!) z^k.

    The series terminates exactly when ``a`` is a nonpositive integer. Negative
    ``z`` is accepted as well (the reflection identity needs it).

    Raises
    ------
    InvalidParams
        if b is a nonpositive integer.
    PrecisionExhausted
        if the +32-bit recheck keeps disagreeing up to ``policy.max_bits``.
    """
    a, b, z = args.a, args.b, args.z
    if _is_nonpositive_int(b):
        raise InvalidParams(f"M(a, b, z) is undefined for b = {b}")
    value, _, _ = evaluate(
        lambda bits: _kummer_series(a, b, z, bits),
        policy,
        _start_bits(a, b, z, policy),
        what=f"M({float(a)}, {float(b)}, {float(z)})",
    )
    return value


def kummer_m_scaled(a, b, z, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Like :func:`kummer_m` but also returns the largest series term.

    The pair ``(value, scale)`` lets callers judge whether ``value`` is
    distinguishable from zero: the error is at most
    ``target_tol * max(|value|, 2**-zero_floor_bits * scale)``.
    """
    if _is_nonpositive_int(b):
        raise InvalidParams(f"M(a, b, z) is undefined for b = {b}")
    value, scale, _ = evaluate(
        lambda bits: _kummer_series(a, b, z, bits),
        policy,
        _start_bits(a, b, z, policy),
        what="M(a, b, z)",
    )
    return value, scale


def kummer_reflect(args: KummerArgs, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """Evaluate e^z M(b - a, b, -z), which equals M(a, b, z).

    Both sides are summed from different series, so comparing this with
    :func:`kummer_m` is an independent consistency check.
    """
    a, b, z = args.a, args.b, args.z
    if _is_nonpositive_int(b):
        raise InvalidParams(f"M(a, b, z) is undefined for b = {b}")

    def fn(bits):
        with with_bits(bits):
            ar = mpfr(b) - mpfr(a)
        s, big = _kummer_series(ar, b, -mpfr(z, bits), bits)
        with with_bits(bits):
            ez = gmpy2.exp(mpfr(z))
            return ez * s, ez * big

    start = _start_bits(float(b) - float(a), b, -float(z), policy)
    value, _, _ = evaluate(fn, policy, start, what="e^z M(b-a, b, -z)")
    return value


def _finite_negative_powers(a, n: int, z):
    # sum_{k=1}^{n} n! (k-1)! / ((n-k)! (1-a)_k) z^{-k}
    s = mpfr(0)
    big = mpfr(0)
    poch = mpfr(1)
    zinv = 1 / z
    zp = mpfr(1)
    for k in range(1, n + 1):
        poch *= (1 - a) + (k - 1)
        zp *= zinv
        term = mpfr(math.factorial(n) * math.factorial(k - 1)) / math.factorial(n - k) / poch * zp
        s += term
        big = max(big, abs(term))
    return s, big


def _log_series(a, n: int, z, bits: int, upto: int | None, psi_a_reflected: bool):
    """sum_k (a)_k / ((n+1)_k k!) z^k (ln z + psi(a+k) - psi(1+k) - psi(n+k+1)).

    With ``psi_a_reflected`` the factor psi(a+k) is replaced by psi(1-a-k),
    its finite part at the poles a+k = 0, -1, ...; ``upto`` caps k.
    """
    eps = mpfr(2) ** (-bits)
    lnz = gmpy2.log(z)
    if psi_a_reflected:
        psi_a = digamma(1 - a, bits)
    else:
        psi_a = digamma(a, bits)
    psi_1 = -gmpy2.const_euler()
    psi_n = digamma(n + 1, bits)
    t = mpfr(1)
    s = mpfr(0)
    big = mpfr(0)
    af, zf = float(a), float(z)
    kmin = abs(af) + n + 1
    k = 0
    while True:
        term = t * (lnz + psi_a - psi_1 - psi_n)
        s += term
        big = max(big, abs(term))
        if upto is not None and k == upto:
            break
        if upto is None and k > kmin and abs(term) <= eps * big and abs(zf) / (k + 1) < 0.5:
            break
        # advance k -> k+1
        if psi_a_reflected:
            psi_a = psi_a - 1 / (-a - k)
        else:
            psi_a = psi_a + 1 / (a + k)
        psi_1 = psi_1 + mpfr(1) / (k + 1)
        psi_n = psi_n + mpfr(1) / (n + k + 1)
        t = t * (a + k) * z / ((n + 1 + k) * (k + 1))
        k += 1
        if k > MAX_TERMS:
            raise ConvergenceFailure("logarithmic series did not converge")
    return s, big


def _second_solution_series(a, b, z, bits: int):
    branch = second_solution_branch(a, b)
    with with_bits(bits):
        a = mpfr(a)
        z = mpfr(z)
        if branch is SecondSolutionBranch.NonIntegerB:
            b = mpfr(b)
            s, big = _kummer_series(a + 1 - b, 2 - b, z, bits)
            with with_bits(bits):
                pref = z ** (1 - b)
                return pref * s, pref * big
        n = int(b) - 1
        if branch is SecondSolutionBranch.IntegerB_PosIntA:
            ai = int(a)
            s = mpfr(0)
            big = mpfr(0)
            for k in range(ai, n + 1):
                term = (
                    mpfr(math.factorial(k - 1))
                    / (math.factorial(n - k) * math.factorial(k - ai))
                    * z ** (-k)
                )
                s += term
                big = max(big, abs(term))
            return s, big
        fin, big_fin = _finite_negative_powers(a, n, z)
        if branch is SecondSolutionBranch.IntegerB_GenericA:
            log_s, big_log = _log_series(a, n, z, bits, None, False)
            return fin - log_s, max(big_fin, big_log)
        # a = -m: truncated logarithmic part plus a regular tail.
        m = -int(a)
        log_s, big_log = _log_series(a, n, z, bits, m, True)
        eps = mpfr(2) ** (-bits)
        zf = float(z)
        # tail_k = (k-1-m)! / ((n+1)_k k!) z^k for k >= m+1
        k = m + 1
        t = mpfr(1)
        for j in range(1, k + 1):
            t = t * z / ((n + j) * j)
        tail = mpfr(0)
        big_tail = mpfr(0)
        while True:
            tail += t
            big_tail = max(big_tail, abs(t))
            if k > m + n + 2 and abs(t) <= eps * big_tail and abs(zf) / (k + 1) < 0.5:
                break
            t = t * (k - m) * z / ((n + 1 + k) * (k + 1))
            k += 1
            if k > MAX_TERMS:
                raise ConvergenceFailure("second-solution tail did not converge")
        sign = -1 if (1 + m) % 2 else 1
        tail = sign * math.factorial(m) * tail
        big_tail = math.factorial(m) * big_tail
        return fin - log_s + tail, max(big_fin, big_log, big_tail)


def kummer_m_second(args: KummerArgs, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """Second fundamental solution of z w'' + (b - z) w' - a w = 0.

    * b not an integer: z^(1-b) M(a+1-b, 2-b, z).
    * b = 1+n, a not in {..., n-1, n}: finite sum of negative powers minus
      the logarithmic series with digamma coefficients.
    * b = 1+n, a = -m: as above with the logarithmic series truncated at
      k = m (digamma taken at 1-a-k) plus a regular power tail.
    * b = 1+n, a in {1, ..., n}: a finite sum of negative powers.

    Requires z > 0.
    """
    a, b, z = args.a, args.b, args.z
    if not z > 0:
        raise InvalidParams(f"second solution needs z > 0, got {z}")
    second_solution_branch(a, b)
    start = _start_bits(a, b, z, policy)
    value, _, _ = evaluate(
        lambda bits: _second_solution_series(a, b, z, bits),
        policy,
        start,
        what="second Kummer solution",
    )
    return value


def whittaker_m(kappa, mu, z, policy: PrecisionPolicy = DEFAULT_POLICY) -> mpfr:
    """M_{kappa,mu}(z) = e^{-z/2} z^{1/2+mu} M(1/2 + mu - kappa, 1 + 2 mu, z), z > 0."""
    if not z > 0:
        raise InvalidParams(f"whittaker_m needs z > 0, got {z}")
    b = 1 + 2 * mu
    if _is_nonpositive_int(b):
        raise InvalidParams(f"whittaker_m is undefined for 2*mu = {2 * mu}")

    def fn(bits):
        with with_bits(bits):
            a = mpfr(0.5) + mpfr(mu) - mpfr(kappa)
            bb = 1 + 2 * mpfr(mu)
        s, big = _kummer_series(a, bb, z, bits)
        with with_bits(bits):
            zz = mpfr(z)
            pref = gmpy2.exp(-zz / 2) * zz ** (mpfr(0.5) + mpfr(mu))
            return pref * s, pref * big

    a0 = 0.5 + float(mu) - float(kappa)
    value, _, _ = evaluate(fn, policy, _start_bits(a0, b, z, policy), what="Whittaker M")
    return value


def count_positive_z_zeros(a, b) -> int:
    """Number of positive zeros of z -> M(a, b, z) for b >= 0.

    Zero when a >= 0, otherwise ceil(-a). At a = -k the series is a degree-k
    polynomial with exactly k positive roots, which is what ceil gives.
    """
    if a >= 0:
        return 0
    return int(math.ceil(-float(a)))


def z_scan_limit(a, b) -> float:
    """Upper end of a z-interval that contains every positive zero of M(a, b, .)."""
    return 4.0 * (2 * count_positive_z_zeros(a, b) + float(b)) + 10.0


def count_z_sign_changes(
    a,
    b,
    z_max: float | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    n_points: int | None = None,
) -> int:
    """Count sign changes of z -> M(a, b, z) on a grid over (0, z_max].

    The grid is uniform in sqrt(z), where consecutive zeros are roughly
    evenly spaced. Raises :class:`AmbiguousSign` when a sample cannot be told
    apart from zero.
    """
    if z_max is None:
        z_max = z_scan_limit(a, b)
    if n_points is None:
        n_points = 200 * (count_positive_z_zeros(a, b) + 1) + 400
    root_max = math.sqrt(z_max)
    signs = []
    for j in range(1, n_points + 1):
        z = (root_max * j / n_points) ** 2
        value, scale = kummer_m_scaled(a, b, z, policy)
        signs.append(sign_of(value, scale, policy))
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def sign_of(value, scale, policy: PrecisionPolicy) -> int:
    """Sign of a certified series value, or AmbiguousSign below the noise floor."""
    if gmpy2.is_zero(value) or log2_abs(value) <= log2_abs(scale) - policy.zero_floor_bits:
        raise AmbiguousSign(f"value {float(value):.3e} is below the noise floor")
    return 1 if value > 0 else -1
