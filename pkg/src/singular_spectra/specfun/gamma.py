"""Pochhammer symbol and digamma function."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpfr

from ..errors import InvalidParams


def pochhammer(a, k: int):
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1.

    The product is formed in the arithmetic of ``a``: ints and Fractions give
    exact results, floats and mpfr values are rounded at each step.
    """
    if k < 0:
        raise InvalidParams(f"pochhammer needs k >= 0, got {k}")
    out = 1
    for j in range(k):
        out = out * (a + j)
    return out


@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple:
    # B_0, B_2, ..., B_{2(count-1)} by the Akiyama-Tanigawa algorithm.
    n_max = 2 * (count - 1)
    out = []
    a = [Fraction(0)] * (n_max + 1)
    for m in range(n_max + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m % 2 == 0:
            out.append(a[0])
    return tuple(out)


def digamma(x, bits: int | None = None) -> mpfr:
    """psi(x) = Gamma'(x)/Gamma(x) for real x that is not a nonpositive integer.

    Negative arguments use the reflection psi(x) = psi(1-x) - pi cot(pi x).
    Positive arguments are shifted upward by psi(x) = psi(x+1) - 1/x until the
    asymptotic series ln x - 1/(2x) - sum B_2j / (2j x^2j) converges to the
    working precision.
    """
    if bits is None:
        bits = gmpy2.get_context().precision
    bits = int(bits)
    with gmpy2.context(precision=bits + 16):
        xm = mpfr(x)
        if gmpy2.is_integer(xm) and xm <= 0:
            raise InvalidParams(f"digamma has a pole at {x}")
        if xm < mpfr(0.5):
            pi = gmpy2.const_pi()
            val = digamma(1 - xm, bits + 16) - pi / gmpy2.tan(pi * xm)
            return mpfr(val, bits)
        # Shift so the optimally truncated asymptotic series reaches 2^-bits.
        shift_to = max(10.0, 0.12 * bits + 2.0)
        acc = mpfr(0)
        while xm < shift_to:
            acc -= 1 / xm
            xm += 1
        eps = mpfr(2) ** (-(bits + 8))
        inv2 = 1 / (xm * xm)
        s = gmpy2.log(xm) - 1 / (2 * xm)
        power = inv2
        table = _bernoulli_even(16)
        j = 1
        while True:
            if j >= len(table):
                table = _bernoulli_even(2 * len(table))
            bern = table[j]
            term = mpfr(bern.numerator) / bern.denominator / (2 * j) * power
            s -= term
            if abs(term) < eps * abs(s):
                break
            j += 1
            power *= inv2
            if j > 4 * bits:
                break
        return mpfr(s + acc, bits)


def euler_gamma(bits: int) -> mpfr:
    with gmpy2.context(precision=int(bits)):
        return gmpy2.const_euler()
