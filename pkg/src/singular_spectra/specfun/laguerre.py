"""Generalized Laguerre polynomials and their large-degree asymptotics."""

from __future__ import annotations

import enum
import math

from ..errors import DomainError, InvalidParams


def laguerre_recurrence_step(k: int, alpha, r, Lk, Lkm1):
    """Return L_{k+1}^{(alpha)}(r) from L_k and L_{k-1} (take L_{-1} = 0).

    This is ((2k + 1 + alpha - r) L_k - (k + alpha) L_{k-1}) / (k + 1).
    """
    return ((2 * k + 1 + alpha - r) * Lk - (k + alpha) * Lkm1) / (k + 1)


def laguerre(n: int, alpha, r):
    """L_n^{(alpha)}(r) by the forward three-term recurrence.

    Works in the arithmetic of its inputs, so Fractions stay exact and mpfr
    values keep their precision.
    """
    if n < 0:
        raise InvalidParams(f"Laguerre degree must be >= 0, got {n}")
    prev = 0
    cur = 1 + 0 * r
    for k in range(n):
        prev, cur = cur, laguerre_recurrence_step(k, alpha, r, cur, prev)
    return cur


def laguerre_all(n: int, alpha, r) -> list:
    """[L_0, ..., L_n] at a single point."""
    out = [1 + 0 * r]
    prev = 0
    for k in range(n):
        nxt = laguerre_recurrence_step(k, alpha, r, out[-1], prev)
        prev = out[-1]
        out.append(nxt)
    return out


class Regime(enum.Enum):
    Oscillatory = "oscillatory"
    Exponential = "exponential"


def plancherel_rotach_point(n: int, alpha: float, theta: float, regime: Regime) -> float:
    """The argument r at which :func:`plancherel_rotach` approximates e^{-r/2} L_n(r)."""
    scale = 4 * n + 2 * alpha + 2
    if Regime(regime) is Regime.Oscillatory:
        return scale * math.cos(theta) ** 2
    return scale * math.cosh(theta) ** 2


def plancherel_rotach(
    n: int,
    alpha: float,
    theta: float,
    regime: Regime,
    eps0: float = 0.05,
    eps: float = 1.0,
    omega: float = 5.0,
) -> float:
    """Main term of the large-n asymptotics of e^{-r/2} L_n^{(alpha)}(r).

    Oscillatory regime, r = (4n + 2 alpha + 2) cos^2(theta) with
    eps0 <= theta <= pi/2 - eps/n::

        (-1)^n n^(alpha/2 - 1/4) sin[(n + (alpha+1)/2)(sin 2theta - 2theta) + 3pi/4]
        / ((pi sin theta)^(1/2) r^(alpha/2 + 1/4))

    Exponential regime, r = (4n + 2 alpha + 2) cosh^2(theta) with
    eps0 <= theta <= omega::

        (-1)^n n^(alpha/2 - 1/4) / 2 * exp[(n + (alpha+1)/2)(2theta - sinh 2theta)]
        / ((pi sinh theta)^(1/2) r^(alpha/2 + 1/4))

    The O-remainders are dropped. The window constants are left to the caller.
    """
    regime = Regime(regime)
    if n < 1:
        raise DomainError("Plancherel-Rotach asymptotics need n >= 1")
    r = plancherel_rotach_point(n, alpha, theta, regime)
    sign = -1.0 if n % 2 else 1.0
    lead = sign * n ** (alpha / 2 - 0.25) / r ** (alpha / 2 + 0.25)
    if regime is Regime.Oscillatory:
        if not (eps0 <= theta <= math.pi / 2 - eps / n):
            raise DomainError(
                f"theta={theta} outside [{eps0}, pi/2 - {eps}/{n}] for the oscillatory regime"
            )
        phase = (n + (alpha + 1) / 2) * (math.sin(2 * theta) - 2 * theta) + 0.75 * math.pi
        return lead * math.sin(phase) / math.sqrt(math.pi * math.sin(theta))
    if not (0 < eps0 <= theta <= omega):
        raise DomainError(f"theta={theta} outside [{eps0}, {omega}] for the exponential regime")
    expo = (n + (alpha + 1) / 2) * (2 * theta - math.sinh(2 * theta))
    return 0.5 * lead * math.exp(expo) / math.sqrt(math.pi * math.sinh(theta))
