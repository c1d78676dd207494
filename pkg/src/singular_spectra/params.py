"""Operator parameters and the algebraic links between eigenvalues and a-zeros."""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2

from .errors import InvalidParams


def _bits(*xs) -> int:
    # Keep the precision of mpfr inputs (plus headroom for the integer part).
    return max([getattr(x, "precision", 0) for x in xs] + [53]) + 16


@dataclass(frozen=True)
class SpectralProblem:
    """One operator -d^2/dx^2 + xi^2 x^2 + (nu^2 - 1/4)/x^2 on (0, 1)."""

    nu: float
    xi: float

    def __post_init__(self) -> None:
        if not self.nu >= 0:
            raise InvalidParams(f"nu must be >= 0, got {self.nu}")
        if not self.xi > 0:
            raise InvalidParams(f"xi must be > 0, got {self.xi}")

    @property
    def b(self) -> float:
        return 1 + self.nu


def mu(k: int, nu: float) -> float:
    """Eigenvalue 4k + 2(1 + nu) of the half-line harmonic oscillator with the same singularity."""
    if k < 0:
        raise InvalidParams(f"k must be >= 0, got {k}")
    return 4 * k + 2 * (1 + nu)


def a_to_lambda(a, nu, xi):
    """lambda = 2 xi (1 + nu) - 4 xi a. Works on floats and mpfr alike."""
    with gmpy2.context(gmpy2.get_context(), precision=_bits(a)):
        return 2 * xi * (1 + nu) - 4 * xi * a


def lambda_to_a(lam, nu, xi):
    with gmpy2.context(gmpy2.get_context(), precision=_bits(lam)):
        return -(lam - 2 * xi * (1 + nu)) / (4 * xi)


def a_to_kappa(a, b):
    """Whittaker parameter kappa = b/2 - a."""
    with gmpy2.context(gmpy2.get_context(), precision=_bits(a)):
        return b / 2 - a
