"""a-zeros of a -> M(a, b, xi) and the spectrum they encode.

The search region for the k-th zero comes from the Bessel window
j_{nu,k}^2 <= lambda_k <= j_{nu,k}^2 + xi^2 (widened to j^2 - xi^2 below).
The windows are sign-scanned in a, every sign change becomes a bracket, and
the number of brackets is certified against a Sturm oscillation count: the
number of zeros of x -> M(a_floor, b, xi x^2) on (0, 1] equals the number of
a-zeros above a_floor. Brackets are then shrunk by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpfr

from .eigensolver import EigenResult, Method, sign_changes_along_x
from .errors import AmbiguousSign, BracketingFailure, InvalidParams
from .params import SpectralProblem, a_to_kappa, a_to_lambda, lambda_to_a
from .specfun.bessel import bessel_zero
from .specfun.kummer import KummerArgs, kummer_m, kummer_m_scaled, sign_of
from .specfun.precision import DEFAULT_POLICY, PrecisionPolicy, with_bits

__all__ = [
    "AZero",
    "Bracket",
    "a_to_kappa",
    "a_to_lambda",
    "find_azeros",
    "lambda_to_a",
    "search_windows",
    "spectrum_via_kummer",
]

SCAN_STEP = 0.25
MAX_HALVINGS = 4


@dataclass(frozen=True)
class Bracket:
    lo: object
    hi: object
    f_lo_sign: int
    f_hi_sign: int

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise InvalidParams("bracket needs lo < hi")
        if self.f_lo_sign == self.f_hi_sign or 0 in (self.f_lo_sign, self.f_hi_sign):
            raise InvalidParams("bracket ends must have opposite nonzero signs")

    @property
    def width(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class AZero:
    """The k-th largest zero of a -> M(a, b, xi).

    ``below_minus_k`` is True when the sign of M at a = -k (an exact
    polynomial value) together with the bracket proves a < -k.
    """

    k: int
    a: object
    b: float
    xi: float
    bracket: Bracket
    refinement_residual: float
    below_minus_k: bool

    @property
    def kappa(self):
        return a_to_kappa(self.a, self.b)

    @property
    def lambda_(self):
        return a_to_lambda(self.a, self.b - 1, self.xi)

    def as_record(self) -> dict:
        return {
            "k": self.k,
            "a": self.a,
            "kappa": self.kappa,
            "lambda": self.lambda_,
            "residual": self.refinement_residual,
            "below_minus_k": self.below_minus_k,
        }


def search_windows(b: float, xi: float, count: int, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Merged a-intervals that contain the zeros with index 0..count-1.

    Each zero lies in [lambda_to_a(j^2 + xi^2), lambda_to_a(max(j^2 - xi^2, 0))]
    with j = j_{b-1,k}; overlapping intervals are merged. Returned in
    descending order of a.
    """
    nu = b - 1
    windows = []
    for k in range(count):
        j2 = float(bessel_zero(nu, k, policy)) ** 2
        lo = lambda_to_a(j2 + xi * xi, nu, xi)
        hi = lambda_to_a(max(j2 - xi * xi, 0.0), nu, xi)
        pad = 1e-9 * max(1.0, abs(lo))
        windows.append((lo - pad, min(hi + pad, b / 2)))
    windows.sort(key=lambda w: -w[1])
    merged = [list(windows[0])]
    for lo, hi in windows[1:]:
        if hi >= merged[-1][0]:
            merged[-1][0] = min(merged[-1][0], lo)
        else:
            merged.append([lo, hi])
    return [tuple(w) for w in merged]


def _sign(a, b, xi, policy) -> int:
    value, scale = kummer_m_scaled(a, b, xi, policy)
    return sign_of(value, scale, policy)


def _scan_sign(p, b, xi, step, policy) -> tuple:
    # A sample sitting exactly on a zero (polynomial cases) is nudged upward.
    try:
        return p, _sign(p, b, xi, policy)
    except AmbiguousSign:
        p = p + step * 1e-3
        return p, _sign(p, b, xi, policy)


def _scan(windows, b, xi, step, policy) -> list:
    brackets = []
    for lo, hi in windows:
        n = max(1, int(math.ceil((hi - lo) / step)))
        pts = []
        signs = []
        for i in range(n + 1):
            p, s = _scan_sign(hi - (hi - lo) * i / n, b, xi, step, policy)
            pts.append(p)
            signs.append(s)
        for i in range(n):
            if signs[i] != signs[i + 1]:
                brackets.append(Bracket(pts[i + 1], pts[i], signs[i + 1], signs[i]))
    return brackets


def _a_bits(a, tol: float) -> int:
    return int(math.ceil(-math.log2(tol))) + int(math.log2(max(1.0, abs(float(a))))) + 24


def _refine(br: Bracket, k: int, b, xi, tol: float, policy) -> tuple:
    lo, hi, s_lo, s_hi = br.lo, br.hi, br.f_lo_sign, br.f_hi_sign
    bits = _a_bits(lo, tol)
    with with_bits(bits):
        lo, hi = mpfr(lo), mpfr(hi)
        mk = mpfr(-k)
    below = hi <= mk
    if lo < mk < hi:
        # Split at -k first; M(-k, b, xi) is a polynomial value, never ambiguous at b >= 1.
        s_mid = _sign(mk, b, xi, policy)
        if s_mid == s_hi:
            hi, s_hi = mk, s_mid
            below = True
        else:
            lo, s_lo = mk, s_mid
    width = tol * max(1.0, abs(float(lo)))
    while hi - lo > width:
        with with_bits(bits):
            mid = (lo + hi) / 2
        try:
            s_mid = _sign(mid, b, xi, policy)
        except AmbiguousSign:
            # Landed on the zero itself.
            return Bracket(lo, hi, s_lo, s_hi), mid, 0.0, bool(below or mid < mk)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    with with_bits(bits):
        a = (lo + hi) / 2
    residual = abs(float(kummer_m(KummerArgs(a, b, xi), policy)))
    return Bracket(lo, hi, s_lo, s_hi), a, residual, bool(below)


def find_azeros(
    b: float,
    xi: float,
    count: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    tol: float | None = None,
) -> list:
    """The ``count`` largest a-zeros of a -> M(a, b, xi), in decreasing order.

    ``tol`` (default ``policy.target_tol``) is the relative bracket width
    at which bisection stops. The scan step starts at 1/4 and is halved
    when the bracket count disagrees with the oscillation count.

    Raises
    ------
    BracketingFailure
        if the brackets cannot be reconciled with the oscillation count.
    """
    if not b >= 1:
        raise InvalidParams(f"b must be >= 1, got {b}")
    if not xi > 0:
        raise InvalidParams(f"xi must be > 0, got {xi}")
    if count < 1:
        raise InvalidParams("count must be >= 1")
    tol = policy.target_tol if tol is None else tol
    windows = search_windows(b, xi, count, policy)
    a_top = windows[0][1]
    a_floor = windows[-1][0]
    above_top = sign_changes_along_x(a_top, b, xi, policy, include_end=True)
    above_floor = sign_changes_along_x(a_floor, b, xi, policy, include_end=True)
    if above_top != 0 or above_floor < count:
        raise BracketingFailure(
            f"search windows hold {above_floor - above_top} zeros (expected >= {count}, "
            f"{above_top} above the top)"
        )
    step = SCAN_STEP
    for _ in range(MAX_HALVINGS + 1):
        brackets = _scan(windows, b, xi, step, policy)
        if len(brackets) == above_floor:
            break
        step /= 2
    else:
        raise BracketingFailure(
            f"found {len(brackets)} sign changes but the oscillation count is {above_floor}"
        )
    out = []
    for k, br in enumerate(brackets[:count]):
        bracket, a, res, below = _refine(br, k, b, xi, tol, policy)
        out.append(AZero(k, a, float(b), float(xi), bracket, res, below))
    return out


def spectrum_via_kummer(
    problem: SpectralProblem,
    kmax: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    tol: float | None = None,
) -> list:
    """Eigenvalues 0..kmax from the a-zeros, as EigenResult records."""
    zeros = find_azeros(problem.b, problem.xi, kmax + 1, policy, tol)
    out = []
    for z in zeros:
        half = z.bracket.width / 2
        out.append(
            EigenResult(
                k=z.k,
                nu=problem.nu,
                xi=problem.xi,
                lambda_=z.lambda_,
                a_zero=z.a,
                method=Method.KummerRoot,
                residual=z.refinement_residual,
                error_est=float(4 * problem.xi * half),
            )
        )
    return out
