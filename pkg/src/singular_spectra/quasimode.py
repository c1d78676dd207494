"""Half-line eigenfunctions, boundary-corrected quasi-modes and their residuals.

Phi_k(x) = exp(-x^2/2) x^(1/2+nu) M(-k, 1+nu, x^2) solves
(-d^2/dx^2 + x^2 + (nu^2 - 1/4)/x^2) Phi_k = mu_k Phi_k on (0, inf). On the
dilated interval (0, sqrt(xi)) the trial function

    phi(x) = Phi_k(x) - c x^(1/2+nu),   c = Phi_k(sqrt(xi)) / xi^(1/4+nu/2),

vanishes at both ends. Since the operator maps x^(1/2+nu) to x^(5/2+nu),

    (G - mu_k) phi = -c (x^(5/2+nu) - mu_k x^(1/2+nu)),

whose L2 norm on (0, sqrt(xi)) has a closed form. The quotient of that norm
by ||phi|| bounds the distance from mu_k to the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .azero import spectrum_via_kummer
from .errors import InsufficientPrecision, InvalidParams
from .params import SpectralProblem, mu
from .specfun.precision import DEFAULT_POLICY, PrecisionPolicy, with_bits

__all__ = [
    "QuasimodeReport",
    "boundary_decay_check",
    "gauss_legendre",
    "norm_lower_check",
    "phi",
    "phi_array",
    "phi_norm_sq_domain",
    "phi_norm_sq_halfline",
    "phi_norm_sq_quadrature",
    "quasimode_coefficient",
    "quasimode_norm",
    "quasimode_residual",
    "quasimode_value",
    "residual_norm",
    "residual_norm_monomial",
    "spectral_distance_quotient",
]

PHI_BITS = 192
GL_ORDER = 24


def phi(k: int, nu: float, x, bits: int = PHI_BITS) -> mpfr:
    """Phi_k(x) = exp(-x^2/2) x^(1/2+nu) k!/(1+nu)_k L_k^(nu)(x^2), in mpfr.

    The polynomial factor P_k = M(-k, 1+nu, x^2) is run through
    P_{j+1} = ((2j + 1 + nu - x^2) P_j - j P_{j-1}) / (1 + nu + j).
    """
    if k < 0:
        raise InvalidParams("k must be >= 0")
    with with_bits(bits):
        x = mpfr(x)
        if x < 0:
            raise InvalidParams("phi is defined for x >= 0")
        if gmpy2.is_zero(x):
            return mpfr(0)
        nu_m = mpfr(nu)
        r = x * x
        prev, cur = mpfr(0), mpfr(1)
        for j in range(k):
            prev, cur = cur, ((2 * j + 1 + nu_m - r) * cur - j * prev) / (1 + nu_m + j)
        return gmpy2.exp(-r / 2) * x ** (mpfr(0.5) + nu_m) * cur


def phi_array(k: int, nu: float, x: np.ndarray) -> np.ndarray:
    """Vectorized double-precision Phi_k, for quadrature."""
    x = np.asarray(x, dtype=float)
    r = x * x
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 + nu - r) * cur - j * prev) / (1 + nu + j)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(-r / 2) * np.power(x, 0.5 + nu) * cur
    return np.where(x > 0, out, 0.0)


def phi_norm_sq_halfline(k: int, nu: float) -> float:
    """Gamma(nu + 1)/2 * k!/(1 + nu)_k, the squared L2 norm of Phi_k on (0, inf)."""
    ratio = 1.0
    for j in range(1, k + 1):
        ratio *= j / (nu + j)
    return math.gamma(nu + 1) / 2 * ratio


def gauss_legendre(f, a: float, b: float, panels: int = 16, order: int = GL_ORDER, grade: bool = False) -> float:
    """Composite Gauss-Legendre quadrature of a vectorized f over [a, b].

    With ``grade`` the panel edges are geometrically refined towards ``a``,
    which keeps the rule accurate for integrands behaving like (x-a)^p with
    non-integer p.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    if grade:
        inner = [a + (b - a) * 2.0 ** (-j) for j in range(40, 0, -1)]
        edges = np.concatenate([[a], inner, np.linspace(a + (b - a) / 2, b, panels + 1)])
    else:
        edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        total += half * float(np.dot(weights, f(mid + half * nodes)))
    return total


def _needs_grading(nu: float) -> bool:
    # Phi_k^2 ~ x^(1+2nu) at the origin; smooth only for integer 1 + 2nu.
    return not float(1 + 2 * nu).is_integer()


def quasimode_coefficient(problem: SpectralProblem, k: int, bits: int = PHI_BITS) -> mpfr:
    """c = Phi_k(sqrt(xi)) / xi^(1/4 + nu/2)."""
    with with_bits(bits):
        root = gmpy2.sqrt(mpfr(problem.xi))
        return phi(k, problem.nu, root, bits) / mpfr(problem.xi) ** (mpfr(0.25) + mpfr(problem.nu) / 2)


def quasimode_value(problem: SpectralProblem, k: int, x, bits: int = PHI_BITS) -> mpfr:
    """phi_{xi,k}(x) = Phi_k(x) - x^(1/2+nu) Phi_k(sqrt(xi)) / xi^(1/4+nu/2)."""
    if not 0 <= float(x) <= math.sqrt(problem.xi) * (1 + 1e-15):
        raise InvalidParams("x must lie in [0, sqrt(xi)]")
    c = quasimode_coefficient(problem, k, bits)
    with with_bits(bits):
        xm = mpfr(x)
        if gmpy2.is_zero(xm):
            return mpfr(0)
        return phi(k, problem.nu, xm, bits) - c * xm ** (mpfr(0.5) + mpfr(problem.nu))


def quasimode_residual(problem: SpectralProblem, k: int, x, bits: int = PHI_BITS) -> mpfr:
    """(G - mu_k) phi_{xi,k} at x, in closed form: -c (x^(5/2+nu) - mu_k x^(1/2+nu))."""
    c = quasimode_coefficient(problem, k, bits)
    with with_bits(bits):
        xm = mpfr(x)
        p = mpfr(0.5) + mpfr(problem.nu)
        return -c * (xm ** (p + 2) - mu(k, problem.nu) * xm**p)


def residual_norm(problem: SpectralProblem, k: int, bits: int = PHI_BITS) -> mpfr:
    """||(G - mu_k) phi_{xi,k}|| on (0, sqrt(xi)), exact.

    With L = sqrt(xi), s = 2 + 2 nu and m = mu_k the square is
    c^2 (L^(s+4)/(s+4) - 2 m L^(s+2)/(s+2) + m^2 L^s / s).
    """
    c = quasimode_coefficient(problem, k, bits)
    with with_bits(bits):
        xi = mpfr(problem.xi)
        s = 2 + 2 * mpfr(problem.nu)
        m = mpfr(mu(k, problem.nu))
        half = s / 2
        sq = xi ** (half + 2) / (s + 4) - 2 * m * xi ** (half + 1) / (s + 2) + m * m * xi**half / s
        return abs(c) * gmpy2.sqrt(sq)


def residual_norm_monomial(problem: SpectralProblem, k: int, bits: int = PHI_BITS) -> mpfr:
    """|c| ||x^(5/2+nu)|| on (0, sqrt(xi)) = |c| sqrt(xi^(3+nu) / (6 + 2 nu)).

    This is the norm of the x^(5/2+nu) part of the residual alone. It is
    larger than :func:`residual_norm` whenever mu_k <= xi, so it is also an
    admissible numerator for the distance bound in that range.
    """
    c = quasimode_coefficient(problem, k, bits)
    with with_bits(bits):
        xi = mpfr(problem.xi)
        nu = mpfr(problem.nu)
        return abs(c) * gmpy2.sqrt(xi ** (3 + nu) / (6 + 2 * nu))


def quasimode_norm(problem: SpectralProblem, k: int, panels: int = 32) -> float:
    """||phi_{xi,k}|| on (0, sqrt(xi)) by Gauss-Legendre quadrature."""
    c = float(quasimode_coefficient(problem, k))
    p = 0.5 + problem.nu

    def f(x):
        return (phi_array(k, problem.nu, x) - c * np.power(x, p)) ** 2

    return math.sqrt(gauss_legendre(f, 0.0, math.sqrt(problem.xi), panels, grade=_needs_grading(problem.nu)))


def phi_norm_sq_domain(k: int, nu: float, xi: float, panels: int = 32) -> float:
    """Integral of Phi_k^2 over (0, sqrt(xi))."""
    return gauss_legendre(lambda x: phi_array(k, nu, x) ** 2, 0.0, math.sqrt(xi), panels, grade=_needs_grading(nu))


def phi_norm_sq_quadrature(k: int, nu: float, panels: int = 64) -> float:
    """Integral of Phi_k^2 over (0, sqrt(mu_k) + 12), which holds all but e^-100 of the mass."""
    cut = math.sqrt(mu(k, nu)) + 12.0
    return gauss_legendre(lambda x: phi_array(k, nu, x) ** 2, 0.0, cut, panels, grade=_needs_grading(nu))


@dataclass
class QuasimodeReport:
    nu: float
    xi: float
    k: int
    phi_boundary: float
    phi_norm_sq_domain: float
    quotient: float
    quotient_monomial: float
    spectral_dist: object
    inconclusive: bool = False
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        """dist(mu_k, spectrum) <= quotient, using the eigenvalue with the same index."""
        return bool(self.spectral_dist <= self.quotient)

    def as_record(self) -> dict:
        return {
            "nu": self.nu,
            "xi": self.xi,
            "k": self.k,
            "phi_boundary": self.phi_boundary,
            "phi_norm_sq_domain": self.phi_norm_sq_domain,
            "quotient": self.quotient,
            "quotient_monomial": self.quotient_monomial,
            "spectral_dist": float(self.spectral_dist),
            "holds": self.holds,
            "inconclusive": self.inconclusive,
        }


def spectral_distance_quotient(
    problem: SpectralProblem,
    k: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    spectrum: list | None = None,
    azero_tol: float = 1e-40,
) -> QuasimodeReport:
    """Residual quotient of the quasi-mode and the true distance |lambda_k/xi - mu_k|.

    ``spectrum`` may pass precomputed KummerRoot results; otherwise they are
    computed with a-zeros resolved to ``azero_tol``.
    """
    if spectrum is None or len(spectrum) <= k:
        spectrum = spectrum_via_kummer(problem, k, policy, tol=azero_tol)
    boundary = phi(k, problem.nu, math.sqrt(problem.xi))
    if gmpy2.is_zero(boundary):
        raise InsufficientPrecision("Phi_k(sqrt(xi)) underflowed")
    norm = quasimode_norm(problem, k)
    num = residual_norm(problem, k)
    num_mono = residual_norm_monomial(problem, k)
    dist = abs(spectrum[k].gap)
    gap_err = spectrum[k].error_est / problem.xi
    rep = QuasimodeReport(
        nu=problem.nu,
        xi=problem.xi,
        k=k,
        phi_boundary=float(boundary),
        phi_norm_sq_domain=phi_norm_sq_domain(k, problem.nu, problem.xi),
        quotient=float(num) / norm,
        quotient_monomial=float(num_mono) / norm,
        spectral_dist=dist,
    )
    if dist <= gap_err:
        rep.inconclusive = True
        rep.notes.append("spectral distance below the certified accuracy of the eigenvalue")
    return rep


def _fit_slope(xs, ys) -> float:
    return float(np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)[0])


def boundary_decay_check(
    nu: float,
    tau: float,
    xi_grid: list,
    k_list: list,
    samples: int = 8,
) -> dict:
    """Decay of |Phi_k(sqrt(xi))| along the xi grid, for k <= floor(tau xi / 4).

    Also checks, for every xi and k < floor(tau xi / 4), that
    |Phi_{k+1}(x)| >= |Phi_k(x)| and sign Phi_k(x) = (-1)^k on sample points
    x in [sqrt(xi), 2 sqrt(xi)].
    """
    values = {}
    failures = []
    for xi in xi_grid:
        kcap = int(math.floor(tau * xi / 4))
        for k in k_list:
            if k <= kcap:
                values[(xi, k)] = abs(phi(k, nu, math.sqrt(xi)))
        root = math.sqrt(xi)
        for j in range(samples):
            x = root * (1 + j / samples)
            vals = [phi(k, nu, x) for k in range(kcap + 1)]
            for k, v in enumerate(vals):
                if (v > 0) != (k % 2 == 0):
                    failures.append({"check": "sign", "xi": xi, "k": k, "x": x})
            for k in range(kcap):
                if abs(vals[k + 1]) < abs(vals[k]):
                    failures.append({"check": "|Phi_k+1| >= |Phi_k|", "xi": xi, "k": k, "x": x})
    rates = {}
    for k in k_list:
        series = [(xi, values[(xi, k)]) for xi in xi_grid if (xi, k) in values]
        for (x0, v0), (x1, v1) in zip(series, series[1:]):
            if not v1 < v0:
                failures.append({"check": "decreasing", "k": k, "xi0": x0, "xi1": x1})
        if len(series) >= 2:
            rates[k] = _fit_slope([s[0] for s in series], [float(gmpy2.log(s[1])) for s in series])
            if not rates[k] < 0:
                failures.append({"check": "fitted rate", "k": k, "rate": rates[k]})
    return {
        "nu": nu,
        "tau": tau,
        "values": {key: float(v) for key, v in values.items()},
        "fitted_rates": {k: float(v) for k, v in rates.items()},
        "failures": failures,
        "pass": not failures,
    }


def norm_lower_check(nu: float, xi_grid: list, k_list: list, delta: float) -> dict:
    """Compare the integral of Phi_k^2 over (0, sqrt(xi)) with (1 - delta) times its half-line value.

    Entries with k > floor(xi / 4) are skipped.
    """
    rows = []
    for xi in xi_grid:
        for k in k_list:
            if k > xi // 4:
                continue
            dom = float(phi_norm_sq_domain(k, nu, xi))
            full = float(phi_norm_sq_halfline(k, nu))
            rows.append(
                {
                    "xi": xi,
                    "k": k,
                    "domain": dom,
                    "halfline": full,
                    "ratio": dom / full,
                    "pass": bool(dom >= (1 - delta) * full),
                }
            )
    return {"nu": nu, "delta": delta, "entries": rows, "pass": all(r["pass"] for r in rows)}
