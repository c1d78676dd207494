"""Finite-volume eigenvalues, closed-form eigenfunctions and oscillation counts.

The discretized operator is the dilated one, -d^2/dy^2 + y^2 + (nu^2 - 1/4)/y^2
on (0, sqrt(xi)), whose eigenvalues are lambda/xi. Two schemes are available:

* ``Scheme.Weighted`` writes u = y^(1/2+nu) w, which turns the equation into
  -(y^s w')' + y^(s+2) w = (lambda/xi) y^s w with s = 1 + 2 nu. A cell-centred
  finite-volume discretization with exact cell integrals needs no boundary
  condition at y = 0 (the flux weight vanishes there) and selects the
  Friedrichs extension for every nu >= 0, including nu = 0.
* ``Scheme.Plain`` is the three-point Laplacian on the same half-cell grid
  with an odd reflection u_{-1} = -u_0 at the origin. It converges only for
  nu >= 1/2 and carries a downgraded tolerance for 0 < nu < 1/2.

Both give symmetric tridiagonal matrices. Eigenvalues are computed by LAPACK
bisection and then certified by counting sign changes of the Sturm sequence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpfr
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceFailure, GridTooCoarse, InvalidParams, NotApplicable
from .params import SpectralProblem, a_to_kappa, a_to_lambda, lambda_to_a, mu
from .specfun.kummer import KummerArgs, kummer_m, kummer_m_scaled, sign_of
from .specfun.precision import DEFAULT_POLICY, PrecisionPolicy, with_bits

__all__ = [
    "EigenResult",
    "Grid",
    "Method",
    "Scheme",
    "SpectralProblem",
    "a_to_kappa",
    "a_to_lambda",
    "eigen_fd",
    "eigen_fd_unit_interval",
    "eigenfunction",
    "lambda_to_a",
    "mu",
    "oscillation_index",
    "sign_changes_along_x",
    "sturm_count",
]

DEFAULT_POINTS = 8000
PLAIN_LOW_NU_TOL = 1e-3


class Method(enum.Enum):
    KummerRoot = "KummerRoot"
    FiniteDifference = "FiniteDifference"


class Scheme(enum.Enum):
    Weighted = "weighted"
    Plain = "plain"


@dataclass(frozen=True)
class Grid:
    """Half-cell grid y_j = (j + 1/2) h, j = 0..n_points-1, on (0, length).

    h = length / (n_points + 1/2), so the Dirichlet point y = length sits
    half a cell past the last unknown and no unknown lives at y = 0.
    """

    n_points: int = DEFAULT_POINTS
    length: float = 1.0

    def __post_init__(self) -> None:
        if self.n_points < 64:
            raise InvalidParams(f"grid needs at least 64 points, got {self.n_points}")
        if not self.length > 0:
            raise InvalidParams("grid length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / (self.n_points + 0.5)

    @property
    def offset(self) -> float:
        return 0.5 * self.spacing

    def points(self) -> np.ndarray:
        return (np.arange(self.n_points) + 0.5) * self.spacing

    def refined(self) -> "Grid":
        return Grid(2 * self.n_points, self.length)

    @classmethod
    def for_problem(cls, problem: SpectralProblem, n_points: int = DEFAULT_POINTS) -> "Grid":
        return cls(n_points, math.sqrt(problem.xi))


@dataclass
class EigenResult:
    """One eigenvalue of the operator on (0, 1) and the matching a-zero.

    ``lambda_`` and ``a_zero`` are mpfr numbers for the Kummer method and
    floats for finite differences. ``residual`` is |M(a, b, xi)| at the
    returned a for KummerRoot and the half-width of the Sturm-certified
    interval (in lambda units) for FiniteDifference.
    """

    k: int
    nu: float
    xi: float
    lambda_: object
    a_zero: object
    method: Method
    residual: float = 0.0
    error_est: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def lambda_tilde(self):
        return self.lambda_ / self.xi

    @property
    def kappa_zero(self):
        return a_to_kappa(self.a_zero, 1 + self.nu)

    @property
    def gap(self):
        """lambda/xi - mu_k, computed as -4 (a + k) so no digits are lost."""
        return -4 * (self.a_zero + self.k)

    def as_record(self) -> dict:
        return {
            "k": self.k,
            "nu": self.nu,
            "xi": self.xi,
            "lambda": self.lambda_,
            "lambda_tilde": self.lambda_tilde,
            "a_zero": self.a_zero,
            "kappa_zero": self.kappa_zero,
            "gap": self.gap,
            "method": self.method.value,
            "residual": self.residual,
            "error_est": self.error_est,
        }


def _weighted_matrix(nu: float, length: float, n: int, omega2: float = 1.0):
    # -(y^s w')' + omega2 y^(s+2) w = E y^s w on cells [j h, (j+1) h],
    # w = 0 half a cell beyond the last centre; symmetrized by the cell masses.
    h = length / (n + 0.5)
    s = 1.0 + 2.0 * nu
    edges = np.arange(n + 1) * h
    mass = (edges[1:] ** (s + 1) - edges[:-1] ** (s + 1)) / (s + 1)
    pot = omega2 * (edges[1:] ** (s + 3) - edges[:-1] ** (s + 3)) / (s + 3)
    flux = edges**s / h
    diag = flux[:-1] + flux[1:] + pot
    off = -flux[1:-1]
    root = np.sqrt(mass)
    return diag / mass, off / (root[:-1] * root[1:])


def _plain_matrix(nu: float, length: float, n: int, omega2: float = 1.0):
    h = length / (n + 0.5)
    y = (np.arange(n) + 0.5) * h
    diag = 2.0 / h**2 + omega2 * y**2 + (nu * nu - 0.25) / y**2
    diag[0] += 1.0 / h**2
    off = -np.ones(n - 1) / h**2
    return diag, off


def sturm_count(diag: np.ndarray, off: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    e2 = off * off
    for i in range(len(diag)):
        q = diag[i] - x - (e2[i - 1] / q if i > 0 else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def _lowest(diag, off, kmax: int, certify: bool) -> tuple:
    vals = eigh_tridiagonal(
        diag, off, eigvals_only=True, select="i", select_range=(0, kmax), lapack_driver="stebz"
    )
    widths = np.zeros_like(vals)
    if certify:
        # Backward-stable Sturm counts are exact only up to eps * ||T||.
        floor = 64 * np.finfo(float).eps * (np.max(np.abs(diag)) + 2 * np.max(np.abs(off), initial=0.0))
        for k, v in enumerate(vals):
            w = max(1e-12 * abs(v), floor)
            lo = v - w
            hi = v + w
            # Neighbours are far apart compared with w; widen if rounding still bites.
            for _ in range(4):
                if sturm_count(diag, off, lo) == k and sturm_count(diag, off, hi) == k + 1:
                    break
                w *= 16
                lo, hi = v - w, v + w
            else:
                raise ConvergenceFailure(f"Sturm count does not confirm eigenvalue index {k}")
            widths[k] = w
    return vals, widths


def _check_scheme(nu: float, scheme: Scheme, tol: float) -> float:
    scheme = Scheme(scheme)
    if scheme is Scheme.Plain and nu < 0.5:
        if nu == 0:
            raise NotApplicable(
                "the plain scheme does not converge at nu = 0; use Scheme.Weighted"
            )
        return max(tol, PLAIN_LOW_NU_TOL)
    return tol


def eigen_fd(
    problem: SpectralProblem,
    kmax: int,
    grid: Grid | None = None,
    tol: float = 1e-6,
    scheme: Scheme = Scheme.Weighted,
    certify: bool = True,
) -> list:
    """The kmax + 1 lowest eigenvalues of the operator on (0, 1) by finite volumes.

    The dilated problem is solved on ``grid`` and on the grid with twice the
    points; the two results are Richardson-extrapolated and the difference
    ``|lambda_2N - lambda_N| / 3`` is reported as ``error_est``.

    Raises
    ------
    GridTooCoarse
        if ``error_est / lambda`` exceeds ``tol`` for some k, or if
        kmax is too large for the grid to resolve.
    NotApplicable
        for the plain scheme at nu = 0.
    """
    if kmax < 0:
        raise InvalidParams("kmax must be >= 0")
    if grid is None:
        grid = Grid.for_problem(problem)
    if abs(grid.length - math.sqrt(problem.xi)) > 1e-12 * grid.length:
        raise InvalidParams("grid length must equal sqrt(xi) for the dilated problem")
    tol = _check_scheme(problem.nu, scheme, tol)
    if grid.n_points < 20 * (kmax + 1):
        raise GridTooCoarse(f"{grid.n_points} points cannot resolve {kmax + 1} eigenfunctions")
    build = _weighted_matrix if Scheme(scheme) is Scheme.Weighted else _plain_matrix
    coarse, _ = _lowest(*build(problem.nu, grid.length, grid.n_points), kmax, False)
    fine, widths = _lowest(*build(problem.nu, grid.length, 2 * grid.n_points), kmax, certify)
    return _assemble(problem, coarse, fine, widths, problem.xi, tol, scheme)


def eigen_fd_unit_interval(
    problem: SpectralProblem,
    kmax: int,
    n_points: int = DEFAULT_POINTS,
    tol: float = 1e-6,
    scheme: Scheme = Scheme.Weighted,
) -> list:
    """Same as :func:`eigen_fd` but discretizing the undilated operator on (0, 1).

    Used to cross-check the dilation: no rescaling by xi is involved here.
    """
    tol = _check_scheme(problem.nu, scheme, tol)
    build = _weighted_matrix if Scheme(scheme) is Scheme.Weighted else _plain_matrix
    omega2 = problem.xi**2
    coarse, _ = _lowest(*build(problem.nu, 1.0, n_points, omega2), kmax, False)
    fine, widths = _lowest(*build(problem.nu, 1.0, 2 * n_points, omega2), kmax, True)
    return _assemble(problem, coarse, fine, widths, 1.0, tol, scheme)


def _assemble(problem, coarse, fine, widths, factor, tol, scheme) -> list:
    out = []
    for k in range(len(fine)):
        lam = float(factor * (4.0 * fine[k] - coarse[k]) / 3.0)
        err = float(factor * abs(fine[k] - coarse[k]) / 3.0)
        if err > tol * abs(lam):
            raise GridTooCoarse(
                f"k={k}: extrapolation difference {err:.3e} exceeds tol {tol:g} relative"
            )
        res = EigenResult(
            k=k,
            nu=problem.nu,
            xi=problem.xi,
            lambda_=lam,
            a_zero=lambda_to_a(lam, problem.nu, problem.xi),
            method=Method.FiniteDifference,
            residual=float(factor * widths[k]),
            error_est=err,
        )
        if Scheme(scheme) is Scheme.Plain and problem.nu < 0.5:
            res.notes.append(f"plain scheme below nu=1/2: accuracy downgraded to {PLAIN_LOW_NU_TOL:g}")
        out.append(res)
    return out


def eigenfunction(problem: SpectralProblem, a_zero, x, policy: PrecisionPolicy = DEFAULT_POLICY):
    """g(x) = exp(-xi x^2 / 2) x^(1/2 + nu) M(a_zero, 1 + nu, xi x^2), unnormalized."""
    if not 0 <= x <= 1:
        raise InvalidParams(f"x must lie in [0, 1], got {x}")
    if x == 0:
        return mpfr(0)
    z = problem.xi * x * x
    m = kummer_m(KummerArgs(a_zero, problem.b, z), policy)
    with with_bits(max(m.precision, 64)):
        xm = mpfr(x)
        return gmpy2.exp(-mpfr(z) / 2) * xm ** (mpfr(0.5) + mpfr(problem.nu)) * m


def _default_samples(a, nu, xi) -> int:
    # At least eight samples per half-wavelength pi / sqrt(lambda).
    lam = max(float(a_to_lambda(a, nu, xi)), 1.0)
    return int(8 * math.sqrt(lam) / math.pi) + 64


def sign_changes_along_x(
    a,
    b: float,
    xi: float,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    n_points: int | None = None,
    include_end: bool = False,
) -> int:
    """Sign changes of x -> M(a, b, xi x^2) on the uniform grid j/n_points.

    ``include_end`` adds the sample at x = 1; leave it off when ``a`` is an
    a-zero, where M(a, b, xi) is zero up to rounding.
    """
    if n_points is None:
        n_points = _default_samples(a, b - 1, xi)
    last = n_points if include_end else n_points - 1
    signs = []
    for j in range(1, last + 1):
        x = j / n_points
        value, scale = kummer_m_scaled(a, b, xi * x * x, policy)
        signs.append(sign_of(value, scale, policy))
    return sum(1 for s0, s1 in zip(signs, signs[1:]) if s0 != s1)


def oscillation_index(
    problem: SpectralProblem,
    a_zero,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    n_points: int | None = None,
) -> int:
    """Interior sign changes of x -> M(a_zero, b, xi x^2) on (0, 1).

    For an a-zero this is the index k of the eigenvalue it belongs to.
    """
    return sign_changes_along_x(a_zero, problem.b, problem.xi, policy, n_points, include_end=False)

