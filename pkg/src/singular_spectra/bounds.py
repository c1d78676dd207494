"""Machine-checkable reports for the eigenvalue and a-zero inequalities.

Violations are data: every check returns a report and never raises because a
bound failed. Numbers that are not resolved by the certified accuracy of the
underlying computation are listed as inconclusive instead of passing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .azero import spectrum_via_kummer
from .params import SpectralProblem, mu
from .specfun.bessel import bessel_zero
from .specfun.precision import DEFAULT_POLICY, PrecisionPolicy

__all__ = [
    "BoundsReport",
    "DecayReport",
    "ReportEntry",
    "Violation",
    "bound_crossover",
    "solve_c",
    "verify_azero_bounds",
    "verify_bessel_window",
    "verify_exponential_gap",
    "verify_lower_bounds",
]

DEFAULT_DELTA = 0.1
LOW_REGIME_ENVELOPE = 0.01


@dataclass(frozen=True)
class Violation:
    k: int
    bound: str
    lhs: float
    rhs: float


@dataclass
class ReportEntry:
    nu: float
    xi: float
    kmax: int
    violations: list = field(default_factory=list)
    weak: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class BoundsReport:
    name: str
    entries: list = field(default_factory=list)

    @property
    def violations(self) -> list:
        return [(e.nu, e.xi, v) for e in self.entries for v in e.violations]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def merge(self, other: "BoundsReport") -> "BoundsReport":
        return BoundsReport(self.name, self.entries + other.entries)

    def as_records(self) -> list:
        rows = []
        for e in self.entries:
            rows.append(
                {
                    "report": self.name,
                    "nu": e.nu,
                    "xi": e.xi,
                    "kmax": e.kmax,
                    "violations": [vars(v) for v in e.violations],
                    "weak": list(e.weak),
                    "inconclusive": list(e.inconclusive),
                    "notes": list(e.notes),
                    "pass": e.passed,
                }
            )
        return rows


def solve_c(delta: float = DEFAULT_DELTA) -> float:
    """Positive root of (1 + delta) c^2 / 16 + c - pi^2 = 0."""
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    q = 1.0 + delta
    return 8.0 * (-1.0 + math.sqrt(1.0 + q * math.pi**2 / 4.0)) / q


def bound_crossover(c: float, nu: float, xi: float) -> int:
    """Smallest k >= 1 with c k^2 >= xi (4k + 2(1 + nu)).

    From there on the quadratic lower bound is the stronger of the two.
    """
    b = 1 + nu
    # c k^2 - 4 xi k - 2 xi b >= 0
    root = (4 * xi + math.sqrt(16 * xi * xi + 8 * c * xi * b)) / (2 * c)
    k = max(1, math.ceil(root))
    while k > 1 and c * (k - 1) ** 2 >= xi * mu(k - 1, nu):
        k -= 1
    while c * k * k < xi * mu(k, nu):
        k += 1
    return k


def _f(x) -> float:
    return float(x)


def verify_lower_bounds(
    results: list,
    problem: SpectralProblem,
    c: float | None = None,
    xi_check: float = 50.0,
) -> BoundsReport:
    """Check lambda/xi > mu_k for every result, and lambda >= c k^2 when xi >= xi_check.

    The first bound is tested as gap = -4 (a + k) > 0, which is the same
    inequality written in the a variable and loses no digits.
    """
    c = solve_c() if c is None else c
    entry = ReportEntry(problem.nu, problem.xi, max((r.k for r in results), default=-1))
    for r in results:
        if not r.gap > 0:
            entry.violations.append(Violation(r.k, "lambda/xi > mu_k", _f(r.lambda_tilde), mu(r.k, problem.nu)))
        if problem.xi >= xi_check:
            rhs = c * r.k * r.k
            if not r.lambda_ >= rhs:
                entry.violations.append(Violation(r.k, "lambda >= c k^2", _f(r.lambda_), rhs))
    if problem.xi < xi_check:
        entry.notes.append(f"quadratic bound skipped below xi = {xi_check:g}")
    return BoundsReport("lower_bounds", [entry])


@dataclass
class DecayReport:
    """Spectral gaps delta(xi, k) = lambda/xi - mu_k over an xi grid.

    ``fitted_rates`` holds, per k, the slope of log(delta) against xi. The
    report passes when every conclusive gap is positive, decreases strictly
    along the grid and every fitted slope is negative.
    """

    nu: float
    tau: float
    xi_grid: list
    k_list: list
    gaps: dict = field(default_factory=dict)
    gap_errors: dict = field(default_factory=dict)
    fitted_rates: dict = field(default_factory=dict)
    ratio_checks: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def fitted_rate(self) -> float:
        """The least negative per-k slope (the one closest to failing)."""
        return max(self.fitted_rates.values()) if self.fitted_rates else math.nan

    @property
    def passed(self) -> bool:
        return not self.violations and all(r < 0 for r in self.fitted_rates.values())

    def envelope(self, xi: float) -> float:
        """Largest conclusive gap at ``xi``; translates to a-zeros as a_k + k >= -gap/4."""
        vals = [float(g) for (x, _), g in self.gaps.items() if x == xi]
        return max(vals) if vals else math.nan

    def as_records(self) -> list:
        rows = []
        for (xi, k), g in sorted(self.gaps.items()):
            rows.append(
                {
                    "nu": self.nu,
                    "tau": self.tau,
                    "xi": xi,
                    "k": k,
                    "gap": g,
                    "gap_error": self.gap_errors[(xi, k)],
                    "inconclusive": (xi, k) in self.inconclusive,
                    "fitted_rate": self.fitted_rates.get(k, math.nan),
                }
            )
        return rows


def verify_exponential_gap(
    nu: float,
    tau: float,
    xi_grid: list,
    k_list: list | None = None,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    azero_tol: float = 1e-40,
) -> DecayReport:
    """Check that the gap lambda/xi - mu_k decays in xi for each k of the low regime.

    Only k <= floor(tau xi / 4) are evaluated at a given xi. The a-zeros are
    bisected to relative width ``azero_tol`` so that gaps far below double
    precision are still resolved; a gap that is not larger than its own
    bracket uncertainty is marked inconclusive.
    """
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    xi_grid = list(xi_grid)
    if len(xi_grid) < 2 or any(b <= a for a, b in zip(xi_grid, xi_grid[1:])):
        raise ValueError("xi_grid must be ascending with at least two points")
    if k_list is None:
        k_list = list(range(int(tau * xi_grid[0] / 4) + 1))
    rep = DecayReport(nu, tau, xi_grid, list(k_list))
    for xi in xi_grid:
        kcap = int(math.floor(tau * xi / 4))
        ks = [k for k in k_list if k <= kcap]
        if not ks:
            continue
        spec = spectrum_via_kummer(SpectralProblem(nu, xi), max(ks), policy, tol=azero_tol)
        for k in ks:
            r = spec[k]
            gap = r.gap
            err = r.error_est / xi  # error_est is in lambda units
            rep.gaps[(xi, k)] = gap
            rep.gap_errors[(xi, k)] = err
            if abs(gap) <= err:
                rep.inconclusive.append((xi, k))
            elif not gap > 0:
                rep.violations.append(Violation(k, "gap > 0", float(gap), 0.0))
    for k in k_list:
        series = [(xi, rep.gaps[(xi, k)]) for xi in xi_grid if (xi, k) in rep.gaps and (xi, k) not in rep.inconclusive]
        for (x0, g0), (x1, g1) in zip(series, series[1:]):
            ratio = float(g1 / g0) if g0 > 0 else math.nan
            ok = g1 < g0
            rep.ratio_checks.append({"k": k, "xi0": x0, "xi1": x1, "ratio": ratio, "ok": bool(ok)})
            if not ok:
                rep.violations.append(Violation(k, f"gap decreasing {x0:g}->{x1:g}", float(g1), float(g0)))
        positive = [(x, g) for x, g in series if g > 0]
        if len(positive) >= 2:
            xs = np.array([x for x, _ in positive], dtype=float)
            ys = np.array([float(gmpy2.log(g)) for _, g in positive])
            rep.fitted_rates[k] = float(np.polyfit(xs, ys, 1)[0])
    return rep


def verify_bessel_window(
    results: list,
    problem: SpectralProblem,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> BoundsReport:
    """Check |lambda_k - j_{nu,k}^2| <= xi^2 for every result.

    Entries with xi^2 > lambda_k are listed as weak: the window then says
    less than lambda_k > 0. At nu = 1/2 the zeros (k + 1) pi are used exactly.
    """
    entry = ReportEntry(problem.nu, problem.xi, max((r.k for r in results), default=-1))
    xi2 = problem.xi**2
    for r in results:
        if problem.nu == 0.5:
            with gmpy2.context(precision=256):
                j = (r.k + 1) * gmpy2.const_pi()
        else:
            j = bessel_zero(problem.nu, r.k, policy)
        diff = r.lambda_ - j * j
        if not abs(diff) <= xi2:
            entry.violations.append(Violation(r.k, "|lambda - j^2| <= xi^2", float(abs(diff)), xi2))
        if xi2 > r.lambda_:
            entry.weak.append(r.k)
    return BoundsReport("bessel_window", [entry])


def verify_azero_bounds(
    azeros: list,
    b: float,
    xi: float,
    c: float | None = None,
    tau: float = 0.5,
    envelope: float = LOW_REGIME_ENVELOPE,
    xi_large: float = 50.0,
) -> BoundsReport:
    """Check the ordering and localization of a-zeros.

    * a_0 > a_1 > ... and a_k < -k (the latter certified by the bracket);
    * a_k <= -c k^2 / (4 xi) + b/2 when xi >= xi_large; indices where this
      is implied by a_k < -k are listed as weak (trivially satisfied);
    * -k - envelope <= a_k for k <= floor(tau xi / 4).
    """
    c = solve_c() if c is None else c
    entry = ReportEntry(b - 1, xi, max((z.k for z in azeros), default=-1))
    for prev, cur in zip(azeros, azeros[1:]):
        if not cur.a < prev.a:
            entry.violations.append(Violation(cur.k, "a_k decreasing", float(cur.a), float(prev.a)))
    kcap = int(math.floor(tau * xi / 4))
    for z in azeros:
        k = z.k
        if not (z.below_minus_k and z.a < -k):
            entry.violations.append(Violation(k, "a_k < -k", float(z.a), float(-k)))
        if xi >= xi_large:
            rhs = -c * k * k / (4 * xi) + b / 2
            if not z.a <= rhs:
                entry.violations.append(Violation(k, "a_k <= -c k^2/(4 xi) + b/2", float(z.a), rhs))
            if rhs >= -k:
                entry.weak.append(k)
        if k <= kcap and not z.a + k >= -envelope:
            entry.violations.append(Violation(k, "a_k + k >= -envelope", float(z.a + k), -envelope))
    if xi < xi_large:
        entry.notes.append(f"quadratic a-zero bound skipped below xi = {xi_large:g}")
    return BoundsReport("azero_bounds", [entry])
