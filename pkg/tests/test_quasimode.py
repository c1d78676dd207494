import math

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from singular_spectra.errors import InvalidParams
from singular_spectra.params import SpectralProblem, mu
from singular_spectra.quasimode import (
    boundary_decay_check,
    gauss_legendre,
    norm_lower_check,
    phi,
    phi_array,
    phi_norm_sq_domain,
    phi_norm_sq_halfline,
    phi_norm_sq_quadrature,
    quasimode_coefficient,
    quasimode_residual,
    quasimode_value,
    residual_norm,
    residual_norm_monomial,
    spectral_distance_quotient,
)


def _operator_residual(k, nu, x, h="1e-12"):
    # (-d2 + x^2 + (nu^2 - 1/4)/x^2 - mu_k) Phi_k at x by central differences in 300 bits.
    with gmpy2.context(precision=300):
        x, h = mpfr(x), mpfr(h)
        f = lambda t: phi(k, nu, t, bits=300)
        d2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)
        pot = x * x + (mpfr(nu) ** 2 - mpfr(0.25)) / (x * x)
        res = -d2 + (pot - mu(k, nu)) * f(x)
        scale = abs(d2) + abs(pot * f(x)) + mu(k, nu) * abs(f(x))
    return abs(res), scale


def test_phi_low_orders():
    for nu in (0.0, 0.5, 2.0):
        for x in (0.3, 1.0, 2.2):
            ground = math.exp(-x * x / 2) * x ** (0.5 + nu)
            assert float(phi(0, nu, x)) == pytest.approx(ground, rel=1e-14)
            assert float(phi(1, nu, x)) == pytest.approx(ground * (1 - x * x / (1 + nu)), rel=1e-13)
    assert phi(3, 1.0, 0) == 0
    with pytest.raises(InvalidParams):
        phi(-1, 0.0, 1.0)


@pytest.mark.parametrize("k,nu", [(0, 0.0), (3, 0.5), (7, 2.0), (12, 1.0)])
def test_phi_solves_half_line_equation(k, nu):
    for x in (0.4, 1.3, 2.9, 4.5):
        res, scale = _operator_residual(k, nu, x)
        assert res <= 1e-10 * scale


def test_phi_array_matches_mpfr():
    xs = np.linspace(0.01, 7, 50)
    for k, nu in [(0, 0.0), (5, 0.5), (10, 2.0)]:
        ref = np.array([float(phi(k, nu, x)) for x in xs])
        assert np.allclose(phi_array(k, nu, xs), ref, rtol=1e-11, atol=1e-14)


def test_halfline_norm_closed_form():
    assert phi_norm_sq_halfline(4, 1.0) == pytest.approx(0.1)
    for k in range(12):
        assert phi_norm_sq_halfline(k, 0.0) == pytest.approx(0.5, rel=1e-15)


@settings(max_examples=15, deadline=None)
@given(k=st.integers(0, 10), nu=st.sampled_from([0.0, 0.5, 1.0, 2.0, 0.3]))
def test_halfline_norm_quadrature(k, nu):
    assert phi_norm_sq_quadrature(k, nu) == pytest.approx(phi_norm_sq_halfline(k, nu), rel=1e-8)


def test_quadrature_self_consistency():
    for k, nu, xi in [(3, 0.0, 20.0), (2, 0.3, 16.0), (5, 2.0, 36.0)]:
        a = phi_norm_sq_domain(k, nu, xi, panels=32)
        b = phi_norm_sq_domain(k, nu, xi, panels=64)
        assert abs(a - b) <= 1e-10 * b


def test_gauss_legendre_graded_power():
    f = lambda x: np.power(x, 1.6)
    assert gauss_legendre(f, 0.0, 2.0, grade=True) == pytest.approx(2.0**2.6 / 2.6, rel=1e-12)


def test_domain_norm_below_halfline():
    for k in range(6):
        for xi in (4.0, 16.0, 36.0):
            assert phi_norm_sq_domain(k, 0.5, xi) <= phi_norm_sq_halfline(k, 0.5) * (1 + 1e-13)


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.0])
def test_largest_root_bound(nu):
    for k in range(1, 21):
        bound = 2 * k + 1 + nu + math.sqrt((2 * k + 1 + nu) ** 2 + 0.25 - nu * nu)
        f = lambda x: float(phi(k, nu, x) * gmpy2.exp(mpfr(x) ** 2 / 2))
        # the polynomial factor keeps the sign (-1)^k beyond the largest root
        xs = np.linspace(0.05, math.sqrt(bound) + 2, 4000)
        vals = [f(x) for x in xs]
        roots = [brentq(f, xs[i], xs[i + 1]) for i in range(len(xs) - 1) if vals[i] * vals[i + 1] < 0]
        assert len(roots) == k
        assert roots[-1] ** 2 < bound


def test_phi_decreasing_beyond_turning_point():
    delta = 0.1
    for k in (0, 2, 5):
        start = math.sqrt((1 + delta) * mu(k, 0.0)) + 0.5
        xs = np.linspace(start, start + 6, 40)
        vals = [abs(float(phi(k, 0.0, x))) for x in xs]
        assert all(b < a for a, b in zip(vals, vals[1:]))


# ---- quasi-mode


def test_quasimode_vanishes_at_both_ends():
    p = SpectralProblem(0.5, 25.0)
    for k in range(4):
        assert quasimode_value(p, k, 0.0) == 0
        assert abs(quasimode_value(p, k, 5.0)) < 1e-50
    with pytest.raises(InvalidParams):
        quasimode_value(p, 0, 5.1)


def test_quasimode_residual_identity():
    # the operator applied to phi_{xi,k} by finite differences equals the closed form
    p = SpectralProblem(0.5, 16.0)
    k = 2
    with gmpy2.context(precision=300):
        for x in ("0.7", "1.9", "3.3"):
            xm, h = mpfr(x), mpfr("1e-12")
            f = lambda t: quasimode_value(p, k, t, bits=300)
            d2 = (f(xm + h) - 2 * f(xm) + f(xm - h)) / (h * h)
            pot = xm * xm + (mpfr(p.nu) ** 2 - mpfr(0.25)) / (xm * xm)
            lhs = -d2 + (pot - mu(k, p.nu)) * f(xm)
            rhs = quasimode_residual(p, k, xm, bits=300)
            assert abs(lhs - rhs) <= 1e-8 * abs(rhs)


def test_residual_norm_closed_form_vs_quadrature():
    p = SpectralProblem(1.0, 20.0)
    for k in range(3):
        f = lambda x: np.array([float(quasimode_residual(p, k, t)) ** 2 for t in x])
        quad = math.sqrt(gauss_legendre(f, 0.0, math.sqrt(p.xi), panels=8))
        assert float(residual_norm(p, k)) == pytest.approx(quad, rel=1e-10)


def test_monomial_numerator():
    p = SpectralProblem(0.0, 25.0)
    c = quasimode_coefficient(p, 0)
    want = abs(float(phi(0, 0.0, 5.0))) / 25.0**0.25 * math.sqrt(25.0**3 / 6)
    assert float(residual_norm_monomial(p, 0)) == pytest.approx(want, rel=1e-14)
    assert float(abs(c)) == pytest.approx(abs(float(phi(0, 0.0, 5.0))) / 25.0**0.25, rel=1e-14)
    # dropping the mu_k term only enlarges the numerator while mu_k <= xi
    for k in range(6):
        assert residual_norm_monomial(p, k) >= residual_norm(p, k)


def test_spectral_distance_below_quotient():
    rep = spectral_distance_quotient(SpectralProblem(0.0, 25.0), 0)
    assert rep.holds and not rep.inconclusive
    assert rep.spectral_dist <= rep.quotient <= rep.quotient_monomial
    rec = rep.as_record()
    assert rec["holds"] is True


def test_quotient_decreases_in_xi():
    qs = [spectral_distance_quotient(SpectralProblem(0.0, xi), 0).quotient for xi in (16.0, 25.0, 36.0)]
    assert qs[0] > qs[1] > qs[2]


def test_boundary_decay_check():
    rep = boundary_decay_check(0.0, 0.5, [16.0, 24.0, 32.0], [0])
    assert rep["pass"], rep["failures"]
    vals = [rep["values"][(xi, 0)] for xi in (16.0, 24.0, 32.0)]
    assert vals[0] > vals[1] > vals[2]
    assert rep["fitted_rates"][0] < 0
    assert abs(phi(1, 0.0, 6.0)) >= abs(phi(0, 0.0, 6.0))


def test_norm_lower_check():
    rep = norm_lower_check(0.0, [36.0], list(range(10)), 0.1)
    assert rep["pass"]
    assert len(rep["entries"]) == 10
    ratios = [e["ratio"] for e in norm_lower_check(0.0, [16.0, 36.0, 64.0], [3], 0.1)["entries"]]
    assert ratios[0] < ratios[1] < ratios[2] <= 1 + 1e-13
