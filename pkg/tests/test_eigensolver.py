import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singular_spectra.azero import spectrum_via_kummer
from singular_spectra.eigensolver import (
    EigenResult,
    Grid,
    Method,
    Scheme,
    eigen_fd,
    eigen_fd_unit_interval,
    eigenfunction,
    oscillation_index,
    sign_changes_along_x,
    sturm_count,
)
from singular_spectra.errors import GridTooCoarse, InvalidParams, NotApplicable
from singular_spectra.params import SpectralProblem, a_to_kappa, a_to_lambda, lambda_to_a, mu

# lambda_k from mpmath root-finding on a -> M(a, 1 + nu, xi), 40 digits
LAMBDA_REF = {
    (0.5, 10.0): [30.05367049419162891, 71.86387835325409384, 123.2577861241550013, 192.1600312390605655],
    (0.0, 20.0): [40.00000312309129951, 120.0009920931325899, 200.0598070583046219],
    (2.5, 5.0): [43.80248945618280346, 92.15393861441272004, 160.8198397056589181],
}


# ---- parameters


def test_problem_validation():
    assert SpectralProblem(0.5, 2.0).b == 1.5
    for nu, xi in [(-0.1, 1.0), (0.0, 0.0), (0.0, -2.0), (math.nan, 1.0)]:
        with pytest.raises(InvalidParams):
            SpectralProblem(nu, xi)


def test_mu():
    assert mu(0, 0) == 2
    assert mu(3, 0.5) == 15
    assert all(mu(k + 1, 1.5) - mu(k, 1.5) == 4 for k in range(20))


@given(a=st.floats(-50, 5), nu=st.floats(0, 5), xi=st.floats(0.1, 200))
def test_a_lambda_round_trip(a, nu, xi):
    assert lambda_to_a(a_to_lambda(a, nu, xi), nu, xi) == pytest.approx(a, abs=1e-12 * max(1, abs(a)) * xi)


def test_a_lambda_special_values():
    assert a_to_lambda(0, 0.5, 10) == 2 * 10 * 1.5
    assert a_to_lambda(-3, 0.5, 10) / 10 == mu(3, 0.5)
    assert lambda_to_a(a_to_lambda(-3.7, 1, 10), 1, 10) == pytest.approx(-3.7, rel=1e-15)
    assert a_to_kappa(0, 2) == 1
    assert a_to_kappa(-4, 3) == 1.5 + 4


# ---- grid


def test_grid_layout():
    g = Grid(100, 2.0)
    pts = g.points()
    assert pts[0] == pytest.approx(g.spacing / 2)
    assert pts[-1] < 2.0
    assert 2.0 - pts[-1] == pytest.approx(g.spacing)
    assert g.refined().n_points == 200
    with pytest.raises(InvalidParams):
        Grid(10)


def test_sturm_count_matches_eigvalsh():
    rng = np.random.default_rng(3)
    d = rng.normal(size=40)
    e = rng.normal(size=39)
    full = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ev = np.linalg.eigvalsh(full)
    for x in (-1.0, 0.0, 0.7, 2.5):
        assert sturm_count(d, e, x) == int(np.sum(ev < x))


# ---- finite volumes


@pytest.mark.parametrize("key", sorted(LAMBDA_REF))
def test_fd_against_reference(key):
    nu, xi = key
    ref = LAMBDA_REF[key]
    res = eigen_fd(SpectralProblem(nu, xi), len(ref) - 1)
    for r, want in zip(res, ref):
        assert r.method is Method.FiniteDifference
        assert abs(r.lambda_ - want) / want < 1e-8
        assert r.error_est < 1e-6 * want


def test_fd_small_xi_near_bessel():
    r = eigen_fd(SpectralProblem(0.5, 0.1), 0)[0]
    assert abs(r.lambda_ - math.pi**2) <= 0.01


def test_fd_ground_state_window():
    r = eigen_fd(SpectralProblem(0.5, 10.0), 0)[0]
    assert 3.0 < r.lambda_tilde < 3.5


def test_fd_strict_lower_bound_and_monotone():
    res = eigen_fd(SpectralProblem(1.0, 20.0), 10)
    for r in res:
        assert r.lambda_tilde > mu(r.k, 1.0)
    assert all(b.lambda_ > a.lambda_ for a, b in zip(res, res[1:]))


def test_fd_dilation_consistency():
    p = SpectralProblem(0.5, 10.0)
    dilated = eigen_fd(p, 4)
    direct = eigen_fd_unit_interval(p, 4)
    for a, b in zip(dilated, direct):
        assert abs(a.lambda_ - b.lambda_) / a.lambda_ < 1e-6


def test_fd_plain_scheme():
    p = SpectralProblem(1.0, 5.0)
    plain = eigen_fd(p, 3, scheme=Scheme.Plain)
    weighted = eigen_fd(p, 3)
    for a, b in zip(plain, weighted):
        assert abs(a.lambda_ - b.lambda_) / b.lambda_ < 1e-6
    with pytest.raises(NotApplicable):
        eigen_fd(SpectralProblem(0.0, 5.0), 2, scheme=Scheme.Plain)
    low = eigen_fd(SpectralProblem(0.25, 5.0), 1, scheme=Scheme.Plain)
    assert low[0].notes


def test_fd_grid_too_coarse():
    p = SpectralProblem(0.5, 10.0)
    with pytest.raises(GridTooCoarse):
        eigen_fd(p, 10, Grid.for_problem(p, 100))
    with pytest.raises(GridTooCoarse):
        eigen_fd(p, 2, Grid.for_problem(p, 64), tol=1e-12)


def test_fd_grid_must_match_problem():
    with pytest.raises(InvalidParams):
        eigen_fd(SpectralProblem(0.5, 10.0), 1, Grid(1000, 1.0))


def test_eigen_result_derived_fields():
    r = EigenResult(k=2, nu=0.5, xi=10.0, lambda_=130.0, a_zero=lambda_to_a(130.0, 0.5, 10.0), method=Method.FiniteDifference)
    assert r.lambda_tilde == 13.0
    assert r.gap == pytest.approx(13.0 - mu(2, 0.5))
    assert r.kappa_zero == pytest.approx(0.75 - r.a_zero)
    rec = r.as_record()
    assert rec["method"] == "FiniteDifference"
    assert list(rec)[:3] == ["k", "nu", "xi"]


# ---- eigenfunctions and oscillation


def test_eigenfunction_boundary_values():
    p = SpectralProblem(0.5, 10.0)
    spec = spectrum_via_kummer(p, 3)
    for r in spec:
        assert eigenfunction(p, r.a_zero, 0.0) == 0
        interior = max(abs(float(eigenfunction(p, r.a_zero, x))) for x in np.linspace(0.05, 0.95, 19))
        assert abs(float(eigenfunction(p, r.a_zero, 1.0))) < 1e-8 * interior
    with pytest.raises(InvalidParams):
        eigenfunction(p, spec[0].a_zero, 1.5)


def test_eigenfunction_zero_count():
    p = SpectralProblem(0.5, 10.0)
    for r in spectrum_via_kummer(p, 8):
        xs = np.linspace(0, 1, 801)[1:-1]
        vals = [float(eigenfunction(p, r.a_zero, x)) for x in xs]
        interior = sum(1 for u, v in zip(vals, vals[1:]) if (u > 0) != (v > 0))
        assert interior + 2 == r.k + 2
        assert oscillation_index(p, r.a_zero) == r.k


def test_oscillation_index_fd_results():
    p = SpectralProblem(1.0, 5.0)
    for r in eigen_fd(p, 5):
        assert oscillation_index(p, r.a_zero) == r.k


@settings(max_examples=10, deadline=None)
@given(nu=st.floats(0, 3), xi=st.floats(0.5, 30))
def test_sign_changes_count_eigenvalues_below(nu, xi):
    # Zeros of x -> M(a, b, xi x^2) on (0, 1] = number of a-zeros above a.
    p = SpectralProblem(nu, xi)
    spec = spectrum_via_kummer(p, 3)
    for r in spec:
        probe = r.a_zero - 1e-3
        assert sign_changes_along_x(probe, p.b, xi, include_end=True) == r.k + 1
