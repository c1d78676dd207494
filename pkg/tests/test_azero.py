import math

import gmpy2
import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from singular_spectra.azero import AZero, Bracket, find_azeros, search_windows, spectrum_via_kummer
from singular_spectra.eigensolver import Method, eigen_fd, oscillation_index
from singular_spectra.errors import InvalidParams
from singular_spectra.params import SpectralProblem, a_to_kappa, mu
from singular_spectra.specfun import KummerArgs, PrecisionPolicy, bessel_zero, kummer_m, kummer_m_scaled, whittaker_m

TIGHT = PrecisionPolicy(target_tol=1e-30)

# Largest a-zeros of a -> M(a, b, xi) from mpmath (findroot, 40 digits).
AZERO_REF = {
    (1.5, 10.0): ["-0.001341762354790722860744408", "-1.046596958831352346137841", "-2.331444653103875033288376"],
    (1.0, 20.0): ["-3.903864124388129791511991e-8", "-1.000012401164157374159587", "-2.000747588228807773781615"],
    (3.5, 5.0): ["-0.440124472809140173247622", "-2.857696930720636002259189", "-6.290991985282945909023578"],
    (1.0, 40.0): ["-1.655706369657855258268639e-16", "-1.000000000000238174565903"],
    # M(-1, 2, 2) = 1 - 2/2 vanishes exactly
    (2.0, 2.0): ["-1", "-5.319428074161339398310667"],
}


@pytest.mark.parametrize("key", sorted(AZERO_REF))
def test_azeros_against_reference(key):
    b, xi = key
    ref = AZERO_REF[key]
    zs = find_azeros(b, xi, len(ref), tol=1e-22)
    for z, want in zip(zs, ref):
        with gmpy2.context(precision=200):
            assert abs(z.a - mpfr(want)) <= 2e-22 * max(1, abs(z.a))


def test_bracket_validation():
    Bracket(-1.0, 0.0, -1, 1)
    with pytest.raises(InvalidParams):
        Bracket(0.0, -1.0, -1, 1)
    with pytest.raises(InvalidParams):
        Bracket(-1.0, 0.0, 1, 1)


def test_find_azeros_validation():
    for b, xi, count in [(0.5, 1.0, 1), (1.0, 0.0, 1), (1.0, 1.0, 0)]:
        with pytest.raises(InvalidParams):
            find_azeros(b, xi, count)


def test_zeros_ordered_and_below_minus_k():
    zs = find_azeros(1.0, 40.0, 6)
    assert all(b.a < a.a for a, b in zip(zs, zs[1:]))
    for z in zs:
        assert z.a < 0
        assert z.below_minus_k and z.a < -z.k
        assert z.bracket.lo <= z.a <= z.bracket.hi


def test_low_regime_localization():
    for z in find_azeros(1.0, 40.0, 6):
        assert -z.k - 0.01 <= z.a < -z.k


def test_azero_record_and_conversions():
    z = find_azeros(1.5, 10.0, 2)[1]
    assert z.kappa == a_to_kappa(z.a, 1.5)
    with gmpy2.context(precision=300):
        assert abs(z.lambda_ - (2 * 10.0 * 1.5 - 4 * 10.0 * z.a)) < 1e-25
        assert abs(z.kappa - (0.75 - z.a)) < 1e-25
    rec = z.as_record()
    assert list(rec) == ["k", "a", "kappa", "lambda", "residual", "below_minus_k"]


def test_whittaker_vanishes_at_kappa_zeros():
    b, xi = 1.5, 10.0
    for z in find_azeros(b, xi, 4, tol=1e-25):
        w = whittaker_m(z.kappa, (b - 1) / 2, xi, TIGHT)
        _, scale = kummer_m_scaled(z.a, b, xi, TIGHT)
        assert abs(w) <= 1e-20 * scale


def test_reflection_at_zeros():
    b, xi = 2.0, 12.0
    for z in find_azeros(b, xi, 3, tol=1e-25):
        with gmpy2.context(precision=300):
            lhs = gmpy2.exp(-mpfr(xi)) * kummer_m(KummerArgs(z.a, b, xi), TIGHT)
            # M(b - a, b, -xi) summed directly at high precision
            s = t = mpfr(1)
            for j in range(400):
                t = t * (b - z.a + j) * (-xi) / ((b + j) * (j + 1))
                s += t
        assert abs(lhs - s) < 1e-15


def test_search_windows_cover_zeros():
    b, xi = 2.0, 5.0
    wins = search_windows(b, xi, 5)
    assert all(hi > lo for lo, hi in wins)
    assert wins[0][1] <= b / 2
    for z in find_azeros(b, xi, 5):
        assert any(lo <= z.a <= hi for lo, hi in wins)


def test_spectrum_via_kummer_records():
    p = SpectralProblem(0.5, 10.0)
    spec = spectrum_via_kummer(p, 8)
    for r in spec:
        assert r.method is Method.KummerRoot
        assert r.lambda_tilde > mu(r.k, 0.5)
        assert oscillation_index(p, r.a_zero) == r.k
        assert r.residual == abs(float(kummer_m(KummerArgs(r.a_zero, 1.5, 10.0))))


def test_spectrum_bessel_window():
    p = SpectralProblem(1.0, 2.0)
    for r in spectrum_via_kummer(p, 20):
        j = float(bessel_zero(1.0, r.k))
        assert abs(float(r.lambda_) - j * j) <= 4.0


def test_kummer_matches_fd_half_integer():
    p = SpectralProblem(0.5, 10.0)
    k0 = spectrum_via_kummer(p, 0)[0]
    f0 = eigen_fd(p, 0)[0]
    assert abs(float(k0.lambda_) - f0.lambda_) / f0.lambda_ < 1e-6


@settings(max_examples=10, deadline=None)
@given(b=st.floats(1, 4), xi=st.floats(0.2, 60))
def test_azeros_strictly_below_minus_k(b, xi):
    zs = find_azeros(b, xi, 4)
    for prev, cur in zip(zs, zs[1:]):
        assert cur.a < prev.a
    for z in zs:
        assert z.a < -z.k
        # lambda = 2 xi b - 4 xi a, carried at the precision of a
        with gmpy2.context(precision=300):
            exact = 2 * xi * b - 4 * xi * z.a
        assert abs(z.lambda_ - exact) <= 2.0 ** -z.a.precision * exact


def test_azero_dataclass_is_frozen():
    z = find_azeros(1.0, 3.0, 1)[0]
    assert isinstance(z, AZero)
    with pytest.raises(Exception):
        z.k = 3
    assert not math.isnan(z.refinement_residual)
