import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from darboux import specfun
from darboux.errors import DomainError, PoleInB, RangeError, UnsupportedOrder
from darboux.specfun import (bessel_j, bessel_j_taylor, elliptic_f, elliptic_k, kummer_1f1,
                             kummer_taylor, parabolic_d, parabolic_d_taylor, wronskian)


# examples ---------------------------------------------------------------------

def test_bessel_examples():
    assert bessel_j(1 / 3, 0.0).value == 0.0
    assert bessel_j(0.5, math.pi / 2).value == pytest.approx(2 / math.pi, abs=1e-14)
    nu, x = 1 / 3, 3.0
    c = bessel_j_taylor(nu, x, 2)
    assert abs(x * x * 2 * c[2] + x * c[1] + (x * x - nu * nu) * c[0]) <= 1e-9


def test_kummer_examples():
    assert kummer_1f1(0.3, 1.7, 0.0).value == 1.0
    assert kummer_1f1(1, 1, 1).value == pytest.approx(math.e, rel=1e-15)
    assert kummer_1f1(-1, 2, 3).value == pytest.approx(-0.5, abs=1e-15)


def test_parabolic_examples():
    assert parabolic_d(0, 2).value == pytest.approx(math.exp(-1), rel=1e-13)
    assert parabolic_d(1, 1).value == pytest.approx(math.exp(-0.25), rel=1e-13)
    c = parabolic_d_taylor(0.7, 1.3, 2)
    assert abs(2 * c[2] + (0.7 + 0.5 - 1.3 ** 2 / 4) * c[0]) <= 1e-7


def test_elliptic_examples():
    assert elliptic_f(0.0, 0.4).value == 0.0
    assert elliptic_f(1.1, 0.0).value == 1.1
    assert elliptic_f(math.pi / 2, 1 / math.sqrt(2)).value == pytest.approx(1.8540746773013719, abs=1e-12)
    assert elliptic_k(1 / math.sqrt(2)) == pytest.approx(1.8540746773013719, abs=1e-14)


def test_wronskian_examples():
    for x in (-1.0, 0.0, 0.7, 3.0):
        assert wronskian(math.sin, math.cos, x) == pytest.approx(-1.0, abs=1e-11)
        assert wronskian(math.exp, math.exp, x) == 0.0


def test_wronskian_of_kummer_solutions_nonzero():
    from darboux import spectra
    for beta, gamma, mu in [(1.0, 0.7, 3.1), (0.5, 1.3, 7.0), (2.0, 0.6, 1.4)]:
        vp = spectra.p1_v_solution(beta, gamma, mu, +1)
        vm = spectra.p1_v_solution(beta, gamma, mu, -1)
        assert abs(wronskian(vp, vm, 1.0)) > 1e-3


# errors -----------------------------------------------------------------------

def test_error_types():
    with pytest.raises(UnsupportedOrder):
        bessel_j(5.5, 1.0)
    with pytest.raises(DomainError):
        bessel_j(1.0, -1.0)
    with pytest.raises(PoleInB):
        kummer_1f1(0.5, -2.0, 1.0)
    with pytest.raises(RangeError):
        kummer_1f1(0.5, 1.0, 250.0)
    with pytest.raises(RangeError):
        parabolic_d(61.0, 1.0)
    with pytest.raises(DomainError):
        elliptic_f(math.pi / 2, 1.0)
    with pytest.raises(DomainError):
        elliptic_f(1.0, 1.5)


# independent oracles ------------------------------------------------------------

@given(st.floats(-5, 5), st.floats(0.01, 50))
def test_bessel_matches_mpmath(nu, x):
    got = bessel_j(nu, x)
    ref = float(mpmath.besselj(nu, x))
    # absolute 1e-10 until the value itself exceeds 1, where doubles cannot resolve it
    assert abs(got.value - ref) <= 1e-10 * max(1.0, abs(ref))
    assert math.isfinite(got.est_abs_err)


@given(st.floats(-10, 10), st.floats(0.1, 6), st.floats(-40, 40))
def test_kummer_matches_mpmath(a, b, z):
    got = kummer_1f1(a, b, z).value
    ref = float(mpmath.hyp1f1(a, b, z))
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref), math.exp(max(z, 0)) * 1e-3)


@given(st.floats(-20, 20), st.floats(-15, 15))
def test_parabolic_matches_mpmath(nu, z):
    got = parabolic_d(nu, z).value
    ref = float(mpmath.pcfd(nu, z))
    assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref))


@pytest.mark.parametrize("nu,z", [(0.3, 40.0), (5.5, 59.0), (-3.2, 30.0), (12.0, 4.0), (-0.5, -6.0)])
def test_parabolic_edges_match_mpmath(nu, z):
    ref = float(mpmath.pcfd(nu, z))
    assert parabolic_d(nu, z).value == pytest.approx(ref, rel=1e-8, abs=1e-300)


@given(st.floats(-1.5, 1.5), st.floats(0.0, 0.999))
def test_elliptic_matches_mpmath(phi, k):
    ref = float(mpmath.ellipf(phi, k * k))
    assert abs(elliptic_f(phi, k).value - ref) <= 1e-12


def test_elliptic_against_trapezoid_grid():
    n = 10 ** 6
    th = np.linspace(0.0, 1.0, n + 1)
    for phi in np.linspace(0.1, 1.5, 5):
        for k in (0.1, 0.4, 0.7, 0.95):
            y = 1.0 / np.sqrt(1.0 - (k * np.sin(phi * th)) ** 2)
            ref = phi * (y.sum() - 0.5 * (y[0] + y[-1])) / n
            assert abs(elliptic_f(phi, k).value - ref) <= 1e-9


# defining equations at random points ---------------------------------------------

def _rng():
    return np.random.default_rng(7)


def test_bessel_ode_residual():
    rng = _rng()
    for nu, x in zip(rng.uniform(-4.5, 4.5, 100), rng.uniform(0.5, 40, 100)):
        c = bessel_j_taylor(nu, x, 2)
        r = x * x * 2 * c[2] + x * c[1] + (x * x - nu * nu) * c[0]
        scale = x * x * 2 * abs(c[2]) + x * abs(c[1]) + (x * x + nu * nu) * abs(c[0])
        assert abs(r) <= 1e-7 * max(1.0, scale)


def test_kummer_ode_residual():
    rng = _rng()
    for a, b, z in zip(rng.uniform(-5, 5, 100), rng.uniform(0.2, 5, 100), rng.uniform(-20, 20, 100)):
        c = kummer_taylor(a, b, z, 2)
        r = z * 2 * c[2] + (b - z) * c[1] - a * c[0]
        scale = abs(z * 2 * c[2]) + abs((b - z) * c[1]) + abs(a * c[0])
        assert abs(r) <= 1e-7 * max(1.0, scale)


def test_parabolic_ode_residual_by_differences():
    # the Taylor routine uses the equation itself, so difference the values instead
    rng = _rng()
    h = 1e-3
    for nu, z in zip(rng.uniform(-6, 6, 100), rng.uniform(-6, 6, 100)):
        f = lambda t: parabolic_d(nu, t).value
        d2 = (-f(z + 2 * h) + 16 * f(z + h) - 30 * f(z) + 16 * f(z - h) - f(z - 2 * h)) / (12 * h * h)
        r = d2 + (nu + 0.5 - z * z / 4) * f(z)
        assert abs(r) <= 1e-7 * max(1.0, abs(f(z)) * (1 + abs(nu) + z * z))


# continuity where the evaluation method switches ----------------------------------

@pytest.mark.parametrize("nu", [-2.5, 1 / 3, 0.0, 2.0, 4.7])
def test_bessel_crossover_continuity(nu):
    x = specfun.BESSEL_SERIES_MAX_X
    s = specfun._bessel_series(nu, x)[0]
    a = specfun._bessel_asymptotic(nu, x)[0]
    # the asymptotic series is only accurate to ~1e-9 at x = 12 for the largest orders
    assert abs(s - a) <= 1e-9
    assert abs(bessel_j(nu, x).value - bessel_j(nu, math.nextafter(x, 50)).value) <= 1e-9


def _kummer_accepted(nu, z):
    v0, e0 = specfun._pcf_kummer(nu, z)
    return math.isfinite(v0) and v0 != 0 and e0 <= specfun._KUMMER_ACCEPT * abs(v0)


@pytest.mark.parametrize("nu", [-1.3, 0.4, 3.0, 9.7])
def test_parabolic_crossover_continuity(nu):
    # last z where the 1F1 route is accepted; integration takes over just beyond
    zs = np.arange(0.5, 30.0, 0.01)
    z = max(t for t in zs if _kummer_accepted(nu, t))
    k = specfun._pcf_kummer(nu, z)[0]
    i = specfun._pcf_integrate(nu, z)[0]
    assert abs(k - i) <= 1e-9 * max(1.0, abs(k))


def test_weber_even_odd_wronskian_is_one():
    for nu, z in [(0.3, 0.0), (2.2, 1.5), (-1.7, -2.0)]:
        ye, dye, yo, dyo = specfun.weber_even_odd(nu, z)
        assert ye * dyo - dye * yo == pytest.approx(1.0, rel=1e-10)
