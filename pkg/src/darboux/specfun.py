"""Special functions: Bessel J, Kummer 1F1, parabolic cylinder D, elliptic F.

Everything is built from power series, asymptotic expansions, Taylor-series
ODE integration and the arithmetic-geometric mean. Each public function
returns a :class:`SpecialValue` carrying a forward-style error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, PoleInB, RangeError, UnsupportedOrder

EPS = 2.220446049250313e-16
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2 * math.pi)


@dataclass(frozen=True)
class SpecialValue:
    value: float
    est_abs_err: float

    def __float__(self):
        return float(self.value)


def _is_nonpos_int(x):
    return x <= 0 and x == math.floor(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma function, zero at the poles."""
    if _is_nonpos_int(x):
        return 0.0
    if abs(x) < 1e-300:
        # 1/Gamma(x) = x + O(x^2); avoids overflow in gamma near the origin
        return x
    if x > 171.0:
        return 0.0 if x > 180 else math.exp(-math.lgamma(x))
    if x < -170.0:
        # reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi
        return math.sin(math.pi * x) * math.exp(math.lgamma(1 - x)) / math.pi
    return 1.0 / math.gamma(x)


def pochhammer(a: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


# Bessel J ----------------------------------------------------------------------

BESSEL_SERIES_MAX_X = 12.0
BESSEL_ORDER_RANGE = 5.0
_BESSEL_INTERNAL_RANGE = 16.0


def _bessel_series(nu, x):
    if x == 0.0:
        if nu == 0:
            return 1.0, 0.0
        if nu > 0:
            return 0.0, 0.0
        raise DomainError("J_nu(0) is infinite for negative non-integer nu")
    h = 0.5 * x
    t = h ** nu * rgamma(nu + 1.0)
    terms = [t]
    k = 1
    while True:
        t *= -(h * h) / (k * (k + nu))
        terms.append(t)
        if abs(t) < 1e-18 * max(abs(terms[0]), 1e-300) and k > h:
            break
        k += 1
        if k > 500:
            break
    val = math.fsum(terms)
    err = 4 * EPS * sum(abs(s) for s in terms)
    return val, err


def _bessel_asymptotic(nu, x):
    mu = 4.0 * nu * nu
    omega = x - 0.5 * nu * math.pi - 0.25 * math.pi
    p, q = 1.0, 0.0
    a = 1.0
    last = math.inf
    k = 1
    err = 0.0
    while k < 200:
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(a) > last or a == 0.0:
            err = abs(a) if a != 0.0 else 0.0
            break
        last = abs(a)
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sgn * a
        else:
            q += sgn * a
        if abs(a) < 1e-17:
            err = abs(a)
            break
        k += 1
    amp = math.sqrt(2.0 / (math.pi * x))
    val = amp * (p * math.cos(omega) - q * math.sin(omega))
    return val, amp * (err + 4 * EPS * (abs(p) + abs(q))) + 4 * EPS * abs(val)


def _bessel(nu, x):
    if nu < 0 and nu == math.floor(nu):
        n = int(-nu)
        v, e = _bessel(float(n), x)
        return (-v if n % 2 else v), e
    if x <= BESSEL_SERIES_MAX_X:
        return _bessel_series(nu, x)
    return _bessel_asymptotic(nu, x)


def bessel_j(nu: float, x: float) -> SpecialValue:
    """Bessel function of the first kind J_nu(x) for x >= 0, |nu| <= 5."""
    if abs(nu) > BESSEL_ORDER_RANGE:
        raise UnsupportedOrder(f"order {nu} outside [-5, 5]")
    if x < 0:
        raise DomainError("bessel_j requires x >= 0")
    return SpecialValue(*_bessel(float(nu), float(x)))


def bessel_j_taylor(nu: float, x0: float, order: int):
    """Taylor coefficients J^(k)(x0)/k!, k = 0..order."""
    if abs(nu) + order > _BESSEL_INTERNAL_RANGE:
        raise UnsupportedOrder("derivative order too high for the Bessel range")
    out = []
    for k in range(order + 1):
        s = 0.0
        for j in range(k + 1):
            s += (-1) ** j * math.comb(k, j) * _bessel(nu - k + 2 * j, x0)[0]
        out.append(s / (2.0 ** k) / math.factorial(k))
    return out


# Kummer 1F1 --------------------------------------------------------------------

def _kummer_series(a, b, z):
    t = 1.0
    terms = [1.0]
    k = 0
    while True:
        t *= (a + k) * z / ((b + k) * (k + 1))
        k += 1
        terms.append(t)
        if t == 0.0:
            break
        if k > abs(a) and k > abs(z) and abs(t) < 1e-17 * abs(math.fsum(terms[-8:]) if len(terms) > 8 else 1.0) \
                and abs(t) < 1e-17 * max(abs(x) for x in terms):
            break
        if k > 20000:
            raise RangeError("1F1 series failed to converge")
    val = math.fsum(terms)
    err = 4 * EPS * sum(abs(x) * (1 + 0.05 * i) for i, x in enumerate(terms)) + abs(terms[-1])
    return val, err


def _kummer(a, b, z):
    if _is_nonpos_int(b) and not (_is_nonpos_int(a) and a > b):
        raise PoleInB(f"b = {b} is a nonpositive integer")
    if z < 0 and not _is_nonpos_int(a):
        ez = math.exp(z)
        v, e = _kummer_series(b - a, b, -z)
        return ez * v, ez * e + 2 * EPS * abs(ez * v)
    return _kummer_series(a, b, z)


def kummer_1f1(a: float, b: float, z: float) -> SpecialValue:
    """Confluent hypergeometric function 1F1(a; b; z), |z| <= 200."""
    if abs(z) > 200:
        raise RangeError("|z| > 200 outside the supported range")
    if _is_nonpos_int(b):
        raise PoleInB(f"b = {b} is a nonpositive integer")
    return SpecialValue(*_kummer(float(a), float(b), float(z)))


def kummer_taylor(a: float, b: float, z0: float, order: int):
    """Taylor coefficients M^(k)(z0)/k! using d/dz M(a,b,z) = (a/b) M(a+1,b+1,z)."""
    out = []
    for k in range(order + 1):
        out.append(pochhammer(a, k) / pochhammer(b, k) * _kummer(a + k, b + k, z0)[0]
                   / math.factorial(k))
    return out


# parabolic cylinder D_nu ---------------------------------------------------------

PCF_BOX = 60.0
_KUMMER_ACCEPT = 1e-11


def _pcf_kummer(nu, z):
    """Two-term 1F1 representation; returns (value, est_abs_err)."""
    x = 0.5 * z * z
    if x > 690:
        return math.nan, math.inf
    m1, e1 = _kummer(-0.5 * nu, 0.5, x)
    m2, e2 = _kummer(0.5 * (1 - nu), 1.5, x)
    c1 = _SQRT_PI * rgamma(0.5 * (1 - nu))
    c2 = -_SQRT_2PI * z * rgamma(-0.5 * nu)
    t1, t2 = c1 * m1, c2 * m2
    log_pref = 0.5 * nu * math.log(2.0) - 0.5 * x
    if log_pref + math.log(max(abs(t1) + abs(t2), 1e-300)) > 700:
        raise RangeError(f"D_{nu}({z}) exceeds double range")
    pref = math.exp(log_pref)
    val = pref * (t1 + t2)
    err = pref * (abs(c1) * e1 + abs(c2) * e2 + 2 * EPS * (abs(t1) + abs(t2)))
    return val, err


def _pcf_asymptotic(nu, z):
    """Large positive z: (log|D|, sign, D'/D, converged)."""
    s = 1.0
    ds = 0.0
    c = 1.0
    last = math.inf
    converged = False
    for k in range(1, 200):
        c *= -(nu - 2 * k + 2) * (nu - 2 * k + 1) / (2.0 * k * z * z)
        if c == 0.0:
            converged = True
            break
        if abs(c) > last:
            break
        last = abs(c)
        s += c
        ds += c * (-2.0 * k / z)
        if abs(c) < 1e-17 * abs(s):
            converged = True
            break
    logd = nu * math.log(z) - 0.25 * z * z + math.log(abs(s))
    sign = 1.0 if s > 0 else -1.0
    ratio = nu / z - 0.5 * z + ds / s
    return logd, sign, ratio, converged


def _weber_taylor_step(nu, z0, y, dy, dt):
    """Advance y'' = (z^2/4 - nu - 1/2) y from z0 by dt with a Taylor series."""
    q0 = 0.25 * z0 * z0 - nu - 0.5
    c = [y, dy]
    val = y + dy * dt
    der = dy
    tk = dt
    scale = abs(y) + abs(dy * dt) + 1e-300
    k = 0
    while True:
        ym2 = c[k - 2] if k >= 2 else 0.0
        ym1 = c[k - 1] if k >= 1 else 0.0
        nxt = (q0 * c[k] + 0.5 * z0 * ym1 + 0.25 * ym2) / ((k + 1) * (k + 2))
        c.append(nxt)
        kk = k + 2
        der += kk * nxt * tk
        tk *= dt
        term = nxt * tk
        val += term
        k += 1
        if abs(term) < 1e-18 * scale and abs(c[-2] * tk / dt) < 1e-18 * scale + abs(term) * 10 and k > 4:
            break
        if k > 200:
            break
    return val, der


def _pcf_integrate(nu, z):
    """Backward Taylor integration from the asymptotic region; returns (D, D', err)."""
    za = max(z, 2.0 * math.sqrt(abs(nu) + 1.0) + 8.0, 8.0)
    while True:
        logd, sign, ratio, ok = _pcf_asymptotic(nu, za)
        if ok:
            break
        za *= 1.25
        if za > 1e4:
            raise RangeError("asymptotic expansion of D_nu failed to converge")
    y, dy = sign, sign * ratio
    logscale = logd
    zc = za
    nsteps = 0
    while zc > z:
        q0 = abs(0.25 * zc * zc - nu - 0.5)
        h = min(0.5, 1.0 / math.sqrt(q0 + 1.0), zc - z)
        y, dy = _weber_taylor_step(nu, zc, y, dy, -h)
        zc -= h
        nsteps += 1
        m = max(abs(y), abs(dy))
        if m > 1e100 or m < 1e-100:
            logscale += math.log(m)
            y /= m
            dy /= m
    if logscale > 700:
        raise RangeError(f"D_{nu}({z}) exceeds double range")
    f = math.exp(logscale)
    val, der = y * f, dy * f
    err = (1e-15 + 4 * EPS * nsteps) * max(abs(val), abs(der) * 1e-3)
    return val, der, err


def _pcf(nu, z):
    """(D_nu(z), D_nu'(z), est_abs_err)."""
    if z <= 0 or 0.5 * z * z < 690:
        try:
            v0, e0 = _pcf_kummer(nu, z)
            v1, e1 = _pcf_kummer(nu + 1, z)
        except RangeError:
            if z > 0:
                raise
            v0 = math.nan
        if math.isfinite(v0) and abs(v0) > 0 and e0 <= _KUMMER_ACCEPT * abs(v0) \
                and e1 <= _KUMMER_ACCEPT * max(abs(v1), abs(v0)):
            der = 0.5 * z * v0 - v1
            return v0, der, e0
        if z <= 0 and math.isfinite(v0) and e0 <= _KUMMER_ACCEPT * max(1.0, abs(v0)):
            return v0, 0.5 * z * v0 - v1, e0
    return _pcf_integrate(nu, z)


def parabolic_d(nu: float, z: float) -> SpecialValue:
    """Parabolic cylinder function D_nu(z) on |nu| <= 60, |z| <= 60."""
    if abs(nu) > PCF_BOX or abs(z) > PCF_BOX:
        raise RangeError("(nu, z) outside the supported box |nu|, |z| <= 60")
    v, _, e = _pcf(float(nu), float(z))
    return SpecialValue(v, e)


def parabolic_d_deriv(nu: float, z: float):
    """(D_nu(z), D_nu'(z))."""
    v, d, _ = _pcf(float(nu), float(z))
    return v, d


def parabolic_d_taylor(nu: float, z0: float, order: int):
    """Taylor coefficients D^(k)(z0)/k! from the Weber recurrence."""
    y, dy = parabolic_d_deriv(nu, z0)
    q0 = 0.25 * z0 * z0 - nu - 0.5
    c = [y, dy]
    for k in range(order - 1):
        ym1 = c[k - 1] if k >= 1 else 0.0
        ym2 = c[k - 2] if k >= 2 else 0.0
        c.append((q0 * c[k] + 0.5 * z0 * ym1 + 0.25 * ym2) / ((k + 1) * (k + 2)))
    return c[: order + 1]


def weber_even_odd(nu: float, z: float):
    """Even/odd Weber solutions and derivatives (always independent, W = 1).

    y_e = exp(-z^2/4) M(-nu/2, 1/2, z^2/2), y_o = z exp(-z^2/4) M((1-nu)/2, 3/2, z^2/2).
    """
    x = 0.5 * z * z
    g = math.exp(-0.5 * x)
    a1, a2 = -0.5 * nu, 0.5 * (1 - nu)
    m1 = _kummer(a1, 0.5, x)[0]
    dm1 = a1 / 0.5 * _kummer(a1 + 1, 1.5, x)[0]
    m2 = _kummer(a2, 1.5, x)[0]
    dm2 = a2 / 1.5 * _kummer(a2 + 1, 2.5, x)[0]
    ye = g * m1
    dye = g * (-0.5 * z * m1 + z * dm1)
    yo = z * g * m2
    dyo = g * (m2 - 0.5 * z * z * m2 + z * z * dm2)
    return ye, dye, yo, dyo


# elliptic F --------------------------------------------------------------------

def _agm_landen(phi, k):
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    p = phi
    n = 0
    while abs(a - b) > 1e-16 * a and n < 60:
        p = p + math.atan(b / a * math.tan(p)) + math.pi * round(p / math.pi)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        n += 1
    return p / (2.0 ** n * a)


def elliptic_f(phi: float, k: float) -> SpecialValue:
    """Incomplete elliptic integral of the first kind, integral of (1-k^2 sin^2)^(-1/2)."""
    phi, k = float(phi), abs(float(k))
    s = math.sin(phi)
    if abs(k * s) >= 1.0 and not (k <= 1.0 and abs(s) == 1.0 and k < 1.0):
        raise DomainError("|k sin(phi)| must be < 1")
    if k == 0.0:
        return SpecialValue(phi, 0.0)
    if k < 1.0:
        val = _agm_landen(phi, k)
    else:
        if abs(phi) > 0.5 * math.pi:
            raise DomainError("k > 1 requires |phi| <= pi/2")
        if k == 1.0:
            val = math.atanh(s)
        else:
            beta = math.asin(k * s)
            val = _agm_landen(beta, 1.0 / k) / k
    return SpecialValue(val, 8 * EPS * max(1.0, abs(val)))


def elliptic_k(k: float) -> float:
    """Complete integral K(k) = pi / (2 AGM(1, sqrt(1 - k^2)))."""
    if not abs(k) < 1.0:
        raise DomainError("K(k) needs |k| < 1")
    a, b = 1.0, math.sqrt(1.0 - k * k)
    for _ in range(60):
        if abs(a - b) <= 4 * EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


# Wronskian -------------------------------------------------------------------

def derivative4(f: Callable[[float], float], x: float, h: float) -> float:
    """Fourth-order central difference f'(x)."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h)


def wronskian(f: Callable[[float], float], g: Callable[[float], float], x: float,
              h: float = 1e-3) -> float:
    """W[f, g](x) = f g' - f' g with fourth-order central differences."""
    return f(x) * derivative4(g, x, h) - derivative4(f, x, h) * g(x)
