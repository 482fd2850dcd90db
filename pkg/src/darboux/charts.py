"""Separable coordinate charts on D1, Liouville forms and Hamilton-Jacobi actions.

Three charts separate the free motion:

* ``native``: the defining coordinates ``(u, v)``;
* ``rotated``: ``u = r cos(theta) + s sin(theta)``, ``v = -r sin(theta) + s cos(theta)``,
  tied to the ``X1 + sinh(c) K^2`` family through ``C = exp(-c) = tan(theta)``;
* ``parabolic``: ``u = (xi^2 - eta^2)/2 + a``, ``v = xi*eta``, tied to ``X2 + a K^2``.

In each chart ``H = (px^2 + py^2 + f(x) + g(y)) / (sigma(x) + tau(y))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets, phase
from .brackets import QuadraticCoeffs, bracket_jets, classify_integral
from .errors import ChartSingular, DegenerateRoots, DomainError, IncompatibleChart
from .jets import Jet
from .phase import ModelSpec, PhasePoint

CHART_KINDS = ("native", "rotated", "parabolic")

COMPATIBLE = {
    "Free": ("native", "rotated", "parabolic"),
    "P1": ("native", "parabolic"),
    "P2": ("native", "rotated"),
    "P3": ("native", "rotated", "parabolic"),
}


@dataclass(frozen=True)
class Chart:
    """A separable chart. Build with :meth:`native`, :meth:`rotated` or :meth:`parabolic`."""

    kind: str
    theta: float = 0.0
    C: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in CHART_KINDS:
            raise ValueError(f"unknown chart kind {self.kind!r}")

    @classmethod
    def native(cls):
        return cls("native")

    @classmethod
    def rotated(cls, theta: float | None = None, C: float | None = None):
        """Rotated chart from ``theta``, from ``C = tan(theta)``, or both (checked)."""
        if theta is None and C is None:
            raise ValueError("give theta or C")
        if theta is None:
            theta = math.atan(C)
        cval = math.tan(theta) if math.cos(theta) != 0 else math.inf
        if C is not None and not math.isclose(C, cval, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(f"C = {C} inconsistent with tan(theta) = {cval}")
        return cls("rotated", theta=float(theta), C=float(cval))

    @classmethod
    def from_sinh(cls, c: float):
        """Rotated chart for ``L = X1 + sinh(c) K^2``."""
        return cls.rotated(C=math.exp(-c))

    @classmethod
    def parabolic(cls, a: float = 0.0):
        return cls("parabolic", a=float(a))


@dataclass(frozen=True)
class ChartPoint:
    """Coordinates ``(x, y)`` and conjugate momenta ``(px, py)`` in a chart."""

    chart: Chart
    x: float
    y: float
    px: float
    py: float

    def as_tuple(self):
        return (self.x, self.y, self.px, self.py)


@dataclass(frozen=True)
class LiouvilleForm:
    sigma: Callable
    tau: Callable
    f: Callable
    g: Callable

    def hamiltonian(self, x, y, px, py):
        return (px * px + py * py + self.f(x) + self.g(y)) / (self.sigma(x) + self.tau(y))


def _val(x):
    return x.value if isinstance(x, Jet) else x


# coordinate maps --------------------------------------------------------------

def _to_chart_expr(c: Chart, u, v, pu, pv):
    if c.kind == "native":
        return u, v, pu, pv
    if c.kind == "rotated":
        ct, st = math.cos(c.theta), math.sin(c.theta)
        return (u * ct - v * st, u * st + v * ct, ct * pu - st * pv, st * pu + ct * pv)
    d = u - c.a
    d0, v0 = float(np.asarray(_val(d))), float(np.asarray(_val(v)))
    if d0 == 0.0 and v0 == 0.0:
        raise ChartSingular("xi = eta = 0: parabolic Jacobian has rank zero")
    R = jets.sqrt(d * d + v * v)
    # pick the well-conditioned square root and recover the other from xi*eta = v
    if d0 >= 0:
        xi = jets.sqrt(d + R)
        eta = v / xi
    else:
        ea = jets.sqrt(R - d)
        eta = ea if v0 >= 0 else -ea
        xi = v / eta
    p_xi = xi * pu + eta * pv
    p_eta = -eta * pu + xi * pv
    return xi, eta, p_xi, p_eta


def _from_chart_expr(c: Chart, x, y, px, py):
    if c.kind == "native":
        return x, y, px, py
    if c.kind == "rotated":
        ct, st = math.cos(c.theta), math.sin(c.theta)
        return (x * ct + y * st, -x * st + y * ct, ct * px + st * py, -st * px + ct * py)
    n = x * x + y * y
    if float(np.asarray(_val(n))) == 0.0:
        raise ChartSingular("xi = eta = 0: parabolic Jacobian has rank zero")
    u = 0.5 * (x * x - y * y) + c.a
    v = x * y
    pu = (x * px - y * py) / n
    pv = (y * px + x * py) / n
    return u, v, pu, pv


def to_chart(c: Chart, p: PhasePoint) -> ChartPoint:
    """Map a phase point into chart coordinates with canonically pushed momenta."""
    out = _to_chart_expr(c, p.u, p.v, p.pu, p.pv)
    return ChartPoint(c, *(float(t) for t in out))


def from_chart(c: Chart, q: ChartPoint) -> PhasePoint:
    out = _from_chart_expr(c, q.x, q.y, q.px, q.py)
    if c.kind == "parabolic" and out[1] == 0:
        out = (out[0], 0.0, out[2], out[3])
    return PhasePoint(*(float(t) for t in out))


def chart_brackets(c: Chart, p: PhasePoint) -> np.ndarray:
    """4x4 matrix of native Poisson brackets among ``(x, y, px, py)``.

    A canonical chart gives the standard symplectic matrix.
    """
    u, v, pu, pv = phase.phase_jets(p.as_array(), 1)
    comps = _to_chart_expr(c, u, v, pu, pv)
    comps = [t if isinstance(t, Jet) else Jet.constant(u.space, t) for t in comps]
    out = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            out[i, j] = float(bracket_jets(comps[i], comps[j]).value)
    return out


STANDARD_SYMPLECTIC = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], float)


# characteristic roots ---------------------------------------------------------

def _scaled_matrix(cf: QuadraticCoeffs, u, v):
    """``4u`` times the momentum matrix of ``a X1 + b X2 + c K^2``."""
    m11 = cf.a * (-2 * v) + cf.b * (-v * v)
    m12 = cf.a * (2 * u) + cf.b * (2 * u * v)
    m22 = cf.a * (-2 * v) + cf.b * (-4 * u * u - v * v) + cf.c * 4 * u
    return m11, m12, m22


def char_roots(cf: QuadraticCoeffs, u: float, v: float):
    """Roots of ``det(A - rho g^{-1}) = 0`` for the integral with coefficients ``cf``.

    ``A`` is the momentum matrix of ``a X1 + b X2 + c K^2`` at ``(u, v)`` and the
    inverse metric is ``delta / (4u)``. Ordering follows the chart labels:
    ``X1``-type and ``K^2``-type roots ascend (``rho1 = -2(Cu+v)`` first);
    ``X2``-type roots descend (``rho1 = eta^2 (2a - eta^2)`` first).
    """
    kind = classify_integral(cf)
    m11, m12, m22 = _scaled_matrix(cf, float(u), float(v))
    mean = 0.5 * (m11 + m22)
    disc = math.hypot(0.5 * (m11 - m22), m12)
    lo, hi = mean - disc, mean + disc
    if disc <= 1e-14 * (1.0 + abs(mean)):
        raise DegenerateRoots(f"coincident characteristic roots {lo} at (u, v) = ({u}, {v})")
    return (hi, lo) if kind == "X2type" else (lo, hi)


def case1_coordinates(C: float, p: PhasePoint):
    """``(r, s, p_r, p_s)`` with ``r = -2(Cu+v)``, ``s = (2/C)(u - Cv)``."""
    r = -2 * (C * p.u + p.v)
    s = 2 / C * (p.u - C * p.v)
    # pu = -2C p_r + (2/C) p_s, pv = -2 p_r - 2 p_s, inverted
    det = 4 * C + 4 / C
    pr = (-2 * p.pu - 2 / C * p.pv) / det
    ps = (2 * p.pu - 2 * C * p.pv) / det
    return r, s, pr, ps


def case1_hamiltonian(C, r, s, pr, ps):
    """Free Hamiltonian in the root coordinates of ``X1 + sinh(c) K^2``."""
    return 2 * (C * C + 1) ** 2 / (C * (s - r)) * (ps * ps / (C * C) + pr * pr)


def case1_integral(C, r, s, pr, ps):
    return 2 * (C * C + 1) ** 2 / (C * (s - r)) * (r * ps * ps / (C * C) + s * pr * pr)


def case2_hamiltonian(a, xi, eta, pxi, peta):
    return (pxi ** 2 + peta ** 2) / (2 * (xi ** 2 + eta ** 2) * (xi ** 2 - eta ** 2 + 2 * a))


def case2_integral(a, xi, eta, pxi, peta):
    num = eta ** 2 * (2 * a - eta ** 2) * pxi ** 2 - xi ** 2 * (xi ** 2 + 2 * a) * peta ** 2
    return num / (2 * (xi ** 2 + eta ** 2) * (xi ** 2 - eta ** 2 + 2 * a))


# Liouville forms -----------------------------------------------------------------

def _zero(x):
    return 0 * x


def liouville_form(c: Chart, m: ModelSpec) -> LiouvilleForm:
    """Separated data ``(sigma, tau, f, g)`` of model ``m`` in chart ``c``."""
    if c.kind not in COMPATIBLE[m.potential]:
        raise IncompatibleChart(f"{m.potential} does not separate in the {c.kind} chart")
    pot = m.potential
    if c.kind == "native":
        sigma, tau = (lambda x: 4 * x), _zero
        if pot == "Free":
            return LiouvilleForm(sigma, tau, _zero, _zero)
        if pot == "P1":
            b1, b2, b3 = m.params
            return LiouvilleForm(sigma, tau, lambda x: 4 * b1 * x * x + 4 * b2,
                                 lambda y: b1 * y * y + 4 * b3 / (y * y))
        if pot == "P2":
            a1, a2, a3 = m.params
            return LiouvilleForm(sigma, tau, lambda x: 4 * a1 + 4 * a3 * x * x,
                                 lambda y: 4 * a2 * y + 4 * a3 * y * y)
        (a,) = m.params
        return LiouvilleForm(sigma, tau, lambda x: 4 * a + 0 * x, _zero)
    if c.kind == "rotated":
        ct, st = math.cos(c.theta), math.sin(c.theta)
        sigma, tau = (lambda x: 4 * ct * x), (lambda y: 4 * st * y)
        if pot == "Free":
            return LiouvilleForm(sigma, tau, _zero, _zero)
        if pot == "P2":
            a1, a2, a3 = m.params
            return LiouvilleForm(sigma, tau, lambda x: 4 * a1 - 4 * a2 * st * x + 4 * a3 * x * x,
                                 lambda y: 4 * a2 * ct * y + 4 * a3 * y * y)
        (a,) = m.params
        return LiouvilleForm(sigma, tau, lambda x: 4 * a + 0 * x, _zero)
    ap = c.a
    sigma = lambda x: 2 * x ** 4 + 4 * ap * x * x  # noqa: E731
    tau = lambda y: -2 * y ** 4 + 4 * ap * y * y  # noqa: E731
    if pot == "Free":
        return LiouvilleForm(sigma, tau, _zero, _zero)
    if pot == "P1":
        b1, b2, b3 = m.params

        def f(x):
            x2 = x * x
            return b1 * (x2 ** 3 + 4 * ap * x2 * x2 + 4 * ap * ap * x2) + 4 * b2 * x2 + 4 * b3 / x2

        def g(y):
            y2 = y * y
            return b1 * (y2 ** 3 - 4 * ap * y2 * y2 + 4 * ap * ap * y2) + 4 * b2 * y2 + 4 * b3 / y2

        return LiouvilleForm(sigma, tau, f, g)
    (a,) = m.params
    return LiouvilleForm(sigma, tau, lambda x: 4 * a * x * x, lambda y: 4 * a * y * y)


def liouville_check(c: Chart, m: ModelSpec, p: PhasePoint) -> float:
    """``|H(p) - H_Liouville(to_chart(p))|``."""
    form = liouville_form(c, m)
    q = to_chart(c, p)
    h_native = phase.eval_hamiltonian(p, m)
    return abs(h_native - form.hamiltonian(q.x, q.y, q.px, q.py))


def flattened_level_set(m: ModelSpec, p: PhasePoint, E: float) -> float:
    """Residual of ``pu^2 + pv^2 + 4u V - 4 E u = 0``, i.e. ``4u (H - E)``."""
    phase.check_domain(m, p.u, p.v)
    return p.pu ** 2 + p.pv ** 2 + 4 * p.u * phase.potential(m, p.u, p.v) - 4 * E * p.u


# Hamilton-Jacobi actions --------------------------------------------------------

def hj_action_rotated(theta: float, E: float, lam: float, r, s):
    """Separable free action in the rotated chart."""
    ct, st = math.cos(theta), math.sin(theta)
    return (jets.power(4 * E * r * ct - lam, 1.5) / (6 * E * ct)
            + jets.power(4 * E * s * st + lam, 1.5) / (6 * E * st))


def hj_action_native(E: float, k: float, u, v):
    """Separable free action in the native chart."""
    return jets.power(4 * E * u - k * k, 1.5) / (6 * E) + k * v


def hj_gradient_parabolic(E: float, a: float, lam: float, xi, eta):
    """``(S_xi, S_eta)`` for the parabolic chart (integrands of the elliptic action).

    The coefficient of ``xi^2`` and ``eta^2`` is ``4 E a``; this is what makes
    ``S_xi^2 + S_eta^2 = 2E (xi^2 + eta^2)(xi^2 - eta^2 + 2a)`` hold.
    """
    sx = np.sqrt(2 * E * xi ** 4 + 4 * E * a * xi ** 2 - lam)
    se = np.sqrt(-2 * E * eta ** 4 + 4 * E * a * eta ** 2 + lam)
    return sx, se


def hj_residual(kind: str, params: dict, x: float, y: float) -> float:
    """``H(dS) - E`` for the chosen action at chart point ``(x, y)``.

    ``kind`` is ``rotated`` (params theta, E, lam), ``native`` (params E, k) or
    ``parabolic`` (params E, a, lam).  Gradients of closed-form actions come
    from first-order jets.
    """
    E = params["E"]
    if kind == "parabolic":
        a = params["a"]
        sx, se = hj_gradient_parabolic(E, a, params["lam"], x, y)
        if not (np.isfinite(sx) and np.isfinite(se)):
            raise DomainError("radicands negative at this point")
        return float((sx * sx + se * se) / (2 * (x * x + y * y) * (x * x - y * y + 2 * a)) - E)
    X, Y = jets.variables(2, 1, [float(x), float(y)])
    # negative radicands show up as nan and are reported below
    with np.errstate(invalid="ignore"):
        if kind == "rotated":
            th = params["theta"]
            S = hj_action_rotated(th, E, params["lam"], X, Y)
            denom = 4 * (x * math.cos(th) + y * math.sin(th))
        elif kind == "native":
            S = hj_action_native(E, params["k"], X, Y)
            denom = 4 * x
        else:
            raise ValueError(f"unknown action kind {kind!r}")
    g = S.gradient()
    if not np.all(np.isfinite(g)):
        raise DomainError("action not real at this point")
    return float((g[0] ** 2 + g[1] ** 2) / denom - E)
