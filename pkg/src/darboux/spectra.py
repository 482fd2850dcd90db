"""Separated one-dimensional eigenproblems: Numerov oracle and quantization conditions.

Every problem has the form ``psi'' + Q(x) psi = 0`` with
``Q = base(x) + E*coef_E(x) + mu*coef_mu(x)``, one of ``E`` or ``mu`` active.
Multiplying ``H psi = E psi`` by ``-(sigma + tau)`` in a Liouville chart gives

    psi_x'' + (E sigma(x) - f(x) - mu) psi = 0,
    psi_y'' + (E tau(y)  - g(y) + mu) psi = 0.

The Numerov solver is the independent oracle for the special-function
conditions (``D_nu`` zeros, ``1F1`` zeros and the periodic Wronskian).
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import charts, jets, kernels, operators, specfun
from .charts import Chart
from .errors import (NodeMismatch, NotBracketed, RangeError,
                     SpectrumUnbounded)
from .phase import ModelSpec

log = logging.getLogger(__name__)

DEFAULT_H = 1e-3
WKB_EXPONENT = 40.0
SCAN_PANELS = 400
CLOSED_GAP_TOL = 1e-9


# boundary conditions ---------------------------------------------------------------

@dataclass(frozen=True)
class BC:
    """Boundary condition; build with the helper constructors below."""

    kind: str
    a: float = 1.0
    b: float = 0.0
    start: Optional[Callable] = None


def Dirichlet():
    return BC("dirichlet")


def Robin(a: float, b: float):
    """``a psi + b psi' = 0``."""
    if a == 0 and b == 0:
        raise ValueError("Robin condition needs (a, b) != (0, 0)")
    return BC("robin", a, b)


def Decay():
    return BC("decay")


def Periodic():
    return BC("periodic")


def Regular(start: Callable):
    """Regular singular endpoint: ``start(lam, x0, h) -> (psi(x0), psi(x0 + h))``."""
    return BC("regular", start=start)


# problems -------------------------------------------------------------------------

def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass
class SpectralProblem:
    base: Callable
    coef_E: Callable
    coef_mu: Callable
    lo: float
    hi: float
    bc_lo: BC = field(default_factory=Decay)
    bc_hi: BC = field(default_factory=Decay)
    active: str = "E"
    E: float = 0.0
    mu: float = 0.0
    center: Optional[float] = None
    name: str = "problem"
    solutions: Optional[Callable] = None

    def __post_init__(self):
        if self.active not in ("E", "mu"):
            raise ValueError("active parameter must be 'E' or 'mu'")
        if not self.lo < self.hi:
            raise ValueError("empty domain")

    def weight(self, x):
        return np.asarray(self.coef_E(x) if self.active == "E" else self.coef_mu(x), dtype=float)

    def q0(self, x):
        x = np.asarray(x, dtype=float)
        if self.active == "E":
            return self.base(x) + self.mu * self.coef_mu(x)
        return self.base(x) + self.E * self.coef_E(x)

    def Q(self, x, lam):
        return self.q0(x) + lam * self.weight(x)

    def with_(self, **kw) -> "SpectralProblem":
        return dataclasses.replace(self, **kw)

    @property
    def periodic(self):
        return self.bc_lo.kind == "periodic" or self.bc_hi.kind == "periodic"

    def _center(self):
        if self.center is not None:
            return self.center
        if math.isfinite(self.lo) and math.isfinite(self.hi):
            return 0.5 * (self.lo + self.hi)
        if math.isfinite(self.lo):
            return self.lo
        if math.isfinite(self.hi):
            return self.hi
        return 0.0


@dataclass
class Level:
    n: int
    value: float
    residual: float
    nodes: int

    def to_dict(self):
        return dict(n=self.n, value=self.value, residual=self.residual, nodes=self.nodes)


@dataclass
class SpectrumResult:
    problem: str
    params: dict
    levels: list

    def values(self):
        return np.array([lv.value for lv in self.levels])

    def to_dict(self):
        return dict(problem=self.problem, params=self.params,
                    levels=[lv.to_dict() for lv in self.levels])


# derivation from the Hamiltonian ---------------------------------------------------------

def derive_separated(m: ModelSpec, chart: Chart):
    """The two separated problems of ``m`` in ``chart`` (default infinite domains).

    The first problem carries ``+E sigma - f - mu``, the second ``+E tau - g + mu``.
    """
    form = charts.liouville_form(chart, m)

    def one():
        return lambda x: np.ones_like(np.asarray(x, dtype=float))

    def neg(fn):
        return lambda x: -np.asarray(fn(np.asarray(x, dtype=float)) + 0 * np.asarray(x, float))

    def vec(fn):
        return lambda x: np.asarray(fn(np.asarray(x, dtype=float)) + 0 * np.asarray(x, float), float)

    lo1 = 0.0 if chart.kind == "native" else -math.inf
    p1 = SpectralProblem(neg(form.f), vec(form.sigma), lambda x: -one()(x), lo1, math.inf,
                         name=f"{m.potential}/{chart.kind}/x")
    p2 = SpectralProblem(neg(form.g), vec(form.tau), one(), -math.inf, math.inf, active="mu",
                         name=f"{m.potential}/{chart.kind}/y")
    return p1, p2


def oscillator_problem():
    """``psi'' + (2E - x^2) psi = 0`` on the line; E_n = n + 1/2."""
    return SpectralProblem(lambda x: -np.asarray(x) ** 2, lambda x: 2 + 0 * np.asarray(x),
                           _zero, -math.inf, math.inf, name="oscillator", center=0.0)


def box_problem(L: float = math.pi):
    """``psi'' + 2E psi = 0`` with Dirichlet ends on [0, L]."""
    return SpectralProblem(_zero, lambda x: 2 + 0 * np.asarray(x), _zero, 0.0, L,
                           Dirichlet(), Dirichlet(), name="box")


def plane_wave_periodic(T: float = 2 * math.pi):
    """``psi'' + 2E psi = 0`` with period ``T``; closed-form fundamental pair supplied."""

    def sols(lam):
        if lam == 0:
            return (lambda x: (1.0, 0.0)), (lambda x: (x, 1.0))
        if lam < 0:
            k = math.sqrt(-2 * lam)
            return ((lambda x: (math.cosh(k * x), k * math.sinh(k * x))),
                    (lambda x: (math.sinh(k * x), k * math.cosh(k * x))))
        k = math.sqrt(2 * lam)
        return ((lambda x: (math.cos(k * x), -k * math.sin(k * x))),
                (lambda x: (math.sin(k * x), k * math.cos(k * x))))

    return SpectralProblem(_zero, lambda x: 2 + 0 * np.asarray(x), _zero, 0.0, T,
                           Periodic(), Periodic(), name="plane_wave", solutions=sols)


# Numerov oracle -------------------------------------------------------------------

def _fd(fn, x, k):
    h = 1e-4 * max(1.0, abs(x))
    if k == 1:
        return float((fn(x + h) - fn(x - h)) / (2 * h))
    return float((fn(x + h) - 2 * fn(x) + fn(x - h)) / (h * h))


def _lower_bound(prob: SpectralProblem):
    c = prob._center()
    a = prob.lo if math.isfinite(prob.lo) else c - 50.0
    b = prob.hi if math.isfinite(prob.hi) else c + 50.0
    if prob.bc_lo.kind == "regular":
        a = prob.lo
    x = np.linspace(a, b, 20001)
    w = prob.weight(x)
    if np.any(w <= 0):
        raise ValueError("the active parameter must multiply a positive weight")
    # an attracting Robin end (psi'/psi = -a/b < 0 at lo) can bind a surface state
    # down to -kappa^2 below the potential, kappa = a/b
    kappa = prob.bc_lo.a / prob.bc_lo.b if prob.bc_lo.kind == "robin" and prob.bc_lo.b != 0 else 0.0
    with np.errstate(all="ignore"):
        r = (-prob.q0(x) - max(kappa, 0.0) ** 2) / w
    r = r[np.isfinite(r)]
    return float(np.min(r))


def _wkb_end(prob, lam, x_ref, direction):
    """Point beyond the outer turning point where the WKB exponent reaches 40."""
    offs = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 6000)])
    xs = x_ref + direction * offs
    with np.errstate(all="ignore"):
        q = prob.Q(xs, lam)
    ok = np.flatnonzero(q >= 0)
    xt = xs[ok[-1]] if ok.size else x_ref
    total = 0.0
    x = xt
    dx = 1e-3
    while total < WKB_EXPONENT:
        xx = x + direction * dx * np.arange(1, 2001)
        with np.errstate(all="ignore"):
            s = np.sqrt(np.maximum(-prob.Q(xx, lam), 0.0))
        cum = total + np.cumsum(s) * dx
        hit = np.flatnonzero(cum >= WKB_EXPONENT)
        if hit.size:
            return float(xx[hit[0]])
        total = float(cum[-1])
        x = float(xx[-1])
        dx *= 2
        if abs(x - x_ref) > 1e6:
            raise SpectrumUnbounded(f"{prob.name}: no decaying channel (Q does not become negative)")
    return float(x)


def _domain(prob, lam):
    lo, hi = prob.lo, prob.hi
    c = prob._center()
    if not math.isfinite(lo):
        lo = min(_wkb_end(prob, lam, c, -1), c - 1.0)
    if not math.isfinite(hi):
        hi = max(_wkb_end(prob, lam, c, +1), c + 1.0)
    return lo, hi


class _Grid:
    def __init__(self, prob, lo, hi, h, extra=0):
        n = max(4, math.ceil((hi - lo) / h - 1e-9))
        self.h = (hi - lo) / n
        self.x = lo + self.h * np.arange(n + 1 + extra)
        self.q0 = np.asarray(prob.q0(self.x), dtype=float)
        self.w = prob.weight(self.x)
        self.n = n
        self.lo, self.hi = lo, hi


def _taylor_start(prob, lam, x0, y0, dy0, h):
    Q = lambda x: float(prob.Q(np.asarray(x, float), lam))  # noqa: E731
    q, q1, q2 = Q(x0), _fd(Q, x0, 1), _fd(Q, x0, 2)
    y2 = -q * y0
    y3 = -q1 * y0 - q * dy0
    y4 = -q2 * y0 - 2 * q1 * dy0 + q * q * y0
    return y0 + h * dy0 + h * h / 2 * y2 + h ** 3 / 6 * y3 + h ** 4 / 24 * y4


def _start_values(prob, grid, lam):
    bc = prob.bc_lo
    h = grid.h
    if bc.kind in ("dirichlet", "decay"):
        return 0.0, h
    if bc.kind == "robin":
        y0, dy0 = bc.b, -bc.a
        return y0, _taylor_start(prob, lam, grid.lo, y0, dy0, h)
    if bc.kind == "regular":
        return bc.start(lam, grid.lo, h)
    raise ValueError(f"unsupported lower boundary {bc.kind!r}")


def _shoot(prob, grid, lam):
    if prob.bc_hi.kind not in ("dirichlet", "decay"):
        raise ValueError("the upper boundary must be Dirichlet or Decay")
    q = grid.q0 + lam * grid.w
    y0, y1 = _start_values(prob, grid, lam)
    y_end, _, nodes = kernels.numerov_shoot(q, y0, y1, grid.h)
    return y_end, nodes


def _bracket(prob, n, h):
    lam_lo = _lower_bound(prob)
    step = 1.0 + abs(lam_lo) * 0.1
    for _ in range(60):
        g = _Grid(prob, *_domain(prob, lam_lo + step), h)
        _, nodes = _shoot(prob, g, lam_lo)
        if nodes <= n:
            break
        lam_lo -= step
        step *= 2
    else:
        raise NotBracketed(f"{prob.name}: no lower bracket for level {n}")
    lam_hi = lam_lo + step
    for _ in range(80):
        g = _Grid(prob, *_domain(prob, lam_hi), h)
        _, nodes = _shoot(prob, g, lam_hi)
        if nodes >= n + 1:
            return lam_lo, lam_hi
        lam_lo = lam_hi
        step *= 2
        lam_hi = lam_lo + step
    raise NotBracketed(f"{prob.name}: could not bracket level {n}")


def _numerov_level(prob, n, h, tol=1e-14):
    lo, hi = _bracket(prob, n, h)
    grid = _Grid(prob, *_domain(prob, hi), h)
    # the fixed truncation must still bracket the level
    while _shoot(prob, grid, lo)[1] > n:
        lo -= (hi - lo)
    while _shoot(prob, grid, hi)[1] < n + 1:
        hi += (hi - lo)
        grid = _Grid(prob, *_domain(prob, hi), h)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        if _shoot(prob, grid, mid)[1] >= n + 1:
            hi = mid
        else:
            lo = mid
    nodes = _shoot(prob, grid, lo)[1]
    if nodes != n:
        raise NodeMismatch(f"{prob.name}: level {n} has {nodes} nodes")
    return 0.5 * (lo + hi), nodes


def numerov_eigen(prob: SpectralProblem, n: int, h: float = DEFAULT_H) -> float:
    """n-th eigenvalue (Sturm node count ``n``) of a Dirichlet/Robin/regular problem."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    if prob.periodic:
        return numerov_periodic(prob, n, h)
    return _numerov_level(prob, n, h)[0]


def numerov_level(prob: SpectralProblem, n: int, h: float = DEFAULT_H) -> Level:
    """Eigenvalue with a Richardson error estimate ``|E(h) - E(2h)| / 15``."""
    if prob.periodic:
        v = numerov_periodic(prob, n, h)
        v2 = numerov_periodic(prob, n, 2 * h)
        return Level(n, v, abs(v - v2) / 15.0, 0 if n == 0 else 2 * ((n + 1) // 2))
    v, nodes = _numerov_level(prob, n, h)
    v2, _ = _numerov_level(prob, n, 2 * h)
    return Level(n, v, abs(v - v2) / 15.0, nodes)


def numerov_spectrum(prob: SpectralProblem, count: int, h: float = DEFAULT_H) -> SpectrumResult:
    levels = [numerov_level(prob, n, h) for n in range(count)]
    return SpectrumResult(prob.name, {"E": prob.E, "mu": prob.mu, "active": prob.active, "h": h},
                          levels)


def numerov_solution(prob: SpectralProblem, lam: float, h: float = DEFAULT_H):
    """Grid and Numerov solution at parameter ``lam`` (for plotting and checks)."""
    grid = _Grid(prob, *_domain(prob, lam), h)
    y0, y1 = _start_values(prob, grid, lam)
    y, nodes = kernels.numerov_sweep(grid.q0 + lam * grid.w, y0, y1, grid.h)
    return grid.x, y, nodes


# periodic problems ------------------------------------------------------------------

def _end_data(prob, grid, lam, y0, dy0):
    """Value and derivative at ``x0 + T`` for initial data at ``x0``."""
    h = grid.h
    q = grid.q0 + lam * grid.w  # grid extends one step past the end
    y1 = _taylor_start(prob, lam, grid.lo, y0, dy0, h)
    y_np1, y_n, _ = kernels.numerov_shoot(q, y0, y1, h)
    c = h * h / 12.0
    n = grid.n
    y_nm1 = (2 * (1 - 5 * c * q[n]) * y_n - (1 + c * q[n + 1]) * y_np1) / (1 + c * q[n - 1])
    Q = lambda x: float(prob.Q(np.asarray(x, float), lam))  # noqa: E731
    qn, dq = q[n], _fd(Q, grid.x[n], 1)
    d0 = (y_np1 - y_nm1) / (2 * h)
    dy = (d0 + h * h * dq * y_n / 6) / (1 - h * h * qn / 6)
    return y_n, dy


def floquet_trace(prob: SpectralProblem, lam: float, h: float = DEFAULT_H) -> float:
    """Trace of the period map over ``[lo, hi]`` by Numerov (the discriminant)."""
    grid = _Grid(prob, prob.lo, prob.hi, h, extra=1)
    y1, _ = _end_data(prob, grid, lam, 1.0, 0.0)
    _, d2 = _end_data(prob, grid, lam, 0.0, 1.0)
    return y1 + d2


def _bisect(fn, a, b, fa=None, tol=1e-13, maxit=200):
    fa = fn(a) if fa is None else fa
    fb = fn(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise NotBracketed(f"no sign change on [{a}, {b}]")
    for _ in range(maxit):
        m = 0.5 * (a + b)
        if b - a <= tol * max(1.0, abs(m)) or m in (a, b):
            break
        fm = fn(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def numerov_periodic(prob: SpectralProblem, n: int, h: float = DEFAULT_H) -> float:
    """n-th periodic eigenvalue (0, 1, 2, ... counting multiplicity).

    Dirichlet eigenvalues ``d_k`` on the period cell lie in the closed
    instability intervals; ``d_{2j}`` separates the periodic pair
    ``(lam_{2j-1}, lam_{2j})``. Roots of ``trace - 2`` are bisected on those
    brackets. A closed gap (``trace(d_{2j}) - 2`` below ``CLOSED_GAP_TOL``,
    i.e. below the discretisation noise) gives a double level.
    """
    cell = prob.with_(bc_lo=Dirichlet(), bc_hi=Dirichlet())
    disc = lambda lam: floquet_trace(prob, lam, h) - 2.0  # noqa: E731
    if n == 0:
        d1 = numerov_eigen(cell, 0, h)
        lo = _lower_bound(prob) - 1.0
        step = 1.0
        while disc(lo) <= 0:
            lo -= step
            step *= 2
        return _bisect(disc, lo, d1)
    j = (n + 1) // 2
    d_mid = numerov_eigen(cell, 2 * j - 1, h)
    g = disc(d_mid)
    if g <= CLOSED_GAP_TOL:
        return d_mid
    if n % 2 == 1:
        return _bisect(disc, numerov_eigen(cell, 2 * j - 2, h), d_mid)
    return _bisect(disc, d_mid, numerov_eigen(cell, 2 * j, h))


def periodic_wronskian_condition(prob: SpectralProblem, period: float | None = None,
                                 x0: float | None = None) -> Callable[[float], float]:
    """``W[f1(x) - f1(x+T), f2(x) - f2(x+T)] / W[f1, f2]`` at ``x0`` as a function of the parameter.

    Equals ``2 - trace(M)``; zero exactly at periodic eigenvalues. Uses the
    problem's closed-form solutions when available, otherwise a Numerov pair.
    """
    T = prob.hi - prob.lo if period is None else period
    x0 = prob.lo if x0 is None else x0

    def cond(lam):
        if prob.solutions is None:
            return 2.0 - floquet_trace(prob.with_(lo=x0, hi=x0 + T), lam)
        f1, f2 = prob.solutions(lam)
        a0, da0 = f1(x0)
        b0, db0 = f2(x0)
        a1, da1 = f1(x0 + T)
        b1, db1 = f2(x0 + T)
        g1, dg1 = a0 - a1, da0 - da1
        g2, dg2 = b0 - b1, db0 - db1
        w0 = a0 * db0 - da0 * b0
        return (g1 * dg2 - dg1 * g2) / w0

    return cond


def raw_periodic_wronskian(prob: SpectralProblem, lam: float, x0: float | None = None,
                           h: float = 1e-3) -> float:
    """Unnormalised Wronskian of differences with fourth-order difference derivatives."""
    T = prob.hi - prob.lo
    x0 = prob.lo if x0 is None else x0
    f1, f2 = prob.solutions(lam)
    g1 = lambda x: f1(x)[0] - f1(x + T)[0]  # noqa: E731
    g2 = lambda x: f2(x)[0] - f2(x + T)[0]  # noqa: E731
    return specfun.wronskian(g1, g2, x0, h)


# root finding for special-function conditions -------------------------------------

def _safe(cond, x):
    try:
        v = float(cond(x))
    except (RangeError, OverflowError, ZeroDivisionError):
        return math.nan
    return v


def find_roots(cond: Callable, lo: float, hi: float, count: int, panels: int = SCAN_PANELS,
               tol: float = 1e-13, expand: bool = True, tangent_tol: float = 1e-8):
    """The first ``count`` roots above ``lo`` by uniform scan plus bisection.

    The window is doubled until enough roots are found. Local minima of
    ``|cond|`` below ``tangent_tol`` without a sign change are accepted as
    double roots (closed gaps of periodic problems).
    """
    for _ in range(30):
        xs = np.linspace(lo, hi, panels + 1)
        fs = np.array([_safe(cond, x) for x in xs])
        roots = []
        for i in range(panels):
            fa, fb = fs[i], fs[i + 1]
            if not (math.isfinite(fa) and math.isfinite(fb)):
                continue
            if fa == 0.0:
                roots.append(xs[i])
            elif fa * fb < 0:
                roots.append(_bisect(cond, xs[i], xs[i + 1], fa, tol))
            elif (0 < i and math.isfinite(fs[i - 1]) and abs(fa) < abs(fs[i - 1])
                  and abs(fa) <= abs(fb) and _same_sign(fs[max(0, i - 2):i + 3])):
                xm, fm = _golden_min(lambda x: abs(_safe(cond, x)), xs[i - 1], xs[i + 1])
                if fm <= tangent_tol:
                    roots.extend([xm, xm])
        roots = sorted(roots)
        log.debug("scan [%g, %g]: %d roots", lo, hi, len(roots))
        if len(roots) >= count or not expand:
            return roots[:count]
        hi = lo + 2 * (hi - lo)
    raise NotBracketed(f"found only {len(roots)} of {count} roots up to {hi}")


def _same_sign(vals):
    v = vals[np.isfinite(vals)]
    return bool(np.all(v > 0) or np.all(v < 0))


def _golden_min(fn, a, b, iters=80):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return (c, fc) if fc < fd else (d, fd)


# P1 ---------------------------------------------------------------------------------

def p1_model(beta: float, b2: float, gamma: float) -> ModelSpec:
    """Confining branch ``b1 = beta^2``, ``b3 = (gamma^2 - 1/4)/4``."""
    return ModelSpec.p1(beta * beta, b2, (gamma * gamma - 0.25) / 4)


def _frobenius_start(beta, gamma):
    s = gamma + 0.5

    def series(lam, x):
        c = [1.0, 0.0, 0.0, 0.0]
        total = 1.0
        xk = 1.0
        k = 1
        while True:
            ck = ((beta * beta * c[k - 4] if k >= 4 else 0.0)
                  - (lam * c[k - 2] if k >= 2 else 0.0)) / (k * (2 * s + k - 1))
            c.append(ck) if k >= 4 else c.__setitem__(k, ck)
            xk *= x
            term = ck * xk
            total += term
            if k > 8 and abs(term) < 1e-18 * abs(total) and abs(c[k - 1] * xk / x) < 1e-17 * abs(total):
                break
            k += 1
            if k > 2000:
                break
        return x ** s * total

    def start(lam, x0, h):
        return series(lam, x0), series(lam, x0 + h)

    return start


def p1_u_problem(beta: float, b2: float, mu: float, robin=(1.0, 0.0)) -> SpectralProblem:
    """``U'' + (4Eu - 4 beta^2 u^2 - 4 b2 - mu) U = 0`` on ``[1/2, inf)``."""
    if beta == 0:
        raise SpectrumUnbounded("b1 <= 0: the u-problem has no decaying channel")
    b1 = beta * beta
    a, b = robin
    bc = Dirichlet() if b == 0 else Robin(a, b)
    return SpectralProblem(lambda x: -4 * b1 * np.asarray(x) ** 2 - 4 * b2,
                           lambda x: 4 * np.asarray(x), lambda x: -1 + 0 * np.asarray(x),
                           0.5, math.inf, bc, Decay(), "E", mu=mu, name="P1/u",
                           center=0.5)


def p1_v_problem(beta: float, gamma: float, E: float = 0.0, eps: float = 0.5,
                 L: float = 2 * math.pi) -> SpectralProblem:
    """``V'' + (mu - beta^2 v^2 - (gamma^2 - 1/4)/v^2) V = 0`` on ``(0, 2 pi]``, ``V(2 pi) = 0``.

    The regular singular end is started at ``eps`` from the ``v^(gamma+1/2)``
    Frobenius series.
    """
    b1 = beta * beta
    c = gamma * gamma - 0.25
    return SpectralProblem(lambda x: -b1 * np.asarray(x) ** 2 - c / np.asarray(x) ** 2,
                           _zero, lambda x: 1 + 0 * np.asarray(x), eps, L,
                           Regular(_frobenius_start(beta, gamma)), Dirichlet(), "mu", E=E,
                           name="P1/v")


def p1_nu(E, beta, b2, mu):
    """Weber index of the u-factor: ``nu + 1/2 = (E^2/beta^2 - 4 b2 - mu) / (4 beta)``."""
    return (E * E / (beta * beta) - 4 * b2 - mu) / (4 * beta) - 0.5


def p1_z(u, E, beta):
    return 2 * math.sqrt(beta) * (u - E / (2 * beta * beta))


def p1_u_condition(beta, b2, mu, robin=(1.0, 0.0)):
    a, b = robin
    k = 2 * math.sqrt(beta)

    def cond(E):
        nu = p1_nu(E, beta, b2, mu)
        d, dd = specfun.parabolic_d_deriv(nu, p1_z(0.5, E, beta))
        return a * d + b * k * dd

    return cond


def quantize_p1_u(beta: float, b2: float, mu: float, n: int, robin=(1.0, 0.0)) -> float:
    """n-th root in E of the ``D_nu`` boundary condition at ``u = 1/2``."""
    if beta <= 0:
        raise SpectrumUnbounded("confining branch requires beta > 0")
    # one cached scan serves the first few levels
    return p1_u_levels(beta, b2, mu, max(n + 1, 5), tuple(robin))[n]


@functools.lru_cache(maxsize=64)
def p1_u_levels(beta, b2, mu, count, robin=(1.0, 0.0)):
    """First ``count`` roots of the u-condition (cached; the scan dominates the cost)."""
    prob = p1_u_problem(beta, b2, mu, robin)
    lo = _lower_bound(prob) - 1.0
    return tuple(float(r) for r in find_roots(p1_u_condition(beta, b2, mu, robin), lo, lo + 8.0, count))


def p1_v_a(mu, beta, gamma, sign=+1):
    return 0.5 * (1 + sign * gamma) - mu / (4 * beta)


def p1_v_condition(beta, gamma, L=2 * math.pi):
    z = beta * L * L
    return lambda mu: specfun.kummer_1f1(p1_v_a(mu, beta, gamma), 1 + gamma, z).value


def quantize_p1_v(beta: float, gamma: float, n: int, L: float = 2 * math.pi) -> float:
    """n-th root in mu of ``1F1((1+gamma)/2 - mu/(4 beta), 1+gamma, beta L^2) = 0``."""
    if gamma <= 0.5:
        raise ValueError("gamma > 1/2 required")
    lo = _lower_bound(p1_v_problem(beta, gamma, L=L)) - 1.0
    return find_roots(p1_v_condition(beta, gamma, L), lo, lo + 20.0, n + 1)[n]


def p1_v_solution(beta, gamma, mu, sign=+1):
    """``V_pm = exp(-beta v^2/2) v^(pm gamma + 1/2) 1F1(a_pm, 1 pm gamma, beta v^2)`` on jets."""
    a = p1_v_a(mu, beta, gamma, sign)
    b = 1 + sign * gamma

    def V(x):
        t = beta * x * x
        return (jets.exp(-0.5 * t) * jets.power(x, sign * gamma + 0.5)
                * operators.jet_special(specfun.kummer_taylor, t, a, b)
                if isinstance(x, jets.Jet) else
                math.exp(-0.5 * t) * x ** (sign * gamma + 0.5) * specfun.kummer_1f1(a, b, t).value)

    return V


def p1_u_solution(beta, b2, mu, E):
    nu = p1_nu(E, beta, b2, mu)

    def U(x):
        z = 2 * math.sqrt(beta) * (x - E / (2 * beta * beta))
        if isinstance(z, jets.Jet):
            return operators.jet_special(specfun.parabolic_d_taylor, z, nu)
        return specfun.parabolic_d(nu, z).value

    return U


def p1_periodic_v_problem(beta: float, gamma: float, v0: float, T: float = 2 * math.pi):
    """Periodic v-problem on ``[v0, v0 + T]`` (``v0 > 0``) with the ``V_pm`` pair."""
    if v0 <= 0:
        raise ValueError("the periodic window must exclude v = 0")

    def sols(mu):
        out = []
        for sgn in (+1, -1):
            V = p1_v_solution(beta, gamma, mu, sgn)

            def f(x, V=V):
                X = jets.variables(1, 1, [x])[0]
                j = V(X)
                return float(j.value), float(j.c[1])
            out.append(f)
        return tuple(out)

    b1 = beta * beta
    c = gamma * gamma - 0.25
    return SpectralProblem(lambda x: -b1 * np.asarray(x) ** 2 - c / np.asarray(x) ** 2, _zero,
                           lambda x: 1 + 0 * np.asarray(x), v0, v0 + T, Periodic(), Periodic(),
                           "mu", name="P1/v-periodic", solutions=sols)


# P2 ---------------------------------------------------------------------------------

def p2_model(alpha: float, a1: float, a2: float) -> ModelSpec:
    return ModelSpec.p2(a1, a2, alpha * alpha)


def p2_u_problem(alpha, a1, mu, robin=(1.0, 0.0)):
    """``U'' + (4Eu - 4 alpha^2 u^2 - 4 a1 - mu) U = 0`` on ``[1/2, inf)``."""
    p = p1_u_problem(alpha, a1, mu, robin)
    return p.with_(name="P2/u")


def p2_rho(E, alpha, a1, mu):
    return p1_nu(E, alpha, a1, mu)


def p2_v_shift(alpha, a2):
    return a2 / (2 * alpha * alpha)


def p2_v_nu(mu, alpha, a2):
    """``nu + 1/2 = (mu + a2^2/alpha^2) / (4 alpha)``."""
    return (mu + a2 * a2 / (alpha * alpha)) / (4 * alpha) - 0.5


def p2_v_problem(alpha, a2, w0: float = 0.0, T: float = 2 * math.pi):
    """``V'' + (mu - 4 a2 v - 4 alpha^2 v^2) V = 0``, periodic on ``[w0, w0 + T]``.

    Closed-form pair: ``D_nu(z)`` and ``D_nu(-z)`` with ``z = 2 sqrt(alpha)(v + a2/(2 alpha^2))``;
    when they are dependent (integer ``nu``) the even/odd Weber pair is used instead.
    """
    k = 2 * math.sqrt(alpha)
    sh = p2_v_shift(alpha, a2)

    def sols(mu):
        nu = p2_v_nu(mu, alpha, a2)

        def dpair(sign):
            def f(x):
                d, dd = specfun.parabolic_d_deriv(nu, sign * k * (x + sh))
                return d, sign * k * dd
            return f

        f1, f2 = dpair(+1), dpair(-1)
        a, da = f1(w0)
        b, db = f2(w0)
        if abs(a * db - da * b) < 1e-8 * (abs(a * db) + abs(da * b)):
            def ev(x, which):
                ye, dye, yo, dyo = specfun.weber_even_odd(nu, k * (x + sh))
                return (ye, k * dye) if which == 0 else (yo, k * dyo)
            return (lambda x: ev(x, 0)), (lambda x: ev(x, 1))
        return f1, f2

    return SpectralProblem(lambda x: -4 * a2 * np.asarray(x) - 4 * alpha * alpha * np.asarray(x) ** 2,
                           _zero, lambda x: 1 + 0 * np.asarray(x), w0, w0 + T, Periodic(), Periodic(),
                           "mu", name="P2/v", solutions=sols)


def quantize_p2_v(alpha, a2, n, w0=0.0, T=2 * math.pi):
    """n-th periodic mu from the normalised Wronskian-of-differences condition."""
    return p2_v_levels(alpha, a2, max(n + 1, 5), w0, T)[n]


@functools.lru_cache(maxsize=64)
def p2_v_levels(alpha, a2, count, w0=0.0, T=2 * math.pi):
    prob = p2_v_problem(alpha, a2, w0, T)
    cond = periodic_wronskian_condition(prob)
    lo = _lower_bound(prob) - 1.0
    return tuple(float(r) for r in find_roots(cond, lo, lo + 20.0, count))


def p2_u_condition(alpha, a1, mu, robin=(1.0, 0.0)):
    return p1_u_condition(alpha, a1, mu, robin)


def quantize_p2_u(alpha, a1, mu, n, robin=(1.0, 0.0)):
    return quantize_p1_u(alpha, a1, mu, n, tuple(robin))


@dataclass
class P2Levels:
    E: float
    mu: float


def quantize_p2(alpha: float, a1: float, a2: float, n: int, mu_index: int = 0,
                w0: float = 0.0) -> P2Levels:
    """``E_n`` of the u-factor at ``mu = mu_{mu_index}`` and ``mu_n`` of the periodic v-factor."""
    if alpha <= 0:
        raise SpectrumUnbounded("confining branch requires alpha > 0")
    mu_sel = quantize_p2_v(alpha, a2, mu_index, w0)
    mu_n = mu_sel if n == mu_index else quantize_p2_v(alpha, a2, n, w0)
    return P2Levels(quantize_p2_u(alpha, a1, mu_sel, n), mu_n)


def p2_v_solution(alpha, a2, mu):
    nu = p2_v_nu(mu, alpha, a2)
    sh = p2_v_shift(alpha, a2)

    def V(x):
        z = 2 * math.sqrt(alpha) * (x + sh)
        if isinstance(z, jets.Jet):
            return operators.jet_special(specfun.parabolic_d_taylor, z, nu)
        return specfun.parabolic_d(nu, z).value

    return V


# eigenfunctions and checks --------------------------------------------------------------

def p1_eigenfunction(beta, b2, gamma, E, mu):
    return operators.separated_field(p1_u_solution(beta, b2, mu, E), p1_v_solution(beta, gamma, mu),
                                     "P1 bound state")


def p2_eigenfunction(alpha, a1, a2, E, mu):
    return operators.separated_field(p1_u_solution(alpha, a1, mu, E), p2_v_solution(alpha, a2, mu),
                                     "P2 bound state")


def scattering_state(E: float, m: float, prefactor: str = "sqrt_w"):
    """Free state vanishing at ``u = 1/2``: ``A(u) [J_{1/3}(U) J_{-1/3}(U') - J_{1/3}(U') J_{-1/3}(U)] e^{imv}``.

    ``prefactor='sqrt_w'`` uses ``sqrt(u - m^2/(4E))``, which solves the
    equation; ``'uu_prime'`` uses ``(U U')^(1/2)`` for comparison.
    """
    if prefactor not in ("sqrt_w", "uu_prime"):
        raise ValueError(f"unknown prefactor {prefactor!r}")
    c = m * m / (4 * E)
    k = (2.0 / 3.0) * math.sqrt(4 * E)
    Up = k * (0.5 - c) ** 1.5
    jp, jm = specfun.bessel_j(1 / 3, Up).value, specfun.bessel_j(-1 / 3, Up).value

    def fn(U, V):
        w = U - c
        z = k * jets.power(w, 1.5)
        core = (operators.jet_special(specfun.bessel_j_taylor, z, 1 / 3) * jm
                - jp * operators.jet_special(specfun.bessel_j_taylor, z, -1 / 3))
        pref = jets.sqrt(w) if prefactor == "sqrt_w" else jets.sqrt(z * Up)
        return pref * core * jets.exp(1j * m * V)

    return operators.ExprField(fn, f"scattering({prefactor})")


def default_p1(n_levels: int = 5):
    """Default P1 data: beta = 1, b2 = 0, gamma = 1; mu is the lowest v-level."""
    beta, b2, gamma = 1.0, 0.0, 1.0
    mu0 = quantize_p1_v(beta, gamma, 0)
    return dict(beta=beta, b2=b2, gamma=gamma, mu=mu0)


def default_p2():
    """Default P2 data: alpha = 1, a1 = 0, a2 = 0.3, window [0, 2 pi]; mu is the lowest v-level."""
    alpha, a1, a2 = 1.0, 0.0, 0.3
    mu0 = quantize_p2_v(alpha, a2, 0)
    return dict(alpha=alpha, a1=a1, a2=a2, mu=mu0)


def asymptotic_ratio(beta: float = 1.0, n: int = 100, b2: float = 0.0, mu: float | None = None):
    """``E_n / (2 sqrt(beta^3 n))`` from the Numerov oracle (sign kept)."""
    if mu is None:
        mu = quantize_p1_v(beta, 1.0, 0)
    E = numerov_eigen(p1_u_problem(beta, b2, mu), n)
    return E / (2 * math.sqrt(beta ** 3 * n)), E
