"""Euclidean and pseudo-Euclidean embeddings of D1 and their induced metrics.

Euclidean (surface of revolution, ``u >= 1/2``)::

    X = sqrt(2u) cos v,  Y = sqrt(2u) sin v,  Z = int_{1/2}^u sqrt(2t - 1/(2t)) dt

Lorentzian (signature ``(+, +, -)``, ``u >= 0``)::

    X = sqrt(2u) v,  Y = sqrt(u)(4u^2/5 - v^2 + 1/2),  T = sqrt(u)(4u^2/5 - v^2 - 1/2)

Both induce ``ds^2 = 2u (du^2 + dv^2)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import specfun
from .errors import DomainError

EUCLIDEAN = "euclidean"
LORENTZIAN = "lorentzian"
QUAD_TOL = 1e-14

_GL_LO = np.polynomial.legendre.leggauss(10)
_GL_HI = np.polynomial.legendre.leggauss(21)


@dataclass(frozen=True)
class EmbeddedPoint:
    coords: tuple
    signature: str

    @property
    def X(self):
        return self.coords[0]

    @property
    def Y(self):
        return self.coords[1]

    @property
    def third(self):
        """``Z`` for the Euclidean embedding, ``T`` for the Lorentzian one."""
        return self.coords[2]

    def as_array(self):
        return np.array(self.coords, dtype=float)


# quadrature ------------------------------------------------------------------------

def _gl(f, a, b, rule):
    x, w = rule
    c, r = 0.5 * (a + b), 0.5 * (b - a)
    return r * float(np.dot(w, f(c + r * x)))


def adaptive_quad(f: Callable, a: float, b: float, tol: float = QUAD_TOL, depth: int = 40) -> float:
    """Adaptive Gauss-Legendre quadrature with an embedded 10/21-point error estimate.

    ``f`` must accept numpy arrays. Panels are bisected until the two rules
    agree to ``tol * max(1, |I|)``.
    """
    if a == b:
        return 0.0
    stack = [(a, b, 0)]
    total = 0.0
    ref = max(1.0, abs(_gl(f, a, b, _GL_HI)))
    while stack:
        lo, hi, d = stack.pop()
        fine = _gl(f, lo, hi, _GL_HI)
        coarse = _gl(f, lo, hi, _GL_LO)
        if abs(fine - coarse) <= tol * ref * (hi - lo) / abs(b - a) or d >= depth:
            total += fine
        else:
            m = 0.5 * (lo + hi)
            stack.extend([(lo, m, d + 1), (m, hi, d + 1)])
    return total


def _z_integrand_s(s):
    # t = 1/2 + s^2 removes the square-root endpoint behaviour at t = 1/2
    s2 = s * s
    return 4 * s2 * np.sqrt((1 + s2) / (1 + 2 * s2))


def _s_of(u):
    return math.sqrt(u - 0.5)


def z_increment(u0: float, u1: float) -> float:
    """``Z(u1) - Z(u0)`` by quadrature over ``[u0, u1]`` only (both ``>= 1/2``)."""
    if min(u0, u1) < 0.5:
        raise DomainError("the Euclidean embedding needs u >= 1/2")
    return adaptive_quad(_z_integrand_s, _s_of(u0), _s_of(u1))


def z_profile(u: float) -> float:
    """Authoritative height ``Z(u) = int_{1/2}^u sqrt(2t - 1/(2t)) dt``."""
    return z_increment(0.5, u)


def z_closed_form(u: float) -> float:
    """Elliptic-integral form ``(sqrt2/3)(F(phi, 1/sqrt2) + sqrt(4u^3 - u) - K(1/sqrt2))``.

    Uses the amplitude ``sin(phi) = sqrt(2/(2u+1))``, which lies in ``(0, 1]``
    for ``u >= 1/2``; cross-check only.
    """
    if u < 0.5:
        raise DomainError("the Euclidean embedding needs u >= 1/2")
    k = 1 / math.sqrt(2)
    phi = math.asin(math.sqrt(2 / (2 * u + 1)))
    F = float(specfun.elliptic_f(phi, k))
    K = float(specfun.elliptic_k(k))
    return math.sqrt(2) / 3 * (F + math.sqrt(max(4 * u ** 3 - u, 0.0)) - K)


def direct_amplitude_valid(u: float) -> bool:
    """Whether ``sin(phi) = sqrt(2u + 1)`` is a real amplitude (never, for ``u >= 1/2``)."""
    return math.sqrt(2 * u + 1) <= 1.0


class ZCache:
    """``Z`` tabulated in ``s = sqrt(u - 1/2)`` with monotone cubic interpolation.

    ``Z`` is a smooth odd-free function of ``s`` (``Z ~ 4 s^3 / 3``), so
    interpolating in ``s`` avoids the square-root endpoint.
    """

    def __init__(self, u_max: float, n: int = 2001):
        if u_max <= 0.5:
            raise DomainError("u_max must exceed 1/2")
        self.u_max = u_max
        s = np.linspace(0.0, _s_of(u_max), n)
        z = np.zeros(n)
        for i in range(1, n):
            z[i] = z[i - 1] + adaptive_quad(_z_integrand_s, s[i - 1], s[i])
        self._interp = PchipInterpolator(s, z)

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.5) or np.any(u > self.u_max * (1 + 1e-12)):
            raise DomainError("u outside the cached range")
        return self._interp(np.sqrt(np.maximum(u - 0.5, 0.0)))


@functools.lru_cache(maxsize=8)
def z_cache(u_max: float) -> ZCache:
    return ZCache(u_max)


# embeddings ---------------------------------------------------------------------------

def embed_euclidean(u: float, v: float) -> EmbeddedPoint:
    if not u >= 0.5:
        raise DomainError(f"the Euclidean embedding needs u >= 1/2, got {u}")
    r = math.sqrt(2 * u)
    return EmbeddedPoint((r * math.cos(v), r * math.sin(v), z_profile(u)), EUCLIDEAN)


def embed_pseudo(u: float, v: float) -> EmbeddedPoint:
    if not u >= 0:
        raise DomainError(f"the pseudo-Euclidean embedding needs u >= 0, got {u}")
    su = math.sqrt(u)
    a = 0.8 * u * u - v * v
    return EmbeddedPoint((math.sqrt(2 * u) * v, su * (a + 0.5), su * (a - 0.5)), LORENTZIAN)


def embed(which: str, u: float, v: float) -> EmbeddedPoint:
    if which == EUCLIDEAN:
        return embed_euclidean(u, v)
    if which == LORENTZIAN:
        return embed_pseudo(u, v)
    raise ValueError(f"unknown embedding {which!r}")


# induced metric -------------------------------------------------------------------------

def _xy_euclid(u, v):
    r = math.sqrt(2 * u)
    return np.array([r * math.cos(v), r * math.sin(v)])


def induced_metric(which: str, u: float, v: float, h: float = 1e-5):
    """``(g_uu, g_vv, g_uv)`` of the embedding by finite differences.

    Central differences where the stencil fits, otherwise second-order
    one-sided differences in ``u``. The Euclidean height enters through
    quadrature increments over the stencil, not differences of ``Z`` itself.
    """
    lo = 0.5 if which == EUCLIDEAN else 0.0
    if u < lo:
        raise DomainError(f"u = {u} outside the {which} domain")
    sig = np.array([1.0, 1.0, 1.0 if which == EUCLIDEAN else -1.0])

    def point(uu, vv):
        # extended precision keeps roundoff (|Y| ~ 50 over h = 1e-5) below the stencil error
        su = np.sqrt(uu)
        a = np.longdouble(0.8) * uu * uu - vv * vv
        return np.array([np.sqrt(2 * uu) * vv, su * (a + 0.5), su * (a - 0.5)])

    if which == EUCLIDEAN:
        def diff_u():
            if u - h >= lo:
                dxy = (_xy_euclid(u + h, v) - _xy_euclid(u - h, v)) / (2 * h)
                dz = z_increment(u - h, u + h) / (2 * h)
            else:
                f0, f1, f2 = (_xy_euclid(u + k * h, v) for k in range(3))
                dxy = (-3 * f0 + 4 * f1 - f2) / (2 * h)
                dz = (4 * z_increment(u, u + h) - z_increment(u, u + 2 * h)) / (2 * h)
            return np.append(dxy, dz)

        def diff_v():
            dxy = (_xy_euclid(u, v + h) - _xy_euclid(u, v - h)) / (2 * h)
            return np.append(dxy, 0.0)
    else:
        uq, vq, hq = np.longdouble(u), np.longdouble(v), np.longdouble(h)
        sig = sig.astype(np.longdouble)

        def diff_u():
            if u - h >= lo:
                return (point(uq + hq, vq) - point(uq - hq, vq)) / (2 * hq)
            f0, f1, f2 = (point(uq + k * hq, vq) for k in range(3))
            return (-3 * f0 + 4 * f1 - f2) / (2 * hq)

        def diff_v():
            return (point(uq, vq + hq) - point(uq, vq - hq)) / (2 * hq)

    du, dv = diff_u(), diff_v()
    return (float(np.sum(sig * du * du)), float(np.sum(sig * dv * dv)), float(np.sum(sig * du * dv)))


def induced_metric_residual(which: str, u: float, v: float, h: float = 1e-5) -> float:
    """``max(|g_uu - 2u|, |g_vv - 2u|, |g_uv|)``."""
    guu, gvv, guv = induced_metric(which, u, v, h)
    return max(abs(guu - 2 * u), abs(gvv - 2 * u), abs(guv))


def metric_residual_grid(which: str, u_range, v_range, n: int = 50, h: float = 1e-5) -> float:
    """Largest induced-metric residual on an ``n x n`` parameter grid."""
    us = np.linspace(*u_range, n)
    vs = np.linspace(*v_range, n)
    return max(induced_metric_residual(which, float(a), float(b), h) for a in us for b in vs)


# export ---------------------------------------------------------------------------------

def surface_grid(which: str, u_range, v_range, nu: int, nv: int):
    """Vertices ``(nu*nv, 3)`` and parameters over a tensor grid (row-major in u)."""
    if nu < 2 or nv < 2:
        raise ValueError("nu and nv must be at least 2")
    us = np.linspace(*u_range, nu)
    vs = np.linspace(*v_range, nv)
    lo = 0.5 if which == EUCLIDEAN else 0.0
    if us.min() < lo:
        raise DomainError(f"u range leaves the {which} domain")
    U, V = np.meshgrid(us, vs, indexing="ij")
    if which == EUCLIDEAN:
        r = np.sqrt(2 * U)
        third = z_cache(float(us.max()))(U) if us.max() > 0.5 else np.zeros_like(U)
        verts = np.stack([r * np.cos(V), r * np.sin(V), third], axis=-1)
    elif which == LORENTZIAN:
        su = np.sqrt(U)
        a = 0.8 * U * U - V * V
        verts = np.stack([np.sqrt(2 * U) * V, su * (a + 0.5), su * (a - 0.5)], axis=-1)
    else:
        raise ValueError(f"unknown embedding {which!r}")
    return U.ravel(), V.ravel(), verts.reshape(-1, 3)


def mesh_text(which: str, u_range, v_range, nu: int, nv: int) -> str:
    """OBJ-style text: ``v x y z`` lines followed by 1-based quad faces."""
    _, _, verts = surface_grid(which, u_range, v_range, nu, nv)
    lines = [f"# darboux {which} embedding, {nu}x{nv} grid"]
    if which == LORENTZIAN:
        lines.append("# signature (+,+,-): third column is T")
    lines += ["v " + " ".join(format(float(c), ".17g") for c in p) for p in verts]
    for i in range(nu - 1):
        for j in range(nv - 1):
            a = i * nv + j + 1
            lines.append(f"f {a} {a + nv} {a + nv + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def export_mesh(which: str, u_range, v_range, nu: int, nv: int, path) -> str:
    text = mesh_text(which, u_range, v_range, nu, nv)
    with open(path, "w") as fh:
        fh.write(text)
    return text


def grid_csv(which: str, u_range, v_range, nu: int, nv: int) -> str:
    """CSV dump ``u,v,X,Y,Z`` (``T`` in the last column for the Lorentzian case)."""
    U, V, verts = surface_grid(which, u_range, v_range, nu, nv)
    head = "u,v,X,Y,Z" if which == EUCLIDEAN else "u,v,X,Y,T"
    rows = [head] + [",".join(format(float(x), ".17g") for x in (a, b, *p))
                     for a, b, p in zip(U, V, verts)]
    return "\n".join(rows) + "\n"


def parse_obj(text: str):
    """Vertices and faces of an OBJ-style text produced by :func:`mesh_text`."""
    verts, faces = [], []
    for line in text.splitlines():
        if line.startswith("v "):
            verts.append([float(x) for x in line.split()[1:]])
        elif line.startswith("f "):
            faces.append([int(x) for x in line.split()[1:]])
    return np.array(verts), faces
