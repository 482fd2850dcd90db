"""Quantum differential operators on D1 acting on smooth test fields through jets.

A :class:`SmoothField` produces two-variable jets of a (complex) function of
``(u, v)`` at a batch of points. A :class:`DiffOperator` is a composition
tree over ``d/du``, ``d/dv``, multiplication by coefficient functions, scalars,
sums, products and anticommutators; applying it to a field consumes jet order
and is exact up to rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets, phase, specfun
from .errors import DomainError, JetOrderExceeded, ModelMismatch
from .jets import Jet
from .phase import ModelSpec

MAX_FIELD_ORDER = 8
_U, _V = 0, 1
_tokens = itertools.count()


class JetPoint:
    """A batch of evaluation points ``(u, v)`` with a cache token."""

    def __init__(self, u, v):
        self.u = np.atleast_1d(np.asarray(u, dtype=float))
        self.v = np.atleast_1d(np.asarray(v, dtype=float))
        if self.u.shape != self.v.shape:
            raise ValueError("u and v must have the same shape")
        if np.any(~(self.u > 0)):
            raise DomainError("u must be positive")
        self.token = next(_tokens)
        self._vars = {}

    def variables(self, order):
        if order not in self._vars:
            self._vars[order] = jets.variables(2, order, [self.u, self.v])
        return self._vars[order]

    def __len__(self):
        return self.u.size


def as_jetpoint(p) -> JetPoint:
    if isinstance(p, JetPoint):
        return p
    u, v = p
    return JetPoint(u, v)


# fields ---------------------------------------------------------------------------

class SmoothField:
    """Base class: subclasses implement ``_jet(pt, order)``."""

    max_order = MAX_FIELD_ORDER

    def __init__(self):
        self._cache = {}

    def jet(self, pt, order: int) -> Jet:
        pt = as_jetpoint(pt)
        if order > self.max_order:
            raise JetOrderExceeded(f"order {order} exceeds the field limit {self.max_order}")
        hit = self._cache.get(pt.token)
        if hit is not None and hit.order >= order:
            return hit.truncate(order)
        j = self._jet(pt, order)
        self._cache[pt.token] = j
        return j

    def value(self, pt):
        return self.jet(pt, 0).value

    def __add__(self, other):
        return LinearField([(1.0, self), (1.0, other)])

    def __rmul__(self, c):
        return LinearField([(c, self)])

    def __sub__(self, other):
        return LinearField([(1.0, self), (-1.0, other)])


class ExprField(SmoothField):
    """Field from an expression ``fn(U, V)`` valid on floats, arrays and jets."""

    def __init__(self, fn: Callable, label: str = "expr"):
        super().__init__()
        self.fn = fn
        self.label = label

    def _jet(self, pt, order):
        U, V = pt.variables(order)
        out = self.fn(U, V)
        if not isinstance(out, Jet):
            out = Jet.constant(U.space, np.broadcast_to(out, U.value.shape) + 0 * U.value)
        return out


class LinearField(SmoothField):
    def __init__(self, terms):
        super().__init__()
        self.terms = list(terms)
        self.max_order = min(f.max_order for _, f in self.terms)

    def _jet(self, pt, order):
        out = None
        for c, f in self.terms:
            t = f.jet(pt, order) * c
            out = t if out is None else out + t
        return out


class AppliedField(SmoothField):
    """``op`` applied to ``base``; the jet order available drops by ``op.order``."""

    def __init__(self, op: "DiffOperator", base: SmoothField):
        super().__init__()
        self.op = op
        self.base = base
        self.max_order = base.max_order - op.order

    def _jet(self, pt, order):
        need = order + self.op.order
        if need > self.base.max_order:
            raise JetOrderExceeded(
                f"operator of order {self.op.order} needs jets of order {need} > {self.base.max_order}")
        return self.op.act(self.base.jet(pt, need), pt).truncate(order)


def gaussian_field(u0: float, monomial: str = "1", width: float = 0.5, v0: float = 0.0):
    """``m(u, v) * exp(-((u-u0)^2 + (v-v0)^2) / (2 width^2))`` with ``m`` in {1, v, uv}."""
    mono = {"1": lambda U, V: 1.0, "v": lambda U, V: V, "uv": lambda U, V: U * V}[monomial]
    s = 1.0 / (2 * width * width)

    def fn(U, V):
        return mono(U, V) * jets.exp(-s * ((U - u0) ** 2 + (V - v0) ** 2))

    return ExprField(fn, f"gauss(u0={u0},{monomial})")


TEST_CENTERS = (1.0, 2.0, 3.0)
TEST_MONOMIALS = ("1", "v", "uv")


def standard_fields():
    """Fixed suite: Gaussians at u0 in {1,2,3}, width 0.5, times 1, v, uv."""
    return [gaussian_field(u0, mono) for u0 in TEST_CENTERS for mono in TEST_MONOMIALS]


def interior_points(n: int = 20, seed: int = 42) -> JetPoint:
    """Seeded interior points, u in [0.6, 3.4], 0.1 <= |v| <= 1.2."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.6, 3.4, n)
    v = rng.uniform(0.1, 1.2, n) * rng.choice([-1.0, 1.0], n)
    return JetPoint(u, v)


# operators ------------------------------------------------------------------------

class DiffOperator:
    order: int = 0

    def act(self, jet: Jet, pt: JetPoint) -> Jet:
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, other))

    def __sub__(self, other):
        return Sum((self, Scalar(-1.0, other)))

    def __neg__(self):
        return Scalar(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return Product(self, other)
        return Scalar(other, self)

    def __rmul__(self, c):
        return Scalar(c, self)

    def __pow__(self, n: int):
        out = self
        for _ in range(n - 1):
            out = Product(out, self)
        return out


class Identity(DiffOperator):
    order = 0

    def act(self, jet, pt):
        return jet

    def __repr__(self):
        return "1"


@dataclass(eq=False)
class D(DiffOperator):
    var: int

    @property
    def order(self):
        return 1

    def act(self, jet, pt):
        return jet.deriv(self.var)

    def __repr__(self):
        return "d_u" if self.var == _U else "d_v"


@dataclass(eq=False)
class Mul(DiffOperator):
    fn: Callable
    label: str = "f"

    @property
    def order(self):
        return 0

    def act(self, jet, pt):
        U, V = pt.variables(jet.order)
        return jet * self.fn(U, V)

    def __repr__(self):
        return self.label


@dataclass(eq=False)
class Scalar(DiffOperator):
    c: complex
    op: DiffOperator

    @property
    def order(self):
        return self.op.order

    def act(self, jet, pt):
        return self.op.act(jet, pt) * self.c

    def __repr__(self):
        return f"{self.c}*({self.op!r})"


@dataclass(eq=False)
class Sum(DiffOperator):
    terms: tuple

    @property
    def order(self):
        return max(t.order for t in self.terms)

    def act(self, jet, pt):
        outs = [t.act(jet, pt) for t in self.terms]
        lo = min(o.order for o in outs)
        total = outs[0].truncate(lo)
        for o in outs[1:]:
            total = total + o.truncate(lo)
        return total

    def __repr__(self):
        return " + ".join(repr(t) for t in self.terms)


@dataclass(eq=False)
class Product(DiffOperator):
    left: DiffOperator
    right: DiffOperator

    @property
    def order(self):
        return self.left.order + self.right.order

    def act(self, jet, pt):
        return self.left.act(self.right.act(jet, pt), pt)

    def __repr__(self):
        return f"({self.left!r})({self.right!r})"


def anticommutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return Sum((Product(A, B), Product(B, A)))


def commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return Sum((Product(A, B), Scalar(-1.0, Product(B, A))))


ZERO = Scalar(0.0, Identity())
IDENTITY = Identity()
Du, Dv = D(_U), D(_V)


def apply(op: DiffOperator, f: SmoothField) -> SmoothField:
    """The field ``op f``; its jets are computed by composition, not on a grid."""
    if op.order > f.max_order:
        raise JetOrderExceeded(f"operator order {op.order} exceeds field order {f.max_order}")
    return AppliedField(op, f)


def evaluate(op: DiffOperator, f: SmoothField, pt) -> np.ndarray:
    """``(op f)`` at the points."""
    pt = as_jetpoint(pt)
    if op.order > f.max_order:
        raise JetOrderExceeded(f"operator order {op.order} exceeds field order {f.max_order}")
    return op.act(f.jet(pt, op.order), pt).value


# quantum generators ---------------------------------------------------------------

def _lap():
    return Du * Du + Dv * Dv


def potential_operator(m: ModelSpec) -> DiffOperator:
    return Mul(lambda U, V: phase.potential(m, U, V), f"V_{m.potential}")


def free_operator(name: str) -> DiffOperator:
    """Free quantum generators H, K, X1, X2 in the displayed operator form."""
    lap = _lap()
    if name == "H":
        return Mul(lambda U, V: -1.0 / (4 * U), "-1/4u") * lap
    if name == "K":
        return -1j * Dv
    if name == "X1":
        return -(Du * Dv) + Mul(lambda U, V: V / (2 * U), "v/2u") * lap
    if name == "X2":
        rot = Mul(lambda U, V: V, "v") * Du - Mul(lambda U, V: U, "u") * Dv
        return (-0.5) * anticommutator(Dv, rot) + Mul(lambda U, V: V * V / (4 * U), "v^2/4u") * lap
    raise ValueError(f"unknown free operator {name!r}")


def quantum_operator(name: str, m: ModelSpec) -> DiffOperator:
    """Quantum counterpart of an observable: kinetic part plus multiplication terms."""
    pot = m.potential
    if name == "H":
        op = free_operator("H")
        return op if pot == "Free" else op + potential_operator(m)
    if name in ("K", "X1", "X2"):
        return free_operator(name)
    if name == "R":
        if pot not in ("P1", "P2"):
            raise ModelMismatch("R = [R1, R2] is used for P1 and P2")
        return commutator(quantum_operator("R1", m), quantum_operator("R2", m))
    if name not in ("R1", "R2") or pot == "Free":
        raise ModelMismatch(f"{name} is undefined for {pot}")
    # the multiplication part is the classical integral at zero momentum
    extra = Mul(lambda U, V: phase.observable_expr(name, m, U, V, 0 * U, 0 * U), f"{name}|p=0")
    if pot == "P3":
        return free_operator("X1" if name == "R1" else "X2") + extra
    if name == "R2":
        return free_operator("K") * free_operator("K") + extra
    if pot == "P1":
        return free_operator("X2") + extra
    return free_operator("X1") + extra


def divergence_operator(a11: Callable, a12: Callable, a22: Callable) -> DiffOperator:
    """``-(1/sqrt g) d_i (a^{ij} sqrt g d_j)`` with ``sqrt g = 2u``."""
    inv = Mul(lambda U, V: -1.0 / (2 * U), "-1/2u")
    terms = []
    for (di, dj, a) in ((Du, Du, a11), (Du, Dv, a12), (Dv, Du, a12), (Dv, Dv, a22)):
        terms.append(di * Mul(lambda U, V, a=a: 2 * U * a(U, V), "2u a") * dj)
    return inv * Sum(tuple(terms))


def divergence_form(name: str) -> DiffOperator:
    """Free generator built from its classical momentum matrix by the divergence formula."""
    if name == "H":
        return divergence_operator(lambda U, V: 1 / (4 * U), lambda U, V: 0 * U, lambda U, V: 1 / (4 * U))
    if name == "X1":
        return divergence_operator(lambda U, V: -V / (2 * U), lambda U, V: 0.5 + 0 * U,
                                   lambda U, V: -V / (2 * U))
    if name == "X2":
        return divergence_operator(lambda U, V: -V * V / (4 * U), lambda U, V: V / 2,
                                   lambda U, V: -U - V * V / (4 * U))
    raise ValueError(f"no divergence form for {name!r}")


# residuals ------------------------------------------------------------------------

def commutator_residual(A, B, target, f: SmoothField, p):
    """``((AB - BA - target) f)(p)``."""
    pt = as_jetpoint(p)
    ab = evaluate(Product(A, B), f, pt)
    ba = evaluate(Product(B, A), f, pt)
    tg = evaluate(target, f, pt)
    return ab - ba - tg


def term_scale(terms: Sequence[DiffOperator], f: SmoothField, p) -> float:
    """Largest single term applied to ``f`` over the points (at least 1)."""
    pt = as_jetpoint(p)
    return max([1.0] + [float(np.max(np.abs(evaluate(t, f, pt)))) for t in terms])


def eigen_residual(m: ModelSpec, psi: SmoothField, E: float, p):
    """``(H psi - E psi)(p)`` including the model potential."""
    pt = as_jetpoint(p)
    phase.check_domain(m, pt.u, pt.v)
    H = quantum_operator("H", m)
    j = psi.jet(pt, 2)
    return H.act(j, pt).value - E * j.value


# quantum relations -------------------------------------------------------------------

@dataclass
class RelationFit:
    name: str
    labels: list
    coefficients: np.ndarray
    predicted: np.ndarray
    printed: np.ndarray
    max_scaled_residual: float
    scale: float

    def to_dict(self):
        c = lambda z: [complex(x).real for x in z]  # noqa: E731
        return dict(name=self.name, labels=self.labels, coefficients=c(self.coefficients),
                    predicted=c(self.predicted), printed=c(self.printed),
                    max_scaled_residual=self.max_scaled_residual, scale=self.scale)


def quantum_relation_spec(m: ModelSpec):
    """Quantum relations ``LHS = sum c_k B_k`` with predicted and printed coefficients.

    Predicted coefficients are exact; printed ones are the published values
    (kept for reporting). Each entry: (name, lhs, [(label, basis, predicted, printed)]).
    """
    Hq = quantum_operator("H", m)
    pot = m.potential
    one = IDENTITY
    if pot == "Free":
        K, X1, X2 = (quantum_operator(n, m) for n in ("K", "X1", "X2"))
        return [
            ("Free_KX1", commutator(K, X1), [("H", Hq, 2j, 2j)]),
            ("Free_KX2", commutator(K, X2), [("X1", X1, -1j, -1j)]),
            ("Free_X1X2", commutator(X1, X2), [("K^3", K ** 3, 2j, -2j)]),
            ("Free_identity", 4 * (Hq * X2) + X1 * X1 + K ** 4, []),
        ]
    if pot == "P3":
        (a,) = m.params
        K, R1, R2 = (quantum_operator(n, m) for n in ("K", "R1", "R2"))
        return [
            ("P3_KR1", commutator(K, R1), [("H", Hq, 2j, 2j)]),
            ("P3_KR2", commutator(K, R2), [("R1", R1, -1j, -1j)]),
            ("P3_R1R2", commutator(R1, R2), [("K^3", K ** 3, 2j, -2j), ("K", K, 4j * a, 4j * a)]),
            ("P3_identity", 4 * (Hq * R2) + R1 * R1 + K ** 4, [("K^2", K * K, -4 * a, 4 * a)]),
        ]
    R1, R2 = quantum_operator("R1", m), quantum_operator("R2", m)
    R = commutator(R1, R2)
    if pot == "P1":
        b1, b2, b3 = m.params
        return [
            ("P1_RR1", commutator(R, R1), [
                ("HR1", Hq * R1, -8, -8), ("R2^2", R2 * R2, -6, -6), ("R2", R2, -16 * b2, 16 * b2),
                ("1", one, 2 * b1 * (16 * b3 - 3), 2 * b1 * (3 + 16 * b3))]),
            ("P1_RR2", commutator(R, R2), [("HR2", Hq * R2, 8, 8), ("R1", R1, 16 * b1, -16 * b1)]),
            ("P1_Rsq", R * R, [
                ("H{R1,R2}", Hq * anticommutator(R1, R2), 8, -8), ("R2^3", R2 ** 3, 4, 4),
                ("R2^2", R2 * R2, 16 * b2, -16 * b2), ("R1^2", R1 * R1, 16 * b1, -16 * b1),
                ("H^2", Hq * Hq, 4 * (16 * b3 - 3), -4 * (3 + 16 * b3)),
                ("R2", R2, -4 * b1 * (16 * b3 - 11), -4 * b1 * (11 + 16 * b3)),
                ("1", one, -16 * b1 * b2 * (16 * b3 - 3), 16 * b1 * b2 * (3 + 16 * b3))]),
        ]
    a1, a2, a3 = m.params
    k = a2 ** 2 + 4 * a1 * a3
    return [
        ("P2_RR1", commutator(R, R1), [("H^2", Hq * Hq, 8, 8), ("R2", R2, -16 * a3, 16 * a3),
                                       ("1", one, -8 * k, -8 * k)]),
        ("P2_RR2", commutator(R, R2), [("R1", R1, 16 * a3, -16 * a3), ("H", Hq, -16 * a2, 16 * a2)]),
        ("P2_Rsq", R * R, [
            ("H^2R2", Hq * Hq * R2, -16, 16), ("HR1", Hq * R1, -32 * a2, 32 * a2),
            ("R2^2", R2 * R2, 16 * a3, -16 * a3), ("R1^2", R1 * R1, 16 * a3, -16 * a3),
            ("R2", R2, 16 * k, -16 * k), ("1", one, 64 * (a1 * a2 ** 2 + a3 ** 2),
                                          64 * (a3 ** 2 - a1 * a2 ** 2))]),
    ]


def fit_relation(name, lhs, basis, fields=None, pt=None) -> RelationFit:
    """Least-squares coefficients of ``lhs = sum c_k B_k`` over the test-field suite.

    The residual is reported relative to the largest single term (the scale).
    """
    if not basis:
        resid = relation_residual(lhs, basis, [], fields, pt)
        empty = np.zeros(0, complex)
        return RelationFit(name, [], empty, empty, empty, resid, 1.0)
    fields = standard_fields() if fields is None else fields
    pt = interior_points() if pt is None else as_jetpoint(pt)
    rows, rhs, scales = [], [], []
    for f in fields:
        y = evaluate(lhs, f, pt)
        cols = [evaluate(b, f, pt) for _, b, _, _ in basis]
        rows.append(np.stack(cols, axis=1))
        rhs.append(y)
        scales.append(max([np.max(np.abs(y))] + [np.max(np.abs(c)) for c in cols]))
    A = np.concatenate(rows).astype(complex)
    y = np.concatenate(rhs).astype(complex)
    # column scaling keeps the normal equations well conditioned
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    coef, *_ = np.linalg.lstsq(A / norms, y, rcond=None)
    coef = coef / norms
    scale = float(max(scales))
    resid = float(np.max(np.abs(A @ coef - y))) / scale
    labels = [b[0] for b in basis]
    return RelationFit(name, labels, coef, np.array([b[2] for b in basis], complex),
                       np.array([b[3] for b in basis], complex), resid, scale)


def relation_residual(lhs, basis, coeffs, fields=None, pt=None) -> float:
    """Max of ``|(lhs - sum c_k B_k) f| / scale`` over the suite for given coefficients."""
    fields = standard_fields() if fields is None else fields
    pt = interior_points() if pt is None else as_jetpoint(pt)
    worst = 0.0
    for f in fields:
        y = evaluate(lhs, f, pt)
        cols = [evaluate(b, f, pt) for _, b, _, _ in basis]
        sc = max([1.0, np.max(np.abs(y))] + [np.max(np.abs(c)) for c in cols])
        r = y - sum((c * col for c, col in zip(coeffs, cols)), np.zeros_like(y))
        worst = max(worst, float(np.max(np.abs(r))) / sc)
    return worst


# special-function fields ---------------------------------------------------------------

def jet_special(taylor: Callable, z: Jet, *args):
    """Compose ``F(z)`` given ``taylor(*args, z0, order)`` returning F^(k)(z0)/k!."""
    z0 = np.atleast_1d(np.asarray(z.value, dtype=float))
    cols = [taylor(*args, float(x), z.order) for x in z0.ravel()]
    coeffs = [np.array([c[k] for c in cols]).reshape(z0.shape) for k in range(z.order + 1)]
    if np.ndim(z.value) == 0:
        coeffs = [c[0] for c in coeffs]
    return z.compose(coeffs)


def bessel_field_native(E: float, m: float, nu: float = 1.0 / 3.0) -> SmoothField:
    """Free solution ``sqrt(w) J_nu(2/3 sqrt(4E) w^(3/2)) exp(i m v)``, ``w = u - m^2/(4E)``."""
    c = m * m / (4 * E)

    def fn(U, V):
        w = U - c
        z = (2.0 / 3.0) * math.sqrt(4 * E) * jets.power(w, 1.5)
        return jets.sqrt(w) * jet_special(specfun.bessel_j_taylor, z, nu) * jets.exp(1j * m * V)

    return ExprField(fn, "bessel_native")


def bessel_field_rotated(E: float, mu: float, theta: float, nu: float = 1.0 / 3.0) -> SmoothField:
    """Product solution in the rotated chart ``u = r cos + s sin``, ``v = -r sin + s cos``."""
    ct, st = math.cos(theta), math.sin(theta)

    def factor(x, k):
        z = (2.0 / 3.0) * math.sqrt(4 * E * k) * jets.power(x, 1.5)
        return jets.sqrt(x) * jet_special(specfun.bessel_j_taylor, z, nu)

    def fn(U, V):
        r = U * ct - V * st
        s = U * st + V * ct
        return factor(r - mu / (4 * E * ct), ct) * factor(s + mu / (4 * E * st), st)

    return ExprField(fn, "bessel_rotated")


def separated_field(ufun: Callable, vfun: Callable, label: str = "separated") -> SmoothField:
    """``U(u) V(v)`` from jet-valued one-variable callables."""
    return ExprField(lambda U, V: ufun(U) * vfun(V), label)


# formal symmetry ---------------------------------------------------------------------

def bump_field(u0: float, v0: float, radius: float) -> SmoothField:
    """Compactly supported ``exp(-1/(1 - rho^2))`` bump (zero outside the disc)."""

    def fn(U, V):
        rho2 = ((U - u0) ** 2 + (V - v0) ** 2) / (radius * radius)
        inside = np.asarray(rho2.value) < 0.999  # exp(-1000) underflows anyway
        safe = jets.Jet(rho2.space, np.where(inside, rho2.c, 0.0))
        out = jets.exp(-1.0 / (1.0 - safe))
        return jets.Jet(out.space, np.where(inside, out.c, 0.0))

    return ExprField(fn, "bump")


def symmetry_defect(op: DiffOperator, f: SmoothField, g: SmoothField, box, n: int = 301):
    """``<op f, g> - <f, op g>`` with measure ``2u du dv`` on a uniform grid (trapezoid).

    Returns (defect, scale) with scale = |<op f, g>| + |<f, op g>|.
    """
    (u0, u1), (v0, v1) = box
    uu, vv = np.meshgrid(np.linspace(u0, u1, n), np.linspace(v0, v1, n), indexing="ij")
    pt = JetPoint(uu.ravel(), vv.ravel())
    fv, gv = f.jet(pt, 0).value, g.jet(pt, 0).value
    ofv, ogv = evaluate(op, f, pt), evaluate(op, g, pt)
    w = 2 * pt.u * (u1 - u0) / (n - 1) * (v1 - v0) / (n - 1)
    lhs = np.sum(np.conj(ofv) * gv * w)
    rhs = np.sum(np.conj(fv) * ogv * w)
    return complex(lhs - rhs), float(abs(lhs) + abs(rhs))
