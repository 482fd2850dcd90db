"""Poisson brackets, classical algebra relations and the adjoint-orbit classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import phase
from .errors import DomainError, ModelMismatch, ZeroObservable
from .jets import Jet
from .phase import ModelSpec, ObservableId, PhasePoint

U, V, PU, PV = 0, 1, 2, 3

RELATIONS = (
    "Free_KX1", "Free_KX2", "Free_X1X2", "Free_Casimir",
    "P1_RR1", "P1_RR2", "P1_Rsq",
    "P2_RR1", "P2_RR2", "P2_Rsq",
    "P3_KR1", "P3_KR2", "P3_R1R2", "P3_Casimir",
)


def relation_model(r: str) -> str:
    return r.split("_")[0]


def relations_for(m: ModelSpec):
    return tuple(r for r in RELATIONS if relation_model(r) == m.potential)


# brackets -------------------------------------------------------------------

def bracket_terms(grad_f, grad_g):
    """The four products of the canonical bracket, as a list."""
    return [grad_f[U] * grad_g[PU], -grad_f[PU] * grad_g[U],
            grad_f[V] * grad_g[PV], -grad_f[PV] * grad_g[V]]


def bracket_jets(F: Jet, G: Jet) -> Jet:
    """Poisson bracket of two phase-space jets; the result has order min - 1."""
    return (F.deriv(U) * G.deriv(PU) - F.deriv(PU) * G.deriv(U)
            + F.deriv(V) * G.deriv(PV) - F.deriv(PV) * G.deriv(V))


def poisson_bracket(f: ObservableId, g: ObservableId, p: PhasePoint, m: ModelSpec) -> float:
    """{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i from exact gradients."""
    gf = phase.grad_observable(f, p, m).as_array()
    gg = phase.grad_observable(g, p, m).as_array()
    return float(_antisym_sum(gf, gg))


def _antisym_sum(gf, gg):
    # (f_q . g_p) - (f_p . g_q) in a fixed order makes {g, f} = -{f, g} bit-exactly
    return (gf[U] * gg[PU] + gf[V] * gg[PV]) - (gf[PU] * gg[U] + gf[PV] * gg[V])


def poisson_bracket_batch(f, g, pts, m):
    """Brackets and their scales (1 + max |product|) at many points."""
    gf = phase.grad_batch(f, pts, m)
    gg = phase.grad_batch(g, pts, m)
    terms = bracket_terms(gf, gg)
    return _antisym_sum(gf, gg), 1.0 + np.max(np.abs(terms), axis=0)


def fd_bracket_oracle(f: ObservableId, g: ObservableId, p: PhasePoint, m: ModelSpec,
                      h: float = 1e-4) -> float:
    """Five-point central-difference Poisson bracket with step ``h * max(1, |coordinate|)``.

    The fourth-order stencil keeps the oracle accurate near the singular line
    ``v = 0`` of P1, where the step is no longer small against ``|v|``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    x = p.as_array()
    grads = []
    for obs in (f, g):
        gr = np.empty(4)
        for i in range(4):
            step = h * max(1.0, abs(x[i]))
            if i == 0 and x[0] - 2 * step <= 0:
                raise DomainError("finite-difference stencil leaves u > 0")
            vals = []
            for k in (2, 1, -1, -2):
                xk = x.copy()
                xk[i] += k * step
                vals.append(phase.eval_observable(obs, PhasePoint.from_array(xk), m))
            gr[i] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * step)
        grads.append(gr)
    return float(sum(bracket_terms(grads[0], grads[1])))


def fd_bracket_batch(f, g, pts, m, h=1e-4):
    """Vectorised five-point central-difference brackets at many points."""
    pts = np.asarray(pts, dtype=float)
    grads = []
    for obs in (f, g):
        gr = np.empty_like(pts)
        for i in range(4):
            step = h * np.maximum(1.0, np.abs(pts[i]))
            vals = []
            for k in (2, 1, -1, -2):
                xk = pts.copy()
                xk[i] += k * step
                vals.append(phase.eval_batch(obs, xk, m))
            gr[i] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * step)
        grads.append(gr)
    return sum(bracket_terms(grads[0], grads[1]))


def oracle_agreement(m: ModelSpec, samples: int = 1000, seed: int = 42, h: float = 1e-4):
    """Largest scaled gap between exact and finite-difference brackets.

    All pairs among ``H`` and the model's integrals are compared on the
    seeded sample; the gap is divided by the bracket scale
    ``1 + max |product|``.
    """
    pts = phase.sample_points(samples, seed, m)
    names = ("H",) + tuple(m.integrals())
    worst = {}
    for i, f in enumerate(names):
        for g in names[i + 1:]:
            exact, sc = poisson_bracket_batch(f, g, pts, m)
            fd = fd_bracket_batch(f, g, pts, m, h)
            worst[f"{f},{g}"] = float(np.max(np.abs(exact - fd) / sc))
    return worst

def _jets_dt(m, pts, order, names, dtype=float):
    return {n: phase.observable_jet(n, pts, m, order, dtype) for n in names}


def _jets(m, pts, order, names):
    return _jets_dt(m, pts, order, names)


def r_jet(pts, m: ModelSpec, order: int = 1) -> Jet:
    """Jet of R = {R1, R2}; order-(k+1) jets of R1, R2 give an order-k jet of R."""
    if m.potential not in ("P1", "P2"):
        raise ModelMismatch("R = {R1, R2} is used for P1 and P2")
    j = _jets(m, pts, order + 1, ("R1", "R2"))
    return bracket_jets(j["R1"], j["R2"])


def nested_bracket_R(p: PhasePoint, m: ModelSpec) -> float:
    return float(r_jet(p.as_array(), m, 1).value)


# relations ------------------------------------------------------------------

def relation_terms(r: str, pts, m: ModelSpec, dtype=np.longdouble):
    """Signed terms of relation ``r`` whose sum vanishes, evaluated at ``pts``.

    Evaluated in extended precision by default: nested brackets of the P1
    integrals cancel many digits near v = 0.
    """
    if r not in RELATIONS:
        raise ValueError(f"unknown relation {r!r}")
    if relation_model(r) != m.potential:
        raise ModelMismatch(f"relation {r} requires model {relation_model(r)}, got {m.potential}")
    pts = np.asarray(pts, dtype=float)
    val = lambda jet: jet.value  # noqa: E731
    if m.potential == "Free":
        j = _jets_dt(m, pts, 1, ("H", "K", "X1", "X2"), dtype)
        H, K, X1, X2 = (val(j[n]) for n in ("H", "K", "X1", "X2"))
        if r == "Free_KX1":
            return [val(bracket_jets(j["K"], j["X1"])), -2 * H]
        if r == "Free_KX2":
            return [val(bracket_jets(j["K"], j["X2"])), X1]
        if r == "Free_X1X2":
            return [val(bracket_jets(j["X1"], j["X2"])), -2 * K ** 3]
        return [4 * H * X2, X1 ** 2, K ** 4]
    if m.potential == "P3":
        (a,) = m.params
        j = _jets_dt(m, pts, 1, ("H", "K", "R1", "R2"), dtype)
        H, K, R1, R2 = (val(j[n]) for n in ("H", "K", "R1", "R2"))
        if r == "P3_KR1":
            return [val(bracket_jets(j["K"], j["R1"])), -2 * H]
        if r == "P3_KR2":
            return [val(bracket_jets(j["K"], j["R2"])), R1]
        if r == "P3_R1R2":
            return [val(bracket_jets(j["R1"], j["R2"])), -2 * K ** 3, -4 * a * K]
        return [4 * H * R2, R1 ** 2, K ** 4, 4 * a * K ** 2]

    j = _jets_dt(m, pts, 2, ("H", "R1", "R2"), dtype)
    Rj = bracket_jets(j["R1"], j["R2"])
    H, R1, R2, R = val(j["H"]), val(j["R1"]), val(j["R2"]), val(Rj)
    if m.potential == "P1":
        b1, b2, b3 = m.params
        if r == "P1_RR1":
            return [val(bracket_jets(Rj, j["R1"].truncate(1))), -8 * H * R1, -6 * R2 ** 2,
                    -16 * b2 * R2, 32 * b1 * b3 + 0 * H]
        if r == "P1_RR2":
            return [val(bracket_jets(Rj, j["R2"].truncate(1))), 8 * H * R2, 16 * b1 * R1]
        return [R ** 2, 16 * H * R1 * R2, 4 * R2 ** 3, 16 * b2 * R2 ** 2, 64 * b3 * H ** 2,
                16 * b1 * R1 ** 2, -64 * b1 * b3 * R2, -256 * b1 * b2 * b3 + 0 * H]
    a1, a2, a3 = m.params
    if r == "P2_RR1":
        return [val(bracket_jets(Rj, j["R1"].truncate(1))), 8 * H ** 2, -16 * a3 * R2,
                -8 * (a2 ** 2 + 4 * a1 * a3) + 0 * H]
    if r == "P2_RR2":
        return [val(bracket_jets(Rj, j["R2"].truncate(1))), -16 * a2 * H, 16 * a3 * R1]
    return [R ** 2, -16 * H ** 2 * R2, 16 * a3 * R2 ** 2, -32 * a2 * H * R1, 16 * a3 * R1 ** 2,
            16 * (a2 ** 2 + 4 * a1 * a3) * R2, 64 * a1 * a2 ** 2 + 0 * H]


def relation_residual_batch(r: str, pts, m: ModelSpec):
    """Absolute residuals and scales (1 + max |term|) at many points."""
    terms = relation_terms(r, pts, m)
    residual = np.abs(sum(terms))
    scale = 1.0 + np.max(np.abs(np.stack(np.broadcast_arrays(*terms))), axis=0)
    return residual.astype(float), scale.astype(float)


def verify_relation(r: str, p: PhasePoint, m: ModelSpec) -> float:
    """|LHS - RHS| of relation ``r`` at one point."""
    res, _ = relation_residual_batch(r, p.as_array()[:, None], m)
    return float(res[0])


def relation_scale(r: str, p: PhasePoint, m: ModelSpec) -> float:
    _, sc = relation_residual_batch(r, p.as_array()[:, None], m)
    return float(sc[0])


@dataclass
class RelationReport:
    relation: str
    samples: int
    max_residual: float
    max_scaled_residual: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return dict(relation=self.relation, samples=self.samples, max_residual=self.max_residual,
                    max_scaled_residual=self.max_scaled_residual, tolerance=self.tolerance,
                    passed=self.passed)


def verify_model_relations(m: ModelSpec, samples: int = 1000, seed: int = 42,
                           tol: float = 1e-9):
    """Run every relation of the model's algebra on seeded random points."""
    pts = phase.sample_points(samples, seed, m)
    out = []
    for r in relations_for(m):
        res, sc = relation_residual_batch(r, pts, m)
        scaled = float(np.max(res / sc))
        out.append(RelationReport(r, samples, float(np.max(res)), scaled, tol, scaled <= tol))
    return out


def conservation_residuals(m: ModelSpec, pts):
    """{X, H} with scales for every integral valid under the model."""
    return {x: poisson_bracket_batch(x, "H", pts, m) for x in m.integrals()}


def jacobi_residual(f, g, h, pts, m: ModelSpec):
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}} via order-2 jets."""
    j = _jets(m, pts, 2, (f, g, h))
    F, G, Hh = j[f], j[g], j[h]
    total = (bracket_jets(F.truncate(1), bracket_jets(G, Hh))
             + bracket_jets(G.truncate(1), bracket_jets(Hh, F))
             + bracket_jets(Hh.truncate(1), bracket_jets(F, G)))
    return total.value


# adjoint orbits ---------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticCoeffs:
    """Coefficients of a*X1 + b*X2 + c*K^2."""

    a: float
    b: float
    c: float


def adjoint_transform(c: QuadraticCoeffs, alpha: float) -> QuadraticCoeffs:
    """Flow generated by K, modulo H: X2 -> X2 - alpha*X1."""
    return QuadraticCoeffs(c.a - c.b * alpha, c.b, c.c)


def classify_integral(c: QuadraticCoeffs) -> str:
    if c.a == 0 and c.b == 0 and c.c == 0:
        raise ZeroObservable("all coefficients vanish")
    if c.b != 0:
        return "X2type"
    if c.a != 0:
        return "X1type"
    return "K2type"


def normal_form(c: QuadraticCoeffs) -> QuadraticCoeffs:
    """Representative of the orbit: X2 + aK^2, X1 + aK^2 or K^2 (scaled)."""
    kind = classify_integral(c)
    if kind == "X2type":
        d = adjoint_transform(c, c.a / c.b)
        return QuadraticCoeffs(0.0, 1.0, d.c / d.b)
    if kind == "X1type":
        return QuadraticCoeffs(1.0, 0.0, c.c / c.a)
    return QuadraticCoeffs(0.0, 0.0, 1.0)
