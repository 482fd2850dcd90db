"""Phase-space data, the D1 metric, potentials and observables.

The Darboux space of type one carries the metric ``ds^2 = 2u (du^2 + dv^2)``
so the free Hamiltonian is ``(pu^2 + pv^2) / (4u)``. Observables are written
once as arithmetic expressions; they evaluate on floats, numpy arrays and
:class:`~darboux.jets.Jet` objects alike, which is how exact gradients and
nested brackets are obtained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import jets
from .errors import DomainError, InvalidObservable

POTENTIALS = ("Free", "P1", "P2", "P3")
PARAM_NAMES = {"Free": (), "P1": ("b1", "b2", "b3"), "P2": ("a1", "a2", "a3"), "P3": ("a",)}

# Classical Darboux spaces, stored as reference data only: ds^2 = factor*(du^2+dv^2)
KOENIGS_METRICS = {
    "D1": "2*u*(du^2 + dv^2)",
    "D2": "(a/u^2 + b)*(du^2 + dv^2)",
    "D3": "(a*exp(-u) + b*exp(-2u))*(du^2 + dv^2)",
    "D4": "(a/sin(u)^2 + b/cos(u)^2)*(du^2 + dv^2)",
}


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(u, v, pu, pv)`` of the cotangent bundle with ``u > 0``."""

    u: float
    v: float
    pu: float
    pv: float

    def __post_init__(self):
        vals = (self.u, self.v, self.pu, self.pv)
        if not all(math.isfinite(x) for x in vals):
            raise DomainError(f"non-finite phase point {vals}")
        if self.u <= 0:
            raise DomainError(f"u must be positive, got {self.u}")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.pu, self.pv], dtype=float)

    @classmethod
    def from_array(cls, a) -> "PhasePoint":
        return cls(*(float(x) for x in a))


@dataclass(frozen=True)
class ModelSpec:
    """Metric D1 plus one potential variant with its real parameters."""

    potential: str = "Free"
    params: tuple = ()

    def __post_init__(self):
        if self.potential not in POTENTIALS:
            raise ValueError(f"unknown potential {self.potential!r}")
        params = tuple(float(p) for p in self.params)
        if len(params) != len(PARAM_NAMES[self.potential]):
            raise ValueError(
                f"{self.potential} takes parameters {PARAM_NAMES[self.potential]}, got {len(params)}")
        if not all(math.isfinite(p) for p in params):
            raise ValueError("model parameters must be finite")
        object.__setattr__(self, "params", params)

    @classmethod
    def free(cls):
        return cls("Free", ())

    @classmethod
    def p1(cls, b1, b2, b3):
        return cls("P1", (b1, b2, b3))

    @classmethod
    def p2(cls, a1, a2, a3):
        return cls("P2", (a1, a2, a3))

    @classmethod
    def p3(cls, a):
        return cls("P3", (a,))

    def param(self, name):
        return self.params[PARAM_NAMES[self.potential].index(name)]

    def param_dict(self):
        return dict(zip(PARAM_NAMES[self.potential], self.params))

    def integrals(self):
        """Names of the integrals of motion valid for this model (besides H)."""
        return {"Free": ("K", "X1", "X2"), "P1": ("R1", "R2"),
                "P2": ("R1", "R2"), "P3": ("K", "R1", "R2")}[self.potential]


@dataclass(frozen=True)
class LinearCombo:
    """The quadratic observable ``a*X1 + b*X2 + c*K^2`` (defined modulo H)."""

    a: float
    b: float
    c: float


ObservableId = Union[str, LinearCombo]
BASIC_OBSERVABLES = ("H", "V", "K", "X1", "X2", "R1", "R2")


@dataclass(frozen=True)
class Gradient4:
    d_u: float
    d_v: float
    d_pu: float
    d_pv: float

    def as_array(self):
        return np.array([self.d_u, self.d_v, self.d_pu, self.d_pv])


# expressions ---------------------------------------------------------------

def kinetic(u, v, pu, pv):
    return (pu * pu + pv * pv) / (4 * u)


def potential(m: ModelSpec, u, v):
    if m.potential == "Free":
        return 0 * u
    if m.potential == "P1":
        b1, b2, b3 = m.params
        out = b1 * (4 * u * u + v * v) / (4 * u) + b2 / u
        # b3 = 0 removes the singular line v = 0
        return out + b3 / (u * v * v) if b3 != 0 else out
    if m.potential == "P2":
        a1, a2, a3 = m.params
        return a1 / u + a2 * v / u + a3 * (u * u + v * v) / u
    (a,) = m.params
    return a / u


def free_x1(u, v, pu, pv):
    return pu * pv - v / (2 * u) * (pu * pu + pv * pv)


def free_x2(u, v, pu, pv):
    return pv * (v * pu - u * pv) - v * v / (4 * u) * (pu * pu + pv * pv)


def observable_expr(obs: ObservableId, m: ModelSpec, u, v, pu, pv):
    """Generic evaluation on floats, arrays or jets (no domain checks)."""
    if isinstance(obs, LinearCombo):
        return obs.a * free_x1(u, v, pu, pv) + obs.b * free_x2(u, v, pu, pv) + obs.c * pv * pv
    if obs == "H":
        return kinetic(u, v, pu, pv) + potential(m, u, v)
    if obs == "V":
        return potential(m, u, v)
    if obs == "K":
        return pv + 0 * u
    if obs == "X1":
        return free_x1(u, v, pu, pv)
    if obs == "X2":
        return free_x2(u, v, pu, pv)
    if obs in ("R1", "R2"):
        if m.potential == "P1":
            b1, b2, b3 = m.params
            if obs == "R1":
                out = free_x2(u, v, pu, pv) - b1 * v ** 4 / (4 * u) - b2 * v * v / u
                return out - b3 * (4 * u * u + v * v) / (v * v * u) if b3 != 0 else out
            out = pv * pv + b1 * v * v
            return out + 4 * b3 / (v * v) if b3 != 0 else out
        if m.potential == "P2":
            a1, a2, a3 = m.params
            if obs == "R1":
                return (free_x1(u, v, pu, pv) - 2 * a1 * v / u + 2 * a2 * (u * u - v * v) / u
                        + 2 * a3 * v * (u * u - v * v) / u)
            return pv * pv + 4 * a2 * v + 4 * a3 * v * v
        if m.potential == "P3":
            (a,) = m.params
            if obs == "R1":
                return free_x1(u, v, pu, pv) - 2 * a * v / u
            return free_x2(u, v, pu, pv) - a * v * v / u
    raise InvalidObservable(f"observable {obs!r} undefined for model {m.potential}")


def check_observable(obs: ObservableId, m: ModelSpec):
    if isinstance(obs, LinearCombo):
        if not all(math.isfinite(x) for x in (obs.a, obs.b, obs.c)):
            raise InvalidObservable("LinearCombo coefficients must be finite")
        return
    if obs not in BASIC_OBSERVABLES:
        raise InvalidObservable(f"unknown observable {obs!r}")
    if obs in ("R1", "R2") and m.potential == "Free":
        raise InvalidObservable(f"{obs} is defined only for P1, P2, P3")


def check_domain(m: ModelSpec, u, v):
    u = np.asarray(u)
    v = np.asarray(v)
    if np.any(~(u > 0)):
        raise DomainError("u must be positive")
    if m.potential == "P1" and m.params[2] != 0 and np.any(v == 0):
        raise DomainError("v = 0 is singular for P1 with b3 != 0")


def eval_observable(obs: ObservableId, p: PhasePoint, m: ModelSpec) -> float:
    """Closed-form value of an observable at a phase point."""
    check_observable(obs, m)
    check_domain(m, p.u, p.v)
    return float(observable_expr(obs, m, p.u, p.v, p.pu, p.pv))


def eval_hamiltonian(p: PhasePoint, m: ModelSpec) -> float:
    return eval_observable("H", p, m)


def eval_batch(obs: ObservableId, pts, m: ModelSpec) -> np.ndarray:
    """Vectorised evaluation; ``pts`` has shape (4, ...)."""
    check_observable(obs, m)
    u, v, pu, pv = (np.asarray(x, dtype=float) for x in pts)
    check_domain(m, u, v)
    return np.asarray(observable_expr(obs, m, u, v, pu, pv), dtype=float)


def phase_jets(pts, order, dtype=float):
    """Seed jets for (u, v, pu, pv) at one or many points."""
    return jets.variables(4, order, [np.asarray(x, dtype=dtype) for x in pts])


def observable_jet(obs: ObservableId, pts, m: ModelSpec, order: int, dtype=float):
    """Jet of an observable over phase space at the given point(s).

    ``dtype=np.longdouble`` evaluates in extended precision, which matters near
    the 1/v^2 singularity of P1 where intermediate products dwarf the result.
    """
    check_observable(obs, m)
    check_domain(m, pts[0], pts[1])
    u, v, pu, pv = phase_jets(pts, order, dtype)
    out = observable_expr(obs, m, u, v, pu, pv)
    if not isinstance(out, jets.Jet):
        out = jets.Jet.constant(u.space, out)
    return out


def grad_observable(obs: ObservableId, p: PhasePoint, m: ModelSpec) -> Gradient4:
    """Exact partial derivatives (forward-mode jets of the closed-form expression)."""
    g = observable_jet(obs, p.as_array(), m, 1).gradient()
    return Gradient4(*(float(x) for x in g))


def grad_batch(obs: ObservableId, pts, m: ModelSpec) -> np.ndarray:
    """Gradients at many points; returns shape (4, ...)."""
    return np.asarray(observable_jet(obs, pts, m, 1).gradient())


def fd_gradient(obs: ObservableId, p: PhasePoint, m: ModelSpec, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient with step ``rel_step * max(1, |coordinate|)``."""
    x = p.as_array()
    g = np.empty(4)
    for i in range(4):
        h = rel_step * max(1.0, abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fp = eval_observable(obs, PhasePoint.from_array(xp), m)
        fm = eval_observable(obs, PhasePoint.from_array(xm), m)
        g[i] = (fp - fm) / (2 * h)
    return g


def sample_points(n: int, seed: int = 42, m: ModelSpec | None = None) -> np.ndarray:
    """Seeded random phase points, u in [0.2, 5], |v| <= 5, |p| <= 3; shape (4, n)."""
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.2, 5.0, n)
    v = rng.uniform(-5.0, 5.0, n)
    pu = rng.uniform(-3.0, 3.0, n)
    pv = rng.uniform(-3.0, 3.0, n)
    if m is not None and m.potential == "P1" and m.params[2] != 0:
        # exact zero is a measure-zero event; redraw defensively
        while np.any(v == 0):
            v[v == 0] = rng.uniform(-5.0, 5.0, np.count_nonzero(v == 0))
    return np.stack([u, v, pu, pv])


def as_points(points: Sequence[PhasePoint]) -> np.ndarray:
    return np.stack([p.as_array() for p in points], axis=1)
