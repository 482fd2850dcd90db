"""Symplectic implicit-midpoint integration of Hamilton's equations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels, phase
from .errors import DomainExit, InvalidObservable, NoConvergence
from .phase import ModelSpec, ObservableId, PhasePoint

DEFAULT_TOL = 1e-13
DEFAULT_MAXITER = 50


def _code(m: ModelSpec):
    prm = np.zeros(3)
    prm[: len(m.params)] = m.params
    return kernels.MODEL_CODES[m.potential], prm


def step_midpoint(s: PhasePoint, m: ModelSpec, h: float, tol: float = DEFAULT_TOL,
                  maxiter: int = DEFAULT_MAXITER) -> PhasePoint:
    """One implicit-midpoint step ``y1 = y0 + h f((y0 + y1)/2)``.

    The implicit equation is solved by damped fixed-point iteration to a
    residual of ``tol * max(1, |y|)``.
    """
    if h == 0:
        raise ValueError("step h must be nonzero")
    phase.check_domain(m, s.u, s.v)
    code, prm = _code(m)
    y, status = kernels.midpoint_step(s.as_array(), code, prm, float(h), tol, maxiter)
    if status == kernels.DOMAIN_EXIT:
        raise DomainExit(f"midpoint step left u > 0 from {s}")
    if status == kernels.NO_CONVERGENCE:
        raise NoConvergence(f"fixed-point iteration did not converge in {maxiter} iterations")
    return PhasePoint.from_array(y)


@dataclass
class Trajectory:
    """Time-stamped phase points along a numerical flow."""

    times: np.ndarray
    states: np.ndarray
    model: ModelSpec
    status: str = "complete"

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states lengths differ")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def complete(self):
        return self.status == "complete"

    def point(self, i) -> PhasePoint:
        return PhasePoint.from_array(self.states[i])

    def to_csv(self, path_or_file):
        """Write ``t,u,v,pu,pv`` rows with 17 significant digits."""
        lines = ["t,u,v,pu,pv"]
        for t, s in zip(self.times, self.states):
            lines.append(",".join(format(float(x), ".17g") for x in (t, *s)))
        text = "\n".join(lines) + "\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)


def integrate(s0: PhasePoint, m: ModelSpec, h: float, T: float, tol: float = DEFAULT_TOL,
              maxiter: int = DEFAULT_MAXITER) -> Trajectory:
    """Integrate to time ``T`` with ``ceil(T/h)`` uniform steps of size ``T/N``.

    A domain exit or solver failure ends the trajectory early; the partial
    trajectory is returned with ``status`` set accordingly.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    if not h > 0:
        raise ValueError("h must be positive")
    phase.check_domain(m, s0.u, s0.v)
    n = max(1, math.ceil(T / h - 1e-9))
    step = T / n
    code, prm = _code(m)
    states, done, status = kernels.midpoint_run(s0.as_array(), code, prm, step, n, tol, maxiter)
    times = step * np.arange(done + 1)
    flag = {kernels.OK: "complete", kernels.DOMAIN_EXIT: "domain_exit",
            kernels.NO_CONVERGENCE: "no_convergence"}[status]
    return Trajectory(times, np.asarray(states), m, flag)


@dataclass
class DriftStats:
    initial: float
    max_abs_drift: float
    max_rel_drift: float

    def to_dict(self):
        return dict(initial=self.initial, max_abs_drift=self.max_abs_drift,
                    max_rel_drift=self.max_rel_drift)


@dataclass
class ConservationReport:
    stats: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.stats[key]

    def max_rel_drift(self):
        return max(s.max_rel_drift for s in self.stats.values())

    def to_dict(self):
        return {str(k): v.to_dict() for k, v in self.stats.items()}


def conservation_report(t: Trajectory, obs: Sequence[ObservableId]) -> ConservationReport:
    """Drift of each observable along the trajectory.

    Relative drift is ``max |X(t) - X(0)| / |X(0)|`` (the absolute drift when
    ``X(0) = 0``).
    """
    rep = ConservationReport()
    for o in obs:
        if isinstance(o, str) and o != "H" and o not in t.model.integrals():
            raise InvalidObservable(f"{o} is not an integral of {t.model.potential}")
        vals = phase.eval_batch(o, t.states.T, t.model)
        x0 = float(vals[0])
        drift = float(np.max(np.abs(vals - x0)))
        rel = drift / abs(x0) if x0 != 0 else drift
        rep.stats[o] = DriftStats(x0, drift, rel)
    return rep
