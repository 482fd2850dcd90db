"""Pure-Python reference implementations of the hot kernels.

These mirror ``_ckernels.pyx`` line for line and are selected automatically
when the compiled extension is unavailable.
"""

import math

import numpy as np

OK, NO_CONVERGENCE, DOMAIN_EXIT = 0, 1, 2
MODEL_CODES = {"Free": 0, "P1": 1, "P2": 2, "P3": 3}


def hamilton_rhs(u, v, pu, pv, code, prm):
    """Right-hand side (du, dv, dpu, dpv) of Hamilton's equations."""
    t = pu * pu + pv * pv
    dhu = -t / (4.0 * u * u)
    dhv = 0.0
    if code == 1:
        b1, b2, b3 = prm[0], prm[1], prm[2]
        dhu += b1 * (1.0 - v * v / (4.0 * u * u)) - b2 / (u * u)
        dhv += b1 * v / (2.0 * u)
        if b3 != 0.0:
            dhu -= b3 / (u * u * v * v)
            dhv -= 2.0 * b3 / (u * v * v * v)
    elif code == 2:
        a1, a2, a3 = prm[0], prm[1], prm[2]
        dhu += -a1 / (u * u) - a2 * v / (u * u) + a3 * (1.0 - v * v / (u * u))
        dhv += a2 / u + 2.0 * a3 * v / u
    elif code == 3:
        dhu += -prm[0] / (u * u)
    return pu / (2.0 * u), pv / (2.0 * u), -dhu, -dhv


def midpoint_step(y, code, prm, h, tol, maxiter):
    """One implicit-midpoint step; returns (new_state, status)."""
    s0, s1, s2, s3 = float(y[0]), float(y[1]), float(y[2]), float(y[3])
    f = hamilton_rhs(s0, s1, s2, s3, code, prm)
    z = [s0 + h * f[0], s1 + h * f[1], s2 + h * f[2], s3 + h * f[3]]
    omega = 1.0
    prev = math.inf
    for _ in range(maxiter):
        mu = 0.5 * (s0 + z[0])
        if not mu > 0.0:
            return np.array(z), DOMAIN_EXIT
        f = hamilton_rhs(mu, 0.5 * (s1 + z[1]), 0.5 * (s2 + z[2]), 0.5 * (s3 + z[3]), code, prm)
        g = (s0 + h * f[0], s1 + h * f[1], s2 + h * f[2], s3 + h * f[3])
        res = max(abs(g[i] - z[i]) for i in range(4))
        scale = max(1.0, abs(g[0]), abs(g[1]), abs(g[2]), abs(g[3]))
        if res > prev:
            omega *= 0.5
        prev = res
        z = [z[i] + omega * (g[i] - z[i]) for i in range(4)]
        if res <= tol * scale:
            if not z[0] > 0.0:
                return np.array(z), DOMAIN_EXIT
            return np.array(z), OK
    return np.array(z), NO_CONVERGENCE


def midpoint_run(y0, code, prm, h, nsteps, tol, maxiter):
    """Integrate ``nsteps`` steps; returns (states, steps_done, status)."""
    out = np.empty((nsteps + 1, 4))
    out[0] = y0
    y = np.asarray(y0, dtype=float)
    for n in range(nsteps):
        y, status = midpoint_step(y, code, prm, h, tol, maxiter)
        if status != OK:
            return out[: n + 1], n, status
        out[n + 1] = y
    return out, nsteps, OK


def numerov_shoot(q, y0, y1, h):
    """Numerov recurrence for y'' = -q y; returns (y[N-1], y[N-2], sign changes)."""
    n = len(q)
    c = h * h / 12.0
    ym, yc = float(y0), float(y1)
    nodes = 1 if y0 * y1 < 0.0 else 0
    for i in range(1, n - 1):
        yn = (2.0 * (1.0 - 5.0 * c * q[i]) * yc - (1.0 + c * q[i - 1]) * ym) / (1.0 + c * q[i + 1])
        if yn * yc < 0.0:
            nodes += 1
        ym, yc = yc, yn
        if abs(yc) > 1e150:
            ym *= 1e-150
            yc *= 1e-150
    return yc, ym, nodes


def numerov_sweep(q, y0, y1, h):
    """Full Numerov solution array (rescaled to avoid overflow) and sign changes."""
    n = len(q)
    c = h * h / 12.0
    y = np.empty(n)
    y[0] = y0
    y[1] = y1
    nodes = 1 if y0 * y1 < 0.0 else 0
    for i in range(1, n - 1):
        y[i + 1] = (2.0 * (1.0 - 5.0 * c * q[i]) * y[i] - (1.0 + c * q[i - 1]) * y[i - 1]) / (1.0 + c * q[i + 1])
        if y[i + 1] * y[i] < 0.0:
            nodes += 1
        if abs(y[i + 1]) > 1e150:
            y[: i + 2] *= 1e-150
    return y, nodes
