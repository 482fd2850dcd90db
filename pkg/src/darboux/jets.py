"""Multivariate truncated Taylor (jet) arithmetic.

A :class:`Jet` stores the Taylor coefficients ``c[alpha] = D^alpha f / alpha!``
of a function of ``nvars`` variables, truncated at total degree ``order``,
around one or many expansion points at once (trailing batch axes). Values may
be real or complex. Arithmetic, composition with elementary functions and
differentiation are exact up to floating point rounding.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

MAX_ORDER = 16


def _monomials_of_degree(nvars, d):
    # Graded ordering, identical for every truncation order so that lower
    # orders are prefixes of higher ones.
    out = []
    for comb in itertools.combinations_with_replacement(range(nvars), d):
        alpha = [0] * nvars
        for i in comb:
            alpha[i] += 1
        out.append(tuple(alpha))
    return out


class JetSpace:
    """Index tables for jets in ``nvars`` variables up to total degree ``order``."""

    def __init__(self, nvars: int, order: int):
        if order < 0 or order > MAX_ORDER:
            raise ValueError(f"jet order {order} outside [0, {MAX_ORDER}]")
        self.nvars = nvars
        self.order = order
        mons = []
        for d in range(order + 1):
            mons.extend(_monomials_of_degree(nvars, d))
        self.monomials = mons
        self.index = {m: i for i, m in enumerate(mons)}
        self.size = len(mons)
        self.degree = np.array([sum(m) for m in mons])

        ii, jj, kk = [], [], []
        for i, a in enumerate(mons):
            for j, b in enumerate(mons):
                if self.degree[i] + self.degree[j] <= order:
                    ii.append(i)
                    jj.append(j)
                    kk.append(self.index[tuple(x + y for x, y in zip(a, b))])
        order_k = np.argsort(kk, kind="stable")
        self._mul_i = np.asarray(ii)[order_k]
        self._mul_j = np.asarray(jj)[order_k]
        ks = np.asarray(kk)[order_k]
        self._mul_starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
        self._factorial = np.array([math.prod(math.factorial(x) for x in m) for m in mons], dtype=float)

    def deriv_tables(self, var):
        """Source indices and factors mapping this space to the order-1 space under d/dx_var."""
        return _deriv_tables(self.nvars, self.order, var)

    def __repr__(self):
        return f"JetSpace(nvars={self.nvars}, order={self.order})"


@lru_cache(maxsize=None)
def get_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


@lru_cache(maxsize=None)
def _deriv_tables(nvars, order, var):
    hi = get_space(nvars, order)
    lo = get_space(nvars, order - 1)
    src = np.empty(lo.size, dtype=int)
    fac = np.empty(lo.size, dtype=float)
    for t, beta in enumerate(lo.monomials):
        alpha = list(beta)
        alpha[var] += 1
        src[t] = hi.index[tuple(alpha)]
        fac[t] = beta[var] + 1
    return src, fac


def _as_coeff_array(x):
    return np.asarray(x)


class Jet:
    """Truncated multivariate Taylor polynomial, vectorised over expansion points."""

    __slots__ = ("space", "c")
    __array_priority__ = 1000

    def __init__(self, space: JetSpace, c):
        self.space = space
        self.c = c

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, space, value):
        value = np.asarray(value)
        c = np.zeros((space.size,) + value.shape, dtype=np.result_type(value, float))
        c[0] = value
        return cls(space, c)

    @classmethod
    def variable(cls, space, var, value):
        jet = cls.constant(space, value)
        if space.order >= 1:
            alpha = [0] * space.nvars
            alpha[var] = 1
            jet.c[space.index[tuple(alpha)]] = 1.0
        return jet

    # accessors ------------------------------------------------------------
    @property
    def order(self):
        return self.space.order

    @property
    def value(self):
        return self.c[0]

    def coeff(self, alpha):
        return self.c[self.space.index[tuple(alpha)]]

    def partial(self, alpha):
        """Mixed partial derivative D^alpha at the expansion point."""
        alpha = tuple(alpha)
        return self.c[self.space.index[alpha]] * math.prod(math.factorial(a) for a in alpha)

    def gradient(self):
        """First partial derivatives, stacked along a new leading axis."""
        if self.order < 1:
            raise ValueError("gradient needs a jet of order >= 1")
        return self.c[1:1 + self.space.nvars]

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        if order == self.order:
            return self
        sp = get_space(self.space.nvars, order)
        return Jet(sp, self.c[:sp.size])

    def deriv(self, var):
        """Partial derivative with respect to variable ``var`` (order drops by one)."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        src, fac = self.space.deriv_tables(var)
        fac = fac.reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(get_space(self.space.nvars, self.order - 1), self.c[src] * fac)

    # arithmetic -----------------------------------------------------------
    def _align(self, other):
        if isinstance(other, Jet):
            if other.space.nvars != self.space.nvars:
                raise ValueError("jets over different variable counts")
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return self, None

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = self._align(other)
        if b is not None:
            return Jet(a.space, a.c + b.c)
        other = _as_coeff_array(other)
        c = a.c.astype(np.result_type(a.c, other), copy=True)
        c[0] = c[0] + other
        return Jet(a.space, c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        if b is None:
            return Jet(a.space, a.c * _as_coeff_array(other))
        sp = a.space
        prod = a.c[sp._mul_i] * b.c[sp._mul_j]
        return Jet(sp, np.add.reduceat(prod, sp._mul_starts, axis=0))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.space, self.c / _as_coeff_array(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            result = Jet.constant(self.space, np.ones_like(self.value))
            base = self
            n = int(p)
            while n:
                if n & 1:
                    result = result * base
                n >>= 1
                if n:
                    base = base * base
            return result
        return power(self, p)

    # composition ----------------------------------------------------------
    def compose(self, coeffs):
        """Evaluate ``sum_k coeffs[k] * (self - value)**k`` (Horner form)."""
        delta = Jet(self.space, self.c.copy())
        delta.c[0] = 0
        n = min(self.order, len(coeffs) - 1)
        result = Jet.constant(self.space, np.asarray(coeffs[n]) * np.ones_like(self.value))
        for k in range(n - 1, -1, -1):
            result = result * delta + coeffs[k]
        return result

    def reciprocal(self):
        x0 = self.value
        inv = 1.0 / x0
        coeffs = [inv]
        for _ in range(self.order):
            coeffs.append(-coeffs[-1] * inv)
        return self.compose(coeffs)

    def __repr__(self):
        return f"Jet(nvars={self.space.nvars}, order={self.order}, value={self.value!r})"


# elementary functions -------------------------------------------------------

def _taylor_power(x0, p, order):
    coeffs = [x0 ** p]
    binom = 1.0
    for k in range(1, order + 1):
        binom *= (p - k + 1) / k
        coeffs.append(binom * x0 ** (p - k))
    return coeffs


def power(x, p):
    """x**p for real p (jets expanded about their value)."""
    if isinstance(x, Jet):
        return x.compose(_taylor_power(x.value, p, x.order))
    return np.power(x, p)


def sqrt(x):
    if isinstance(x, Jet):
        return power(x, 0.5)
    return np.sqrt(x)


def exp(x):
    if isinstance(x, Jet):
        e0 = np.exp(x.value)
        return x.compose([e0 / math.factorial(k) for k in range(x.order + 1)])
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        x0 = x.value
        coeffs = [np.log(x0)]
        for k in range(1, x.order + 1):
            coeffs.append((-1) ** (k + 1) / (k * x0 ** k))
        return x.compose(coeffs)
    return np.log(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        cyc = [s, c, -s, -c]
        return x.compose([cyc[k % 4] / math.factorial(k) for k in range(x.order + 1)])
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        cyc = [c, -s, -c, s]
        return x.compose([cyc[k % 4] / math.factorial(k) for k in range(x.order + 1)])
    return np.cos(x)


def compose_taylor(x, coeffs):
    """Apply a scalar function given by its Taylor coefficients at ``x.value``."""
    if isinstance(x, Jet):
        return x.compose(coeffs)
    return coeffs[0]


def variables(nvars, order, values):
    """Seed jets for all ``nvars`` variables at the given expansion point(s)."""
    sp = get_space(nvars, order)
    return [Jet.variable(sp, i, v) for i, v in enumerate(values)]
