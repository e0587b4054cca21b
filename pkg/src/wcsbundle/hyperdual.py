"""Hyper-dual numbers over numpy arrays.

A hyper-dual value ``a + b e1 + c e2 + d e1e2`` with ``e1**2 = e2**2 = 0``
carries two independent first derivatives and their mixed second
derivative. Seeding an input with ``e1`` along direction ``i`` and ``e2``
along direction ``j`` gives ``df/dx_i`` in ``e1``, ``df/dx_j`` in ``e2``
and ``d2f/dx_i dx_j`` in ``e12``, exact to roundoff.

All four parts are numpy arrays of a common shape, so a single
``HyperDual`` can hold a scalar, a vector or a matrix. Matrix functions
(``inv``, ``sqrtm``) propagate derivatives through the exact
differential identities rather than through elementwise rules.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_sylvester

__all__ = [
    "HyperDual",
    "asarray",
    "sqrt",
    "sin",
    "cos",
    "exp",
    "log",
    "inv",
    "sqrtm",
    "stack_matrix",
    "seed",
    "jet",
]


class HyperDual:
    __slots__ = ("v", "e1", "e2", "e12")
    __array_priority__ = 1000
    __array_ufunc__ = None

    def __init__(self, v, e1=None, e2=None, e12=None):
        self.v = np.asarray(v, dtype=float)
        z = np.zeros_like(self.v)
        self.e1 = z if e1 is None else np.asarray(e1, dtype=float)
        self.e2 = z if e2 is None else np.asarray(e2, dtype=float)
        self.e12 = z if e12 is None else np.asarray(e12, dtype=float)

    # -- structure -------------------------------------------------------
    @property
    def shape(self):
        return self.v.shape

    @property
    def T(self) -> "HyperDual":
        return HyperDual(self.v.T, self.e1.T, self.e2.T, self.e12.T)

    def __getitem__(self, idx) -> "HyperDual":
        return HyperDual(self.v[idx], self.e1[idx], self.e2[idx], self.e12[idx])

    def __repr__(self):
        return f"HyperDual(v={self.v!r}, e1={self.e1!r}, e2={self.e2!r}, e12={self.e12!r})"

    # -- arithmetic ------------------------------------------------------
    def __neg__(self):
        return HyperDual(-self.v, -self.e1, -self.e2, -self.e12)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = asarray(other)
        return HyperDual(self.v + o.v, self.e1 + o.e1, self.e2 + o.e2, self.e12 + o.e12)

    __radd__ = __add__

    def __sub__(self, other):
        o = asarray(other)
        return HyperDual(self.v - o.v, self.e1 - o.e1, self.e2 - o.e2, self.e12 - o.e12)

    def __rsub__(self, other):
        return asarray(other) - self

    def __mul__(self, other):
        o = asarray(other)
        return HyperDual(
            self.v * o.v,
            self.e1 * o.v + self.v * o.e1,
            self.e2 * o.v + self.v * o.e2,
            self.e12 * o.v + self.e1 * o.e2 + self.e2 * o.e1 + self.v * o.e12,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "HyperDual":
        r = 1.0 / self.v
        return _chain(self, r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        return self * asarray(other).reciprocal()

    def __rtruediv__(self, other):
        return asarray(other) * self.reciprocal()

    def __pow__(self, n):
        if isinstance(n, HyperDual):
            return exp(n * log(self))
        n = float(n)
        return _chain(
            self,
            self.v**n,
            n * self.v ** (n - 1.0),
            n * (n - 1.0) * self.v ** (n - 2.0),
        )

    def __matmul__(self, other):
        o = asarray(other)
        return HyperDual(
            self.v @ o.v,
            self.e1 @ o.v + self.v @ o.e1,
            self.e2 @ o.v + self.v @ o.e2,
            self.e12 @ o.v + self.e1 @ o.e2 + self.e2 @ o.e1 + self.v @ o.e12,
        )

    def __rmatmul__(self, other):
        return asarray(other) @ self


def asarray(x) -> HyperDual:
    if isinstance(x, HyperDual):
        return x
    return HyperDual(x)


def _chain(x: HyperDual, f0, f1, f2) -> HyperDual:
    """Apply a scalar function elementwise given its value and two derivatives."""
    return HyperDual(
        f0,
        f1 * x.e1,
        f1 * x.e2,
        f1 * x.e12 + f2 * x.e1 * x.e2,
    )


def _unary(name, f, df, d2f):
    def fn(x):
        if not isinstance(x, HyperDual):
            return f(np.asarray(x, dtype=float))
        return _chain(x, f(x.v), df(x.v), d2f(x.v))

    fn.__name__ = name
    return fn


sqrt = _unary("sqrt", np.sqrt, lambda v: 0.5 / np.sqrt(v), lambda v: -0.25 * v**-1.5)
sin = _unary("sin", np.sin, np.cos, lambda v: -np.sin(v))
cos = _unary("cos", np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v))
exp = _unary("exp", np.exp, np.exp, np.exp)
log = _unary("log", np.log, lambda v: 1.0 / v, lambda v: -1.0 / (v * v))


def inv(m):
    """Matrix inverse with exact first and mixed second derivatives."""
    if not isinstance(m, HyperDual):
        return np.linalg.inv(m)
    y = np.linalg.inv(m.v)
    d1 = -y @ m.e1 @ y
    d2 = -y @ m.e2 @ y
    d12 = -y @ m.e12 @ y - d1 @ m.e2 @ y - d2 @ m.e1 @ y
    return HyperDual(y, d1, d2, d12)


def sqrtm(m, root=None):
    """Principal square root of a matrix with positive real spectrum.

    ``root`` may supply the value-part square root (computed by the
    caller in whatever gauge makes it stable); derivative parts solve
    the Sylvester equations ``X dX + dX X = dM`` and
    ``X d12X + d12X X = d12M - (d1X d2X + d2X d1X)``.
    """
    mv = m.v if isinstance(m, HyperDual) else np.asarray(m, dtype=float)
    if root is None:
        w, q = np.linalg.eig(mv)
        if np.any(np.abs(w.imag) > 1e-12) or np.any(w.real <= 0):
            raise np.linalg.LinAlgError("sqrtm needs a positive real spectrum")
        root = (q @ np.diag(np.sqrt(w.real)) @ np.linalg.inv(q)).real
    if not isinstance(m, HyperDual):
        return root
    d1 = solve_sylvester(root, root, m.e1)
    d2 = solve_sylvester(root, root, m.e2)
    d12 = solve_sylvester(root, root, m.e12 - d1 @ d2 - d2 @ d1)
    return HyperDual(root, d1, d2, d12)


def stack_matrix(rows) -> HyperDual:
    """Build a matrix from a nested list of floats and hyper-dual scalars."""
    cells = [[asarray(c) for c in row] for row in rows]
    parts = []
    for attr in ("v", "e1", "e2", "e12"):
        parts.append(np.array([[getattr(c, attr) for c in row] for row in cells], dtype=float))
    return HyperDual(*parts)


def seed(x, i: int, j: int) -> HyperDual:
    """Point ``x`` with ``e1`` along coordinate ``i`` and ``e2`` along ``j``."""
    x = np.asarray(x, dtype=float)
    e1 = np.zeros_like(x)
    e2 = np.zeros_like(x)
    e1[i] = 1.0
    e2[j] = 1.0
    return HyperDual(x, e1, e2)


def _component(x: HyperDual, k: int) -> HyperDual:
    return HyperDual(x.v[k], x.e1[k], x.e2[k], x.e12[k])


def jet(f, x):
    """Value, gradient and Hessian of an array-valued function of a point.

    ``f`` receives a list of hyper-dual coordinates and must return a
    ``HyperDual`` (or something ``asarray`` accepts). Returns arrays of
    shape ``out``, ``(n, *out)`` and ``(n, n, *out)``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    value = None
    grad = None
    hess = None
    for i in range(n):
        for j in range(i, n):
            xs = seed(x, i, j)
            out = asarray(f([_component(xs, k) for k in range(n)]))
            if value is None:
                value = out.v
                grad = np.zeros((n,) + value.shape)
                hess = np.zeros((n, n) + value.shape)
            if j == i:
                grad[i] = out.e1
            hess[i, j] = out.e12
            hess[j, i] = out.e12
    return value, grad, hess
