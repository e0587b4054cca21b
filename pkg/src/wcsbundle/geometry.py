"""Pointwise Riemannian geometry on a single coordinate chart.

Metrics are plain Python functions of a coordinate list returning a
matrix; they are written against :mod:`wcsbundle.hyperdual` so that the
same code yields values, gradients and Hessians. Index conventions:

* ``Gamma[k, i, j]`` is the Christoffel symbol with upper index ``k``.
* ``riemann[i, j, k, l] = g(R(d_i, d_j) d_k, d_l)`` with
  ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``; for a round sphere
  ``riemann[0, 1, 1, 0]`` is the (positive) sectional curvature.
* ``riemann_mixed[i, j, k, l]`` is the same tensor with ``l`` raised.
* Endomorphisms such as ``J`` are stored row-first, ``J[i, k]`` being
  the ``d_k`` component of ``J d_i``; lowering gives
  ``J_low[i, j] = J[i, b] g[b, j] = omega[i, j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import hyperdual as hd

__all__ = [
    "GeometryError",
    "DegeneracyError",
    "ChartMetric",
    "CurvatureData",
    "CompatibleTriple",
    "christoffel",
    "riemann",
    "compatible_triple",
    "nabla_J",
    "sectional_curvature",
    "euclidean_metric",
    "round_sphere_metric",
    "sphere_product_metric",
    "thurston_metric",
    "constant_form",
    "thurston_symplectic_form",
    "sphere_product_form",
    "fubini_study_metric",
    "fubini_study_form",
    "central_difference_jet",
]


class GeometryError(ValueError):
    """Raised for invalid geometric input (bad shapes, non-metrics)."""


class DegeneracyError(GeometryError):
    """Raised when a metric or symplectic form is singular at a point."""


MatrixFn = Callable[[Sequence], object]


@dataclass(frozen=True)
class ChartMetric:
    """A metric ``g_ij(x)`` on an open subset of R^dim.

    ``fn`` takes a list of coordinates (floats or hyper-duals) and returns
    the metric matrix; derivatives are obtained by hyper-dual evaluation.
    """

    dim: int
    fn: MatrixFn
    name: str = ""

    def __call__(self, x) -> np.ndarray:
        x = _point(x, self.dim)
        g = np.asarray(hd.asarray(self.fn(list(x))).v, dtype=float)
        _check_spd(g)
        return g

    def jet(self, x):
        """Return ``(g, dg, ddg)`` with ``dg[m, i, j] = d_m g_ij``."""
        x = _point(x, self.dim)
        g, dg, ddg = hd.jet(self.fn, x)
        _check_spd(g)
        return g, dg, ddg


def _point(x, dim):
    x = np.asarray(x, dtype=float).ravel()
    if x.size != dim:
        raise GeometryError(f"expected a point in R^{dim}, got {x.size} coordinates")
    return x


def _check_spd(g):
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise GeometryError("metric must be a square matrix")
    if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise GeometryError("metric matrix is not symmetric")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("metric is not positive definite") from exc


@dataclass
class CurvatureData:
    point: np.ndarray
    metric: np.ndarray
    Gamma: np.ndarray
    riemann: np.ndarray
    riemann_mixed: np.ndarray
    nablaJ: np.ndarray | None = field(default=None)


def _connection(g, dg, ddg):
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError("singular metric") from exc
    if np.linalg.cond(g) > 1e12:
        raise DegeneracyError("metric is numerically singular")
    # first-kind symbols Gamma_{l,ij} and their derivatives
    glow = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    dglow = 0.5 * (
        np.einsum("mijl->mlij", ddg) + np.einsum("mjil->mlij", ddg) - ddg
    )
    gam = np.einsum("kl,lij->kij", ginv, glow)
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dgam = np.einsum("kl,mlij->mkij", ginv, dglow) + np.einsum("mkl,lij->mkij", dginv, glow)
    return gam, dgam


def christoffel(m: ChartMetric, x) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[k, i, j]`` of ``m`` at ``x``."""
    g, dg, ddg = m.jet(x)
    return _connection(g, dg, ddg)[0]


def _curvature_from_jet(g, dg, ddg):
    gam, dgam = _connection(g, dg, ddg)
    mixed = (
        np.einsum("iljk->ijkl", dgam)
        - np.einsum("jlik->ijkl", dgam)
        + np.einsum("mjk,lim->ijkl", gam, gam)
        - np.einsum("mik,ljm->ijkl", gam, gam)
    )
    low = np.einsum("ijkm,ml->ijkl", mixed, g)
    return gam, mixed, low


def riemann(m: ChartMetric, x) -> CurvatureData:
    x = _point(x, m.dim)
    g, dg, ddg = m.jet(x)
    gam, mixed, low = _curvature_from_jet(g, dg, ddg)
    return CurvatureData(point=x, metric=g, Gamma=gam, riemann=low, riemann_mixed=mixed)


def sectional_curvature(cd: CurvatureData, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g = cd.metric
    num = np.einsum("ijkl,i,j,k,l->", cd.riemann, u, v, v, u)
    den = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    return float(num / den)


# ---------------------------------------------------------------------------
# compatible almost complex structures


def _sqrt_value(p, g):
    """Square root of a g-self-adjoint positive operator, value part only."""
    chol = np.linalg.cholesky(g)
    t = chol.T @ p @ np.linalg.inv(chol.T)
    t = 0.5 * (t + t.T)
    w, q = np.linalg.eigh(t)
    if np.any(w <= 0):
        raise DegeneracyError("AA* has a nonpositive eigenvalue")
    root = q @ np.diag(np.sqrt(w)) @ q.T
    return np.linalg.inv(chol.T) @ root @ chol.T


def _triple_parts(G, Om):
    """Return ``(A, J, gtilde)`` in row-first convention for matrices G, omega."""
    Gv = hd.asarray(G).v
    Omv = hd.asarray(Om).v
    if abs(np.linalg.det(Omv)) < 1e-12 * max(1.0, np.abs(Omv).max()) ** Omv.shape[0]:
        raise DegeneracyError("symplectic form is degenerate")
    Gi = hd.inv(G)
    A = Om @ Gi  # omega_ij = A_i^k g_kj
    op = A.T  # column convention: A d_i = sum_k A[i, k] d_k
    adj = Gi @ op.T @ G  # g-adjoint
    P = op @ adj
    Pv = hd.asarray(P).v
    S = hd.sqrtm(P, root=_sqrt_value(Pv, Gv))
    J = (hd.inv(S) @ op).T
    gt = S.T @ G
    gt = 0.5 * (gt + gt.T)
    return A, J, gt


@dataclass(frozen=True)
class CompatibleTriple:
    """Output of the polar construction ``J = (AA*)^(-1/2) A``.

    ``g`` is the input metric, ``gtilde`` the compatible one with
    ``omega(u, v) = gtilde(J u, v)``. ``A``, ``J`` and ``omega`` are
    functions of a point returning matrices.
    """

    g: ChartMetric
    omega: MatrixFn
    gtilde: ChartMetric

    @property
    def dim(self) -> int:
        return self.g.dim

    def _parts(self, coords):
        return _triple_parts(self.g.fn(coords), self.omega(coords))

    def omega_at(self, x) -> np.ndarray:
        x = _point(x, self.dim)
        return np.asarray(hd.asarray(self.omega(list(x))).v, dtype=float)

    def A(self, x) -> np.ndarray:
        return hd.asarray(self._parts(list(_point(x, self.dim)))[0]).v

    def J(self, x) -> np.ndarray:
        return hd.asarray(self._parts(list(_point(x, self.dim)))[1]).v

    def J_jet(self, x):
        """``(J, dJ)`` with ``dJ[m, i, k] = d_m J[i, k]``."""
        J, dJ, _ = hd.jet(lambda c: self._parts(c)[1], _point(x, self.dim))
        return J, dJ

    def A_adjoint(self, x) -> np.ndarray:
        """The g-adjoint of A, row-first like ``A``."""
        x = _point(x, self.dim)
        G = self.g(x)
        A = self.A(x)
        return (np.linalg.inv(G) @ A @ G).T


def compatible_triple(g: ChartMetric, omega: MatrixFn) -> CompatibleTriple:
    """Polar decomposition of ``omega`` against ``g``.

    ``A`` solves ``omega_ij = A_i^k g_kj``; ``J = sqrt(AA*)^{-1} A`` and
    ``gtilde = g(sqrt(AA*) ., .)``. The square root is taken by symmetric
    eigendecomposition in a g-orthonormal gauge.
    """

    def gt_fn(coords):
        return _triple_parts(g.fn(coords), omega(coords))[2]

    name = f"{g.name}~" if g.name else "gtilde"
    return CompatibleTriple(g=g, omega=omega, gtilde=ChartMetric(g.dim, gt_fn, name))


def nabla_J(triple: CompatibleTriple, x) -> np.ndarray:
    """``nJ[i, j, k] = (nabla_i J)_j^k`` for the Levi-Civita connection of gtilde."""
    x = _point(x, triple.dim)
    gam = christoffel(triple.gtilde, x)
    J, dJ = triple.J_jet(x)
    return dJ - np.einsum("lij,lk->ijk", gam, J) + np.einsum("kil,jl->ijk", gam, J)


# ---------------------------------------------------------------------------
# shipped metrics and forms


def euclidean_metric(dim: int) -> ChartMetric:
    eye = np.eye(dim)
    return ChartMetric(dim, lambda c: eye, "euclidean")


def round_sphere_metric(radius: float = 1.0) -> ChartMetric:
    """Round 2-sphere in (theta, phi) polar coordinates."""
    r2 = radius * radius

    def fn(c):
        s = hd.sin(c[0])
        return hd.stack_matrix([[r2, 0.0], [0.0, r2 * s * s]])

    return ChartMetric(2, fn, "sphere")


def sphere_product_metric() -> ChartMetric:
    """Product of two unit round spheres, coordinates (th1, ph1, th2, ph2)."""

    def fn(c):
        s1 = hd.sin(c[0])
        s2 = hd.sin(c[2])
        return hd.stack_matrix(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, s1 * s1, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, s2 * s2],
            ]
        )

    return ChartMetric(4, fn, "S2xS2")


def thurston_metric() -> ChartMetric:
    """Thurston base metric in coordinates (theta1, ..., theta4).

    The 3-4 block is ``[[1, -t], [-t, 1 + t]]`` with ``t = theta2``, so
    ``g34(0) = 0``, ``g34(1) = -1`` and ``det g = 1 + t - t^2``.
    """

    def fn(c):
        t = hd.asarray(c[1])
        return hd.stack_matrix(
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, -t],
                [0.0, 0.0, -t, 1.0 + t],
            ]
        )

    return ChartMetric(4, fn, "thurston")


def constant_form(matrix) -> MatrixFn:
    m = np.array(matrix, dtype=float)
    if not np.allclose(m, -m.T):
        raise GeometryError("form matrix must be antisymmetric")
    return lambda c: m


def thurston_symplectic_form(kappa: float) -> MatrixFn:
    """``d theta1 ^ d theta2 + kappa d theta3 ^ d theta4`` as a matrix."""
    m = np.zeros((4, 4))
    m[0, 1], m[1, 0] = 1.0, -1.0
    m[2, 3], m[3, 2] = kappa, -kappa
    return constant_form(m)


def sphere_product_form() -> MatrixFn:
    """Area form ``sin th1 dth1 ^ dph1 + sin th2 dth2 ^ dph2`` (Kahler with the product metric)."""

    def fn(c):
        s1 = hd.sin(c[0])
        s2 = hd.sin(c[2])
        return hd.stack_matrix(
            [
                [0.0, s1, 0.0, 0.0],
                [-s1, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, s2],
                [0.0, 0.0, -s2, 0.0],
            ]
        )

    return fn


def _fubini_study_hermitian(c):
    """Real and imaginary parts of ``h_ab = d_a dbar_b log(1 + |z|^2)``."""
    x1, y1, x2, y2 = (hd.asarray(t) for t in c)
    q = 1.0 + x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2
    q2 = q * q
    xs = (x1, x2)
    ys = (y1, y2)
    re = [[None, None], [None, None]]
    im = [[None, None], [None, None]]
    for a in range(2):
        for b in range(2):
            # conj(z_a) z_b = (x_a x_b + y_a y_b) + i (x_a y_b - y_a x_b)
            r = -(xs[a] * xs[b] + ys[a] * ys[b]) / q2
            if a == b:
                r = r + 1.0 / q
            re[a][b] = r
            im[a][b] = -(xs[a] * ys[b] - ys[a] * xs[b]) / q2
    return re, im


def fubini_study_metric() -> ChartMetric:
    """Fubini-Study metric on the affine chart of CP^2, coordinates (x1, y1, x2, y2)."""

    def fn(c):
        re, im = _fubini_study_hermitian(c)
        rows = [[None] * 4 for _ in range(4)]
        for a in range(2):
            for b in range(2):
                rows[2 * a][2 * b] = re[a][b]
                rows[2 * a][2 * b + 1] = im[a][b]
                rows[2 * a + 1][2 * b] = -im[a][b]
                rows[2 * a + 1][2 * b + 1] = re[a][b]
        return hd.stack_matrix(rows)

    return ChartMetric(4, fn, "fubini-study")


def fubini_study_form() -> MatrixFn:
    """Kahler form ``omega(u, v) = g(i u, v)`` of :func:`fubini_study_metric`."""

    def fn(c):
        re, im = _fubini_study_hermitian(c)
        rows = [[None] * 4 for _ in range(4)]
        for a in range(2):
            for b in range(2):
                rows[2 * a][2 * b] = -im[a][b]
                rows[2 * a][2 * b + 1] = re[a][b]
                rows[2 * a + 1][2 * b] = -re[a][b]
                rows[2 * a + 1][2 * b + 1] = -im[a][b]
        return hd.stack_matrix(rows)

    return fn


def central_difference_jet(fn, x, h: float = 1e-3):
    """Richardson-extrapolated central differences of a matrix function.

    Independent of the hyper-dual path; used as an oracle in tests.
    Returns ``(value, grad, hess)`` in the layout of :func:`hyperdual.jet`.
    """
    x = np.asarray(x, dtype=float)
    n = x.size

    def f(y):
        return np.asarray(hd.asarray(fn(list(y))).v, dtype=float)

    def d1(i, s):
        e = np.zeros(n)
        e[i] = s
        return (f(x + e) - f(x - e)) / (2 * s)

    def d2(i, j, s):
        ei = np.zeros(n)
        ej = np.zeros(n)
        ei[i] = s
        ej[j] = s
        return (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * s * s)

    val = f(x)
    grad = np.array([(4 * d1(i, h / 2) - d1(i, h)) / 3 for i in range(n)])
    hess = np.array(
        [[(4 * d2(i, j, h / 2) - d2(i, j, h)) / 3 for j in range(n)] for i in range(n)]
    )
    return val, grad, hess
