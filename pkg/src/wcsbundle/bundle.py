"""Curvature of the circle bundle ``M_p`` over a symplectic base.

Frame convention: index 0 is the unit fiber vector ``xi``; indices
``1..N`` are horizontal lifts of a gtilde-orthonormal base frame obtained
by modified Gram-Schmidt from the coordinate frame. Components are
``Rbar[i, j, k, l] = <Rbar(e_i, e_j) e_k, e_l>`` graded by powers of p.

The bundle metric is ``gbar = pi^* g + etabar (x) etabar`` with
``etabar(xi) = 1`` and ``etabar([X^L, Y^L]) = -2 p omega(X, Y)``. In the
standard exterior-derivative normalization that is ``d etabar = 2 p omega``,
so a :class:`ConnectionPotential` stores a one-form ``eta`` whose
half-curl ``(d_i eta_j - d_j eta_i) / 2`` equals ``omega``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import hyperdual as hd
from .geometry import (
    ChartMetric,
    CompatibleTriple,
    CurvatureData,
    GeometryError,
    nabla_J,
    riemann,
)
from .ppoly import PGradedTensor

__all__ = [
    "FrameError",
    "BundleCurvature",
    "ConnectionPotential",
    "orthonormal_frame",
    "bar_curvature",
    "bundle_metric",
    "direct_bundle_curvature",
    "lifted_frame",
    "frame_components",
    "linear_potential",
]


class FrameError(GeometryError):
    """The supplied frame is not orthonormal to the required tolerance."""


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Rows are a g-orthonormal frame from modified Gram-Schmidt on d_1..d_n."""
    n = g.shape[0]
    frame = np.eye(n)
    for a in range(n):
        v = frame[a].copy()
        for b in range(a):
            v -= (v @ g @ frame[b]) * frame[b]
        norm = np.sqrt(v @ g @ v)
        if not norm > 0:
            raise GeometryError("coordinate frame is degenerate")
        frame[a] = v / norm
    return frame


def frame_components(tensor: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """All-lower tensor evaluated on frame rows in every slot."""
    out = tensor
    for _ in range(tensor.ndim):
        # contract the leading coordinate slot and rotate it to the back
        out = np.tensordot(out, frame, axes=([0], [1]))
    return out


@dataclass
class BundleCurvature:
    """``Rbar`` at a base point, p-graded, in the frame ``{xi, e_1..e_N}``.

    ``frame`` holds the base components of ``e_1..e_N`` (rows);
    ``gram`` is the Gram matrix of the full bundle frame, identity up to
    roundoff for a valid frame. ``components`` is all-lower; since the
    frame is orthonormal, ``mixed`` carries the same numbers.
    """

    base_point: np.ndarray
    frame: np.ndarray
    gram: np.ndarray
    components: PGradedTensor
    J: np.ndarray
    nablaJ: np.ndarray
    base: CurvatureData

    @property
    def dim(self) -> int:
        return self.components.dims[0]

    @property
    def mixed(self) -> PGradedTensor:
        return self.components

    def evaluate(self, p: float) -> np.ndarray:
        return self.components.evaluate(p)


def bar_curvature(triple: CompatibleTriple, x, frame: np.ndarray | None = None) -> BundleCurvature:
    """Assemble ``Rbar`` from base curvature, ``J`` and ``nabla J``.

    Grade 0 carries the base curvature, grade 1 the ``nabla J`` terms,
    grade 2 the ``J (x) J`` terms and ``Rbar(X, xi, Y, xi) = -p^2 g(X, Y)``.
    The base metric is the triple's compatible ``gtilde``.
    """
    cd = riemann(triple.gtilde, x)
    g = cd.metric
    n = g.shape[0]
    E = orthonormal_frame(g) if frame is None else np.asarray(frame, dtype=float)
    gram_base = E @ g @ E.T

    Jm = triple.J(x)  # row-first endomorphism
    Jlow = Jm @ g  # J_low[i, j] = g(J d_i, d_j)
    nJ = nabla_J(triple, x)  # (nabla_i J)_j^k
    nJlow = np.einsum("ijk,kl->ijl", nJ, g)  # g((nabla_i J) d_j, d_l)
    cd.nablaJ = nJ

    R = frame_components(cd.riemann, E)
    Jf = frame_components(Jlow, E)
    NJ = frame_components(nJlow, E)  # NJ[x, y, z] = g((nabla_x J) y, z)

    D = n + 1
    h = slice(1, D)
    out = np.zeros((3, D, D, D, D))
    out[0][h, h, h, h] = R
    out[2][h, h, h, h] = (
        -np.einsum("bc,ad->abcd", Jf, Jf)
        + np.einsum("ac,bd->abcd", Jf, Jf)
        + 2.0 * np.einsum("ab,cd->abcd", Jf, Jf)
    )
    # (ii): Rbar(X, Y, Z, xi) = -g((nabla_X J) Y, Z) + g((nabla_Y J) X, Z)
    xyz0 = -NJ + np.einsum("yxz->xyz", NJ)
    out[1][h, h, h, 0] = xyz0
    out[1][h, h, 0, h] = -xyz0
    # (iv): Rbar(X, xi, Y, Z) = g((nabla_X J) Y, Z)
    out[1][h, 0, h, h] = NJ
    out[1][0, h, h, h] = -NJ
    # (iii): Rbar(X, xi, Y, xi) = -g(X, Y)
    eye = gram_base
    out[2][h, 0, h, 0] = -eye
    out[2][0, h, h, 0] = eye
    out[2][h, 0, 0, h] = eye
    out[2][0, h, 0, h] = -eye

    gram = np.zeros((D, D))
    gram[0, 0] = 1.0
    gram[h, h] = gram_base
    return BundleCurvature(
        base_point=cd.point,
        frame=E,
        gram=gram,
        components=PGradedTensor(out),
        J=Jf,
        nablaJ=NJ,
        base=cd,
    )


# ---------------------------------------------------------------------------
# direct computation on the total space


@dataclass(frozen=True)
class ConnectionPotential:
    """Local one-form ``eta`` on the base chart, ``half_curl(eta) = omega``.

    ``fn`` maps base coordinates to the component vector ``eta_i``.
    """

    dim: int
    fn: Callable[[Sequence], object]

    def __call__(self, x) -> np.ndarray:
        return np.asarray(hd.asarray(self.fn(list(np.asarray(x, dtype=float)))).v)

    def half_curl(self, x) -> np.ndarray:
        """``(d_i eta_j - d_j eta_i) / 2`` by hyper-dual differentiation."""
        _, grad, _ = hd.jet(lambda c: hd.asarray(self.fn(c)), np.asarray(x, dtype=float))
        return 0.5 * (grad - grad.T)


def linear_potential(omega_matrix) -> ConnectionPotential:
    """Symmetric-gauge potential ``eta_j = -omega_jk x^k`` (so half-curl = omega)."""
    om = np.array(omega_matrix, dtype=float)
    n = om.shape[0]

    def fn(c):
        comps = []
        for j in range(n):
            acc = hd.asarray(0.0)
            for k in range(n):
                if om[k, j] != 0.0:
                    acc = acc + om[k, j] * hd.asarray(c[k])
            comps.append(acc)
        return hd.HyperDual(
            np.array([q.v for q in comps]),
            np.array([q.e1 for q in comps]),
            np.array([q.e2 for q in comps]),
            np.array([q.e12 for q in comps]),
        )

    return ConnectionPotential(n, fn)


def bundle_metric(g: ChartMetric, potential: ConnectionPotential, p: float) -> ChartMetric:
    """``gbar = g + (d theta0 + p eta) (x) (d theta0 + p eta)`` on (theta0, x)."""
    n = g.dim

    def fn(c):
        base = hd.asarray(g.fn(c[1:]))
        eta = hd.asarray(potential.fn(c[1:]))
        one = hd.HyperDual(np.ones(1))
        row = _concat(one, p * eta)
        outer = _outer(row, row)
        pad = _pad_base(base, n)
        return outer + pad

    return ChartMetric(n + 1, fn, f"bundle(p={p})")


def _concat(a: hd.HyperDual, b: hd.HyperDual) -> hd.HyperDual:
    return hd.HyperDual(
        *(np.concatenate([getattr(a, k), getattr(b, k)]) for k in ("v", "e1", "e2", "e12"))
    )


def _outer(a: hd.HyperDual, b: hd.HyperDual) -> hd.HyperDual:
    col = hd.HyperDual(a.v[:, None], a.e1[:, None], a.e2[:, None], a.e12[:, None])
    row = hd.HyperDual(b.v[None, :], b.e1[None, :], b.e2[None, :], b.e12[None, :])
    return col * row


def _pad_base(base: hd.HyperDual, n: int) -> hd.HyperDual:
    parts = []
    for k in ("v", "e1", "e2", "e12"):
        a = np.zeros((n + 1, n + 1))
        a[1:, 1:] = getattr(base, k)
        parts.append(a)
    return hd.HyperDual(*parts)


def lifted_frame(base_frame: np.ndarray, potential: ConnectionPotential, p: float, x) -> np.ndarray:
    """Bundle-chart components (theta0 first) of ``{xi, e_1^L, ..., e_N^L}``."""
    E = np.asarray(base_frame, dtype=float)
    n = E.shape[0]
    eta = potential(x)
    F = np.zeros((n + 1, n + 1))
    F[0, 0] = 1.0
    F[1:, 1:] = E
    F[1:, 0] = -p * (E @ eta)
    return F


def direct_bundle_curvature(triple: CompatibleTriple, potential: ConnectionPotential, p: float, x5) -> CurvatureData:
    """Riemann data of the total-space chart metric at ``x5 = (theta0, x)``."""
    if potential.dim != triple.dim:
        raise GeometryError("potential and base have different dimensions")
    return riemann(bundle_metric(triple.gtilde, potential, p), x5)
