"""Kahler bases: the p^2 coefficient of the density against Tr(Omega^2k).

On a Kahler base the grade-1 curvature terms vanish, the density is a
polynomial in p^2, and its p^2 coefficient (after contracting the fiber
slot) is a multiple of the trace form ``Tr(Omega^2k)``.

Curvature 2-form matrices are ``Omega[i, j][a, b] = R[i, j, b, a]`` in an
orthonormal frame. A wedge of 2-forms is evaluated with the
``1 / 2**(number of factors)`` convention, so that::

    Tr(Omega^2k)(e_1, ..., e_4k) = 2**(-2k) sum_sigma sgn tr(Omega_{s1 s2} ... Omega_{s(4k-1) s(4k)})
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .bundle import bar_curvature, frame_components, orthonormal_frame
from .geometry import CompatibleTriple, CurvatureData, GeometryError
from .perms import chain_sequences, permutations_with_parity
from .tensor import ShapeError
from .wcs import density_partition, density_prefactor, wcs_density

__all__ = [
    "NotKahlerError",
    "PontryaginForm",
    "curvature_form_matrices",
    "trace_form_component",
    "pontryagin_form",
    "pontryagin_constant",
    "Prop52Result",
    "prop52_check",
    "KAHLER_TOL",
]

KAHLER_TOL = 1e-8


class NotKahlerError(GeometryError):
    """``nabla J`` does not vanish at a queried point."""


def curvature_form_matrices(cd: CurvatureData, frame: np.ndarray | None = None) -> np.ndarray:
    """``Omega[i, j, a, b] = R(e_i, e_j, e_b, e_a)`` in an orthonormal frame."""
    E = orthonormal_frame(cd.metric) if frame is None else np.asarray(frame, dtype=float)
    R = frame_components(cd.riemann, E)
    return np.ascontiguousarray(np.swapaxes(R, 2, 3))


def _check_k(n: int, k: int):
    if k < 1:
        raise ShapeError("k must be >= 1")
    if n < 4 * k:
        raise ShapeError(f"a {4 * k}-form needs base dimension >= {4 * k}, got {n}")


def trace_form_component(Om: np.ndarray, k: int, slots: Iterable[int] | None = None) -> float:
    """``Tr(Omega^2k)`` on the frame vectors ``slots`` (default ``0..4k-1``).

    Pair antisymmetry of ``Omega`` leaves only increasing pairs, which
    cancels the ``2**(-2k)`` of the wedge convention.
    """
    _check_k(Om.shape[0], k)
    idx = np.arange(4 * k) if slots is None else np.asarray(list(slots))
    if len(idx) != 4 * k:
        raise ShapeError(f"need {4 * k} slots")
    seqs, signs = chain_sequences(4 * k, 0)
    s = idx[seqs]
    m = Om[s[:, 0], s[:, 1]]
    for b in range(1, 2 * k):
        m = m @ Om[s[:, 2 * b], s[:, 2 * b + 1]]
    return float(np.trace(m, axis1=1, axis2=2) @ signs)


def pontryagin_constant(k: int) -> float:
    """``(-1)^k / ((2k)! (2 pi)^(2k))``."""
    return (-1) ** k / (math.factorial(2 * k) * (2.0 * math.pi) ** (2 * k))


@dataclass
class PontryaginForm:
    """``p_k = c_k Tr(Omega^2k)`` as a full antisymmetric component array."""

    k: int
    trace: np.ndarray  # Tr(Omega^2k) components

    @property
    def value(self) -> np.ndarray:
        return pontryagin_constant(self.k) * self.trace

    def on_frame(self) -> float:
        """``Tr(Omega^2k)(e_1, ..., e_4k)``."""
        return float(self.trace[tuple(range(4 * self.k))])


def pontryagin_form(cd: CurvatureData, k: int, frame: np.ndarray | None = None) -> PontryaginForm:
    """Antisymmetrized ``Tr(Omega^2k)`` over all ``(4k)!`` slot orders.

    Practical for ``k = 1``; larger k enumerate ``(4k)!`` transposes.
    """
    Om = curvature_form_matrices(cd, frame)
    n = Om.shape[0]
    _check_k(n, k)
    # B[i1, ..., i4k] = tr(Omega_{i1 i2} ... Omega_{i(4k-1) i4k})
    B = Om
    for _ in range(2 * k - 1):
        B = np.einsum("...ab,ijbc->...ijac", B, Om)
    B = np.trace(B, axis1=-2, axis2=-1)
    out = np.zeros_like(B)
    for perm, sign in permutations_with_parity(4 * k):
        out += sign * np.transpose(B, perm)
    return PontryaginForm(k=k, trace=out / 2.0 ** (2 * k))


@dataclass
class Prop52Result:
    k: int
    points: np.ndarray
    lhs: np.ndarray  # prefactor * p^2 coefficient of the density
    rhs: np.ndarray  # 2 (2k+1) Tr(Omega^2k)(e_1..e_4k)
    scale: np.ndarray  # per-point curvature scale, sum of Omega entries squared
    beta: np.ndarray  # non-fiber first-slot class, all powers, max abs
    odd: np.ndarray  # max abs odd-power coefficient
    pontryagin_rhs: np.ndarray  # (-1)^k (4k+2) (2 pi)^2k (2k)! p_k(e_1..e_4k)

    @property
    def max_abs_diff(self) -> float:
        return float(np.abs(self.lhs - self.rhs).max())

    @property
    def max_rel_diff(self) -> float:
        den = np.maximum(np.maximum(np.abs(self.lhs), np.abs(self.rhs)), self.scale)
        return float((np.abs(self.lhs - self.rhs) / den).max())

    @property
    def max_rel_diff_flipped(self) -> float:
        """Same comparison against ``-rhs``."""
        den = np.maximum(np.maximum(np.abs(self.lhs), np.abs(self.rhs)), self.scale)
        return float((np.abs(self.lhs + self.rhs) / den).max())


def prop52_check(triple: CompatibleTriple, k: int, points, *, gate: float = KAHLER_TOL) -> Prop52Result:
    """Compare the p^2 density coefficient with ``2(2k+1) Tr(Omega^2k)``.

    Both sides use the same gtilde-orthonormal frame at each point. The
    left side comes from the permutation chain sum over the bundle
    curvature; the right from the base curvature alone.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if triple.dim != 4 * k:
        raise ShapeError(f"the density is a top form: base dimension must be {4 * k}")
    lhs, rhs, scale, beta, odd, prhs = [], [], [], [], [], []
    c = (-1) ** k * (4 * k + 2) * (2.0 * math.pi) ** (2 * k) * math.factorial(2 * k)
    for x in pts:
        bc = bar_curvature(triple, x)
        dev = float(np.abs(bc.nablaJ).max())
        if dev > gate:
            raise NotKahlerError(f"|nabla J| = {dev:.3g} at {x.tolist()}")
        dens = wcs_density(bc, normalize=False).raw
        lhs.append(density_prefactor(4 * k) * dens[2])
        Om = curvature_form_matrices(bc.base, bc.frame)
        tr = trace_form_component(Om, k)
        rhs.append(2.0 * (2 * k + 1) * tr)
        prhs.append(c * pontryagin_constant(k) * tr)
        scale.append(float(np.sum(Om**2)))
        _, b = density_partition(bc)
        beta.append(float(np.abs(b).max()))
        odd.append(float(np.abs(dens[1::2]).max()))
    return Prop52Result(
        k=k,
        points=pts,
        lhs=np.array(lhs),
        rhs=np.array(rhs),
        scale=np.array(scale),
        beta=np.array(beta),
        odd=np.array(odd),
        pontryagin_rhs=np.array(prhs),
    )
