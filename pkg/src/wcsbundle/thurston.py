"""The Thurston manifold: WCS integrand, theta2 integral and nonvanishing test.

Base data: the matrix metric of :func:`thurston_metric`, the form
``omega = d theta1 ^ d theta2 + kappa d theta3 ^ d theta4`` and its
compatible triple. Everything depends on the base point only through
``theta2``, via ``beta = 1 + theta2 - theta2**2``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import hyperdual as hd
from .bundle import (
    BundleCurvature,
    ConnectionPotential,
    bar_curvature,
    direct_bundle_curvature,
    frame_components,
    lifted_frame,
    orthonormal_frame,
)
from .geometry import (
    CompatibleTriple,
    GeometryError,
    compatible_triple,
    thurston_metric,
    thurston_symplectic_form,
)
from .ppoly import PGradedTensor, PPoly
from .wcs import density_prefactor, wcs_density

__all__ = [
    "ThurstonConfig",
    "QuadratureSpec",
    "beta",
    "thurston_base",
    "thurston_potential",
    "thurston_density",
    "thurston_integrand",
    "direct_integrand",
    "closed_form_integrand",
    "thurston_integral",
    "closed_form_integral",
    "inner_integral_closed_form",
    "beta_integrals",
    "acoth",
    "nonvanishing_check",
    "quartic_roots",
    "node_table",
    "node_csv",
]


def beta(theta2):
    return 1.0 + theta2 - theta2 * theta2


def acoth(x: float) -> float:
    return 0.5 * math.log((x + 1.0) / (x - 1.0))


@dataclass(frozen=True)
class ThurstonConfig:
    kappa: int
    p: int
    nodes: int = 64

    def __post_init__(self):
        if self.kappa == 0:
            raise ValueError("kappa must be nonzero")


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre rule mapped to [0, 1]; weights sum to 1."""

    nodes: int = 64

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("quadrature needs at least 2 nodes")

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        return 0.5 * (x + 1.0), 0.5 * w

    def integrate(self, values) -> float:
        _, w = self.rule()
        return float(np.asarray(values, dtype=float) @ w)


# ---------------------------------------------------------------------------
# base data


def thurston_base(kappa: float) -> CompatibleTriple:
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    return compatible_triple(thurston_metric(), thurston_symplectic_form(kappa))


def thurston_potential(kappa: float) -> ConnectionPotential:
    """``eta = 2 theta1 d theta2 + 2 kappa theta3 d theta4`` (half-curl = omega)."""

    def fn(c):
        zero = hd.asarray(0.0) * c[0]
        a = 2.0 * hd.asarray(c[0])
        b = (2.0 * kappa) * hd.asarray(c[2])
        parts = [zero, a, zero, b]
        return hd.HyperDual(*(np.array([getattr(q, k) for q in parts]) for k in ("v", "e1", "e2", "e12")))

    return ConnectionPotential(4, fn)


def _point(theta2, rest=(0.0, 0.0, 0.0)):
    t1, t3, t4 = rest
    return np.array([t1, theta2, t3, t4], dtype=float)


def thurston_density(kappa: float, theta2: float, frame: str = "orthonormal") -> PPoly:
    """Density polynomial in p at ``theta2``.

    ``frame="orthonormal"`` is the permutation sum in the lifted
    orthonormal frame; ``"coordinate"`` is the same 5-form evaluated on
    the coordinate vectors ``d/dtheta0..d/dtheta4``, which carries the
    volume factor ``1 / det(frame)`` (that is ``|kappa|`` here).
    """
    bc = bar_curvature(thurston_base(kappa), _point(theta2))
    poly = wcs_density(bc).poly
    if frame == "orthonormal":
        return poly
    if frame == "coordinate":
        return poly * (1.0 / np.linalg.det(bc.frame))
    raise ValueError(f"unknown frame {frame!r}")


def thurston_integrand(p: float, kappa: float, theta2: float, frame: str = "orthonormal") -> float:
    if p == 0:
        raise ValueError("p must be nonzero")
    return thurston_density(kappa, theta2, frame)(p)


def closed_form_integrand(p, theta2):
    b = beta(theta2)
    return (p * p / 16.0) * (3072.0 * p**4 - 640.0 * p * p / b**2 - 25.0 / b**4)


def direct_integrand(p: float, kappa: float, x5) -> float:
    """Integrand from the chart curvature of the 5D total space.

    ``x5 = (theta0, theta1, theta2, theta3, theta4)``; the frame is the
    horizontal lift of the base orthonormal frame plus the fiber vector.
    """
    if p == 0:
        raise ValueError("p must be nonzero")
    tr = thurston_base(kappa)
    pot = thurston_potential(kappa)
    x5 = np.asarray(x5, dtype=float)
    x = x5[1:]
    E = orthonormal_frame(tr.gtilde(x))
    F = lifted_frame(E, pot, p, x)
    cd = direct_bundle_curvature(tr, pot, p, x5)
    comps = frame_components(cd.riemann, F)
    bc = BundleCurvature(
        base_point=x,
        frame=E,
        gram=F @ cd.metric @ F.T,
        components=PGradedTensor(comps[None]),
        J=np.zeros((4, 4)),
        nablaJ=np.zeros((4, 4, 4)),
        base=cd,
    )
    return wcs_density(bc, normalize=False).raw[0]


# ---------------------------------------------------------------------------
# integrals


def beta_integrals() -> tuple[float, float]:
    """Closed forms of the integrals of ``beta**-2`` and ``beta**-4`` over [0, 1]."""
    r5 = math.sqrt(5.0)
    a = acoth(r5)
    return (2.0 / 25.0) * (5.0 + 4.0 * r5 * a), (16.0 / 375.0) * (10.0 + 3.0 * r5 * a)


def inner_integral_closed_form(p: float) -> float:
    i2, i4 = beta_integrals()
    return 3072.0 * p**4 - 640.0 * p * p * i2 - 25.0 * i4


def _prefactor(p: float, kappa: float) -> float:
    return 3.0 * kappa * math.pi**2 * abs(p) ** 1.5 / 8.0


def closed_form_integral(p: float, kappa: float) -> float:
    if p == 0:
        raise ValueError("p = 0 is excluded (that case is topological)")
    return _prefactor(p, kappa) * inner_integral_closed_form(abs(p))


def _densities(kappa, theta, threads):
    def one(t):
        return thurston_density(kappa, t, "coordinate")

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, theta))  # map keeps node order
    return [one(t) for t in theta]


def thurston_integral(p: float, kappa: float, quad: QuadratureSpec | None = None, *, threads: int = 1) -> float:
    """Integral of the pulled-back WCS form over the total space.

    Quadrature in theta2 of the coordinate-frame integrand (the other
    base coordinates integrate to 1), times the fiber length
    ``2 pi / sqrt|p|``, the loop parameter ``2 pi`` and the density
    prefactor. Negative p uses ``|p|``.
    """
    if p == 0:
        raise ValueError("p = 0 is excluded (that case is topological)")
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    quad = quad or QuadratureSpec()
    q = abs(p)
    theta, _ = quad.rule()
    vals = [d(q) for d in _densities(kappa, theta, threads)]
    fiber = 2.0 * math.pi / math.sqrt(q)
    return 2.0 * math.pi * density_prefactor(4) * fiber * quad.integrate(vals)


def node_table(p: float, kappa: float, quad: QuadratureSpec | None = None, *, threads: int = 1):
    """Per-node rows ``(theta2, beta, integrand, closed_form, abs_diff)``.

    The integrand column is the coordinate-frame integrand per unit
    kappa, which is the orthonormal-frame value for ``kappa > 0``.
    """
    if p == 0:
        raise ValueError("p must be nonzero")
    quad = quad or QuadratureSpec()
    theta, _ = quad.rule()
    rows = []
    for t, d in zip(theta, _densities(kappa, theta, threads)):
        v = d(p) / kappa
        c = closed_form_integrand(p, t)
        rows.append((float(t), float(beta(t)), float(v), float(c), abs(v - c)))
    return rows


def node_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta2", "beta", "integrand", "closed_form", "abs_diff"])
    for r in rows:
        w.writerow([f"{x:.15g}" for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# nonvanishing


def nonvanishing_check(p: float) -> tuple[float, bool]:
    """Value of the integrated expression (up to a positive factor) and ``|value| > 1e-6``."""
    r5 = math.sqrt(5.0)
    v = 10.0 * (-1.0 - 24.0 * p * p + 288.0 * p**4) - 3.0 * r5 * (1.0 + 64.0 * p * p) * acoth(r5)
    return v, abs(v) > 1e-6


def quartic_roots() -> list[complex]:
    """The four p-roots of the nonvanishing expression, real pair first."""
    c = 3.0 * math.sqrt(5.0) * acoth(math.sqrt(5.0))
    # 2880 q^2 - (240 + 64 c) q - (10 + c) = 0 with q = p^2
    a, b, cc = 2880.0, -(240.0 + 64.0 * c), -(10.0 + c)
    disc = math.sqrt(b * b - 4.0 * a * cc)
    q_pos = (-b + disc) / (2.0 * a)
    q_neg = (-b - disc) / (2.0 * a)
    r = math.sqrt(q_pos)
    s = math.sqrt(-q_neg)
    return [complex(r, 0.0), complex(-r, 0.0), complex(0.0, s), complex(0.0, -s)]
