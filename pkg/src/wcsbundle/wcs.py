"""Pulled-back Wodzicki-Chern-Simons density on fiber loops.

For a bundle curvature in the frame ``{xi, e_1..e_N}`` the density is::

    sum_sigma sgn(sigma) Rbar[s0, l1, 0, r] Rbar[s1, s2, l2, l1] ... Rbar[.., .., r, lm]

over all permutations of ``0..N``, a polynomial in p. ``WCSDensity.poly``
holds it without the ``(m + 1) / 2**(m - 1)`` prefactor (``N = 2m``),
which for ``N = 4n`` reads ``(2n + 1) / 2**(2n - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bundle import BundleCurvature, FrameError
from .ppoly import PPoly
from .tensor import ShapeError, chain_term_bound, pfaffian_sum, signed_chain_sum
from .perms import chain_sequences

__all__ = [
    "WCSDensity",
    "wcs_density",
    "density_prefactor",
    "top_coefficient_closed_form",
    "top_coefficient_direct",
    "cancellation_check",
    "CancellationReport",
    "pair_term_cancels",
    "dim_4n_plus_2_vanishing",
    "random_compatible",
    "compatible_structure",
    "PUBLISHED_TABLE",
]

# published top coefficients for flat normal-form data
PUBLISHED_TABLE = {4: -192.0, 6: 0.0, 8: 61440.0}

FRAME_TOL = 1e-8


def density_prefactor(base_dim: int) -> float:
    """``(m + 1) / 2**(m - 1)`` for base dimension ``2m``; ``3/2`` for a 4-manifold."""
    m = base_dim // 2
    return (m + 1) / 2.0 ** (m - 1)


@dataclass
class WCSDensity:
    dim: int
    poly: PPoly
    prefactor: float
    raw: np.ndarray = field(repr=False)

    @property
    def top_power(self) -> int:
        return self.dim + 1

    @property
    def top_coefficient(self) -> float:
        return self.poly[self.top_power]

    def value(self, p: float) -> float:
        return self.poly(p)


def _chain_inputs(bc: BundleCurvature):
    c = bc.components.grades
    return c[:, :, :, 0, :], c


def wcs_density(bc: BundleCurvature, *, threads: int = 1, normalize: bool = True) -> WCSDensity:
    """Grade-carried density of ``bc`` as a polynomial in p."""
    D = bc.dim
    if D % 2 == 0:
        raise ShapeError("bundle dimension must be odd")
    dev = np.abs(bc.gram - np.eye(D)).max()
    if dev > FRAME_TOL:
        raise FrameError(f"frame Gram matrix deviates from identity by {dev:.3g}")
    first, pair = _chain_inputs(bc)
    top = D + 1
    coeffs = signed_chain_sum(first, pair, D, max_degree=top, threads=threads)
    poly = PPoly(coeffs)
    if normalize:
        poly = poly.normalized()
    return WCSDensity(dim=D, poly=poly, prefactor=density_prefactor(D - 1), raw=coeffs)


def density_partition(bc: BundleCurvature, *, threads: int = 1):
    """Split the density by whether the first slot is the fiber index.

    Returns ``(alpha, beta)`` coefficient arrays with ``alpha`` holding
    the ``s0 = xi`` terms and ``beta`` the rest.
    """
    first, pair = _chain_inputs(bc)
    D = bc.dim
    fa = np.zeros_like(first)
    fa[:, 0] = first[:, 0]
    fb = first.copy()
    fb[:, 0] = 0.0
    alpha = signed_chain_sum(fa, pair, D, max_degree=D + 1, threads=threads)
    beta = signed_chain_sum(fb, pair, D, max_degree=D + 1, threads=threads)
    return alpha, beta


# ---------------------------------------------------------------------------
# top coefficient


def compatible_structure(Jlow, g):
    """Check compatibility and return the row-first endomorphism ``J``."""
    Jlow = np.asarray(Jlow, dtype=float)
    g = np.asarray(g, dtype=float)
    if Jlow.ndim != 2 or Jlow.shape != g.shape or Jlow.shape[0] != Jlow.shape[1]:
        raise ShapeError("J and g must be square matrices of one size")
    n = Jlow.shape[0]
    if n % 2:
        raise ShapeError("compatible structures need an even dimension")
    Jm = Jlow @ np.linalg.inv(g)
    scale = max(1.0, np.abs(Jm).max() ** 2)
    if np.abs(Jm @ Jm + np.eye(n)).max() > 1e-9 * scale:
        raise ValueError("J does not square to -1 against g")
    if np.abs(Jlow + Jlow.T).max() > 1e-9 * max(1.0, np.abs(Jlow).max()):
        raise ValueError("J_low is not antisymmetric")
    return Jm


def top_coefficient_closed_form(Jlow, g=None, dim: int | None = None) -> float:
    """``(-1)^(n+1) 2^(2n+1) (2n+1) * pfaffian_sum(J_low)`` for base dim 4n."""
    Jlow = np.asarray(Jlow, dtype=float)
    N = Jlow.shape[0]
    if dim is not None and dim != N:
        raise ShapeError(f"J has extent {N}, expected {dim}")
    if N % 4:
        raise ShapeError("closed form applies to base dimension 4n")
    if g is not None:
        compatible_structure(Jlow, g)
    n = N // 4
    return (-1) ** (n + 1) * 2.0 ** (2 * n + 1) * (2 * n + 1) * pfaffian_sum(Jlow)


def _curvature_p2_blocks(Jlow, g):
    """Top-grade mixed pair matrices ``P[a, b][c, d] = Rbar_{abc}^d`` (p^2 part)."""
    gi = np.linalg.inv(g)
    lowered = (
        -np.einsum("bc,ad->abcd", Jlow, Jlow)
        + np.einsum("ac,bd->abcd", Jlow, Jlow)
        + 2.0 * np.einsum("ab,cd->abcd", Jlow, Jlow)
    )
    return np.einsum("abcw,wd->abcd", lowered, gi)


def _embedded_top_inputs(Jlow, g):
    """Chain inputs for the top coefficient, valid in any (non-orthonormal) frame.

    Only the fiber slot contributes at top grade, where the first factor
    is ``-identity``; it is embedded as index 0 of a ``N + 1`` chain.
    """
    N = Jlow.shape[0]
    first = np.zeros((N + 1, N, N))
    first[0] = -np.eye(N)
    pair = np.zeros((N + 1, N + 1, N, N))
    pair[1:, 1:] = _curvature_p2_blocks(Jlow, g)
    return first, pair


def top_coefficient_direct(Jlow, g, *, threads: int = 1) -> float:
    """Top power coefficient of the density from the p^2 curvature grades only."""
    Jlow = np.asarray(Jlow, dtype=float)
    g = np.asarray(g, dtype=float)
    compatible_structure(Jlow, g)
    first, pair = _embedded_top_inputs(Jlow, g)
    return signed_chain_sum(first, pair, Jlow.shape[0] + 1, threads=threads)


def dim_4n_plus_2_vanishing(g, Jlow, dim: int | None = None, *, threads: int = 1):
    """Top coefficient ``S_{4n+3, 4n+4}`` for base dimension ``4n + 2``.

    Returns ``(value, scale)``; ``scale`` sums, over all permutations, the
    product of the Frobenius norms of the chain factors, which bounds the
    magnitude of every individual term.
    """
    Jlow = np.asarray(Jlow, dtype=float)
    g = np.asarray(g, dtype=float)
    N = Jlow.shape[0]
    if dim is not None and dim != N:
        raise ShapeError(f"J has extent {N}, expected {dim}")
    if N % 4 != 2:
        raise ShapeError("expected a base dimension of the form 4n + 2")
    compatible_structure(Jlow, g)
    first, pair = _embedded_top_inputs(Jlow, g)
    value = signed_chain_sum(first, pair, N + 1, threads=threads)
    return value, chain_term_bound(first, pair, N + 1)


# ---------------------------------------------------------------------------
# the g_{sigma sigma} cancellation


def _block_tensors(Jlow, g):
    """Nine-term and five-term four-slot blocks ``T[s1, s2, s3, s4, a3, a1]``.

    The nine-term block is the contracted product of two top-grade
    curvature factors; the five-term block drops every term carrying a
    metric factor between two permutation slots.
    """
    Jm = Jlow @ np.linalg.inv(g)  # J_i^a
    d = np.eye(Jlow.shape[0])
    e = np.einsum
    terms_gss = [
        e("ia,xb,jk->ijkxba", Jm, Jlow, g, optimize=True),  # J_s1^a1 J_s4a3 g_s2s3
        -e("ia,kb,jx->ijkxba", Jm, Jlow, g, optimize=True),  # -J_s1^a1 J_s3a3 g_s2s4
        -e("ja,xb,ik->ijkxba", Jm, Jlow, g, optimize=True),  # -J_s2^a1 J_s4a3 g_s1s3
        e("ja,kb,ix->ijkxba", Jm, Jlow, g, optimize=True),  # J_s2^a1 J_s3a3 g_s1s4
    ]
    terms_kept = [
        -2 * e("ia,kx,jb->ijkxba", Jm, Jlow, g, optimize=True),  # -2 J_s1^a1 J_s3s4 g_s2a3
        2 * e("ja,kx,ib->ijkxba", Jm, Jlow, g, optimize=True),  # 2 J_s2^a1 J_s3s4 g_s1a3
        2 * e("ij,xb,ka->ijkxba", Jlow, Jlow, d, optimize=True),  # 2 J_s1s2 J_s4a3 d_s3^a1
        -2 * e("ij,kb,xa->ijkxba", Jlow, Jlow, d, optimize=True),  # -2 J_s1s2 J_s3a3 d_s4^a1
        -4 * e("ij,kx,ba->ijkxba", Jlow, Jlow, d, optimize=True),  # -4 J_s1s2 J_s3s4 d_a3^a1
    ]
    reduced = sum(terms_kept)
    full = reduced + sum(terms_gss)
    return full, reduced


def _block_chain_sum(T, N):
    """``-sum_{sigma in S_N} sgn * tr(T_n ... T_1)`` over four-slot blocks."""
    seqs, signs = chain_sequences(N, 0)  # increasing pairs; blocks are pair-antisymmetric
    nblocks = N // 4
    total = 0.0
    step = 4096
    for lo in range(0, len(seqs), step):
        s = seqs[lo : lo + step]
        m = None
        for b in range(nblocks):
            blk = T[s[:, 4 * b], s[:, 4 * b + 1], s[:, 4 * b + 2], s[:, 4 * b + 3]]
            m = blk if m is None else blk @ m
        total += float(np.trace(m, axis1=1, axis2=2) @ signs[lo : lo + step])
    return -total * 2.0 ** (N // 2)


@dataclass
class CancellationReport:
    dim: int
    full: float
    reduced: float
    closed_form: float
    direct: float

    @property
    def rel_diff(self) -> float:
        return abs(self.full - self.reduced) / max(abs(self.full), abs(self.reduced), 1e-300)


def cancellation_check(Jlow, g, dim: int | None = None) -> CancellationReport:
    """Top coefficient with and without the ``g_{sigma_i sigma_j}`` terms.

    The nine-term block sum (the exact contraction of two curvature
    factors) and the five-term block sum must agree; both are reported
    alongside the closed form and the curvature-chain value.
    """
    Jlow = np.asarray(Jlow, dtype=float)
    g = np.asarray(g, dtype=float)
    N = Jlow.shape[0]
    if dim is not None and dim != N:
        raise ShapeError(f"J has extent {N}, expected {dim}")
    if N % 4:
        raise ShapeError("cancellation check needs base dimension 4n")
    compatible_structure(Jlow, g)
    full_t, red_t = _block_tensors(Jlow, g)
    return CancellationReport(
        dim=N,
        full=_block_chain_sum(full_t, N),
        reduced=_block_chain_sum(red_t, N),
        closed_form=top_coefficient_closed_form(Jlow, g),
        direct=top_coefficient_direct(Jlow, g),
    )


def pair_term_cancels(sigma, i: int, j: int, term) -> float:
    """``sgn(s) f(s) + sgn(s') f(s')`` for ``s' = s`` with slots i, j swapped.

    ``term`` maps a permutation tuple to a number symmetric under that
    swap (e.g. a product carrying ``g_{s_i s_j}``); the return value is
    exactly 0 for such terms.
    """
    from .perms import permutation_sign

    s = list(sigma)
    t = list(sigma)
    t[i], t[j] = t[j], t[i]
    return permutation_sign(s) * term(tuple(s)) + permutation_sign(t) * term(tuple(t))


# ---------------------------------------------------------------------------
# random compatible data


def random_compatible(dim: int, rng: np.random.Generator, cond: float = 10.0):
    """``(g, J_low)`` from the normal form by a random change of frame ``Q``.

    ``g = Q Q^T`` and ``J_low = Q J0 Q^T`` keep compatibility exact while
    leaving the orthonormal gauge.
    """
    from .tensor import normal_form_J

    while True:
        Q = rng.normal(size=(dim, dim)) + 2.0 * np.eye(dim)
        if np.linalg.cond(Q) < cond:
            break
    J0 = normal_form_J(dim)
    g = Q @ Q.T
    Jlow = Q @ J0 @ Q.T
    return g, Jlow
