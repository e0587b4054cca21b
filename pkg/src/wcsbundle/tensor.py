"""Dense tensors, contraction, and signed chain sums over permutations."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .perms import chain_sequences

__all__ = [
    "ShapeError",
    "DenseTensor",
    "contract",
    "signed_chain_sum",
    "signed_chain_sum_bruteforce",
    "chain_term_bound",
    "pfaffian_sum",
    "normal_form_J",
    "CHUNK_SIZE",
]

CHUNK_SIZE = 2048


class ShapeError(ValueError):
    """Index extents or dimensions do not fit the operation."""


@dataclass(frozen=True)
class DenseTensor:
    """A real multi-index array; ``data`` is the row-major flat view."""

    array: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.array, dtype=float)
        if any(d < 1 for d in a.shape):
            raise ShapeError("all extents must be >= 1")
        object.__setattr__(self, "array", a)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.array.shape

    @property
    def rank(self) -> int:
        return self.array.ndim

    @property
    def data(self) -> np.ndarray:
        return self.array.reshape(-1)

    @property
    def strides(self) -> tuple[int, ...]:
        return tuple(s // self.array.itemsize for s in self.array.strides)


def contract(a: DenseTensor, b: DenseTensor, pairs: Sequence[tuple[int, int]]) -> DenseTensor:
    """Sum over the paired indices; free indices of ``a`` come first, then ``b``."""
    pairs = list(pairs)
    ia = [i for i, _ in pairs]
    ib = [j for _, j in pairs]
    if len(set(ia)) != len(ia) or len(set(ib)) != len(ib):
        raise ShapeError("an index appears in more than one pair")
    for i, j in pairs:
        if not (0 <= i < a.rank and 0 <= j < b.rank):
            raise ShapeError(f"pair {(i, j)} out of range")
        if a.dims[i] != b.dims[j]:
            raise ShapeError(f"extent mismatch on pair {(i, j)}: {a.dims[i]} vs {b.dims[j]}")
    out = np.tensordot(a.array, b.array, axes=(ia, ib))
    if out.ndim == 0:
        out = out.reshape(1)
    return DenseTensor(out)


def normal_form_J(dim: int) -> np.ndarray:
    """``[[0, I], [-I, 0]]`` of size ``dim``."""
    if dim % 2:
        raise ShapeError("normal form needs an even dimension")
    h = dim // 2
    j = np.zeros((dim, dim))
    j[:h, h:] = np.eye(h)
    j[h:, :h] = -np.eye(h)
    return j


# ---------------------------------------------------------------------------
# signed chain sums


def _polymatmul(b, m, max_degree):
    """Graded batch product: ``out[k] = sum_{i+j=k} b[i] @ m[j]``."""
    gb = b.shape[0]
    gm = m.shape[0]
    n = min(gb + gm - 1, max_degree + 1)
    out = np.zeros((n,) + m.shape[1:])
    for i in range(gb):
        if i >= n:
            break
        hi = min(gm, n - i)
        if not b[i].any():
            continue
        out[i : i + hi] += b[i][None] @ m[:hi]
    return out


def _chain_chunk(first, pair, seqs, signs, lead, max_degree):
    m = first[:, seqs[:, 0]]  # (G, c, D, D)
    npairs = (seqs.shape[1] - lead) // 2
    for k in range(npairs):
        a = seqs[:, lead + 2 * k]
        b = seqs[:, lead + 2 * k + 1]
        m = _polymatmul(pair[:, a, b], m, max_degree)
    tr = np.trace(m, axis1=-2, axis2=-1)  # (G, c)
    return tr @ signs


def _chain_inputs(first_factor, pair_matrix, dim):
    if callable(first_factor):
        first = np.array([np.asarray(first_factor(s), dtype=float) for s in range(dim)])
    else:
        first = np.asarray(first_factor, dtype=float)
    if callable(pair_matrix):
        pair = None
        for i in range(dim):
            for j in range(dim):
                mij = np.asarray(pair_matrix(i, j), dtype=float)
                if pair is None:
                    pair = np.zeros((dim, dim) + mij.shape)
                pair[i, j] = mij
    else:
        pair = np.asarray(pair_matrix, dtype=float)
    # graded inputs carry a leading grade axis
    if first.ndim == 3:
        first = first[None]
    if pair.ndim == 4:
        pair = pair[None]
    if first.ndim != 4 or first.shape[1] != dim:
        raise ShapeError(f"first factor must have shape ([G,] {dim}, K, K)")
    if pair.ndim != 5 or pair.shape[1:3] != (dim, dim):
        raise ShapeError(f"pair matrices must have shape ([G,] {dim}, {dim}, K, K)")
    if first.shape[-2:] != pair.shape[-2:] or first.shape[-1] != first.shape[-2]:
        raise ShapeError("chain matrices must be square and of one size")
    return first, pair


def signed_chain_sum(
    first_factor,
    pair_matrix,
    dim: int,
    chain_length: int | None = None,
    *,
    max_degree: int | None = None,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
):
    """Signed sum over ``S_dim`` of traced products of matrices.

    For ``dim = 2m + 1`` this evaluates::

        sum_sigma sgn(sigma) * tr(P[s_{2m-1}, s_{2m}] ... P[s_1, s_2] F[s_0])

    i.e. ``F[s0][l1, r] P[s1, s2][l2, l1] ... P[.., ..][r, lm]`` with every
    matrix index contracted. ``first_factor`` is an array ``(dim, K, K)`` or
    a function ``s -> K x K``; ``pair_matrix`` an array ``(dim, dim, K, K)``
    or a function ``(i, j) -> K x K`` that must be antisymmetric in
    ``(i, j)``. Either may carry a leading grade axis (polynomial entries
    in p); the result is then a coefficient array, truncated above
    ``max_degree``.

    Antisymmetry is used to keep only increasing pairs (a factor ``2**m``
    fewer terms). The reduced index set is split into fixed chunks that
    are reduced in ascending order, so the result does not depend on
    ``threads``.
    """
    if dim < 1 or dim % 2 == 0:
        raise ShapeError(f"chain sums need an odd dimension, got {dim}")
    m = (dim - 1) // 2
    if chain_length is not None and chain_length != m + 1:
        raise ShapeError(f"dimension {dim} carries a chain of {m + 1} factors, not {chain_length}")
    graded = (not callable(first_factor) and np.ndim(first_factor) == 4) or (
        not callable(pair_matrix) and np.ndim(pair_matrix) == 5
    )
    first, pair = _chain_inputs(first_factor, pair_matrix, dim)
    asym = pair + np.swapaxes(pair, 1, 2)
    if np.abs(asym).max() > 1e-12 * max(1.0, np.abs(pair).max()):
        raise ValueError("pair matrices must be antisymmetric in (i, j)")
    top = (first.shape[0] - 1) + m * (pair.shape[0] - 1)
    max_degree = top if max_degree is None else min(max_degree, top)

    seqs, signs = chain_sequences(dim, 1)
    bounds = [(lo, min(lo + chunk_size, len(seqs))) for lo in range(0, len(seqs), chunk_size)]

    def work(b):
        lo, hi = b
        return _chain_chunk(first, pair, seqs[lo:hi], signs[lo:hi], 1, max_degree)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    total = np.zeros(max_degree + 1)
    for part in parts:  # fixed ascending chunk order
        total[: len(part)] += part
    total *= 2.0**m
    return total if graded else float(total[0])


def chain_term_bound(first_factor, pair_matrix, dim: int) -> float:
    """Sum over all chains of the product of Frobenius norms of the factors.

    Bounds ``sum_sigma |tr(P ... P F)|``, so it is a scale against which
    a signed sum can be judged to vanish. Ungraded input only.
    """
    first, pair = _chain_inputs(first_factor, pair_matrix, dim)
    if first.shape[0] != 1 or pair.shape[0] != 1:
        raise ShapeError("term bound takes ungraded input")
    fn = np.linalg.norm(first[0], axis=(-2, -1))
    pn = np.linalg.norm(pair[0], axis=(-2, -1))
    seqs, _ = chain_sequences(dim, 1)
    m = fn[seqs[:, 0]]
    for k in range(1, dim, 2):
        m = m * pn[seqs[:, k], seqs[:, k + 1]]
    return float(m.sum()) * 2.0 ** ((dim - 1) // 2)


def signed_chain_sum_bruteforce(first_factor, pair_matrix, dim: int):
    """Unreduced reference: every permutation of ``S_dim``, no pruning."""
    from .perms import permutations_with_parity

    first, pair = _chain_inputs(first_factor, pair_matrix, dim)
    if first.shape[0] != 1 or pair.shape[0] != 1:
        raise ShapeError("brute-force reference takes ungraded input")
    first, pair = first[0], pair[0]
    total = 0.0
    for perm, sign in permutations_with_parity(dim):
        mat = first[perm[0]]
        for k in range(1, dim, 2):
            mat = pair[perm[k], perm[k + 1]] @ mat
        total += sign * np.trace(mat)
    return total


def pfaffian_sum(Jlow) -> float:
    """``sum_{sigma in S_2m} sgn(sigma) J[s1,s2] J[s3,s4] ... = 2^m m! Pf(J)``."""
    J = np.asarray(Jlow.array if isinstance(Jlow, DenseTensor) else Jlow, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise ShapeError("expected a square matrix")
    n = J.shape[0]
    if n % 2:
        raise ShapeError("odd extent has no Pfaffian")
    if np.abs(J + J.T).max() > 1e-12 * max(1.0, np.abs(J).max()):
        raise ValueError("matrix is not antisymmetric")
    seqs, signs = chain_sequences(n, 0)
    prod = np.ones(len(seqs))
    for k in range(0, n, 2):
        prod *= J[seqs[:, k], seqs[:, k + 1]]
    return float(prod @ signs) * 2.0 ** (n // 2)
