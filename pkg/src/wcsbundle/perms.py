"""Permutation enumeration with parity.

Two enumerations are provided. :func:`permutations_with_parity` walks
all of ``S_n`` in lexicographic order (Knuth's Algorithm L) and updates
the sign from the number of transpositions each step performs.
:func:`chain_sequences` enumerates the reduced index set used by the
antisymmetric chain sums: ``lead`` free leading slots followed by
ordered pairs whose two entries are increasing. Its sign is tracked by
counting new inversions as each entry is appended.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

__all__ = ["permutations_with_parity", "chain_sequences", "permutation_sign"]


def permutation_sign(perm) -> int:
    """Sign of a permutation of ``0..n-1`` by cycle decomposition."""
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permutations_with_parity(n: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield ``(perm, sign)`` for every permutation of ``0..n-1`` in lex order."""
    a = list(range(n))
    sign = 1
    yield tuple(a), sign
    while True:
        j = n - 2
        while j >= 0 and a[j] >= a[j + 1]:
            j -= 1
        if j < 0:
            return
        k = n - 1
        while a[k] <= a[j]:
            k -= 1
        a[j], a[k] = a[k], a[j]
        sign = -sign
        # reversing a block of length L costs floor(L/2) swaps
        length = n - 1 - j
        if (length // 2) % 2:
            sign = -sign
        a[j + 1 :] = reversed(a[j + 1 :])
        yield tuple(a), sign


@lru_cache(maxsize=None)
def chain_sequences(n: int, lead: int) -> tuple[np.ndarray, np.ndarray]:
    """Reduced permutations of ``0..n-1`` for antisymmetric pair products.

    Returns ``(seqs, signs)``: ``seqs`` has one row per sequence, the first
    ``lead`` entries unconstrained and the rest grouped into consecutive
    pairs with ``seq[2a + lead] < seq[2a + lead + 1]``. Rows are in
    lexicographic order; ``signs`` holds the parity of each row as a
    permutation. The arrays are cached and must not be mutated.
    """
    if (n - lead) % 2 or lead < 0 or lead > n:
        raise ValueError(f"cannot split {n} indices into {lead} singles and pairs")
    rows: list[tuple[int, ...]] = []
    signs: list[int] = []
    prefix: list[int] = []
    used = [False] * n

    def inversions_added(x):
        return sum(1 for y in prefix if y > x)

    def rec(sign):
        pos = len(prefix)
        if pos == n:
            rows.append(tuple(prefix))
            signs.append(sign)
            return
        pair_second = pos >= lead and (pos - lead) % 2 == 1
        lo = prefix[-1] + 1 if pair_second else 0
        for x in range(lo, n):
            if used[x]:
                continue
            s = -sign if inversions_added(x) % 2 else sign
            used[x] = True
            prefix.append(x)
            rec(s)
            prefix.pop()
            used[x] = False

    rec(1)
    seqs = np.array(rows, dtype=np.intp).reshape(len(rows), n)
    sg = np.array(signs, dtype=float)
    seqs.setflags(write=False)
    sg.setflags(write=False)
    return seqs, sg
