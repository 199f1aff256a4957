"""Grassmann basis bookkeeping shared by both kernel backends."""

from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=None)
def grassmann_basis(N):
    """Bitmasks of the 2**N basis blades in graded-lexicographic order.

    Returns ``(masks, rank)`` where ``masks[i]`` is the generator set of the
    i-th coordinate (bit ``k`` set for generator ``e_{k+1}``) and
    ``rank[mask]`` inverts it.
    """
    masks = []
    for k in range(N + 1):
        for combo in combinations(range(N), k):
            m = 0
            for b in combo:
                m |= 1 << b
            masks.append(m)
    masks = np.asarray(masks, dtype=np.int64)
    rank = np.empty(1 << N, dtype=np.int64)
    rank[masks] = np.arange(masks.size)
    masks.setflags(write=False)
    rank.setflags(write=False)
    return masks, rank


def blade_sign(mi, mj):
    """Sign of e_I e_J after sorting generators (0 if the blades overlap)."""
    if mi & mj:
        return 0
    inversions = 0
    j = mj
    while j:
        low = j & -j
        # generators of I above this generator of J must hop over it
        inversions += bin(mi & ~((low << 1) - 1)).count("1")
        j ^= low
    return -1 if inversions & 1 else 1


def subset_labels(N):
    masks, _ = grassmann_basis(N)
    out = []
    for m in masks:
        out.append(tuple(k + 1 for k in range(N) if m >> k & 1))
    return out


@lru_cache(maxsize=16)
def binomial_table(M):
    """``B[j, n] = C(j, n)`` for ``j, n < M`` as floats (exact integers rounded once)."""
    B = np.zeros((M, M))
    row = [1]
    for j in range(M):
        B[j, : j + 1] = [float(x) for x in row]
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    B.setflags(write=False)
    return B


def power_seq(x, M):
    """``[1, x, x^2, ..., x^(M-1)]`` by repeated multiplication.

    Complex ``**`` goes through polar form and leaves rounding residue in
    the imaginary part of real negative bases; products do not.
    """
    out = np.full(M, complex(x))
    if M:
        out[0] = 1.0
    return np.cumprod(out)
