"""Pure numpy implementations of the hot kernels.

These mirror the compiled routines in ``_ext.pyx`` but use different
algorithms where numpy makes that cheaper (binomial matrix instead of
Horner, round-robin parallel Jacobi instead of row-cyclic), so comparing
the two backends is also a cross-check.
"""

from functools import lru_cache

import numpy as np

from ._basis import binomial_table, blade_sign, grassmann_basis, power_seq


def taylor_shift(c, z):
    """Coefficients of ``f(z + h)`` in powers of ``h``."""
    c = np.asarray(c, dtype=complex)
    M = c.shape[0]
    if M == 0:
        return c.copy()
    B = binomial_table(M)  # B[k, n] = C(k, n)
    zp = np.zeros(2 * M - 1, dtype=complex)
    zp[M - 1:] = power_seq(z, M)
    # P[k, n] = C(k, n) z^(k - n), zero above the diagonal via zp padding
    idx = np.arange(M)[:, None] - np.arange(M)[None, :] + (M - 1)
    P = B * zp[idx]
    return P.T @ c


@lru_cache(maxsize=16)
def _wedge_table(N):
    masks, rank = grassmann_basis(N)
    rows, cols, dest, sign = [], [], [], []
    for i, mi in enumerate(masks):
        for j, mj in enumerate(masks):
            if mi & mj:
                continue
            rows.append(i)
            cols.append(j)
            dest.append(rank[mi | mj])
            sign.append(blade_sign(int(mi), int(mj)))
    tab = tuple(np.asarray(a, dtype=np.int64) for a in (rows, cols, dest))
    return tab + (np.asarray(sign, dtype=float),)


def grassmann_mul(x, y, N):
    rows, cols, dest, sign = _wedge_table(N)
    prod = sign * x[rows] * y[cols]
    size = 1 << N
    re = np.bincount(dest, weights=prod.real, minlength=size)
    im = np.bincount(dest, weights=prod.imag, minlength=size)
    return re + 1j * im


def _round_robin(n):
    """Disjoint pivot pairs covering every (p, q) once per sweep."""
    m = n + (n & 1)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def hermitian_eigvalsh(A, tol=1e-15, max_sweeps=60):
    """Eigenvalues of a Hermitian matrix by parallel-ordered Jacobi sweeps."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if n == 1:
        return A.real.diagonal().copy()
    scale = np.sqrt(np.sum(np.abs(A) ** 2))
    if scale == 0.0:
        return np.zeros(n)
    rounds = [
        (np.array([p for p, _ in r]), np.array([q for _, q in r]))
        for r in _round_robin(n) if r
    ]
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A[offdiag])
        if off <= tol * scale:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            r = np.abs(apq)
            live = r > 0
            if not live.any():
                continue
            P, Q, apq, r = P[live], Q[live], apq[live], r[live]
            phase = apq / r
            app = A[P, P].real
            aqq = A[Q, Q].real
            tau = (aqq - app) / (2.0 * r)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.hypot(1.0, t)
            s = t * c
            # U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
            upp, upq = c, s
            uqp, uqq = -s * np.conj(phase), c * np.conj(phase)
            colp, colq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = colp * upp + colq * uqp
            A[:, Q] = colp * upq + colq * uqq
            rowp, rowq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = np.conj(upp)[:, None] * rowp + np.conj(uqp)[:, None] * rowq
            A[Q, :] = np.conj(upq)[:, None] * rowp + np.conj(uqq)[:, None] * rowq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
    return np.sort(A.diagonal().real)
