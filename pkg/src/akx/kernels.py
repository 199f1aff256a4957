"""Kernels, derivative kernels and the extended kernels built from them.

A kernel ``K(z, w) = sum_{j,k} c[j, k] z^j conj(w)^k`` is stored as its
coefficient grid, so every mixed derivative

    K_nm(z, w) = 1/(n! m!) d^n/dz^n d^m/dconj(w)^m K(z, w)

is an exact finite reindexing of the grid. Entries with index past the grid
are zero; the presets keep enough terms that this is invisible at double
precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._basis import binomial_table, power_seq
from .algebra import (
    AlgebraElement,
    AlgebraError,
    DualFunctional,
    dual_involution,
    dual_norm,
    involution,
    level_norm,
    mul,
    pair,
    powers,
    scalar,
    unit,
    zero,
)
from .jets import jet_of, weighted_inner
from .series import ConvergenceError, DomainError, EntireFunctionRep, ell2_check, x_vector

RADIUS_MARGIN = 1e-3


class UnsupportedKernel(ValueError):
    pass


class Ell2Error(ConvergenceError):
    """Dual-pairing sequence is not certified square-summable."""


@dataclass(frozen=True, eq=False)
class KernelCoefficients:
    c: np.ndarray  # (M+1, M+1) or (M+1, M+1, p, p)
    radius: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        c = np.array(self.c, dtype=complex)
        if c.ndim == 2:
            c = c[:, :, None, None]
        if c.ndim != 4 or c.shape[0] != c.shape[1] or c.shape[2] != c.shape[3]:
            raise ValueError("kernel coefficients must be square (M+1, M+1[, p, p])")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def p(self) -> int:
        return self.c.shape[2]

    @property
    def size(self) -> int:
        return self.c.shape[0]

    @property
    def is_entire(self) -> bool:
        return math.isinf(self.radius)

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.c - self.c.transpose(1, 0, 3, 2).conj())))

    def diagonal_weights(self):
        """``gamma_j`` if ``c = diag(gamma)`` with positive entries (p = 1), else None."""
        if self.p != 1:
            return None
        c = self.c[:, :, 0, 0]
        d = np.diag(c)
        if np.any(c - np.diag(d)) or np.any(d.imag) or np.any(d.real <= 0):
            return None
        return d.real.copy()

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "c": [[[float(x.real), float(x.imag)] for x in row] for row in self.c[:, :, 0, 0]],
            "radius": "inf" if self.is_entire else float(self.radius),
        }

    @classmethod
    def from_dict(cls, d) -> "KernelCoefficients":
        if isinstance(d, str):
            return kernel_preset(d)
        if "preset" in d:
            return kernel_preset(d["preset"], d.get("terms"))
        if d.get("p", 1) != 1:
            raise ValueError("JSON kernels are scalar (p = 1)")
        c = np.array([[complex(*x) for x in row] for row in d["c"]])
        r = d.get("radius", "inf")
        return cls(c, math.inf if r in ("inf", None) else float(r))


def fock(terms: int = 60) -> KernelCoefficients:
    """``exp(z conj(w))``."""
    d = np.empty(terms)
    d[0] = 1.0
    for j in range(1, terms):
        d[j] = d[j - 1] / j
    return KernelCoefficients(np.diag(d), math.inf, "fock")


def geom(terms: int = 400) -> KernelCoefficients:
    """``1 / (1 - z conj(w))``, radius 1 in each variable."""
    return KernelCoefficients(np.eye(terms), 1.0, "geom")


def poly(degree: int = 2) -> KernelCoefficients:
    """``(1 + z conj(w))^degree``."""
    d = np.array([math.comb(degree, j) for j in range(degree + 1)], dtype=float)
    return KernelCoefficients(np.diag(d), math.inf, f"poly{degree}")


def kernel_preset(name: str, terms: int | None = None) -> KernelCoefficients:
    if name == "fock":
        return fock(terms or 60)
    if name == "geom":
        return geom(terms or 400)
    if name.startswith("poly"):
        return poly(int(name[4:] or 2))
    raise ValueError(f"unknown kernel preset {name!r}")


def _shift_matrix(x, M, cols=None):
    """``P[j, n] = C(j, n) x^(j - n)`` for ``j >= n``, columns ``n < cols``."""
    cols = M if cols is None else cols
    x = complex(x)
    xp = np.zeros(2 * M - 1, dtype=complex)
    xp[M - 1:] = power_seq(x, M)
    idx = np.arange(M)[:, None] - np.arange(cols)[None, :] + (M - 1)
    return binomial_table(M)[:, :cols] * xp[idx]


def _check_domain(K, *pts):
    for x in pts:
        if not K.is_entire and abs(x) >= K.radius:
            raise DomainError(f"|{x}| is outside the kernel's radius {K.radius}")


def derivative_block(K: KernelCoefficients, z, w, N: int | None = None) -> np.ndarray:
    """All ``K_nm(z, w)`` for ``n, m < N`` as an ``(N, N, p, p)`` array (squeezed for p = 1)."""
    _check_domain(K, z, w)
    M = K.size
    cols = M if N is None else min(N, M)
    Pz = _shift_matrix(z, M, cols)
    Pw = _shift_matrix(np.conj(complex(w)), M, cols)
    if K.p == 1:
        full = (Pz.T @ K.c[:, :, 0, 0] @ Pw)[:, :, None, None]
    else:
        full = np.einsum("jn,jkab,km->nmab", Pz, K.c, Pw, optimize=True)
    if N is not None:
        if N > M:
            pad = np.zeros((N, N) + full.shape[2:], dtype=complex)
            pad[:M, :M] = full
            full = pad
        full = full[:N, :N]
    return full[:, :, 0, 0] if K.p == 1 else full


def derivative_kernel(K: KernelCoefficients, z, w, n: int, m: int):
    """Single entry ``K_nm(z, w)``."""
    if n < 0 or m < 0:
        raise IndexError("derivative orders must be non-negative")
    if n >= K.size or m >= K.size:
        return 0j if K.p == 1 else np.zeros((K.p, K.p), dtype=complex)
    _check_domain(K, z, w)
    j = np.arange(K.size)
    bz = binomial_table(K.size)[:, n] * np.where(j >= n, power_seq(z, K.size)[np.maximum(j - n, 0)], 0)
    bw = binomial_table(K.size)[:, m] * np.where(j >= m, power_seq(np.conj(complex(w)), K.size)[np.maximum(j - m, 0)], 0)
    val = np.einsum("j,jkab,k->ab", bz, K.c, bw)
    return complex(val[0, 0]) if K.p == 1 else val


@dataclass(frozen=True)
class KernelValue:
    value: complex
    tail: float


def kernel_eval(K: KernelCoefficients, z, w, order: int | None = None) -> KernelValue:
    """``K(z, w)`` by direct double series; ``tail`` bounds the terms past ``order``."""
    _check_domain(K, z, w)
    M = K.size
    zp = power_seq(z, M)
    wp = power_seq(np.conj(complex(w)), M)
    terms = K.c * (zp[:, None] * wp[None, :])[:, :, None, None]
    if order is None or order >= M:
        val, tail = terms.sum(axis=(0, 1)), 0.0
    else:
        val = terms[: order + 1, : order + 1].sum(axis=(0, 1))
        mags = np.abs(terms).sum(axis=(2, 3))
        tail = float(mags.sum() - mags[: order + 1, : order + 1].sum())
    return KernelValue(complex(val[0, 0]) if K.p == 1 else val, tail)


@dataclass(frozen=True)
class RadiusEstimate:
    M0: float
    C: float


def radius_estimate(K: KernelCoefficients, z, w, eps: float = RADIUS_MARGIN) -> RadiusEstimate:
    """Largest admissible scaling ``M0`` with ``|z| + M0, |w| + M0`` inside the radius.

    ``C`` is ``max |K_nm(z, w)| M0^(n+m)`` over the stored grid.
    """
    return _radius_estimate(K, complex(z), complex(w), float(eps))


@lru_cache(maxsize=128)
def _radius_estimate(K, z, w, eps):
    if K.is_entire:
        return RadiusEstimate(math.inf, math.inf)
    _check_domain(K, z, w)
    M0 = min(K.radius - abs(z), K.radius - abs(w)) - eps
    if M0 <= 0:
        raise DomainError(f"no admissible scaling: point within {eps} of the boundary")
    blk = derivative_block(K, z, w)
    n = np.arange(K.size)
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.abs(blk) * M0 ** (n[:, None] + n[None, :])
    return RadiusEstimate(float(M0), float(np.nanmax(scaled)))


@dataclass(frozen=True)
class KBlock:
    blocks: np.ndarray
    bound: float
    M: float
    C: float
    scaled: bool


def script_K_block(K: KernelCoefficients, z, w, N: int, M: float | None = None) -> KBlock:
    """Truncated block operator with a constructive norm bound.

    Entire kernels: the blocks are ``K_nm(z, w)`` and, for ``M > 1``,
    ``||K(z, w)|| <= C / (1 - 1/M^2)`` with ``C = max |K_nm| M^(n+m)``.
    Finite radius: the blocks are ``M^(n+m) K_nm`` for ``M < M0`` and the
    bound is ``C0 / (1 - M/M0)`` with ``C0`` taken at ``M0``.
    """
    full = derivative_block(K, z, w)
    size = K.size
    n = np.arange(size)
    norms = np.abs(full) if K.p == 1 else np.linalg.norm(full, ord=2, axis=(2, 3))
    if K.is_entire:
        M = 2.0 if M is None else float(M)
        if M <= 1:
            raise ValueError("entire-kernel bound needs M > 1")
        C = float(np.max(norms * M ** (n[:, None] + n[None, :])))
        blk = derivative_block(K, z, w, N)
        return KBlock(blk, C / (1 - 1 / M ** 2), M, C, False)
    est = radius_estimate(K, z, w)
    M = est.M0 / 2 if M is None else float(M)
    if not 0 < M < est.M0:
        raise DomainError(f"scaling M = {M} not in (0, M0 = {est.M0:.6g})")
    D = M ** np.arange(N)
    blk = derivative_block(K, z, w, N)
    if K.p == 1:
        blk = D[:, None] * blk * D[None, :]
    else:
        blk = D[:, None, None, None] * blk * D[None, :, None, None]
    return KBlock(blk, est.C / (1 - M / est.M0), M, est.C, True)


def _d_function(K, w, m, eta=1.0):
    """Coefficients of ``D_{m,w} eta : z -> (1/m!) d^m/dconj(w)^m K(z, w) eta``."""
    k = np.arange(K.size)
    bw = binomial_table(K.size)[:, m] * np.where(k >= m, power_seq(np.conj(complex(w)), K.size)[np.maximum(k - m, 0)], 0)
    return np.einsum("jkab,k,b->ja", K.c, bw, np.atleast_1d(eta))[:, 0] if K.p == 1 else \
        np.einsum("jkab,k,b->ja", K.c, bw, np.atleast_1d(eta))


def factorization_check(K: KernelCoefficients, z, w, N: int, etas=None) -> dict:
    """Compare ``K_nm(z, w)`` with ``<D_{m,w}, D_{n,z}>`` in the kernel's own space.

    Supported for diagonal kernels ``c = diag(gamma)`` whose space has the
    weighted inner product ``sum f_j conj(g_j) / gamma_j`` (Fock: ``j!``).
    ``etas`` additionally checks ``K(z, w) eta = J_z(sum_m D_{m,w} eta_m)``.
    """
    gamma = K.diagonal_weights()
    if gamma is None:
        raise UnsupportedKernel("factorization check needs a diagonal scalar kernel")
    blk = derivative_block(K, z, w, N)
    weights = 1.0 / gamma
    Dw = [_d_function(K, w, m) for m in range(N)]
    Dz = [_d_function(K, z, n) for n in range(N)]
    gram = np.array([[weighted_inner(Dw[m], Dz[n], weights) for m in range(N)] for n in range(N)])
    out = {"gram": float(np.max(np.abs(gram - blk)))}
    if etas is not None:
        worst = 0.0
        for eta in etas:
            eta = np.asarray(eta, dtype=complex)
            g = sum(eta[m] * Dw[m] for m in range(len(eta)))
            lhs = derivative_block(K, z, w, len(eta)) @ eta
            rhs = jet_of(EntireFunctionRep(g, K.radius), z, len(eta)).entries
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        out["corollary"] = worst
    out["max"] = max(out.values())
    return out


def _sequence(a, A, length):
    """``u_n = <a*, A_n>`` with ``A_n = A^n`` or an explicit sequence."""
    if isinstance(A, AlgebraElement):
        return x_vector(a, A, length)
    a_star = dual_involution(a)
    u = np.zeros(length, dtype=complex)
    for n, An in enumerate(list(A)[:length]):
        u[n] = pair(a_star, An)
    return u


@dataclass(frozen=True)
class ExtendedValue:
    value: complex
    tail: float
    order: int


def extended_kernel(K: KernelCoefficients, left, right, N: int, check_ell2: bool = True) -> ExtendedValue:
    """``sum_{n,m<N} <a*, A_n> K_nm(z, w) conj(<b*, B_m>)``.

    ``left = (z, A, a)`` and ``right = (w, B, b)``; ``A`` is either an
    element (meaning ``A_n = A^n``) or an explicit sequence. The tail bounds
    every discarded term of the stored kernel grid.
    """
    if K.p != 1:
        raise UnsupportedKernel("extended kernel is implemented for scalar kernels")
    (z, A, a), (w, B, b) = left, right
    if check_ell2:
        for f, X in ((a, A), (b, B)):
            if isinstance(X, AlgebraElement):
                v = ell2_check(f, X)
                if not v.summable:
                    raise Ell2Error(f"<a*, A^n> is not square-summable ({v.verdict})", v)
    size = max(K.size, N)
    u = _sequence(a, A, size)
    v = _sequence(b, B, size)
    full = derivative_block(K, z, w, size)
    head = u[:N] @ full[:N, :N] @ np.conj(v[:N])
    absu, absv, absK = np.abs(u), np.abs(v), np.abs(full)
    tail = float(absu @ absK @ absv - absu[:N] @ absK[:N, :N] @ absv[:N])
    return ExtendedValue(complex(head), max(tail, 0.0), N)


def _exp_tail(s: float, N: int) -> float:
    """``sum_{n > N} s^n / n!`` bounded from above."""
    if s == 0:
        return 0.0
    if s < N + 2:
        first = math.exp((N + 1) * math.log(s) - math.lgamma(N + 2))
        return first / (1 - s / (N + 2))
    return math.exp(s)


def fock_extended(left, right, N: int) -> ExtendedValue:
    """``sum_{n<=N} <a, (z+A)^n> conj(<b, (w+B)^n>) / n!`` without re-centring."""
    (z, A, a), (w, B, b) = left, right
    X = A + scalar(A.descriptor, z)
    Y = B + scalar(B.descriptor, w)
    total = 0j
    Px, Py = unit(A.descriptor), unit(B.descriptor)
    fact = 1.0
    for n in range(N + 1):
        if n:
            Px, Py = mul(Px, X), mul(Py, Y)
            fact *= n
        total += pair(a, Px) * np.conj(pair(b, Py)) / fact
    s = level_norm(X) * level_norm(Y)
    tail = dual_norm(a) * dual_norm(b) * _exp_tail(s, N)
    return ExtendedValue(complex(total), tail, N)


def matrix_trace_kernel(a, A, z, b, B, w, N: int) -> ExtendedValue:
    """``Tr((a* (x) b) exp((zI + A) (x) (conj(w) I + B*)))`` by series on the Kronecker power."""
    for X in (a, A, b, B):
        if X.descriptor.kind != "matrix":
            raise AlgebraError("matrix_trace_kernel needs matrix-algebra arguments")
    n = A.descriptor.size
    I = np.eye(n)
    X = complex(z) * I + A.as_matrix()
    Y = np.conj(complex(w)) * I + B.as_matrix().conj().T
    am = a.coords.reshape(n, n)
    bm = b.coords.reshape(n, n)
    L = np.kron(am.conj().T, bm)
    E = np.zeros((n * n, n * n), dtype=complex)
    Xk, Yk = np.eye(n, dtype=complex), np.eye(n, dtype=complex)
    fact = 1.0
    for k in range(N + 1):
        if k:
            Xk, Yk = Xk @ X, Yk @ Y
            fact *= k
        E += np.kron(Xk, Yk) / fact
    val = np.trace(L @ E)
    s = np.linalg.norm(X) * np.linalg.norm(Y)
    tail = float(np.linalg.norm(L)) * _exp_tail(float(s), N)
    return ExtendedValue(complex(val), tail, N)


def quaternion_kernel(a, p, t, b, s, q, N: int) -> ExtendedValue:
    """``sum_n Re(conj(a) (t+p)^n) Re((q+s)^n b) / n!`` for real ``t, q``.

    ``a, b, p, s`` are quaternions (elements or functionals); the kernel is
    real and symmetric under ``(a, p, t) <-> (b, conj(s), q)``.
    """
    def quat(x):
        if x.descriptor.kind != "quaternion":
            raise AlgebraError("quaternion_kernel needs quaternion arguments")
        return x if isinstance(x, AlgebraElement) else AlgebraElement(x.descriptor, x.coords)

    a, p, b, s = quat(a), quat(p), quat(b), quat(s)
    if complex(t).imag or complex(q).imag:
        raise ValueError("t and q must be real")
    t, q = float(complex(t).real), float(complex(q).real)
    X = p + t
    Y = s + q
    a_bar = involution(a)
    total = 0.0
    Px = unit(p.descriptor)
    Py = unit(p.descriptor)
    fact = 1.0
    for n in range(N + 1):
        if n:
            Px, Py = mul(Px, X), mul(Py, Y)
            fact *= n
        left = mul(a_bar, Px).coords[0].real
        right = mul(Py, b).coords[0].real
        total += left * right / fact
    tail = level_norm(a) * level_norm(b) * _exp_tail(level_norm(X) * level_norm(Y), N)
    return ExtendedValue(complex(total), tail, N)


def grassmann_closed_form(K: KernelCoefficients, z_B, z_S: AlgebraElement, w_B, w_S: AlgebraElement,
                          a: DualFunctional | None = None, b: DualFunctional | None = None):
    """Finite expansion of the kernel at Grassmann arguments ``z_B + z_S``, ``w_B + w_S``.

    Returns ``sum_{n,m<=N} z_S^n K_nm(z_B, w_B) (w_S*)^m`` as a Grassmann
    element, where N is the number of generators (nilpotence cuts the sum).
    With ``a`` only, that element is paired with ``a``; with both ``a`` and
    ``b`` the pairing is taken factor-wise,
    ``sum <a*, z_S^n> K_nm conj(<b*, w_S^m>)``.
    """
    desc = z_S.descriptor
    if desc.kind != "grassmann" or w_S.descriptor != desc:
        raise AlgebraError("Grassmann soul arguments required")
    if z_S.body != 0 or w_S.body != 0:
        raise AlgebraError("soul arguments must have zero body")
    if K.p != 1:
        raise UnsupportedKernel("closed form is implemented for scalar kernels")
    Ngen = desc.size
    blk = derivative_block(K, z_B, w_B, Ngen + 1)
    zp = powers(z_S, Ngen)
    if a is not None and b is not None:
        u = np.array([pair(dual_involution(a), P) for P in zp])
        v = np.array([pair(dual_involution(b), P) for P in powers(w_S, Ngen)])
        return complex(u @ blk @ np.conj(v))
    wp = powers(involution(w_S), Ngen)
    acc = zero(desc)
    for n in range(Ngen + 1):
        if zp[n].is_zero():
            continue
        for m in range(Ngen + 1):
            if blk[n, m] == 0 or wp[m].is_zero():
                continue
            acc = acc + mul(zp[n], wp[m]) * blk[n, m]
    return pair(a, acc) if a is not None else acc


@dataclass(frozen=True)
class ScaledValue:
    value: complex
    tail: float
    op_bound: float
    M0: float


def scaled_kernel(K: KernelCoefficients, z, w, M: float, x_b, x_a, tail_b: float = 0.0,
                  tail_a: float = 0.0) -> ScaledValue:
    """``<D(M) K(z, w) D(M) X_b, X_a>`` for x-vectors ``x_a, x_b`` (``<a*, A^n>`` entries).

    Refuses ``M >= M0``. ``tail_a``/``tail_b`` are l2 bounds on the parts of
    the x-vectors past their stored length; they enter the certificate
    through the operator bound on the scaled block.
    """
    if not M > 0:
        raise ValueError("scaling M must be positive")
    est = radius_estimate(K, z, w)
    if K.is_entire:
        ref = 2 * M
        size = K.size
        n = np.arange(size)
        full = np.abs(derivative_block(K, z, w))
        C = float(np.max(full * ref ** (n[:, None] + n[None, :])))
        op_bound = C / (1 - (M / ref) ** 2)
        M0 = math.inf
    else:
        if M >= est.M0:
            raise DomainError(f"scaling M = {M} is not below M0 = {est.M0:.6g}")
        op_bound = est.C / (1 - M / est.M0)
        M0 = est.M0
    xa = np.asarray(x_a, dtype=complex)
    xb = np.asarray(x_b, dtype=complex)
    N = max(len(xa), len(xb))
    xa = np.pad(xa, (0, N - len(xa)))
    xb = np.pad(xb, (0, N - len(xb)))
    D = power_seq(M, N)
    blk = derivative_block(K, z, w, N)
    val = (xa * D) @ blk @ np.conj(xb * D)
    na, nb = np.linalg.norm(xa), np.linalg.norm(xb)
    tail = op_bound * (na * tail_b + tail_a * nb + tail_a * tail_b)
    return ScaledValue(complex(val), float(tail), float(op_bound), M0)


def e_vector(h, N: int) -> np.ndarray:
    """``(1, conj(h), conj(h)^2, ...)`` truncated to N entries."""
    return power_seq(np.conj(complex(h)), N)
