"""Gram assembly over sampled points and positive-semidefiniteness checks."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import _core
from ._basis import power_seq
from .algebra import (
    AlgebraElement,
    dual_involution,
    involution,
    matrix,
    quaternion,
    random_element,
    random_functional,
    weighted_seq,
)
from .jets import fock_inner, jet_of, weighted_inner
from .kernels import (
    KernelCoefficients,
    _d_function,
    derivative_block,
    extended_kernel,
    fock,
    fock_extended,
    matrix_trace_kernel,
    quaternion_kernel,
)
from .series import EntireFunctionRep, ell2_check

MAX_PLAN = 512
DEFAULT_TOL = 1e-9


class PlanError(ValueError):
    pass


class ExtPoint(NamedTuple):
    z: complex
    A: AlgebraElement
    a: object  # DualFunctional


class QuatPoint(NamedTuple):
    a: AlgebraElement
    p: AlgebraElement
    t: float


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic sample of kernel arguments.

    ``family`` selects the point type: ``fock_matrix`` / ``fock_quaternion``
    / ``fock_seq`` give :class:`ExtPoint`, ``quaternion`` gives
    :class:`QuatPoint` and ``scalar`` gives ``(z, eta)`` pairs for the
    block kernel itself.
    """

    family: str
    seed: int = 0
    count: int = 20
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.count <= MAX_PLAN:
            raise PlanError(f"count must be in [1, {MAX_PLAN}]")

    def points(self) -> list:
        rng = np.random.default_rng(self.seed)
        p = self.params
        out = []
        if self.family in ("fock_matrix", "fock_quaternion", "fock_seq"):
            if self.family == "fock_matrix":
                desc = matrix(int(p.get("n", 2)))
            elif self.family == "fock_quaternion":
                desc = quaternion()
            else:
                desc = weighted_seq(int(p.get("L", 8)), float(p.get("beta", 2.0)))
            scale = float(p.get("scale", 0.8))
            for _ in range(self.count):
                z = _disk(rng, float(p.get("z_radius", 1.0)), real=desc.is_real)
                A = random_element(desc, rng, scale * rng.uniform(0.1, 1.0))
                a = random_functional(desc, rng)
                out.append(ExtPoint(z, A, a))
        elif self.family == "quaternion":
            desc = quaternion()
            for _ in range(self.count):
                a = random_element(desc, rng, rng.uniform(0.5, 1.5))
                q = random_element(desc, rng, rng.uniform(0.1, 1.0))
                out.append(QuatPoint(a, q, float(rng.uniform(-1, 1))))
        elif self.family == "scalar":
            N = int(p.get("N", 4))
            for _ in range(self.count):
                z = _disk(rng, float(p.get("z_radius", 1.0)))
                eta = rng.standard_normal(N) + 1j * rng.standard_normal(N)
                out.append((z, eta))
        else:
            raise PlanError(f"unknown sample family {self.family!r}")
        return out


def _disk(rng, radius, real=False):
    if real:
        return complex(rng.uniform(-radius, radius))
    r = radius * np.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))


def point_kernel(name: str, N: int = 30, K: KernelCoefficients | None = None) -> Callable:
    """Kernel on plan points, ``k(x_i, x_j)`` giving Gram entry (i, j)."""
    if name == "fock_extended":
        return lambda x, y: fock_extended(tuple(x), tuple(y), N).value
    if name == "extended":
        K = K or fock()
        # with a* in the pairing slot this reproduces fock_extended
        return lambda x, y: extended_kernel(
            K, (x.z, x.A, dual_involution(x.a)), (y.z, y.A, dual_involution(y.a)), N
        ).value
    if name == "matrix_trace":
        return lambda x, y: matrix_trace_kernel(x.a, x.A, x.z, y.a, y.A, y.z, N).value
    if name == "quaternion":
        return lambda x, y: quaternion_kernel(x.a, x.p, x.t, y.a, involution(y.p), y.t, N).value
    if name == "block":
        K = K or fock()
        return lambda x, y: complex(np.vdot(x[1], derivative_block(K, x[0], y[0], len(x[1])) @ y[1]))
    raise ValueError(f"unknown point kernel {name!r}")


def _threads():
    try:
        return max(1, int(os.environ.get("AKX_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class GramResult:
    matrix: np.ndarray
    hermitian_defect: float


def gram(kernel: Callable, points, ell2_guard: bool = True) -> GramResult:
    """``G[i, j] = kernel(points[i], points[j])`` over all ordered pairs.

    Both triangles are evaluated so the Hermitian defect is a real
    measurement. Points carrying ``(A, a)`` are screened by the l2 check
    first; a failure raises ``PlanError`` naming the index.
    """
    points = list(points)
    n = len(points)
    if ell2_guard:
        for i, x in enumerate(points):
            if isinstance(x, ExtPoint) and not ell2_check(x.a, x.A).summable:
                raise PlanError(f"sample {i}: <a*, A^n> is not square-summable")
    G = np.zeros((n, n), dtype=complex)

    def row(i):
        return [kernel(points[i], points[j]) for j in range(n)]

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(row, range(n)))
    else:
        rows = [row(i) for i in range(n)]
    for i, r in enumerate(rows):
        G[i] = r
    defect = float(np.max(np.abs(G - G.conj().T))) if n else 0.0
    return GramResult(G, defect)


class HermitianError(ValueError):
    pass


def min_eigenvalue(G, tol: float | None = None) -> float:
    """Smallest eigenvalue of a Hermitian matrix (cyclic Jacobi rotations).

    The input is symmetrized first; a defect above ``tol`` is an error.
    """
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("square matrix required")
    if G.shape[0] == 0:
        raise ValueError("empty matrix")
    scale = max(1.0, float(np.max(np.abs(G))))
    tol = DEFAULT_TOL * scale if tol is None else tol
    defect = float(np.max(np.abs(G - G.conj().T)))
    if defect > tol:
        raise HermitianError(f"matrix is not Hermitian (defect {defect:.3g} > {tol:.3g})")
    H = 0.5 * (G + G.conj().T)
    return float(_core.hermitian_eigvalsh(H)[0])


@dataclass(frozen=True)
class PsdReport:
    size: int
    min_eigenvalue: float
    hermitian_defect: float
    verdict: str
    tolerance: float

    def to_dict(self):
        return asdict(self)


def check_psd(G, tol: float | None = None) -> PsdReport:
    """PSD verdict with tolerance ``1e-9 * max(1, max diagonal)`` unless given."""
    G = np.asarray(G, dtype=complex)
    if tol is None:
        tol = DEFAULT_TOL * max(1.0, float(np.max(np.abs(G.diagonal()))))
    defect = float(np.max(np.abs(G - G.conj().T)))
    H = 0.5 * (G + G.conj().T)
    lam = float(_core.hermitian_eigvalsh(H)[0])
    ok = lam >= -tol and defect <= tol
    return PsdReport(G.shape[0], lam, defect, "pass" if ok else "fail", tol)


def jet_isometry_check(f_set, g_set, w_samples, N: int = 12) -> float:
    """Largest ``|<f, g> - <J_w(f), eta_w(g)>|`` in the Fock space.

    ``eta_w(g)`` expands ``g`` over the kernel sections: with
    ``D_{m,w}(z) = z^m e^{z conj(w)} / m!`` one has
    ``eta_m = m! [z^m] (g(z) e^{-z conj(w)})``. Only ``m <= deg f`` enters
    the pairing, so for polynomials of degree below N the check is exact up
    to rounding.
    """
    worst = 0.0
    fact = np.array([math.factorial(m) for m in range(N)], dtype=float)
    for w in w_samples:
        damp = power_seq(-np.conj(complex(w)), N) / fact
        for g in g_set:
            gc = g.padded(N)
            eta = fact * np.convolve(gc, damp)[:N]
            for f in f_set:
                lhs = fock_inner(f, g)
                rhs = complex(np.dot(jet_of(f, w, N).entries, np.conj(eta)))
                worst = max(worst, abs(lhs - rhs))
    return worst


def jet_reproducing_check(f_set, eta_set, w_samples, K: KernelCoefficients | None = None) -> float:
    """Largest ``|<f, g> - <J_w(f), eta>|`` where ``g = sum_m D_{m,w} eta_m``.

    ``J(g)`` is ``K(., w) eta``, so the left side is the jet-space product
    ``<J(f), K(., w) eta>`` and the identity is the reproducing property of
    the jet kernel. Inner products use the kernel's own coefficient weights
    (Fock: ``n!``).
    """
    K = K or fock()
    gamma = K.diagonal_weights()
    if gamma is None:
        raise ValueError("jet isometry check needs a diagonal scalar kernel")
    weights = 1.0 / gamma
    worst = 0.0
    for f in f_set:
        fc = f.padded(K.size)
        for eta in eta_set:
            eta = np.asarray(eta, dtype=complex)
            for w in w_samples:
                g = sum(eta[m] * _d_function(K, w, m) for m in range(len(eta)))
                lhs = weighted_inner(fc, g, weights)
                J = jet_of(EntireFunctionRep(fc, K.radius), w, len(eta)).entries
                rhs = complex(np.vdot(eta, J))
                worst = max(worst, abs(lhs - rhs))
    return worst
