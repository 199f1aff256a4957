"""Truncated jets ``J_z(f) = (f(z), f'(z), f''(z)/2!, ...)`` and operators on them.

The reproducing kernel space is realised concretely as Taylor coefficient
space. Operators on it are square matrices acting on coefficient arrays
(:class:`CoefficientOperator`); their jet-side counterparts are the
templates in :func:`jet_operator`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._basis import power_seq
from .algebra import AlgebraElement, DualFunctional, dual_involution
from .series import (
    EntireFunctionRep,
    TruncationPolicy,
    eval_weak,
    taylor_shift,
    x_vector,
)


@dataclass(frozen=True)
class JetVector:
    base: complex
    entries: np.ndarray  # shape (N,) or (N, p)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def to_list(self) -> list:
        flat = self.entries if self.entries.ndim == 1 else self.entries.reshape(-1)
        return [[float(x.real), float(x.imag)] for x in flat]


def jet_of(f: EntireFunctionRep, z, N: int) -> JetVector:
    g = taylor_shift(f, z)
    if g.shape[0] < N:
        pad = np.zeros((N - g.shape[0],) + g.shape[1:], dtype=complex)
        g = np.concatenate([g, pad])
    entries = np.array(g[:N])
    entries.setflags(write=False)
    return JetVector(complex(z), entries)


@dataclass(frozen=True)
class JetOperator:
    """N-by-N matrix on jets; the last ``dirty`` output entries need data past N."""

    matrix: np.ndarray
    name: str = "generic"
    dirty: int = 0

    @property
    def N(self) -> int:
        return self.matrix.shape[0]


def shift_matrix(N):
    """Sub-diagonal unit shift: entry (n+1, n) = 1."""
    return np.eye(N, k=-1, dtype=complex)


def derivative_matrix(N):
    """Super-diagonal with entry (n, n+1) = n+1."""
    return np.diag(np.arange(1, N, dtype=complex), k=1)


def jet_operator(name: str, N: int, z=0.0, M=1.0, matrix=None, dirty=0) -> JetOperator:
    """Named templates ``Z``, ``S``, ``zI_plus_Z``, ``D`` (diagonal powers of M), ``generic``."""
    if name == "Z":
        return JetOperator(shift_matrix(N), "Z", 0)
    if name == "S":
        return JetOperator(derivative_matrix(N), "S", 1)
    if name == "zI_plus_Z":
        return JetOperator(complex(z) * np.eye(N) + shift_matrix(N), "zI_plus_Z", 0)
    if name == "D":
        return JetOperator(np.diag(power_seq(M, N)), "D", 0)
    if name == "generic":
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (N, N):
            raise ValueError(f"generic operator must be {N}x{N}")
        return JetOperator(m, "generic", dirty)
    raise ValueError(f"unknown jet operator template {name!r}")


@dataclass(frozen=True)
class Applied:
    jet: JetVector
    clean: int  # leading entries unaffected by truncation


def apply(op: JetOperator, J: JetVector) -> Applied:
    if op.N != J.order:
        raise ValueError(f"operator is {op.N}x{op.N} but jet has order {J.order}")
    out = op.matrix @ J.entries
    return Applied(JetVector(J.base, out), op.N - op.dirty)


def commutator_check(N: int) -> dict:
    """Deviation of ``SZ - ZS`` from the identity.

    ``leading`` covers the top-left (N-1) block where the identity holds;
    ``full`` includes the bottom-right truncation artefact.
    """
    if N < 3:
        raise ValueError("commutator check needs N >= 3")
    S, Z = derivative_matrix(N), shift_matrix(N)
    C = S @ Z - Z @ S
    dev = np.abs(C - np.eye(N))
    return {"N": N, "leading": float(dev[: N - 1, : N - 1].max()), "full": float(dev.max())}


@dataclass(frozen=True)
class CoefficientOperator:
    """Square matrix acting on Taylor coefficient arrays."""

    matrix: np.ndarray
    name: str = "generic"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, f: EntireFunctionRep) -> EntireFunctionRep:
        if f.coeffs.shape[0] > self.dim:
            raise ValueError(
                f"operator dimension {self.dim} < coefficient length {f.coeffs.shape[0]}"
            )
        return EntireFunctionRep(self.matrix @ f.padded(self.dim), f.radius, f"{self.name}({f.name})")

    def __matmul__(self, other: "CoefficientOperator") -> "CoefficientOperator":
        return CoefficientOperator(self.matrix @ other.matrix, f"{self.name}*{other.name}")


def multiplication_operator(M: int) -> CoefficientOperator:
    """Multiplication by the variable (drops the top coefficient)."""
    return CoefficientOperator(shift_matrix(M), "mult")


def differentiation_operator(M: int) -> CoefficientOperator:
    return CoefficientOperator(derivative_matrix(M), "diff")


def identity_operator(M: int) -> CoefficientOperator:
    return CoefficientOperator(np.eye(M, dtype=complex), "id")


def fock_weights(M: int) -> np.ndarray:
    return np.array([math.factorial(n) for n in range(M)], dtype=float)


def weighted_adjoint(T: CoefficientOperator, weights=None) -> CoefficientOperator:
    """Adjoint under ``<f, g> = sum_n w_n f_n conj(g_n)``: ``W^-1 T^H W``.

    ``weights`` defaults to the Fock weights ``n!``.
    """
    w = fock_weights(T.dim) if weights is None else np.asarray(weights, dtype=float)
    m = (T.matrix.conj().T * w[None, :]) / w[:, None]
    return CoefficientOperator(m, f"{T.name}^*")


def extend_operator(T: CoefficientOperator, f: EntireFunctionRep, z, N: int) -> JetVector:
    """``J_z(T f)``: apply ``T`` on coefficients, then take the jet."""
    return jet_of(T(f), z, N)


def lift_T_A(T: CoefficientOperator, f: EntireFunctionRep, z, A: AlgebraElement,
             a: DualFunctional, pol: TruncationPolicy | None = None):
    """``sum_n <a*, A^n> (Tf)^(n)(z)/n!``, i.e. ``<a*, (Tf)(z + A)>``."""
    return eval_weak(T(f), z, A, dual_involution(a), pol)


def lift_via_jets(T: CoefficientOperator, f: EntireFunctionRep, z, A, a, N: int) -> complex:
    """Same quantity through ``<T~ J(f), X(a, A^n)>`` at truncation order N."""
    J = extend_operator(T, f, z, N).entries
    return complex(np.dot(x_vector(a, A, N), J))


def fock_inner(f: EntireFunctionRep, g: EntireFunctionRep) -> complex:
    """``sum_n n! f_n conj(g_n)`` over the common coefficient length."""
    M = min(f.coeffs.shape[0], g.coeffs.shape[0])
    return weighted_inner(f.coeffs[:M], g.coeffs[:M], fock_weights(M))


def weighted_inner(fc, gc, weights) -> complex:
    fc = np.asarray(fc)
    gc = np.asarray(gc)
    if fc.ndim == 1:
        return complex(np.sum(weights * fc * np.conj(gc)))
    return complex(np.sum(weights[:, None] * fc * np.conj(gc)))
