"""Power-series evaluation of analytic functions at shifted algebra arguments.

A function is carried as its Taylor coefficients about 0 (a finite array,
entries past the end are zero) together with the radius of the disk on
which those coefficients represent it. Evaluation at ``z + A`` re-centres
the coefficients at ``z`` and sums ``sum_n A^n f^(n)(z)/n!``, so only
powers of ``A`` are ever formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .algebra import (
    AlgebraElement,
    DualFunctional,
    dual_involution,
    dual_norm,
    level_norm,
    mul_coords,
    strong_witness,
    unit,
    zero,
)

DEFAULT_TERMS = 120


class ConvergenceError(ArithmeticError):
    """A series could not be certified; ``report`` holds the partial result."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DomainError(ConvergenceError):
    """Argument lies outside the disk of convergence."""


@dataclass(frozen=True)
class EntireFunctionRep:
    """Taylor coefficients ``c_0..c_M`` about 0 (shape ``(M+1,)`` or ``(M+1, p)``)."""

    coeffs: np.ndarray
    radius: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim not in (1, 2) or c.shape[0] == 0:
            raise ValueError("coeffs must be a non-empty 1-D or 2-D array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def p(self) -> int:
        return 1 if self.coeffs.ndim == 1 else self.coeffs.shape[1]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def is_entire(self) -> bool:
        return math.isinf(self.radius)

    def padded(self, M: int) -> np.ndarray:
        c = self.coeffs
        if c.shape[0] >= M:
            return np.array(c[:M])
        pad = np.zeros((M - c.shape[0],) + c.shape[1:], dtype=complex)
        return np.concatenate([c, pad])

    def __call__(self, z) -> complex:
        return taylor_shift(self, z)[0]

    def to_dict(self) -> dict:
        c = self.coeffs if self.p == 1 else self.coeffs.reshape(-1)
        return {
            "coeffs": [[float(x.real), float(x.imag)] for x in c],
            "radius": "inf" if self.is_entire else float(self.radius),
        }

    @classmethod
    def from_dict(cls, d) -> "EntireFunctionRep":
        if isinstance(d, str):
            return preset(d)
        if "preset" in d:
            return preset(d["preset"], d.get("terms", DEFAULT_TERMS))
        coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in d["coeffs"]]
        r = d.get("radius", "inf")
        radius = math.inf if r in ("inf", None) else float(r)
        return cls(np.array(coeffs), radius)


def _inv_factorials(M):
    out = np.empty(M)
    out[0] = 1.0
    for k in range(1, M):
        out[k] = out[k - 1] / k
    return out


def preset(name: str, terms: int = DEFAULT_TERMS) -> EntireFunctionRep:
    """Named functions: ``exp``, ``sin``, ``cos`` (entire) and ``geom`` = 1/(1-z)."""
    k = np.arange(terms)
    if name == "exp":
        c = _inv_factorials(terms)
    elif name == "sin":
        c = _inv_factorials(terms) * np.where(k % 2 == 1, (-1.0) ** ((k - 1) // 2), 0.0)
    elif name == "cos":
        c = _inv_factorials(terms) * np.where(k % 2 == 0, (-1.0) ** (k // 2), 0.0)
    elif name == "geom":
        return EntireFunctionRep(np.ones(terms), 1.0, "geom")
    else:
        raise ValueError(f"unknown function preset {name!r}")
    return EntireFunctionRep(c, math.inf, name)


def polynomial(coeffs, radius=math.inf) -> EntireFunctionRep:
    return EntireFunctionRep(np.asarray(coeffs, dtype=complex), radius, "poly")


@dataclass(frozen=True)
class TruncationPolicy:
    order: int = 30
    tail_tol: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be positive")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")
        if self.order > self.max_terms:
            raise ValueError("order exceeds max_terms")


def _check_radius(f, z, margin=0.0):
    if not f.is_entire and abs(z) + margin >= f.radius:
        raise DomainError(
            f"|z| + {margin:.3g} = {abs(z) + margin:.6g} is outside the radius {f.radius:.6g}"
        )


def taylor_shift(f: EntireFunctionRep, z) -> np.ndarray:
    """``g_n = f^(n)(z)/n!`` for ``n = 0..M``, same shape as ``f.coeffs``."""
    _check_radius(f, z)
    z = complex(z)
    if f.coeffs.ndim == 1:
        return np.asarray(_core.taylor_shift(f.coeffs, z))
    cols = [np.asarray(_core.taylor_shift(f.coeffs[:, j], z)) for j in range(f.p)]
    return np.stack(cols, axis=1)


def _tail_profile(g, norm_A, d):
    """``tails[N] = sum_{n>N} |g_n| d^(n-1) |A|^n`` for N = 0..M."""
    mags = np.abs(g) if g.ndim == 1 else np.linalg.norm(g, axis=1)
    n = np.arange(mags.size)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = np.where(n >= 1, mags * d ** np.maximum(n - 1, 0) * norm_A ** n, 0.0)
    terms = np.nan_to_num(terms, nan=np.inf)
    rev = np.cumsum(terms[::-1])[::-1]
    tails = np.empty_like(rev)
    tails[:-1] = rev[1:]
    tails[-1] = 0.0
    return tails


@dataclass
class SeriesResult:
    value: object
    tail: float
    order: int
    converged: bool = True
    base: complex = 0j
    notes: dict = field(default_factory=dict)


def _prepare(f, z, A, pol):
    """Re-centre at ``z`` (and at the body, for Grassmann); choose the order."""
    desc = A.descriptor
    if desc.is_real and complex(z).imag != 0:
        raise ValueError(f"complex base point {z} for an algebra over the reals")
    if desc.kind == "grassmann" and A.body != 0:
        # body is a scalar multiple of the unit, fold it into the base point
        z = complex(z) + A.body
        A = A.soul()
    z = complex(z)
    norm_A = level_norm(A)
    _check_radius(f, z, margin=norm_A)
    g = taylor_shift(f, z)
    d = strong_witness(desc).d_t
    tails = _tail_profile(g, norm_A, d)
    limit = min(pol.max_terms, g.shape[0] - 1)
    order = None
    for N in range(min(pol.order, limit), limit + 1):
        if tails[N] <= pol.tail_tol:
            order = N
            break
    return z, A, g, tails, order, limit


def _partial_powers(A, upto):
    """Coordinates of ``A^0..A^upto`` as rows; stops early once a power is exactly zero."""
    desc = A.descriptor
    P = np.empty((upto + 1, desc.dim), dtype=complex)
    P[0] = unit(desc).coords
    x = A.coords
    for n in range(1, upto + 1):
        P[n] = mul_coords(desc, P[n - 1], x)
        if not P[n].any():
            return P[:n], True
    return P, False


def _pairings(a: DualFunctional, P: np.ndarray) -> np.ndarray:
    """``<a, P_n>`` for each row, matching :func:`pair`."""
    vals = P @ np.conj(a.coords)
    return vals.real.astype(complex) if a.descriptor.is_real else vals


def eval_ext(f: EntireFunctionRep, z, A: AlgebraElement, pol: TruncationPolicy | None = None) -> SeriesResult:
    """``f(z + A) = sum_n A^n f^(n)(z)/n!`` with a certified tail.

    Raises :class:`ConvergenceError` when no order up to ``pol.max_terms``
    brings the tail bound under ``pol.tail_tol``.
    """
    pol = pol or TruncationPolicy()
    if f.p != 1:
        raise ValueError("eval_ext takes scalar-valued functions")
    z, A, g, tails, order, limit = _prepare(f, z, A, pol)
    P, nilpotent = _partial_powers(A, order if order is not None else limit)
    top = len(P) - 1
    value = AlgebraElement(A.descriptor, g[: top + 1] @ P)
    tail = 0.0 if nilpotent else float(tails[top])
    res = SeriesResult(value, tail, top, True, z, {"nilpotent": nilpotent})
    if not nilpotent and order is None:
        res.converged = False
        raise ConvergenceError(
            f"tail bound {tail:.3g} exceeds {pol.tail_tol:.3g} after {top} terms", res
        )
    return res


def eval_weak(f, z, A, a: DualFunctional, pol: TruncationPolicy | None = None) -> SeriesResult:
    """``<a, f(z + A)> = sum_n <a, A^n> f^(n)(z)/n!`` as a scalar series."""
    pol = pol or TruncationPolicy()
    z, A, g, tails, order, limit = _prepare(f, z, A, pol)
    P, nilpotent = _partial_powers(A, order if order is not None else limit)
    top = len(P) - 1
    total = _pairings(a, P) @ g[: top + 1]
    tail = 0.0 if nilpotent else float(tails[top]) * dual_norm(a)
    res = SeriesResult(complex(total), tail, top, True, z, {"nilpotent": nilpotent})
    if not nilpotent and order is None:
        res.converged = False
        raise ConvergenceError(f"weak tail bound {tail:.3g} not certified after {top} terms", res)
    return res


def x_vector(a: DualFunctional, A: AlgebraElement, N: int) -> np.ndarray:
    """Entries ``<a*, A^n>`` for ``n = 0..N-1``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    P, _ = _partial_powers(A, N - 1)
    out = np.zeros(N, dtype=complex)
    out[: len(P)] = _pairings(dual_involution(a), P)
    return out


@dataclass(frozen=True)
class Ell2Verdict:
    verdict: str  # "certified", "numeric" or "divergent"
    ratio: float  # geometric ratio of |entry|^2, or nan
    bound: float  # bound on sum |entry|^2 (inf if none)
    partial: float
    terms: int

    @property
    def summable(self) -> bool:
        return self.verdict != "divergent"

    def tail_norm(self, a_norm, N) -> float:
        """Bound on ``(sum_{n>=N} |<a*,A^n>|^2)^(1/2)`` when certified geometrically."""
        if self.verdict != "certified":
            return math.inf
        if math.isnan(self.ratio):
            return 0.0
        r = math.sqrt(self.ratio)
        return a_norm * r ** N / math.sqrt(1 - self.ratio)


def ell2_check(a: DualFunctional, A: AlgebraElement, t: float = 0.0, probe: int = 400) -> Ell2Verdict:
    """Decide whether ``sum_n |<a*, A^n>|^2`` is finite.

    Certified when ``d |A|_t < 1`` (geometric bound) or when a power of
    ``A`` vanishes exactly; otherwise the partial sums over ``probe`` terms
    are inspected for a plateau.
    """
    a_norm = dual_norm(dual_involution(a), t)
    d = strong_witness(A.descriptor, t).d_t
    r = d * level_norm(A, t)
    P, nilpotent = _partial_powers(A, probe if r >= 1 else 64)
    a_star = dual_involution(a)
    entries = _pairings(a_star, P)
    partial = float(np.sum(np.abs(entries) ** 2))
    if nilpotent:
        return Ell2Verdict("certified", math.nan, partial, partial, len(P))
    if r < 1:
        u0 = abs(entries[0]) ** 2
        bound = u0 + (a_norm / d) ** 2 * r ** 2 / (1 - r ** 2)
        return Ell2Verdict("certified", r ** 2, float(bound), partial, len(P))
    sq = np.abs(entries) ** 2
    if not np.all(np.isfinite(sq)):
        return Ell2Verdict("divergent", math.nan, math.inf, math.inf, len(P))
    k = len(sq) // 4
    late = float(np.sum(sq[-k:]))
    if partial > 0 and late <= 1e-14 * partial:
        return Ell2Verdict("numeric", math.nan, math.inf, partial, len(P))
    return Ell2Verdict("divergent", math.nan, math.inf, partial, len(P))


def a_valued_sum(A_seq, f_vals) -> AlgebraElement:
    """``sum_n A_n f_n`` over equal-length sequences."""
    A_seq = list(A_seq)
    f_vals = list(f_vals)
    if len(A_seq) != len(f_vals):
        raise ValueError(f"length mismatch: {len(A_seq)} elements, {len(f_vals)} scalars")
    if not A_seq:
        raise ValueError("empty sequence")
    acc = zero(A_seq[0].descriptor)
    for A, c in zip(A_seq, f_vals):
        acc = acc + A * complex(c)
    return acc
