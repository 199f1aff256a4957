"""Concrete topological algebras with involution, duality pairing and norms.

Four finite-dimensional algebras are supported:

``matrix(n)``
    n-by-n matrices, coordinates row-major.
``quaternion``
    real quaternions, coordinates ``(1, i, j, k)``.
``grassmann(N)``
    exterior algebra on N generators, coordinates indexed by generator
    subsets in graded-lexicographic order.
``weighted_seq(L, beta)``
    sequences ``x_0 .. x_{L-1}`` under the truncated Cauchy product, normed
    by ``sum |x_n| beta**(-n t)``. This family satisfies the graded product
    inequality with ``h(t) = t`` and constant 1.

Coordinates are always stored as complex128; for real fields the
constructors pin the imaginary parts to zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _core
from ._basis import grassmann_basis

KINDS = ("matrix", "quaternion", "grassmann", "weighted_seq")
FIELDS = ("real", "complex")
MAX_GRASSMANN = 12


class AlgebraError(ValueError):
    """Raised for malformed algebra descriptors or mismatched operands."""


@dataclass(frozen=True)
class AlgebraDescriptor:
    kind: str
    size: int = 1
    field: str = "complex"
    beta: float = 2.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise AlgebraError(f"unknown algebra kind {self.kind!r}")
        if self.field not in FIELDS:
            raise AlgebraError(f"unknown field {self.field!r}")
        if self.kind == "matrix" and self.size < 1:
            raise AlgebraError("matrix algebra requires n >= 1")
        if self.kind == "grassmann" and not 0 <= self.size <= MAX_GRASSMANN:
            raise AlgebraError(f"grassmann algebra requires 0 <= N <= {MAX_GRASSMANN}")
        if self.kind == "weighted_seq":
            if self.size < 1:
                raise AlgebraError("weighted_seq requires L >= 1")
            if not self.beta > 1:
                raise AlgebraError("weighted_seq requires beta > 1")
        if self.kind == "quaternion" and self.field != "real":
            raise AlgebraError("quaternions are an algebra over the real field")

    @property
    def dim(self) -> int:
        if self.kind == "matrix":
            return self.size * self.size
        if self.kind == "quaternion":
            return 4
        if self.kind == "grassmann":
            return 1 << self.size
        return self.size

    @property
    def is_real(self) -> bool:
        return self.field == "real"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "field": self.field}
        if self.kind == "matrix":
            d["n"] = self.size
        elif self.kind == "grassmann":
            d["N"] = self.size
        elif self.kind == "weighted_seq":
            d["L"] = self.size
            d["beta"] = self.beta
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AlgebraDescriptor":
        kind = d["kind"]
        size = {"matrix": "n", "grassmann": "N", "weighted_seq": "L"}.get(kind)
        field = d.get("field", "real" if kind == "quaternion" else "complex")
        return cls(
            kind=kind,
            size=int(d[size]) if size else 1,
            field=field,
            beta=float(d.get("beta", 2.0)),
        )


def matrix(n, field="complex"):
    return AlgebraDescriptor("matrix", n, field)


def quaternion():
    return AlgebraDescriptor("quaternion", 1, "real")


def grassmann(N, field="complex"):
    return AlgebraDescriptor("grassmann", N, field)


def weighted_seq(L, beta=2.0, field="complex"):
    return AlgebraDescriptor("weighted_seq", L, field, float(beta))


def _coerce(desc, coords):
    arr = np.array(coords, dtype=complex).reshape(-1)
    if arr.size != desc.dim:
        raise AlgebraError(f"{desc.kind} expects {desc.dim} coordinates, got {arr.size}")
    if desc.is_real:
        if np.any(arr.imag != 0):
            raise AlgebraError(f"{desc.kind} over the reals takes real coordinates")
        arr = arr.real.astype(complex)
    arr.setflags(write=False)
    return arr


class _Coords:
    __slots__ = ("descriptor", "coords")

    def __init__(self, descriptor: AlgebraDescriptor, coords):
        object.__setattr__(self, "descriptor", descriptor)
        object.__setattr__(self, "coords", _coerce(descriptor, coords))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self):
        return f"{type(self).__name__}({self.descriptor.kind}, {np.array2string(self.coords, precision=4)})"

    def to_dict(self) -> dict:
        d = self.descriptor.to_dict()
        d["coords"] = [[float(c.real), float(c.imag)] for c in self.coords]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict):
        desc = AlgebraDescriptor.from_dict(d)
        coords = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in d["coords"]]
        return cls(desc, coords)

    @classmethod
    def from_json(cls, s: str):
        return cls.from_dict(json.loads(s))


class AlgebraElement(_Coords):
    """Immutable element of one of the concrete algebras.

    Supports ``+``, ``-``, scalar multiplication and the algebra product via
    ``*`` (or :func:`mul`).
    """

    __slots__ = ()

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.descriptor != self.descriptor:
            raise AlgebraError("operands belong to different algebras")

    def __add__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self + scalar(self.descriptor, other)
        self._check(other)
        return AlgebraElement(self.descriptor, self.coords + other.coords)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self - scalar(self.descriptor, other)
        self._check(other)
        return AlgebraElement(self.descriptor, self.coords - other.coords)

    def __neg__(self):
        return AlgebraElement(self.descriptor, -self.coords)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return AlgebraElement(self.descriptor, self.coords * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return AlgebraElement(self.descriptor, other * self.coords)
        return NotImplemented

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and other.descriptor == self.descriptor
            and np.array_equal(self.coords, other.coords)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def as_matrix(self) -> np.ndarray:
        if self.descriptor.kind != "matrix":
            raise AlgebraError("not a matrix element")
        n = self.descriptor.size
        return self.coords.reshape(n, n)

    @property
    def body(self) -> complex:
        """Scalar part: coefficient of the unit (Grassmann body)."""
        return complex(self.coords[0])

    def soul(self) -> "AlgebraElement":
        if self.descriptor.kind != "grassmann":
            raise AlgebraError("soul is defined for Grassmann elements only")
        c = np.array(self.coords)
        c[0] = 0
        return AlgebraElement(self.descriptor, c)


class DualFunctional(_Coords):
    """Continuous linear functional, represented by coordinates.

    The pairing with an element is fixed per algebra by :func:`pair`.
    """

    __slots__ = ()

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return DualFunctional(self.descriptor, self.coords * other)
        return NotImplemented

    __rmul__ = __mul__


def _same(A, B):
    if A.descriptor != B.descriptor:
        raise AlgebraError(
            f"descriptor mismatch: {A.descriptor.to_dict()} vs {B.descriptor.to_dict()}"
        )


def unit(desc: AlgebraDescriptor) -> AlgebraElement:
    c = np.zeros(desc.dim, dtype=complex)
    if desc.kind == "matrix":
        c[:: desc.size + 1] = 1
    else:
        c[0] = 1
    return AlgebraElement(desc, c)


def zero(desc: AlgebraDescriptor) -> AlgebraElement:
    return AlgebraElement(desc, np.zeros(desc.dim))


def scalar(desc: AlgebraDescriptor, c) -> AlgebraElement:
    return unit(desc) * c


def element(desc, coords) -> AlgebraElement:
    return AlgebraElement(desc, coords)


def functional(desc, coords) -> DualFunctional:
    return DualFunctional(desc, coords)


def basis_element(desc, index) -> AlgebraElement:
    c = np.zeros(desc.dim)
    c[index] = 1
    return AlgebraElement(desc, c)


def generator(desc, k) -> AlgebraElement:
    """Grassmann generator ``e_k`` (1-based) or quaternion unit ``i, j, k``."""
    if desc.kind == "grassmann":
        masks, rank = grassmann_basis(desc.size)
        return basis_element(desc, int(rank[1 << (k - 1)]))
    if desc.kind == "quaternion":
        return basis_element(desc, {"i": 1, "j": 2, "k": 3}.get(k, k))
    raise AlgebraError("generators are defined for Grassmann and quaternion algebras")


def _quat_mul(x, y):
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return np.array([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ])


def mul_coords(desc: AlgebraDescriptor, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Product on raw coordinate vectors (no validation)."""
    if desc.kind == "matrix":
        n = desc.size
        return (x.reshape(n, n) @ y.reshape(n, n)).reshape(-1)
    if desc.kind == "quaternion":
        return _quat_mul(x, y)
    if desc.kind == "grassmann":
        return _core.grassmann_mul(x, y, desc.size)
    return np.convolve(x, y)[: desc.size]


def mul(A: AlgebraElement, B: AlgebraElement) -> AlgebraElement:
    """Algebra product ``A B``."""
    _same(A, B)
    return AlgebraElement(A.descriptor, mul_coords(A.descriptor, A.coords, B.coords))


def power(A: AlgebraElement, n: int) -> AlgebraElement:
    if n < 0:
        raise AlgebraError("power requires n >= 0")
    return powers(A, n)[n]


def powers(A: AlgebraElement, n: int) -> list[AlgebraElement]:
    """``[A^0, A^1, ..., A^n]`` by repeated multiplication."""
    out = [unit(A.descriptor)]
    for _ in range(n):
        out.append(mul(out[-1], A))
    return out


@lru_cache(maxsize=None)
def _reversal_signs(N):
    masks, _ = grassmann_basis(N)
    deg = np.array([bin(int(m)).count("1") for m in masks])
    return np.where((deg * (deg - 1) // 2) % 2 == 1, -1.0, 1.0)


def _star(desc, c):
    if desc.kind == "matrix":
        n = desc.size
        return c.reshape(n, n).conj().T.reshape(-1)
    if desc.kind == "quaternion":
        return c * np.array([1, -1, -1, -1])
    if desc.kind == "grassmann":
        return c.conj() * _reversal_signs(desc.size)
    return c.conj()


def involution(A: AlgebraElement) -> AlgebraElement:
    """Conjugate-linear, product-reversing involution ``A -> A*``."""
    return AlgebraElement(A.descriptor, _star(A.descriptor, A.coords))


def dual_involution(a: DualFunctional) -> DualFunctional:
    return DualFunctional(a.descriptor, _star(a.descriptor, a.coords))


def pair(a: DualFunctional, A: AlgebraElement) -> complex:
    """Duality bracket ``<a, A>``.

    Every algebra uses the coordinate form ``sum conj(a_i) A_i``; for
    matrices this is ``trace(a^H A)`` and for quaternions ``Re(conj(a) A)``.
    """
    _same(a, A)
    val = complex(np.vdot(a.coords, A.coords))
    if a.descriptor.is_real:
        return complex(val.real)
    return val


def level_norm(A: AlgebraElement, t: float = 0.0) -> float:
    """Norm of ``A`` at level ``t`` (``t`` only matters for weighted_seq)."""
    desc = A.descriptor
    c = A.coords
    if desc.kind in ("matrix", "quaternion"):
        return float(np.linalg.norm(c))
    if desc.kind == "grassmann":
        return float(np.sum(np.abs(c)))
    w = desc.beta ** (-np.arange(desc.size) * t)
    return float(np.sum(np.abs(c) * w))


def dual_norm(a: DualFunctional, t: float = 0.0) -> float:
    """Norm of ``a`` dual to :func:`level_norm` under :func:`pair`."""
    desc = a.descriptor
    c = a.coords
    if desc.kind in ("matrix", "quaternion"):
        return float(np.linalg.norm(c))
    if desc.kind == "grassmann":
        return float(np.max(np.abs(c))) if c.size else 0.0
    w = desc.beta ** (np.arange(desc.size) * t)
    return float(np.max(np.abs(c) * w))


@dataclass(frozen=True)
class StrongAlgebraWitness:
    t: float
    h_of_t: float
    c_st: float
    d_t: float


def strong_witness(desc: AlgebraDescriptor, t: float = 0.0) -> StrongAlgebraWitness:
    """Constants in ``|AB|_s <= c |A|_t |B|_s``.

    Every supported norm is submultiplicative with constant 1 at ``h(t) = t``;
    :func:`verify_strong_inequality` and the test-suite check this rather
    than take it on trust.
    """
    return StrongAlgebraWitness(t=t, h_of_t=t, c_st=1.0, d_t=1.0)


def power_norm_bound(A: AlgebraElement, n: int, t: float = 0.0, d: float | None = None) -> float:
    """Upper bound ``d**(n-1) * |A|_t**n`` for ``|A^n|_{h(t)}``; ``|unit|`` at n=0."""
    if n == 0:
        return level_norm(unit(A.descriptor), t)
    if d is None:
        d = strong_witness(A.descriptor, t).d_t
    return d ** (n - 1) * level_norm(A, t) ** n


def power_norm_check(A: AlgebraElement, n_max: int, t: float = 0.0) -> float:
    """Largest ratio ``|A^n| / bound`` over ``1 <= n <= n_max`` (<= 1 when the bound holds)."""
    worst = 0.0
    P = A
    for n in range(1, n_max + 1):
        if n > 1:
            P = mul(P, A)
        bound = power_norm_bound(A, n, t)
        lhs = level_norm(P, t)
        if bound == 0.0:
            if lhs != 0.0:
                return math.inf
            continue
        worst = max(worst, lhs / bound)
    return worst


def random_element(desc, rng, scale=1.0, soul=False) -> AlgebraElement:
    """Gaussian coordinates scaled to norm ``scale`` (``soul`` zeroes the body)."""
    c = rng.standard_normal(desc.dim)
    if not desc.is_real:
        c = c + 1j * rng.standard_normal(desc.dim)
    if soul:
        if desc.kind != "grassmann":
            raise AlgebraError("soul elements exist only in Grassmann algebras")
        c[0] = 0
    A = AlgebraElement(desc, c)
    nrm = level_norm(A)
    return A * (scale / nrm) if nrm > 0 else A


def random_functional(desc, rng, scale=1.0) -> DualFunctional:
    c = rng.standard_normal(desc.dim)
    if not desc.is_real:
        c = c + 1j * rng.standard_normal(desc.dim)
    c = c * (scale / np.linalg.norm(c))
    return DualFunctional(desc, c)


@dataclass(frozen=True)
class StrongReport:
    samples: int
    t: float
    s: float
    max_ratio: float
    holds: bool


def verify_strong_inequality(desc, samples, t, s, seed=0, rtol=1e-12) -> StrongReport:
    """Sample random pairs and return the largest ``|AB|_s / (|A|_t |B|_s)``."""
    if desc.kind != "weighted_seq":
        raise AlgebraError("the graded inequality is checked on weighted_seq algebras")
    if s < t:
        raise AlgebraError("requires s >= t")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        # heavy-tailed magnitudes exercise both low and high indices
        A = AlgebraElement(desc, rng.standard_normal(desc.dim) * np.exp(rng.uniform(-3, 3, desc.dim)))
        B = AlgebraElement(desc, rng.standard_normal(desc.dim) * np.exp(rng.uniform(-3, 3, desc.dim)))
        denom = level_norm(A, t) * level_norm(B, s)
        if denom == 0:
            continue
        worst = max(worst, level_norm(mul(A, B), s) / denom)
    return StrongReport(samples, t, s, worst, worst <= 1 + rtol)
