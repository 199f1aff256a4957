"""Power-series functional calculus over concrete algebras and the extended
reproducing kernels built on it."""

from ._core import BACKEND
from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    DualFunctional,
    dual_involution,
    grassmann,
    involution,
    level_norm,
    matrix,
    mul,
    pair,
    power,
    quaternion,
    unit,
    weighted_seq,
)
from .series import EntireFunctionRep, TruncationPolicy, eval_ext, eval_weak, preset, x_vector

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlgebraDescriptor",
    "AlgebraElement",
    "DualFunctional",
    "EntireFunctionRep",
    "TruncationPolicy",
    "dual_involution",
    "eval_ext",
    "eval_weak",
    "grassmann",
    "involution",
    "level_norm",
    "matrix",
    "mul",
    "pair",
    "power",
    "preset",
    "quaternion",
    "unit",
    "weighted_seq",
    "x_vector",
]
