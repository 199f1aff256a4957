"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting
``AKX_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback

if os.environ.get("AKX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ext as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback

taylor_shift = _impl.taylor_shift
grassmann_mul = _impl.grassmann_mul
hermitian_eigvalsh = _impl.hermitian_eigvalsh

__all__ = ["BACKEND", "taylor_shift", "grassmann_mul", "hermitian_eigvalsh"]
