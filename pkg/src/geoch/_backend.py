"""Pick the compiled kernels when available, else the pure-Python twins."""

import os

BACKEND = "python"

if os.environ.get("GEOCH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = None
else:
    _impl = None

if _impl is None:
    from . import _fallback as _impl

setting_ops = _impl.setting_ops
local_moments = _impl.local_moments
bell_matrix = _impl.bell_matrix
jacobi_eigh = _impl.jacobi_eigh
Problem = _impl.Problem

MODE_SPHERE, MODE_XY, MODE_XZ = 0, 1, 2
KIND_PROJECTOR, KIND_OBSERVABLE = 0, 1
