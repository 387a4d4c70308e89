"""Kernel backend selection.

Prefers the compiled Cython kernels when the extension was built,
otherwise falls back to the pure-Python twins.  Setting the environment
variable ``BROUCKE_PURE_PYTHON=1`` forces the fallback (used by the
benchmark and by tests that compare the two implementations).
"""

import os

from . import _kernels_py

if os.environ.get("BROUCKE_PURE_PYTHON", "").strip() in ("1", "true", "yes"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

gamma = _impl.gamma
grad = _impl.grad
hess = _impl.hess
rhs_flow = _impl.rhs_flow
rhs_frame = _impl.rhs_frame
