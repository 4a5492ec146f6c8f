"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twin is loaded.  Set ``GIBBSDISC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("GIBBSDISC_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

python_kernels = _kernels_py

__all__ = ["kernels", "python_kernels", "BACKEND"]
