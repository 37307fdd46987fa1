"""Pick the compiled kernels when available, else the NumPy fallback.

Set ``SWITCHPLAN_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("SWITCHPLAN_PURE_PYTHON", "") not in ("", "0"):
    from . import _fallback as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
