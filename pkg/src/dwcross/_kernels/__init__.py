"""Hot numerical kernels with a compiled core and a pure-numpy fallback.

The Cython extension `_core` is used when it was built; otherwise the
numpy implementation in `_pure` takes over.  Set DWCROSS_KERNELS=pure or
DWCROSS_KERNELS=compiled to force a backend (the latter raises if the
extension is missing).  Both backends implement identical floating-point
sequences, so results do not depend on the selection.
"""

from __future__ import annotations

import os

_requested = os.environ.get("DWCROSS_KERNELS", "").strip().lower()

if _requested == "pure":
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pure as _impl

        BACKEND = "pure"

sturm_counts = _impl.sturm_counts
integrate_schrodinger = _impl.integrate_schrodinger

__all__ = ["sturm_counts", "integrate_schrodinger", "BACKEND"]
