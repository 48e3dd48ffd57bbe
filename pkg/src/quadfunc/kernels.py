"""Backend selection for the hot loops.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback ``_pykernels`` is used.  Setting ``QUADFUNC_PURE_PYTHON=1``
forces the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("QUADFUNC_PURE_PYTHON", "") not in ("", "0"):
    from quadfunc import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from quadfunc import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        from quadfunc import _pykernels as _impl

        BACKEND = "python"

representation_counts = _impl.representation_counts
first_grid_failure = _impl.first_grid_failure
splitmix_signs = _impl.splitmix_signs

# largest magnitude the int64 kernels may see in any intermediate product
INT64_SAFE = 2**62

__all__ = ["BACKEND", "INT64_SAFE", "representation_counts", "first_grid_failure", "splitmix_signs"]
