"""Select the NNLS kernel at import time.

The compiled kernel is used when it was built; setting ``HUNDAL_LAB_PURE=1``
forces the NumPy fallback.
"""
import os

from . import _nnls_py

try:
    from . import _nnls_ext
except ImportError:  # extension not built
    _nnls_ext = None

KERNELS = {"python": _nnls_py.nnls_kernel}
if _nnls_ext is not None:
    KERNELS["compiled"] = _nnls_ext.nnls_kernel

if os.environ.get("HUNDAL_LAB_PURE") == "1" or _nnls_ext is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

nnls_kernel = KERNELS[BACKEND]


def get_kernel(name=None):
    """Return the kernel called ``name``, or the active one."""
    if name is None:
        return nnls_kernel
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable NNLS backend {name!r}; have {sorted(KERNELS)}") from None
