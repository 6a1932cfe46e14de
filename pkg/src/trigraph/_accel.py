"""Kernel backend selection.

Hot loops are written once as plain Python/numpy and compiled with
``numba.njit`` unless ``TRIGRAPH_DISABLE_NUMBA`` is set (any value other than
"", "0", "false"), or numba is not importable.  Kernels that have a natural
vectorised form also carry a separate numpy implementation; see
``trigraph._kernels``.
"""

import os

_flag = os.environ.get("TRIGRAPH_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
