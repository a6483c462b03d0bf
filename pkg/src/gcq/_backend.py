"""Kernel backend selection.

The hot kernels exist twice: numba-compiled and pure numpy. By default the
numba build is used when numba imports cleanly; set GCQ_BACKEND=numpy to
force the fallback or GCQ_BACKEND=numba to fail loudly when numba is
missing.
"""

import os


def load_backend(name=None):
    """Return (module, name) for the requested kernel backend."""
    choice = (name or os.environ.get("GCQ_BACKEND") or "auto").strip().lower()
    if choice not in ("auto", "numpy", "numba"):
        raise ValueError(f"unknown kernel backend {choice!r}")
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_numba as impl

            return impl, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_numpy as impl

    return impl, "numpy"


kernels, BACKEND = load_backend()
