"""Kernel backend selection.

The hot numeric loops exist twice: scalar loops compiled with numba's
``@njit`` and a lane-vectorised pure-numpy fallback.  ``ABSUM_BACKEND``
picks one:

    auto   (default) numba when importable, numpy otherwise
    numba  require numba, raise if missing
    numpy  force the pure-numpy path

Within one backend every result is bit-reproducible.  Across backends the
two paths agree to the last couple of ulps (numpy's SIMD ``pow`` may differ
from scalar libm in the final bit); the benchmark and the parity tests
quantify this.
"""

from __future__ import annotations

import os

_CHOICE = os.environ.get("ABSUM_BACKEND", "auto").strip().lower()

if _CHOICE not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"ABSUM_BACKEND must be one of auto|numba|numpy, got {_CHOICE!r}"
    )

if _CHOICE == "numpy":
    BACKEND = "numpy"
else:
    try:
        import numba  # noqa: F401

        BACKEND = "numba"
    except ImportError:
        if _CHOICE == "numba":
            raise RuntimeError(
                "ABSUM_BACKEND=numba but numba is not importable"
            ) from None
        BACKEND = "numpy"


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND
