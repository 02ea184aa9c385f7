"""Kernel backend selection.

Hot search loops are written in a numba-compilable subset of Python.  By
default they are JIT-compiled; setting DIFFBASE_BACKEND=python runs the
same functions uncompiled (slow, dependency-free reference path).  The
benchmark in benchmarks/bench_backends.py compares the two.
"""

from __future__ import annotations

import os

_requested = os.environ.get("DIFFBASE_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numba", "python"):
    raise RuntimeError(
        f"DIFFBASE_BACKEND must be 'numba' or 'python', got {_requested!r}"
    )

HAVE_NUMBA = False
if _requested in ("auto", "numba"):
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise

BACKEND = "numba" if HAVE_NUMBA else "python"


def compile_kernel(func):
    """JIT-compile a kernel, or return it unchanged on the python backend."""
    if BACKEND == "numba":
        from numba import njit

        return njit(cache=True, nogil=True)(func)
    return func
