"""BLAS thread control for the small-matrix hot loops.

Everything here operates on matrices of a few hundred rows at most, where
multi-threaded BLAS spin-wait overhead dwarfs the arithmetic (an order of
magnitude on few-core boxes).  Parallelism belongs at the realization level
instead, so linear algebra runs single-threaded inside the hot paths.
"""

from __future__ import annotations

import contextlib

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover - threadpoolctl is a hard dependency
    threadpool_limits = None


def single_threaded_blas():
    if threadpool_limits is None:
        return contextlib.nullcontext()
    return threadpool_limits(limits=1, user_api="blas")
