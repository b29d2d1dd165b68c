"""Backend dispatch for the hot kernels, plus threaded chunk wrappers.

Shift lanes (the n direction) are mutually independent, so a scan may be
split into fixed-size lane chunks and run on a thread pool.  Chunk
boundaries do not depend on the thread count and results are stitched in
lane order, so output is bit-identical for any ``threads`` value.  Real
parallelism needs the numba backend (kernels are compiled nogil); under
the numpy fallback threads only interleave.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._backend import BACKEND

if BACKEND == "numba":
    from . import _scan_numba as _impl
else:
    from . import _scan_numpy as _impl

kahan_cumsum = _impl.kahan_cumsum
diff_table = _impl.diff_table
unit_diff_table = _impl.unit_diff_table
mean_table = _impl.mean_table
power_scan = _impl.power_scan
unit_power_scan = _impl.unit_power_scan

_LANE_CHUNK = 64


def as_f64(x) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float64)


def _lane_chunks(n_hi: int):
    edges = list(range(0, n_hi + 1, _LANE_CHUNK)) + [n_hi + 1]
    return [(lo, hi) for lo, hi in zip(edges, edges[1:]) if hi > lo]


def _run_chunked(fn, chunks, threads):
    if threads <= 1 or len(chunks) == 1:
        return [fn(lo, hi) for lo, hi in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(fn, lo, hi) for lo, hi in chunks]
        return [f.result() for f in futs]


def diff_table_chunked(a, P, p, m_hi, n_hi, threads=1):
    """diff_table split across lane chunks; bitwise equal to one call."""

    def job(lo, hi):
        return diff_table(a[lo:], P, p, m_hi, hi - 1 - lo)

    parts = _run_chunked(job, _lane_chunks(n_hi), threads)
    return np.concatenate(parts, axis=1)


def power_scan_chunked(a, P, p, u_pow, k, m_hi, n_hi, cuts, threads=1):
    """power_scan split across lane chunks; bitwise equal to one call."""

    def job(lo, hi):
        return power_scan(a[lo:], P, p, u_pow, k, m_hi, hi - 1 - lo, cuts)

    parts = _run_chunked(job, _lane_chunks(n_hi), threads)
    totals = np.concatenate([t for t, _ in parts])
    prefixes = np.concatenate([pre for _, pre in parts], axis=1)
    return totals, prefixes


def unit_power_scan_chunked(a, k, m_hi, n_hi, cuts, threads=1):
    def job(lo, hi):
        return unit_power_scan(a[lo:], k, m_hi, hi - 1 - lo, cuts)

    parts = _run_chunked(job, _lane_chunks(n_hi), threads)
    totals = np.concatenate([t for t, _ in parts])
    prefixes = np.concatenate([pre for _, pre in parts], axis=1)
    return totals, prefixes
