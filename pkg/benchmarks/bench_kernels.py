#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot kernels (difference-table fill and the powered norm
scan) on both backends, reports speedups, and checks the backends agree.
Agreement is within a couple of ulps, not bitwise: numpy's SIMD pow can
differ from scalar libm pow in the final bit.

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from absum import _scan_numpy

try:
    from absum import _scan_numba

    HAS_NUMBA = True
except ImportError:
    _scan_numba = None
    HAS_NUMBA = False


def _time(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _rel_dev(a, b):
    scale = np.maximum(np.abs(a), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def bench_case(m_hi, n_hi, k, rng):
    a = rng.standard_normal(m_hi + n_hi + 1)
    p = rng.uniform(0.5, 2.0, m_hi + 1)
    P = np.cumsum(p)
    u_pow = rng.uniform(0.5, 2.0, m_hi + 1) ** (k - 1.0)
    cuts = np.asarray([0, m_hi // 2, m_hi], dtype=np.int64)

    rows = []
    t_np, tab_np = _time(_scan_numpy.diff_table, a, P, p, m_hi, n_hi)
    t_np2, scan_np = _time(_scan_numpy.power_scan, a, P, p, u_pow, k,
                           m_hi, n_hi, cuts)
    if HAS_NUMBA:
        # warm the JIT before timing
        _scan_numba.diff_table(a, P, p, min(m_hi, 8), min(n_hi, 4))
        _scan_numba.power_scan(a, P, p, u_pow, k, min(m_hi, 8),
                               min(n_hi, 4), cuts[:1])
        t_nb, tab_nb = _time(_scan_numba.diff_table, a, P, p, m_hi, n_hi)
        t_nb2, scan_nb = _time(_scan_numba.power_scan, a, P, p, u_pow, k,
                               m_hi, n_hi, cuts)
        rows.append(("diff_table", m_hi, n_hi, t_np, t_nb, t_np / t_nb,
                     _rel_dev(tab_np, tab_nb)))
        rows.append(("power_scan", m_hi, n_hi, t_np2, t_nb2, t_np2 / t_nb2,
                     _rel_dev(scan_np[0], scan_nb[0])))
    else:
        rows.append(("diff_table", m_hi, n_hi, t_np, None, None, 0.0))
        rows.append(("power_scan", m_hi, n_hi, t_np2, None, None, 0.0))
    return rows


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="small sizes only (CI smoke)")
    args = parser.parse_args()

    rng = np.random.default_rng(20240817)
    sizes = [(2_000, 64, 1.5)] if args.quick else [
        (2_000, 64, 1.5), (20_000, 64, 2.0), (200_000, 32, 2.0),
    ]
    if not HAS_NUMBA:
        print("numba not importable; timing the numpy fallback only")

    header = f"{'kernel':<12}{'m_max':>9}{'n_max':>7}{'numpy s':>12}" \
             f"{'numba s':>12}{'speedup':>9}{'max rel dev':>14}"
    print(header)
    print("-" * len(header))
    worst = 0.0
    for m_hi, n_hi, k in sizes:
        for name, m, n, t_np, t_nb, speedup, dev in bench_case(m_hi, n_hi,
                                                               k, rng):
            worst = max(worst, dev)
            nb = f"{t_nb:12.5f}" if t_nb is not None else f"{'-':>12}"
            sp = f"{speedup:9.1f}" if speedup is not None else f"{'-':>9}"
            print(f"{name:<12}{m:>9}{n:>7}{t_np:12.5f}{nb}{sp}{dev:14.2e}")
    if HAS_NUMBA:
        print(f"\nworst backend deviation: {worst:.2e}")
        if worst > 1e-13:
            raise SystemExit("backends drifted beyond 1e-13")
        print("backends agree within 1e-13 relative")


if __name__ == "__main__":
    main()
