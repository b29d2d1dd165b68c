"""Scalar-loop kernels compiled with numba.

Every kernel here has a lane-for-lane twin in ``_scan_numpy``; the
arithmetic (operation order, Kahan compensation) is kept identical so
the two backends agree to the last ulps.  Do not enable fastmath: the
compensated sums rely on strict IEEE ordering.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def kahan_cumsum(x):
    """Compensated running sums: out[i] = x[0] + ... + x[i]."""
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i in range(x.shape[0]):
        y = x[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


@njit(cache=True, nogil=True)
def diff_table(a, P, p, m_hi, n_hi):
    """Table of first differences of weighted sliding means.

    out[m, n] = a[n]                                   for m = 0
              = p[m]/(P[m]·P[m-1]) · sum_{v=1..m} P[v-1]·a[n+v]   for m >= 1

    The inner sum is maintained incrementally in m with Kahan
    compensation, one added term per row step.
    """
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    for n in range(width):
        out[0, n] = a[n]
    for m in range(1, m_hi + 1):
        coeff = p[m] / (P[m] * P[m - 1])
        w = P[m - 1]
        for n in range(width):
            inc = w * a[n + m]
            y = inc - acc_c[n]
            t = acc[n] + y
            acc_c[n] = (t - acc[n]) - y
            acc[n] = t
            out[m, n] = coeff * acc[n]
    return out


@njit(cache=True, nogil=True)
def unit_diff_table(a, m_hi, n_hi):
    """Unit-weight specialisation of diff_table, coefficients hard-coded:

    out[m, n] = a[n] for m = 0, else (1/(m(m+1))) · sum_{v=1..m} v·a[n+v].
    """
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    for n in range(width):
        out[0, n] = a[n]
    for m in range(1, m_hi + 1):
        coeff = 1.0 / (m * (m + 1.0))
        w = float(m)
        for n in range(width):
            inc = w * a[n + m]
            y = inc - acc_c[n]
            t = acc[n] + y
            acc_c[n] = (t - acc[n]) - y
            acc[n] = t
            out[m, n] = coeff * acc[n]
    return out


@njit(cache=True, nogil=True)
def mean_table(s, P, p, m_hi, n_hi):
    """Table of weighted sliding means of the partial sums s.

    out[m, n] = (1/P[m]) · sum_{v=0..m} p[v]·s[n+v]
    """
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    for m in range(m_hi + 1):
        w = p[m]
        pm = P[m]
        for n in range(width):
            inc = w * s[n + m]
            y = inc - acc_c[n]
            t = acc[n] + y
            acc_c[n] = (t - acc[n]) - y
            acc[n] = t
            out[m, n] = acc[n] / pm
    return out


@njit(cache=True, nogil=True)
def power_scan(a, P, p, u_pow, k, m_hi, n_hi, cuts):
    """Per-shift powered totals of the difference table, plus cut snapshots.

    totals[n]       = sum_{m=0..m_hi} u_pow[m] · |F(m,n)|^k
    prefixes[c, n]  = sum_{m < cuts[c]} of the same terms

    cuts must be strictly increasing, within [0, m_hi + 1].  Tails at a
    cut M are totals - prefixes, computed by the caller.
    """
    width = n_hi + 1
    ncuts = cuts.shape[0]
    tot = np.zeros(width)
    tot_c = np.zeros(width)
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    prefixes = np.zeros((ncuts, width))
    ci = 0
    for m in range(m_hi + 1):
        while ci < ncuts and cuts[ci] == m:
            for n in range(width):
                prefixes[ci, n] = tot[n]
            ci += 1
        if m == 0:
            for n in range(width):
                term = u_pow[0] * abs(a[n]) ** k
                y = term - tot_c[n]
                t = tot[n] + y
                tot_c[n] = (t - tot[n]) - y
                tot[n] = t
        else:
            coeff = p[m] / (P[m] * P[m - 1])
            w = P[m - 1]
            for n in range(width):
                inc = w * a[n + m]
                y = inc - acc_c[n]
                t = acc[n] + y
                acc_c[n] = (t - acc[n]) - y
                acc[n] = t
                term = u_pow[m] * abs(coeff * acc[n]) ** k
                y2 = term - tot_c[n]
                t2 = tot[n] + y2
                tot_c[n] = (t2 - tot[n]) - y2
                tot[n] = t2
    while ci < ncuts:
        for n in range(width):
            prefixes[ci, n] = tot[n]
        ci += 1
    return tot, prefixes


@njit(cache=True, nogil=True)
def unit_power_scan(a, k, m_hi, n_hi, cuts):
    """Unit-weight specialisation of power_scan (no factor sequence)."""
    width = n_hi + 1
    ncuts = cuts.shape[0]
    tot = np.zeros(width)
    tot_c = np.zeros(width)
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    prefixes = np.zeros((ncuts, width))
    ci = 0
    for m in range(m_hi + 1):
        while ci < ncuts and cuts[ci] == m:
            for n in range(width):
                prefixes[ci, n] = tot[n]
            ci += 1
        if m == 0:
            for n in range(width):
                term = 1.0 * abs(a[n]) ** k
                y = term - tot_c[n]
                t = tot[n] + y
                tot_c[n] = (t - tot[n]) - y
                tot[n] = t
        else:
            coeff = 1.0 / (m * (m + 1.0))
            w = float(m)
            for n in range(width):
                inc = w * a[n + m]
                y = inc - acc_c[n]
                t = acc[n] + y
                acc_c[n] = (t - acc[n]) - y
                acc[n] = t
                term = 1.0 * abs(coeff * acc[n]) ** k
                y2 = term - tot_c[n]
                t2 = tot[n] + y2
                tot_c[n] = (t2 - tot[n]) - y2
                tot[n] = t2
    while ci < ncuts:
        for n in range(width):
            prefixes[ci, n] = tot[n]
        ci += 1
    return tot, prefixes
