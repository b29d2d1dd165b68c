"""Pure-numpy fallback kernels.

Same arithmetic as ``_scan_numba``, vectorised across the shift lanes n
(which are mutually independent) with a Python loop over m.  Kahan
compensation is preserved per lane.
"""

import numpy as np


def kahan_cumsum(x):
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    xs = x.tolist()
    for i, v in enumerate(xs):
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


def diff_table(a, P, p, m_hi, n_hi):
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    out[0, :] = a[:width]
    for m in range(1, m_hi + 1):
        coeff = p[m] / (P[m] * P[m - 1])
        inc = P[m - 1] * a[m:m + width]
        y = inc - acc_c
        t = acc + y
        acc_c = (t - acc) - y
        acc = t
        out[m, :] = coeff * acc
    return out


def unit_diff_table(a, m_hi, n_hi):
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    out[0, :] = a[:width]
    for m in range(1, m_hi + 1):
        coeff = 1.0 / (m * (m + 1.0))
        inc = float(m) * a[m:m + width]
        y = inc - acc_c
        t = acc + y
        acc_c = (t - acc) - y
        acc = t
        out[m, :] = coeff * acc
    return out


def mean_table(s, P, p, m_hi, n_hi):
    width = n_hi + 1
    out = np.empty((m_hi + 1, width))
    acc = np.zeros(width)
    acc_c = np.zeros(width)
    for m in range(m_hi + 1):
        inc = p[m] * s[m:m + width]
        y = inc - acc_c
        t = acc + y
        acc_c = (t - acc) - y
        acc = t
        out[m, :] = acc / P[m]
    return out


def power_scan(a, P, p, u_pow, k, m_hi, n_hi, cuts):
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
            prefixes[ci, :] = tot
            ci += 1
        if m == 0:
            term = u_pow[0] * np.abs(a[:width]) ** k
        else:
            coeff = p[m] / (P[m] * P[m - 1])
            inc = P[m - 1] * a[m:m + width]
            y = inc - acc_c
            t = acc + y
            acc_c = (t - acc) - y
            acc = t
            term = u_pow[m] * np.abs(coeff * acc) ** k
        y2 = term - tot_c
        t2 = tot + y2
        tot_c = (t2 - tot) - y2
        tot = t2
    while ci < ncuts:
        prefixes[ci, :] = tot
        ci += 1
    return tot, prefixes


def unit_power_scan(a, k, m_hi, n_hi, cuts):
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
            prefixes[ci, :] = tot
            ci += 1
        if m == 0:
            term = 1.0 * np.abs(a[:width]) ** k
        else:
            coeff = 1.0 / (m * (m + 1.0))
            inc = float(m) * a[m:m + width]
            y = inc - acc_c
            t = acc + y
            acc_c = (t - acc) - y
            acc = t
            term = 1.0 * np.abs(coeff * acc) ** k
        y2 = term - tot_c
        t2 = tot + y2
        tot_c = (t2 - tot) - y2
        tot = t2
    while ci < ncuts:
        prefixes[ci, :] = tot
        ci += 1
    return tot, prefixes
