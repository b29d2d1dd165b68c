"""Weighted sliding means of partial sums and their first differences.

The central object is the difference kernel

    F(m, n) = a_n                                          for m = 0
            = p_m/(P_m P_{m-1}) * sum_{v=1..m} P_{v-1} a_{n+v}   for m >= 1

which equals T(m, n) - T(m-1, n), the first difference in m of the
weighted sliding mean T(m, n) = (1/P_m) sum_{v=0..m} p_v s_{n+v} of the
partial sums, with T(-1, n) = s_{n-1}.  Under unit weights it reduces to
the classical kernel (1/(m(m+1))) sum_{v=1..m} v a_{n+v}.

Tables store raw difference values; powered factor scaling is applied
downstream so one table serves multiple experiments.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError
from .kernels import (as_f64, diff_table_chunked, mean_table,
                      unit_diff_table)
from .seqcore import SeriesView, TruncWindow, WeightSeq

DEFAULT_CELL_BUDGET = 50_000_000

# test-only hook: multiplies the second recovery coefficient by (1 + eps)
_PERTURB_ENV = "ABSUM_TEST_PERTURB_RECOVERY"


@dataclass(frozen=True)
class TransformTable:
    """Difference-kernel values over an (m, n) window."""

    values: np.ndarray  # shape (m_max + 1, n_max + 1)
    p: WeightSeq
    window: TruncWindow
    series_spec: dict

    def __post_init__(self):
        self.values.setflags(write=False)


def weighted_mean(a: SeriesView, w: WeightSeq, m: int, n: int) -> float:
    """T(m, n): weighted sliding mean of partial sums; T(-1, n) = s_{n-1}."""
    if m < -1 or n < 0:
        raise BudgetError(f"weighted_mean needs m >= -1, n >= 0; got ({m}, {n})")
    if m == -1:
        return a.partial_sum(n - 1)
    s = a.partials(n + m)
    p = w.terms(m)
    acc = 0.0
    c = 0.0
    for v in range(m + 1):
        inc = p[v] * s[n + v]
        y = inc - c
        t = acc + y
        c = (t - acc) - y
        acc = t
    return acc / w.cumulative(m)


def mean_difference(a: SeriesView, w: WeightSeq, m: int, n: int) -> float:
    """F(m, n), evaluated cell-wise.

    Bitwise-identical to the corresponding fill_table cell: same Kahan
    accumulation over v = 1..m, same coefficient arithmetic.
    """
    if m < 0 or n < 0:
        raise BudgetError(f"mean_difference needs m, n >= 0; got ({m}, {n})")
    if m == 0:
        return a.term(n)
    terms = a.terms(n + m)
    P = w.cumulative_array(m)
    acc = 0.0
    c = 0.0
    for v in range(1, m + 1):
        inc = P[v - 1] * terms[n + v]
        y = inc - c
        t = acc + y
        c = (t - acc) - y
        acc = t
    coeff = w.term(m) / (P[m] * P[m - 1])
    return coeff * acc


def unit_mean_difference(a: SeriesView, m: int, n: int) -> float:
    """The classical unit-weight kernel (1/(m(m+1))) sum v a_{n+v}.

    Dedicated code path; agrees bitwise with mean_difference under unit
    weights because the per-term arithmetic coincides.
    """
    if m < 0 or n < 0:
        raise BudgetError(f"unit_mean_difference needs m, n >= 0; got ({m}, {n})")
    if m == 0:
        return a.term(n)
    terms = a.terms(n + m)
    acc = 0.0
    c = 0.0
    for v in range(1, m + 1):
        inc = float(v) * terms[n + v]
        y = inc - c
        t = acc + y
        c = (t - acc) - y
        acc = t
    return (1.0 / (m * (m + 1.0))) * acc


def fill_table(a: SeriesView, p: WeightSeq, window: TruncWindow,
               threads: int = 1,
               cell_budget: int = DEFAULT_CELL_BUDGET) -> TransformTable:
    """Difference-kernel table over the window, O(m_max * n_max) fill."""
    if window.cells() > cell_budget:
        raise BudgetError(
            f"table window of {window.cells()} cells exceeds the "
            f"budget of {cell_budget}"
        )
    m_hi, n_hi = window.m_max, window.n_max
    terms = as_f64(a.terms(n_hi + m_hi))
    pv = as_f64(p.terms(m_hi))
    P = as_f64(p.cumulative_array(m_hi))
    values = diff_table_chunked(terms, P, pv, m_hi, n_hi, threads=threads)
    return TransformTable(values=values, p=p, window=window,
                          series_spec=a.spec())


def fill_unit_table(a: SeriesView, window: TruncWindow,
                    cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """Classical-kernel table (dedicated unit-weight path)."""
    if window.cells() > cell_budget:
        raise BudgetError(
            f"table window of {window.cells()} cells exceeds the "
            f"budget of {cell_budget}"
        )
    m_hi, n_hi = window.m_max, window.n_max
    terms = as_f64(a.terms(n_hi + m_hi))
    return unit_diff_table(terms, m_hi, n_hi)


def sliding_mean_table(a: SeriesView, w: WeightSeq,
                       window: TruncWindow) -> np.ndarray:
    """Table of T(m, n) for 0 <= m <= m_max, 0 <= n <= n_max."""
    m_hi, n_hi = window.m_max, window.n_max
    s = as_f64(a.partials(n_hi + m_hi))
    pv = as_f64(w.terms(m_hi))
    P = as_f64(w.cumulative_array(m_hi))
    return mean_table(s, P, pv, m_hi, n_hi)


def sliding_mean_prev_row(a: SeriesView, window: TruncWindow) -> np.ndarray:
    """T(-1, n) = s_{n-1} for n over the window (s_{-1} = 0)."""
    out = np.empty(window.n_max + 1)
    out[0] = 0.0
    if window.n_max >= 1:
        out[1:] = a.partials(window.n_max - 1)
    return out


def _recovery_perturbation() -> float:
    raw = os.environ.get(_PERTURB_ENV)
    if not raw:
        return 0.0
    return float(raw)


def recover_term(table: TransformTable, p: WeightSeq, m: int, n: int) -> float:
    """Reconstruct a_{m+n} from two adjacent difference cells.

    a_{m+n} = (P_m/p_m) F(m, n) - (P_{m-2}/p_{m-1}) F(m-1, n), m >= 1;
    for m = 1 the second coefficient is forced to zero by P_{-1} = 0
    rather than dividing a vanishing numerator.
    """
    if m < 1:
        raise BudgetError("recover_term needs m >= 1")
    if m > table.window.m_max or n < 0 or n > table.window.n_max:
        raise BudgetError(
            f"recover_term index ({m}, {n}) outside table window "
            f"({table.window.m_max}, {table.window.n_max})"
        )
    c1 = p.cumulative(m) / p.term(m)
    c2 = 0.0 if m == 1 else p.cumulative(m - 2) / p.term(m - 1)
    eps = _recovery_perturbation()
    if eps:
        c2 *= 1.0 + eps
    return c1 * table.values[m, n] - c2 * table.values[m - 1, n]


def write_table_csv(table: TransformTable, path) -> None:
    """CSV export: header row of n-indices, one row per m, 17 significant
    digits per value."""
    vals = table.values
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("m," + ",".join(str(n) for n in range(vals.shape[1])) + "\n")
        for m in range(vals.shape[0]):
            row = ",".join(format(x, ".17g") for x in vals[m])
            fh.write(f"{m},{row}\n")
