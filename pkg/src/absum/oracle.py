"""Naive, obviously-correct reference implementations for tests.

Everything here is a literal evaluation of a defining sum: plain
sequential Python summation (no compensation, no incremental
accumulators, no caching of intermediate transforms), or exhaustive
subset enumeration.  Agreement between these and the fast paths within
1e-10 therefore also bounds the fast paths' compensation bookkeeping:
two independent error models concurring is the point.

Every call declares and respects a budget; these are test-only tools
and performance is explicitly a non-goal.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OracleBudgetError


@dataclass(frozen=True)
class OracleBudget:
    max_cells: int = 5_000_000
    max_subsets: int = 1 << 21
    max_terms: int = 20_000_000

    def need_cells(self, n: int):
        if n > self.max_cells:
            raise OracleBudgetError(f"oracle needs {n} cells, budget {self.max_cells}")

    def need_subsets(self, n: int):
        if n > self.max_subsets:
            raise OracleBudgetError(f"oracle needs {n} subsets, budget {self.max_subsets}")

    def need_terms(self, n: int):
        if n > self.max_terms:
            raise OracleBudgetError(f"oracle needs {n} terms, budget {self.max_terms}")


DEFAULT_BUDGET = OracleBudget()


def _plain_weight_prefix(w, hi: int) -> list[float]:
    """P[0..hi] by plain sequential summation of fresh weight reads."""
    out = []
    s = 0.0
    for i in range(hi + 1):
        s += float(w.term(i))
        out.append(s)
    return out


def naive_mean_difference(a, p, m: int, n: int,
                          budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Literal difference-kernel cell: fresh inner loop, plain summation."""
    budget.need_cells(m + 1)
    if m == 0:
        return float(a.term(n))
    P = _plain_weight_prefix(p, m)
    s = 0.0
    for v in range(1, m + 1):
        s += P[v - 1] * float(a.term(n + v))
    return float(p.term(m)) / (P[m] * P[m - 1]) * s


def naive_unit_difference(a, m: int, n: int,
                          budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Literal classical kernel: (1/(m(m+1))) sum_{v=1..m} v a_{n+v}."""
    budget.need_cells(m + 1)
    if m == 0:
        return float(a.term(n))
    s = 0.0
    for v in range(1, m + 1):
        s += v * float(a.term(n + v))
    return s / (m * (m + 1.0))


def naive_column_coeff(A, p, m: int, n: int, j: int,
                       budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Literal matrix-column coefficient, same shape as the series kernel."""
    budget.need_cells(m + 1)
    if m == 0:
        return float(A.entry(n, j))
    P = _plain_weight_prefix(p, m)
    s = 0.0
    for v in range(1, m + 1):
        s += P[v - 1] * float(A.entry(n + v, j))
    return float(p.term(m)) / (P[m] * P[m - 1]) * s


def naive_apply(A, x, n: int, j_max: int,
                budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Literal row-image sum_{v=0..j_max} a_{nv} x_v."""
    budget.need_terms(j_max + 1)
    s = 0.0
    for v in range(j_max + 1):
        s += float(A.entry(n, v)) * float(x.term(v))
    return s


def naive_series_power_terms(a, p, u, k: float, n: int, m_max: int,
                             budget: OracleBudget = DEFAULT_BUDGET) -> list[float]:
    """Per-index powered terms u_m^{k-1} |F(m, n)|^k, literal cell sums.

    Tests build totals, tails, and sups from this list independently of
    the fast scan.
    """
    budget.need_cells((m_max + 1) * (m_max + 2) // 2)
    out = []
    for m in range(m_max + 1):
        f = naive_mean_difference(a, p, m, n, budget=budget)
        out.append(float(u.term(m)) ** (k - 1.0) * abs(f) ** k)
    return out


def naive_norm(a, mp, window,
               budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Literal truncated norm: n outer, m middle, fresh defining sum per
    cell, sup over n of the powered total, then the 1/k root."""
    n_max, m_max = window.n_max, window.m_max
    budget.need_cells((n_max + 1) * (m_max + 1) * (m_max + 2) // 2)
    sup = 0.0
    for n in range(n_max + 1):
        tot = 0.0
        for m in range(m_max + 1):
            f = naive_mean_difference(a, mp.p, m, n, budget=budget)
            tot += float(mp.u.term(m)) ** (mp.k - 1.0) * abs(f) ** mp.k
        sup = max(sup, tot)
    return sup ** (1.0 / mp.k)


def naive_rowsum_terms(A, p, u, k: float, n: int, m_max: int, j_max: int,
                       budget: OracleBudget = DEFAULT_BUDGET):
    """Literal row aggregates over columns j <= j_max.

    Returns (abs_terms, sum_terms) where

        abs_terms[m] = u_m^{k-1} (sum_j |b(m,n,j)|)^k
        sum_terms[m] = u_m^{k-1} |sum_j b(m,n,j)|^k
    """
    budget.need_cells((m_max + 1) * (m_max + 2) // 2 * (j_max + 1))
    abs_terms = []
    sum_terms = []
    for m in range(m_max + 1):
        row_abs = 0.0
        row_sum = 0.0
        for j in range(j_max + 1):
            b = naive_column_coeff(A, p, m, n, j, budget=budget)
            row_abs += abs(b)
            row_sum += b
        upow = float(u.term(m)) ** (k - 1.0)
        abs_terms.append(upow * row_abs ** k)
        sum_terms.append(upow * abs(row_sum) ** k)
    return abs_terms, sum_terms


def enumerate_subset_functional(block, exponents,
                                budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """Exact max over all row subsets N of sum_v |sum_{n in N} a_nv|^{p_v}.

    Bitmask enumeration of all 2^rows subsets; rows are capped by the
    budget (the empty subset contributes 0, so the result is never
    negative).
    """
    rows = len(block)
    cols = len(block[0]) if rows else 0
    budget.need_subsets(1 << rows)
    best = 0.0
    for mask in range(1 << rows):
        total = 0.0
        for v in range(cols):
            s = 0.0
            mm = mask
            i = 0
            while mm:
                if mm & 1:
                    s += float(block[i][v])
                i += 1
                mm >>= 1
            total += abs(s) ** float(exponents[v])
        if total > best:
            best = total
    return best
