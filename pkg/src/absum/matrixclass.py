"""Infinite-matrix abstraction, column-coefficient transforms, the
summability-class condition checkers, and the block functionals with
their exact subset-enumeration counterpart.

A matrix column, read down the shift direction, obeys the same
difference recurrence as a series, so the column checks reuse the scan
kernels verbatim.  Verdict policy mirrors the series diagnostics: FAIL
needs growth by >= 1.5 per doubling across three window enlargements,
PASS_AT_SCALE needs the documented tail/stability criterion, anything
else is INCONCLUSIVE.  Truncated inner column sums are monitored for
tail stability; an unstable cut forces INCONCLUSIVE.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, FamilyError
from .kernels import (as_f64, diff_table, power_scan, unit_diff_table,
                      unit_power_scan)
from .seqcore import SeriesView, TruncWindow, WeightSeq
from .summability import (FAIL, INCONCLUSIVE, PASS_AT_SCALE, ZERO_FLOOR,
                          _growth_verdict, tail_cut_points)
from .transform import DEFAULT_CELL_BUDGET

STABLE_FACTOR = 1.10   # max tolerated sup growth per doubling for PASS
ENUM_ROW_CAP = 20      # exact subset enumeration is exponential in rows

# wire ids used in serialized condition reports
COND_COLUMN_TAILS = "3.1"
COND_COLUMN_SUP = "3.2"
COND_ROWSUM_SUP = "3.6"
COND_ROWSUM_TAILS = "3.7"
COND_COLUMN_TAILS_C = "3.8"

_CONDITION_NAMES = {
    COND_COLUMN_TAILS: "column_tail_uniform",
    COND_COLUMN_SUP: "column_sup",
    COND_ROWSUM_SUP: "rowsum_sup",
    COND_ROWSUM_TAILS: "rowsum_tail_uniform",
    COND_COLUMN_TAILS_C: "column_tail_uniform",
}


# ---------------------------------------------------------------------------
# Matrix abstraction
# ---------------------------------------------------------------------------

class InfMatrix:
    """Infinite matrix with per-entry access and declared structure.

    Out-of-range entries of finite (dense) matrices are 0 by convention;
    entry access is deterministic for every kind.
    """

    KINDS = ("identity", "diagonal", "cesaro_c1", "banded", "dense", "zero")

    def __init__(self, kind: str, **params):
        if kind not in self.KINDS:
            raise FamilyError(f"unknown matrix kind {kind!r}")
        self.kind = kind
        self.params = dict(params)
        if kind == "diagonal":
            ent = self.params.get("entries")
            if isinstance(ent, dict):
                self._diag = SeriesView.from_spec(ent)
            elif isinstance(ent, (list, tuple)):
                self._diag = SeriesView.explicit(ent)
            else:
                raise FamilyError("diagonal matrix needs 'entries'")
        elif kind == "banded":
            band = int(self.params.get("band", -1))
            coeffs = self.params.get("coeffs")
            if band < 0 or coeffs is None or len(coeffs) != 2 * band + 1:
                raise FamilyError(
                    "banded matrix needs band >= 0 and 2*band+1 coeffs"
                )
            self.params["band"] = band
            self.params["coeffs"] = [float(c) for c in coeffs]
        elif kind == "dense":
            rows = self.params.get("rows")
            arr = np.asarray(rows, dtype=np.float64)
            if arr.ndim != 2 or arr.size == 0:
                raise FamilyError("dense matrix needs a non-empty 2-d row list")
            if not np.all(np.isfinite(arr)):
                raise FamilyError("dense matrix entries must be finite")
            arr.setflags(write=False)
            self._dense = arr
            self.params["rows"] = [[float(x) for x in row] for row in arr]

    # -- constructors --------------------------------------------------

    @classmethod
    def identity(cls) -> "InfMatrix":
        return cls("identity")

    @classmethod
    def zero(cls) -> "InfMatrix":
        return cls("zero")

    @classmethod
    def diagonal(cls, entries) -> "InfMatrix":
        if isinstance(entries, SeriesView):
            entries = entries.spec()
        return cls("diagonal", entries=entries)

    @classmethod
    def cesaro_c1(cls) -> "InfMatrix":
        return cls("cesaro_c1")

    @classmethod
    def banded(cls, band: int, coeffs) -> "InfMatrix":
        return cls("banded", band=band, coeffs=list(coeffs))

    @classmethod
    def dense(cls, rows) -> "InfMatrix":
        return cls("dense", rows=[list(r) for r in rows])

    # -- access ----------------------------------------------------------

    def entry(self, n: int, j: int) -> float:
        if n < 0 or j < 0:
            return 0.0
        if self.kind == "identity":
            return 1.0 if n == j else 0.0
        if self.kind == "zero":
            return 0.0
        if self.kind == "diagonal":
            return self._diag.term(n) if n == j else 0.0
        if self.kind == "cesaro_c1":
            return 1.0 / (n + 1.0) if j <= n else 0.0
        if self.kind == "banded":
            off = j - n
            band = self.params["band"]
            if -band <= off <= band:
                return self.params["coeffs"][off + band]
            return 0.0
        rows, cols = self._dense.shape
        if n < rows and j < cols:
            return float(self._dense[n, j])
        return 0.0

    def column(self, j: int, n_hi: int) -> np.ndarray:
        """Column j over rows 0..n_hi as a dense vector."""
        out = np.zeros(n_hi + 1)
        if j < 0:
            return out
        if self.kind == "identity":
            if j <= n_hi:
                out[j] = 1.0
        elif self.kind == "zero":
            pass
        elif self.kind == "diagonal":
            if j <= n_hi:
                out[j] = self._diag.term(j)
        elif self.kind == "cesaro_c1":
            if j <= n_hi:
                ns = np.arange(j, n_hi + 1, dtype=np.float64)
                out[j:] = 1.0 / (ns + 1.0)
        elif self.kind == "banded":
            band = self.params["band"]
            coeffs = self.params["coeffs"]
            lo = max(j - band, 0)
            hi = min(j + band, n_hi)
            for n in range(lo, hi + 1):
                out[n] = coeffs[j - n + band]
        else:
            rows, cols = self._dense.shape
            if j < cols:
                upto = min(rows, n_hi + 1)
                out[:upto] = self._dense[:upto, j]
        return out

    def row(self, n: int, j_hi: int) -> np.ndarray:
        """Row n over columns 0..j_hi as a dense vector."""
        out = np.zeros(j_hi + 1)
        if n < 0:
            return out
        if self.kind == "identity":
            if n <= j_hi:
                out[n] = 1.0
        elif self.kind == "zero":
            pass
        elif self.kind == "diagonal":
            if n <= j_hi:
                out[n] = self._diag.term(n)
        elif self.kind == "cesaro_c1":
            upto = min(n, j_hi)
            out[: upto + 1] = 1.0 / (n + 1.0)
        elif self.kind == "banded":
            band = self.params["band"]
            coeffs = self.params["coeffs"]
            lo = max(n - band, 0)
            hi = min(n + band, j_hi)
            for j in range(lo, hi + 1):
                out[j] = coeffs[j - n + band]
        else:
            rows, cols = self._dense.shape
            if n < rows:
                upto = min(cols, j_hi + 1)
                out[:upto] = self._dense[n, :upto]
        return out

    def block(self, n_hi: int, j_hi: int) -> np.ndarray:
        return np.stack([self.row(n, j_hi) for n in range(n_hi + 1)])

    def spec(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_spec(cls, spec: dict) -> "InfMatrix":
        if not isinstance(spec, dict) or "kind" not in spec:
            raise FamilyError("matrix spec must be a dict with a 'kind'")
        d = dict(spec)
        kind = d.pop("kind")
        return cls(kind, **d)

    def __repr__(self):
        return f"InfMatrix(kind={self.kind!r})"


# ---------------------------------------------------------------------------
# Column coefficients and matrix application
# ---------------------------------------------------------------------------

def apply_matrix(A: InfMatrix, x: SeriesView, n: int, j_max: int,
                 tail_waiver: bool = False) -> float:
    """Row image sum_{v=0..j_max} a_{nv} x_v.

    Exact (no truncation error) when x is finitely supported within
    j_max; otherwise the caller must supply a tail-bound waiver
    acknowledging the cut at j_max.
    """
    if x.support_bound is None and not tail_waiver:
        raise FamilyError(
            "apply_matrix needs a finitely supported series or an explicit "
            "tail-bound waiver"
        )
    if x.support_bound is not None and x.support_bound > j_max and not tail_waiver:
        raise FamilyError(
            f"series support extends to {x.support_bound}, beyond j_max="
            f"{j_max}; supply a tail-bound waiver to truncate"
        )
    row = A.row(n, j_max)
    return float(np.dot(row, x.terms(j_max)))


def image_series(A: InfMatrix, x: SeriesView, n_hi: int, j_max: int,
                 tail_waiver: bool = False) -> SeriesView:
    """The transform image (A x)_n for n = 0..n_hi, as an explicit series."""
    vals = [apply_matrix(A, x, n, j_max, tail_waiver=tail_waiver)
            for n in range(n_hi + 1)]
    return SeriesView.explicit(vals)


def column_coeff(A: InfMatrix, p: WeightSeq, m: int, n: int, j: int) -> float:
    """Difference coefficient of column j:

    b(m, n, j) = a_{nj} for m = 0, else
                 p_m/(P_m P_{m-1}) sum_{v=1..m} P_{v-1} a_{n+v, j}.
    """
    if m < 0 or n < 0 or j < 0:
        raise BudgetError("column_coeff needs m, n, j >= 0")
    if m == 0:
        return A.entry(n, j)
    P = p.cumulative_array(m)
    acc = 0.0
    c = 0.0
    for v in range(1, m + 1):
        inc = P[v - 1] * A.entry(n + v, j)
        y = inc - c
        t = acc + y
        c = (t - acc) - y
        acc = t
    return (p.term(m) / (P[m] * P[m - 1])) * acc


@dataclass(frozen=True)
class BTable:
    """Column-coefficient values over an (m, n, j) window."""

    values: np.ndarray  # (m_max+1, n_max+1, j_max+1)
    p: WeightSeq
    window: TruncWindow

    def __post_init__(self):
        self.values.setflags(write=False)


def fill_b_table(A: InfMatrix, p: WeightSeq, window: TruncWindow,
                 threads: int = 1,
                 cell_budget: int = DEFAULT_CELL_BUDGET) -> BTable:
    """b(m, n, j) over the window, filled column by column with the
    incremental scan; b(0, n, j) = a_{nj}."""
    m_hi, n_hi, j_hi = window.m_max, window.n_max, window.j_max
    if (m_hi + 1) * (n_hi + 1) * (j_hi + 1) > cell_budget:
        raise BudgetError("b-table window exceeds the cell budget")
    pv = as_f64(p.terms(m_hi))
    P = as_f64(p.cumulative_array(m_hi))

    def job(j):
        col = as_f64(A.column(j, n_hi + m_hi))
        return diff_table(col, P, pv, m_hi, n_hi)

    tables = _map_ordered(job, range(j_hi + 1), threads)
    return BTable(values=np.stack(tables, axis=2), p=p, window=window)


def _map_ordered(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Condition reports
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    condition: str
    verdict: str
    sup_value: float
    witness: dict
    scale_values: list[float]
    cut_points: list[int] = field(default_factory=list)
    tail_sup: list[float] = field(default_factory=list)
    j_tail_share: float | None = None
    notes: list[str] = field(default_factory=list)

    def to_report(self) -> dict:
        return {
            "condition": self.condition,
            "name": _CONDITION_NAMES[self.condition],
            "verdict": self.verdict,
            "sup_value": self.sup_value,
            "witness": dict(self.witness),
            "scale_values": [float(v) for v in self.scale_values],
            "cut_points": list(self.cut_points),
            "tail_sup": [float(v) for v in self.tail_sup],
            "j_tail_share": self.j_tail_share,
            "notes": list(self.notes),
        }


def _u_pow(u: WeightSeq, k: float, m_hi: int) -> np.ndarray:
    return as_f64(u.terms(m_hi)) ** (k - 1.0)


def _column_scan(A, p, u, k, j, m_hi, n_hi, cuts, classical):
    col = as_f64(A.column(j, n_hi + m_hi))
    with np.errstate(over="ignore", invalid="ignore"):
        if classical:
            return unit_power_scan(col, k, m_hi, n_hi, cuts)
        pv = as_f64(p.terms(m_hi))
        P = as_f64(p.cumulative_array(m_hi))
        return power_scan(col, P, pv, _u_pow(u, k, m_hi), k, m_hi, n_hi, cuts)


def check_column_tails(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
                       window: TruncWindow, threads: int = 1,
                       classical: bool = False,
                       condition: str = COND_COLUMN_TAILS) -> ConditionReport:
    """Tail decay of the powered column-coefficient series, uniform over
    the sampled n-window, for every column j <= j_max."""
    m_base, n_hi, j_hi = window.m_max, window.n_max, window.j_max
    cuts = tail_cut_points(m_base)
    scan_cuts = sorted(set(cuts) | {m_base + 1, 2 * m_base + 1})
    cut_arr = np.asarray(scan_cuts, dtype=np.int64)
    pos = {c: i for i, c in enumerate(scan_cuts)}

    def job(j):
        totals4, prefixes = _column_scan(A, p, u, k, j, 4 * m_base, n_hi,
                                         cut_arr, classical)
        base = prefixes[pos[m_base + 1]]
        tails = np.maximum(base[None, :] - prefixes[[pos[c] for c in cuts]], 0.0)
        return (base, float(np.max(base)),
                float(np.max(prefixes[pos[2 * m_base + 1]])),
                float(np.max(totals4)), tails.max(axis=1))

    results = _map_ordered(job, range(j_hi + 1), threads)
    sup_value = -np.inf
    witness = {"n": 0, "j": 0}
    sups = [0.0, 0.0, 0.0]
    tail_worst = np.zeros(len(cuts))
    for j, (base, s1, s2, s3, tails) in enumerate(results):
        if s1 > sup_value:
            sup_value = s1
            witness = {"n": int(np.argmax(base)), "j": j}
        sups = [max(sups[0], s1), max(sups[1], s2), max(sups[2], s3)]
        tail_worst = np.maximum(tail_worst, tails)

    verdict = _growth_verdict(sups)
    notes = []
    if verdict is None:
        below = np.nonzero(tail_worst <= window.abs_tol)[0]
        if below.size:
            verdict = PASS_AT_SCALE
            notes.append(f"tail below abs_tol at cut {cuts[below[0]]}")
        else:
            verdict = INCONCLUSIVE
    return ConditionReport(
        condition=condition, verdict=verdict, sup_value=float(sup_value),
        witness=witness, scale_values=sups, cut_points=list(cuts),
        tail_sup=[float(t) for t in tail_worst], notes=notes,
    )


def check_column_sup(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
                     window: TruncWindow, threads: int = 1,
                     classical: bool = False) -> ConditionReport:
    """Sup over the (n, j) window of the powered column totals, with the
    growth trend across joint window doublings."""
    no_cuts = np.zeros(0, dtype=np.int64)
    sups = []
    witness = {"n": 0, "j": 0}
    base_sup = 0.0
    for i, w in enumerate((window, window.scaled(2), window.scaled(4))):
        def job(j, w=w):
            totals, _ = _column_scan(A, p, u, k, j, w.m_max, w.n_max,
                                     no_cuts, classical)
            return totals

        best = 0.0
        for j, totals in enumerate(_map_ordered(job, range(w.j_max + 1),
                                                threads)):
            s = float(np.max(totals))
            if s > best:
                best = s
                if i == 0:
                    witness = {"n": int(np.argmax(totals)), "j": j}
        sups.append(best)
        if i == 0:
            base_sup = best

    verdict = _sup_verdict(sups)
    return ConditionReport(
        condition=COND_COLUMN_SUP, verdict=verdict, sup_value=base_sup,
        witness=witness, scale_values=sups,
    )


def _sup_verdict(sups: list[float]) -> str:
    grown = _growth_verdict(sups)
    if grown is not None:
        return grown
    lo, hi = sups[1], sups[2]
    if hi <= ZERO_FLOOR and lo <= ZERO_FLOOR:
        return PASS_AT_SCALE
    if lo > ZERO_FLOOR and hi / lo <= STABLE_FACTOR:
        return PASS_AT_SCALE
    return INCONCLUSIVE


def _rowsum_pass(A, p, u, k, w, threads, classical, j_cut=None):
    """Row aggregates over columns j <= j_max for one window.

    Returns (terms_abs, terms_sum, terms_abs_head, terms_sum_head) where
    terms_abs[m, n] = u^{k-1} (sum_j |b|)^k and terms_sum uses the signed
    row sum; *_head restrict to j <= j_cut (None skips the head pass).
    """
    m_hi, n_hi, j_hi = w.m_max, w.n_max, w.j_max
    pv = as_f64(p.terms(m_hi)) if not classical else None
    P = as_f64(p.cumulative_array(m_hi)) if not classical else None

    def job(j):
        col = as_f64(A.column(j, n_hi + m_hi))
        if classical:
            return unit_diff_table(col, m_hi, n_hi)
        return diff_table(col, P, pv, m_hi, n_hi)

    rowabs = np.zeros((m_hi + 1, n_hi + 1))
    rowsum = np.zeros((m_hi + 1, n_hi + 1))
    rowabs_head = np.zeros((m_hi + 1, n_hi + 1)) if j_cut is not None else None
    rowsum_head = np.zeros((m_hi + 1, n_hi + 1)) if j_cut is not None else None
    for j, tab in enumerate(_map_ordered(job, range(j_hi + 1), threads)):
        np.add(rowabs, np.abs(tab), out=rowabs)
        np.add(rowsum, tab, out=rowsum)
        if j_cut is not None and j <= j_cut:
            np.add(rowabs_head, np.abs(tab), out=rowabs_head)
            np.add(rowsum_head, tab, out=rowsum_head)
    upow = _u_pow(u, k, m_hi)[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        terms_abs = upow * rowabs ** k
        terms_sum = upow * np.abs(rowsum) ** k
        if j_cut is not None:
            terms_abs_head = upow * rowabs_head ** k
            terms_sum_head = upow * np.abs(rowsum_head) ** k
        else:
            terms_abs_head = terms_sum_head = None
    return terms_abs, terms_sum, terms_abs_head, terms_sum_head


def _stability_share(full: float, head: float) -> float:
    if full <= ZERO_FLOOR:
        return 0.0
    return abs(full - head) / full


def check_rowsum_sup(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
                     window: TruncWindow, threads: int = 1,
                     classical: bool = False) -> ConditionReport:
    """Sup over n of sum_m u^{k-1} (sum_j |b(m,n,j)|)^k, with j-tail
    stability monitoring and the growth trend across window doublings."""
    j_cut = _head_cut(window.j_max)
    sups = []
    witness = {"n": 0}
    share = None
    for i, w in enumerate((window, window.scaled(2), window.scaled(4))):
        terms_abs, _, head_abs, _ = _rowsum_pass(
            A, p, u, k, w, threads, classical,
            j_cut=j_cut if i == 0 else None)
        totals = terms_abs.sum(axis=0)
        sups.append(float(np.max(totals)))
        if i == 0:
            witness = {"n": int(np.argmax(totals))}
            share = _stability_share(float(np.max(totals)),
                                     float(np.max(head_abs.sum(axis=0))))
    verdict = _sup_verdict(sups)
    notes = []
    if verdict == PASS_AT_SCALE and share is not None and share > window.rel_tol:
        verdict = INCONCLUSIVE
        notes.append(
            f"inner column sums unstable: last-decade share {share:.3e} "
            f"exceeds rel_tol"
        )
    return ConditionReport(
        condition=COND_ROWSUM_SUP, verdict=verdict, sup_value=sups[0],
        witness=witness, scale_values=sups, j_tail_share=share, notes=notes,
    )


def check_rowsum_tails(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
                       window: TruncWindow, threads: int = 1,
                       classical: bool = False) -> ConditionReport:
    """Tail decay, uniform over the n-window, of the powered signed
    row-sum series (the transform image of the all-ones sequence)."""
    j_cut = _head_cut(window.j_max)
    cuts = tail_cut_points(window.m_max)
    sups = []
    witness = {"n": 0}
    share = None
    tail_sup = None
    for i, w in enumerate((window, window.scaled(2), window.scaled(4))):
        _, terms_sum, _, head_sum = _rowsum_pass(
            A, p, u, k, w, threads, classical,
            j_cut=j_cut if i == 0 else None)
        totals = terms_sum.sum(axis=0)
        sups.append(float(np.max(totals)))
        if i == 0:
            witness = {"n": int(np.argmax(totals))}
            share = _stability_share(float(np.max(totals)),
                                     float(np.max(head_sum.sum(axis=0))))
            prefix = np.cumsum(terms_sum, axis=0)
            base_tot = prefix[-1]
            tails = []
            for c in cuts:
                pre = prefix[c - 1] if c >= 1 else np.zeros_like(base_tot)
                tails.append(float(np.max(np.maximum(base_tot - pre, 0.0))))
            tail_sup = tails
    verdict = _growth_verdict(sups)
    notes = []
    if verdict is None:
        hit = [i for i, t in enumerate(tail_sup) if t <= window.abs_tol]
        if hit and (share is None or share <= window.rel_tol):
            verdict = PASS_AT_SCALE
            notes.append(f"tail below abs_tol at cut {cuts[hit[0]]}")
        else:
            verdict = INCONCLUSIVE
            if hit:
                notes.append(
                    f"inner column sums unstable: last-decade share "
                    f"{share:.3e} exceeds rel_tol"
                )
    return ConditionReport(
        condition=COND_ROWSUM_TAILS, verdict=verdict, sup_value=sups[0],
        witness=witness, scale_values=sups, cut_points=list(cuts),
        tail_sup=tail_sup, j_tail_share=share, notes=notes,
    )


def _head_cut(j_max: int) -> int:
    """Stability boundary for the inner column sums: columns past this
    index form the final tenth of the included range; if they still
    carry weight relative to rel_tol, the cut at j_max is suspect."""
    return max((9 * j_max) // 10, 1)


def reproduce_verdict(rep: ConditionReport, window: TruncWindow) -> str:
    """Re-derive a condition verdict from its stored evidence alone."""
    grown = _growth_verdict(rep.scale_values)
    if grown is not None:
        return grown
    unstable = (rep.j_tail_share is not None
                and rep.j_tail_share > window.rel_tol)
    if rep.condition in (COND_COLUMN_SUP, COND_ROWSUM_SUP):
        v = _sup_verdict(rep.scale_values)
        return INCONCLUSIVE if (v == PASS_AT_SCALE and unstable) else v
    if rep.tail_sup and min(rep.tail_sup) <= window.abs_tol and not unstable:
        return PASS_AT_SCALE
    return INCONCLUSIVE


# ---------------------------------------------------------------------------
# Classifiers
# ---------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    target: str                   # "l1" or "c"
    verdict: str
    conditions: list[ConditionReport]

    def to_report(self) -> dict:
        return {
            "target": self.target,
            "verdict": self.verdict,
            "conditions": [c.to_report() for c in self.conditions],
        }


def _combine(verdicts: list[str]) -> str:
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS_AT_SCALE


def classify_l1(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
                window: TruncWindow, threads: int = 1,
                classical: bool = False) -> ClassificationReport:
    """Mapping of absolutely summable sequences into the weighted space:
    conjunction of the column-tail and column-sup conditions."""
    r1 = check_column_tails(A, p, u, k, window, threads, classical)
    r2 = check_column_sup(A, p, u, k, window, threads, classical)
    return ClassificationReport(
        target="l1", verdict=_combine([r1.verdict, r2.verdict]),
        conditions=[r1, r2],
    )


def classify_c(A: InfMatrix, p: WeightSeq, u: WeightSeq, k: float,
               window: TruncWindow, threads: int = 1,
               classical: bool = False) -> ClassificationReport:
    """Mapping of convergent sequences into the weighted space:
    conjunction of the row-sum sup, row-sum tail, and column-tail
    conditions."""
    r1 = check_rowsum_sup(A, p, u, k, window, threads, classical)
    r2 = check_rowsum_tails(A, p, u, k, window, threads, classical)
    r3 = check_column_tails(A, p, u, k, window, threads, classical,
                            condition=COND_COLUMN_TAILS_C)
    return ClassificationReport(
        target="c", verdict=_combine([r1.verdict, r2.verdict, r3.verdict]),
        conditions=[r1, r2, r3],
    )


# ---------------------------------------------------------------------------
# Block functionals and the sandwich check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaParams:
    """Bounded positive exponent sequence with its sup H and the constant
    C = max(1, 2^(H-1))."""

    exponents: tuple[float, ...]
    H: float
    C: float

    @classmethod
    def from_exponents(cls, values) -> "LemmaParams":
        vals = tuple(float(v) for v in values)
        if not vals or any(v <= 0 or not np.isfinite(v) for v in vals):
            raise FamilyError("exponents must be finite and positive")
        H = max(vals)
        return cls(exponents=vals, H=H, C=max(1.0, 2.0 ** (H - 1.0)))


def upper_functional(block, exponents: LemmaParams) -> float:
    """sum_v (sum_n |a_nv|)^{p_v} over the finite block."""
    arr = np.asarray(block, dtype=np.float64)
    if arr.ndim != 2:
        raise FamilyError("block must be 2-d")
    p = np.asarray(exponents.exponents, dtype=np.float64)
    if p.shape[0] != arr.shape[1]:
        raise FamilyError("one exponent per block column required")
    colsums = np.abs(arr).sum(axis=0)
    return float(np.sum(colsums ** p))


def subset_functional(block, exponents: LemmaParams,
                      row_cap: int = ENUM_ROW_CAP) -> float:
    """Exact max over all 2^R row subsets N of sum_v |sum_{n in N} a_nv|^{p_v}.

    Enumeration doubles a table of subset sums over the first rows and
    streams the remaining rows in chunks; exponential in R, hence the cap.
    """
    arr = np.asarray(block, dtype=np.float64)
    if arr.ndim != 2:
        raise FamilyError("block must be 2-d")
    rows, cols = arr.shape
    if rows > row_cap:
        raise BudgetError(
            f"subset enumeration capped at {row_cap} rows, got {rows}"
        )
    p = np.asarray(exponents.exponents, dtype=np.float64)
    if p.shape[0] != cols:
        raise FamilyError("one exponent per block column required")
    r1 = min(rows, 14)
    table = np.zeros((1, cols))
    for r in range(r1):
        table = np.concatenate([table, table + arr[r]], axis=0)
    best = float(np.max(np.sum(np.abs(table) ** p, axis=1)))
    # stream the remaining rows' subset sums over the table
    rest = arr[r1:]
    for mask in range(1, 1 << (rows - r1)):
        extra = np.zeros(cols)
        mm = mask
        i = 0
        while mm:
            if mm & 1:
                extra = extra + rest[i]
            i += 1
            mm >>= 1
        vals = np.sum(np.abs(table + extra) ** p, axis=1)
        best = max(best, float(np.max(vals)))
    return best


@dataclass
class SandwichReport:
    upper: float
    subset: float
    H: float
    C: float
    lower: float
    holds: bool

    def to_report(self) -> dict:
        return {"upper": self.upper, "subset": self.subset, "H": self.H,
                "C": self.C, "lower": self.lower, "holds": self.holds}


def sandwich_check(block, exponents: LemmaParams) -> SandwichReport:
    """Check U/(4 C^2) <= L <= U on a finite block (exact enumeration
    for L); a violation would contradict the equivalence, so callers
    treat holds=False as a failure."""
    U = upper_functional(block, exponents)
    L = subset_functional(block, exponents)
    lower = U / (4.0 * exponents.C ** 2)
    slack = 1e-12 * max(1.0, U)
    holds = (lower <= L + slack) and (L <= U + slack)
    return SandwichReport(upper=U, subset=L, H=exponents.H, C=exponents.C,
                          lower=lower, holds=holds)
