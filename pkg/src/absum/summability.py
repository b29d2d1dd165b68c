"""Truncated summability norm, membership diagnostics, and hypothesis
predicates for the weighted-mean method.

"Uniformly in n" is operationalised as a supremum over a sampled,
documented n-window; verdicts are explicitly AT SCALE and never claim
the infinite-dimensional statement.  Divergence detection compares three
geometric enlargements of the m-window (m_max, 2 m_max, 4 m_max) and
flags FAIL when the per-shift totals grow by >= 1.5 per doubling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FamilyError
from .kernels import (as_f64, kahan_cumsum, power_scan_chunked,
                      unit_power_scan_chunked)
from .seqcore import SeriesView, TruncWindow, WeightSeq

PASS_AT_SCALE = "PASS_AT_SCALE"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

GROWTH_FACTOR = 1.5   # FAIL when sup totals grow by at least this per doubling
ZERO_FLOOR = 1e-300   # below this a total counts as exactly zero
TREND_TOL = 0.10      # tolerated sup growth of 1/u over the last index decade
DECAY_RATIO = 0.5     # per-decade increment decay required to call convergence


@dataclass
class MethodParams:
    """Weight pair (p, u) and the summability index k >= 1."""

    p: WeightSeq
    u: WeightSeq
    k: float

    def __post_init__(self):
        self.k = float(self.k)
        if not self.k >= 1.0:
            raise FamilyError(f"summability index k must be >= 1, got {self.k}")

    def spec(self) -> dict:
        return {"p": self.p.spec(), "u": self.u.spec(), "k": self.k}


def tail_cut_points(m_max: int) -> list[int]:
    """Log-spaced tail cut grid including 0 and m_max."""
    cuts = {0, 1, m_max}
    for i in range(1, 10):
        cuts.add(int(round(m_max ** (i / 10.0))))
    cuts.add(m_max // 2)
    cuts.add((9 * m_max) // 10)
    return sorted(c for c in cuts if 0 <= c <= m_max)


def _scan(a: SeriesView, mp: MethodParams, m_hi: int, n_hi: int,
          cuts: np.ndarray, threads: int, classical: bool):
    terms = as_f64(a.terms(n_hi + m_hi))
    with np.errstate(over="ignore", invalid="ignore"):
        if classical:
            if not (mp.p.is_unit() and mp.u.is_unit()):
                raise FamilyError("classical path requires unit weights")
            return unit_power_scan_chunked(terms, mp.k, m_hi, n_hi, cuts,
                                           threads=threads)
        p = as_f64(mp.p.terms(m_hi))
        P = as_f64(mp.p.cumulative_array(m_hi))
        u_pow = as_f64(mp.u.terms(m_hi)) ** (mp.k - 1.0)
        return power_scan_chunked(terms, P, p, u_pow, mp.k, m_hi, n_hi, cuts,
                                  threads=threads)


def truncated_norm(a: SeriesView, mp: MethodParams, window: TruncWindow,
                   threads: int = 1, classical: bool = False) -> float:
    """sup over the n-window of (sum_m u_m^{k-1} |F(m,n)|^k)^{1/k}.

    Monotone non-decreasing in both m_max and n_max; overflow surfaces
    as an infinite value, not a crash.
    """
    cuts = np.zeros(0, dtype=np.int64)
    totals, _ = _scan(a, mp, window.m_max, window.n_max, cuts,
                      threads, classical)
    sup = float(np.max(totals))
    if not np.isfinite(sup):
        return float("inf")
    return sup ** (1.0 / mp.k)


def classical_norm(a: SeriesView, k: float, window: TruncWindow,
                   threads: int = 1) -> float:
    """Truncated norm of the classical (unit-weight) series space,
    computed through the dedicated unit-weight kernel."""
    mp = MethodParams(WeightSeq.unit(), WeightSeq.unit(), k)
    return truncated_norm(a, mp, window, threads=threads, classical=True)


@dataclass
class MembershipEvidence:
    """Sampled realisation of the uniform-smallness-of-tails criterion."""

    verdict: str
    totals: np.ndarray            # per n, at the base m_max
    cut_points: list[int]
    tail_sup: np.ndarray          # per cut: sup_n of the truncated tail
    per_n_tails: np.ndarray       # (len(cuts), n_max + 1)
    scale_m_maxes: list[int]
    sup_totals_by_scale: list[float]
    pass_cut: int | None
    witness_n: int
    window: TruncWindow
    method: dict = field(default_factory=dict)

    def to_report(self) -> dict:
        return {
            "verdict": self.verdict,
            "sup_total": float(np.max(self.totals)),
            "witness_n": self.witness_n,
            "cut_points": list(self.cut_points),
            "tail_sup": [float(t) for t in self.tail_sup],
            "pass_cut": self.pass_cut,
            "scale_m_maxes": list(self.scale_m_maxes),
            "sup_totals_by_scale": [float(t) for t in self.sup_totals_by_scale],
            "window": {"m_max": self.window.m_max, "n_max": self.window.n_max,
                       "abs_tol": self.window.abs_tol},
            "method": self.method,
        }


def _growth_verdict(sups: list[float]) -> str | None:
    """FAIL on sustained growth or overflow across the three scales."""
    if any(not np.isfinite(s) for s in sups):
        return FAIL
    ratios = []
    for lo, hi in zip(sups, sups[1:]):
        if hi <= ZERO_FLOOR and lo <= ZERO_FLOOR:
            ratios.append(1.0)
        elif lo <= ZERO_FLOOR:
            ratios.append(float("inf"))
        else:
            ratios.append(hi / lo)
    if all(r >= GROWTH_FACTOR for r in ratios):
        return FAIL
    return None


def membership(a: SeriesView, mp: MethodParams, window: TruncWindow,
               threads: int = 1, classical: bool = False) -> MembershipEvidence:
    """Membership diagnostic with uniformity-in-n evidence.

    PASS_AT_SCALE: the sup-over-n truncated tail falls below abs_tol at
    some cut M <= m_max (tails are monotone by construction).
    FAIL: sup totals grow by >= GROWTH_FACTOR per doubling across
    (m_max, 2 m_max, 4 m_max), or overflow.
    INCONCLUSIVE otherwise.  Evidence is always attached.
    """
    m_base = window.m_max
    n_hi = window.n_max
    cuts = tail_cut_points(m_base)
    # one scan at 4*m_max; prefixes at m_base+1 and 2*m_base+1 give the
    # totals of the two smaller scales
    scan_cuts = sorted(set(cuts) | {m_base + 1, 2 * m_base + 1})
    cut_arr = np.asarray(scan_cuts, dtype=np.int64)
    totals4, prefixes = _scan(a, mp, 4 * m_base, n_hi, cut_arr,
                              threads, classical)
    at = {c: prefixes[i] for i, c in enumerate(scan_cuts)}
    totals = at[m_base + 1]
    sups = [float(np.max(totals)), float(np.max(at[2 * m_base + 1])),
            float(np.max(totals4))]

    per_n_tails = np.maximum(
        np.stack([totals - at[c] for c in cuts]), 0.0)
    tail_sup = per_n_tails.max(axis=1)

    verdict = _growth_verdict(sups)
    pass_cut = None
    if verdict is None:
        below = np.nonzero(tail_sup <= window.abs_tol)[0]
        if below.size:
            pass_cut = int(cuts[below[0]])
            verdict = PASS_AT_SCALE
        else:
            verdict = INCONCLUSIVE

    return MembershipEvidence(
        verdict=verdict,
        totals=totals,
        cut_points=list(cuts),
        tail_sup=tail_sup,
        per_n_tails=per_n_tails,
        scale_m_maxes=[m_base, 2 * m_base, 4 * m_base],
        sup_totals_by_scale=sups,
        pass_cut=pass_cut,
        witness_n=int(np.argmax(totals)),
        window=window,
        method=mp.spec(),
    )


@dataclass
class UBoundednessReport:
    bounded: bool
    sup: float
    sup_index: int
    last_decade_ratio: float
    probe: int

    def to_report(self) -> dict:
        return {"bounded": self.bounded, "sup": self.sup,
                "sup_index": self.sup_index,
                "last_decade_ratio": self.last_decade_ratio,
                "probe": self.probe}


def check_u_bounded(mp, probe: int) -> UBoundednessReport:
    """Stability of sup 1/u_m over [0, probe].

    True when the sup is attained stably: the sup over the last index
    decade does not exceed the sup over everything before it by more
    than TREND_TOL.
    """
    if probe < 1:
        raise FamilyError("probe must be >= 1")
    u = mp.u if isinstance(mp, MethodParams) else mp
    vals, _, eff = u.finite_prefix(probe)
    inv = 1.0 / vals
    sup = float(np.max(inv))
    sup_index = int(np.argmax(inv))
    split = max(eff // 10, 1)
    head = inv[:split]
    tail = inv[split:]
    if tail.size == 0 or head.size == 0:
        ratio = 1.0
    else:
        ratio = float(np.max(tail)) / float(np.max(head))
    bounded = ratio <= 1.0 + TREND_TOL
    return UBoundednessReport(bounded=bounded, sup=sup, sup_index=sup_index,
                              last_decade_ratio=ratio, probe=eff)


@dataclass
class SeriesConditionReport:
    """Partial sums of sum_m u_m^{k-1} (p_m/P_m)^k with a decay verdict."""

    verdict: str                      # "convergent" | "divergent"
    partial_sums: list[tuple[int, float]]
    last_term: float
    ratio_checkpoints: list[tuple[int, float]]
    effective_probe: int
    requested_probe: int

    @property
    def value(self) -> float:
        return self.partial_sums[-1][1]

    def to_report(self) -> dict:
        return {
            "verdict": self.verdict,
            "partial_sums": [[i, v] for i, v in self.partial_sums],
            "last_term": self.last_term,
            "ratio_checkpoints": [[i, v] for i, v in self.ratio_checkpoints],
            "effective_probe": self.effective_probe,
            "requested_probe": self.requested_probe,
        }


def check_series_condition(mp: MethodParams, probe: int) -> SeriesConditionReport:
    """Convergence diagnostic for the weight-ratio series of the method.

    The verdict comes from last-decade increment decay: the increment
    over (probe/10, probe] must fall below DECAY_RATIO times the
    increment over (probe/100, probe/10].  Families that overflow
    float64 before the probe are scanned over their finite prefix.
    """
    if probe < 1:
        raise FamilyError("probe must be >= 1")
    p, P, eff_p = mp.p.finite_prefix(probe)
    u, _, eff_u = mp.u.finite_prefix(probe)
    eff = min(eff_p, eff_u)
    p, P, u = p[: eff + 1], P[: eff + 1], u[: eff + 1]
    ratios = p / P
    with np.errstate(over="ignore", invalid="ignore"):
        terms = u ** (mp.k - 1.0) * ratios ** mp.k
    finite = np.isfinite(terms)
    if not finite.all():
        eff = int(np.argmin(finite)) - 1
        if eff < 1:
            raise FamilyError("weight-ratio series overflows immediately")
        terms = terms[: eff + 1]
        ratios = ratios[: eff + 1]
    S = kahan_cumsum(as_f64(terms))

    if eff >= 100:
        c0, c1, c2 = eff // 100, eff // 10, eff
    else:
        c0, c1, c2 = max(eff // 4, 0), max(eff // 2, 1), eff
    d_last = float(S[c2] - S[c1])
    d_prev = float(S[c1] - S[c0])
    tiny = 1e-15 * (1.0 + abs(float(S[c2])))
    convergent = d_last <= DECAY_RATIO * d_prev + tiny or d_last <= tiny
    checkpoints = sorted({c0, c1, c2})
    return SeriesConditionReport(
        verdict="convergent" if convergent else "divergent",
        partial_sums=[(c, float(S[c])) for c in checkpoints],
        last_term=float(terms[eff]),
        ratio_checkpoints=[(c, float(ratios[c])) for c in checkpoints],
        effective_probe=eff,
        requested_probe=probe,
    )


@dataclass
class AlmostConvergenceReport:
    gamma: float
    deviation: float
    means: np.ndarray
    m_max: int

    def to_report(self) -> dict:
        return {"gamma": self.gamma, "deviation": self.deviation,
                "m_max": self.m_max,
                "n_window": int(self.means.shape[0]) - 1}


def almost_convergence(x: SeriesView, window: TruncWindow) -> AlmostConvergenceReport:
    """Sliding-average limit estimate, uniform over the n-window.

    The view is read as a plain sequence: its terms are averaged
    directly, (1/(m+1)) sum_{v=0..m} x_{n+v}.  Returns the window mean
    at m = m_max for each shift n, the candidate limit gamma (median
    over n, robust to window-edge effects), and sup_n |mean - gamma|.
    """
    m_hi, n_hi = window.m_max, window.n_max
    xs = x.terms(n_hi + m_hi)
    if not np.all(np.isfinite(xs)):
        raise FamilyError("almost_convergence needs finite terms on the window")
    S = kahan_cumsum(as_f64(xs))
    means = np.empty(n_hi + 1)
    means[0] = S[m_hi] / (m_hi + 1.0)
    if n_hi >= 1:
        means[1:] = (S[m_hi + 1: m_hi + n_hi + 1] - S[:n_hi]) / (m_hi + 1.0)
    gamma = float(np.median(means))
    deviation = float(np.max(np.abs(means - gamma)))
    return AlmostConvergenceReport(gamma=gamma, deviation=deviation,
                                   means=means, m_max=m_hi)


@dataclass
class InclusionBoundReport:
    """Powered-total bound for bounded-partial-sum series.

    Checks sum_m u^{k-1} |F(m,n)|^k <= (4 M)^k sum_m u^{k-1} (p_m/P_m)^k
    at every shift in the window, M being the series' partial-sum bound.
    """

    max_ratio: float
    holds: bool
    lhs_sup: float
    rhs: float
    bound_used: float
    witness_n: int
    series_condition_verdict: str

    def to_report(self) -> dict:
        return {"max_ratio": self.max_ratio, "holds": self.holds,
                "lhs_sup": self.lhs_sup, "rhs": self.rhs,
                "bound_used": self.bound_used, "witness_n": self.witness_n,
                "series_condition_verdict": self.series_condition_verdict}


def inclusion_bound_check(a: SeriesView, mp: MethodParams, window: TruncWindow,
                          threads: int = 1) -> InclusionBoundReport:
    if a.partial_sum_bound is None:
        raise FamilyError(
            "inclusion_bound_check needs a series with a declared "
            "partial-sum bound"
        )
    if not mp.k > 1.0:
        raise FamilyError("inclusion_bound_check needs k > 1")
    m_hi = window.m_max
    cuts = np.zeros(0, dtype=np.int64)
    totals, _ = _scan(a, mp, m_hi, window.n_max, cuts, threads, False)
    p = as_f64(mp.p.terms(m_hi))
    P = as_f64(mp.p.cumulative_array(m_hi))
    u_pow = as_f64(mp.u.terms(m_hi)) ** (mp.k - 1.0)
    rhs_series = float(kahan_cumsum(u_pow * (p / P) ** mp.k)[-1])
    rhs = (4.0 * a.partial_sum_bound) ** mp.k * rhs_series
    lhs_sup = float(np.max(totals))
    if rhs > 0.0:
        max_ratio = lhs_sup / rhs
    else:
        max_ratio = 0.0 if lhs_sup == 0.0 else float("inf")
    cond = check_series_condition(mp, probe=max(m_hi, 10_000))
    return InclusionBoundReport(
        max_ratio=max_ratio,
        holds=max_ratio <= 1.0 + 1e-12,
        lhs_sup=lhs_sup,
        rhs=rhs,
        bound_used=a.partial_sum_bound,
        witness_n=int(np.argmax(totals)),
        series_condition_verdict=cond.verdict,
    )
