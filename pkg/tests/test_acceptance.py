"""Acceptance gate: every criterion at its stated tolerance, one printed
pass/fail line each.  Run with `pytest tests/test_acceptance.py -v -s`
(or plain pytest; the lines also appear in captured output)."""

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from absum import (FAIL, PASS_AT_SCALE, InfMatrix, LemmaParams, MethodParams,
                   SeriesView, TruncWindow, WeightSeq)
from absum.matrixclass import (check_column_sup, check_rowsum_sup, classify_c,
                               classify_l1, column_coeff, fill_b_table,
                               image_series, sandwich_check)
from absum.oracle import (naive_column_coeff, naive_mean_difference,
                          naive_norm, naive_rowsum_terms,
                          naive_series_power_terms)
from absum.seqcore import add_series, make_bounded_partial_sum_series
from absum.summability import (check_series_condition, classical_norm,
                               membership, truncated_norm)
from absum.transform import (fill_table, fill_unit_table, mean_difference,
                             recover_term, sliding_mean_prev_row,
                             sliding_mean_table, unit_mean_difference)

from conftest import series_grid, weight_grid


def _report(num, ok, desc):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {desc}"
    print(line)
    assert ok, line


def unit_method(k):
    return MethodParams(WeightSeq.unit(), WeightSeq.unit(), k)


def test_c01_difference_identity():
    """F(m,n) = T(m,n) - T(m-1,n) to rel 1e-11 on 200x200 windows for all
    5 series x 3 weight families, in < 5 s."""
    t0 = time.perf_counter()
    window = TruncWindow(200, 200)
    worst = 0.0
    for a in series_grid():
        for w in weight_grid():
            F = fill_table(a, w, window).values
            T = sliding_mean_table(a, w, window)
            prev = np.vstack([sliding_mean_prev_row(a, window), T[:-1]])
            scale = np.maximum(1.0, np.maximum(np.abs(T), np.abs(prev)))
            worst = max(worst, float(np.max(np.abs(F - (T - prev)) / scale)))
    dt = time.perf_counter() - t0
    _report(1, worst <= 1e-11 and dt < 5.0,
            f"difference identity: max rel err {worst:.2e} "
            f"(tol 1e-11), {dt:.2f}s (< 5s)")


def test_c02_recovery_identity():
    """Two-cell recovery reproduces a_{m+n} to rel 1e-11 on 40x40 windows,
    all family combinations, in < 2 s."""
    t0 = time.perf_counter()
    window = TruncWindow(40, 40)
    worst = 0.0
    for a in series_grid():
        terms = a.terms(80)
        for w in weight_grid():
            table = fill_table(a, w, window)
            for m in range(1, 41):
                for n in range(41):
                    got = recover_term(table, w, m, n)
                    worst = max(worst, abs(got - terms[m + n])
                                / max(1.0, abs(terms[m + n])))
    dt = time.perf_counter() - t0
    _report(2, worst <= 1e-11 and dt < 2.0,
            f"recovery identity: max rel err {worst:.2e} "
            f"(tol 1e-11), {dt:.2f}s (< 2s)")


def test_c03_unit_weight_specialization():
    """Under unit weights the generic and classical paths agree bitwise:
    tables, truncated norms, and membership verdicts."""
    window = TruncWindow(96, 48, abs_tol=1e-3)
    ok = True
    for a in series_grid():
        generic = fill_table(a, WeightSeq.unit(), window).values
        ok &= bool(np.array_equal(generic, fill_unit_table(a, window)))
        for k in (1.0, 1.5, 2.0, 3.0):
            mp = unit_method(k)
            ok &= truncated_norm(a, mp, window) == classical_norm(a, k, window)
            ev_g = membership(a, mp, window)
            ev_c = membership(a, mp, window, classical=True)
            ok &= ev_g.verdict == ev_c.verdict
            ok &= bool(np.array_equal(ev_g.totals, ev_c.totals))
        m, n = 31, 17
        ok &= (mean_difference(a, WeightSeq.unit(), m, n)
               == unit_mean_difference(a, m, n))
    _report(3, ok, "unit-weight specialization bitwise on all shipped "
                   "series families, k in {1, 1.5, 2, 3}")


def test_c04_oracle_equivalence():
    """Fast paths agree with naive oracles to rel 1e-10 on >= 2000 seeded
    random instances each, < 60 s total."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(424242)

    # fill_table: 2000 sampled cells across 100 random tables
    worst_t = 0.0
    for _ in range(100):
        m_hi, n_hi = 24, 12
        a = SeriesView.explicit(rng.standard_normal(m_hi + n_hi + 1).tolist())
        w = WeightSeq.arithmetic(float(rng.uniform(0.2, 2.0)),
                                 float(rng.uniform(0.0, 2.0)))
        vals = fill_table(a, w, TruncWindow(m_hi, n_hi)).values
        for _ in range(20):
            m = int(rng.integers(0, m_hi + 1))
            n = int(rng.integers(0, n_hi + 1))
            want = naive_mean_difference(a, w, m, n)
            worst_t = max(worst_t, abs(vals[m, n] - want)
                          / max(1e-30, abs(want)))
    n_table = 2000

    # truncated_norm: 2000 random instances on small windows
    worst_n = 0.0
    window = TruncWindow(8, 6)
    for _ in range(2000):
        a = SeriesView.explicit(rng.standard_normal(15).tolist())
        mp = MethodParams(
            WeightSeq.arithmetic(float(rng.uniform(0.2, 2.0)),
                                 float(rng.uniform(0.0, 2.0))),
            WeightSeq.arithmetic(float(rng.uniform(0.2, 2.0)),
                                 float(rng.uniform(0.0, 1.0))),
            float(rng.uniform(1.0, 3.0)))
        fast = truncated_norm(a, mp, window)
        slow = naive_norm(a, mp, window)
        worst_n = max(worst_n, abs(fast - slow) / max(1e-30, abs(slow)))

    # column coefficients: 2000 random instances
    worst_b = 0.0
    A = InfMatrix.dense(rng.standard_normal((60, 16)).tolist())
    p = WeightSeq.arithmetic(1.0, 0.7)
    for _ in range(2000):
        m = int(rng.integers(0, 25))
        n = int(rng.integers(0, 10))
        j = int(rng.integers(0, 16))
        want = naive_column_coeff(A, p, m, n, j)
        got = column_coeff(A, p, m, n, j)
        worst_b = max(worst_b, abs(got - want) / max(1e-30, abs(want)))

    # condition checkers: 2000 evidence comparisons (1000 column-sup
    # sups + 1000 row-aggregate sups)
    worst_c = 0.0
    for _ in range(1000):
        rows = 40
        A = InfMatrix.dense(rng.standard_normal((rows, 4)).tolist())
        k = float(rng.uniform(1.0, 2.5))
        win = TruncWindow(6, 3, j_max=3, abs_tol=1e-6)
        rep = check_column_sup(A, WeightSeq.unit(), WeightSeq.unit(), k, win)
        sup = 0.0
        for j in range(4):
            col = SeriesView.explicit([A.entry(nn, j) for nn in range(rows)])
            for n in range(4):
                sup = max(sup, sum(naive_series_power_terms(
                    col, WeightSeq.unit(), WeightSeq.unit(), k, n, 6)))
        worst_c = max(worst_c, abs(rep.sup_value - sup) / max(1e-30, sup))
    for _ in range(1000):
        rows = 40
        A = InfMatrix.dense(rng.standard_normal((rows, 5)).tolist())
        k = float(rng.uniform(1.0, 2.0))
        win = TruncWindow(6, 2, j_max=4, abs_tol=1e-6)
        rep = check_rowsum_sup(A, WeightSeq.unit(), WeightSeq.unit(), k, win)
        sup = 0.0
        for n in range(3):
            abs_terms, _ = naive_rowsum_terms(A, WeightSeq.unit(),
                                              WeightSeq.unit(), k, n, 6, 4)
            sup = max(sup, sum(abs_terms))
        worst_c = max(worst_c, abs(rep.sup_value - sup) / max(1e-30, sup))

    dt = time.perf_counter() - t0
    worst = max(worst_t, worst_n, worst_b, worst_c)
    _report(4, worst <= 1e-10 and dt < 60.0,
            f"oracle equivalence over {n_table}+2000+2000+2000 instances: "
            f"max rel dev {worst:.2e} (tol 1e-10), {dt:.1f}s (< 60s)")


def test_c05_norm_axioms():
    """Homogeneity to rel 1e-12 and the triangle inequality with slack
    1e-10 on 500 random series pairs."""
    rng = np.random.default_rng(5150)
    window = TruncWindow(48, 24)
    hi = window.m_max + window.n_max
    mp = unit_method(2.0)
    lams = (-2.0, 0.5, 3.0)
    worst_h = 0.0
    tri_ok = True
    for i in range(500):
        a = SeriesView.explicit(rng.standard_normal(hi + 1).tolist())
        b = SeriesView.explicit(rng.standard_normal(hi + 1).tolist())
        na = truncated_norm(a, mp, window)
        nb = truncated_norm(b, mp, window)
        nab = truncated_norm(add_series(a, b, hi), mp, window)
        tri_ok &= nab <= na + nb + 1e-10
        lam = lams[i % 3]
        nl = truncated_norm(a.scaled_by(lam, hi), mp, window)
        worst_h = max(worst_h, abs(nl - abs(lam) * na) / max(1e-30, nl))
    _report(5, tri_ok and worst_h <= 1e-12,
            f"norm axioms on 500 pairs: homogeneity max rel {worst_h:.2e} "
            f"(tol 1e-12), triangle slack 1e-10 {'held' if tri_ok else 'broke'}")


def test_c06_bounded_family_threshold():
    """For k in {1.5, 2, 3} every bounded-partial-sum member passes at
    m_max = 1e5 with tail < 1e-6; for k = 1 the weight-ratio series
    diverges, marking the index threshold."""
    window = TruncWindow(100_000, 16, abs_tol=1e-6)
    ok = True
    detail = []
    for gen in ("alternating_sign", "sine", "damped"):
        a = make_bounded_partial_sum_series({"kind": gen})
        for k in (1.5, 2.0, 3.0):
            ev = membership(a, unit_method(k), window)
            good = (ev.verdict == PASS_AT_SCALE and ev.pass_cut is not None
                    and min(ev.tail_sup) < 1e-6)
            ok &= good
            if not good:
                detail.append(f"{gen}/k={k}:{ev.verdict}")
    cond = check_series_condition(unit_method(1.0), 1_000_000)
    ok &= cond.verdict == "divergent"
    _report(6, ok, "bounded-family membership passes for k in {1.5,2,3} "
                   "with tail < 1e-6 by m_max=1e5; k=1 weight-ratio series "
                   f"divergent{'; ' + ','.join(detail) if detail else ''}")


def test_c07_powered_total_bound():
    """Powered totals dominated by (4 M)^k times the weight-ratio series
    at every shift n <= 200, for all shipped bounded-generator x weight
    x factor x k combinations."""
    window = TruncWindow(200, 200)
    ok = True
    worst = 0.0
    for gen in ("alternating_sign", "sine", "damped"):
        a = make_bounded_partial_sum_series({"kind": gen})
        M = a.partial_sum_bound
        for w in (WeightSeq.unit(), WeightSeq.arithmetic(1.0, 1.0),
                  WeightSeq.arithmetic(2.0, 3.0)):
            p_arr = w.terms(window.m_max)
            P_arr = w.cumulative_array(window.m_max)
            F = fill_table(a, w, window).values
            for u in (WeightSeq.unit(), WeightSeq.arithmetic(2.0, 1.0)):
                u_arr = u.terms(window.m_max)
                for k in (1.5, 2.0, 3.0):
                    u_pow = u_arr ** (k - 1.0)
                    lhs = np.sum(u_pow[:, None] * np.abs(F) ** k, axis=0)
                    rhs = (4.0 * M) ** k * float(
                        np.sum(u_pow * (p_arr / P_arr) ** k))
                    r = float(np.max(lhs) / rhs)
                    worst = max(worst, r)
                    ok &= r <= 1.0 + 1e-12
    _report(7, ok, f"bounded-series powered-total bound at every n <= 200 "
                   f"(3 generators x 3 weights x 2 factors x 3 indices): "
                   f"max ratio {worst:.3f} <= 1")


def test_c08_sandwich():
    """U/(4C^2) <= L <= U on 500 seeded random blocks (<= 15 rows,
    exponents in [1, 3]), exact enumeration for L, zero violations,
    < 30 s."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(31337)
    violations = 0
    for _ in range(500):
        rows = int(rng.integers(1, 16))
        cols = int(rng.integers(1, 13))
        block = rng.standard_normal((rows, cols)) * 10.0 ** rng.integers(-1, 2)
        lp = LemmaParams.from_exponents(rng.uniform(1.0, 3.0, cols))
        if not sandwich_check(block, lp).holds:
            violations += 1
    dt = time.perf_counter() - t0
    _report(8, violations == 0 and dt < 30.0,
            f"sandwich on 500 random blocks: {violations} violations, "
            f"{dt:.1f}s (< 30s)")


def test_c09_interchange_identity():
    """Column-coefficient contraction equals the transform of the image
    series (finitely supported input), 500 random instances, rel 1e-10."""
    rng = np.random.default_rng(909)
    dim = 10
    window = TruncWindow(dim, dim, j_max=dim)
    worst = 0.0
    for _ in range(500):
        n_rows = window.n_max + window.m_max + 1
        A = InfMatrix.dense(rng.standard_normal((n_rows, dim + 1)).tolist())
        x_vals = rng.standard_normal(dim + 1)
        x = SeriesView.explicit(x_vals.tolist())
        p = WeightSeq.arithmetic(1.0, float(rng.uniform(0.0, 2.0)))
        lhs = np.tensordot(fill_b_table(A, p, window).values, x_vals,
                           axes=([2], [0]))
        y = image_series(A, x, n_rows - 1, dim)
        m = int(rng.integers(0, window.m_max + 1))
        n = int(rng.integers(0, window.n_max + 1))
        rhs = mean_difference(y, p, m, n)
        worst = max(worst, abs(lhs[m, n] - rhs) / max(1.0, abs(rhs)))
    _report(9, worst <= 1e-10,
            f"interchange identity on 500 instances: max rel dev "
            f"{worst:.2e} (tol 1e-10)")


def test_c10_classifier_consistency():
    """Matrices classified PASS map the probe sequences into the space:
    basis images pass membership for the l1 class; the all-ones image and
    basis images pass for the c class."""
    unit = WeightSeq.unit()
    member_win = TruncWindow(600, 8, abs_tol=1e-2)
    hi = 4 * member_win.m_max + member_win.n_max

    l1_zoo = [
        (InfMatrix.zero(), 2.0),
        (InfMatrix.identity(), 2.0),
        (InfMatrix.diagonal({"kind": "geometric", "ratio": 0.5}), 2.0),
        (InfMatrix.banded(1, [0.2, 0.5, 0.2]), 2.0),
        (InfMatrix.cesaro_c1(), 2.0),
    ]
    win = TruncWindow(128, 16, j_max=16, abs_tol=1e-2)
    ok = True
    passed_l1 = 0
    for A, k in l1_zoo:
        rep = classify_l1(A, unit, unit, k, win)
        if rep.verdict != PASS_AT_SCALE:
            continue
        passed_l1 += 1
        for j in (0, 2, 5):
            img = image_series(A, SeriesView.unit_basis(j), hi, j_max=j)
            ev = membership(img, unit_method(k), member_win)
            ok &= ev.verdict == PASS_AT_SCALE

    c_zoo = [
        (InfMatrix.zero(), 1.0),
        (InfMatrix.diagonal({"kind": "geometric", "ratio": 0.5}), 1.0),
        (InfMatrix.diagonal({"kind": "geometric", "ratio": 0.5}), 2.0),
    ]
    win_c = TruncWindow(96, 16, j_max=64, abs_tol=1e-2, rel_tol=1e-6)
    passed_c = 0
    ones = SeriesView.explicit([1.0] * (hi + 200))
    for A, k in c_zoo:
        rep = classify_c(A, unit, unit, k, win_c)
        if rep.verdict != PASS_AT_SCALE:
            continue
        passed_c += 1
        img_e = image_series(A, ones, hi, j_max=hi + 199)
        ok &= membership(img_e, unit_method(k), member_win).verdict \
            == PASS_AT_SCALE
        for j in (0, 3):
            img_j = image_series(A, SeriesView.unit_basis(j), hi, j_max=j)
            ok &= membership(img_j, unit_method(k), member_win).verdict \
                == PASS_AT_SCALE

    ok &= passed_l1 >= 3 and passed_c >= 2
    _report(10, ok, f"classifier consistency: {passed_l1} l1-PASS and "
                    f"{passed_c} c-PASS zoo matrices, all probe images "
                    f"pass membership")


def test_c11_verify_all_small():
    """`absum verify-all --scale small` runs deterministically under a
    fixed seed in < 30 s and exits 0."""
    t0 = time.perf_counter()
    outs = []
    for i in range(2):
        out = Path(f"/tmp/absum_verify_{i}.json")
        r = subprocess.run(
            [sys.executable, "-m", "absum.cli", "verify-all",
             "--scale", "small", "--seed", "1234", "--out", str(out)],
            capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        rep = json.loads(out.read_text())
        rep.pop("timing")
        outs.append(json.dumps(rep, sort_keys=True))
    dt = time.perf_counter() - t0
    _report(11, outs[0] == outs[1] and dt < 30.0,
            f"verify-all small: deterministic, exit 0, two runs in "
            f"{dt:.1f}s (< 30s)")
