"""Command-line front door: declarative JSON configs in, deterministic
JSON reports out (CSV only for bulk numeric tables).

    absum <command> --config <path> [--out <path>] [--csv-dir <path>]
                    [--seed <u64>] [--threads <n>] [--scale s]

Exit codes: 0 success, 1 verification-suite failure, 2 config/schema
error, 3 budget or window error, 4 internal invariant violation.
Thread-count precedence: --threads flag, then config value, then the
ABSUM_THREADS environment variable (config always wins over the
environment), then 1.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

from . import __version__
from ._backend import BACKEND
from ._jsonio import dump, dumps
from .errors import (AbsumError, BudgetError, ConfigError, FamilyError,
                     InternalInvariantError)
from .matrixclass import (InfMatrix, LemmaParams, classify_c, classify_l1,
                          fill_b_table, image_series, sandwich_check)
from .seqcore import SeriesView, TruncWindow, WeightSeq
from .summability import (PASS_AT_SCALE, MethodParams, almost_convergence,
                          check_series_condition, check_u_bounded,
                          classical_norm, membership, truncated_norm)
from .transform import (fill_table, fill_unit_table, mean_difference,
                        recover_term, sliding_mean_prev_row,
                        sliding_mean_table, unit_mean_difference,
                        write_table_csv)

SCHEMA_VERSION = 1
THREADS_ENV = "ABSUM_THREADS"

COMMANDS = ("transform", "norm", "member", "hypotheses", "almost",
            "classify-l1", "classify-c", "lemma31", "verify-all")


@dataclass
class ExperimentConfig:
    command: str
    series: dict | None = None
    weights_p: dict = field(default_factory=lambda: {"kind": "unit"})
    weights_u: dict = field(default_factory=lambda: {"kind": "unit"})
    k: float = 1.0
    matrix: dict | None = None
    block: dict | None = None
    exponents: dict | None = None
    window: dict | None = None
    probe: int | None = None
    scale: str | None = None
    out: str | None = None
    csv_dir: str | None = None
    seed: int = 0
    threads: int | None = None


_REQUIRED = {
    "transform": ("series", "window"),
    "norm": ("series", "window"),
    "member": ("series", "window"),
    "hypotheses": ("probe",),
    "almost": ("series", "window"),
    "classify-l1": ("matrix", "window"),
    "classify-c": ("matrix", "window"),
    "lemma31": ("block", "exponents"),
    "verify-all": ("scale",),
}

_WINDOW_KEYS = {"m_max", "n_max", "j_max", "abs_tol", "rel_tol"}


def parse_config(raw: dict) -> ExperimentConfig:
    """Strict schema validation; unknown fields are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in dc_fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    if "command" not in raw:
        raise ConfigError("config needs a 'command'")
    command = raw["command"]
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; one of {COMMANDS}")
    cfg = ExperimentConfig(command=command)
    for name in ("series", "weights_p", "weights_u", "matrix", "block",
                 "exponents", "window"):
        if name in raw and raw[name] is not None:
            if not isinstance(raw[name], dict):
                raise ConfigError(f"config field {name!r} must be an object")
            setattr(cfg, name, raw[name])
    if "k" in raw and raw["k"] is not None:
        try:
            cfg.k = float(raw["k"])
        except (TypeError, ValueError):
            raise ConfigError("config field 'k' must be a number") from None
    for name in ("probe", "seed", "threads"):
        if name in raw and raw[name] is not None:
            val = raw[name]
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"config field {name!r} must be an integer")
            setattr(cfg, name, val)
    for name in ("scale", "out", "csv_dir"):
        if name in raw and raw[name] is not None:
            if not isinstance(raw[name], str):
                raise ConfigError(f"config field {name!r} must be a string")
            setattr(cfg, name, raw[name])
    if cfg.scale is not None and cfg.scale not in ("small", "standard"):
        raise ConfigError("scale must be 'small' or 'standard'")
    missing = [f for f in _REQUIRED[command] if getattr(cfg, f) in (None, {})]
    if missing:
        raise ConfigError(f"command {command!r} needs fields: {missing}")
    if cfg.window is not None:
        unknown = set(cfg.window) - _WINDOW_KEYS
        if unknown:
            raise ConfigError(f"unknown window fields: {sorted(unknown)}")
        for req in ("m_max", "n_max"):
            if req not in cfg.window:
                raise ConfigError(f"window needs {req!r}")
    return cfg


def serialize_config(cfg: ExperimentConfig) -> dict:
    return {f.name: getattr(cfg, f.name) for f in dc_fields(ExperimentConfig)}


def _window(cfg: ExperimentConfig) -> TruncWindow:
    w = cfg.window
    try:
        return TruncWindow(
            m_max=int(w["m_max"]), n_max=int(w["n_max"]),
            j_max=int(w.get("j_max", 1)),
            abs_tol=float(w.get("abs_tol", 1e-8)),
            rel_tol=float(w.get("rel_tol", 1e-11)),
        )
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None


def _method(cfg: ExperimentConfig) -> MethodParams:
    try:
        return MethodParams(WeightSeq.from_spec(cfg.weights_p),
                            WeightSeq.from_spec(cfg.weights_u), cfg.k)
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None


def _series(cfg: ExperimentConfig) -> SeriesView:
    try:
        return SeriesView.from_spec(cfg.series)
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None


def _resolve_block(cfg: ExperimentConfig) -> np.ndarray:
    spec = cfg.block
    if "rows" in spec and isinstance(spec["rows"], list):
        arr = np.asarray(spec["rows"], dtype=np.float64)
        if arr.ndim != 2:
            raise ConfigError("block rows must form a 2-d array")
        return arr
    if "matrix" in spec:
        try:
            A = InfMatrix.from_spec(spec["matrix"])
        except FamilyError as exc:
            raise ConfigError(str(exc)) from None
        r = int(spec.get("n_rows", 8))
        c = int(spec.get("n_cols", 8))
        return A.block(r - 1, c - 1)
    raise ConfigError("block needs 'rows' or 'matrix' (+ n_rows/n_cols)")


def _resolve_exponents(cfg: ExperimentConfig, cols: int) -> LemmaParams:
    spec = cfg.exponents
    try:
        if "values" in spec:
            vals = spec["values"]
            if len(vals) != cols:
                raise ConfigError(
                    f"{len(vals)} exponents for {cols} block columns")
            return LemmaParams.from_exponents(vals)
        if "constant" in spec:
            return LemmaParams.from_exponents([spec["constant"]] * cols)
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError("exponents need 'values' or 'constant'")


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------

def _run_transform(cfg, window, threads, csv_dir):
    try:
        weights = WeightSeq.from_spec(cfg.weights_p)
    except FamilyError as exc:
        raise ConfigError(str(exc)) from None
    table = fill_table(_series(cfg), weights, window, threads=threads)
    vals = table.values
    flat = int(np.argmax(np.abs(vals)))
    m_w, n_w = np.unravel_index(flat, vals.shape)
    result = {
        "cells": int(vals.size),
        "sup_abs_value": float(np.max(np.abs(vals))),
        "witness": {"m": int(m_w), "n": int(n_w)},
    }
    if csv_dir:
        path = os.path.join(csv_dir, "transform_table.csv")
        write_table_csv(table, path)
        result["csv"] = {"table": path}
    return result


def _run_member(cfg, window, threads, csv_dir):
    ev = membership(_series(cfg), _method(cfg), window, threads=threads)
    result = ev.to_report()
    if csv_dir:
        totals_path = os.path.join(csv_dir, "member_totals.csv")
        with open(totals_path, "w", encoding="utf-8") as fh:
            fh.write("n,total\n")
            for n, val in enumerate(ev.totals):
                fh.write(f"{n},{format(float(val), '.17g')}\n")
        tails_path = os.path.join(csv_dir, "member_tails.csv")
        with open(tails_path, "w", encoding="utf-8") as fh:
            fh.write("cut,tail_sup\n")
            for cut, val in zip(ev.cut_points, ev.tail_sup):
                fh.write(f"{cut},{format(float(val), '.17g')}\n")
        result["csv"] = {"totals": totals_path, "tails": tails_path}
    return result


def _run_lemma31(cfg):
    block = _resolve_block(cfg)
    params = _resolve_exponents(cfg, block.shape[1])
    rep = sandwich_check(block, params)
    out = rep.to_report()
    out["rows"] = int(block.shape[0])
    out["cols"] = int(block.shape[1])
    return out


def run(cfg: ExperimentConfig, threads: int | None = None,
        csv_dir: str | None = None) -> dict:
    """Dispatch a parsed config to its module operation; returns the
    report dict (without timing)."""
    eff_threads = _effective_threads(cfg, threads)
    eff_csv = csv_dir or cfg.csv_dir
    if eff_csv:
        os.makedirs(eff_csv, exist_ok=True)
    cmd = cfg.command
    if cmd == "transform":
        result = _run_transform(cfg, _window(cfg), eff_threads, eff_csv)
    elif cmd == "norm":
        result = {"norm": truncated_norm(_series(cfg), _method(cfg),
                                         _window(cfg), threads=eff_threads)}
    elif cmd == "member":
        result = _run_member(cfg, _window(cfg), eff_threads, eff_csv)
    elif cmd == "hypotheses":
        mp = _method(cfg)
        result = {
            "u_bounded": check_u_bounded(mp, cfg.probe).to_report(),
            "series_condition": check_series_condition(mp, cfg.probe).to_report(),
        }
    elif cmd == "almost":
        result = almost_convergence(_series(cfg), _window(cfg)).to_report()
    elif cmd in ("classify-l1", "classify-c"):
        try:
            A = InfMatrix.from_spec(cfg.matrix)
        except FamilyError as exc:
            raise ConfigError(str(exc)) from None
        mp = _method(cfg)
        fn = classify_l1 if cmd == "classify-l1" else classify_c
        result = fn(A, mp.p, mp.u, mp.k, _window(cfg),
                    threads=eff_threads).to_report()
    elif cmd == "lemma31":
        result = _run_lemma31(cfg)
    else:  # verify-all
        result = verify_all(seed=cfg.seed, scale=cfg.scale or "small",
                            threads=eff_threads)
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "absum", "version": __version__, "backend": BACKEND},
        "config": serialize_config(cfg),
        "result": result,
    }


def _effective_threads(cfg: ExperimentConfig, flag: int | None) -> int:
    if flag is not None:
        return max(int(flag), 1)
    if cfg.threads is not None:
        return max(int(cfg.threads), 1)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    return 1


# ---------------------------------------------------------------------------
# verify-all: the aggregated invariant suite
# ---------------------------------------------------------------------------

_SCALES = {
    "small": dict(ident_m=48, ident_n=24, rec_m=24, rec_n=24,
                  member_m=2_000, member_n=8, member_tol=1e-4,
                  probe=100_000, blocks=60, block_rows=10,
                  interchange=40, inter_dim=10),
    "standard": dict(ident_m=200, ident_n=200, rec_m=40, rec_n=40,
                     member_m=100_000, member_n=16, member_tol=1e-6,
                     probe=1_000_000, blocks=500, block_rows=15,
                     interchange=500, inter_dim=12),
}


def _series_grid():
    return [
        SeriesView.unit_basis(3),
        SeriesView.geometric(0.6),
        SeriesView.power(-1.5),
        SeriesView.alternating(),
        SeriesView("bounded_partial_sums", generator={"kind": "sine"}),
    ]


def _weight_grid():
    return [WeightSeq.unit(), WeightSeq.arithmetic(1.0, 1.0),
            WeightSeq.geometric(1.05)]


def _fam_difference_identity(ps, threads):
    window = TruncWindow(ps["ident_m"], ps["ident_n"])
    worst = 0.0
    cases = 0
    for a in _series_grid():
        for w in _weight_grid():
            F = fill_table(a, w, window, threads=threads).values
            T = sliding_mean_table(a, w, window)
            prev = np.vstack([sliding_mean_prev_row(a, window), T[:-1]])
            scale = np.maximum(1.0, np.maximum(np.abs(T), np.abs(prev)))
            err = np.max(np.abs(F - (T - prev)) / scale)
            worst = max(worst, float(err))
            cases += F.size
    return {"passed": worst <= 1e-11, "cases": cases, "max_rel_err": worst}


def _fam_recovery(ps, threads):
    worst = 0.0
    cases = 0
    window = TruncWindow(ps["rec_m"], ps["rec_n"])
    for a in _series_grid():
        for w in _weight_grid():
            table = fill_table(a, w, window, threads=threads)
            terms = a.terms(window.m_max + window.n_max)
            for m in range(1, window.m_max + 1):
                for n in range(window.n_max + 1):
                    got = recover_term(table, w, m, n)
                    want = terms[m + n]
                    err = abs(got - want) / max(1.0, abs(want))
                    worst = max(worst, err)
                    cases += 1
    return {"passed": worst <= 1e-11, "cases": cases, "max_rel_err": worst}


def _fam_unit_specialization(ps, threads):
    window = TruncWindow(min(ps["ident_m"], 64), min(ps["ident_n"], 32))
    unit = WeightSeq.unit()
    bitwise_ok = True
    cases = 0
    for a in _series_grid():
        generic = fill_table(a, unit, window, threads=threads).values
        classical = fill_unit_table(a, window)
        bitwise_ok &= bool(np.array_equal(generic, classical))
        for k in (1.0, 2.0):
            mp = MethodParams(WeightSeq.unit(), WeightSeq.unit(), k)
            n1 = truncated_norm(a, mp, window, threads=threads)
            n2 = classical_norm(a, k, window, threads=threads)
            bitwise_ok &= (n1 == n2)
        m, n = window.m_max // 2, window.n_max // 2
        bitwise_ok &= (mean_difference(a, unit, m, n)
                       == unit_mean_difference(a, m, n))
        cases += generic.size
    bitwise_ok = bool(bitwise_ok)
    return {"passed": bitwise_ok, "cases": cases, "bitwise": bitwise_ok}


def _fam_bounded_membership(ps, threads):
    window = TruncWindow(ps["member_m"], ps["member_n"],
                         abs_tol=ps["member_tol"])
    ok = True
    detail = {}
    cases = 0
    for gen in ("alternating_sign", "sine"):
        a = SeriesView("bounded_partial_sums", generator={"kind": gen})
        for k in (1.5, 2.0, 3.0):
            mp = MethodParams(WeightSeq.unit(), WeightSeq.unit(), k)
            ev = membership(a, mp, window, threads=threads)
            detail[f"{gen}_k{k}"] = ev.verdict
            ok &= ev.verdict == PASS_AT_SCALE
            cases += 1
    cond = check_series_condition(
        MethodParams(WeightSeq.unit(), WeightSeq.unit(), 1.0), ps["probe"])
    detail["threshold_k1"] = cond.verdict
    ok &= cond.verdict == "divergent"
    cases += 1
    return {"passed": ok, "cases": cases, "verdicts": detail}


def _fam_sandwich(ps, rng):
    ok = True
    cases = 0
    for _ in range(ps["blocks"]):
        rows = int(rng.integers(1, ps["block_rows"] + 1))
        cols = int(rng.integers(1, 13))
        block = rng.standard_normal((rows, cols)) * 10.0 ** rng.integers(-1, 2)
        params = LemmaParams.from_exponents(rng.uniform(1.0, 3.0, cols))
        rep = sandwich_check(block, params)
        ok &= rep.holds
        cases += 1
    return {"passed": ok, "cases": cases}


def _fam_interchange(ps, rng, threads):
    dim = ps["inter_dim"]
    window = TruncWindow(dim, dim, j_max=dim)
    worst = 0.0
    cases = 0
    for _ in range(ps["interchange"]):
        n_rows = window.n_max + window.m_max + 1
        A = InfMatrix.dense(rng.standard_normal((n_rows, dim + 1)).tolist())
        x_vals = rng.standard_normal(dim + 1)
        x = SeriesView.explicit(x_vals.tolist())
        p = WeightSeq.arithmetic(1.0, float(rng.uniform(0.0, 2.0)))
        btab = fill_b_table(A, p, window, threads=threads)
        lhs = np.tensordot(btab.values, x_vals, axes=([2], [0]))
        y = image_series(A, x, n_rows - 1, dim)
        m_pick = int(rng.integers(1, window.m_max + 1))
        n_pick = int(rng.integers(0, window.n_max + 1))
        rhs = mean_difference(y, p, m_pick, n_pick)
        err = abs(lhs[m_pick, n_pick] - rhs) / max(1.0, abs(rhs))
        worst = max(worst, float(err))
        cases += 1
    return {"passed": worst <= 1e-10, "cases": cases, "max_rel_err": worst}


def verify_all(seed: int = 0, scale: str = "small", threads: int = 1) -> dict:
    """Drive the full invariant suite at the requested scale.

    Aggregates pass/fail per invariant family with counts; the CLI maps
    any failure to a nonzero exit.
    """
    if scale not in _SCALES:
        raise ConfigError(f"unknown verify-all scale {scale!r}")
    ps = _SCALES[scale]
    rng = np.random.default_rng(seed)
    families = {
        "difference_identity": _fam_difference_identity(ps, threads),
        "recovery_identity": _fam_recovery(ps, threads),
        "unit_specialization": _fam_unit_specialization(ps, threads),
        "bounded_membership": _fam_bounded_membership(ps, threads),
        "subset_sandwich": _fam_sandwich(ps, rng),
        "interchange_identity": _fam_interchange(ps, rng, threads),
    }
    return {
        "scale": scale,
        "seed": seed,
        "families": families,
        "all_passed": all(f["passed"] for f in families.values()),
    }


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absum",
        description="summability diagnostics: configs in, reports out",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="path to the experiment config JSON")
    parser.add_argument("--out", help="write the report to this path")
    parser.add_argument("--csv-dir", help="directory for CSV side files")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--threads", type=int, help="worker thread count")
    parser.add_argument("--scale", choices=("small", "standard"),
                        help="verify-all scale (overrides config)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    t0 = time.monotonic()
    try:
        if args.config:
            import json

            try:
                with open(args.config, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            except ValueError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from None
            cfg = parse_config(raw)
            if cfg.command != args.command:
                raise ConfigError(
                    f"config command {cfg.command!r} does not match "
                    f"CLI command {args.command!r}"
                )
        elif args.command == "verify-all":
            cfg = ExperimentConfig(command="verify-all",
                                   scale=args.scale or "small")
        else:
            raise ConfigError("--config is required for this command")
        if args.scale and cfg.command == "verify-all":
            cfg.scale = args.scale
        if args.seed is not None:
            cfg.seed = args.seed
        report = run(cfg, threads=args.threads, csv_dir=args.csv_dir)
        report["timing"] = {"seconds": time.monotonic() - t0}
        out_path = args.out or cfg.out
        if out_path:
            dump(report, out_path)
            print(f"wrote {out_path}")
        else:
            sys.stdout.write(dumps(report))
        if cfg.command == "verify-all" and not report["result"]["all_passed"]:
            return 1
        return 0
    except (ConfigError, FamilyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 3
    except (InternalInvariantError, AbsumError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
