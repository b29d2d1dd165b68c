"""Weight sequences, series term generators, and partial-sum caching.

Families are closed-form generators plus an explicit-list escape hatch;
every test series is reconstructible from its declarative spec dict.
Caches regenerate from scratch on growth, so cache-cold and cache-warm
reads are bit-identical; a published-snapshot scheme keeps concurrent
read-extend safe (single writer per extension, readers only ever see
completed prefixes).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import FamilyError
from .kernels import kahan_cumsum

_MIN_GROW = 256


def _grow_target(requested: int, current: int) -> int:
    return max(requested, 2 * current, _MIN_GROW)


@dataclass(frozen=True)
class TruncWindow:
    """Desk-scale truncation box plus numerical tolerances."""

    m_max: int
    n_max: int
    j_max: int = 1
    abs_tol: float = 1e-8
    rel_tol: float = 1e-11

    def __post_init__(self):
        for name in ("m_max", "n_max", "j_max"):
            if int(getattr(self, name)) < 1:
                raise FamilyError(f"window bound {name} must be >= 1")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise FamilyError("window tolerances must be > 0")

    def cells(self) -> int:
        return (self.m_max + 1) * (self.n_max + 1)

    def with_m_max(self, m_max: int) -> "TruncWindow":
        return TruncWindow(m_max, self.n_max, self.j_max,
                           self.abs_tol, self.rel_tol)

    def scaled(self, factor: int) -> "TruncWindow":
        return TruncWindow(self.m_max * factor, self.n_max * factor,
                           self.j_max * factor, self.abs_tol, self.rel_tol)


class WeightSeq:
    """Positive weight sequence p with cached cumulative sums P.

    P[n] = p[0] + ... + p[n], with the convention P[-1] = p[-1] = 0.
    The same class instantiated separately serves as the factor sequence
    of the summability method.
    """

    KINDS = ("unit", "arithmetic", "geometric", "explicit")

    def __init__(self, kind: str, **params):
        if kind not in self.KINDS:
            raise FamilyError(f"unknown weight family {kind!r}")
        self.kind = kind
        self.params = dict(params)
        self._lock = threading.Lock()
        self._snap: tuple[np.ndarray, np.ndarray] | None = None
        if kind == "explicit":
            vals = np.asarray(self.params.get("values", ()), dtype=np.float64)
            if vals.ndim != 1 or vals.size == 0:
                raise FamilyError("explicit weights need a non-empty list")
            self.params["values"] = [float(v) for v in vals]
        self._validate_params()

    # -- constructors ------------------------------------------------

    @classmethod
    def unit(cls) -> "WeightSeq":
        return cls("unit")

    @classmethod
    def arithmetic(cls, start: float = 1.0, step: float = 1.0) -> "WeightSeq":
        return cls("arithmetic", start=float(start), step=float(step))

    @classmethod
    def geometric(cls, ratio: float, scale: float = 1.0) -> "WeightSeq":
        return cls("geometric", ratio=float(ratio), scale=float(scale))

    @classmethod
    def explicit(cls, values) -> "WeightSeq":
        return cls("explicit", values=list(values))

    def _validate_params(self):
        p = self.params
        if self.kind == "arithmetic":
            if p.get("start", 1.0) <= 0:
                raise FamilyError("arithmetic weights need start > 0")
        elif self.kind == "geometric":
            if p.get("ratio", 0.0) <= 0 or p.get("scale", 1.0) <= 0:
                raise FamilyError("geometric weights need ratio, scale > 0")

    # -- generation --------------------------------------------------

    def _raw_terms(self, hi: int) -> np.ndarray:
        v = np.arange(hi + 1, dtype=np.float64)
        if self.kind == "unit":
            return np.ones(hi + 1)
        if self.kind == "arithmetic":
            return self.params["start"] + self.params["step"] * v
        if self.kind == "geometric":
            with np.errstate(over="ignore"):
                return self.params["scale"] * self.params["ratio"] ** v
        vals = self.params["values"]
        if hi >= len(vals):
            raise FamilyError(
                f"explicit weight family has {len(vals)} entries, "
                f"index {hi} requested"
            )
        return np.asarray(vals[: hi + 1], dtype=np.float64)

    def _ensure(self, hi: int) -> tuple[np.ndarray, np.ndarray]:
        snap = self._snap
        if snap is not None and snap[0].shape[0] > hi:
            return snap
        with self._lock:
            snap = self._snap
            if snap is not None and snap[0].shape[0] > hi:
                return snap
            target = _grow_target(hi, 0 if snap is None else snap[0].shape[0] - 1)
            if self.kind == "explicit":
                target = min(target, len(self.params["values"]) - 1)
                if target < hi:
                    # force the informative explicit-range error
                    self._raw_terms(hi)
            p = self._raw_terms(target)
            if not np.all(np.isfinite(p)):
                bad = int(np.argmin(np.isfinite(p)))
                raise FamilyError(
                    f"{self.kind} weight family overflows float64 at index {bad}"
                )
            if np.any(p <= 0.0):
                bad = int(np.argmax(p <= 0.0))
                raise FamilyError(
                    f"{self.kind} weight family generated non-positive weight "
                    f"p[{bad}] = {p[bad]}"
                )
            P = kahan_cumsum(p)
            if not np.all(np.isfinite(P)):
                bad = int(np.argmin(np.isfinite(P)))
                raise FamilyError(
                    f"{self.kind} cumulative weights overflow float64 at index {bad}"
                )
            p.setflags(write=False)
            P.setflags(write=False)
            new = (p, P)
            self._snap = new
            return new

    # -- access ------------------------------------------------------

    def term(self, n: int) -> float:
        if n < 0:
            if n == -1:
                return 0.0
            raise FamilyError("weight index must be >= -1")
        return float(self._ensure(n)[0][n])

    def terms(self, hi: int) -> np.ndarray:
        return self._ensure(hi)[0][: hi + 1]

    def cumulative(self, n: int) -> float:
        """P[n]; P[-1] = 0 by convention."""
        if n < 0:
            if n == -1:
                return 0.0
            raise FamilyError("cumulative index must be >= -1")
        return float(self._ensure(n)[1][n])

    def cumulative_array(self, hi: int) -> np.ndarray:
        return self._ensure(hi)[1][: hi + 1]

    def finite_prefix(self, hi: int) -> tuple[np.ndarray, np.ndarray, int]:
        """Longest valid prefix (p, P, h) with h <= hi.

        Lets diagnostics probe far into families that overflow float64
        (geometric growth) without crashing.
        """
        try:
            return self.terms(hi), self.cumulative_array(hi), hi
        except FamilyError:
            pass
        lo_ok, first_bad = 0, hi
        while lo_ok + 1 < first_bad:
            mid = (lo_ok + first_bad + 1) // 2
            try:
                self.terms(mid)
                lo_ok = mid
            except FamilyError:
                first_bad = mid
        return self.terms(lo_ok), self.cumulative_array(lo_ok), lo_ok

    def spec(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_spec(cls, spec: dict) -> "WeightSeq":
        if not isinstance(spec, dict) or "kind" not in spec:
            raise FamilyError("weight spec must be a dict with a 'kind'")
        d = dict(spec)
        kind = d.pop("kind")
        return cls(kind, **d)

    def is_unit(self) -> bool:
        return self.kind == "unit"

    def __repr__(self):
        return f"WeightSeq({self.spec()!r})"


# ---------------------------------------------------------------------------
# Series families
# ---------------------------------------------------------------------------

# generators usable by the bounded-partial-sum builder; value is
# (bounded?, partial-sum bound or None)
_BOUNDED_GENERATORS = {
    "alternating_sign": (True, 1.0),
    "sine": (True, 1.0),
    "damped": (True, 1.0),
    "linear": (False, None),
}


def _generator_values(gen: dict, hi: int) -> np.ndarray:
    v = np.arange(hi + 1, dtype=np.float64)
    kind = gen["kind"]
    if kind == "alternating_sign":
        return np.where(v.astype(np.int64) % 2 == 0, 1.0, -1.0)
    if kind == "sine":
        return np.sin(gen.get("omega", 1.0) * (v + 1.0))
    if kind == "damped":
        return gen.get("rate", 0.5) ** v
    if kind == "linear":
        return gen.get("slope", 1.0) * v
    raise FamilyError(f"unknown partial-sum generator {kind!r}")


class SeriesView:
    """Lazy term sequence a_v with cached partial sums s_n (s_{-1} = 0)."""

    KINDS = ("unit_basis", "geometric", "power", "alternating",
             "bounded_partial_sums", "explicit")

    def __init__(self, kind: str, **params):
        if kind not in self.KINDS:
            raise FamilyError(f"unknown series family {kind!r}")
        self.kind = kind
        self.params = dict(params)
        self._lock = threading.Lock()
        self._snap: tuple[np.ndarray, np.ndarray] | None = None
        self.support_bound: int | None = None
        self.partial_sum_bound: float | None = None
        self._init_family()

    def _init_family(self):
        p = self.params
        if self.kind == "unit_basis":
            idx = int(p.get("index", -1))
            if idx < 0:
                raise FamilyError("unit_basis needs index >= 0")
            p["index"] = idx
            self.support_bound = idx
            self.partial_sum_bound = 1.0
        elif self.kind == "geometric":
            if "ratio" not in p:
                raise FamilyError("geometric series needs a ratio")
            p.setdefault("scale", 1.0)
        elif self.kind == "power":
            if "exponent" not in p:
                raise FamilyError("power series needs an exponent")
            p.setdefault("scale", 1.0)
        elif self.kind == "alternating":
            p.setdefault("scale", 1.0)
        elif self.kind == "bounded_partial_sums":
            gen = p.get("generator")
            if not isinstance(gen, dict) or "kind" not in gen:
                raise FamilyError("bounded_partial_sums needs a generator spec")
            info = _BOUNDED_GENERATORS.get(gen["kind"])
            if info is None:
                raise FamilyError(f"unknown partial-sum generator {gen['kind']!r}")
            bounded, bound = info
            if not bounded:
                raise FamilyError(
                    f"generator {gen['kind']!r} has unbounded partial sums"
                )
            self.partial_sum_bound = bound
        else:  # explicit
            vals = np.asarray(p.get("values", ()), dtype=np.float64)
            if vals.ndim != 1 or vals.size == 0:
                raise FamilyError("explicit series needs a non-empty list")
            if not np.all(np.isfinite(vals)):
                raise FamilyError("explicit series values must be finite")
            p["values"] = [float(x) for x in vals]
            self.support_bound = vals.size - 1
            prefix = np.cumsum(vals)
            self.partial_sum_bound = float(np.max(np.abs(prefix))) if vals.size else 0.0

    # -- constructors ------------------------------------------------

    @classmethod
    def unit_basis(cls, index: int) -> "SeriesView":
        return cls("unit_basis", index=index)

    @classmethod
    def geometric(cls, ratio: float, scale: float = 1.0) -> "SeriesView":
        return cls("geometric", ratio=float(ratio), scale=float(scale))

    @classmethod
    def power(cls, exponent: float, scale: float = 1.0) -> "SeriesView":
        return cls("power", exponent=float(exponent), scale=float(scale))

    @classmethod
    def alternating(cls, scale: float = 1.0) -> "SeriesView":
        return cls("alternating", scale=float(scale))

    @classmethod
    def explicit(cls, values) -> "SeriesView":
        return cls("explicit", values=list(values))

    @classmethod
    def zero(cls) -> "SeriesView":
        return cls("explicit", values=[0.0])

    # -- generation --------------------------------------------------

    def _raw_terms(self, hi: int) -> np.ndarray:
        v = np.arange(hi + 1, dtype=np.float64)
        p = self.params
        if self.kind == "unit_basis":
            a = np.zeros(hi + 1)
            if p["index"] <= hi:
                a[p["index"]] = 1.0
            return a
        if self.kind == "geometric":
            return p["scale"] * p["ratio"] ** v
        if self.kind == "power":
            return p["scale"] * (v + 1.0) ** p["exponent"]
        if self.kind == "alternating":
            return p["scale"] * np.where(v.astype(np.int64) % 2 == 0, 1.0, -1.0)
        if self.kind == "bounded_partial_sums":
            s = _generator_values(p["generator"], hi)
            a = np.empty(hi + 1)
            a[0] = s[0]
            a[1:] = s[1:] - s[:-1]
            return a
        vals = p["values"]
        a = np.zeros(hi + 1)
        upto = min(hi + 1, len(vals))
        a[:upto] = vals[:upto]
        return a

    def _ensure(self, hi: int) -> tuple[np.ndarray, np.ndarray]:
        snap = self._snap
        if snap is not None and snap[0].shape[0] > hi:
            return snap
        with self._lock:
            snap = self._snap
            if snap is not None and snap[0].shape[0] > hi:
                return snap
            target = _grow_target(hi, 0 if snap is None else snap[0].shape[0] - 1)
            a = self._raw_terms(target)
            if not np.all(np.isfinite(a)):
                bad = int(np.argmin(np.isfinite(a)))
                raise FamilyError(
                    f"{self.kind} series overflows float64 at index {bad}"
                )
            s = kahan_cumsum(a)
            a.setflags(write=False)
            s.setflags(write=False)
            new = (a, s)
            self._snap = new
            return new

    # -- access ------------------------------------------------------

    def term(self, v: int) -> float:
        if v < 0:
            raise FamilyError("term index must be >= 0")
        return float(self._ensure(v)[0][v])

    def terms(self, hi: int) -> np.ndarray:
        return self._ensure(hi)[0][: hi + 1]

    def partial_sum(self, n: int) -> float:
        """s_n = a_0 + ... + a_n; s_{-1} = 0 by convention."""
        if n < 0:
            if n == -1:
                return 0.0
            raise FamilyError("partial-sum index must be >= -1")
        return float(self._ensure(n)[1][n])

    def partials(self, hi: int) -> np.ndarray:
        return self._ensure(hi)[1][: hi + 1]

    def scaled_by(self, factor: float, hi: int) -> "SeriesView":
        """Explicit view of factor * a over [0, hi] (for norm-axiom tests)."""
        return SeriesView.explicit((factor * self.terms(hi)).tolist())

    def spec(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_spec(cls, spec: dict) -> "SeriesView":
        if not isinstance(spec, dict) or "kind" not in spec:
            raise FamilyError("series spec must be a dict with a 'kind'")
        d = dict(spec)
        kind = d.pop("kind")
        return cls(kind, **d)

    def __repr__(self):
        return f"SeriesView({self.spec()!r})"


def make_bounded_partial_sum_series(generator: dict) -> SeriesView:
    """Series whose partial sums equal a declared bounded generator.

    The resulting terms are a_0 = s_0 and a_v = s_v - s_{v-1}, so
    sup_v |a_0 + ... + a_v| <= the generator's declared bound, which is
    reported on the view.  Unbounded generators are rejected.
    """
    return SeriesView("bounded_partial_sums", generator=dict(generator))


def add_series(x: SeriesView, y: SeriesView, hi: int) -> SeriesView:
    """Explicit view of x + y over [0, hi]."""
    return SeriesView.explicit((x.terms(hi) + y.terms(hi)).tolist())
