"""Error metrics and report tables for truncated RPSM solutions.

Per component ``i`` and time ``t``:

* residual    ``|u_{i,K}'(t) - rhs_i(t, u_K(alpha t) ...)|`` (forcing evaluated exactly)
* exact       ``|u_i(t) - u_{i,K}(t)|``
* relative    exact / ``|u_i(t)|``, :data:`UNDEFINED` where ``u_i(t) == 0``
* consecutive ``|u_{i,K+1}(t) - u_{i,K}(t)|``
* remainder   ``u_i(t) - u_{i,K}(t)`` (signed)

``u_i`` is the baseline: the closed form when the system carries one,
otherwise the RK4 oracle.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import series as ts
from .expression import eval_point
from .oracle import DEFAULT_STEP, ReferenceSolution, deviation, integrate, value_at
from .problem import InitialValueSpec, PantographSystem
from .solver import RpsmSolution, solve

__all__ = [
    "UNDEFINED",
    "METRICS",
    "Baseline",
    "closed_form_baseline",
    "oracle_baseline",
    "residual_error_at",
    "exact_error_at",
    "relative_error_at",
    "remainder_at",
    "consecutive_error_at",
    "ErrorRow",
    "ErrorReport",
    "ReportOptions",
    "build_report",
    "SweepRow",
    "convergence_sweep",
    "check_grid",
    "report_to_csv",
    "report_to_markdown",
    "sweep_to_csv",
]

METRICS = ("res", "ext", "rel", "con", "rem")


class _Undefined:
    """Relative error at a point where the baseline vanishes."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __str__(self):
        return "undef"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class Baseline:
    """Reference values ``value(i, t)`` for error metrics; ``kind`` is 'exact' or 'oracle'."""

    kind: str
    value: Callable[[int, float], float]


def closed_form_baseline(sys: PantographSystem) -> Baseline:
    if sys.exact is None:
        raise ValueError(f"system {sys.label!r} has no closed-form solution")
    exact = sys.exact
    return Baseline("exact", lambda i, t: eval_point(exact[i - 1], t))


def oracle_baseline(ref: ReferenceSolution) -> Baseline:
    return Baseline("oracle", lambda i, t: value_at(ref, i, t))


def _as_baseline(b) -> Baseline:
    if isinstance(b, Baseline):
        return b
    if isinstance(b, ReferenceSolution):
        return oracle_baseline(b)
    if isinstance(b, PantographSystem):
        return closed_form_baseline(b)
    raise TypeError(f"cannot use {type(b).__name__} as a baseline")


def _state_lookup(sol: RpsmSolution):
    comps = sol.components
    return lambda j, s: ts.evaluate(comps[j - 1], s)


def residual_error_at(sys: PantographSystem, sol: RpsmSolution, i: int, t: float) -> float:
    du = ts.evaluate(ts.derivative(sol.components[i - 1]), t)
    return abs(du - eval_point(sys.rhs[i - 1], t, _state_lookup(sol)))


def remainder_at(baseline, sol: RpsmSolution, i: int, t: float) -> float:
    b = _as_baseline(baseline)
    return b.value(i, t) - ts.evaluate(sol.components[i - 1], t)


def exact_error_at(baseline, sol: RpsmSolution, i: int, t: float) -> float:
    return abs(remainder_at(baseline, sol, i, t))


def relative_error_at(baseline, sol: RpsmSolution, i: int, t: float):
    b = _as_baseline(baseline)
    u = b.value(i, t)
    if u == 0.0:
        return UNDEFINED
    return abs(u - ts.evaluate(sol.components[i - 1], t)) / abs(u)


def consecutive_error_at(sol_K: RpsmSolution, sol_K1: RpsmSolution, i: int, t: float) -> float:
    if sol_K1.order != sol_K.order + 1:
        raise ValueError(f"consecutive error needs orders K and K+1, got {sol_K.order} "
                         f"and {sol_K1.order}")
    return abs(ts.evaluate(sol_K1.components[i - 1], t) - ts.evaluate(sol_K.components[i - 1], t))


@dataclass(frozen=True)
class ErrorRow:
    i: int
    t: float
    res: float | None = None
    ext: float | None = None
    rel: object = None  # float, UNDEFINED or None
    con: float | None = None
    rem: float | None = None

    def get(self, metric: str):
        return getattr(self, metric)


@dataclass
class ErrorReport:
    label: str
    K: int
    n: int
    grid: tuple[float, ...]
    rows: list[ErrorRow] = field(default_factory=list)
    baseline_kind: str = "none"
    metrics: tuple[str, ...] = METRICS
    metadata: dict = field(default_factory=dict)

    def row(self, i: int, t: float) -> ErrorRow:
        for r in self.rows:
            if r.i == i and r.t == t:
                return r
        raise KeyError((i, t))

    def column(self, i: int, metric: str) -> list:
        return [r.get(metric) for r in self.rows if r.i == i]


@dataclass(frozen=True)
class ReportOptions:
    metrics: tuple[str, ...] = METRICS
    use_oracle: bool = False  # run the oracle even when a closed form exists
    oracle_h: float = DEFAULT_STEP


def check_grid(grid: Sequence[float], t_end: float) -> tuple[float, ...]:
    g = tuple(float(t) for t in grid)
    for a, b in zip(g, g[1:]):
        if not b > a:
            raise ValueError(f"grid must be strictly increasing ({a!r} then {b!r})")
    if g and not g[0] > 0.0:
        raise ValueError(f"grid start must exceed 0 (t in (t0, T]), got {g[0]!r}")
    if g and g[-1] > t_end * (1 + 1e-12):
        raise ValueError(f"grid end {g[-1]!r} exceeds t_end = {t_end!r}")
    return g


def build_report(sys: PantographSystem, init: InitialValueSpec, K: int,
                 grid: Sequence[float], options: ReportOptions | None = None) -> ErrorReport:
    opts = options or ReportOptions()
    bad = [m for m in opts.metrics if m not in METRICS]
    if bad:
        raise ValueError(f"unknown metrics {bad}; choose from {METRICS}")
    g = check_grid(grid, init.t_end)
    metrics = tuple(m for m in METRICS if m in opts.metrics)
    report = ErrorReport(sys.label, K, sys.n, g, metrics=metrics)
    sol = solve(sys, init, K)
    report.metadata["residual_head"] = list(sol.residual_head)

    need_baseline = any(m in metrics for m in ("ext", "rel", "rem"))
    baseline = None
    if sys.exact is not None:
        baseline = closed_form_baseline(sys)
    if g and (opts.use_oracle or (need_baseline and baseline is None)):
        ref = integrate(sys, init, opts.oracle_h, t_end=g[-1])
        report.metadata["oracle_h"] = opts.oracle_h
        report.metadata["oracle_deviation"] = deviation(ref, sol, g)
        if baseline is None:
            baseline = oracle_baseline(ref)
    if baseline is not None and need_baseline:
        report.baseline_kind = baseline.kind

    sol1 = solve(sys, init, K + 1, max_order=None) if "con" in metrics else None
    for i in range(1, sys.n + 1):
        for t in g:
            vals = {}
            if "res" in metrics:
                vals["res"] = residual_error_at(sys, sol, i, t)
            if baseline is not None:
                rem = remainder_at(baseline, sol, i, t)
                u = baseline.value(i, t)
                if "ext" in metrics:
                    vals["ext"] = abs(rem)
                if "rel" in metrics:
                    vals["rel"] = UNDEFINED if u == 0.0 else abs(rem) / abs(u)
                if "rem" in metrics:
                    vals["rem"] = rem
            if sol1 is not None:
                vals["con"] = consecutive_error_at(sol, sol1, i, t)
            report.rows.append(ErrorRow(i, t, **vals))
    return report


@dataclass(frozen=True)
class SweepRow:
    K: int
    t: float
    i: int
    ext: float
    value: float


def convergence_sweep(sys: PantographSystem, init: InitialValueSpec, orders: Iterable[int],
                      t_samples: Sequence[float], baseline=None,
                      oracle_h: float = DEFAULT_STEP) -> list[SweepRow]:
    """Exact error of ``u_{i,K}`` for each ``K`` in ``orders`` and each sample time.

    Rows come out in (K, t, i) order with ``K`` ascending.
    """
    ks = sorted(set(int(k) for k in orders))
    if not ks:
        raise ValueError("at least one order is required")
    samples = [float(t) for t in t_samples]
    if baseline is None:
        if sys.exact is not None:
            baseline = closed_form_baseline(sys)
        else:
            t_max = max(samples) if samples else init.t_end
            baseline = oracle_baseline(integrate(sys, init, oracle_h, t_end=t_max))
    baseline = _as_baseline(baseline)
    rows = []
    for K in ks:
        sol = solve(sys, init, K, max_order=None)
        for t in samples:
            for i in range(1, sys.n + 1):
                v = ts.evaluate(sol.components[i - 1], t)
                rows.append(SweepRow(K, t, i, abs(baseline.value(i, t) - v), v))
    return rows


# --- serialization ---------------------------------------------------------

def _csv_cell(x) -> str:
    if x is None:
        return ""
    if x is UNDEFINED:
        return "undef"
    return repr(float(x))


def report_to_csv(report: ErrorReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "i", "K", "t", *METRICS, "baseline_kind"])
    for r in report.rows:
        w.writerow([report.label, r.i, report.K, repr(r.t),
                    *(_csv_cell(r.get(m)) for m in METRICS), report.baseline_kind])
    return buf.getvalue()


_HEADERS = {
    "ext": "Absolute error",
    "rel": "Relative error",
    "con": "Consecutive error",
    "res": "Residual error",
    "rem": "Remainder",
}
_MD_ORDER = ("ext", "rel", "con", "res", "rem")


def _sci(x) -> str:
    if x is None:
        return ""
    if x is UNDEFINED:
        return "undef"
    return f"{x:.4e}"


def report_to_markdown(report: ErrorReport) -> str:
    cols = [m for m in _MD_ORDER if m in report.metrics
            and any(r.get(m) is not None for r in report.rows)]
    lines = [f"# {report.label}" if report.label else "# Error report",
             "",
             f"order K = {report.K}, baseline: {report.baseline_kind}"]
    dev = report.metadata.get("oracle_deviation")
    if dev is not None:
        lines.append("oracle deviation (max |RPSM - RK4|): "
                     + ", ".join(f"u{i}: {_sci(d)}" for i, d in enumerate(dev, start=1)))
    for i in range(1, report.n + 1):
        header = ["t", *(_HEADERS[m] for m in cols)]
        body = [[repr(r.t), *(_sci(r.get(m)) for m in cols)] for r in report.rows if r.i == i]
        widths = [max(len(h), *(len(row[k]) for row in body)) if body else len(h)
                  for k, h in enumerate(header)]
        lines += ["", f"## u{i}(t)", ""]
        lines.append("| " + " | ".join(h.ljust(w) for h, w in zip(header, widths)) + " |")
        lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
        for row in body:
            lines.append("| " + " | ".join(c.rjust(w) for c, w in zip(row, widths)) + " |")
    return "\n".join(lines) + "\n"


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["K", "t", "i", "ext", "value"])
    for r in rows:
        w.writerow([r.K, repr(r.t), r.i, repr(r.ext), repr(r.value)])
    return buf.getvalue()
