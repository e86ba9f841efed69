"""Fixed-step RK4 reference solver for pantograph systems.

Each accepted step stores values and slopes at both ends, which defines a
cubic Hermite interpolant used for delayed lookups and dense output.  Since
``alpha t <= t``, a delayed argument lies either in a completed step or in
the step being taken.  The latter case is resolved by fixed-point iteration:
the current step's interpolant is first extrapolated from the previous step,
the step is taken, the interpolant rebuilt from the new endpoint, and the
step retaken until the endpoint settles.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expression import eval_point
from .problem import InitialValueSpec, PantographSystem, check_problem
from .series import evaluate

__all__ = [
    "OracleError",
    "ReferenceSolution",
    "integrate",
    "value_at",
    "deviation",
    "DEFAULT_STEP",
]

DEFAULT_STEP = 1e-3
STEP_RTOL = 1e-13
MAX_STEP_ITERATIONS = 25


class OracleError(ArithmeticError):
    pass


def _hermite(t0, h, y0, y1, m0, m1, s):
    th = (s - t0) / h
    th2 = th * th
    th3 = th2 * th
    h00 = 2 * th3 - 3 * th2 + 1
    h10 = th3 - 2 * th2 + th
    h01 = -2 * th3 + 3 * th2
    h11 = th3 - th2
    return h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1


@dataclass(frozen=True)
class ReferenceSolution:
    """Nodes ``t[0] = 0 < t[1] < ...`` with values ``y`` and slopes ``dy``.

    ``y`` and ``dy`` have shape ``(len(t), n)``.
    """

    h: float
    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    iterations: np.ndarray  # fixed-point sweeps used per step

    @property
    def t_last(self) -> float:
        return float(self.t[-1])

    def __call__(self, j: int, s: float) -> float:
        return value_at(self, j, s)


def _locate(nodes: Sequence[float], s: float) -> int:
    """Index k of the step [nodes[k], nodes[k+1]] containing ``s``."""
    k = bisect.bisect_right(nodes, s) - 1
    return min(max(k, 0), len(nodes) - 2)


def value_at(ref: ReferenceSolution, j: int, s: float) -> float:
    """Dense-output value of component ``j`` (1-based) at ``s``."""
    if not 0.0 <= s <= ref.t_last:
        raise OracleError(f"t = {s!r} outside the integrated range [0, {ref.t_last!r}]")
    t = ref.t
    if len(t) == 1:
        return float(ref.y[0, j - 1])
    k = _locate(t, s)
    if s == t[k]:
        return float(ref.y[k, j - 1])
    if s == t[k + 1]:
        return float(ref.y[k + 1, j - 1])
    return float(_hermite(t[k], t[k + 1] - t[k], ref.y[k, j - 1], ref.y[k + 1, j - 1],
                          ref.dy[k, j - 1], ref.dy[k + 1, j - 1], s))


def integrate(sys: PantographSystem, init: InitialValueSpec, h: float = DEFAULT_STEP,
              t_end: float | None = None) -> ReferenceSolution:
    """Integrate ``sys`` from 0 to ``t_end`` (default ``init.t_end``) with step ``h``.

    The last step is shortened to land on ``t_end`` exactly.
    """
    check_problem(sys, init)
    t_end = init.t_end if t_end is None else float(t_end)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"step h must be positive, got {h!r}")
    if h > t_end:
        raise ValueError(f"step h = {h!r} exceeds t_end = {t_end!r}")
    n = sys.n
    nsteps = max(1, math.ceil(t_end / h - 1e-9))
    nodes = [min(k * h, t_end) for k in range(nsteps + 1)]
    nodes[-1] = t_end

    ts_done: list[float] = [0.0]
    ys: list[np.ndarray] = [np.array(init.u0, dtype=float)]
    dys: list[np.ndarray] = []
    iters: list[int] = []

    def history(j, s):
        # only called for s inside completed steps
        if s <= 0.0 or len(ts_done) == 1:
            return ys[0][j - 1]
        k = _locate(ts_done, s)
        if s == ts_done[k]:
            return ys[k][j - 1]
        if s == ts_done[k + 1]:
            return ys[k + 1][j - 1]
        return _hermite(ts_done[k], ts_done[k + 1] - ts_done[k], ys[k][j - 1], ys[k + 1][j - 1],
                        dys[k][j - 1], dys[k + 1][j - 1], s)

    def rhs(tt, y, cur):
        # cur = (t0, h, y0, y1, m0, m1) tentative interpolant of the current step
        t0 = cur[0]

        def lookup(j, s):
            if s == tt:
                return y[j - 1]
            if s <= t0:
                return history(j, s)
            return _hermite(cur[0], cur[1], cur[2][j - 1], cur[3][j - 1],
                            cur[4][j - 1], cur[5][j - 1], s)

        return np.array([eval_point(e, tt, lookup) for e in sys.rhs])

    # slope at t = 0: every delayed argument is 0 there
    y0 = ys[0]
    m0 = rhs(0.0, y0, (0.0, 1.0, y0, y0, np.zeros(n), np.zeros(n)))
    dys.append(m0)

    prev = None  # interpolant data of the previous step, for extrapolation
    for k in range(nsteps):
        ta, tb = nodes[k], nodes[k + 1]
        hk = tb - ta
        ya, ma = ys[-1], dys[-1]
        # initial guess for the current step's interpolant
        if prev is None:
            yb_guess = ya + hk * ma
            mb_guess = ma
        else:
            pt0, ph, py0, py1, pm0, pm1 = prev
            yb_guess = np.array([_hermite(pt0, ph, py0[j], py1[j], pm0[j], pm1[j], tb)
                                 for j in range(n)])
            # derivative of the previous interpolant extrapolated to tb
            th = (tb - pt0) / ph
            dh00 = (6 * th * th - 6 * th) / ph
            dh10 = 3 * th * th - 4 * th + 1
            dh01 = (-6 * th * th + 6 * th) / ph
            dh11 = 3 * th * th - 2 * th
            mb_guess = dh00 * py0 + dh10 * pm0 + dh01 * py1 + dh11 * pm1
        cur = (ta, hk, ya, yb_guess, ma, mb_guess)
        yb = mb = None
        for it in range(1, MAX_STEP_ITERATIONS + 1):
            k1 = rhs(ta, ya, cur)
            k2 = rhs(ta + 0.5 * hk, ya + 0.5 * hk * k1, cur)
            k3 = rhs(ta + 0.5 * hk, ya + 0.5 * hk * k2, cur)
            k4 = rhs(tb, ya + hk * k3, cur)
            y_new = ya + (hk / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            m_new = rhs(tb, y_new, (ta, hk, ya, y_new, ma, cur[5]))
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(m_new))):
                raise OracleError(f"non-finite state at t = {tb!r}")
            converged = yb is not None and np.all(
                np.abs(y_new - yb) <= STEP_RTOL * np.maximum(np.abs(y_new), 1.0))
            yb, mb = y_new, m_new
            cur = (ta, hk, ya, yb, ma, mb)
            if converged:
                break
        else:
            raise OracleError(f"delay iteration did not converge on step [{ta!r}, {tb!r}] "
                              f"after {MAX_STEP_ITERATIONS} sweeps")
        ts_done.append(tb)
        ys.append(yb)
        dys.append(mb)
        iters.append(it)
        prev = cur

    return ReferenceSolution(float(h), np.array(ts_done), np.vstack(ys), np.vstack(dys),
                             np.array(iters, dtype=int))


def deviation(ref: ReferenceSolution, sol, grid: Sequence[float]) -> list[float]:
    """Per-component max over ``grid`` of |RPSM value - oracle value|."""
    out = []
    for j, comp in enumerate(sol.components, start=1):
        d = 0.0
        for t in grid:
            d = max(d, abs(evaluate(comp, t) - value_at(ref, j, t)))
        out.append(d)
    return out
