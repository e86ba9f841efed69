"""Residual power series solution of pantograph systems.

The k-th coefficient is fixed by requiring the (k-1)-th derivative of the
k-th residual to vanish at t = 0.  Since

    d^(k-1)/dt^(k-1) Res(0) = (k-1)! [t^(k-1)] Res

and the derivative term contributes ``k c[k]`` to ``[t^(k-1)] Res`` while the
right-hand side (which holds the states undifferentiated) does not see
``c[k]`` at that order, each step is explicit:

    c[i, k] = [t^(k-1)] rhs_i(partial state) / k
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import series as ts
from .expression import EvaluationError, eval_series
from .problem import InitialValueSpec, PantographSystem, check_problem
from .series import TruncatedSeries

__all__ = [
    "MAX_ORDER",
    "SolveError",
    "RpsmSolution",
    "solve",
    "residual_series",
    "residual_head",
    "taylor_of_exact",
]

# Beyond this, cancellation in the forcing-term recurrences starts to show.
MAX_ORDER = 25


class SolveError(ArithmeticError):
    """Numerical failure while building coefficients."""

    def __init__(self, message: str, equation: int | None = None, order: int | None = None):
        self.equation = equation
        self.order = order
        where = []
        if equation is not None:
            where.append(f"equation {equation}")
        if order is not None:
            where.append(f"order {order}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


@dataclass(frozen=True)
class RpsmSolution:
    order: int
    components: tuple[TruncatedSeries, ...]
    residual_head: tuple[float, ...]
    label: str = ""

    def __call__(self, i: int, t):
        """Value of component ``i`` (1-based) at ``t``."""
        return ts.evaluate(self.components[i - 1], t)

    def coefficients(self) -> np.ndarray:
        """``(n, order+1)`` coefficient array."""
        return np.vstack([c.coeffs for c in self.components])


def solve(sys: PantographSystem, init: InitialValueSpec, K: int,
          max_order: int | None = MAX_ORDER) -> RpsmSolution:
    """K-th truncated RPSM solution of ``sys`` with initial values ``init``.

    ``max_order`` caps ``K`` (pass ``None`` to lift the cap).
    """
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or K < 1:
        raise ValueError(f"order K must be an integer >= 1, got {K!r}")
    K = int(K)
    if max_order is not None and K > max_order:
        raise ValueError(f"order K = {K} exceeds the configured maximum {max_order}")
    check_problem(sys, init)
    n = sys.n
    coeffs = np.zeros((n, K + 1))
    coeffs[:, 0] = init.u0
    for k in range(1, K + 1):
        partial = [TruncatedSeries(coeffs[j, :k]) for j in range(n)]
        new = np.empty(n)
        for i, rhs in enumerate(sys.rhs):
            try:
                r = eval_series(rhs, partial, k - 1)
            except (EvaluationError, ts.SeriesError) as exc:
                raise SolveError(str(exc), i + 1, k) from exc
            new[i] = r.coeffs[k - 1] / k
        if not np.all(np.isfinite(new)):
            raise SolveError("non-finite coefficient", None, k)
        coeffs[:, k] = new
    comps = tuple(TruncatedSeries(coeffs[j]) for j in range(n))
    partial_sol = RpsmSolution(K, comps, (), sys.label)
    head = residual_head(residual_series(sys, partial_sol), K)
    return RpsmSolution(K, comps, head, sys.label)


def residual_series(sys: PantographSystem, sol: RpsmSolution) -> list[TruncatedSeries]:
    """``u_i' - rhs_i(u)`` as series of order ``sol.order``."""
    if len(sol.components) != sys.n:
        raise ValueError(f"solution has {len(sol.components)} components, system has {sys.n}")
    K = sol.order
    out = []
    for i, rhs in enumerate(sys.rhs):
        try:
            r = eval_series(rhs, sol.components, K)
        except EvaluationError as exc:
            raise SolveError(str(exc), i + 1, K) from exc
        out.append(ts.sub(ts.derivative(sol.components[i]).resize(K), r))
    return out


def residual_head(residuals, K: int) -> tuple[float, ...]:
    """Largest |coefficient| of orders 0..K-1 of each residual series."""
    return tuple(float(np.max(np.abs(r.coeffs[:K]))) if K > 0 else 0.0 for r in residuals)


def taylor_of_exact(sys: PantographSystem, K: int) -> list[TruncatedSeries]:
    """Order-K Taylor series of the attached closed-form solutions."""
    if sys.exact is None:
        raise ValueError(f"system {sys.label!r} has no closed-form solution attached")
    out = []
    for i, e in enumerate(sys.exact):
        try:
            out.append(eval_series(e, [], K))
        except EvaluationError as exc:
            raise SolveError(f"exact solution not analytic at 0: {exc}", i + 1, K) from exc
    return out
