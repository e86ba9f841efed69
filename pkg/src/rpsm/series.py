"""Truncated power series about t = 0.

A :class:`TruncatedSeries` of order ``K`` holds the Taylor coefficients
``c[0] .. c[K]`` of a function, so that ``c[m]`` multiplies ``t**m``.  It is
the single value type used by the solver: solution components, residuals
and forcing terms are all truncated series.

Truncation policy:

* binary operations zero-pad the shorter operand to the longer order;
* compositions (``exp``, ``ln``, ``sin``/``cos``, integer powers) keep the
  order of their argument;
* ``mul`` and ``div`` accept an explicit ``order`` to pad or truncate.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SeriesError",
    "SeriesDomainError",
    "SeriesDivisionError",
    "TruncatedSeries",
    "from_coeffs",
    "constant",
    "variable",
    "zeros",
    "add",
    "sub",
    "negate",
    "scale",
    "mul",
    "div",
    "compose_exp",
    "compose_ln",
    "compose_sin_cos",
    "int_pow",
    "pantograph_rescale",
    "derivative",
    "evaluate",
]

# Smallest constant term accepted as a divisor.
DIV_GUARD = 1e-300


class SeriesError(ValueError):
    """Invalid construction or a non-finite result."""


class SeriesDomainError(SeriesError):
    """Argument outside the domain of a series operation."""


class SeriesDivisionError(SeriesDomainError):
    """Division by a series whose constant term vanishes."""


class TruncatedSeries:
    """Immutable truncated power series with float64 coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float]):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=np.float64).ravel()
        if c.size == 0:
            raise SeriesError("a truncated series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise SeriesError(f"non-finite coefficient in series: {c.tolist()}")
        c.flags.writeable = False
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, m):
        return self._c[m]

    def __iter__(self):
        return iter(self._c.tolist())

    def __repr__(self) -> str:
        return f"TruncatedSeries({self._c.tolist()!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._c.size == other._c.size and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def tolist(self) -> list[float]:
        return self._c.tolist()

    def resize(self, order: int) -> "TruncatedSeries":
        """Zero-pad or truncate to ``order``."""
        if order < 0:
            raise SeriesError(f"order must be nonnegative, got {order}")
        if order == self.order:
            return self
        out = np.zeros(order + 1)
        n = min(order, self.order) + 1
        out[:n] = self._c[:n]
        return TruncatedSeries(out)

    def __call__(self, t):
        return evaluate(self, t)

    # Operator sugar; scalars are promoted to constant series.
    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _lift(other))

    def __rsub__(self, other):
        return sub(_lift(other), self)

    def __neg__(self):
        return negate(self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return div(self, constant(other))
        return div(self, other)

    def __rtruediv__(self, other):
        return div(_lift(other), self)

    def __pow__(self, p: int):
        return int_pow(self, p)


def _lift(x) -> TruncatedSeries:
    if isinstance(x, TruncatedSeries):
        return x
    return constant(float(x))


def from_coeffs(coeffs: Sequence[float]) -> TruncatedSeries:
    return TruncatedSeries(coeffs)


def constant(c: float, order: int = 0) -> TruncatedSeries:
    out = np.zeros(order + 1)
    out[0] = c
    return TruncatedSeries(out)


def variable(order: int = 1) -> TruncatedSeries:
    """The series of ``t`` itself, padded to ``order`` (at least 1)."""
    out = np.zeros(max(order, 1) + 1)
    out[1] = 1.0
    return TruncatedSeries(out)


def zeros(order: int) -> TruncatedSeries:
    return TruncatedSeries(np.zeros(order + 1))


def _padded(a: TruncatedSeries, order: int) -> np.ndarray:
    out = np.zeros(order + 1)
    n = min(order, a.order) + 1
    out[:n] = a.coeffs[:n]
    return out


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    k = max(a.order, b.order)
    return TruncatedSeries(_padded(a, k) + _padded(b, k))


def sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    k = max(a.order, b.order)
    return TruncatedSeries(_padded(a, k) - _padded(b, k))


def negate(a: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(-a.coeffs)


def scale(a: TruncatedSeries, s: float) -> TruncatedSeries:
    return TruncatedSeries(a.coeffs * s)


def mul(a: TruncatedSeries, b: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """Cauchy product; result order is ``max(a.order, b.order)`` unless given."""
    k = max(a.order, b.order) if order is None else order
    full = np.convolve(a.coeffs, b.coeffs)
    out = np.zeros(k + 1)
    n = min(k + 1, full.size)
    out[:n] = full[:n]
    return TruncatedSeries(out)


def div(a: TruncatedSeries, b: TruncatedSeries, order: int | None = None) -> TruncatedSeries:
    """Quotient ``q`` with ``q * b == a`` through the result order.

    Uses the forward recurrence ``q[m] = (a[m] - sum_{j=1..m} b[j] q[m-j]) / b[0]``.
    """
    b0 = b.coeffs[0]
    if abs(b0) <= DIV_GUARD:
        raise SeriesDivisionError(
            f"division by a series with zero constant term (b[0] = {b0!r})")
    k = max(a.order, b.order) if order is None else order
    av = _padded(a, k)
    bv = _padded(b, k)
    q = np.zeros(k + 1)
    for m in range(k + 1):
        # bv[1:m+1] against q[m-1], ..., q[0]
        acc = av[m] - np.dot(bv[1:m + 1], q[m - 1::-1][:m]) if m else av[0]
        q[m] = acc / b0
    return TruncatedSeries(q)


def _weighted(g: np.ndarray, k: int) -> np.ndarray:
    # j * g[j] for j = 0..k; index 0 is unused by the recurrences.
    return np.arange(k + 1) * g


def compose_exp(g: TruncatedSeries) -> TruncatedSeries:
    """``exp(g)`` via ``E[m] = (1/m) sum_{j=1..m} j g[j] E[m-j]``."""
    k = g.order
    gv = g.coeffs
    jg = _weighted(gv, k)
    e = np.zeros(k + 1)
    e[0] = math.exp(gv[0]) if gv[0] < 709.0 else math.inf
    for m in range(1, k + 1):
        e[m] = np.dot(jg[1:m + 1], e[m - 1::-1][:m]) / m
    return TruncatedSeries(e)


def compose_ln(g: TruncatedSeries) -> TruncatedSeries:
    """Natural logarithm of ``g``; requires ``g[0] > 0``."""
    gv = g.coeffs
    g0 = gv[0]
    if not g0 > 0.0:
        raise SeriesDomainError(f"ln of a series with non-positive constant term ({g0!r})")
    k = g.order
    out = np.zeros(k + 1)
    out[0] = math.log(g0)
    jl = np.zeros(k + 1)
    for m in range(1, k + 1):
        # m L[m] g0 = m g[m] - sum_{j=1..m-1} j L[j] g[m-j]
        acc = np.dot(jl[1:m], gv[m - 1:0:-1]) if m > 1 else 0.0
        out[m] = (gv[m] - acc / m) / g0
        jl[m] = m * out[m]
    return TruncatedSeries(out)


def compose_sin_cos(g: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries]:
    """``(sin(g), cos(g))`` from the coupled system ``S' = g' C``, ``C' = -g' S``."""
    k = g.order
    gv = g.coeffs
    jg = _weighted(gv, k)
    s = np.zeros(k + 1)
    c = np.zeros(k + 1)
    s[0] = math.sin(gv[0])
    c[0] = math.cos(gv[0])
    for m in range(1, k + 1):
        w = jg[1:m + 1]
        s[m] = np.dot(w, c[m - 1::-1][:m]) / m
        c[m] = -np.dot(w, s[m - 1::-1][:m]) / m
    return TruncatedSeries(s), TruncatedSeries(c)


def int_pow(g: TruncatedSeries, p: int) -> TruncatedSeries:
    """``g**p`` for a nonnegative integer ``p`` by repeated squaring."""
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)) or p < 0:
        raise SeriesDomainError(f"exponent must be a nonnegative integer, got {p!r}")
    result = constant(1.0, g.order)
    base = g
    p = int(p)
    while p:
        if p & 1:
            result = mul(result, base)
        p >>= 1
        if p:
            base = mul(base, base)
    return result


def pantograph_rescale(a: TruncatedSeries, alpha: float) -> TruncatedSeries:
    """Series of ``u(alpha t)`` given the series of ``u(t)``."""
    if not 0.0 < alpha <= 1.0:
        raise SeriesDomainError(f"delay factor must satisfy 0 < alpha <= 1, got {alpha!r}")
    if alpha == 1.0:
        return a
    return TruncatedSeries(a.coeffs * np.power(alpha, np.arange(a.order + 1)))


def derivative(a: TruncatedSeries) -> TruncatedSeries:
    if a.order == 0:
        return zeros(0)
    return TruncatedSeries(a.coeffs[1:] * np.arange(1, a.order + 1))


def evaluate(a: TruncatedSeries, t):
    """Horner evaluation; ``t`` may be a float or an ndarray."""
    c = a.coeffs
    if np.ndim(t) == 0:
        t = float(t)
        r = 0.0
        for cm in reversed(c.tolist()):
            r = r * t + cm
        return r
    t = np.asarray(t, dtype=np.float64)
    r = np.zeros_like(t)
    for cm in c[::-1]:
        r = r * t + cm
    return r
