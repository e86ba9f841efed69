"""The three worked problems, with their closed-form solutions attached."""

from __future__ import annotations

from .expression import Add, Const, IntPow, Mul, Neg, StateRef, Sub, TimeVar
from .problem import InitialValueSpec, PantographSystem, problem_from_dict

EXAMPLES = {
    1: {
        "label": "Example 1: two-dimensional pantograph system",
        "n": 2,
        "equations": [
            "u1(t) - u2(t) + u1(0.5*t) + exp(-t) - exp(0.5*t)",
            "-u1(t) - u2(t) - u2(0.5*t) + exp(t) + exp(-0.5*t)",
        ],
        "initial": [1.0, 1.0],
        "t_end": 1.0,
        "exact": ["exp(t)", "exp(-t)"],
    },
    2: {
        "label": "Example 2: nonlinear multi-pantograph system",
        "n": 2,
        "equations": [
            "-u1(t) - exp(-t)*cos(0.5*t)*u2(0.5*t)"
            " - 2*exp(-0.75*t)*cos(0.5*t)*sin(0.25*t)*u1(0.25*t)",
            "exp(t)*u1(0.5*t)^2 - u2(0.5*t)^2",
        ],
        "initial": [1.0, 0.0],
        "t_end": 8.0,
        "exact": ["exp(-t)*cos(t)", "sin(t)"],
    },
    3: {
        "label": "Example 3: three-dimensional pantograph system",
        "n": 3,
        "equations": [
            "2*u2(0.5*t) + u3(t) - t*cos(0.5*t)",
            "1 - t*sin(t) - 2*u3(0.5*t)^2",
            "u2(t) - u1(t) - t*cos(t)",
        ],
        "initial": [-1.0, 0.0, 0.0],
        "t_end": 1.0,
        "exact": ["-cos(t)", "t*cos(t)", "sin(t)"],
    },
}


def example(number: int) -> tuple[PantographSystem, InitialValueSpec]:
    try:
        spec = EXAMPLES[number]
    except KeyError:
        raise ValueError(f"no built-in example {number!r}; choose from {sorted(EXAMPLES)}") from None
    return problem_from_dict(spec)


def _poly_expr(coeffs, alpha: float = 1.0):
    """Expression for ``sum_m coeffs[m] (alpha t)^m``."""
    terms = []
    for m, c in enumerate(coeffs):
        c = float(c) * alpha ** m
        if c == 0.0:
            continue
        mono = Const(abs(c))
        if m == 1:
            mono = Mul(mono, TimeVar())
        elif m > 1:
            mono = Mul(mono, IntPow(TimeVar(), m))
        terms.append((c < 0, mono))
    if not terms:
        return Const(0.0)
    neg, e = terms[0]
    e = Neg(e) if neg else e
    for neg, mono in terms[1:]:
        e = Sub(e, mono) if neg else Add(e, mono)
    return e


def manufactured_polynomial_system(polys, alpha: float = 0.5, label: str = ""):
    """System whose exact solution is the given polynomials.

    ``rhs_i = p_i'(t) + (u_i(alpha t) - p_i(alpha t))``; the bracket vanishes
    on the solution, so ``u_i = p_i`` with ``u_i(0) = p_i[0]``.
    """
    rhs = []
    exact = []
    n = len(polys)
    for i, p in enumerate(polys, start=1):
        dp = [m * c for m, c in enumerate(p)][1:] or [0.0]
        bracket = Sub(StateRef(i, alpha), _poly_expr(p, alpha))
        rhs.append(Add(_poly_expr(dp), bracket))
        exact.append(_poly_expr(p))
    sys = PantographSystem(n, tuple(rhs), tuple(exact),
                           label or f"manufactured polynomial system (alpha={alpha})")
    init = InitialValueSpec(tuple(float(p[0]) for p in polys), 2.0)
    return sys, init
