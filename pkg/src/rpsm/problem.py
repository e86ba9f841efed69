"""Problem instances: a pantograph system plus its initial values.

Problem files are JSON objects::

    {"label": "...", "n": 2,
     "equations": ["u1 - u2 + u1(0.5*t) + exp(-t) - exp(0.5*t)", "..."],
     "initial": [1, 1], "t_end": 1.0,
     "exact": ["exp(t)", "exp(-t)"]}        # optional

Any linear term ``beta_i * u_i(t)`` is written into the equation text
directly; it needs no dedicated field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

from .expression import Expr, ParseError, parse, render, state_refs

__all__ = [
    "PantographSystem",
    "InitialValueSpec",
    "ProblemError",
    "validate_system",
    "check_problem",
    "problem_from_dict",
    "problem_to_dict",
    "load_problem",
    "dump_problem",
]


class ProblemError(ValueError):
    """A problem definition that cannot be solved as given."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class PantographSystem:
    """``u_i'(t) = rhs[i-1]`` for ``i = 1..n``.

    ``exact``, when given, holds closed-form solutions in ``t`` only.
    """

    n: int
    rhs: tuple[Expr, ...]
    exact: tuple[Expr, ...] | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if self.exact is not None:
            object.__setattr__(self, "exact", tuple(self.exact))

    @property
    def has_exact(self) -> bool:
        return self.exact is not None


@dataclass(frozen=True)
class InitialValueSpec:
    u0: tuple[float, ...]
    t_end: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "u0", tuple(float(x) for x in self.u0))
        object.__setattr__(self, "t_end", float(self.t_end))


def validate_system(sys: PantographSystem, init: InitialValueSpec | None = None) -> list[str]:
    """Collect every statically detectable defect; an empty list means valid."""
    out: list[str] = []
    if not isinstance(sys.n, int) or sys.n < 1:
        out.append(f"n must be a positive integer, got {sys.n!r}")
    if len(sys.rhs) != sys.n:
        out.append(f"expected {sys.n} right-hand sides, got {len(sys.rhs)}")
    for i, e in enumerate(sys.rhs, start=1):
        for ref in state_refs(e):
            if not 1 <= ref.index <= sys.n:
                out.append(f"equation {i}: state u{ref.index} outside 1..{sys.n}")
            if not 0.0 < ref.alpha <= 1.0:
                out.append(f"equation {i}: delay factor {ref.alpha!r} of u{ref.index} "
                           f"violates 0 < alpha <= 1")
    if sys.exact is not None:
        if len(sys.exact) != sys.n:
            out.append(f"expected {sys.n} exact solutions, got {len(sys.exact)}")
        for i, e in enumerate(sys.exact, start=1):
            if state_refs(e):
                out.append(f"exact solution {i} references a state; only t is allowed")
    if init is not None:
        if len(init.u0) != sys.n:
            out.append(f"expected {sys.n} initial values, got {len(init.u0)}")
        for i, x in enumerate(init.u0, start=1):
            if not math.isfinite(x):
                out.append(f"initial value {i} is not finite ({x!r})")
        if not (math.isfinite(init.t_end) and init.t_end > 0.0):
            out.append(f"t_end must be a positive finite number, got {init.t_end!r}")
    return out


def check_problem(sys: PantographSystem, init: InitialValueSpec | None = None) -> None:
    violations = validate_system(sys, init)
    if violations:
        raise ProblemError(violations)


def _parse_all(texts, n: int, what: str, problems: list[str]) -> list[Expr] | None:
    if not isinstance(texts, list):
        problems.append(f"'{what}' must be an array of strings")
        return None
    out = []
    for i, text in enumerate(texts, start=1):
        try:
            out.append(parse(text, n))
        except ParseError as exc:
            problems.append(f"{what}[{i}]: {exc}")
    return out


def problem_from_dict(d: Mapping[str, Any]) -> tuple[PantographSystem, InitialValueSpec]:
    problems: list[str] = []
    for key in ("n", "equations", "initial", "t_end"):
        if key not in d:
            problems.append(f"missing field '{key}'")
    if problems:
        raise ProblemError(problems)
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemError([f"'n' must be a positive integer, got {n!r}"])
    if d.get("t0", 0) != 0:
        problems.append("only problems posed at t0 = 0 are supported")
    rhs = _parse_all(d["equations"], n, "equations", problems)
    exact = None
    if d.get("exact") is not None:
        exact = _parse_all(d["exact"], n, "exact", problems)
    try:
        init = InitialValueSpec(tuple(d["initial"]), d["t_end"])
    except (TypeError, ValueError) as exc:
        problems.append(f"bad initial/t_end: {exc}")
        init = None
    if problems:
        raise ProblemError(problems)
    sys = PantographSystem(n, tuple(rhs), tuple(exact) if exact is not None else None,
                           str(d.get("label", "")))
    check_problem(sys, init)
    return sys, init


def problem_to_dict(sys: PantographSystem, init: InitialValueSpec) -> dict[str, Any]:
    d: dict[str, Any] = {
        "label": sys.label,
        "n": sys.n,
        "equations": [render(e) for e in sys.rhs],
        "initial": list(init.u0),
        "t_end": init.t_end,
    }
    if sys.exact is not None:
        d["exact"] = [render(e) for e in sys.exact]
    return d


def load_problem(path) -> tuple[PantographSystem, InitialValueSpec]:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError([f"{path}: invalid JSON ({exc})"]) from exc
    if not isinstance(d, dict):
        raise ProblemError([f"{path}: top level must be an object"])
    return problem_from_dict(d)


def dump_problem(sys: PantographSystem, init: InitialValueSpec) -> str:
    return json.dumps(problem_to_dict(sys, init), indent=2) + "\n"
