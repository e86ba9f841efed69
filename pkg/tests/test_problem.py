import json

import pytest

from rpsm.builtin import EXAMPLES, example, manufactured_polynomial_system
from rpsm.expression import Const, StateRef, parse
from rpsm.problem import (
    InitialValueSpec, PantographSystem, ProblemError, dump_problem, load_problem,
    problem_from_dict, validate_system,
)


@pytest.mark.parametrize("number", sorted(EXAMPLES))
def test_builtins_are_valid(number):
    sys, init = example(number)
    assert validate_system(sys, init) == []
    assert sys.n == len(init.u0) == len(sys.exact)


def test_example_texts_match_the_systems():
    # u1' = u1 - u2 + u1(t/2) + e^{-t} - e^{t/2}
    sys, init = example(1)
    assert sys.rhs[0] == parse("u1 - u2 + u1(0.5*t) + exp(-t) - exp(0.5*t)", 2)
    assert init.u0 == (1.0, 1.0)
    sys, init = example(3)
    assert sys.rhs[0] == parse("2*u2(0.5*t) + u3(t) - t*cos(0.5*t)", 3)
    assert init.u0 == (-1.0, 0.0, 0.0)


def test_violation_index_out_of_range():
    sys = PantographSystem(2, (StateRef(3), Const(0.0)))
    v = validate_system(sys, InitialValueSpec((0.0, 0.0)))
    assert len(v) == 1 and "u3" in v[0]


def test_violation_zero_delay():
    sys = PantographSystem(1, (StateRef(1, 0.0),))
    v = validate_system(sys, InitialValueSpec((1.0,)))
    assert len(v) == 1 and "0 < alpha <= 1" in v[0]


def test_all_violations_reported():
    sys = PantographSystem(2, (StateRef(3), StateRef(1, 2.0), Const(1.0)),
                           exact=(StateRef(1),))
    v = validate_system(sys, InitialValueSpec((1.0,), t_end=-1.0))
    assert len(v) == 7


def test_problem_file_round_trip(tmp_path):
    for number in EXAMPLES:
        sys, init = example(number)
        path = tmp_path / f"ex{number}.json"
        path.write_text(dump_problem(sys, init))
        sys2, init2 = load_problem(path)
        assert sys2 == sys and init2 == init


def test_manufactured_round_trip(tmp_path):
    sys, init = manufactured_polynomial_system([[1, -2, 0.5, 0.25], [0, 1, 0, -3]])
    path = tmp_path / "m.json"
    path.write_text(dump_problem(sys, init))
    assert load_problem(path) == (sys, init)


def test_problem_file_errors(tmp_path):
    good = dict(EXAMPLES[1])
    with pytest.raises(ProblemError, match="missing field 'equations'"):
        problem_from_dict({k: v for k, v in good.items() if k != "equations"})
    with pytest.raises(ProblemError, match="delay factor"):
        problem_from_dict({**good, "equations": ["u1(2*t)", "u2"]})
    with pytest.raises(ProblemError, match="t0 = 0"):
        problem_from_dict({**good, "t0": 1.0})
    with pytest.raises(ProblemError, match="initial values"):
        problem_from_dict({**good, "initial": [1.0]})
    with pytest.raises(ProblemError) as info:
        problem_from_dict({**good, "equations": ["u3", "foo"]})
    assert len(info.value.violations) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ProblemError, match="invalid JSON"):
        load_problem(bad)
    bad.write_text(json.dumps([1, 2]))
    with pytest.raises(ProblemError):
        load_problem(bad)


def test_unknown_example():
    with pytest.raises(ValueError):
        example(4)
