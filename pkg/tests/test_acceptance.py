"""Acceptance suite: one criterion per marker, summarised at the end of the run.

Published values below are transcribed verbatim from the source tables.
Bands: 1% relative for entries >= 1e-12 (5% for the residual column), a
factor of 5 below that, and "0.00" entries must come out below 1e-15.
"""

import time

import numpy as np
import pytest

from rpsm import series as ts
from rpsm.analysis import build_report, convergence_sweep
from rpsm.builtin import example, manufactured_polynomial_system
from rpsm.expression import eval_point
from rpsm.oracle import deviation, integrate, value_at
from rpsm.series import TruncatedSeries as S
from rpsm.solver import residual_series, solve, taylor_of_exact

GRID = [0.2, 0.4, 0.6, 0.8, 1.0]

# EX1_EXT[(i, K)] -> absolute errors on GRID
EX1_EXT = {
    (1, 4): [2.7582e-6, 9.1364e-5, 7.1880e-4, 3.1409e-3, 9.9485e-3],
    (1, 6): [2.6046e-9, 3.4209e-7, 6.0004e-6, 4.6173e-5, 2.2627e-4],
    (2, 4): [2.5803e-6, 7.9954e-5, 5.8836e-4, 2.4044e-3, 7.1206e-3],
    (2, 6): [2.4776e-9, 3.0952e-7, 5.1639e-6, 3.7791e-5, 1.7611e-4],
}

EX2_EXT = {
    (1, 2): [2.4107e-3, 1.7406e-2, 5.2953e-2, 1.1305e-1, 1.9877e-1],
    (1, 3): [1.0647e-5, 3.3898e-4, 2.5538e-3, 1.0650e-2, 3.2099e-2],
    (2, 2): [1.3306e-3, 1.0582e-2, 3.5358e-2, 8.2644e-2, 1.5853e-1],
    (2, 3): [2.6641e-6, 8.5009e-5, 6.4247e-4, 2.6894e-3, 8.1377e-3],
}

# EX3_K10[i][metric] -> values on GRID
EX3_K10 = {
    1: {
        "ext": [0.0, 3.50830e-14, 4.53548e-12, 1.42961e-10, 2.07625e-9],
        "rel": [0.0, 3.80898e-14, 5.49532e-12, 2.05195e-10, 3.84276e-9],
        "con": [0.0, 3.50830e-14, 4.54448e-12, 1.43464e-10, 2.08768e-9],
        "res": [0.0, 1.13243e-14, 9.75664e-13, 2.30886e-11, 2.68605e-10],
    },
    2: {
        "ext": [5.66214e-15, 1.15443e-11, 9.97050e-10, 2.35572e-8, 2.73497e-7],
        "rel": [2.88865e-14, 3.13343e-11, 2.01342e-9, 4.22653e-8, 5.06192e-7],
        "con": [5.66214e-15, 1.15584e-11, 9.99771e-10, 2.36716e-8, 2.75573e-7],
        "res": [3.10280e-13, 3.17401e-10, 1.82703e-8, 3.23628e-7, 3.00436e-6],
    },
    3: {
        "ext": [5.55112e-16, 1.04966e-12, 9.06788e-11, 2.14316e-9, 2.48923e-8],
        "rel": [2.79415e-15, 2.69546e-12, 1.60595e-10, 2.98758e-9, 2.95819e-8],
        "con": [5.27356e-16, 1.05077e-12, 9.08883e-11, 2.15196e-9, 2.50521e-8],
        "res": [2.25653e-14, 1.73516e-11, 6.69236e-10, 6.03226e-9, 2.07625e-9],
    },
}
# this cell repeats the u1 absolute error at t=1 verbatim; excluded
EXCLUDED = {(3, "res", 1.0)}


def within_band(got, want, rel=0.01):
    if want == 0.0:
        return abs(got) < 1e-15
    if want >= 1e-12:
        return abs(got - want) <= rel * want
    return want / 5 <= got <= want * 5


def mismatches(report, expected, rel=0.01, skip=()):
    bad = []
    for (i, metric), values in expected.items():
        for t, want in zip(GRID, values):
            if (i, metric, t) in skip:
                continue
            got = report.row(i, t).get(metric)
            if not within_band(got, want, rel):
                bad.append(f"u{i} {metric} t={t}: got {got:.6e}, want {want:.6e}")
    return bad


# --- 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1, "Example 1 absolute errors, K in {4, 6}, runtime < 1 s")
def test_example1_absolute_errors():
    start = time.perf_counter()
    sys, init = example(1)
    bad = []
    for K in (4, 6):
        rep = build_report(sys, init, K, GRID)
        bad += mismatches(rep, {(i, "ext"): EX1_EXT[i, K] for i in (1, 2)})
    elapsed = time.perf_counter() - start
    assert not bad, bad
    assert elapsed < 1.0


# --- 2 ---------------------------------------------------------------------------

@pytest.mark.criterion(2, "Example 2 absolute errors, K in {2, 3}")
def test_example2_absolute_errors():
    sys, init = example(2)
    bad = []
    for K in (2, 3):
        rep = build_report(sys, init, K, GRID)
        bad += mismatches(rep, {(i, "ext"): EX2_EXT[i, K] for i in (1, 2)})
    assert not bad, bad


# --- 3 ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def ex3_report():
    sys, init = example(3)
    return build_report(sys, init, 10, GRID)


@pytest.mark.criterion(3, "Example 3 error analysis at K = 10 (Ext, Rel, Con, Res)")
@pytest.mark.parametrize("metric", ["ext", "rel", "con", "res"])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_example3_error_analysis(ex3_report, i, metric):
    rel = 0.05 if metric == "res" else 0.01
    bad = mismatches(ex3_report, {(i, metric): EX3_K10[i][metric]}, rel, EXCLUDED)
    assert not bad, bad


def test_excluded_residual_cell_is_reproduced(ex3_report):
    # not part of the criterion: the excluded value happens to match anyway
    got = ex3_report.row(3, 1.0).res
    assert within_band(got, EX3_K10[3]["res"][4], 0.05)


# --- 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4, "RPSM coefficients equal Taylor coefficients of the closed forms, K <= 15")
@pytest.mark.parametrize("number", [1, 2, 3])
def test_coefficients_are_taylor(number):
    sys, init = example(number)
    for K in range(1, 16):
        sol = solve(sys, init, K)
        for got, want in zip(sol.components, taylor_of_exact(sys, K)):
            assert np.max(np.abs(got.coeffs - want.coeffs)) <= 1e-10, (K, got, want)
    if number == 1:
        c = solve(sys, init, 15).components[0].coeffs
        fact = np.cumprod([1.0, *range(1, 16)])
        assert np.max(np.abs(c - 1 / fact)) <= 1e-10


# --- 5 ---------------------------------------------------------------------------

@pytest.mark.criterion(5, "cubic manufactured system solved exactly for K >= 3")
@pytest.mark.parametrize("K", [3, 4, 7, 12])
def test_cubic_system_exact(K):
    polys = [[1.0, -2.0, 0.5, 0.25], [0.0, 1.0, 0.0, -3.0], [2.0, 0.0, 1.5, 1.0]]
    sys, init = manufactured_polynomial_system(polys, 0.5)
    sol = solve(sys, init, K)
    for r in residual_series(sys, sol):
        assert np.max(np.abs(r.coeffs)) <= 1e-13
    rep = build_report(sys, init, K, np.linspace(0.05, 2.0, 40))
    assert max(r.ext for r in rep.rows) <= 1e-12


# --- 6 ---------------------------------------------------------------------------

@pytest.mark.criterion(6, "leading residual coefficients vanish at K = 10")
@pytest.mark.parametrize("number", [1, 2, 3])
def test_residual_vanishing(number):
    sys, init = example(number)
    sol = solve(sys, init, 10)
    scale = float(np.max(np.abs(sol.coefficients())))
    for r in residual_series(sys, sol):
        assert np.max(np.abs(r.coeffs[:10])) <= 1e-10 * scale


# --- 7 ---------------------------------------------------------------------------

@pytest.mark.criterion(7, "RK4 oracle agrees with RPSM; order-4 step halving")
@pytest.mark.parametrize("number", [1, 2, 3])
def test_oracle_cross_check(number):
    sys, init = example(number)
    ref = integrate(sys, init, 1e-3, t_end=1.0)
    assert max(deviation(ref, solve(sys, init, 15), GRID)) <= 1e-8

    def endpoint_error(h):
        r = integrate(sys, init, h, t_end=1.0)
        return max(abs(value_at(r, j, 1.0) - eval_point(sys.exact[j - 1], 1.0))
                   for j in range(1, sys.n + 1))

    errs = [endpoint_error(0.1 / 2 ** k) for k in range(4)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(12 <= q <= 20 for q in ratios), ratios


# --- 8 ---------------------------------------------------------------------------

@pytest.mark.criterion(8, "Example 2 at t = 4: Ext strictly decreasing over K = 5..25")
def test_convergence_sweep():
    sys, init = example(2)
    rows = convergence_sweep(sys, init, [5, 10, 15, 20, 25], [4.0])
    for i in (1, 2):
        ext = [r.ext for r in rows if r.i == i]
        assert len(ext) == 5
        assert all(b < a for a, b in zip(ext, ext[1:])), ext


# --- 9 ---------------------------------------------------------------------------

CASES = 1000


def _random_series(rng, k, spread=10.0):
    return S(rng.uniform(-spread, spread, k + 1))


def _abs(a):
    return S(np.abs(a.coeffs))


def check_ring(rng):
    for _ in range(CASES):
        k = int(rng.integers(0, 13))
        a, b, c = (_random_series(rng, k) for _ in range(3))
        s = max(1.0, *(np.max(np.abs(x.coeffs)) for x in (a, b, c)))
        tol = 1e-12 * s ** 3 * (k + 1) ** 2
        assert np.all(np.abs(ts.mul(a, b).coeffs - ts.mul(b, a).coeffs) <= tol)
        lhs, rhs = ts.mul(ts.mul(a, b), c), ts.mul(a, ts.mul(b, c))
        assert np.all(np.abs(lhs.coeffs - rhs.coeffs) <= tol)
        lhs, rhs = ts.mul(a, ts.add(b, c)), ts.add(ts.mul(a, b), ts.mul(a, c))
        assert np.all(np.abs(lhs.coeffs - rhs.coeffs) <= tol)
        assert ts.mul(a, ts.constant(1.0, k)) == a


def check_pythagoras(rng):
    for _ in range(CASES):
        g = _random_series(rng, int(rng.integers(0, 16)), 3.0)
        s, c = ts.compose_sin_cos(g)
        one = ts.add(ts.mul(s, s), ts.mul(c, c))
        size = ts.add(ts.mul(_abs(s), _abs(s)), ts.mul(_abs(c), _abs(c))).coeffs
        expect = ts.constant(1.0, g.order).coeffs
        assert np.all(np.abs(one.coeffs - expect) <= 1e-12 * np.maximum(size, 1.0))


def check_div_mul(rng):
    for _ in range(CASES):
        k = int(rng.integers(0, 13))
        a, b = _random_series(rng, k), _random_series(rng, k)
        b0 = rng.choice([-1, 1]) * 10 ** rng.uniform(-6, 1)
        b = S([b0, *b.coeffs[1:]])
        q = ts.div(a, b)
        back = ts.mul(q, b)
        size = np.maximum(ts.mul(_abs(q), _abs(b)).coeffs, np.abs(a.coeffs))
        assert np.all(np.abs(back.coeffs - a.coeffs) <= 1e-10 * np.maximum(size, 1e-300))


def check_rescale(rng):
    for _ in range(CASES):
        a = _random_series(rng, int(rng.integers(0, 11)))
        t, alpha = rng.uniform(-1, 1), rng.uniform(1e-3, 1)
        lhs = ts.evaluate(ts.pantograph_rescale(a, alpha), t)
        rhs = ts.evaluate(a, alpha * t)
        bound = np.spacing(np.sum(np.abs(a.coeffs) * abs(alpha * t) ** np.arange(a.order + 1)))
        assert abs(lhs - rhs) <= 4 * bound + 1e-300


@pytest.fixture(scope="module")
def property_clock():
    spent = []
    yield spent
    assert sum(spent) < 5.0, f"property suite took {sum(spent):.2f} s"


@pytest.mark.criterion(9, "series property suite: 1000 randomized cases each, < 5 s total")
@pytest.mark.parametrize("check, seed", [(check_ring, 1), (check_pythagoras, 2),
                                         (check_div_mul, 3), (check_rescale, 4)],
                         ids=["ring", "pythagoras", "div-mul", "rescale"])
def test_series_properties(check, seed, property_clock):
    start = time.perf_counter()
    check(np.random.default_rng(seed))
    property_clock.append(time.perf_counter() - start)


@pytest.mark.criterion(9, "series property suite: 1000 randomized cases each, < 5 s total")
def test_series_properties_total_time(property_clock):
    assert len(property_clock) == 4
    assert sum(property_clock) < 5.0, property_clock
