import numpy as np
import pytest

from labopt import benchmarks as bm
from labopt.benchmarks import get_problem, problem_names, registry
from labopt.problem import evaluate

ENTRIES = registry()


@pytest.mark.parametrize("entry", ENTRIES, ids=[e.name for e in ENTRIES])
def test_known_argmin_reaches_known_best(entry):
    p = entry.problem()
    f, _ = evaluate(p, p.known_argmin)
    assert f == pytest.approx(entry.known_best, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("entry", ENTRIES, ids=[e.name for e in ENTRIES])
def test_random_points_not_below_known_best(entry, rng):
    p = entry.problem()
    X = rng.uniform(p.bounds.lower, p.bounds.upper, size=(2000, p.dim))
    assert np.all(p.objective_batch(X) >= entry.known_best - 1e-9)


@pytest.mark.parametrize("entry", ENTRIES, ids=[e.name for e in ENTRIES])
def test_batch_matches_single(entry, rng):
    p = entry.problem()
    X = rng.uniform(p.bounds.lower, p.bounds.upper, size=(5, p.dim))
    assert np.allclose(p.objective_batch(X), [p.objective_batch(x[None])[0] for x in X])


@pytest.mark.parametrize("func, x, expected", [
    (bm.sphere, [1.0, 2.0], 5.0),
    (bm.rastrigin, [1.0, 0.0], 1.0),
    (bm.ackley, [0.0, 0.0], 0.0),
    (bm.griewank, [0.0] * 3, 0.0),
    (bm.step, [0.4, -0.6, 1.5], 0.0 + 1.0 + 4.0),
    (bm.sum_squares, [1.0, 1.0], 3.0),
    (bm.booth, [1.0, 3.0], 0.0),
    (bm.matyas, [1.0, 1.0], 0.04),
    (bm.schwefel_1_2, [1.0, 2.0], 1.0 + 9.0),
    (bm.schwefel_2_22, [1.0, -2.0], 3.0 + 2.0),
    (bm.zakharov, [1.0, 0.0], 1.0 + 0.25 + 0.0625),
])
def test_hand_values(func, x, expected):
    assert func(np.array([x]))[0] == pytest.approx(expected)


def test_registry_lists_engineering_problems():
    names = problem_names()
    assert {"pressure_vessel", "spring", "welded_beam", "sphere30"} <= set(names)
    assert len(set(names)) == len(names)
    assert get_problem("spring").n_constraints == 4
    assert get_problem("welded_beam").n_constraints == 7
    pv = get_problem("pressure_vessel")
    assert pv.n_constraints == 4 and pv.discrete == {0: 0.0625, 1: 0.0625}


@pytest.mark.parametrize("name, x, f", [
    ("pressure_vessel", [0.8125, 0.4375, 42.098445595854923, 176.6365958424394], 6059.714335),
    ("spring", [0.051689061, 0.356717736, 11.288964], 0.012665233),
    ("welded_beam", [0.205729640, 3.470488666, 9.036623910, 0.205729640], 1.724852309),
])
def test_engineering_optima(name, x, f):
    p = get_problem(name)
    val, g = evaluate(p, np.array(x))
    assert val == pytest.approx(f, rel=1e-6)
    assert g.max() <= 1e-6
    assert p.known_best == pytest.approx(f, rel=1e-6)
