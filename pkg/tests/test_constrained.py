import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labopt.benchmarks import get_problem
from labopt.constrained import (
    ConstrainedLAB,
    feasibility_gate,
    feasible_init,
    leader_probabilities,
    optimize_constrained,
    step_size_sigma,
    update_advocate,
    update_global_leader,
    update_local_leader,
)
from labopt.cssr import ClusterBox
from labopt.exceptions import InfeasibleRegion
from labopt.population import ConstrainedConfig, LabConfig
from labopt.problem import FEAS_TOL, problem_from_dict

SMALL = ConstrainedConfig(base=LabConfig(n=3, G=10, max_iter=100, seed=0))


@pytest.mark.parametrize("f, expected", [([1, 1], [0.5, 0.5]), ([1, 3], [0.75, 0.25]), ([5] * 5, [0.2] * 5)])
def test_leader_probabilities(f, expected):
    assert np.allclose(leader_probabilities(f), expected, atol=1e-15)


def test_directed_moves():
    assert np.allclose(update_advocate([0.0, 0.0], [1.0, 1.0], 0.5), [0.5, 0.5])
    assert np.allclose(update_advocate([0.3, 7.0], [1.0, 1.0], 1.0), [1.0, 1.0])
    assert np.allclose(update_advocate([2.0, 2.0], [2.0, 2.0], 0.37), [2.0, 2.0])
    assert np.allclose(update_local_leader([2.0], [0.0], 0.25), [1.5])
    assert np.allclose(update_local_leader([2.0], [0.0], 1.0), [0.0])
    assert np.allclose(update_advocate([0.0], [4.0], 0.5, [0.0], [1.0]), [1.0])


def test_zero_omega_is_identity():
    a, L = np.array([1.0, -2.0]), np.array([3.0, 5.0])
    assert np.array_equal(update_advocate(a, L, 0.0), a)
    assert np.array_equal(update_local_leader(a, L, 0.0), a)


def test_global_leader_cannot_use_local_rule():
    gl = np.array([1.0, 2.0])
    with pytest.raises(ValueError):
        update_local_leader(gl, gl, 0.5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=1, max_size=6),
       st.floats(0.0, 1.0))
def test_moves_stay_on_segment(pairs, omega):
    a, L = np.array(pairs).T
    tol = 1e-9 * (1 + np.abs(a) + np.abs(L))
    for new in (update_advocate(a, L, omega), update_local_leader(a, L, omega)):
        assert np.all(new >= np.minimum(a, L) - tol) and np.all(new <= np.maximum(a, L) + tol)


def test_sigma_schedule():
    assert step_size_sigma(0.8, 0, 100) == 0.8
    assert step_size_sigma(0.8, 100, 100) == pytest.approx(0.4)
    s = [step_size_sigma(0.8, k, 100) for k in range(1000)]
    assert np.all(np.diff(s) < 0)
    with pytest.raises(ValueError):
        step_size_sigma(0.8, -1, 100)
    with pytest.raises(ValueError):
        step_size_sigma(0.8, 1, 0.5)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1.0), st.floats(1.0, 1e4), st.integers(0, 10_000))
def test_sigma_decays(omega, beta, it):
    s0, s1 = step_size_sigma(omega, it, beta), step_size_sigma(omega, it + 1, beta)
    assert 0 < s1 < s0 <= omega


def test_global_leader_perturbation(rng):
    gl = np.array([5.0, 5.0])
    assert np.allclose(update_global_leader(gl, [0.0, 0.0], [10.0, 10.0], 0.0, rng), gl)
    moves = np.array([update_global_leader(gl, [-100.0] * 2, [110.0] * 2, 0.5, rng) - gl for _ in range(10_000)])
    assert np.all(np.abs(moves) <= 105.0 + 1e-9)
    se = moves.std(axis=0) / np.sqrt(len(moves))
    assert np.all(np.abs(moves.mean(axis=0)) <= 4 * se)


def test_global_leader_displacement_scale():
    class FixedRng:
        def uniform(self, lo, hi, shape):
            return np.ones(shape)

    out = update_global_leader(np.array([0.0]), np.array([-5.0]), np.array([5.0]), 0.5, FixedRng())
    assert out[0] == pytest.approx(5.0)


def _line_problem():
    # minimise x subject to x >= 0.5 on [0, 1]
    return problem_from_dict({"dim": 1, "lower": 0, "upper": 1, "objective": "x1", "constraints": ["x1 >= 0.5"]})


def test_feasibility_gate():
    p = _line_problem()
    x, f, ok = feasibility_gate(p, np.array([0.6]), 0.6, np.array([0.4]))
    assert not ok and x[0] == 0.6 and f == 0.6
    x, f, ok = feasibility_gate(p, np.array([0.6]), 0.6, np.array([0.5]))
    assert ok and x[0] == 0.5  # boundary point is feasible
    x, f, ok = feasibility_gate(p, np.array([0.6]), 0.6, np.array([0.9]))
    assert ok and f == 0.9  # feasible but worse: still accepted


def test_feasible_init(rng):
    p = _line_problem()
    X, F, drawn = feasible_init(p, [0.5], [1.0], 50, 10, rng)
    assert X.shape == (50, 1) and 50 <= drawn <= 50 * 10 and np.all(X >= 0.5)
    X, F, drawn = feasible_init(p, [0.0], [1.0], 100, 1000, rng)
    assert np.all(X >= 0.5)
    with pytest.raises(InfeasibleRegion):
        feasible_init(p, [0.0], [0.4], 5, 100, rng)


def test_every_held_position_is_feasible():
    p = get_problem("welded_beam")
    worst = []

    def cb(box, it, pop):
        _, _, G = p.evaluate_batch(pop.X.reshape(-1, p.dim), snap=False)
        worst.append(G.max())

    rec = optimize_constrained(p, None, SMALL, callback=cb)
    assert max(worst) <= FEAS_TOL
    assert np.all(np.diff(rec.trace) <= 0)


def test_discrete_variables_stay_on_grid():
    p = get_problem("pressure_vessel")
    rec = optimize_constrained(p, None, SMALL)
    q = rec.best_position[:2] / 0.0625
    assert np.allclose(q, np.round(q))


def test_boxes_and_infeasible_box_skipped():
    p = _line_problem()
    boxes = [ClusterBox(0, np.array([0.0]), np.array([0.3]), 1), ClusterBox(1, np.array([0.4]), np.array([1.0]), 1)]
    cc = ConstrainedConfig(base=LabConfig(n=3, G=5, max_iter=50, seed=0), init_rejection_cap=20)
    with pytest.warns(RuntimeWarning, match="box 0 skipped"):
        rec = optimize_constrained(p, boxes, cc)
    assert rec.box_id == 1 and 0.5 <= rec.best_value <= 0.51
    with pytest.raises(InfeasibleRegion):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            optimize_constrained(p, boxes[:1], cc)


def test_unconstrained_problem_single_box():
    rec = optimize_constrained("sphere30", None, SMALL)
    assert np.all(np.diff(rec.trace) <= 0) and rec.best_value < rec.trace[0]


def test_deterministic_and_estimator():
    a = optimize_constrained("spring", None, SMALL)
    b = optimize_constrained("spring", None, SMALL)
    assert np.array_equal(a.trace, b.trace)
    est = ConstrainedLAB(n_groups=10, max_iter=100, random_state=0).fit("spring")
    assert est.best_f_ == a.best_value and est.best_box_ == 0


@pytest.mark.parametrize("kw", [{"omega": 0.0}, {"omega": 1.5}, {"beta": 0.5}, {"init_rejection_cap": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ConstrainedConfig(**kw)
