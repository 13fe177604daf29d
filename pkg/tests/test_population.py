import numpy as np
import pytest

from labopt.benchmarks import get_problem
from labopt.population import (
    LabConfig,
    Population,
    assign_roles,
    converged,
    init_population,
    regroup,
    role_labels,
    select_global_leader,
)


def test_roles():
    assert role_labels(4) == ["leader", "advocate", "believer", "believer"]
    assert assign_roles([3.0, 1.0, 2.0, 1.0]).tolist() == [1, 3, 2, 0]  # stable ties
    assert select_global_leader([2.0, 1.0, 1.0]) == 1


def test_local_regroup_keeps_membership_and_moves_extras():
    X = np.arange(12, dtype=float).reshape(2, 3, 2)
    F = np.array([[3.0, 1.0, 2.0], [0.0, 5.0, -1.0]])
    pop = Population(X.copy(), F.copy(), {"tag": np.arange(6).reshape(2, 3)})
    regroup(pop, "local")
    assert pop.F.tolist() == [[1.0, 2.0, 3.0], [-1.0, 0.0, 5.0]]
    assert pop.extras["tag"].tolist() == [[1, 2, 0], [5, 3, 4]]
    assert np.array_equal(pop.X[0, 0], X[0, 1])


def test_global_regroup_deals_sorted_chunks():
    F = np.array([[5.0, 0.0, 3.0], [1.0, 4.0, 2.0]])
    pop = Population(np.zeros((2, 3, 1)), F.copy())
    regroup(pop, "global")
    assert pop.F.tolist() == [[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]
    with pytest.raises(ValueError):
        regroup(pop, "sideways")


def test_init_population_ranked_and_in_bounds(rng):
    p = get_problem("rastrigin30")
    pop = init_population(p, LabConfig(), rng)
    assert pop.X.shape == (4, 5, 30)
    assert np.all(np.diff(pop.F, axis=1) >= 0)
    assert np.all(np.abs(pop.X) <= 5.12)


def test_convergence_rule():
    c = LabConfig(max_iter=10, stall_window=3, stall_tol=1e-6)
    assert converged([1.0] * 11, c, 10)
    assert not converged([3.0, 2.0], c, 1)
    assert converged([1.0, 1.0, 1.0, 1.0], c, 3)
    assert not converged([4.0, 3.0, 2.0, 1.0], c, 3)
