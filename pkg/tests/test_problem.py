import json
import pickle

import numpy as np
import pytest
import yaml

from labopt.exceptions import DimensionError, OutOfBoundsError, ProblemDefinitionError, UnknownProblemError
from labopt.problem import Bounds, Problem, evaluate, is_feasible, problem_from_dict, resolve_problem


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Bounds(np.array([0.0]), np.array([1.0, 2.0]))
    b = Bounds(np.array([-1.0, 0.0]), np.array([1.0, 4.0]))
    assert b.dim == 2 and b.volume() == 8.0
    assert b.contains(np.array([0.0, 4.0]))
    with pytest.raises(ValueError):
        b.lower[0] = 5.0


def test_sample_file_loads(sample_path):
    p = resolve_problem(sample_path)
    assert p.dim == 2 and p.n_constraints == 2
    f, g = evaluate(p, np.array([1.0, 0.0]))
    assert f == 0.0 and g[0] == pytest.approx(0.0) and g[1] == pytest.approx(-0.1)
    assert is_feasible(p, np.array([1.0, 0.0]))
    assert not is_feasible(p, np.array([0.0, 0.0]))


def test_json_and_yaml_agree(tmp_path):
    doc = {"name": "t", "dim": 2, "lower": [0, 0], "upper": 1, "objective": "x1 + x2",
           "constraints": ["x1 >= 0.5"], "discrete": {"x2": 0.25}}
    (tmp_path / "t.json").write_text(json.dumps(doc))
    (tmp_path / "t.yaml").write_text(yaml.safe_dump(doc))
    a, b = resolve_problem(str(tmp_path / "t.json")), resolve_problem(str(tmp_path / "t.yaml"))
    x = np.array([0.7, 0.3])
    assert evaluate(a, x)[0] == evaluate(b, x)[0] == pytest.approx(0.95)  # x2 snapped to 0.25
    assert a.discrete == {1: 0.25}


def test_one_based_discrete_keys():
    p = problem_from_dict({"dim": 2, "lower": 0, "upper": 1, "discrete": {1: 0.5}})
    assert p.discrete == {0: 0.5}
    with pytest.raises(ProblemDefinitionError):
        problem_from_dict({"dim": 2, "lower": 0, "upper": 1, "discrete": {3: 0.5}})


def test_snap_rounds_to_grid_and_stays_in_bounds():
    p = problem_from_dict({"dim": 1, "lower": 0.0625, "upper": 6.1875, "discrete": {1: 0.0625}})
    X = np.array([[0.0625], [0.1], [6.19], [3.0]])
    s = p.snap(np.clip(X, 0.0625, 6.1875))
    assert np.allclose(s[:, 0], [0.0625, 0.125, 6.1875, 3.0])


@pytest.mark.parametrize("doc", [
    {"lower": 0, "upper": 1},
    {"dim": 0, "lower": 0, "upper": 1},
    {"dim": 2, "lower": [0, 0, 0], "upper": 1},
    {"dim": 1, "lower": 0, "upper": 1, "discrete": {1: -1}},
])
def test_bad_documents(doc):
    with pytest.raises(ValueError):
        problem_from_dict(doc)


def test_evaluate_checks_shape_and_bounds():
    p = resolve_problem("sphere30")
    with pytest.raises(DimensionError):
        evaluate(p, np.zeros(3))
    with pytest.raises(OutOfBoundsError):
        evaluate(p, np.full(30, 1e6))


def test_unknown_problem():
    with pytest.raises(UnknownProblemError):
        resolve_problem("no_such_problem")


def test_config_problem_is_picklable(sample_path):
    p = resolve_problem(sample_path)
    q = pickle.loads(pickle.dumps(p))
    assert evaluate(q, np.array([0.5, 0.5]))[1].tolist() == evaluate(p, np.array([0.5, 0.5]))[1].tolist()


def test_problem_passthrough():
    p = Problem("z", Bounds(np.zeros(1), np.ones(1)), lambda X: X[:, 0])
    assert resolve_problem(p) is p
