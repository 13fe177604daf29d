import numpy as np
import pytest

from labopt.cssr import (
    ClusterBox,
    CssrConfig,
    SearchSpaceReducer,
    close_points,
    filter_by_constraint,
    generate_grid,
    load_clusters,
    make_cluster_boxes,
    reduce,
    save_clusters,
)
from labopt.exceptions import AllNoise, EmptyFeasible, GridTooLarge, ProblemDefinitionError
from labopt.problem import Bounds, problem_from_dict, resolve_problem


def test_grid_values():
    b = Bounds(np.array([-5.0, -2.0]), np.array([5.0, 2.0]))
    G = generate_grid(b, 5)
    assert G.shape == (25, 2)
    assert np.unique(G[:, 0]).tolist() == [-5.0, -2.5, 0.0, 2.5, 5.0]
    with pytest.raises(GridTooLarge):
        generate_grid(Bounds(np.zeros(4), np.ones(4)), 101, max_points=1000)


def test_filter_counts_boundary_and_treats_nan_as_unsatisfied():
    pts = np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0]])
    assert filter_by_constraint(pts, lambda X: X[:, 0] ** 2 + X[:, 1] ** 2 - 1).tolist() == [0, 2]
    assert filter_by_constraint(pts, lambda X: np.sqrt(X[:, 0]) - 2).tolist() == [0, 1]


def test_close_points_matches_brute_force(rng):
    P = rng.uniform(0, 1, size=(400, 2))
    subsets = [np.flatnonzero(P[:, 0] < 0.5), np.flatnonzero(P[:, 1] < 0.3), np.arange(0, 400, 7)]
    r = 0.05
    keep = close_points(P, subsets, r)
    ref = set()
    for j, sj in enumerate(subsets):
        for i, si in enumerate(subsets):
            if i == j:
                continue
            d = np.linalg.norm(P[sj][:, None] - P[si][None], axis=-1)
            ref |= set(sj[(d <= r).any(axis=1)].tolist())
    assert keep.tolist() == sorted(ref)
    assert close_points(P, subsets[:1], r).tolist() == sorted(subsets[0].tolist())


def test_boxes_from_labels():
    P = np.array([[0.0, 0.0], [1.0, 2.0], [5.0, 5.0], [9.0, 9.0]])
    boxes = make_cluster_boxes(np.array([0, 0, -1, 1]), P)
    assert [b.min.tolist() for b in boxes] == [[0.0, 0.0], [9.0, 9.0]]
    assert boxes[0].max.tolist() == [1.0, 2.0] and boxes[0].point_count == 2
    with pytest.raises(AllNoise):
        make_cluster_boxes(np.array([-1, -1]), P[:2])


def test_sample_problem_boxes(sample_path):
    p = resolve_problem(sample_path)
    boxes, d = reduce(p, CssrConfig(e=101), return_details=True)
    assert len(boxes) >= 1
    lens = [b for b in boxes if b.contains(np.array([1.0, 0.0]))]
    assert lens, "the C1/C2 lens around (1, 0) must be covered"
    assert sum(b.volume() for b in boxes) < 0.15 * 40
    assert d["min_pts"] == 4 and d["eps"] == pytest.approx(d["max_dist"])


def test_coverage_soundness_on_random_ball_intersections(rng):
    for trial in range(10):
        c1, c2 = rng.uniform(-1, 1, 2).tolist(), rng.uniform(-1, 1, 2).tolist()
        r1, r2 = rng.uniform(0.8, 1.5, 2).tolist()
        doc = {"dim": 2, "lower": -3, "upper": 3, "constraints": [
            f"(x1 - {c1[0]!r})^2 + (x2 - {c1[1]!r})^2 <= {r1 ** 2!r}",
            f"(x1 - {c2[0]!r})^2 + (x2 - {c2[1]!r})^2 <= {r2 ** 2!r}"]}
        p = problem_from_dict(doc)
        red = SearchSpaceReducer(points_per_dim=41).fit(p)
        grid = generate_grid(p.bounds, 41)
        G = np.column_stack([g(grid) for g in p.constraints])
        feas = grid[p.feasible_mask(G)]
        assert red.transform(feas).any(axis=1).all()


def test_errors():
    with pytest.raises(ProblemDefinitionError):
        reduce("sphere30")
    p = problem_from_dict({"dim": 1, "lower": 0, "upper": 1, "constraints": ["x1 >= 2"]})
    with pytest.raises(EmptyFeasible):
        reduce(p, CssrConfig(e=11))
    with pytest.raises(ValueError):
        CssrConfig(e=1)


def test_estimator_and_round_trip(tmp_path, sample_path):
    red = SearchSpaceReducer(points_per_dim=101).fit(sample_path)
    assert red.predict(np.array([[1.0, 0.0], [4.9, 1.9]])).tolist()[1] == -1
    assert 0 < red.volume_ratio_ < 0.15
    path = tmp_path / "clusters.json"
    save_clusters(path, "sample_2d", red.config_dict(), red.boxes_)
    doc, boxes = load_clusters(path)
    assert doc["problem"] == "sample_2d" and doc["config"]["e"] == 101
    for a, b in zip(boxes, red.boxes_):
        assert np.array_equal(a.min, b.min) and np.array_equal(a.max, b.max) and a.point_count == b.point_count


def test_box_volume_and_contains():
    b = ClusterBox(0, np.array([0.0, 0.0]), np.array([2.0, 3.0]), 5)
    assert b.volume() == 6.0 and b.contains([[2.0, 3.0], [2.1, 0.0]]).tolist() == [True, False]
