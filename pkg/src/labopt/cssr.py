"""Clustering-based search space reduction.

Pipeline:

1. lay an ``e``-points-per-dimension grid over the bounds;
2. for every constraint keep the grid points that satisfy it (``g <= 0``);
3. keep the points of each subset that lie within ``max_dist`` of some
   point of another subset (with a single constraint, keep the subset);
4. cluster the retained points with DBSCAN;
5. report the axis-aligned bounding box of every cluster.

The boxes are the reduced search regions handed to the constrained
optimizer.  ``AUTO`` parameters: ``max_dist = 2 * |h|`` (twice the grid
cell diagonal), ``eps = max_dist`` and ``min_pts = 2 * N``.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_scalar_range
from .dbscan import NOISE, dbscan
from .exceptions import AllNoise, EmptyFeasible, GridTooLarge, ProblemDefinitionError
from .kdtree import KdTree
from .problem import resolve_problem

__all__ = [
    "ClusterBox",
    "CssrConfig",
    "generate_grid",
    "filter_by_constraint",
    "close_points",
    "make_cluster_boxes",
    "reduce",
    "SearchSpaceReducer",
    "save_clusters",
    "load_clusters",
]

MAX_GRID_POINTS = 5_000_000


@dataclass(frozen=True)
class ClusterBox:
    id: int
    min: np.ndarray
    max: np.ndarray
    point_count: int

    def volume(self):
        return float(np.prod(np.asarray(self.max) - np.asarray(self.min)))

    def contains(self, X):
        X = np.asarray(X, dtype=float)
        return np.all((X >= self.min) & (X <= self.max), axis=-1)

    def as_dict(self):
        return {"id": int(self.id), "min": [float(v) for v in self.min],
                "max": [float(v) for v in self.max], "points": int(self.point_count)}


@dataclass(frozen=True)
class CssrConfig:
    """Grid resolution and clustering parameters; ``None`` means AUTO."""

    e: int = 101
    max_dist: Optional[float] = None
    eps: Optional[float] = None
    min_pts: Optional[int] = None
    max_grid_points: int = MAX_GRID_POINTS

    def __post_init__(self):
        check_scalar_range(self.e, "e", lo=2, integral=True)
        if self.max_dist is not None:
            check_scalar_range(self.max_dist, "max_dist", lo=0)
        if self.eps is not None:
            check_scalar_range(self.eps, "eps", lo=0, lo_open=True)
        if self.min_pts is not None:
            check_scalar_range(self.min_pts, "min_pts", lo=1, integral=True)

    def resolve(self, bounds):
        """Concrete ``(max_dist, eps, min_pts)`` for the given bounds."""
        h = bounds.span / (self.e - 1)
        max_dist = 2.0 * float(np.linalg.norm(h)) if self.max_dist is None else float(self.max_dist)
        eps = max_dist if self.eps is None else float(self.eps)
        min_pts = 2 * bounds.dim if self.min_pts is None else int(self.min_pts)
        return max_dist, eps, min_pts


def generate_grid(bounds, e, max_points=MAX_GRID_POINTS):
    """All ``e**N`` grid points, enumerated with dimension 0 varying slowest."""
    N = bounds.dim
    if e < 2:
        raise ValueError("e must be at least 2")
    if float(e) ** N > max_points:
        raise GridTooLarge(
            f"a grid of {e}^{N} = {float(e) ** N:.3g} points exceeds the limit of "
            f"{max_points}; reduce the points per dimension"
        )
    axes = [np.linspace(lo, hi, e) for lo, hi in zip(bounds.lower, bounds.upper)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _satisfied(constraint, points):
    with np.errstate(all="ignore"):
        g = np.asarray(constraint(points), dtype=float)
    return g <= 0  # NaN compares False: undefined points never satisfy a constraint


def filter_by_constraint(points, constraint):
    """Indices (ascending) of the points with ``constraint(x) <= 0``."""
    return np.flatnonzero(_satisfied(constraint, np.asarray(points, dtype=float)))


def close_points(points, subsets, max_dist):
    """Grid indices kept by the cross-subset proximity rule.

    ``subsets`` is a list of index arrays into ``points``.  A point of
    subset ``j`` is kept when some point of another subset ``i`` lies
    within ``max_dist`` of it.  The result is sorted and duplicate-free.
    """
    subsets = [np.asarray(s, dtype=np.int64) for s in subsets]
    if len(subsets) == 0:
        return np.empty(0, dtype=np.int64)
    if len(subsets) == 1:
        return np.unique(subsets[0])
    P = np.asarray(points, dtype=float)
    trees = [KdTree(P[s]) for s in subsets]
    keep = np.zeros(P.shape[0], dtype=bool)
    for j, sj in enumerate(subsets):
        todo = sj[~keep[sj]]
        for i, tree in enumerate(trees):
            if i == j or todo.size == 0:
                continue
            hit = tree.any_within(P[todo], max_dist)
            keep[todo[hit]] = True
            todo = todo[~hit]
    return np.flatnonzero(keep)


def make_cluster_boxes(labels, points):
    """One bounding box per cluster id (noise excluded)."""
    labels = np.asarray(labels)
    P = np.asarray(points, dtype=float)
    ids = np.unique(labels[labels != NOISE])
    if ids.size == 0:
        raise AllNoise("every retained point was classified as noise; "
                       "increase eps or decrease min_pts")
    boxes = []
    for k in ids:
        members = P[labels == k]
        boxes.append(ClusterBox(int(k), members.min(axis=0), members.max(axis=0), len(members)))
    return boxes


def reduce(p, cfg: CssrConfig = None, return_details=False):
    """Run the full pipeline on problem ``p`` and return its cluster boxes."""
    p = resolve_problem(p)
    cfg = CssrConfig() if cfg is None else cfg
    if p.n_constraints == 0:
        raise ProblemDefinitionError(f"{p.name} has no constraints to reduce against")
    max_dist, eps, min_pts = cfg.resolve(p.bounds)
    grid = generate_grid(p.bounds, cfg.e, cfg.max_grid_points)
    subsets = []
    for j, g in enumerate(p.constraints):
        s = filter_by_constraint(grid, g)
        if s.size == 0:
            raise EmptyFeasible(
                f"no grid point satisfies constraint {j + 1}; increase the points per dimension"
            )
        subsets.append(s)
    combined = close_points(grid, subsets, max_dist)
    if combined.size == 0:
        raise AllNoise("no points survived the proximity filter; increase max_dist")
    labels, core = dbscan(grid[combined], eps, min_pts)
    boxes = make_cluster_boxes(labels, grid[combined])
    if not return_details:
        return boxes
    details = {
        "grid_size": grid.shape[0],
        "subset_sizes": [int(s.size) for s in subsets],
        "combined": combined,
        "labels": labels,
        "core": core,
        "max_dist": max_dist,
        "eps": eps,
        "min_pts": min_pts,
    }
    return boxes, details


class SearchSpaceReducer(TransformerMixin, BaseEstimator):
    """Estimator wrapper around :func:`reduce`.

    ``fit(problem)`` sets ``boxes_``, ``combined_points_``, ``labels_``,
    ``max_dist_``, ``eps_``, ``min_pts_`` and ``volume_ratio_``.
    ``predict(X)`` returns the id of the first box containing each row
    (or -1) and ``transform(X)`` the (m, n_boxes) containment matrix.
    """

    def __init__(self, points_per_dim=101, max_dist=None, eps=None, min_pts=None,
                 max_grid_points=MAX_GRID_POINTS):
        self.points_per_dim = points_per_dim
        self.max_dist = max_dist
        self.eps = eps
        self.min_pts = min_pts
        self.max_grid_points = max_grid_points

    def fit(self, problem, y=None):
        p = resolve_problem(problem)
        cfg = CssrConfig(e=self.points_per_dim, max_dist=self.max_dist, eps=self.eps,
                         min_pts=self.min_pts, max_grid_points=self.max_grid_points)
        boxes, d = reduce(p, cfg, return_details=True)
        grid = generate_grid(p.bounds, cfg.e, cfg.max_grid_points)
        self.problem_ = p
        self.boxes_ = boxes
        self.combined_points_ = grid[d["combined"]]
        self.labels_ = d["labels"]
        self.max_dist_, self.eps_, self.min_pts_ = d["max_dist"], d["eps"], d["min_pts"]
        self.volume_ratio_ = sum(b.volume() for b in boxes) / p.bounds.volume()
        self.n_features_in_ = p.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "boxes_")
        X = check_points(X, self.n_features_in_)
        return np.stack([b.contains(X) for b in self.boxes_], axis=1).astype(float)

    def predict(self, X):
        inside = self.transform(X) > 0
        out = np.full(inside.shape[0], -1, dtype=np.int64)
        any_box = inside.any(axis=1)
        out[any_box] = np.argmax(inside[any_box], axis=1)
        return out

    def config_dict(self):
        check_is_fitted(self, "boxes_")
        return {"e": self.points_per_dim, "max_dist": self.max_dist_, "eps": self.eps_,
                "min_pts": self.min_pts_}


def save_clusters(path, problem_name, config, boxes):
    """Write boxes as ``{problem, config, clusters: [{id, min, max, points}]}``."""
    doc = {
        "problem": problem_name,
        "config": {k: (float(v) if isinstance(v, (float, np.floating)) else int(v))
                   for k, v in config.items()},
        "clusters": [b.as_dict() for b in boxes],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return doc


def load_clusters(path):
    """Read a clusters file; returns ``(document, boxes)``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        boxes = [ClusterBox(int(c["id"]), np.asarray(c["min"], dtype=float),
                            np.asarray(c["max"], dtype=float), int(c.get("points", 0)))
                 for c in doc["clusters"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed clusters file {path}: {exc}") from None
    if not boxes:
        raise ValueError(f"clusters file {path} lists no clusters")
    return doc, boxes
