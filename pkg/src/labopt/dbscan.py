"""Density-based clustering (DBSCAN) on top of :class:`labopt.kdtree.KdTree`.

Conventions:

* the eps-neighborhood is the closed ball and includes the point itself;
* a point is *core* when its neighborhood holds at least ``min_pts`` points;
* clusters are the connected components of core points, numbered in
  order of their smallest point index;
* a non-core point within ``eps`` of some core point joins the cluster
  with the smallest id among those core points (the cluster that a scan
  in ascending index order would reach first); other points are noise.

Neighborhoods are processed in chunks so memory stays bounded even when
every point has thousands of neighbors.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_points, check_scalar_range
from .kdtree import KdTree

__all__ = ["NOISE", "dbscan", "DBSCAN"]

NOISE = -1
_PAIR_BUDGET = 4_000_000


def _chunks(total, per_item):
    size = max(1, int(_PAIR_BUDGET // max(per_item, 1)))
    for s in range(0, total, size):
        yield s, min(total, s + size)


def dbscan(points, eps, min_pts, leaf_size=16):
    """Cluster ``points``; returns ``(labels, core_mask)``.

    ``labels`` holds cluster ids ``0..k-1`` or ``NOISE`` (-1).
    """
    X = check_points(points, allow_empty=True)
    check_scalar_range(eps, "eps", lo=0, lo_open=True)
    check_scalar_range(min_pts, "min_pts", lo=1, integral=True)
    m = X.shape[0]
    labels = np.full(m, NOISE, dtype=np.int64)
    if m == 0:
        return labels, np.zeros(0, dtype=bool)

    tree = KdTree(X, leaf_size=leaf_size)
    counts = tree.count_radius(X, eps)
    core = counts >= min_pts
    core_idx = np.flatnonzero(core)
    nc = core_idx.size
    if nc == 0:
        return labels, core

    # connected components of the core graph, merged chunk by chunk
    ctree = KdTree(X[core_idx], leaf_size=leaf_size)
    comp = np.arange(nc)
    per = float(counts[core_idx].mean())
    for s, e in _chunks(nc, per):
        indptr, nbr = ctree.query_radius_batch(X[core_idx[s:e]], eps)
        src = np.repeat(np.arange(s, e), np.diff(indptr))
        a, b = comp[src], comp[nbr]
        keep = a != b
        if not keep.any():
            continue
        a, b = a[keep], b[keep]
        graph = coo_matrix((np.ones(a.size, dtype=np.int8), (a, b)), shape=(nc, nc))
        _, relabel = connected_components(graph, directed=False)
        comp = relabel[comp]

    # number components by their smallest member (core_idx is ascending)
    _, first = np.unique(comp, return_index=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    uniq = np.unique(comp)
    cluster_of_core = rank[np.searchsorted(uniq, comp)]
    labels[core_idx] = cluster_of_core

    # border points: smallest cluster id among core neighbors
    border = np.flatnonzero(~core & (counts > 0))
    if border.size:
        for s, e in _chunks(border.size, per):
            indptr, nbr = ctree.query_radius_batch(X[border[s:e]], eps)
            has = np.diff(indptr) > 0
            if not has.any():
                continue
            ids = cluster_of_core[nbr]
            starts = indptr[:-1][has]
            labels[border[s:e][has]] = np.minimum.reduceat(ids, starts)
    return labels, core


class DBSCAN(ClusterMixin, BaseEstimator):
    """Estimator wrapper: ``fit(X)`` sets ``labels_`` and ``core_sample_indices_``."""

    def __init__(self, eps=0.5, min_pts=5, leaf_size=16):
        self.eps = eps
        self.min_pts = min_pts
        self.leaf_size = leaf_size

    def fit(self, X, y=None):
        labels, core = dbscan(X, self.eps, self.min_pts, self.leaf_size)
        self.labels_ = labels
        self.core_sample_indices_ = np.flatnonzero(core)
        self.n_clusters_ = int(labels.max() + 1) if labels.size else 0
        return self
