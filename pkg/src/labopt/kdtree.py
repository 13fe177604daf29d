"""K-D tree for closed-ball range queries.

The tree is stored in flat arrays.  Each node owns a contiguous slice of
a permutation of the input points plus the bounding box of those points.
Splits use the lower median along an axis that cycles with depth.

Queries are vectorized over many query points at once: the traversal
carries the set of queries still "alive" at each node, so the Python
overhead is per node rather than per (query, node) pair.  A point ``p``
is in the ball around ``c`` iff ``sum((p - c)**2) <= r**2``; bounding
box distances are computed the same way, which makes pruning exact in
floating point (never drops a point the brute-force test would keep).
"""

import numpy as np

from ._validation import check_points
from .exceptions import DimensionError

__all__ = ["KdTree", "brute_force_radius"]


def brute_force_radius(points, center, radius):
    """Reference linear scan: indices of points in the closed ball."""
    P = np.asarray(points, dtype=float)
    d2 = np.sum((P - np.asarray(center, dtype=float)) ** 2, axis=-1)
    return np.flatnonzero(d2 <= radius * radius)


class KdTree:
    """Balanced K-D tree over a fixed point set.

    Parameters
    ----------
    points : array of shape (m, N)
    leaf_size : maximum number of points stored in a leaf.
    """

    def __init__(self, points, leaf_size=16, dim=None):
        P = np.asarray(points, dtype=float)
        if P.size == 0:
            P = P.reshape(0, dim if dim is not None else (P.shape[-1] if P.ndim == 2 else 0))
        else:
            P = check_points(P, dim)
        if leaf_size < 1:
            raise ValueError("leaf_size must be at least 1")
        self.data = np.ascontiguousarray(P)
        self.leaf_size = int(leaf_size)
        self._build()

    # ------------------------------------------------------------ structure

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    def _build(self):
        m = self.n
        perm = np.arange(m)
        starts, ends, axes, splits, lefts, rights, depths = [], [], [], [], [], [], []

        def new_node(s, e, d):
            starts.append(s)
            ends.append(e)
            axes.append(-1)
            splits.append(np.nan)
            lefts.append(-1)
            rights.append(-1)
            depths.append(d)
            return len(starts) - 1

        if m:
            stack = [new_node(0, m, 0)]
            while stack:
                k = stack.pop()
                s, e, d = starts[k], ends[k], depths[k]
                if e - s <= self.leaf_size or self.dim == 0:
                    continue
                axis = d % self.dim
                seg = perm[s:e]
                order = np.argsort(self.data[seg, axis], kind="stable")
                perm[s:e] = seg[order]
                mid = (e - s - 1) // 2  # lower median
                axes[k] = axis
                splits[k] = self.data[perm[s + mid], axis]
                lefts[k] = new_node(s, s + mid + 1, d + 1)
                rights[k] = new_node(s + mid + 1, e, d + 1)
                stack.extend([rights[k], lefts[k]])

        self.perm = perm
        self.node_start = np.array(starts, dtype=np.int64)
        self.node_end = np.array(ends, dtype=np.int64)
        self.node_axis = np.array(axes, dtype=np.int64)
        self.node_split = np.array(splits, dtype=float)
        self.node_left = np.array(lefts, dtype=np.int64)
        self.node_right = np.array(rights, dtype=np.int64)
        self.node_depth = np.array(depths, dtype=np.int64)
        nn = len(starts)
        self.node_lo = np.empty((nn, self.dim))
        self.node_hi = np.empty((nn, self.dim))
        for k in range(nn):
            pts = self.data[perm[starts[k]:ends[k]]]
            self.node_lo[k] = pts.min(axis=0)
            self.node_hi[k] = pts.max(axis=0)
        self._sorted = self.data[perm]

    @property
    def n_nodes(self):
        return self.node_start.shape[0]

    @property
    def depth(self):
        return int(self.node_depth.max()) if self.n_nodes else 0

    def is_leaf(self, k):
        return self.node_left[k] < 0

    def enumerate(self):
        """Point indices in leaf order (each stored point exactly once)."""
        leaves = [k for k in range(self.n_nodes) if self.is_leaf(k)]
        leaves.sort(key=lambda k: self.node_start[k])
        if not leaves:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([self.perm[self.node_start[k]:self.node_end[k]] for k in leaves])

    # -------------------------------------------------------------- queries

    def _check_queries(self, Q):
        Q = np.asarray(Q, dtype=float)
        if Q.ndim == 1:
            Q = Q[None, :]
        if Q.ndim != 2 or Q.shape[1] != self.dim:
            raise DimensionError(
                f"query points must have {self.dim} coordinates, got shape {Q.shape}"
            )
        return Q

    def _traverse(self, Q, radius, visit_leaf, visit_full, alive=None):
        """Generic batched traversal.

        ``visit_leaf(node, q_idx, mask)`` receives the queries reaching a
        leaf and their exact in-ball mask against its points;
        ``visit_full(node, q_idx)`` receives queries whose ball contains the
        whole node.  ``alive`` (optional callable) filters out finished
        queries, e.g. for existence tests.
        """
        if self.n == 0 or Q.shape[0] == 0:
            return
        if radius < 0:
            raise ValueError("radius must be non-negative")
        r2 = float(radius) * float(radius)
        stack = [(0, np.arange(Q.shape[0]))]
        while stack:
            k, q = stack.pop()
            if alive is not None:
                q = q[alive(q)]
                if q.size == 0:
                    continue
            Qk = Q[q]
            lo, hi = self.node_lo[k], self.node_hi[k]
            gap = np.maximum(np.maximum(lo - Qk, Qk - hi), 0.0)
            near = np.sum(gap * gap, axis=1) <= r2
            q, Qk = q[near], Qk[near]
            if q.size == 0:
                continue
            far = np.maximum(np.abs(Qk - lo), np.abs(hi - Qk))
            inside = np.sum(far * far, axis=1) <= r2
            if inside.any():
                visit_full(k, q[inside])
                q, Qk = q[~inside], Qk[~inside]
                if q.size == 0:
                    continue
            if self.node_left[k] < 0:
                pts = self._sorted[self.node_start[k]:self.node_end[k]]
                d2 = np.sum((Qk[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
                visit_leaf(k, q, d2 <= r2)
            else:
                stack.append((self.node_right[k], q))
                stack.append((self.node_left[k], q))

    def query_radius(self, center, radius):
        """Sorted indices of stored points within ``radius`` of ``center``."""
        center = np.asarray(center, dtype=float)
        if center.ndim != 1:
            raise DimensionError("center must be a single point")
        indptr, indices = self.query_radius_batch(center[None, :], radius)
        return indices[indptr[0]:indptr[1]]

    def query_radius_batch(self, Q, radius):
        """Neighbors of every query in CSR form ``(indptr, indices)``.

        ``indices[indptr[i]:indptr[i + 1]]`` are the (ascending) indices of
        the stored points within ``radius`` of query ``i``.
        """
        Q = self._check_queries(Q)
        qs, ps = [], []

        def leaf(k, q, mask):
            qi, pj = np.nonzero(mask)
            qs.append(q[qi])
            ps.append(self.perm[self.node_start[k] + pj])

        def full(k, q):
            block = self.perm[self.node_start[k]:self.node_end[k]]
            qs.append(np.repeat(q, block.size))
            ps.append(np.tile(block, q.size))

        self._traverse(Q, radius, leaf, full)
        if qs:
            qa, pa = np.concatenate(qs), np.concatenate(ps)
            order = np.lexsort((pa, qa))
            qa, pa = qa[order], pa[order]
        else:
            qa = pa = np.empty(0, dtype=np.int64)
        indptr = np.zeros(Q.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(qa, minlength=Q.shape[0]), out=indptr[1:])
        return indptr, pa.astype(np.int64)

    def count_radius(self, Q, radius):
        """Number of stored points within ``radius`` of each query."""
        Q = self._check_queries(Q)
        counts = np.zeros(Q.shape[0], dtype=np.int64)

        def leaf(k, q, mask):
            counts[q] += mask.sum(axis=1)

        def full(k, q):
            counts[q] += self.node_end[k] - self.node_start[k]

        self._traverse(Q, radius, leaf, full)
        return counts

    def any_within(self, Q, radius):
        """Whether each query has at least one stored point within ``radius``."""
        Q = self._check_queries(Q)
        found = np.zeros(Q.shape[0], dtype=bool)

        def leaf(k, q, mask):
            found[q] |= mask.any(axis=1)

        def full(k, q):
            found[q] = True

        self._traverse(Q, radius, leaf, full, alive=lambda q: ~found[q])
        return found
