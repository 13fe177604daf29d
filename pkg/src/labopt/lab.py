"""Modified LAB optimizer for box-constrained (unconstrained) problems.

One iteration:

1. every believer picks an advocate from any group by roulette over
   reciprocal advocate values and moves to ``w1 * leader + w2 * advocate``;
2. every leader and advocate draws one candidate uniformly from its own
   sampling box around its position and keeps it only if it is better;
   a box shrinks by ``1 - theta`` after ``shrink_patience`` consecutive
   rejected candidates;
3. each group is re-ranked and the best-so-far trace is extended.
"""

import time

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import as_generator
from .population import (
    LabConfig,
    RunRecord,
    converged,
    init_population,
    regroup,
)
from .problem import resolve_problem

__all__ = [
    "advocate_probabilities",
    "roulette_select",
    "sample_weights",
    "update_believer",
    "shrink_interval",
    "local_sample",
    "optimize",
    "ModifiedLAB",
]

SHIFT_EPS = 1e-6


def advocate_probabilities(values, shift=None):
    """Selection probabilities proportional to ``1 / f``.

    With ``shift=None`` the raw reciprocal is used when every value is
    strictly positive; otherwise values are first shifted to
    ``f - min(f) + 1e-6 * range`` (all ones when the range is zero), which
    keeps the better-is-likelier ordering for zero or negative values.
    ``shift=True`` forces the shifted form.
    """
    f = np.asarray(values, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("values must be a non-empty 1-D array")
    if not np.all(np.isfinite(f)):
        raise ValueError("values must be finite")
    if shift is None:
        shift = not np.all(f > 0)
    if shift:
        lo = f.min()
        span = f.max() - lo
        f = np.ones_like(f) if span == 0 else f - lo + SHIFT_EPS * span
    inv = f.min() / f  # in (0, 1]: the same ratios as 1/f without overflow
    return inv / inv.sum()


def roulette_select(probs, rng, size=None):
    """Sample indices by inverting the cumulative distribution."""
    cum = np.cumsum(np.asarray(probs, dtype=float))
    u = rng.random(size)
    idx = np.searchsorted(cum, u * cum[-1], side="right")
    return np.minimum(idx, cum.size - 1)


def sample_weights(rng, size=None):
    """Draw ``w1 ~ U[0.5, 1]`` and return ``(w1, 1 - w1)``."""
    w1 = rng.uniform(0.5, 1.0, size)
    return w1, 1.0 - w1


def update_believer(leader, advocate, w1, w2, lower=None, upper=None):
    """Weighted combination of leader and advocate, clipped to the bounds."""
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    if w1.ndim:  # one weight pair per believer: broadcast over coordinates
        w1, w2 = w1[..., None], w2[..., None]
    new = w1 * np.asarray(leader, dtype=float) + w2 * np.asarray(advocate, dtype=float)
    if lower is not None:
        new = np.clip(new, lower, upper)
    return new


def shrink_interval(half_width, theta, floor):
    """Multiply half-widths by ``1 - theta`` without going below ``floor``."""
    return np.maximum(np.asarray(half_width) * (1.0 - theta), floor)


def local_sample(x, f, half_width, rng, problem):
    """One uniform candidate in ``[x - h, x + h]`` ∩ bounds with greedy acceptance.

    Works on a single individual (``x`` of shape ``(N,)``) or on a stack
    of them (``(..., N)``).  Returns ``(x_new, f_new, accepted)``.
    """
    x = np.asarray(x, dtype=float)
    lower, upper = problem.bounds.lower, problem.bounds.upper
    lo = np.maximum(x - half_width, lower)
    hi = np.minimum(x + half_width, upper)
    cand = problem.snap(lo + rng.random(x.shape) * (hi - lo))
    fc = problem.objective_batch(cand.reshape(-1, x.shape[-1])).reshape(x.shape[:-1])
    accepted = fc < f
    x_new = np.where(accepted[..., None], cand, x)
    f_new = np.where(accepted, fc, f)
    if x.ndim == 1:
        return x_new, float(f_new), bool(accepted)
    return x_new, f_new, accepted


def _iterate(pop, problem, c, rng, floor):
    """Advance the population by one iteration (in place)."""
    G, n, N = pop.X.shape
    H, S = pop.extras["half_width"], pop.extras["failures"]
    lower, upper = problem.bounds.lower, problem.bounds.upper

    # believers follow their leader and a roulette-chosen advocate
    probs = advocate_probabilities(pop.F[:, 1])
    sel = roulette_select(probs, rng, size=(G, n - 2))
    w1, w2 = sample_weights(rng, size=(G, n - 2))
    Xb = update_believer(pop.X[:, :1], pop.X[sel, 1], w1, w2, lower, upper)
    Xb = problem.snap(Xb)
    pop.X[:, 2:] = Xb
    pop.F[:, 2:] = problem.objective_batch(Xb.reshape(-1, N)).reshape(G, n - 2)

    # leaders and advocates sample their own boxes
    x_new, f_new, acc = local_sample(pop.X[:, :2], pop.F[:, :2], H[:, :2], rng, problem)
    pop.X[:, :2] = x_new
    pop.F[:, :2] = f_new
    fails = np.where(acc, 0, S[:, :2] + 1)
    shrink = fails >= c.shrink_patience
    H[:, :2] = np.where(shrink[..., None], shrink_interval(H[:, :2], c.theta, floor), H[:, :2])
    S[:, :2] = np.where(shrink, 0, fails)

    regroup(pop, "local")


def optimize(p, c: LabConfig = None, rng=None, callback=None):
    """Run the optimizer on problem ``p`` and return a :class:`RunRecord`.

    ``rng`` defaults to a generator seeded with ``c.seed``.  ``callback``,
    if given, is called as ``callback(iteration, population)`` after each
    iteration (and once for the initial population with iteration 0).
    """
    p = resolve_problem(p)
    c = LabConfig() if c is None else c
    if p.n_constraints:
        raise ValueError(f"{p.name} has constraints; use the constrained optimizer")
    seed = c.seed if rng is None else None
    rng = as_generator(c.seed if rng is None else rng)
    t0 = time.perf_counter()

    floor = 1e-12 * p.bounds.span
    pop = init_population(p, c, rng)
    pop.extras["half_width"] = np.broadcast_to(p.bounds.span / 2.0, pop.X.shape).copy()
    pop.extras["failures"] = np.zeros(pop.F.shape, dtype=np.int64)
    evals = pop.F.size

    best_x, best_f = pop.best()
    trace = [best_f]
    if callback is not None:
        callback(0, pop)
    it = 0
    while not converged(trace, c, it):
        _iterate(pop, p, c, rng, floor)
        evals += pop.F.size
        it += 1
        x, f = pop.best()
        if f < best_f:
            best_x, best_f = x, f
        trace.append(best_f)
        if callback is not None:
            callback(it, pop)

    return RunRecord(
        best_value=best_f,
        best_position=best_x,
        evaluations=evals,
        iterations=it,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        trace=np.asarray(trace),
        seed=seed,
        problem=p.name,
    )


class ModifiedLAB(BaseEstimator):
    """Estimator-style wrapper around :func:`optimize`.

    Parameters mirror :class:`~labopt.population.LabConfig`;
    ``random_state`` is the integer seed of the run.

    Attributes set by :meth:`fit`: ``best_x_``, ``best_f_``, ``trace_``,
    ``n_evals_``, ``n_iter_`` and ``record_``.
    """

    def __init__(self, n_per_group=5, n_groups=4, theta=0.15, max_iter=2000,
                 stall_window=500, stall_tol=1e-12, shrink_patience=6, random_state=0):
        self.n_per_group = n_per_group
        self.n_groups = n_groups
        self.theta = theta
        self.max_iter = max_iter
        self.stall_window = stall_window
        self.stall_tol = stall_tol
        self.shrink_patience = shrink_patience
        self.random_state = random_state

    def _config(self):
        seed = self.random_state if isinstance(self.random_state, (int, np.integer)) else 0
        return LabConfig(
            n=self.n_per_group, G=self.n_groups, theta=self.theta, max_iter=self.max_iter,
            stall_window=self.stall_window, stall_tol=self.stall_tol,
            shrink_patience=self.shrink_patience, seed=int(seed),
        )

    def fit(self, problem, y=None):
        rng = None if isinstance(self.random_state, (int, np.integer)) else as_generator(self.random_state)
        rec = optimize(problem, self._config(), rng)
        self.record_ = rec
        self.best_x_ = rec.best_position
        self.best_f_ = rec.best_value
        self.trace_ = rec.trace
        self.n_evals_ = rec.evaluations
        self.n_iter_ = rec.iterations
        return self
