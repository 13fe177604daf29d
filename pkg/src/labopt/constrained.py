"""Modified LAB for inequality-constrained problems.

The search runs inside one or more boxes (usually produced by
:class:`labopt.cssr.SearchSpaceReducer`).  Inside a box every individual
starts feasible and only ever moves to feasible points:

* believers move as in the unconstrained variant;
* advocates step a fraction ``omega`` towards a leader chosen by
  roulette over reciprocal leader values;
* local leaders step a fraction ``omega`` towards the global leader;
* the global leader takes a random step of scale
  ``sigma = omega * beta / (iteration + beta)`` times the box width.

Moves that land on an infeasible point are discarded.  After each
iteration all individuals are ranked together and dealt back into
groups.  Each box is an independent search; the best box wins.
"""

import time
import warnings

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import derive_seed
from .exceptions import InfeasibleRegion
from .lab import advocate_probabilities, roulette_select, sample_weights, update_believer
from .population import ConstrainedConfig, LabConfig, Population, RunRecord, converged, regroup
from .problem import resolve_problem

__all__ = [
    "leader_probabilities",
    "update_advocate",
    "update_local_leader",
    "step_size_sigma",
    "update_global_leader",
    "feasibility_gate",
    "feasible_init",
    "optimize_box",
    "optimize_constrained",
    "ConstrainedLAB",
]


def leader_probabilities(leader_values, shift=None):
    """Roulette probabilities over leaders; same rule as for advocates."""
    return advocate_probabilities(leader_values, shift=shift)


def _step_towards(x, target, omega):
    x = np.asarray(x, dtype=float)
    return x + omega * (np.asarray(target, dtype=float) - x)


def update_advocate(advocate, selected_leader, omega, lower=None, upper=None):
    """Move an advocate the fraction ``omega`` of the way to a leader."""
    new = _step_towards(advocate, selected_leader, omega)
    return new if lower is None else np.clip(new, lower, upper)


def update_local_leader(leader, global_leader, omega, lower=None, upper=None):
    """Move a (non-global) local leader the fraction ``omega`` towards the global leader."""
    if leader is global_leader:
        raise ValueError("the global leader is moved by update_global_leader")
    new = _step_towards(leader, global_leader, omega)
    return new if lower is None else np.clip(new, lower, upper)


def step_size_sigma(omega, iteration, beta=100.0):
    """Perturbation scale of the global leader: ``omega * beta / (iteration + beta)``."""
    if iteration < 0:
        raise ValueError("iteration must be non-negative")
    if beta < 1:
        raise ValueError("beta must be at least 1")
    return omega * beta / (iteration + beta)


def update_global_leader(gl, lower, upper, sigma, rng):
    """Random step ``|upper - lower| * u * sigma`` with ``u ~ U[-1, 1]`` per coordinate."""
    gl = np.asarray(gl, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    u = rng.uniform(-1.0, 1.0, gl.shape)
    return np.clip(gl + np.abs(upper - lower) * u * sigma, lower, upper)


def feasibility_gate(p, current_x, current_f, candidate):
    """Accept ``candidate`` iff it is feasible; otherwise keep the current point.

    Acceptance ignores the objective: a feasible but worse candidate is
    taken and left to the ranking step.  Works on a single point or on a
    stack of points.  Returns ``(x, f, accepted)``.
    """
    cand = np.asarray(candidate, dtype=float)
    flat = cand.reshape(-1, p.dim)
    used, f, G = p.evaluate_batch(flat)
    ok = p.feasible_mask(G).reshape(cand.shape[:-1])
    used = used.reshape(cand.shape)
    f = f.reshape(cand.shape[:-1])
    x_new = np.where(ok[..., None], used, current_x)
    f_new = np.where(ok, f, current_f)
    if cand.ndim == 1:
        return x_new, float(f_new), bool(ok)
    return x_new, f_new, ok


def feasible_init(p, low, high, count, cap, rng, batch=1024):
    """Rejection-sample ``count`` feasible points uniformly from ``[low, high]``.

    At most ``cap * count`` candidates are drawn in total.  Returns the
    (snapped) points, their objective values and the number of draws.
    Raises :class:`InfeasibleRegion` when the budget runs out.
    """
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)
    budget = int(cap) * int(count)
    found_x, found_f = [], []
    have = drawn = 0
    while have < count and drawn < budget:
        m = min(max(batch, 2 * (count - have)), budget - drawn)
        cand = rng.uniform(low, high, size=(m, p.dim))
        drawn += m
        used, f, G = p.evaluate_batch(cand)
        ok = p.feasible_mask(G)
        found_x.append(used[ok])
        found_f.append(f[ok])
        have += int(ok.sum())
    if have < count:
        raise InfeasibleRegion(
            f"only {have} of {count} feasible starting points found in {drawn} draws; "
            "the box may be (almost) entirely infeasible"
        )
    return np.concatenate(found_x)[:count], np.concatenate(found_f)[:count], drawn


def _iterate(pop, p, cc: ConstrainedConfig, rng, it, low, high):
    """One synchronous iteration: every target is read before anything moves."""
    G, n, N = pop.X.shape
    X0, F0 = pop.X.copy(), pop.F.copy()
    omega = cc.omega

    # believers
    sel_a = roulette_select(advocate_probabilities(F0[:, 1]), rng, size=(G, n - 2))
    w1, w2 = sample_weights(rng, size=(G, n - 2))
    cand_b = update_believer(X0[:, :1], X0[sel_a, 1], w1, w2, low, high)
    # advocates
    sel_l = roulette_select(leader_probabilities(F0[:, 0]), rng, size=G)
    cand_a = update_advocate(X0[:, 1], X0[sel_l, 0], omega, low, high)
    # local leaders (group 0 holds the global leader after a global regroup)
    gstar = int(np.argmin(F0[:, 0]))
    cand_l = np.clip(_step_towards(X0[:, 0], X0[gstar, 0], omega), low, high)
    sigma = step_size_sigma(omega, it, cc.beta)
    cand_l[gstar] = update_global_leader(X0[gstar, 0], low, high, sigma, rng)

    cand = np.concatenate([cand_l[:, None], cand_a[:, None], cand_b], axis=1)
    cand = np.clip(p.snap(cand), low, high)
    pop.X, pop.F, _ = feasibility_gate(p, X0, F0, cand)
    regroup(pop, "global")


def optimize_box(p, low, high, cc: ConstrainedConfig, rng, box_id=None, callback=None):
    """Run the constrained optimizer inside one box."""
    c = cc.base
    t0 = time.perf_counter()
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)
    X, F, drawn = feasible_init(p, low, high, c.population_size, cc.init_rejection_cap, rng)
    pop = Population(X.reshape(c.G, c.n, p.dim), F.reshape(c.G, c.n))
    regroup(pop, "global")
    evals = drawn
    best_x, best_f = pop.best()
    trace = [best_f]
    if callback is not None:
        callback(0, pop)
    it = 0
    while not converged(trace, c, it):
        _iterate(pop, p, cc, rng, it, low, high)
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
        seed=None,
        problem=p.name,
        box_id=box_id,
    )


def _box_limits(box, p):
    if hasattr(box, "min") and hasattr(box, "max"):
        low, high = box.min, box.max
    else:
        low, high = box
    low = np.maximum(np.asarray(low, dtype=float), p.bounds.lower)
    high = np.minimum(np.asarray(high, dtype=float), p.bounds.upper)
    if low.shape != (p.dim,) or high.shape != (p.dim,) or np.any(low > high):
        raise ValueError("box limits must be length-N vectors with min <= max")
    return low, high


def optimize_constrained(p, boxes=None, cc: ConstrainedConfig = None, callback=None):
    """Optimize inside every box and return the best :class:`RunRecord`.

    ``boxes`` is a sequence of cluster boxes (objects with ``min``/``max``
    or ``(low, high)`` pairs); ``None`` means the whole bounds.  Box ``k``
    uses the random stream ``derive_seed(cc.base.seed, k)``.  A box in
    which no feasible start can be found is skipped with a warning.
    The returned trace is the best-so-far over all boxes, iteration by
    iteration.
    """
    p = resolve_problem(p)
    cc = ConstrainedConfig() if cc is None else cc
    t0 = time.perf_counter()
    if boxes is None:
        boxes = [(p.bounds.lower, p.bounds.upper)]
    boxes = list(boxes)
    if not boxes:
        raise ValueError("at least one box is required")
    records, failures = [], []
    for k, box in enumerate(boxes):
        low, high = _box_limits(box, p)
        rng = np.random.default_rng(derive_seed(cc.base.seed, k))
        try:
            cb = None if callback is None else (lambda it, pop, k=k: callback(k, it, pop))
            records.append(optimize_box(p, low, high, cc, rng, box_id=k, callback=cb))
        except InfeasibleRegion as exc:
            failures.append((k, exc))
            warnings.warn(f"box {k} skipped: {exc}", RuntimeWarning, stacklevel=2)
    if not records:
        raise InfeasibleRegion(
            f"no feasible starting population in any of the {len(boxes)} boxes"
        )
    best = min(records, key=lambda r: r.best_value)
    length = max(len(r.trace) for r in records)
    padded = np.array([np.pad(r.trace, (0, length - len(r.trace)), mode="edge") for r in records])
    return RunRecord(
        best_value=best.best_value,
        best_position=best.best_position,
        evaluations=sum(r.evaluations for r in records),
        iterations=max(r.iterations for r in records),
        wall_ms=(time.perf_counter() - t0) * 1e3,
        trace=padded.min(axis=0),
        seed=cc.base.seed,
        problem=p.name,
        box_id=best.box_id,
    )


class ConstrainedLAB(BaseEstimator):
    """Estimator-style wrapper around :func:`optimize_constrained`.

    ``fit(problem, boxes=None)`` sets ``best_x_``, ``best_f_``,
    ``trace_``, ``n_evals_``, ``n_iter_``, ``best_box_`` and ``record_``.
    """

    def __init__(self, n_per_group=3, n_groups=71, omega=0.8, beta=100.0, max_iter=1000,
                 stall_window=500, stall_tol=1e-12, init_rejection_cap=10000, random_state=0):
        self.n_per_group = n_per_group
        self.n_groups = n_groups
        self.omega = omega
        self.beta = beta
        self.max_iter = max_iter
        self.stall_window = stall_window
        self.stall_tol = stall_tol
        self.init_rejection_cap = init_rejection_cap
        self.random_state = random_state

    def _config(self):
        base = LabConfig(
            n=self.n_per_group, G=self.n_groups, max_iter=self.max_iter,
            stall_window=self.stall_window, stall_tol=self.stall_tol,
            seed=int(self.random_state or 0),
        )
        return ConstrainedConfig(base=base, omega=self.omega, beta=self.beta,
                                 init_rejection_cap=self.init_rejection_cap)

    def fit(self, problem, boxes=None):
        rec = optimize_constrained(problem, boxes, self._config())
        self.record_ = rec
        self.best_x_ = rec.best_position
        self.best_f_ = rec.best_value
        self.trace_ = rec.trace
        self.n_evals_ = rec.evaluations
        self.n_iter_ = rec.iterations
        self.best_box_ = rec.box_id
        return self
