"""Population bookkeeping shared by both LAB variants.

The population is stored as dense arrays: positions ``X`` of shape
``(G, n, N)`` and cached values ``F`` of shape ``(G, n)``.  Within a
group, slot 0 is the leader, slot 1 the advocate and slots ``2..n-1``
the believers; ranking keeps that layout sorted by value.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._validation import check_scalar_range

__all__ = [
    "LEADER",
    "ADVOCATE",
    "BELIEVER",
    "LabConfig",
    "ConstrainedConfig",
    "RunRecord",
    "Population",
    "role_labels",
    "init_population",
    "assign_roles",
    "select_global_leader",
    "regroup",
    "converged",
]

LEADER, ADVOCATE, BELIEVER = "leader", "advocate", "believer"


@dataclass(frozen=True)
class LabConfig:
    """Tunables of the unconstrained optimizer.

    ``shrink_patience`` is the number of consecutive rejected local
    samples after which a leader's or advocate's sampling box shrinks by
    the factor ``1 - theta``.
    """

    n: int = 5
    G: int = 4
    theta: float = 0.15
    max_iter: int = 2000
    stall_window: int = 500
    stall_tol: float = 1e-12
    shrink_patience: int = 6
    seed: int = 0

    def __post_init__(self):
        check_scalar_range(self.n, "n", lo=3, integral=True)
        check_scalar_range(self.G, "G", lo=1, integral=True)
        check_scalar_range(self.theta, "theta", lo=0, hi=1, lo_open=True, hi_open=True)
        check_scalar_range(self.max_iter, "max_iter", lo=0, integral=True)
        check_scalar_range(self.stall_window, "stall_window", lo=1, integral=True)
        check_scalar_range(self.stall_tol, "stall_tol", lo=0)
        check_scalar_range(self.shrink_patience, "shrink_patience", lo=1, integral=True)
        check_scalar_range(self.seed, "seed", integral=True)

    @property
    def population_size(self):
        return self.n * self.G


@dataclass(frozen=True)
class ConstrainedConfig:
    """Tunables of the constrained optimizer (wraps a :class:`LabConfig`)."""

    base: LabConfig = field(default_factory=lambda: LabConfig(n=3, G=71, max_iter=1000))
    omega: float = 0.8
    beta: float = 100.0
    init_rejection_cap: int = 10000

    def __post_init__(self):
        check_scalar_range(self.omega, "omega", lo=0, hi=1, lo_open=True)
        check_scalar_range(self.beta, "beta", lo=1)
        check_scalar_range(self.init_rejection_cap, "init_rejection_cap", lo=1, integral=True)


@dataclass
class RunRecord:
    best_value: float
    best_position: np.ndarray
    evaluations: int
    iterations: int
    wall_ms: float
    trace: np.ndarray
    seed: Optional[int] = None
    problem: str = ""
    box_id: Optional[int] = None

    def as_dict(self):
        return {
            "best_value": self.best_value,
            "best_position": [float(v) for v in self.best_position],
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "wall_ms": self.wall_ms,
            "trace": [float(v) for v in self.trace],
            "seed": self.seed,
            "problem": self.problem,
            "box_id": self.box_id,
        }


@dataclass
class Population:
    """Positions ``X`` (G, n, N), values ``F`` (G, n) and per-individual extras.

    ``extras`` maps a name to an array whose first two axes are (G, n);
    those arrays travel with their individual whenever slots are permuted.
    """

    X: np.ndarray
    F: np.ndarray
    extras: dict = field(default_factory=dict)

    @property
    def G(self):
        return self.X.shape[0]

    @property
    def n(self):
        return self.X.shape[1]

    @property
    def dim(self):
        return self.X.shape[2]

    def leaders(self):
        return self.F[:, 0]

    def best(self):
        """(position, value) of the best individual currently held."""
        g, i = np.unravel_index(np.argmin(self.F), self.F.shape)
        return self.X[g, i].copy(), float(self.F[g, i])

    def permute(self, order):
        """Reorder members within each group; ``order`` has shape (G, n)."""
        self.X = np.take_along_axis(self.X, order[:, :, None], axis=1)
        self.F = np.take_along_axis(self.F, order, axis=1)
        for k, a in self.extras.items():
            idx = order.reshape(order.shape + (1,) * (a.ndim - 2))
            self.extras[k] = np.take_along_axis(a, idx, axis=1)

    def copy(self):
        return Population(self.X.copy(), self.F.copy(), {k: v.copy() for k, v in self.extras.items()})


def role_labels(n):
    """Role of each slot in a group of ``n`` ranked members."""
    return [LEADER, ADVOCATE] + [BELIEVER] * (n - 2)


def assign_roles(values):
    """Stable ascending ranking of one group's (or each group's) values.

    Returns the permutation that sorts ``values`` along the last axis;
    ties keep their original order.
    """
    return np.argsort(np.asarray(values, dtype=float), axis=-1, kind="stable")


def select_global_leader(leader_values):
    """Index of the group whose leader has the lowest value (first on ties)."""
    return int(np.argmin(np.asarray(leader_values, dtype=float)))


def init_population(p, c: LabConfig, rng, low=None, high=None):
    """Uniform random population in the bounds (or in ``[low, high]``), ranked."""
    low = p.bounds.lower if low is None else np.asarray(low, dtype=float)
    high = p.bounds.upper if high is None else np.asarray(high, dtype=float)
    X = rng.uniform(low, high, size=(c.G, c.n, p.dim))
    X = p.snap(X)
    F = p.objective_batch(X.reshape(-1, p.dim)).reshape(c.G, c.n)
    pop = Population(X, F)
    regroup(pop)
    return pop


def regroup(pop: Population, mode="local"):
    """Re-rank the population.

    ``mode="local"`` sorts members within each group and keeps group
    membership.  ``mode="global"`` sorts all individuals by value and
    deals consecutive blocks of ``n`` into the groups, so group 0 holds
    the ``n`` best individuals, group 1 the next ``n`` and so on.
    """
    if mode == "local":
        pop.permute(assign_roles(pop.F))
        return pop
    if mode != "global":
        raise ValueError(f"unknown regroup mode {mode!r}")
    G, n = pop.F.shape
    order = np.argsort(pop.F.reshape(-1), kind="stable")
    pop.X = pop.X.reshape(G * n, -1)[order].reshape(G, n, -1)
    pop.F = pop.F.reshape(-1)[order].reshape(G, n)
    for k, a in pop.extras.items():
        pop.extras[k] = a.reshape((G * n,) + a.shape[2:])[order].reshape(a.shape)
    return pop


def converged(trace, c: LabConfig, iteration):
    """Stopping rule: budget exhausted or no relative progress over a window.

    ``trace[k]`` is the best-so-far value after ``k`` iterations
    (``trace[0]`` is the initial population).
    """
    if iteration >= c.max_iter:
        return True
    W = c.stall_window
    if iteration < W:
        return False
    old, new = float(trace[iteration - W]), float(trace[iteration])
    return (old - new) / max(abs(old), 1e-12) < c.stall_tol
