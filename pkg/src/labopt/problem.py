"""Optimization problem definitions.

A :class:`Problem` bundles bounds, a vectorized objective, a list of
inequality constraints ``g(x) <= 0`` and optional per-dimension
discrete steps.  Problems come either from the built-in registry
(:mod:`labopt.benchmarks`) or from a JSON/YAML config file whose
objective and constraints are written in the expression language of
:mod:`labopt.expr`.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._validation import check_in_bounds, check_points
from .exceptions import DimensionError, ProblemDefinitionError, UnknownProblemError
from .expr import eval_expression, format_expression, parse_constraint, parse_expression

__all__ = [
    "FEAS_TOL",
    "Bounds",
    "Problem",
    "evaluate",
    "is_feasible",
    "load_problem_file",
    "problem_from_dict",
    "resolve_problem",
]

FEAS_TOL = 1e-9

BatchFn = Callable[[np.ndarray], np.ndarray]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Bounds:
    """Per-dimension box ``lower <= x <= upper``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _frozen(np.atleast_1d(self.lower))
        hi = _frozen(np.atleast_1d(self.upper))
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ProblemDefinitionError(
                f"lower and upper must be 1-D of equal length, got {lo.shape} and {hi.shape}"
            )
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ProblemDefinitionError("bounds must be finite")
        if np.any(lo >= hi):
            raise ProblemDefinitionError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    @property
    def span(self):
        return self.upper - self.lower

    def volume(self):
        return float(np.prod(self.span))

    def clip(self, X):
        return np.clip(X, self.lower, self.upper)

    def contains(self, X):
        X = np.asarray(X, dtype=float)
        return np.all((X >= self.lower) & (X <= self.upper), axis=-1)

    def __eq__(self, other):
        return (isinstance(other, Bounds) and np.array_equal(self.lower, other.lower)
                and np.array_equal(self.upper, other.upper))

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))


@dataclass(frozen=True, eq=False)
class Problem:
    """A minimization problem over a box.

    ``objective`` and every entry of ``constraints`` take an ``(m, N)``
    array and return an ``(m,)`` array.  ``discrete`` maps a zero-based
    dimension index to a grid step anchored at the lower bound.
    """

    name: str
    bounds: Bounds
    objective: BatchFn
    constraints: tuple = ()
    discrete: dict = field(default_factory=dict)
    known_best: Optional[float] = None
    known_argmin: Optional[np.ndarray] = None
    tags: tuple = ()
    feas_tol: float = FEAS_TOL
    source: Optional[dict] = None  # expression text for config-defined problems

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "tags", tuple(self.tags))
        disc = {}
        for k, step in dict(self.discrete).items():
            k = int(k)
            if not 0 <= k < self.dim:
                raise ProblemDefinitionError(f"discrete index {k} outside 0..{self.dim - 1}")
            step = float(step)
            if not step > 0:
                raise ProblemDefinitionError(f"discrete step for dimension {k} must be positive")
            if self.bounds.span[k] / step < 1:
                raise ProblemDefinitionError(
                    f"discrete step {step} admits fewer than two values in dimension {k}"
                )
            disc[k] = step
        object.__setattr__(self, "discrete", disc)
        if self.known_argmin is not None:
            object.__setattr__(self, "known_argmin", _frozen(self.known_argmin))

    @property
    def dim(self):
        return self.bounds.dim

    @property
    def n_constraints(self):
        return len(self.constraints)

    def snap(self, X):
        """Round discrete coordinates to their grid and keep them in bounds."""
        X = np.array(X, dtype=float)
        if not self.discrete:
            return X
        lo, hi = self.bounds.lower, self.bounds.upper
        for k, step in self.discrete.items():
            q = np.round((X[..., k] - lo[k]) / step)
            X[..., k] = np.clip(lo[k] + q * step, lo[k], hi[k])
        return X

    def evaluate_batch(self, X, snap=True):
        """Objective and constraint values for each row of ``X``.

        Returns ``(X_used, f, G)`` with ``X_used`` the (snapped) points,
        ``f`` of shape ``(m,)`` and ``G`` of shape ``(m, n_constraints)``.
        """
        X = check_points(X, self.dim, allow_empty=True)
        check_in_bounds(X, self.bounds.lower, self.bounds.upper)
        if snap:
            X = self.snap(X)
        m = X.shape[0]
        f = np.asarray(self.objective(X), dtype=float).reshape(m) if m else np.empty(0)
        G = np.empty((m, self.n_constraints))
        for j, g in enumerate(self.constraints):
            G[:, j] = np.asarray(g(X), dtype=float).reshape(m) if m else 0.0
        return X, f, G

    def objective_batch(self, X):
        """Objective only, for unconstrained loops (points assumed in bounds)."""
        return np.asarray(self.objective(self.snap(X)), dtype=float)

    def feasible_mask(self, G):
        G = np.asarray(G, dtype=float)
        if G.shape[-1] == 0:
            return np.ones(G.shape[:-1], dtype=bool)
        return np.max(G, axis=-1) <= self.feas_tol

    def __repr__(self):
        return f"Problem(name={self.name!r}, dim={self.dim}, constraints={self.n_constraints})"


def evaluate(p: Problem, x):
    """Evaluate one point: returns ``(f, g)`` with ``g`` the constraint values.

    ``x`` is snapped onto discrete grids first; use :meth:`Problem.snap`
    to obtain the point that was actually evaluated.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != p.dim:
        raise DimensionError(f"expected a point of length {p.dim}, got shape {x.shape}")
    _, f, G = p.evaluate_batch(x[None, :])
    return float(f[0]), G[0]


def is_feasible(p: Problem, x):
    _, g = evaluate(p, x)
    return bool(g.size == 0 or g.max() <= p.feas_tol)


# ---------------------------------------------------------------- config files


class _ExprFn:
    """Picklable batch evaluator wrapping a parsed expression."""

    def __init__(self, tree):
        self.tree = tree

    def __call__(self, X):
        return eval_expression(self.tree, X)

    def __repr__(self):
        return format_expression(self.tree)


def _discrete_index(key, dim):
    if isinstance(key, str):
        k = key.strip()
        if k.startswith("x"):
            k = k[1:]
        try:
            key = int(k)
        except ValueError:
            raise ProblemDefinitionError(f"bad discrete index {key!r}") from None
    key = int(key)
    if not 1 <= key <= dim:
        raise ProblemDefinitionError(f"discrete index {key} outside 1..{dim}")
    return key - 1


def _vector(value, dim, name):
    if np.isscalar(value):
        return np.full(dim, float(value))
    v = np.asarray(value, dtype=float)
    if v.shape != (dim,):
        raise ProblemDefinitionError(f"{name} must have {dim} entries, got {v.size}")
    return v


def problem_from_dict(doc: dict) -> Problem:
    """Build a problem from a parsed config document.

    Keys: ``name``, ``dim``, ``lower``, ``upper``, ``objective`` (optional,
    defaults to ``"0"``), ``constraints`` (list of strings) and
    ``discrete`` (mapping of one-based index, or ``"xK"``, to a step).
    """
    if not isinstance(doc, dict):
        raise ProblemDefinitionError("problem config must be a mapping")
    missing = [k for k in ("dim", "lower", "upper") if k not in doc]
    if missing:
        raise ProblemDefinitionError(f"problem config is missing {', '.join(missing)}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ProblemDefinitionError("dim must be a positive integer")
    bounds = Bounds(_vector(doc["lower"], dim, "lower"), _vector(doc["upper"], dim, "upper"))
    objective_text = str(doc.get("objective", "0"))
    objective = _ExprFn(parse_expression(objective_text, dim))
    constraint_texts = doc.get("constraints") or []
    if isinstance(constraint_texts, str):
        constraint_texts = [constraint_texts]
    constraints = tuple(_ExprFn(parse_constraint(str(c), dim)) for c in constraint_texts)
    discrete = {_discrete_index(k, dim): v for k, v in (doc.get("discrete") or {}).items()}
    return Problem(
        name=str(doc.get("name", "problem")),
        bounds=bounds,
        objective=objective,
        constraints=constraints,
        discrete=discrete,
        feas_tol=float(doc.get("feas_tol", FEAS_TOL)),
        source={"objective": objective_text, "constraints": list(map(str, constraint_texts))},
    )


def load_problem_file(path) -> Problem:
    """Read a problem from a ``.json`` or ``.yaml``/``.yml`` file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if str(path).lower().endswith((".yaml", ".yml")):
        import yaml

        doc = yaml.safe_load(text)
    else:
        doc = json.loads(text)
    p = problem_from_dict(doc)
    if "name" not in doc:
        p = Problem(**{**p.__dict__, "name": os.path.splitext(os.path.basename(path))[0]})
    return p


def resolve_problem(problem) -> Problem:
    """Accept a :class:`Problem`, a registry name, or a path to a config file."""
    if isinstance(problem, Problem):
        return problem
    from .benchmarks import get_problem, problem_names

    name = str(problem)
    if name in problem_names():
        return get_problem(name)
    if os.path.isfile(name):
        return load_problem_file(name)
    raise UnknownProblemError(
        f"unknown problem {name!r}: not a registry name and no such file"
    )
