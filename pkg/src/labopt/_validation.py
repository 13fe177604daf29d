"""Input validation and seeding helpers shared by the estimators."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import DimensionError, OutOfBoundsError

__all__ = [
    "check_points",
    "check_vector",
    "check_in_bounds",
    "check_scalar_range",
    "as_generator",
    "derive_seed",
]


def check_points(X, n_features=None, name="X", allow_empty=False):
    """Validate a 2-D float array of points, one point per row."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1 and n_features is not None and X.size == 0:
        X = X.reshape(0, n_features)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0:
        if not allow_empty:
            raise DimensionError(f"{name} is empty")
    else:
        X = check_array(X, dtype=np.float64, ensure_min_features=1, input_name=name)
    if n_features is not None and X.shape[1] != n_features:
        raise DimensionError(
            f"{name} has {X.shape[1]} columns, expected {n_features}"
        )
    return X


def check_vector(x, size=None, name="x"):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {x.shape}")
    if size is not None and x.shape[0] != size:
        raise DimensionError(f"{name} has length {x.shape[0]}, expected {size}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


def check_in_bounds(X, lower, upper, name="x"):
    X = np.asarray(X, dtype=float)
    bad = (X < lower) | (X > upper)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        raise OutOfBoundsError(
            f"{name} lies outside the bounds (first offending entry {tuple(idx)})"
        )


def check_scalar_range(value, name, lo=None, hi=None, lo_open=False, hi_open=False,
                       integral=False):
    """Check that a scalar lies in a (possibly half-open) interval."""
    kind = numbers.Integral if integral else numbers.Real
    if not isinstance(value, kind) or isinstance(value, bool):
        raise TypeError(f"{name} must be {'an integer' if integral else 'a real number'}")
    if lo is not None and (value < lo or (lo_open and value == lo)):
        raise ValueError(f"{name}={value!r} is below its lower limit {lo}")
    if hi is not None and (value > hi or (hi_open and value == hi)):
        raise ValueError(f"{name}={value!r} is above its upper limit {hi}")
    return value


def derive_seed(master, *keys):
    """Deterministic 64-bit seed for a sub-stream identified by ``keys``."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFFFFFFFFFF, *map(int, keys)])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def as_generator(random_state):
    """Turn ``None``, an int seed or a Generator into a numpy Generator."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None or isinstance(random_state, numbers.Integral):
        return np.random.default_rng(random_state)
    raise TypeError(f"cannot build a Generator from {random_state!r}")
