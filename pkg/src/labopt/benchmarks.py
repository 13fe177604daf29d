"""Built-in benchmark problems.

Classic closed-form test functions plus three engineering design
problems (pressure vessel, tension/compression spring, welded beam).
Every objective is vectorized: it maps an ``(m, N)`` array to ``(m,)``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import UnknownProblemError
from .problem import Bounds, Problem

__all__ = [
    "BenchmarkEntry",
    "registry",
    "problem_names",
    "get_problem",
    "pressure_vessel",
    "spring",
    "welded_beam",
]


# ------------------------------------------------------------- test functions


def sphere(X):
    return np.sum(X * X, axis=-1)


def ackley(X):
    n = X.shape[-1]
    a = np.sqrt(np.sum(X * X, axis=-1) / n)
    b = np.sum(np.cos(2 * np.pi * X), axis=-1) / n
    return -20.0 * np.exp(-0.2 * a) - np.exp(b) + 20.0 + np.e


def rastrigin(X):
    return 10.0 * X.shape[-1] + np.sum(X * X - 10.0 * np.cos(2 * np.pi * X), axis=-1)


def griewank(X):
    i = np.arange(1, X.shape[-1] + 1)
    return np.sum(X * X, axis=-1) / 4000.0 - np.prod(np.cos(X / np.sqrt(i)), axis=-1) + 1.0


def dixon_price(X):
    i = np.arange(2, X.shape[-1] + 1)
    return (X[..., 0] - 1.0) ** 2 + np.sum(i * (2.0 * X[..., 1:] ** 2 - X[..., :-1]) ** 2, axis=-1)


def quartic(X):
    # deterministic: the customary uniform noise term is left out
    i = np.arange(1, X.shape[-1] + 1)
    return np.sum(i * X**4, axis=-1)


def schwefel_1_2(X):
    return np.sum(np.cumsum(X, axis=-1) ** 2, axis=-1)


def schwefel_2_22(X):
    A = np.abs(X)
    return np.sum(A, axis=-1) + np.prod(A, axis=-1)


def step(X):
    return np.sum(np.floor(X + 0.5) ** 2, axis=-1)


def sum_squares(X):
    i = np.arange(1, X.shape[-1] + 1)
    return np.sum(i * X * X, axis=-1)


def zakharov(X):
    i = np.arange(1, X.shape[-1] + 1)
    s = np.sum(0.5 * i * X, axis=-1)
    return np.sum(X * X, axis=-1) + s**2 + s**4


def bohachevsky1(X):
    x, y = X[..., 0], X[..., 1]
    return x * x + 2 * y * y - 0.3 * np.cos(3 * np.pi * x) - 0.4 * np.cos(4 * np.pi * y) + 0.7


def bohachevsky2(X):
    x, y = X[..., 0], X[..., 1]
    return x * x + 2 * y * y - 0.3 * np.cos(3 * np.pi * x) * np.cos(4 * np.pi * y) + 0.3


def bohachevsky3(X):
    x, y = X[..., 0], X[..., 1]
    return x * x + 2 * y * y - 0.3 * np.cos(3 * np.pi * x + 4 * np.pi * y) + 0.3


def booth(X):
    x, y = X[..., 0], X[..., 1]
    return (x + 2 * y - 7) ** 2 + (2 * x + y - 5) ** 2


def matyas(X):
    x, y = X[..., 0], X[..., 1]
    return 0.26 * (x * x + y * y) - 0.48 * x * y


def schaffer(X):
    r2 = X[..., 0] ** 2 + X[..., 1] ** 2
    return 0.5 + (np.sin(np.sqrt(r2)) ** 2 - 0.5) / (1 + 0.001 * r2) ** 2


def six_hump_camelback(X):
    x, y = X[..., 0], X[..., 1]
    return 4 * x**2 - 2.1 * x**4 + x**6 / 3 + x * y - 4 * y**2 + 4 * y**4


_FOX = np.array([-32.0, -16.0, 0.0, 16.0, 32.0])
FOXHOLES_A = np.vstack([np.tile(_FOX, 5), np.repeat(_FOX, 5)])


def foxholes(X):
    d = X[..., :, None] - FOXHOLES_A  # (m, 2, 25)
    j = np.arange(1, 26)
    inner = j + np.sum(d**6, axis=-2)
    return 1.0 / (1.0 / 500.0 + np.sum(1.0 / inner, axis=-1))


KOWALIK_A = np.array([0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                      0.0456, 0.0342, 0.0323, 0.0235, 0.0246])
KOWALIK_B = 1.0 / np.array([0.25, 0.5, 1, 2, 4, 6, 8, 10, 12, 14, 16])


def kowalik(X):
    x1, x2, x3, x4 = (X[..., k, None] for k in range(4))
    b = KOWALIK_B
    model = x1 * (b * b + b * x2) / (b * b + b * x3 + x4)
    return np.sum((KOWALIK_A - model) ** 2, axis=-1)


HARTMAN3_C = np.array([1.0, 1.2, 3.0, 3.2])
HARTMAN3_A = np.array([[3.0, 10, 30], [0.1, 10, 35], [3.0, 10, 30], [0.1, 10, 35]])
HARTMAN3_P = 1e-4 * np.array([[3689, 1170, 2673], [4699, 4387, 7470],
                              [1091, 8732, 5547], [381, 5743, 8828]])
HARTMAN6_C = HARTMAN3_C
HARTMAN6_A = np.array([[10, 3, 17, 3.5, 1.7, 8],
                       [0.05, 10, 17, 0.1, 8, 14],
                       [3, 3.5, 1.7, 10, 17, 8],
                       [17, 8, 0.05, 10, 0.1, 14]])
HARTMAN6_P = 1e-4 * np.array([[1312, 1696, 5569, 124, 8283, 5886],
                              [2329, 4135, 8307, 3736, 1004, 9991],
                              [2348, 1451, 3522, 2883, 3047, 6650],
                              [4047, 8828, 8732, 5743, 1091, 381]])


def _hartman(X, c, A, P):
    d = X[..., None, :] - P  # (m, 4, N)
    return -np.sum(c * np.exp(-np.sum(A * d * d, axis=-1)), axis=-1)


def hartman3(X):
    return _hartman(X, HARTMAN3_C, HARTMAN3_A, HARTMAN3_P)


def hartman6(X):
    return _hartman(X, HARTMAN6_C, HARTMAN6_A, HARTMAN6_P)


# ------------------------------------------------------- engineering problems


def _pv_objective(Y):
    y1, y2, y3, y4 = Y[..., 0], Y[..., 1], Y[..., 2], Y[..., 3]
    return 0.6224 * y1 * y3 * y4 + 1.7781 * y2 * y3**2 + 3.1661 * y1**2 * y4 + 19.84 * y1**2 * y3


def _pv_g1(Y):
    return -Y[..., 0] + 0.0193 * Y[..., 2]


def _pv_g2(Y):
    return -Y[..., 1] + 0.00954 * Y[..., 2]


def _pv_g3(Y):
    y3, y4 = Y[..., 2], Y[..., 3]
    return -np.pi * y3**2 * y4 - (4.0 / 3.0) * np.pi * y3**3 + 1296000.0


def _pv_g4(Y):
    return Y[..., 3] - 240.0


def pressure_vessel() -> Problem:
    """Cylindrical pressure vessel; shell/head thicknesses are multiples of 0.0625."""
    return Problem(
        name="pressure_vessel",
        bounds=Bounds([0.0625, 0.0625, 10.0, 1.0], [99 * 0.0625, 99 * 0.0625, 200.0, 200.0]),
        objective=_pv_objective,
        constraints=(_pv_g1, _pv_g2, _pv_g3, _pv_g4),
        discrete={0: 0.0625, 1: 0.0625},
        known_best=6059.714335048436,
        tags=("constrained", "mixed"),
    )


def _spring_objective(X):
    d, D, N = X[..., 0], X[..., 1], X[..., 2]
    return (N + 2.0) * D * d**2


def _spring_g1(X):
    d, D, N = X[..., 0], X[..., 1], X[..., 2]
    return 1.0 - D**3 * N / (71785.0 * d**4)


def _spring_g2(X):
    d, D = X[..., 0], X[..., 1]
    return (4 * D**2 - d * D) / (12566.0 * (D * d**3 - d**4)) + 1.0 / (5108.0 * d**2) - 1.0


def _spring_g3(X):
    d, D, N = X[..., 0], X[..., 1], X[..., 2]
    return 1.0 - 140.45 * d / (D**2 * N)


def _spring_g4(X):
    return (X[..., 0] + X[..., 1]) / 1.5 - 1.0


def spring() -> Problem:
    """Tension/compression spring: x = (wire diameter, coil diameter, active coils)."""
    return Problem(
        name="spring",
        bounds=Bounds([0.05, 0.25, 2.0], [2.0, 1.3, 15.0]),
        objective=_spring_objective,
        constraints=(_spring_g1, _spring_g2, _spring_g3, _spring_g4),
        known_best=0.012665232788,
        tags=("constrained",),
    )


_WB_P, _WB_L, _WB_E, _WB_G = 6000.0, 14.0, 30e6, 12e6


def _wb_objective(Y):
    y1, y2, y3, y4 = Y[..., 0], Y[..., 1], Y[..., 2], Y[..., 3]
    return 1.10471 * y1**2 * y2 + 0.04811 * y3 * y4 * (14.0 + y2)


def _wb_tau(Y):
    y1, y2, y3 = Y[..., 0], Y[..., 1], Y[..., 2]
    P, L = _WB_P, _WB_L
    tau1 = P / (np.sqrt(2.0) * y1 * y2)
    M = P * (L + y2 / 2.0)
    R = np.sqrt(y2**2 / 4.0 + ((y1 + y3) / 2.0) ** 2)
    J = 2.0 * np.sqrt(2.0) * y1 * y2 * (y2**2 / 12.0 + ((y1 + y3) / 2.0) ** 2)
    tau2 = M * R / J
    return np.sqrt(tau1**2 + 2.0 * tau1 * tau2 * y2 / (2.0 * R) + tau2**2)


def _wb_g1(Y):
    return _wb_tau(Y) - 13600.0


def _wb_g2(Y):
    return 6.0 * _WB_P * _WB_L / (Y[..., 3] * Y[..., 2] ** 2) - 30000.0


def _wb_g3(Y):
    return Y[..., 0] - Y[..., 3]


def _wb_g4(Y):
    y1, y2, y3, y4 = Y[..., 0], Y[..., 1], Y[..., 2], Y[..., 3]
    return 0.10471 * y1**2 + 0.04811 * y3 * y4 * (14.0 + y2) - 5.0


def _wb_g5(Y):
    return 0.125 - Y[..., 0]


def _wb_g6(Y):
    y3, y4 = Y[..., 2], Y[..., 3]
    return 4.0 * _WB_P * _WB_L**3 / (_WB_E * y3**3 * y4) - 0.25


def _wb_g7(Y):
    y3, y4 = Y[..., 2], Y[..., 3]
    E, L = _WB_E, _WB_L
    pc = (4.013 * E * np.sqrt(y3**2 * y4**6 / 36.0) / L**2) * (
        1.0 - (y3 / (2.0 * L)) * np.sqrt(E / (4.0 * _WB_G))
    )
    return _WB_P - pc


def welded_beam() -> Problem:
    """Welded beam: y = (weld thickness, weld length, bar height, bar thickness)."""
    return Problem(
        name="welded_beam",
        bounds=Bounds([0.1, 0.1, 0.1, 0.1], [2.0, 10.0, 10.0, 2.0]),
        objective=_wb_objective,
        constraints=(_wb_g1, _wb_g2, _wb_g3, _wb_g4, _wb_g5, _wb_g6, _wb_g7),
        known_best=1.724852308597,
        tags=("constrained",),
    )


# ------------------------------------------------------------------- registry


@dataclass(frozen=True)
class BenchmarkEntry:
    name: str
    func: Callable
    dim: int
    lower: float
    upper: float
    known_best: float
    known_argmin: Optional[tuple] = None
    tags: tuple = ()

    def problem(self) -> Problem:
        argmin = None
        if self.known_argmin is not None:
            argmin = np.broadcast_to(np.asarray(self.known_argmin, dtype=float), (self.dim,))
        return Problem(
            name=self.name,
            bounds=Bounds(np.full(self.dim, self.lower), np.full(self.dim, self.upper)),
            objective=self.func,
            known_best=self.known_best,
            known_argmin=argmin,
            tags=self.tags,
        )


def _dixon_price_argmin(n):
    i = np.arange(1, n + 1)
    return tuple(2.0 ** (-(2.0**i - 2.0) / 2.0**i))


_ENTRIES = [
    BenchmarkEntry("foxholes", foxholes, 2, -65.536, 65.536, 0.998003837794449,
                   (-31.97833447228534, -31.97834078747712), ("multimodal", "separable")),
    BenchmarkEntry("ackley30", ackley, 30, -32.0, 32.0, 0.0, (0.0,), ("multimodal", "non-separable")),
    BenchmarkEntry("bohachevsky1", bohachevsky1, 2, -100.0, 100.0, 0.0, (0.0,), ("multimodal", "separable")),
    BenchmarkEntry("bohachevsky2", bohachevsky2, 2, -100.0, 100.0, 0.0, (0.0,), ("multimodal", "non-separable")),
    BenchmarkEntry("bohachevsky3", bohachevsky3, 2, -100.0, 100.0, 0.0, (0.0,), ("multimodal", "non-separable")),
    BenchmarkEntry("booth", booth, 2, -10.0, 10.0, 0.0, (1.0, 3.0), ("multimodal", "separable")),
    BenchmarkEntry("dixon_price30", dixon_price, 30, -10.0, 10.0, 0.0, _dixon_price_argmin(30),
                   ("unimodal", "non-separable")),
    BenchmarkEntry("griewank30", griewank, 30, -600.0, 600.0, 0.0, (0.0,), ("multimodal", "non-separable")),
    BenchmarkEntry("hartman3", hartman3, 3, 0.0, 1.0, -3.862779787332663,
                   (0.11458888122541287, 0.5556488954739371, 0.8525469842172746), ("multimodal", "non-separable")),
    BenchmarkEntry("hartman6", hartman6, 6, 0.0, 1.0, -3.32236801141551,
                   (0.20168950894999174, 0.15001069659227406, 0.47687397677352095,
                    0.27533242590941687, 0.3116516163202294, 0.6573005336988522),
                   ("multimodal", "non-separable")),
    BenchmarkEntry("kowalik", kowalik, 4, -5.0, 5.0, 3.0748598780560606e-4,
                   (0.1928334531220072, 0.19083624744042324, 0.12311730138624344, 0.13576599305292816), ("multimodal", "non-separable")),
    BenchmarkEntry("matyas", matyas, 2, -10.0, 10.0, 0.0, (0.0,), ("unimodal", "non-separable")),
    BenchmarkEntry("quartic30", quartic, 30, -1.28, 1.28, 0.0, (0.0,), ("unimodal", "separable")),
    BenchmarkEntry("rastrigin30", rastrigin, 30, -5.12, 5.12, 0.0, (0.0,), ("multimodal", "separable")),
    BenchmarkEntry("schaffer", schaffer, 2, -100.0, 100.0, 0.0, (0.0,), ("multimodal", "non-separable")),
    BenchmarkEntry("schwefel12_30", schwefel_1_2, 30, -100.0, 100.0, 0.0, (0.0,), ("unimodal", "non-separable")),
    BenchmarkEntry("schwefel222_30", schwefel_2_22, 30, -10.0, 10.0, 0.0, (0.0,), ("unimodal", "non-separable")),
    BenchmarkEntry("six_hump_camelback", six_hump_camelback, 2, -5.0, 5.0, -1.031628453489877,
                   (0.08984201368301331, -0.7126564032704135), ("multimodal", "non-separable")),
    BenchmarkEntry("sphere30", sphere, 30, -100.0, 100.0, 0.0, (0.0,), ("unimodal", "separable")),
    BenchmarkEntry("step30", step, 30, -100.0, 100.0, 0.0, (0.0,), ("unimodal", "separable")),
    BenchmarkEntry("sumsquares30", sum_squares, 30, -10.0, 10.0, 0.0, (0.0,), ("unimodal", "separable")),
    BenchmarkEntry("zakharov10", zakharov, 10, -5.0, 10.0, 0.0, (0.0,), ("unimodal", "non-separable")),
]

_ENGINEERING = {
    "pressure_vessel": pressure_vessel,
    "spring": spring,
    "welded_beam": welded_beam,
}


def registry():
    """All closed-form benchmark entries, in registry order."""
    return list(_ENTRIES)


def problem_names():
    return [e.name for e in _ENTRIES] + list(_ENGINEERING)


def get_problem(name: str) -> Problem:
    for e in _ENTRIES:
        if e.name == name:
            return e.problem()
    if name in _ENGINEERING:
        return _ENGINEERING[name]()
    raise UnknownProblemError(f"unknown problem {name!r}; try one of: {', '.join(problem_names())}")
