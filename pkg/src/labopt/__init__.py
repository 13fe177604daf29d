"""Modified LAB optimizer, clustering-based search space reduction and tools."""

from .benchmarks import get_problem, problem_names, registry
from .exceptions import (
    AllNoise,
    DimensionError,
    EmptyFeasible,
    EvaluationError,
    ExpressionSyntaxError,
    GridTooLarge,
    InfeasibleRegion,
    LabOptError,
    OutOfBoundsError,
    ProblemDefinitionError,
    UnknownIdentifierError,
    UnknownProblemError,
    VariableIndexError,
)
from .lab import ModifiedLAB, optimize
from .population import ConstrainedConfig, LabConfig, RunRecord
from .problem import Bounds, Problem, evaluate, load_problem_file, resolve_problem

__version__ = "0.1.0"
