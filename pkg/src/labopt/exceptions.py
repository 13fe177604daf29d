"""Exception hierarchy for labopt."""


class LabOptError(Exception):
    """Base class for all labopt errors."""


class ExpressionSyntaxError(LabOptError, ValueError):
    """Raised when an expression cannot be parsed.

    The ``offset`` attribute holds the byte offset into the source text
    where parsing failed.
    """

    def __init__(self, message, text="", offset=0):
        self.text = text
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class VariableIndexError(ExpressionSyntaxError):
    pass


class EvaluationError(LabOptError, ArithmeticError):
    """Division by zero or a domain error during expression evaluation."""


class DimensionError(LabOptError, ValueError):
    pass


class OutOfBoundsError(LabOptError, ValueError):
    pass


class ProblemDefinitionError(LabOptError, ValueError):
    pass


class UnknownProblemError(LabOptError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown problem"


class InfeasibleRegion(LabOptError, RuntimeError):
    """No feasible starting points could be drawn from a search box."""


class GridTooLarge(LabOptError, ValueError):
    pass


class EmptyFeasible(LabOptError, RuntimeError):
    pass


class AllNoise(LabOptError, RuntimeError):
    pass
