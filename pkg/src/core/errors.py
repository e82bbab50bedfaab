"""Exception hierarchy for the Gödel Trick solver."""
from typing import Optional


class GodelTrickError(Exception):
    """Base class for every error raised by the library."""


class FormulaError(GodelTrickError):
    """A formula or CNF violates a structural invariant."""


class DimacsError(FormulaError):
    """Malformed DIMACS input. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class EvaluationError(GodelTrickError):
    """Inputs to an evaluator do not match the formula."""


class GradientError(GodelTrickError):
    """Backward pass called with an evaluation of a different formula."""


class PathError(GradientError):
    """A path is not a valid root-to-node walk in the given formula."""


class RepresentationError(GradientError):
    """A precondition of construct_representation is violated."""


class NoiseError(GodelTrickError):
    """Invalid noise parameters or an undefined noise operation."""


class CategoricalError(GodelTrickError):
    """Invalid input to the categorical helpers."""


class OracleError(GodelTrickError):
    """The brute-force oracle was asked to enumerate too many variables."""


class ConfigError(GodelTrickError):
    """A SolveConfig violates one of its invariants."""


class SolverError(GodelTrickError):
    """The optimisation loop reached an invalid state."""
