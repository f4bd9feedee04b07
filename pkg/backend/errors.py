"""
Error Hierarchy
Exceptions raised by the trace, expression, spec, simulation and SMC layers
"""

from typing import Optional


class PrccslError(Exception):
    """Base class for all toolkit errors"""


class IndexOutOfRange(PrccslError):
    """A step index lies outside [0, n]"""


class NonMonotone(PrccslError):
    """A tick list is not strictly increasing"""


class UnknownClock(PrccslError):
    """A clock name is neither in the run nor a derived definition"""


class CyclicDefinition(PrccslError):
    """A derived clock is defined in terms of itself"""


class SpecSyntaxError(PrccslError):
    """Spec text does not match the grammar"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        """
        Initialize syntax error

        Args:
            message: Human readable description
            line: 1-based line of the offending token
            column: 1-based column of the offending token
        """
        self.line = line
        self.column = column
        location = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{location}{message}")


class UndeclaredClock(PrccslError):
    """A spec references a clock that was never declared or defined"""


class BadParameter(PrccslError):
    """A numeric parameter is out of its allowed range"""


class InvalidModel(PrccslError):
    """A simulation model is structurally inconsistent"""


class ModelDeadlock(PrccslError):
    """An automaton reached its invariant bound with no enabled edge"""

    def __init__(self, message: str, time: float = 0.0):
        self.time = time
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.args[0], self.time)


class MissingRate(PrccslError):
    """A location without an upper invariant has no exponential rate"""


class GeneratorFailure(PrccslError):
    """Producing run j of an ensemble failed"""

    def __init__(self, message: str, j: Optional[int] = None):
        self.j = j
        self.message = message
        prefix = f"run {j}: " if j is not None else ""
        super().__init__(f"{prefix}{message}")

    def __reduce__(self):
        return type(self), (self.message, self.j)


class DegenerateDenominator(PrccslError):
    """The second property of a comparison never held"""


class EmptyEnsemble(PrccslError):
    """An ensemble verdict was requested over zero runs"""


class TraceFormatError(PrccslError):
    """A trace file does not follow the JSONL trace layout"""
