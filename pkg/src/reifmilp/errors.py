"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class ReifMilpError(Exception):
    """Base class for all errors raised by reifmilp."""


class ModelError(ReifMilpError):
    pass


class DuplicateName(ModelError):
    pass


class InvertedBounds(ModelError):
    pass


class UnknownVar(ModelError):
    pass


class DuplicateTerm(ModelError):
    pass


class MissingValue(ModelError):
    pass


class InvalidSpec(ModelError):
    pass


class NotBinary(ModelError):
    pass


class BadK(ModelError):
    pass


class BadStep(ModelError):
    pass


class UnknownKernel(ModelError):
    pass


class NotOneHot(ReifMilpError):
    pass


class PartialMapping(ReifMilpError):
    pass


class SearchSpaceTooLarge(ReifMilpError):
    pass


class NumericalFailure(ReifMilpError):
    pass


class ValidationError(ReifMilpError):
    """Raised when a model fails validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"model failed validation: {lines}")


class ParseError(ReifMilpError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")
