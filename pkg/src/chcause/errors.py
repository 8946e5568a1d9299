"""Exception hierarchy shared by every chcause module."""

from __future__ import annotations


class CHError(Exception):
    """Base class for all errors raised by chcause."""


class DimensionError(CHError, ValueError):
    pass


class NonFiniteError(CHError, ValueError):
    pass


class NotNormalized(CHError, ValueError):
    def __init__(self, norm: float):
        super().__init__(f"ket is not normalized (norm={norm:.12g})")
        self.norm = norm


class NotAProjector(CHError, ValueError):
    pass


class NotUnitary(CHError, ValueError):
    pass


class MeaninglessConjunction(CHError):
    """Raised whenever reasoning would combine non-commuting projectors.

    This is where the single framework rule is enforced: a product of two
    projectors that do not commute is not a property, so it is refused.
    """


class IncompletePDI(CHError, ValueError):
    pass


class NonOrthogonal(CHError, ValueError):
    pass


class NotInFramework(CHError, ValueError):
    pass


class InconsistentFamily(CHError):
    def __init__(self, max_offdiag: float):
        super().__init__(f"inconsistent-family max_offdiag={max_offdiag:.6g}")
        self.max_offdiag = max_offdiag


class UndefinedConditional(CHError, ZeroDivisionError):
    pass


class CombinatorialLimit(CHError, ValueError):
    pass


class FrameworkMismatch(CHError, ValueError):
    pass


class ParseError(CHError):
    """Syntax or semantic error in a scenario document, with its position."""

    def __init__(self, line: int, column: int, message: str, expected: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.expected = expected
        text = f"line {line}, column {column}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)
