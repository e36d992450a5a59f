"""Shared exception types.

Exit-code mapping used by the CLI: hypothesis or lemma failures are exit 1,
input/parse problems exit 2, precision or enumeration-budget problems exit 3.
"""


class PrecisionError(ArithmeticError):
    """A result is not determined at the working precision."""


class BudgetError(RuntimeError):
    """An exhaustive enumeration would exceed the allowed element budget."""


class ParseError(ValueError):
    """A curve file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class HypothesisFailure(Exception):
    """A named hypothesis check failed; carries the failing check name."""

    def __init__(self, name, detail=""):
        super().__init__(f"hypothesis failed: {name}" + (f" ({detail})" if detail else ""))
        self.name = name
        self.detail = detail
