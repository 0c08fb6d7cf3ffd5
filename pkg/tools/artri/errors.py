"""Exception hierarchy for the artri engines. The CLI maps any ArtriError to exit code 1 and any UsageError to 2."""

from __future__ import annotations

from typing import Optional


class ArtriError(Exception):
    """Base class for every domain error."""


class FieldMismatchError(ArtriError):
    pass


class DimensionMismatchError(ArtriError):
    pass


class InadmissibleRelationError(ArtriError):
    pass


class NotFiniteDimensionalError(ArtriError):
    pass


class ResolutionTooLongError(ArtriError):
    pass


class InfiniteGlobalDimensionError(ArtriError):
    pass


class PreconditionError(ArtriError):
    pass


class NotIndecomposableError(PreconditionError):
    pass


class ShapeViolation(ArtriError):
    """A triangle matched none of the AR-triangle templates. `diff` lists the failed constraints."""

    def __init__(self, message: str, diff: Optional[list] = None):
        super().__init__(message)
        self.diff = list(diff or [])

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diff:
            return base
        return base + "\n" + "\n".join(f"  - {d}" for d in self.diff)


class MeshInconsistency(ArtriError):
    pass


class NoSocleElementError(ArtriError):
    pass


class ProblemFileError(ArtriError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, col {column}: " if line else ""
        super().__init__(where + message)


class UsageError(Exception):
    """A mistake on the command line or in a name lookup. The CLI maps it to exit code 2."""


class UnknownNameError(UsageError, KeyError):
    """No complex, map or module of that name."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class ExpressionError(UsageError, ValueError):
    """A malformed module or complex expression."""
