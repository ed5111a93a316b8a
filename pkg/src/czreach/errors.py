"""Exception hierarchy for set computations."""


class CzreachError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(CzreachError, ValueError):
    """Operands live in incompatible spaces."""


class RankDeficient(CzreachError):
    """A matrix expected to have full row rank does not."""


class NotFullDimensional(RankDeficient):
    """A constrained zonotope has no MinRow representation."""


class NotInvertible(CzreachError):
    """A matrix that must be inverted is singular or badly conditioned."""


class Unbounded(CzreachError):
    """A polyhedron expected to be bounded is not."""


class Degenerate(CzreachError):
    """A set expected to be full-dimensional is flat."""


class NumericalFailure(CzreachError):
    """The LP backend could not certify an answer."""


class NormalizationDegenerate(CzreachError):
    """A cover row cannot be normalized."""


class ScenarioError(CzreachError, ValueError):
    """An RC scenario is inconsistent."""


class SchemaError(CzreachError, ValueError):
    """A JSON document does not match the expected schema."""

    def __init__(self, field: str, message: str, line: int | None = None, column: int | None = None):
        self.field = field
        self.line = line
        self.column = column
        where = field or "<root>"
        if line is not None:
            where = f"{where}:{line}:{column}"
        super().__init__(f"{where}: {message}")
