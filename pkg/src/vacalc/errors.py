"""Exception types raised by vacalc."""


class VacalcError(Exception):
    """Base class for all library errors."""


class BothArgumentsNumeric(VacalcError):
    pass


class DuplicateVariable(VacalcError):
    pass


class UndefinedProduct(VacalcError):
    """A coefficient of a requested product would be an infinite sum."""


class UnboundedWindow(VacalcError):
    """A window does not cut a lazy series down to finitely many terms."""


class VariableCollision(VacalcError):
    pass


class MissingTableEntry(VacalcError):
    pass


class NotLocallyNilpotent(VacalcError):
    pass


class NotStronglyGraded(VacalcError):
    pass


class NotAHomomorphism(VacalcError):
    pass


class NoFit(VacalcError):
    pass


class AmbiguousFit(VacalcError):
    pass


class PoleHit(VacalcError):
    pass


class SpecInvalid(VacalcError):
    pass


class NotFiniteDimensional(VacalcError):
    pass


class SchemaError(VacalcError):
    pass


class InvariantViolation(VacalcError):
    def __init__(self, invariant: str, witness=None):
        self.invariant = invariant
        self.witness = witness
        super().__init__(f"{invariant}: {witness}")


class AlgebraMismatch(VacalcError):
    pass


class ExprSyntaxError(VacalcError):
    """Parse failure with a 1-based position and the expected token."""

    def __init__(self, line: int, column: int, expected: str, found: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        where = "EOF" if found == "" else repr(found)
        super().__init__(f"line {line}, column {column}: expected {expected}, found {where}")
