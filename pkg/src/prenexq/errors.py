"""Exception types shared across the package."""


class PrenexqError(Exception):
    """Base class for all errors raised by this package."""


class WidthExceeded(PrenexqError):
    """Allocation would push the simulator past its qubit cap."""


class WidthTooSmall(PrenexqError):
    """A register is too narrow for the values it must hold."""


class WidthMismatch(PrenexqError):
    """Register width does not match what an operation expects."""


class BadIndex(PrenexqError):
    """Qubit index out of range or repeated within one gate."""


class ValueOutOfRange(PrenexqError):
    """Basis value does not fit in the addressed register."""


class ArityMismatch(PrenexqError):
    """Oracle input width disagrees with the wiring it is given."""


class BudgetInvalid(PrenexqError):
    """Error-budget fields violate their mutual constraints."""


class AncillaNotZero(PrenexqError):
    """A register that must be |0...0> holds something else."""


class UnboundVariable(PrenexqError):
    """Assignment references a variable the formula does not declare."""


class ParseError(PrenexqError):
    """Formula text rejected; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DuplicateVariable(ParseError):
    pass


class ZeroWidth(ParseError):
    pass


class LengthMismatch(PrenexqError):
    """Truth-table payload length does not equal 2^n."""


class BadCharacter(PrenexqError):
    """Truth-table payload contains something other than 0/1 or hex."""


class VarsMismatch(PrenexqError):
    """Truth-table header disagrees with the formula's declarations."""


class BadAxis(PrenexqError):
    """Unknown sweep axis."""
