"""Exception hierarchy shared by the codecs, the oracle and the tools."""


class AspError(Exception):
    """Base class for every error raised by aspforge."""


class ParseError(AspError, ValueError):
    """Malformed input, with an optional source position (1-based)."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class BoundViolationError(ParseError):
    """A set atom with lower bound greater than its upper bound."""


class DuplicateLiteralError(ParseError):
    """The same literal occurs twice inside one set atom."""


class SmodelsFormatError(ParseError):
    """Input that does not follow the numeric smodels format."""


class UnknownRuleTypeError(SmodelsFormatError):
    pass


class TruncatedInputError(SmodelsFormatError):
    pass


class InvariantError(AspError, ValueError):
    """A program value breaks one of the data-model invariants."""


class MixedClassError(InvariantError):
    """Weight atoms and disjunctive heads in the same program."""


class EncodingOverflowError(AspError, OverflowError):
    """A bound or weight leaves the 32-bit signed range after normalization."""


class UnsupportedClassError(AspError):
    """An operation was handed a program class it does not handle."""


class NotNormalizedError(AspError):
    """An operation that needs smodels core form got something else."""


class OracleCapError(AspError):
    """The brute-force oracle refuses programs above its atom cap."""

    def __init__(self, n_atoms, cap):
        self.n_atoms = n_atoms
        self.cap = cap
        super().__init__(f"{n_atoms} atoms exceed the oracle cap of {cap}")
