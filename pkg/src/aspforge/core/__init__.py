"""Ground program data model and its two exchange formats."""

from .errors import (
    AspError,
    BoundViolationError,
    DuplicateLiteralError,
    EncodingOverflowError,
    InvariantError,
    MixedClassError,
    NotNormalizedError,
    OracleCapError,
    ParseError,
    SmodelsFormatError,
    TruncatedInputError,
    UnknownRuleTypeError,
    UnsupportedClassError,
)
from .normalize import is_core, is_hidden, normalize, shift_weights
from .program import (
    FALSITY,
    NEG_INF,
    POS_INF,
    Atom,
    Disjunction,
    Falsity,
    Literal,
    NormalHead,
    Program,
    ProgramClass,
    Rule,
    SetHead,
    SetKind,
    Sizes,
    WeightAtom,
    cardinality,
    choice,
    classify_class,
    make_symbols,
    program_sizes,
    validate_program,
)
from .smodels import emit_smodels, parse_smodels, rule_type
from .text import emit_text, parse_text


def load_program(path, fmt=None) -> Program:
    """Read a program file; ``fmt`` is ``"lp"`` or ``"sm"`` (default by suffix)."""
    with open(path, encoding="utf-8") as fh:
        src = fh.read()
    if fmt is None:
        fmt = "sm" if str(path).endswith((".sm", ".smodels")) else "lp"
    return parse_smodels(src) if fmt == "sm" else parse_text(src)


__all__ = [name for name in dir() if not name.startswith("_")]
