"""Data model for ground answer set programs.

Rules refer to atoms by integer id; the program's symbol table maps ids to
names.  Id 1 is never used: the smodels encoding reserves it for the
hidden falsity head of integrity constraints.

All values are immutable.  Infinite bounds of set atoms are stored as
``-math.inf`` / ``math.inf``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, NamedTuple, Optional, Union

from .errors import MixedClassError

NEG_INF = -math.inf
POS_INF = math.inf

FALSITY_ID = 1

NAME_RE = re.compile(r"[a-z_][A-Za-z0-9_]*\Z")
RESERVED_NAMES = frozenset({"not"})


class ProgramClass(str, enum.Enum):
    NLP = "NLP"
    WCP = "WCP"
    DLP = "DLP"


class SetKind(str, enum.Enum):
    WEIGHT = "weight"
    CARDINALITY = "cardinality"
    CHOICE = "choice"


class Atom(NamedTuple):
    id: int
    name: str


@dataclass(frozen=True)
class Literal:
    atom: int
    negated: bool = False

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def holds(self, m) -> bool:
        return (self.atom in m) != self.negated


@dataclass(frozen=True)
class WeightAtom:
    """``lower [l1=w1, ...] upper``; cardinality and choice atoms are special kinds."""

    elements: tuple[tuple[Literal, int], ...]
    lower: Union[int, float] = NEG_INF
    upper: Union[int, float] = POS_INF
    kind: SetKind = SetKind.WEIGHT

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(lit for lit, _ in self.elements)

    def atoms(self) -> Iterator[int]:
        for lit, _ in self.elements:
            yield lit.atom


def cardinality(literals, lower=NEG_INF, upper=POS_INF) -> WeightAtom:
    return WeightAtom(tuple((lit, 1) for lit in literals), lower, upper, SetKind.CARDINALITY)


def choice(atoms) -> WeightAtom:
    return WeightAtom(tuple((Literal(a), 1) for a in atoms), NEG_INF, POS_INF, SetKind.CHOICE)


@dataclass(frozen=True)
class NormalHead:
    atom: int


@dataclass(frozen=True)
class Falsity:
    pass


FALSITY = Falsity()


@dataclass(frozen=True)
class Disjunction:
    atoms: tuple[int, ...]


@dataclass(frozen=True)
class SetHead:
    atom: WeightAtom


Head = Union[NormalHead, Falsity, Disjunction, SetHead]
BodyElem = Union[Literal, WeightAtom]


@dataclass(frozen=True)
class Rule:
    head: Head
    body: tuple[BodyElem, ...] = ()

    @property
    def positive(self) -> tuple[int, ...]:
        """Atoms of the positive normal body literals."""
        return tuple(e.atom for e in self.body if isinstance(e, Literal) and not e.negated)

    @property
    def negative(self) -> tuple[int, ...]:
        """Atoms of the default-negated normal body literals."""
        return tuple(e.atom for e in self.body if isinstance(e, Literal) and e.negated)

    @property
    def set_atoms(self) -> tuple[WeightAtom, ...]:
        return tuple(e for e in self.body if isinstance(e, WeightAtom))

    @property
    def is_fact(self) -> bool:
        return not self.body and isinstance(self.head, NormalHead)

    @property
    def is_constraint(self) -> bool:
        return isinstance(self.head, Falsity)

    def head_atoms(self) -> tuple[int, ...]:
        h = self.head
        if isinstance(h, NormalHead):
            return (h.atom,)
        if isinstance(h, Disjunction):
            return h.atoms
        if isinstance(h, SetHead):
            return tuple(h.atom.atoms())
        return ()

    def atoms(self) -> Iterator[int]:
        yield from self.head_atoms()
        for e in self.body:
            if isinstance(e, Literal):
                yield e.atom
            else:
                yield from e.atoms()


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    symbols: Mapping[int, str] = field(default_factory=dict)
    program_class: ProgramClass = ProgramClass.NLP

    @classmethod
    def build(cls, rules, symbols, program_class=None) -> "Program":
        """Create a program, inferring the class from the rules when not given."""
        rules = tuple(rules)
        symbols = dict(sorted(symbols.items()))
        if program_class is None:
            program_class = classify_rules(rules)
        return cls(rules, symbols, ProgramClass(program_class))

    def atoms(self) -> list[Atom]:
        return [Atom(i, n) for i, n in sorted(self.symbols.items())]

    def atom_ids(self) -> list[int]:
        return sorted(self.symbols)

    def id_of(self, name: str) -> Optional[int]:
        for i, n in self.symbols.items():
            if n == name:
                return i
        return None

    def names(self, m) -> list[str]:
        return [self.symbols[a] for a in sorted(m)]

    def with_rules(self, rules) -> "Program":
        """Same symbol table, new rules, class re-inferred from the content."""
        return Program.build(rules, self.symbols)

    def __len__(self):
        return len(self.rules)


def has_weight_atoms(rules) -> bool:
    return any(isinstance(r.head, SetHead) or r.set_atoms for r in rules)


def has_disjunction(rules) -> bool:
    return any(isinstance(r.head, Disjunction) for r in rules)


def classify_rules(rules) -> ProgramClass:
    weights = has_weight_atoms(rules)
    disj = has_disjunction(rules)
    if weights and disj:
        raise MixedClassError("program mixes weight atoms and disjunctive heads")
    if weights:
        return ProgramClass.WCP
    if disj:
        return ProgramClass.DLP
    return ProgramClass.NLP


def classify_class(p: Program) -> ProgramClass:
    """Smallest class admitting the rules of ``p``; raises MixedClassError."""
    return classify_rules(p.rules)


def admits(program_class: ProgramClass, content_class: ProgramClass) -> bool:
    """Whether a program tagged ``program_class`` may hold ``content_class`` rules."""
    return content_class == ProgramClass.NLP or content_class == program_class


def make_symbols(names) -> dict[int, str]:
    """Symbol table ``{2: names[0], 3: names[1], ...}``."""
    return {i + 2: n for i, n in enumerate(names)}


class Sizes(NamedTuple):
    rules: int
    body_elements: int
    set_elements: int

    def __le__(self, other):
        return all(a <= b for a, b in zip(self, other))


def program_sizes(p: Program) -> Sizes:
    body = sum(len(r.body) for r in p.rules)
    elems = 0
    for r in p.rules:
        if isinstance(r.head, Disjunction):
            elems += len(r.head.atoms)
        elif isinstance(r.head, SetHead):
            elems += len(r.head.atom.elements)
        elems += sum(len(w.elements) for w in r.set_atoms)
    return Sizes(len(p.rules), body, elems)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_set_atom(w: WeightAtom, where: str, in_head: bool, out: list):
    if not isinstance(w.kind, SetKind):
        out.append(f"{where}: unknown set atom kind {w.kind!r}")
        return
    lo, hi = w.lower, w.upper
    if not (_is_int(lo) or lo == NEG_INF):
        out.append(f"{where}: lower bound must be an integer or omitted")
    if not (_is_int(hi) or hi == POS_INF):
        out.append(f"{where}: upper bound must be an integer or omitted")
    if _is_int(lo) and _is_int(hi) and lo > hi:
        out.append(f"{where}: lower bound {lo} exceeds upper bound {hi}")
    seen = set()
    for lit, wt in w.elements:
        if not _is_int(wt):
            out.append(f"{where}: weight {wt!r} is not an integer")
        if lit in seen:
            out.append(f"{where}: literal occurs twice")
        seen.add(lit)
    if w.kind == SetKind.CARDINALITY:
        if any(wt != 1 for _, wt in w.elements):
            out.append(f"{where}: cardinality atom with a weight other than one")
        if in_head and lo == NEG_INF and hi == POS_INF:
            out.append(f"{where}: unbounded cardinality head must be written as a choice")
    elif w.kind == SetKind.CHOICE:
        if lo != NEG_INF or hi != POS_INF:
            out.append(f"{where}: choice atom with a bound")
        if any(lit.negated for lit, _ in w.elements):
            out.append(f"{where}: choice atom with a negative literal")
        if any(wt != 1 for _, wt in w.elements):
            out.append(f"{where}: choice atom with a weight other than one")
        if not in_head:
            out.append(f"{where}: choice atom in a rule body")


def validate_program(p: Program) -> list[str]:
    """Every broken invariant of ``p`` as a human-readable description."""
    out: list[str] = []
    names = {}
    for i, name in p.symbols.items():
        if not _is_int(i) or i < 2:
            out.append(f"symbol table: invalid atom id {i!r}")
        if not isinstance(name, str) or not NAME_RE.match(name) or name in RESERVED_NAMES:
            out.append(f"symbol table: invalid atom name {name!r}")
        if name in names:
            out.append(f"symbol table: name {name!r} used by ids {names[name]} and {i}")
        names[name] = i
    known = set(p.symbols)
    for k, r in enumerate(p.rules):
        where = f"rule {k}"
        missing = sorted(set(r.atoms()) - known)
        for a in missing:
            out.append(f"{where}: atom {a} is not in the symbol table")
        h = r.head
        if isinstance(h, Disjunction):
            if not h.atoms:
                out.append(f"{where}: empty disjunction")
            if len(set(h.atoms)) != len(h.atoms):
                out.append(f"{where}: repeated atom in disjunction")
        elif isinstance(h, SetHead):
            _check_set_atom(h.atom, f"{where} head", True, out)
        elif not isinstance(h, (NormalHead, Falsity)):
            out.append(f"{where}: unknown head {h!r}")
        for j, e in enumerate(r.body):
            if isinstance(e, WeightAtom):
                _check_set_atom(e, f"{where} body element {j}", False, out)
            elif not isinstance(e, Literal):
                out.append(f"{where} body element {j}: unknown element {e!r}")
        if set(r.positive) & set(r.negative):
            out.append(f"{where}: atom both positive and negated in the body")
    try:
        content = classify_rules(p.rules)
    except MixedClassError as exc:
        out.append(str(exc))
    else:
        if not admits(p.program_class, content):
            out.append(f"program tagged {p.program_class.value} holds {content.value} rules")
    return out
