"""Numeric smodels/lparse format.

One rule per line::

    1 head nbody nneg neg... pos...                       basic
    2 head nbody nneg bound neg... pos...                 cardinality
    3 nheads heads... nbody nneg neg... pos...            choice
    5 head bound nbody nneg neg... pos... weights...      weight
    8 nheads heads... nbody nneg neg... pos...            disjunctive

followed by ``0``, the symbol table (``id name``), ``0``, the compute
statement (``B+``, ids, ``0``, ``B-``, ids, ``0``) and the number of
models to compute.  Atom 1 is the falsity head of integrity constraints
and is always listed under ``B-``.
"""

from __future__ import annotations

from .errors import SmodelsFormatError, TruncatedInputError, UnknownRuleTypeError
from .normalize import aux_name, is_hidden, normalize
from .program import (
    FALSITY,
    FALSITY_ID,
    POS_INF,
    Disjunction,
    Falsity,
    Literal,
    NormalHead,
    Program,
    Rule,
    SetHead,
    SetKind,
    WeightAtom,
    choice,
)

RULE_BASIC = 1
RULE_CARDINALITY = 2
RULE_CHOICE = 3
RULE_WEIGHT = 5
RULE_DISJUNCTIVE = 8

KNOWN_RULE_TYPES = (RULE_BASIC, RULE_CARDINALITY, RULE_CHOICE, RULE_WEIGHT, RULE_DISJUNCTIVE)


def _head_id(h) -> int:
    return FALSITY_ID if isinstance(h, Falsity) else h.atom


def _split(lits):
    neg = [lit.atom for lit in lits if lit.negated]
    pos = [lit.atom for lit in lits if not lit.negated]
    return neg, pos


def rule_type(r: Rule) -> int:
    """Numeric rule type of a core-form rule."""
    if isinstance(r.head, Disjunction):
        return RULE_DISJUNCTIVE
    if isinstance(r.head, SetHead):
        return RULE_CHOICE
    if r.body and isinstance(r.body[0], WeightAtom):
        return RULE_WEIGHT if r.body[0].kind == SetKind.WEIGHT else RULE_CARDINALITY
    return RULE_BASIC


def _encode_rule(r: Rule) -> list[int]:
    kind = rule_type(r)
    if kind in (RULE_WEIGHT, RULE_CARDINALITY):
        w = r.body[0]
        neg, pos = _split(w.literals)
        line = [kind, _head_id(r.head)]
        if kind == RULE_CARDINALITY:
            return line + [len(neg) + len(pos), len(neg), w.lower] + neg + pos
        weights = [wt for lit, wt in w.elements if lit.negated] + [wt for lit, wt in w.elements if not lit.negated]
        return line + [w.lower, len(neg) + len(pos), len(neg)] + neg + pos + weights
    neg, pos = _split(r.body)
    body = [len(neg) + len(pos), len(neg)] + neg + pos
    if kind == RULE_BASIC:
        return [kind, _head_id(r.head)] + body
    heads = list(r.head.atoms) if kind == RULE_DISJUNCTIVE else list(r.head.atom.atoms())
    return [kind, len(heads)] + heads + body


def emit_smodels(p: Program) -> str:
    """Numeric encoding of ``normalize(p)``."""
    q = normalize(p)
    lines = [" ".join(map(str, _encode_rule(r))) for r in q.rules]
    lines.append("0")
    lines.extend(f"{i} {n}" for i, n in sorted(q.symbols.items()) if not is_hidden(i, n))
    lines += ["0", "B+", "0", "B-", str(FALSITY_ID), "0", "1"]
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, src: str):
        self.lines = src.splitlines()
        self.i = 0

    def next_line(self, what: str):
        if self.i >= len(self.lines):
            raise TruncatedInputError(f"input ends before {what}", self.i + 1)
        line = self.lines[self.i].strip()
        self.i += 1
        return line

    def ints(self, line: str):
        try:
            return [int(t) for t in line.split()]
        except ValueError:
            raise SmodelsFormatError(f"non-numeric token in {line!r}", self.i) from None


def _take(values, n, lineno):
    if n < 0 or len(values) < n:
        raise SmodelsFormatError("rule line too short", lineno)
    return values[:n], values[n:]


def _decode_body(vals, lineno):
    if len(vals) < 2:
        raise SmodelsFormatError("rule line too short", lineno)
    nbody, nneg = vals[0], vals[1]
    if not 0 <= nneg <= nbody:
        raise SmodelsFormatError("negative literal count exceeds body size", lineno)
    neg, rest = _take(vals[2:], nneg, lineno)
    pos, rest = _take(rest, nbody - nneg, lineno)
    lits = [Literal(a, True) for a in neg] + [Literal(a) for a in pos]
    return lits, rest


def _check_atom(a, lineno, allow_falsity=False):
    if a < 1 or (a == FALSITY_ID and not allow_falsity):
        raise SmodelsFormatError(f"invalid atom id {a}", lineno)


def _head(a, lineno):
    _check_atom(a, lineno, allow_falsity=True)
    return FALSITY if a == FALSITY_ID else NormalHead(a)


def _decode_rule(vals, lineno) -> Rule:
    kind = vals[0]
    rest = vals[1:]
    if kind not in KNOWN_RULE_TYPES:
        raise UnknownRuleTypeError(f"unknown rule type {kind}", lineno)
    if kind == RULE_BASIC:
        if not rest:
            raise SmodelsFormatError("rule line too short", lineno)
        lits, extra = _decode_body(rest[1:], lineno)
        rule = Rule(_head(rest[0], lineno), tuple(lits))
    elif kind in (RULE_CHOICE, RULE_DISJUNCTIVE):
        if not rest:
            raise SmodelsFormatError("rule line too short", lineno)
        heads, tail = _take(rest[1:], rest[0], lineno)
        for a in heads:
            _check_atom(a, lineno)
        lits, extra = _decode_body(tail, lineno)
        if kind == RULE_CHOICE:
            head = SetHead(choice(heads))
        else:
            if not heads or len(set(heads)) != len(heads):
                raise SmodelsFormatError("disjunctive head must list distinct atoms", lineno)
            head = Disjunction(tuple(heads))
        rule = Rule(head, tuple(lits))
    elif kind == RULE_CARDINALITY:
        if len(rest) < 4:
            raise SmodelsFormatError("rule line too short", lineno)
        head, nbody, nneg, bound = rest[:4]
        lits, extra = _decode_body([nbody, nneg] + rest[4:], lineno)
        w = WeightAtom(tuple((lit, 1) for lit in lits), bound, POS_INF, SetKind.CARDINALITY)
        rule = Rule(_head(head, lineno), (w,))
    else:
        if len(rest) < 4:
            raise SmodelsFormatError("rule line too short", lineno)
        head, bound = rest[:2]
        lits, tail = _decode_body(rest[2:], lineno)
        weights, extra = _take(tail, len(lits), lineno)
        w = WeightAtom(tuple(zip(lits, weights)), bound, POS_INF, SetKind.WEIGHT)
        rule = Rule(_head(head, lineno), (w,))
    if extra:
        raise SmodelsFormatError("trailing numbers on rule line", lineno)
    for a in rule.atoms():
        _check_atom(a, lineno)
    return rule


def parse_smodels(src: str) -> Program:
    """Parse the numeric format; unnamed atoms are called ``_u<id>``."""
    rd = _Reader(src)
    rules = []
    while True:
        line = rd.next_line("the end of the rule section")
        vals = rd.ints(line)
        if not vals:
            raise SmodelsFormatError("empty line in rule section", rd.i)
        if vals == [0]:
            break
        rules.append(_decode_rule(vals, rd.i))
    symbols = {}
    while True:
        line = rd.next_line("the end of the symbol table")
        if line == "0":
            break
        ident, _, name = line.partition(" ")
        try:
            a = int(ident)
        except ValueError:
            raise SmodelsFormatError(f"malformed symbol line {line!r}", rd.i) from None
        name = name.strip()
        if not name or a < 2:
            raise SmodelsFormatError(f"malformed symbol line {line!r}", rd.i)
        symbols[a] = name
    compute = {}
    for section in ("B+", "B-"):
        line = rd.next_line(f"the {section} section")
        if line != section:
            raise SmodelsFormatError(f"expected {section}, found {line!r}", rd.i)
        ids = []
        while True:
            line = rd.next_line(f"the end of the {section} section")
            vals = rd.ints(line)
            if len(vals) != 1:
                raise SmodelsFormatError(f"malformed compute line {line!r}", rd.i)
            if vals[0] == 0:
                break
            ids.append(vals[0])
        compute[section] = ids
    line = rd.next_line("the number of models")
    count = rd.ints(line)
    if len(count) != 1 or count[0] < 0:
        raise SmodelsFormatError(f"malformed models line {line!r}", rd.i)
    for a in compute["B+"]:
        _check_atom(a, rd.i)
        rules.append(Rule(FALSITY, (Literal(a, True),)))
    for a in compute["B-"]:
        if a != FALSITY_ID:
            _check_atom(a, rd.i)
            rules.append(Rule(FALSITY, (Literal(a),)))
    for r in rules:
        for a in r.atoms():
            if a not in symbols:
                symbols[a] = aux_name(a)
    return Program.build(rules, symbols)
