"""Human-readable lparse-style text format.

Grammar::

    program  := { rule } ;
    rule     := ( head | ) [ ":-" [ bodylist ] ] "." ;
    head     := atom { "|" atom } | setatom ;
    bodylist := bodyelem { "," bodyelem } ;
    bodyelem := [ "not" ] atom | setatom ;
    setatom  := [ int ] "[" [ welem { "," welem } ] "]" [ int ]
              | [ int ] "{" [ lelem { "," lelem } ] "}" [ int ] ;
    welem    := [ "not" ] atom "=" int ;
    lelem    := [ "not" ] atom ;

``%`` starts a comment.  Two comment pragmas carry what the rules alone
cannot express, so that ``parse_text(emit_text(p)) == p`` holds for every
valid program:

    %#atoms a1 a2 a3      symbol table in id order (``name@id`` if ids have gaps)
    %#class DLP           class tag, when wider than the rules require

An unbounded ``{...}`` in a head is a choice atom; in a body it is a
cardinality atom.
"""

from __future__ import annotations

import re

from .errors import BoundViolationError, DuplicateLiteralError, ParseError
from .program import (
    FALSITY,
    NAME_RE,
    NEG_INF,
    POS_INF,
    RESERVED_NAMES,
    Disjunction,
    Falsity,
    Literal,
    NormalHead,
    Program,
    ProgramClass,
    Rule,
    SetHead,
    SetKind,
    WeightAtom,
    admits,
    classify_rules,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[|,.\[\]{}=])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"{self.kind}:{self.text!r}@{self.line}:{self.col}"


def _tokenize(src: str):
    toks = []
    pragmas = []
    line, line_start, pos = 1, 0, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "comment":
            if m.group().startswith("%#"):
                pragmas.append((m.group(), line, col))
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks, pragmas


class _Parser:
    def __init__(self, src: str):
        self.toks, pragmas = _tokenize(src)
        self.i = 0
        self.ids: dict[str, int] = {}
        self.next_id = 2
        self.declared_class = None
        for text, line, col in pragmas:
            self._pragma(text, line, col)

    # pragmas -------------------------------------------------------------

    def _pragma(self, text, line, col):
        word, _, rest = text[2:].partition(" ")
        if word == "atoms":
            if self.ids:
                raise ParseError("repeated %#atoms pragma", line, col)
            for item in rest.split():
                name, at, num = item.partition("@")
                if not NAME_RE.match(name) or name in RESERVED_NAMES:
                    raise ParseError(f"invalid atom name {name!r} in %#atoms", line, col)
                ident = int(num) if at else self.next_id
                if name in self.ids or ident in self.ids.values() or ident < 2:
                    raise ParseError(f"conflicting declaration {item!r}", line, col)
                self.ids[name] = ident
                self.next_id = max(self.next_id, ident + 1)
        elif word == "class":
            try:
                self.declared_class = ProgramClass(rest.strip())
            except ValueError:
                raise ParseError(f"unknown program class {rest.strip()!r}", line, col) from None
        else:
            raise ParseError(f"unknown pragma %#{word}", line, col)

    # token helpers -------------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("punct", "if")

    def expect(self, text) -> _Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        tok = self.tok
        self.i += 1
        return tok

    def atom(self) -> int:
        tok = self.tok
        if tok.kind != "ident" or tok.text in RESERVED_NAMES:
            raise self.error(f"expected an atom, found {tok.text or 'end of input'!r}")
        if not NAME_RE.match(tok.text):
            raise self.error(f"invalid atom name {tok.text!r}")
        self.i += 1
        ident = self.ids.get(tok.text)
        if ident is None:
            ident = self.ids[tok.text] = self.next_id
            self.next_id += 1
        return ident

    def integer(self) -> int:
        tok = self.tok
        if tok.kind != "int":
            raise self.error(f"expected an integer, found {tok.text or 'end of input'!r}")
        self.i += 1
        return int(tok.text)

    def literal(self) -> Literal:
        if self.tok.kind == "ident" and self.tok.text == "not":
            self.i += 1
            return Literal(self.atom(), True)
        return Literal(self.atom(), False)

    # grammar -------------------------------------------------------------

    def starts_set_atom(self) -> bool:
        return self.tok.kind == "int" or self.at("[") or self.at("{")

    def set_atom(self, in_head: bool) -> WeightAtom:
        start = self.tok
        lower = self.integer() if self.tok.kind == "int" else NEG_INF
        if self.at("["):
            closer, kind = "]", SetKind.WEIGHT
        elif self.at("{"):
            closer, kind = "}", SetKind.CARDINALITY
        else:
            raise self.error("expected '[' or '{'")
        self.i += 1
        elements = []
        seen = set()
        if not self.at(closer):
            while True:
                lit_tok = self.tok
                lit = self.literal()
                if kind == SetKind.WEIGHT:
                    self.expect("=")
                    weight = self.integer()
                else:
                    weight = 1
                if lit in seen:
                    raise DuplicateLiteralError("literal occurs twice in a set atom", lit_tok.line, lit_tok.col)
                seen.add(lit)
                elements.append((lit, weight))
                if not self.at(","):
                    break
                self.i += 1
        self.expect(closer)
        upper = self.integer() if self.tok.kind == "int" else POS_INF
        if lower > upper:
            raise BoundViolationError(f"lower bound {lower} exceeds upper bound {upper}", start.line, start.col)
        if kind == SetKind.CARDINALITY and in_head and lower == NEG_INF and upper == POS_INF:
            if any(lit.negated for lit, _ in elements):
                raise ParseError("choice elements must be positive atoms", start.line, start.col)
            kind = SetKind.CHOICE
        return WeightAtom(tuple(elements), lower, upper, kind)

    def head(self):
        if self.at(":-") or self.at("."):
            return FALSITY
        if self.starts_set_atom():
            return SetHead(self.set_atom(in_head=True))
        first = self.tok
        atoms = [self.atom()]
        while self.at("|"):
            self.i += 1
            atoms.append(self.atom())
        if len(atoms) == 1:
            return NormalHead(atoms[0])
        if len(set(atoms)) != len(atoms):
            raise self.error("repeated atom in disjunctive head", first)
        return Disjunction(tuple(atoms))

    def body(self):
        elems = []
        if self.at("."):
            return elems
        while True:
            if self.starts_set_atom():
                elems.append(self.set_atom(in_head=False))
            else:
                elems.append(self.literal())
            if not self.at(","):
                return elems
            self.i += 1

    def rule(self) -> Rule:
        head = self.head()
        body = []
        if self.at(":-"):
            self.i += 1
            body = self.body()
        self.expect(".")
        return Rule(head, tuple(body))

    def program(self) -> Program:
        rules = []
        while self.tok.kind != "eof":
            rules.append(self.rule())
        symbols = {i: n for n, i in self.ids.items()}
        content = classify_rules(rules)
        cls = content
        if self.declared_class is not None:
            if not admits(self.declared_class, content):
                raise ParseError(f"%#class {self.declared_class.value} cannot hold {content.value} rules")
            cls = self.declared_class
        return Program.build(rules, symbols, cls)


def parse_text(src: str) -> Program:
    """Parse the text format; ids follow ``%#atoms`` then first appearance."""
    return _Parser(src).program()


# emission ----------------------------------------------------------------


def _lit(lit: Literal, names) -> str:
    return ("not " if lit.negated else "") + names[lit.atom]


def format_set_atom(w: WeightAtom, names) -> str:
    if w.kind == SetKind.WEIGHT:
        inner = ", ".join(f"{_lit(lit, names)}={wt}" for lit, wt in w.elements)
        text = f"[{inner}]"
    else:
        text = "{" + ", ".join(_lit(lit, names) for lit, _ in w.elements) + "}"
    if w.lower != NEG_INF:
        text = f"{w.lower} {text}"
    if w.upper != POS_INF:
        text = f"{text} {w.upper}"
    return text


def format_rule(r: Rule, names) -> str:
    h = r.head
    if isinstance(h, NormalHead):
        head = names[h.atom]
    elif isinstance(h, Disjunction):
        head = " | ".join(names[a] for a in h.atoms)
    elif isinstance(h, SetHead):
        head = format_set_atom(h.atom, names)
    else:
        head = ""
    body = ", ".join(format_set_atom(e, names) if isinstance(e, WeightAtom) else _lit(e, names) for e in r.body)
    if isinstance(h, Falsity):
        return f":- {body}." if body else ":- ."
    return f"{head} :- {body}." if body else f"{head}."


def _appearance_symbols(p: Program):
    order = {}
    for r in p.rules:
        for a in r.atoms():
            if a not in order:
                order[a] = len(order) + 2
    return order


def emit_text(p: Program) -> str:
    """Canonical text: one rule per line, each ending in a period."""
    lines = []
    if p.rules or p.symbols:
        order = _appearance_symbols(p)
        if any(order.get(a) != a for a in p.symbols) or len(order) != len(p.symbols):
            ids = sorted(p.symbols)
            if ids == list(range(2, len(ids) + 2)):
                items = [p.symbols[i] for i in ids]
            else:
                items = [f"{p.symbols[i]}@{i}" for i in ids]
            lines.append("%#atoms " + " ".join(items))
    if p.program_class != classify_rules(p.rules):
        lines.append(f"%#class {p.program_class.value}")
    lines.extend(format_rule(r, p.symbols) for r in p.rules)
    return "".join(line + "\n" for line in lines)
