"""Compilation of programs into smodels core form.

Core form is what the numeric format can express directly:

* basic, choice and disjunctive rules whose bodies hold normal literals only;
* rules ``h :- W`` (``h`` an atom or falsity) whose whole body is a single
  weight or cardinality atom with a finite lower bound >= 0, no upper bound
  and non-negative weights.

Everything else is rewritten with fresh auxiliary atoms named ``_u<id>``:
negative weights are shifted onto the complementary literal, upper bounds
become ``not aux`` with ``aux`` defined at bound + 1, and weight or
cardinality heads turn into a choice over their positive atoms plus
integrity constraints enforcing the bounds.  Inside every rule, negative
literals come first, matching the order the numeric format stores them in.
"""

from __future__ import annotations

from .errors import EncodingOverflowError
from .program import (
    NEG_INF,
    POS_INF,
    FALSITY,
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

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


def aux_name(ident: int) -> str:
    return f"_u{ident}"


def is_hidden(ident: int, name: str) -> bool:
    """Auxiliary atoms keep no name in the numeric format."""
    return name == aux_name(ident)


def _neg_first(items, is_neg):
    return [x for x in items if is_neg(x)] + [x for x in items if not is_neg(x)]


def canonical_elements(elements):
    return tuple(_neg_first(list(elements), lambda e: e[0].negated))


def shift_weights(w: WeightAtom):
    """Move negative weights onto complementary literals.

    Returns ``(elements, lower, upper)`` with all weights >= 0 and the same
    satisfaction relation as ``w``.  Literals that collide after
    complementing are merged by adding their weights.
    """
    merged: dict[Literal, int] = {}
    lower, upper = w.lower, w.upper
    for lit, wt in w.elements:
        if wt < 0:
            lit, wt = lit.complement(), -wt
            lower += wt
            upper += wt
        merged[lit] = merged.get(lit, 0) + wt
    return canonical_elements(merged.items()), lower, upper


def is_core_rule(r: Rule) -> bool:
    if all(isinstance(e, Literal) for e in r.body):
        h = r.head
        return not isinstance(h, SetHead) or h.atom.kind == SetKind.CHOICE
    if len(r.body) != 1 or not isinstance(r.head, (NormalHead, Falsity)):
        return False
    w = r.body[0]
    return (
        w.kind in (SetKind.WEIGHT, SetKind.CARDINALITY)
        and w.lower != NEG_INF
        and w.lower >= 0
        and w.upper == POS_INF
        and all(wt >= 0 for _, wt in w.elements)
    )


def is_core(p: Program) -> bool:
    return all(is_core_rule(r) for r in p.rules)


def _canonical_rule(r: Rule) -> Rule:
    if r.body and isinstance(r.body[0], WeightAtom):
        w = r.body[0]
        return Rule(r.head, (WeightAtom(canonical_elements(w.elements), w.lower, w.upper, w.kind),))
    return Rule(r.head, tuple(_neg_first(list(r.body), lambda e: e.negated)))


class _Normalizer:
    def __init__(self, p: Program):
        self.symbols = dict(p.symbols)
        self.next_id = max(self.symbols, default=1) + 1
        self.out: list[Rule] = []

    def define(self, elements, bound, kind) -> int:
        ident = self.next_id
        self.next_id += 1
        self.symbols[ident] = aux_name(ident)
        self.out.append(Rule(NormalHead(ident), (WeightAtom(elements, max(bound, 0), POS_INF, kind),)))
        return ident

    def bound_literals(self, w: WeightAtom):
        """Normal literals equivalent to ``w`` (empty when ``w`` always holds)."""
        elements, lower, upper = shift_weights(w)
        lits = []
        if lower > 0:
            lits.append(Literal(self.define(elements, lower, w.kind)))
        if upper != POS_INF:
            lits.append(Literal(self.define(elements, upper + 1, w.kind), True))
        return lits

    def rule(self, r: Rule):
        if is_core_rule(r):
            self.out.append(_canonical_rule(r))
            return
        head = r.head
        if (
            len(r.body) == 1
            and isinstance(r.body[0], WeightAtom)
            and isinstance(head, (NormalHead, Falsity))
        ):
            elements, lower, upper = shift_weights(r.body[0])
            if upper == POS_INF:
                self.out.append(Rule(head, (WeightAtom(elements, max(lower, 0), POS_INF, r.body[0].kind),)))
                return
        lits = []
        for e in r.body:
            if isinstance(e, Literal):
                lits.append(e)
            else:
                lits.extend(self.bound_literals(e))
        if isinstance(head, SetHead) and head.atom.kind != SetKind.CHOICE:
            w = head.atom
            positive = [lit.atom for lit, _ in w.elements if not lit.negated]
            if positive:
                self.out.append(_canonical_rule(Rule(SetHead(choice(positive)), tuple(lits))))
            elements, lower, upper = shift_weights(w)
            if lower > 0:
                aux = self.define(elements, lower, w.kind)
                self.out.append(_canonical_rule(Rule(FALSITY, (*lits, Literal(aux, True)))))
            if upper != POS_INF:
                aux = self.define(elements, upper + 1, w.kind)
                self.out.append(_canonical_rule(Rule(FALSITY, (*lits, Literal(aux)))))
            return
        self.out.append(_canonical_rule(Rule(head, tuple(lits))))


def check_int32(p: Program):
    for k, r in enumerate(p.rules):
        for w in r.set_atoms:
            values = [wt for _, wt in w.elements]
            values += [b for b in (w.lower, w.upper) if b not in (NEG_INF, POS_INF)]
            for v in values:
                if not INT32_MIN <= v <= INT32_MAX:
                    raise EncodingOverflowError(f"rule {k}: value {v} outside the 32-bit signed range")


def normalize(p: Program) -> Program:
    """Satisfaction-equivalent program in smodels core form.

    Stable models of the result restricted to the atoms of ``p`` coincide
    with those of ``p``.  Idempotent.
    """
    n = _Normalizer(p)
    for r in p.rules:
        n.rule(r)
    q = Program.build(n.out, n.symbols)
    check_int32(q)
    return q
