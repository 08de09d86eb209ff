"""Independent brute-force reference used by the tests.

Written straight from the definitions and sharing no code with the
package's semantics module beyond the data model: stability of normal and
disjunctive programs is decided by listing every subset of the candidate,
weight programs (non-negative weights, lower bounds, choice heads) by a
naive least-model iteration of the reduct.
"""

from itertools import chain, combinations

from aspforge.core import Disjunction, Falsity, Literal, NormalHead, SetHead, SetKind, WeightAtom


def subsets(items):
    items = sorted(items)
    return [frozenset(c) for c in chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))]


def lit_true(lit, m):
    return (lit.atom in m) != lit.negated


def set_true(w, m):
    if w.kind == SetKind.CHOICE:
        return True
    s = sum(wt for lit, wt in w.elements if lit_true(lit, m))
    return w.lower <= s <= w.upper


def elem_true(e, m):
    return lit_true(e, m) if isinstance(e, Literal) else set_true(e, m)


def is_model(p, m):
    for r in p.rules:
        if not all(elem_true(e, m) for e in r.body):
            continue
        h = r.head
        if isinstance(h, Falsity):
            return False
        if isinstance(h, NormalHead) and h.atom not in m:
            return False
        if isinstance(h, Disjunction) and not any(a in m for a in h.atoms):
            return False
        if isinstance(h, SetHead) and not set_true(h.atom, m):
            return False
    return True


def _normal_stable(p, m):
    reduct = []
    for r in p.rules:
        if any(isinstance(e, Literal) and e.negated and e.atom in m for e in r.body):
            continue
        pos = {e.atom for e in r.body if isinstance(e, Literal) and not e.negated}
        head = set(r.head_atoms())
        reduct.append((head, pos, isinstance(r.head, Falsity)))
    for sub in subsets(m):
        if sub == m:
            continue
        if all(not pos <= sub or (not falsity and head & sub) for head, pos, falsity in reduct):
            return False
    return True


def _weight_stable(p, m):
    # reduct: drop rules with a true negated normal literal; in set atoms
    # drop negated literals, lowering the bound by the weight of the false ones
    reduct = []
    for r in p.rules:
        if any(isinstance(e, Literal) and e.negated and e.atom in m for e in r.body):
            continue
        pos = [e.atom for e in r.body if isinstance(e, Literal) and not e.negated]
        sets = []
        for e in r.body:
            if isinstance(e, WeightAtom):
                assert e.upper == float("inf") and all(w >= 0 for _, w in e.elements)
                bound = e.lower - sum(w for lit, w in e.elements if lit.negated and lit.atom not in m)
                sets.append((bound, [(lit.atom, w) for lit, w in e.elements if not lit.negated]))
        if isinstance(r.head, SetHead):
            assert r.head.atom.kind == SetKind.CHOICE
            heads = [a for a in r.head.atom.atoms() if a in m]
        elif isinstance(r.head, NormalHead):
            heads = [r.head.atom]
        else:
            heads = []
        for h in heads:
            reduct.append((h, pos, sets))
    x = set()
    while True:
        new = {
            h for h, pos, sets in reduct
            if all(a in x for a in pos) and all(sum(w for a, w in el if a in x) >= b for b, el in sets)
        }
        if new <= x:
            break
        x |= new
    return x == m


def stable(p, m):
    m = frozenset(m)
    if not is_model(p, m):
        return False
    has_sets = any(isinstance(r.head, SetHead) or r.set_atoms for r in p.rules)
    return _weight_stable(p, m) if has_sets else _normal_stable(p, m)


def stable_models(p):
    return sorted((m for m in subsets(p.symbols) if stable(p, m)), key=lambda m: tuple(sorted(m)))


def minimal_sets(family):
    return {s for s in family if not any(t < s for t in family)}
