"""Vectorized candidate checking for :func:`aspforge.semantics.enumerate_stable`.

Candidates are rows of a boolean matrix (one column per atom).  Each chunk
goes through the same three checks as the scalar route: classical model,
supportedness (a necessary condition that prunes most rows cheaply), then
either least-fixpoint equality of the reduct or, for disjunctive programs,
the scalar minimality test on the few surviving rows.
"""

from __future__ import annotations

import numpy as np

from .core.normalize import shift_weights
from .core.program import Disjunction, Falsity, NormalHead, SetKind, has_disjunction
from .semantics import gl_reduct, has_smaller_model

CHUNK_BITS = 15


class _Set:
    __slots__ = ("pos", "pos_w", "neg", "neg_w", "lower", "upper")

    def __init__(self, w, col):
        elements, self.lower, self.upper = shift_weights(w)
        pos = [(col[lit.atom], wt) for lit, wt in elements if not lit.negated]
        neg = [(col[lit.atom], wt) for lit, wt in elements if lit.negated]
        self.pos = np.array([c for c, _ in pos], dtype=np.intp)
        self.pos_w = np.array([wt for _, wt in pos], dtype=np.int64)
        self.neg = np.array([c for c, _ in neg], dtype=np.intp)
        self.neg_w = np.array([wt for _, wt in neg], dtype=np.int64)

    def pos_sum(self, x):
        return x[:, self.pos].astype(np.int64) @ self.pos_w

    def absent_sum(self, m):
        return (~m[:, self.neg]).astype(np.int64) @ self.neg_w

    def satisfied(self, m):
        s = self.pos_sum(m) + self.absent_sum(m)
        return (s >= self.lower) & (s <= self.upper)


class _Rule:
    __slots__ = ("pos", "neg", "sets", "kind", "head", "head_set")

    def __init__(self, r, col):
        self.pos = np.array([col[a] for a in r.positive], dtype=np.intp)
        self.neg = np.array([col[a] for a in r.negative], dtype=np.intp)
        self.sets = [_Set(w, col) for w in r.set_atoms]
        self.head_set = None
        h = r.head
        if isinstance(h, NormalHead):
            self.kind, self.head = "atom", col[h.atom]
        elif isinstance(h, Falsity):
            self.kind, self.head = "false", None
        elif isinstance(h, Disjunction):
            self.kind, self.head = "disj", np.array([col[a] for a in h.atoms], dtype=np.intp)
        else:
            w = h.atom
            self.kind = "choice" if w.kind == SetKind.CHOICE else "set"
            self.head = np.array([col[lit.atom] for lit, _ in w.elements if not lit.negated], dtype=np.intp)
            if self.kind == "set":
                self.head_set = _Set(w, col)

    def negation_ok(self, m):
        if self.neg.size:
            return ~m[:, self.neg].any(axis=1)
        return np.ones(len(m), dtype=bool)

    def body(self, m):
        t = self.negation_ok(m)
        if self.pos.size:
            t &= m[:, self.pos].all(axis=1)
        for s in self.sets:
            t &= s.satisfied(m)
        return t

    def head_true(self, m):
        if self.kind == "atom":
            return m[:, self.head]
        if self.kind == "false":
            return np.zeros(len(m), dtype=bool)
        if self.kind == "disj":
            return m[:, self.head].any(axis=1)
        if self.kind == "choice":
            return np.ones(len(m), dtype=bool)
        return self.head_set.satisfied(m)


def _supported(rules, m, bodies):
    sup = np.zeros_like(m)
    for r, bt in zip(rules, bodies):
        if r.kind == "atom":
            sup[:, r.head] |= bt
        elif r.kind == "disj":
            one = bt & (m[:, r.head].sum(axis=1) == 1)
            sup[:, r.head] |= one[:, None] & m[:, r.head]
        elif r.kind in ("choice", "set") and r.head.size:
            sup[:, r.head] |= bt[:, None] & m[:, r.head]
    return ~(m & ~sup).any(axis=1)


def _least_fixpoint(rules, m):
    # Reduct relative to each row of m, iterated to its least model.
    prepared = []
    for r in rules:
        if r.kind in ("false", "disj"):
            continue
        active = r.negation_ok(m)
        lowers = []
        for s in r.sets:
            if s.upper != np.inf:
                active &= (s.pos_sum(m) + s.absent_sum(m)) <= s.upper
            lowers.append(s.lower - s.absent_sum(m))
        if not active.any():
            continue
        prepared.append((r, active, lowers))
    x = np.zeros_like(m)
    changed = True
    while changed:
        changed = False
        for r, active, lowers in prepared:
            fire = active.copy()
            if r.pos.size:
                fire &= x[:, r.pos].all(axis=1)
            for s, low in zip(r.sets, lowers):
                fire &= s.pos_sum(x) >= low
            if r.kind == "atom":
                new = fire & ~x[:, r.head]
                if new.any():
                    x[:, r.head] |= fire
                    changed = True
            elif r.head.size:
                add = fire[:, None] & m[:, r.head]
                if (add & ~x[:, r.head]).any():
                    x[:, r.head] |= add
                    changed = True
    return (x == m).all(axis=1)


def enumerate_numpy(p, free, det):
    atoms = sorted(p.symbols)
    col = {a: i for i, a in enumerate(atoms)}
    rules = [_Rule(r, col) for r in p.rules]
    det_sets = [(col[x], _Set(w, col)) for x, w in det.items()]
    free_cols = np.array([col[a] for a in free], dtype=np.intp)
    disjunctive = has_disjunction(p.rules)
    shifts = np.arange(len(free), dtype=np.int64)
    total = 1 << len(free)
    step = 1 << CHUNK_BITS
    found = []
    for start in range(0, total, step):
        ints = np.arange(start, min(total, start + step), dtype=np.int64)
        m = np.zeros((len(ints), len(atoms)), dtype=bool)
        if len(free):
            m[:, free_cols] = ((ints[:, None] >> shifts) & 1).astype(bool)
        for c, s in det_sets:
            m[:, c] = s.satisfied(m)
        bodies = [r.body(m) for r in rules]
        ok = np.ones(len(m), dtype=bool)
        for r, bt in zip(rules, bodies):
            ok &= ~bt | r.head_true(m)
        ok &= _supported(rules, m, bodies)
        m = m[ok]
        if not len(m):
            continue
        if disjunctive:
            for row in m:
                cand = frozenset(atoms[i] for i in np.flatnonzero(row))
                if not has_smaller_model(gl_reduct(p, cand), cand):
                    found.append(cand)
        else:
            for row in m[_least_fixpoint(rules, m)]:
                found.append(frozenset(atoms[i] for i in np.flatnonzero(row)))
    return found
