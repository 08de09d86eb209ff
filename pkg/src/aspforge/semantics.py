"""Executable stable-model semantics and the brute-force oracle.

Interpretations are frozensets of atom ids.  The definitions here are
deliberately direct: satisfaction, reducts and least models are computed
exactly as defined, and :func:`enumerate_stable` checks every candidate
interpretation.  The only shortcuts taken during enumeration are sound
pruning steps (see :func:`determined_atoms`), and the numpy backend is a
vectorized transcription of the same checks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional

from .core.errors import NotNormalizedError, OracleCapError, UnsupportedClassError
from .core.normalize import is_core, shift_weights
from .core.program import (
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
    has_disjunction,
    has_weight_atoms,
)

CHECK_CAP = 24
ENUM_CAP = 20
CAP_ENV = "ASPFORGE_ORACLE_CAP"


def oracle_caps() -> tuple[int, int]:
    """``(check_cap, enumeration_cap)``; the environment variable overrides both."""
    value = os.environ.get(CAP_ENV)
    if value:
        cap = int(value)
        return cap, cap
    return CHECK_CAP, ENUM_CAP


def interpretation(atoms: Iterable[int]) -> frozenset:
    return frozenset(atoms)


# satisfaction --------------------------------------------------------------


def weight_sum(w: WeightAtom, m) -> int:
    return sum(wt for lit, wt in w.elements if lit.holds(m))


def satisfies_weight_atom(w: WeightAtom, m) -> bool:
    if w.kind == SetKind.CHOICE:
        return True
    return w.lower <= weight_sum(w, m) <= w.upper


def body_holds(r: Rule, m) -> bool:
    for e in r.body:
        if isinstance(e, Literal):
            if not e.holds(m):
                return False
        elif not satisfies_weight_atom(e, m):
            return False
    return True


def head_holds(r: Rule, m) -> bool:
    h = r.head
    if isinstance(h, NormalHead):
        return h.atom in m
    if isinstance(h, Disjunction):
        return any(a in m for a in h.atoms)
    if isinstance(h, SetHead):
        return satisfies_weight_atom(h.atom, m)
    return False


def satisfies_rule(r: Rule, m) -> bool:
    return not body_holds(r, m) or head_holds(r, m)


def is_classical_model(p: Program, m) -> bool:
    return all(satisfies_rule(r, m) for r in p.rules)


# reducts ------------------------------------------------------------------


@dataclass(frozen=True)
class ReductRule:
    """Negation-free rule; an empty head is falsity.

    ``weights`` holds positive weight atoms as ``(lower, ((atom, w), ...))``.
    """

    head: tuple[int, ...]
    positive: tuple[int, ...] = ()
    weights: tuple[tuple[int, tuple[tuple[int, int], ...]], ...] = ()


@dataclass(frozen=True)
class ReductProgram:
    rules: tuple[ReductRule, ...]


def _normal_head(h) -> tuple[int, ...]:
    if isinstance(h, NormalHead):
        return (h.atom,)
    if isinstance(h, Disjunction):
        return h.atoms
    return ()


def gl_reduct(p: Program, m) -> ReductProgram:
    """Gelfond-Lifschitz reduct of a program without weight atoms."""
    if has_weight_atoms(p.rules):
        raise UnsupportedClassError("gl_reduct needs a program without weight atoms; use wcp_reduct")
    m = frozenset(m)
    out = []
    for r in p.rules:
        if any(a in m for a in r.negative):
            continue
        out.append(ReductRule(_normal_head(r.head), r.positive))
    return ReductProgram(tuple(out))


def _weight_reduct(p: Program, m) -> ReductProgram:
    # Negative weights are shifted first; a body atom whose upper bound is
    # exceeded in m removes the rule; set heads yield one rule per true atom.
    out = []
    for r in p.rules:
        if any(a in m for a in r.negative):
            continue
        weights = []
        dropped = False
        for w in r.set_atoms:
            elements, lower, upper = shift_weights(w)
            if upper != POS_INF and sum(wt for lit, wt in elements if lit.holds(m)) > upper:
                dropped = True
                break
            absent = sum(wt for lit, wt in elements if lit.negated and lit.atom not in m)
            pos = tuple((lit.atom, wt) for lit, wt in elements if not lit.negated)
            weights.append((lower - absent, pos))
        if dropped:
            continue
        body = (r.positive, tuple(weights))
        h = r.head
        if isinstance(h, SetHead):
            for lit, _ in h.atom.elements:
                if not lit.negated and lit.atom in m:
                    out.append(ReductRule((lit.atom,), *body))
        else:
            out.append(ReductRule(_normal_head(h), *body))
    return ReductProgram(tuple(out))


def wcp_reduct(p: Program, m) -> ReductProgram:
    """Reduct of a weight constraint program in smodels core form.

    Rules with a negated body atom in ``m`` are dropped and the remaining
    negative literals deleted; inside weight atoms the negative literals
    are deleted and the bound lowered by the weights of those whose atom
    is not in ``m``; a choice rule yields ``h <- body`` for each chosen
    ``h`` in ``m``.
    """
    if not is_core(p):
        raise NotNormalizedError("wcp_reduct needs a normalized program")
    return _weight_reduct(p, frozenset(m))


def least_model(reduct: ReductProgram) -> frozenset:
    """Least fixpoint of the immediate-consequence operator.

    Falsity heads are ignored; disjunctive heads are not allowed.
    """
    x: set[int] = set()
    rules = [r for r in reduct.rules if r.head]
    if any(len(r.head) > 1 for r in rules):
        raise UnsupportedClassError("least_model is undefined for disjunctive reducts")
    changed = True
    while changed:
        changed = False
        for r in rules:
            h = r.head[0]
            if h in x:
                continue
            if all(a in x for a in r.positive) and all(
                sum(wt for a, wt in elems if a in x) >= lower for lower, elems in r.weights
            ):
                x.add(h)
                changed = True
    return frozenset(x)


def _satisfiable(clauses) -> bool:
    """DPLL over clauses given as ``(positive_atoms, negative_atoms)`` sets."""

    def assign(cls, var, val):
        out = []
        for pos, neg in cls:
            if (var in pos and val) or (var in neg and not val):
                continue
            if var in pos or var in neg:
                pos, neg = pos - {var}, neg - {var}
                if not pos and not neg:
                    return None
            out.append((pos, neg))
        return out

    def solve(cls):
        while True:
            if not cls:
                return True
            unit = next((c for c in cls if len(c[0]) + len(c[1]) == 1), None)
            if unit is None:
                break
            pos, neg = unit
            var, val = (next(iter(pos)), True) if pos else (next(iter(neg)), False)
            cls = assign(cls, var, val)
            if cls is None:
                return False
        pos, neg = cls[0]
        var = min(pos | neg)
        for val in (False, True):
            rest = assign(cls, var, val)
            if rest is not None and solve(rest):
                return True
        return False

    cls = [(frozenset(p), frozenset(n)) for p, n in clauses]
    if any(not p and not n for p, n in cls):
        return False
    return solve(cls)


def has_smaller_model(reduct: ReductProgram, m) -> bool:
    """Whether some proper subset of ``m`` is a model of the positive ``reduct``.

    Searches the subsets of ``m`` with a small DPLL procedure instead of
    listing all of them.
    """
    m = frozenset(m)
    if not m:
        return False
    clauses = [(frozenset(), m)]
    for r in reduct.rules:
        if not set(r.positive) <= m:
            continue
        clauses.append((frozenset(a for a in r.head if a in m), frozenset(r.positive)))
    return _satisfiable(clauses)


# stability ----------------------------------------------------------------

NOT_A_MODEL = "not a classical model"
NOT_MINIMAL = "not minimal"
NOT_LEAST = "not the least fixpoint"
FOREIGN = "mentions atoms outside the program"


def explain_instability(p: Program, m) -> Optional[str]:
    """``None`` if ``m`` is a stable model of ``p``, else the violated condition."""
    m = frozenset(m)
    if not m <= p.symbols.keys():
        return FOREIGN
    if not is_classical_model(p, m):
        return NOT_A_MODEL
    if has_weight_atoms(p.rules):
        return None if least_model(_weight_reduct(p, m)) == m else NOT_LEAST
    if has_disjunction(p.rules):
        return NOT_MINIMAL if has_smaller_model(gl_reduct(p, m), m) else None
    return None if least_model(gl_reduct(p, m)) == m else NOT_LEAST


def is_stable(p: Program, m, cap: Optional[int] = None) -> bool:
    cap = oracle_caps()[0] if cap is None else cap
    if len(p.symbols) > cap:
        raise OracleCapError(len(p.symbols), cap)
    return explain_instability(p, m) is None


# enumeration --------------------------------------------------------------


def determined_atoms(p: Program) -> dict[int, WeightAtom]:
    """Atoms whose truth in any stable model is a function of the others.

    An atom qualifies when it heads exactly one rule, that rule is
    ``x :- W`` for a single set atom ``W``, and ``W`` mentions only atoms
    that do not qualify themselves.  Stable models are supported, so such
    an ``x`` is true exactly when ``W`` is satisfied.  This covers the
    auxiliary atoms introduced by normalization.
    """
    heads: dict[int, list[Rule]] = {}
    for r in p.rules:
        for a in r.head_atoms():
            heads.setdefault(a, []).append(r)
    cand = {}
    for a, rules in heads.items():
        if len(rules) != 1:
            continue
        r = rules[0]
        if isinstance(r.head, NormalHead) and len(r.body) == 1 and isinstance(r.body[0], WeightAtom):
            cand[a] = r.body[0]
    return {a: w for a, w in cand.items() if not any(b in cand for b in w.atoms())}


def _lex_key(m):
    return tuple(sorted(m))


def _split_atoms(p: Program):
    det = determined_atoms(p) if has_weight_atoms(p.rules) else {}
    free = [a for a in sorted(p.symbols) if a not in det]
    return free, det


def _enumerate_python(p: Program, free, det):
    found = []
    for bits in range(1 << len(free)):
        m = {a for i, a in enumerate(free) if bits >> i & 1}
        for x, w in det.items():
            if satisfies_weight_atom(w, m):
                m.add(x)
        if explain_instability(p, m) is None:
            found.append(frozenset(m))
    return found


PYTHON_BACKEND_LIMIT = 1 << 16


def enumerate_stable(p: Program, limit: Optional[int] = None, cap: Optional[int] = None, backend: str = "auto"):
    """All stable models of ``p`` in lexicographic order, truncated at ``limit``.

    ``cap`` bounds the number of atoms that are guessed (all atoms except
    those found by :func:`determined_atoms`).  ``backend`` is ``"python"``,
    ``"numpy"`` or ``"auto"``.
    """
    cap = oracle_caps()[1] if cap is None else cap
    free, det = _split_atoms(p)
    if len(free) > cap:
        raise OracleCapError(len(free), cap)
    if backend == "auto":
        backend = "python" if (1 << len(free)) * max(1, len(p.rules)) <= PYTHON_BACKEND_LIMIT else "numpy"
    if backend == "python":
        found = _enumerate_python(p, free, det)
    elif backend == "numpy":
        from ._vector import enumerate_numpy

        found = enumerate_numpy(p, free, det)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    found.sort(key=_lex_key)
    return found if limit is None else found[:limit]


def restrict(models, atoms) -> list[frozenset]:
    atoms = frozenset(atoms)
    return [frozenset(m & atoms) for m in models]
