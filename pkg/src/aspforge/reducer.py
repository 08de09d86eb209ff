"""Hierarchical delta debugging of failure-inducing programs.

A program is reduced on three levels that follow its grammar: whole
rules, body elements of one rule, and the atoms of a head disjunction or
the elements of one set atom.  Each level is a plain list of units which
is shrunk with :func:`one_by_one` or :func:`ddmin`; :func:`reconstruct`
turns the kept units back into a well-formed program.
"""

from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, NamedTuple, Optional, Sequence

from .core import (
    FALSITY,
    Disjunction,
    Literal,
    NormalHead,
    Program,
    Rule,
    SetHead,
    SetKind,
    Sizes,
    WeightAtom,
    emit_smodels,
    emit_text,
    program_sizes,
    validate_program,
)
from .harness import (
    SolverSpec,
    SpawnError,
    VerdictClass,
    classify_outcome,
    entry_solver_spec,
    load_entry,
    run_solver,
    write_key_values,
)

log = logging.getLogger(__name__)

HEAD = -1
STRATEGIES = ("one-by-one", "ddmin")


class ReproductionError(RuntimeError):
    pass


class UnitAddress(NamedTuple):
    """``(0, (i,))`` rule i; ``(1, (i, j))`` body element j of rule i;
    ``(2, (i, j, k))`` element k of the head (``j == -1``) or of body set atom j."""

    level: int
    path: tuple


# strategies ---------------------------------------------------------------


def one_by_one(units: Sequence, keep_test: Callable) -> list:
    """Drop single units while ``keep_test`` still holds, rescanning after any removal."""
    kept = list(units)
    removed = True
    while removed:
        removed = False
        i = 0
        while i < len(kept):
            cand = kept[:i] + kept[i + 1 :]
            if keep_test(cand):
                kept = cand
                removed = True
            else:
                i += 1
    return kept


def _chunks(items, n):
    size, extra = divmod(len(items), n)
    out, start = [], 0
    for i in range(n):
        end = start + size + (1 if i < extra else 0)
        out.append(items[start:end])
        start = end
    return out


def ddmin(units: Sequence, keep_test: Callable) -> list:
    """DDMin over the retained set.

    Chunks are tried alone first, then their complements; a subset hit
    resets the granularity to 2, a complement hit lowers it by one, and
    otherwise it doubles until every chunk is a single unit.  A lone
    remaining unit is checked against the empty set so the result is
    1-minimal.
    """
    c = list(units)
    n = 2
    while c:
        if len(c) == 1:
            return [] if keep_test([]) else c
        chunks = _chunks(c, min(n, len(c)))
        hit = None
        for ch in chunks:
            if keep_test(ch):
                hit, n = ch, 2
                break
        if hit is None and len(chunks) > 2:
            for i in range(len(chunks)):
                comp = [u for j, ch in enumerate(chunks) if j != i for u in ch]
                if keep_test(comp):
                    hit, n = comp, max(len(chunks) - 1, 2)
                    break
        if hit is not None:
            c = hit
            continue
        if n >= len(c):
            return c
        n = min(2 * n, len(c))
    return c


STRATEGY_FUNCS = {"one-by-one": one_by_one, "ddmin": ddmin}


# units and reconstruction -------------------------------------------------


def _set_of(r: Rule, j: int) -> Optional[WeightAtom]:
    if j == HEAD:
        return r.head.atom if isinstance(r.head, SetHead) else None
    e = r.body[j]
    return e if isinstance(e, WeightAtom) else None


def containers(p: Program) -> list[tuple[int, int]]:
    """``(rule, position)`` of every level-2 container in textual order."""
    out = []
    for i, r in enumerate(p.rules):
        if isinstance(r.head, (Disjunction, SetHead)):
            out.append((i, HEAD))
        out.extend((i, j) for j, e in enumerate(r.body) if isinstance(e, WeightAtom))
    return out


def container_units(p: Program, i: int, j: int) -> list[UnitAddress]:
    r = p.rules[i]
    if j == HEAD and isinstance(r.head, Disjunction):
        n = len(r.head.atoms)
    else:
        n = len(_set_of(r, j).elements)
    return [UnitAddress(2, (i, j, k)) for k in range(n)]


def units_at(p: Program, level: int) -> list[UnitAddress]:
    if level == 0:
        return [UnitAddress(0, (i,)) for i in range(len(p.rules))]
    if level == 1:
        return [UnitAddress(1, (i, j)) for i, r in enumerate(p.rules) for j in range(len(r.body))]
    return [u for i, j in containers(p) for u in container_units(p, i, j)]


def _shrink_set(w: WeightAtom, keep) -> WeightAtom:
    return replace(w, elements=tuple(e for k, e in enumerate(w.elements) if k in keep))


def reconstruct(p: Program, kept, level: Optional[int] = None) -> Program:
    """Remove every unit of one level that is not in ``kept`` and repair the rest.

    A disjunction left without atoms becomes falsity and one left with a
    single atom becomes a normal head; a set atom keeps its bounds over
    the remaining elements, and a choice head left empty drops its rule.
    The symbol table is never touched.
    """
    kept = set(kept)
    if level is None:
        levels = {u.level for u in kept}
        if len(levels) > 1:
            raise ValueError("kept units must belong to one level")
        level = levels.pop() if levels else 0
    if level == 0:
        idx = {u.path[0] for u in kept}
        rules = [r for i, r in enumerate(p.rules) if i in idx]
    elif level == 1:
        rules = [
            replace(r, body=tuple(e for j, e in enumerate(r.body) if UnitAddress(1, (i, j)) in kept))
            for i, r in enumerate(p.rules)
        ]
    else:
        rules = []
        for i, r in enumerate(p.rules):
            keep = lambda j: {k for (_, (a, b, k)) in kept if a == i and b == j}  # noqa: E731
            head = r.head
            if isinstance(head, Disjunction):
                atoms = tuple(a for k, a in enumerate(head.atoms) if k in keep(HEAD))
                head = FALSITY if not atoms else NormalHead(atoms[0]) if len(atoms) == 1 else Disjunction(atoms)
            elif isinstance(head, SetHead):
                w = _shrink_set(head.atom, keep(HEAD))
                if not w.elements and w.kind == SetKind.CHOICE:
                    continue
                head = SetHead(w)
            body = tuple(_shrink_set(e, keep(j)) if isinstance(e, WeightAtom) else e for j, e in enumerate(r.body))
            rules.append(Rule(head, body))
    return Program(tuple(rules), p.symbols, p.program_class)


def _without(p: Program, unit: UnitAddress) -> Program:
    return reconstruct(p, [u for u in units_at(p, unit.level) if u != unit], unit.level)


# failure predicate and test ----------------------------------------------


@dataclass(frozen=True)
class FailurePredicate:
    spec: SolverSpec
    target_class: VerdictClass
    match_mode: str = "exact"

    def __post_init__(self):
        if not VerdictClass(self.target_class).is_defect:
            raise ValueError("the target of a failure predicate must be a defect class")
        if self.match_mode not in ("exact", "any"):
            raise ValueError(f"unknown match mode {self.match_mode!r}")

    def matches(self, verdict: VerdictClass) -> bool:
        if self.match_mode == "any":
            return verdict.is_defect
        return verdict == self.target_class


def content_hash(p: Program) -> str:
    return hashlib.sha256(emit_text(p).encode()).hexdigest()


class CachedTester:
    """Cached failure test; ``runs`` counts actual solver invocations."""

    def __init__(self, pred: FailurePredicate):
        self.pred = pred
        self.cache: dict[str, bool] = {}
        self.runs = 0
        self.calls = 0

    def __call__(self, p: Program) -> bool:
        self.calls += 1
        key = content_hash(p)
        if key not in self.cache:
            self.runs += 1
            self.cache[key] = test(p, self.pred)
        return self.cache[key]


def test(p_candidate: Program, pred: FailurePredicate) -> bool:
    """Whether the candidate still shows the failure described by ``pred``."""
    errs = validate_program(p_candidate)
    if errs:
        raise ValueError(f"invalid candidate: {errs[0]}")
    try:
        o = run_solver(pred.spec, p_candidate)
    except SpawnError as exc:
        log.warning("solver did not start, counting as no reproduction: %s", exc)
        return False
    return pred.matches(classify_outcome(p_candidate, o).verdict)


# hierarchical minimization -----------------------------------------------


@dataclass
class ReductionReport:
    strategy: str
    original_size: Sizes
    final_size: Sizes = Sizes(0, 0, 0)
    tests_run: int = 0
    cache_hits: int = 0
    level_tests: dict = field(default_factory=dict)
    sweeps: int = 0
    certified: bool = False
    elapsed: float = 0.0

    def as_dict(self) -> dict[str, str]:
        out = {"strategy": self.strategy}
        for name, size in (("original", self.original_size), ("final", self.final_size)):
            out[f"{name}.rules"] = str(size.rules)
            out[f"{name}.body_elements"] = str(size.body_elements)
            out[f"{name}.set_elements"] = str(size.set_elements)
        out["tests_run"] = str(self.tests_run)
        out["cache_hits"] = str(self.cache_hits)
        for level, n in self.level_tests.items():
            out[f"tests.{level}"] = str(n)
        out["sweeps"] = str(self.sweeps)
        out["certified"] = str(self.certified).lower()
        out["elapsed"] = f"{self.elapsed:.2f}"
        return out


def certify(p: Program, tester: Callable, stop_early: bool = False) -> bool:
    """True iff no single-unit removal at any level keeps the failure."""
    ok = True
    for level in (0, 1, 2):
        for u in units_at(p, level):
            if tester(_without(p, u)):
                ok = False
                if stop_early:
                    return False
    return ok


def _reduce_level(p, level, strategy, tester):
    # each group of units is reduced with everything outside it held fixed
    if level == 0:
        groups = [None]
    elif level == 1:
        groups = list(range(len(p.rules)))
    else:
        # right to left, so a rule dropped by an emptied choice head does
        # not shift the rules still to be visited
        groups = containers(p)[::-1]
    changed = False
    for g in groups:
        if level == 0:
            units, fixed = units_at(p, 0), []
        elif level == 1:
            units = [UnitAddress(1, (g, j)) for j in range(len(p.rules[g].body))]
            fixed = [u for u in units_at(p, 1) if u.path[0] != g]
        else:
            units = container_units(p, *g)
            fixed = [u for u in units_at(p, 2) if u.path[:2] != g]
        if not units:
            continue
        kept = strategy(units, lambda s: tester(reconstruct(p, fixed + list(s), level)))
        if len(kept) < len(units):
            p = reconstruct(p, fixed + list(kept), level)
            changed = True
    return p, changed


def hdd_minimize(p: Program, pred: FailurePredicate, strategy: str = "ddmin", tester=None):
    """Shrink ``p`` while ``pred`` keeps failing; returns ``(program, report)``.

    Levels 0, 1 and 2 are swept in turn until a whole sweep removes
    nothing, then a certification pass re-tests every single-unit
    removal.  An input that is already 1-minimal is returned unchanged
    after certification alone.
    """
    if strategy not in STRATEGY_FUNCS:
        raise ValueError(f"unknown strategy {strategy!r}")
    tester = tester or CachedTester(pred)
    start = time.monotonic()
    report = ReductionReport(strategy, program_sizes(p))
    runs = tester.runs

    def charge(key):
        nonlocal runs
        report.level_tests[key] = report.level_tests.get(key, 0) + tester.runs - runs
        runs = tester.runs

    if not tester(p):
        raise ReproductionError("the input program does not reproduce the failure")
    charge("reproduce")
    if not certify(p, tester, stop_early=True):
        charge("precheck")
        func = STRATEGY_FUNCS[strategy]
        changed = True
        while changed:
            changed = False
            report.sweeps += 1
            for level in (0, 1, 2):
                p, c = _reduce_level(p, level, func, tester)
                changed |= c
                charge(f"level{level}")
    else:
        charge("precheck")
    report.certified = certify(p, tester)
    charge("certify")
    report.final_size = program_sizes(p)
    report.tests_run = tester.runs
    report.cache_hits = tester.calls - tester.runs
    report.elapsed = time.monotonic() - start
    return p, report


def minimize_entry(entry, strategy: str = "ddmin", match_mode: str = "exact", spec: Optional[SolverSpec] = None):
    """Minimize a corpus entry in place, writing ``minimized.lp``, ``minimized.sm`` and ``report``."""
    entry = Path(entry)
    p, meta = load_entry(entry)
    pred = FailurePredicate(spec or entry_solver_spec(meta), VerdictClass(meta["verdict"]), match_mode)
    q, report = hdd_minimize(p, pred, strategy)
    (entry / "minimized.lp").write_text(emit_text(q), encoding="utf-8")
    (entry / "minimized.sm").write_text(emit_smodels(q), encoding="utf-8")
    (entry / "report").write_text(write_key_values(report.as_dict()), encoding="utf-8")
    return q, report
