"""Acceptance criteria, one test each, every test printing a PASS/FAIL line.

Thresholds are taken as stated; nothing here is relaxed to make a run
pass.  The clean campaign runs ten thousand solver processes and takes
a while on a single core.
"""

import math
import random
import time
from dataclasses import replace
from itertools import combinations

from aspforge.core import (
    Literal,
    NormalHead,
    Rule,
    emit_smodels,
    emit_text,
    normalize,
    parse_smodels,
    parse_text,
    validate_program,
)
from aspforge.fuzzer import default_config_for_class, generate, oracle_config_for_class
from aspforge.harness import VerdictClass, campaign, refsolve_spec
from aspforge.reducer import FailurePredicate, ddmin, hdd_minimize, one_by_one
from aspforge.semantics import enumerate_stable, restrict

from .oracle import minimal_sets, stable_models, subsets

CLASSES = ("NLP", "WCP", "DLP")


def names(p, models):
    return [sorted(p.names(m)) for m in models]


def test_criterion_1_semantics_golden_suite(criterion):
    start = time.monotonic()
    cases = [
        ("a :- not b.\nb :- not a.", [["a"], ["b"]]),
        ("a :- a.", [[]]),
        ("a.\n:- a.", []),
        ("a | b.", [["a"], ["b"]]),
    ]
    failures = []
    for src, expected in cases:
        p = parse_text(src)
        got = names(p, enumerate_stable(p))
        brute = names(p, stable_models(p))
        if got != expected or brute != expected:
            failures.append((src, got, brute))
    elapsed = time.monotonic() - start
    ok = not failures and elapsed < 1.0
    criterion(1, ok, f"{len(cases) - len(failures)}/{len(cases)} golden programs exact, {elapsed:.3f}s (limit 1s)")
    assert not failures, failures
    assert elapsed < 1.0


def test_criterion_2_normalize_equivalence(criterion):
    start = time.monotonic()
    bad = []
    n = 2000
    for i in range(n):
        atoms = 1 + i % 12
        cfg = replace(default_config_for_class("WCP", 20000 + i), n_atoms=atoms, n_rules=1 + (i * 7) % (3 * atoms))
        p = generate(cfg)
        direct = enumerate_stable(p)
        compiled = sorted(set(restrict(enumerate_stable(normalize(p)), p.symbols)), key=lambda m: tuple(sorted(m)))
        if direct != compiled:
            bad.append(cfg.seed)
    elapsed = time.monotonic() - start
    ok = not bad and elapsed < 300
    criterion(2, ok, f"{n - len(bad)}/{n} WCP programs (1-12 atoms) agree with normalize, {elapsed:.1f}s (limit 300s)")
    assert not bad, bad[:10]
    assert elapsed < 300


def test_criterion_3_codec_round_trips(criterion):
    start = time.monotonic()
    rng = random.Random(3)
    text_bad, sm_bad, invalid = [], [], []
    n = 10000
    for i in range(n):
        cls = CLASSES[i % 3]
        cfg = replace(
            default_config_for_class(cls, rng.getrandbits(64)),
            n_atoms=rng.randint(1, 30),
            n_rules=rng.randint(0, 120),
        )
        p = generate(cfg)
        if validate_program(p):
            invalid.append(cfg.seed)
        if parse_text(emit_text(p)) != p:
            text_bad.append(cfg.seed)
        if parse_smodels(emit_smodels(p)) != normalize(p):
            sm_bad.append(cfg.seed)
    elapsed = time.monotonic() - start
    ok = not (text_bad or sm_bad or invalid) and elapsed < 300
    criterion(
        3, ok,
        f"{n} programs: {len(text_bad)} text, {len(sm_bad)} smodels mismatches, "
        f"{len(invalid)} invalid, {elapsed:.1f}s (limit 300s)",
    )
    assert not text_bad and not sm_bad and not invalid
    assert elapsed < 300


def test_criterion_4_clean_campaign(criterion, tmp_path):
    total, defects, entries = 0, 0, 0
    start = time.monotonic()
    for k, cls in enumerate(CLASSES):
        n = 10000 // 3 + (1 if k < 10000 % 3 else 0)
        report = campaign(oracle_config_for_class(cls, 100000 * k), [refsolve_spec()], n, tmp_path / cls)
        total += report.n_programs
        defects += report.defects()
        entries += len(report.entries)
    elapsed = time.monotonic() - start
    ok = total == 10000 and defects == 0 and entries == 0
    criterion(4, ok, f"{total} programs against bug-free refsolve, {defects} defects, {elapsed:.0f}s")
    assert total == 10000
    assert defects == 0 and entries == 0


BUG_CASES = [
    ("crash-on-choice", "WCP", VerdictClass.SEGFAULT),
    ("abort-on-weight", "WCP", VerdictClass.ABORT),
    ("hang-on-disjunction", "DLP", VerdictClass.HANG),
    ("invalid-model-flip", "NLP", VerdictClass.INVALID_ANSWER_SET),
    ("wrong-unsat-on-constraint", "NLP", VerdictClass.INCORRECT_UNSAT),
]


def test_criterion_5_defect_discovery(criterion, tmp_path):
    found = {}
    for bug, cls, expected in BUG_CASES:
        spec = refsolve_spec(bug, timeout=1.0)
        report = campaign(oracle_config_for_class(cls), [spec], 1000, tmp_path / bug, max_failures=1)
        verdicts = sorted({e.parent.name for e in report.entries})
        found[bug] = (report.n_programs, verdicts, expected.value)
    ok = all(v == [exp] for _, v, exp in found.values())
    detail = ", ".join(f"{bug}: {v[0] if v else 'none'} after {n}" for bug, (n, v, _) in found.items())
    criterion(5, ok, detail)
    for bug, (_, verdicts, expected) in found.items():
        assert verdicts == [expected], bug


def _planted_scenario():
    cfg = replace(default_config_for_class("NLP", 11), n_atoms=10, n_rules=199, body_len=(0, 2))
    background = generate(cfg)
    planted = Rule(NormalHead(2), (Literal(3), Literal(4, True), Literal(5), Literal(6, True), Literal(7, True)))
    rules = list(background.rules)
    rules.insert(137, planted)
    return replace(background, rules=tuple(rules)), 5


def test_criterion_6_reducer_minimality(criterion):
    p, k = _planted_scenario()
    pred = FailurePredicate(refsolve_spec("crash-on-neg3"), VerdictClass.SEGFAULT)
    # locate the trigger rule among 200, then its 3 literals among k
    floor = math.log2(len(p.rules)) + math.log2(math.comb(k, 3))
    results = {}
    for strategy in ("ddmin", "one-by-one"):
        q, report = hdd_minimize(p, pred, strategy)
        shape = len(q.rules) == 1 and len(q.rules[0].body) == 3 and len(q.rules[0].negative) == 3
        results[strategy] = (shape, report.certified, report.tests_run, report.final_size)
    same_size = results["ddmin"][3] == results["one-by-one"][3]
    checks = {s: r[0] and r[1] and r[2] <= 10 * floor for s, r in results.items()}
    ok = all(checks.values()) and same_size
    detail = (
        f"floor {floor:.2f} bits, bound {10 * floor:.1f} tests; "
        + "; ".join(
            f"{s}: shape {'ok' if r[0] else 'wrong'}, certified {r[1]}, {r[2]} tests"
            for s, r in results.items()
        )
    )
    criterion(6, ok, detail)
    for s, (shape, certified, tests, _) in results.items():
        assert shape and certified, s
    assert same_size
    for s, (_, _, tests, _) in results.items():
        assert tests <= 10 * floor, f"{s} ran {tests} tests, above 10x the {floor:.2f}-bit floor"


def test_criterion_7_ddmin_on_monotone_predicates(criterion):
    rng = random.Random(7)
    failures = []
    unique = 0
    for case in range(500):
        n = rng.randint(1, 10)
        units = list(range(n))
        rng.shuffle(units)
        generators = [frozenset(rng.sample(units, rng.randint(0, n))) for _ in range(rng.randint(1, 3))]

        def keep(s, generators=generators):
            s = set(s)
            return any(g <= s for g in generators)

        # brute force over all subsets
        minimal = minimal_sets([s for s in subsets(units) if keep(s)])
        if len(minimal) == 1:
            unique += 1
        for name, strategy in (("ddmin", ddmin), ("one_by_one", one_by_one)):
            kept = frozenset(strategy(units, keep))
            one_minimal = keep(kept) and not any(keep(kept - {u}) for u in kept)
            if not one_minimal or kept not in minimal:
                failures.append((case, name, sorted(kept)))
    ok = not failures
    criterion(7, ok, f"500 predicates ({unique} with a unique minimum), {len(failures)} failures")
    assert not failures, failures[:5]


def test_criterion_8_oracle_performance(criterion):
    programs = []
    for cls in CLASSES:
        for seed in range(2):
            programs.append(generate(replace(default_config_for_class(cls, seed), n_atoms=20, n_rules=120)))
    a = [f"a{i}" for i in range(1, 21)]
    # every candidate passes the cheap filters
    programs.append(parse_text(
        "{" + ", ".join(a) + "}.\n"
        + "".join(f"{a[i % 20]} :- {a[(i * 7 + 1) % 20]}, not {a[(i * 3 + 2) % 20]}.\n" for i in range(119))
    ))
    programs.append(parse_text(
        "".join(f"{a[2 * i]} | {a[2 * i + 1]}.\n" for i in range(10))
        + "".join(f"{a[i % 20]} | {a[(i * 7 + 3) % 20]} :- {a[(i * 3 + 5) % 20]}.\n" for i in range(110))
    ))
    worst = 0.0
    for p in programs:
        assert len(p.symbols) == 20 and len(p.rules) == 120
        start = time.monotonic()
        enumerate_stable(p)
        worst = max(worst, time.monotonic() - start)
    ok = worst < 30
    criterion(8, ok, f"{len(programs)} programs with 20 atoms and 120 rules, slowest {worst:.2f}s (limit 30s)")
    assert worst < 30
