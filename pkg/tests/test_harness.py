import signal
from dataclasses import replace

import pytest

from aspforge import harness
from aspforge.core import parse_text
from aspforge.fuzzer import oracle_config_for_class
from aspforge.harness import (
    CLASP_ADAPTER,
    SMODELS_ADAPTER,
    Outcome,
    OutcomeKind,
    SolverSpec,
    SpawnError,
    VerdictClass,
    campaign,
    classify_outcome,
    entry_solver_spec,
    load_entry,
    load_solver_spec,
    parse_solver_output,
    refsolve_spec,
    run_solver,
)
from aspforge.semantics import is_stable

P1 = parse_text("a :- not b.\nb :- not a.")


def sat(p, *names):
    return Outcome(OutcomeKind.SAT, model=frozenset(p.id_of(n) for n in names))


def test_parse_clasp_output():
    o = parse_solver_output(CLASP_ADAPTER, "Answer: 1\na b\nSATISFIABLE\n", P1.symbols)
    assert o.kind == OutcomeKind.SAT and o.model == frozenset({2, 3})
    assert parse_solver_output(CLASP_ADAPTER, "UNSATISFIABLE\n", P1.symbols).kind == OutcomeKind.UNSAT


def test_parse_smodels_output():
    o = parse_solver_output(SMODELS_ADAPTER, "Stable Model: zz\nTrue\n", P1.symbols)
    assert o.kind == OutcomeKind.MALFORMED
    o = parse_solver_output(SMODELS_ADAPTER, "Stable Model: b\nTrue\n", P1.symbols)
    assert o.model == frozenset({3})
    assert parse_solver_output(SMODELS_ADAPTER, "Stable Model: \nTrue\n", P1.symbols).model == frozenset()


@pytest.mark.parametrize("raw", ["", "hello\n", "SATISFIABLE\n", "SATISFIABLE\nUNSATISFIABLE\n"])
def test_unreadable_output_is_malformed(raw):
    assert parse_solver_output(CLASP_ADAPTER, raw, P1.symbols).kind == OutcomeKind.MALFORMED


def test_classify_examples():
    assert classify_outcome(P1, sat(P1, "a", "b")).verdict == VerdictClass.INVALID_ANSWER_SET
    assert classify_outcome(P1, Outcome(OutcomeKind.UNSAT)).verdict == VerdictClass.INCORRECT_UNSAT
    v = classify_outcome(P1, sat(P1, "a"))
    assert v.verdict == VerdictClass.PASS and v.verified


def test_classify_process_failures():
    assert classify_outcome(P1, Outcome(OutcomeKind.CRASH, signal=11)).verdict == VerdictClass.SEGFAULT
    assert classify_outcome(P1, Outcome(OutcomeKind.ABORT, signal=6)).verdict == VerdictClass.ABORT
    v = classify_outcome(P1, Outcome(OutcomeKind.TIMEOUT, wall_time=1.0))
    assert v.verdict == VerdictClass.HANG and "slowness" in v.evidence
    assert classify_outcome(P1, Outcome(OutcomeKind.NONZERO_EXIT, code=3)).verdict == VerdictClass.MALFORMED


def test_incorrect_sat_on_unsat_program():
    p = parse_text("a.\n:- a.")
    assert classify_outcome(p, sat(p, "a")).verdict == VerdictClass.INCORRECT_SAT
    assert classify_outcome(p, Outcome(OutcomeKind.UNSAT)).verdict == VerdictClass.PASS


def test_beyond_caps_is_unverified(monkeypatch):
    monkeypatch.setattr(harness, "oracle_caps", lambda: (1, 1))
    v = classify_outcome(P1, Outcome(OutcomeKind.UNSAT))
    assert v.verdict == VerdictClass.PASS and not v.verified and "cap" in v.evidence
    v = classify_outcome(P1, sat(P1, "a", "b"))
    assert v.verdict == VerdictClass.PASS and not v.verified


def test_run_refsolve_clean_and_crashing():
    o = run_solver(refsolve_spec(), P1)
    assert o.kind == OutcomeKind.SAT and is_stable(P1, o.model)
    choice = parse_text("{a}.")
    o = run_solver(refsolve_spec("crash-on-choice"), choice)
    assert o.kind == OutcomeKind.CRASH and o.signal == signal.SIGSEGV
    o = run_solver(refsolve_spec("abort-on-weight"), parse_text("h :- 1 [a=2].\n{a}."))
    assert o.kind == OutcomeKind.ABORT


def test_timeout_is_enforced():
    spec = refsolve_spec("hang-on-disjunction", timeout=1)
    o = run_solver(spec, parse_text("a | b."))
    assert o.kind == OutcomeKind.TIMEOUT
    assert o.wall_time <= spec.timeout + 1


def test_file_template_and_text_input(tmp_path):
    script = tmp_path / "echo_solver.py"
    script.write_text(
        "import sys\n"
        "src = open(sys.argv[1]).read()\n"
        "print('Answer: 1'); print('a' if 'not b' in src else ''); print('SATISFIABLE')\n"
    )
    spec = SolverSpec("echo", "{python} " + str(script) + " {file}", input_format="text")
    o = run_solver(spec, P1)
    assert o.kind == OutcomeKind.SAT and o.model == frozenset({2})


def test_nonzero_exit_and_garbage(tmp_path):
    spec = SolverSpec("exit3", "{python} -c 'import sys; sys.exit(3)'")
    assert run_solver(spec, P1).kind == OutcomeKind.NONZERO_EXIT
    spec = SolverSpec("chatty", "{python} -c 'print(42)'")
    assert run_solver(spec, P1).kind == OutcomeKind.MALFORMED


def test_spawn_failure():
    with pytest.raises(SpawnError):
        run_solver(SolverSpec("missing", "/nonexistent/solver"), P1)


def test_spec_validation_and_file(tmp_path):
    with pytest.raises(ValueError):
        SolverSpec("x", "true", timeout=0)
    path = tmp_path / "solver.spec"
    path.write_text(
        "name=mysolver\ncmd=/usr/bin/solver --quiet {file}\nformat=lp\ntimeout=3\n"
        "sat=^True\nunsat=^False\nmodel=^Stable Model: (.*)$\n"
    )
    spec = load_solver_spec(path)
    assert spec.name == "mysolver" and spec.input_format == "text" and spec.timeout == 3
    assert spec.adapter.sat_marker == "^True" and spec.adapter.model_line == "^Stable Model: (.*)$"
    assert spec.reads_file and spec.argv("/tmp/x.lp")[-1] == "/tmp/x.lp"


def test_campaign_with_zero_programs(tmp_path):
    report = campaign(oracle_config_for_class("NLP"), [refsolve_spec()], 0, tmp_path / "out")
    assert report.n_programs == 0 and report.entries == [] and report.defects() == 0
    assert not (tmp_path / "out").exists()


def test_campaign_persists_failures(tmp_path):
    cfg = oracle_config_for_class("NLP")
    spec = refsolve_spec("invalid-model-flip")
    report = campaign(cfg, [spec, refsolve_spec()], 25, tmp_path, max_failures=2)
    assert len(report.entries) == 2 and report.stopped_early
    assert report.count("refsolve", "pass") == report.n_programs
    for entry in report.entries:
        assert entry.parent.name == "invalid-answer-set"
        assert {f.name for f in entry.iterdir()} == {"program.lp", "program.sm", "meta", "raw.out"}
        p, meta = load_entry(entry)
        assert meta["verdict"] == "invalid-answer-set" and meta["solver.name"] == spec.name
        assert int(meta["seed"]) >= cfg.seed and meta["config.class"] == "NLP"
        # the verdict can be re-derived from the stored artifacts
        raw = (entry / "raw.out").read_text()
        o = parse_solver_output(CLASP_ADAPTER, raw, p.symbols)
        assert not is_stable(p, o.model)
        # and the run reproduces
        assert run_solver(entry_solver_spec(meta), p).kind == OutcomeKind.SAT
    assert "refsolve-invalid-model-flip.invalid-answer-set=2" in (tmp_path / "report").read_text()


def test_campaign_with_worker_pool(tmp_path):
    cfg = replace(oracle_config_for_class("WCP", 100), n_rules=10)
    serial = campaign(cfg, [refsolve_spec("crash-on-choice")], 6, tmp_path / "a")
    pooled = campaign(cfg, [refsolve_spec("crash-on-choice")], 6, tmp_path / "b", workers=2)
    assert serial.counts == pooled.counts
    assert [e.name for e in serial.entries] == [e.name for e in pooled.entries]


def test_differential_upgrade(monkeypatch):
    monkeypatch.setattr(harness, "oracle_caps", lambda: (24, 0))
    outcomes = {"good": sat(P1, "a"), "bad": Outcome(OutcomeKind.UNSAT)}
    verdicts = {k: classify_outcome(P1, o) for k, o in outcomes.items()}
    assert not verdicts["bad"].verified
    out = harness.differential(P1, outcomes, verdicts)
    assert out["bad"].verdict == VerdictClass.INCORRECT_UNSAT
    assert out["good"].verdict == VerdictClass.PASS


def test_differential_disagreement_without_oracle(monkeypatch):
    monkeypatch.setattr(harness, "oracle_caps", lambda: (0, 0))
    outcomes = {"x": sat(P1, "a"), "y": Outcome(OutcomeKind.UNSAT)}
    verdicts = {k: classify_outcome(P1, o) for k, o in outcomes.items()}
    out = harness.differential(P1, outcomes, verdicts)
    assert {v.verdict for v in out.values()} == {VerdictClass.DISAGREEMENT}
    assert not any(v.is_defect for v in out.values())
