"""Black-box solver execution, defect classification and fuzzing campaigns.

Solvers are external processes described by a :class:`SolverSpec`.  A run
produces an :class:`Outcome`; :func:`classify_outcome` turns it into a
:class:`Verdict` by consulting the brute-force oracle where the program is
small enough.  :func:`campaign` ties generation, execution and corpus
persistence together.
"""

from __future__ import annotations

import enum
import os
import re
import shlex
import signal
import subprocess
import sys
import tempfile
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import OracleCapError, Program, emit_smodels, emit_text
from .fuzzer import FuzzConfig, config_as_dict, generate
from .semantics import enumerate_stable, explain_instability, oracle_caps

DEFAULT_TIMEOUT = 10.0


class SpawnError(OSError):
    pass


# adapters and solver specs -------------------------------------------------


@dataclass(frozen=True)
class OutputAdapter:
    """Regular expressions that read one solver's output.

    ``model_line`` must have one capture group holding the space separated
    atom names of the first printed model.  Patterns use multiline mode.
    """

    sat_marker: str
    unsat_marker: str
    model_line: str


CLASP_ADAPTER = OutputAdapter(r"^SATISFIABLE\b", r"^UNSATISFIABLE\b", r"^Answer: \d+\n(.*)$")
SMODELS_ADAPTER = OutputAdapter(r"^True\b", r"^False\b", r"^Stable Model: ?(.*)$")
ADAPTERS = {"clasp": CLASP_ADAPTER, "smodels": SMODELS_ADAPTER}

FORMATS = {"text": "text", "lp": "text", "smodels": "smodels", "sm": "smodels"}
OK_EXIT_CODES = (0, 10, 20, 30)


@dataclass(frozen=True)
class SolverSpec:
    name: str
    command: str
    input_format: str = "smodels"
    adapter: OutputAdapter = CLASP_ADAPTER
    timeout: float = DEFAULT_TIMEOUT
    ok_exit_codes: tuple[int, ...] = OK_EXIT_CODES

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.input_format not in ("text", "smodels"):
            raise ValueError(f"unknown input format {self.input_format!r}")

    def argv(self, path: Optional[str] = None) -> list[str]:
        return [
            tok.replace("{python}", sys.executable).replace("{file}", path or "")
            for tok in shlex.split(self.command)
        ]

    @property
    def reads_file(self) -> bool:
        return "{file}" in self.command

    def as_dict(self) -> dict[str, str]:
        return {
            "name": self.name,
            "cmd": self.command,
            "format": self.input_format,
            "timeout": f"{self.timeout:g}",
            "sat": self.adapter.sat_marker,
            "unsat": self.adapter.unsat_marker,
            "model": self.adapter.model_line,
            "exit_ok": ",".join(map(str, self.ok_exit_codes)),
        }


def solver_spec_from_mapping(values: dict) -> SolverSpec:
    if "name" not in values or "cmd" not in values:
        raise ValueError("solver spec needs name= and cmd=")
    base = ADAPTERS[values.get("adapter", "clasp")]
    adapter = OutputAdapter(
        values.get("sat", base.sat_marker),
        values.get("unsat", base.unsat_marker),
        values.get("model", base.model_line),
    )
    fmt = values.get("format", "smodels")
    if fmt not in FORMATS:
        raise ValueError(f"unknown input format {fmt!r}")
    codes = values.get("exit_ok")
    return SolverSpec(
        name=values["name"],
        command=values["cmd"],
        input_format=FORMATS[fmt],
        adapter=adapter,
        timeout=float(values.get("timeout", DEFAULT_TIMEOUT)),
        ok_exit_codes=tuple(int(c) for c in codes.split(",")) if codes else OK_EXIT_CODES,
    )


def read_key_values(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, found {line!r}")
        out[key.strip()] = value
    return out


def write_key_values(values: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in values.items())


def load_solver_spec(path) -> SolverSpec:
    return solver_spec_from_mapping(read_key_values(Path(path).read_text(encoding="utf-8")))


def refsolve_spec(bug: str = "none", timeout: float = DEFAULT_TIMEOUT, name: Optional[str] = None) -> SolverSpec:
    """Spec for the built-in reference solver, optionally with an injected bug."""
    cmd = "{python} -m aspforge.refsolve"
    if bug != "none":
        cmd += f" --inject-bug {bug}"
    return SolverSpec(name or ("refsolve" if bug == "none" else f"refsolve-{bug}"), cmd, "smodels", CLASP_ADAPTER, timeout)


# outcomes -----------------------------------------------------------------


class OutcomeKind(str, enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    CRASH = "crash"
    ABORT = "abort"
    TIMEOUT = "timeout"
    MALFORMED = "malformed"
    NONZERO_EXIT = "nonzero-exit"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    model: Optional[frozenset] = None
    signal: Optional[int] = None
    code: Optional[int] = None
    raw: str = ""
    wall_time: float = 0.0
    detail: str = ""

    def describe(self) -> str:
        if self.kind == OutcomeKind.CRASH:
            return f"crash (signal {self.signal})"
        if self.kind == OutcomeKind.NONZERO_EXIT:
            return f"exit code {self.code}"
        return self.kind.value


def parse_solver_output(adapter: OutputAdapter, raw: str, symbols) -> Outcome:
    """Decode raw stdout into Sat(model), Unsat or MalformedOutput."""
    sat = re.search(adapter.sat_marker, raw, re.M)
    unsat = re.search(adapter.unsat_marker, raw, re.M)
    if sat and unsat:
        return Outcome(OutcomeKind.MALFORMED, raw=raw, detail="both markers present")
    if unsat:
        return Outcome(OutcomeKind.UNSAT, raw=raw)
    if not sat:
        return Outcome(OutcomeKind.MALFORMED, raw=raw, detail="no satisfiability marker")
    line = re.search(adapter.model_line, raw, re.M)
    if line is None:
        return Outcome(OutcomeKind.MALFORMED, raw=raw, detail="no model line")
    by_name = {name: ident for ident, name in symbols.items()}
    model = set()
    for name in line.group(1).split():
        if name not in by_name:
            return Outcome(OutcomeKind.MALFORMED, raw=raw, detail=f"unknown atom {name!r}")
        model.add(by_name[name])
    return Outcome(OutcomeKind.SAT, model=frozenset(model), raw=raw)


def _serialize(spec: SolverSpec, p: Program) -> str:
    return emit_smodels(p) if spec.input_format == "smodels" else emit_text(p)


def _kill(proc):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def run_solver(spec: SolverSpec, p: Program) -> Outcome:
    """Run one solver on ``p`` and capture what it did."""
    data = _serialize(spec, p)
    tmp = None
    if spec.reads_file:
        suffix = ".sm" if spec.input_format == "smodels" else ".lp"
        fd, tmp = tempfile.mkstemp(suffix=suffix, prefix="aspforge-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
    try:
        start = time.monotonic()
        try:
            proc = subprocess.Popen(
                spec.argv(tmp),
                stdin=subprocess.DEVNULL if tmp else subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                start_new_session=True,
            )
        except OSError as exc:
            raise SpawnError(exc.errno, f"cannot start {spec.name}: {exc.strerror}") from exc
        try:
            out, err = proc.communicate(None if tmp else data.encode(), timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            _kill(proc)
            out, err = proc.communicate()
            raw = _decode(out, err)
            return Outcome(OutcomeKind.TIMEOUT, raw=raw, wall_time=time.monotonic() - start)
        finally:
            if proc.poll() is None:
                _kill(proc)
                proc.wait()
        wall = time.monotonic() - start
    finally:
        if tmp:
            os.unlink(tmp)
    raw = _decode(out, err)
    rc = proc.returncode
    if rc < 0:
        if -rc == signal.SIGABRT:
            return Outcome(OutcomeKind.ABORT, signal=-rc, raw=raw, wall_time=wall)
        return Outcome(OutcomeKind.CRASH, signal=-rc, raw=raw, wall_time=wall)
    if rc not in spec.ok_exit_codes:
        return Outcome(OutcomeKind.NONZERO_EXIT, code=rc, raw=raw, wall_time=wall)
    o = parse_solver_output(spec.adapter, out.decode("utf-8", "replace"), p.symbols)
    return Outcome(o.kind, o.model, raw=raw, wall_time=wall, detail=o.detail)


def _decode(out: bytes, err: bytes) -> str:
    text = out.decode("utf-8", "replace")
    if err:
        text += "\n--- stderr ---\n" + err.decode("utf-8", "replace")
    return text


# verdicts -----------------------------------------------------------------


class VerdictClass(str, enum.Enum):
    PASS = "pass"
    SEGFAULT = "segfault"
    ABORT = "abort"
    HANG = "hang"
    INVALID_ANSWER_SET = "invalid-answer-set"
    INCORRECT_SAT = "incorrect-sat"
    INCORRECT_UNSAT = "incorrect-unsat"
    MALFORMED = "malformed"
    DISAGREEMENT = "differential-disagreement"

    @property
    def is_defect(self) -> bool:
        return self not in (VerdictClass.PASS, VerdictClass.DISAGREEMENT)


@dataclass(frozen=True)
class Verdict:
    verdict: VerdictClass
    evidence: str = ""
    verified: bool = True

    def __post_init__(self):
        if self.verdict.is_defect and not self.evidence:
            raise ValueError("defect verdicts need evidence")

    @property
    def is_defect(self) -> bool:
        return self.verdict.is_defect


def _names(p: Program, m) -> str:
    return "{" + ", ".join(sorted(p.symbols[a] for a in m)) + "}"


def classify_outcome(p: Program, o: Outcome) -> Verdict:
    check_cap, enum_cap = oracle_caps()
    kind = o.kind
    if kind == OutcomeKind.CRASH:
        return Verdict(VerdictClass.SEGFAULT, f"terminated by signal {o.signal}")
    if kind == OutcomeKind.ABORT:
        return Verdict(VerdictClass.ABORT, f"terminated by signal {o.signal}")
    if kind == OutcomeKind.TIMEOUT:
        return Verdict(
            VerdictClass.HANG,
            f"no answer after {o.wall_time:.2f}s; a hang cannot be told apart from slowness",
        )
    if kind == OutcomeKind.NONZERO_EXIT:
        return Verdict(VerdictClass.MALFORMED, f"exit code {o.code}")
    if kind == OutcomeKind.MALFORMED:
        return Verdict(VerdictClass.MALFORMED, o.detail or "unreadable output")
    if kind == OutcomeKind.SAT:
        if len(p.symbols) > check_cap:
            return Verdict(VerdictClass.PASS, f"model not checked: {len(p.symbols)} atoms exceed cap {check_cap}", False)
        reason = explain_instability(p, o.model)
        if reason is None:
            return Verdict(VerdictClass.PASS, "model checked stable")
        try:
            exists = bool(enumerate_stable(p, limit=1, cap=enum_cap))
        except OracleCapError:
            exists = None
        if exists is False:
            return Verdict(
                VerdictClass.INCORRECT_SAT,
                f"claimed model {_names(p, o.model)} is {reason}; the program has no stable model",
            )
        return Verdict(VerdictClass.INVALID_ANSWER_SET, f"claimed model {_names(p, o.model)} is {reason}")
    try:
        found = enumerate_stable(p, limit=1, cap=enum_cap)
    except OracleCapError as exc:
        return Verdict(VerdictClass.PASS, f"unsat not checked: {exc}", False)
    if found:
        return Verdict(VerdictClass.INCORRECT_UNSAT, f"oracle finds stable model {_names(p, found[0])}")
    return Verdict(VerdictClass.PASS, "oracle confirms no stable model")


def differential(p: Program, outcomes: dict, verdicts: dict) -> dict:
    """Upgrade unverified Sat/Unsat verdicts by comparing solvers.

    A model that the checker accepts convicts every Unsat claim; a Sat
    claim whose model fails the check is already a defect on its own.
    When nothing can be checked, contradicting claims are recorded as a
    disagreement against every solver involved.
    """
    sat = [s for s, o in outcomes.items() if o.kind == OutcomeKind.SAT]
    unsat = [s for s, o in outcomes.items() if o.kind == OutcomeKind.UNSAT]
    if not sat or not unsat:
        return verdicts
    out = dict(verdicts)
    check_cap = oracle_caps()[0]
    witness = None
    if len(p.symbols) <= check_cap:
        witness = next((s for s in sat if verdicts[s].verdict == VerdictClass.PASS), None)
    if witness is not None:
        for s in unsat:
            if not verdicts[s].is_defect:
                out[s] = Verdict(
                    VerdictClass.INCORRECT_UNSAT,
                    f"{witness} printed the checked stable model {_names(p, outcomes[witness].model)}",
                )
        return out
    for s in sat + unsat:
        if not verdicts[s].verified:
            other = ", ".join(x for x in sat + unsat if x != s)
            out[s] = Verdict(VerdictClass.DISAGREEMENT, f"{s} says {outcomes[s].kind.value}, contradicted by {other}", False)
    return out


# campaigns ----------------------------------------------------------------


@dataclass
class RunRecord:
    seed: int
    solver: str
    outcome: Optional[Outcome]
    verdict: Optional[Verdict]
    error: str = ""


@dataclass
class CampaignReport:
    n_programs: int = 0
    counts: dict = field(default_factory=dict)
    spawn_errors: Counter = field(default_factory=Counter)
    entries: list = field(default_factory=list)
    stopped_early: bool = False
    elapsed: float = 0.0

    def defects(self) -> int:
        return sum(n for c in self.counts.values() for v, n in c.items() if VerdictClass(v).is_defect)

    def count(self, solver: str, verdict) -> int:
        return self.counts.get(solver, {}).get(VerdictClass(verdict).value, 0)

    def as_dict(self) -> dict[str, str]:
        out = {"programs": str(self.n_programs), "defects": str(self.defects()), "entries": str(len(self.entries))}
        for solver in sorted(self.counts):
            for verdict, n in sorted(self.counts[solver].items()):
                out[f"{solver}.{verdict}"] = str(n)
        for solver, n in sorted(self.spawn_errors.items()):
            out[f"{solver}.spawn-error"] = str(n)
        out["stopped_early"] = str(self.stopped_early).lower()
        out["elapsed"] = f"{self.elapsed:.2f}"
        return out


def _run_one(cfg: FuzzConfig, specs, seed: int):
    p = generate(cfg.with_seed(seed))
    outcomes, verdicts, errors = {}, {}, {}
    for spec in specs:
        try:
            o = run_solver(spec, p)
        except SpawnError as exc:
            errors[spec.name] = str(exc)
            continue
        outcomes[spec.name] = o
        verdicts[spec.name] = classify_outcome(p, o)
    if len(outcomes) >= 2:
        verdicts = differential(p, outcomes, verdicts)
    return p, [
        RunRecord(seed, s.name, outcomes.get(s.name), verdicts.get(s.name), errors.get(s.name, ""))
        for s in specs
    ]


def _one_line(text: str) -> str:
    return " ".join(text.split())


def write_entry(out_dir, p: Program, cfg: FuzzConfig, spec: SolverSpec, rec: RunRecord) -> Path:
    """Persist one failing run as ``<out>/<verdict>/<seed>-<solver>/``."""
    path = Path(out_dir) / rec.verdict.verdict.value / f"{rec.seed}-{spec.name}"
    path.mkdir(parents=True, exist_ok=True)
    (path / "program.lp").write_text(emit_text(p), encoding="utf-8")
    (path / "program.sm").write_text(emit_smodels(p), encoding="utf-8")
    meta = {"seed": str(rec.seed)}
    meta.update({f"config.{k}": v for k, v in config_as_dict(cfg.with_seed(rec.seed)).items()})
    meta.update({f"solver.{k}": v for k, v in spec.as_dict().items()})
    meta["outcome"] = rec.outcome.describe()
    meta["wall_time"] = f"{rec.outcome.wall_time:.3f}"
    meta["verdict"] = rec.verdict.verdict.value
    meta["verified"] = str(rec.verdict.verified).lower()
    meta["evidence"] = _one_line(rec.verdict.evidence)
    (path / "meta").write_text(write_key_values(meta), encoding="utf-8")
    (path / "raw.out").write_text(rec.outcome.raw, encoding="utf-8")
    return path


def campaign(
    cfg: FuzzConfig,
    specs,
    n: int,
    out_dir,
    workers: int = 1,
    max_failures: Optional[int] = None,
    progress=None,
) -> CampaignReport:
    """Fuzz ``n`` programs (seeds ``cfg.seed``, ``cfg.seed + 1``, ...) against ``specs``.

    Every defect or disagreement is written to ``out_dir``; the aggregated
    counts go to ``out_dir/report``.  ``max_failures`` stops the campaign
    once that many entries have been written.
    """
    specs = list(specs)
    by_name = {s.name: s for s in specs}
    if len(by_name) != len(specs):
        raise ValueError("solver names must be unique")
    report = CampaignReport(counts={s.name: {} for s in specs})
    if n <= 0:
        return report
    start = time.monotonic()
    seeds = [cfg.seed + i for i in range(n)]

    def handle(p, records):
        report.n_programs += 1
        for rec in records:
            if rec.verdict is None:
                report.spawn_errors[rec.solver] += 1
                continue
            c = report.counts[rec.solver]
            c[rec.verdict.verdict.value] = c.get(rec.verdict.verdict.value, 0) + 1
            if rec.verdict.verdict != VerdictClass.PASS:
                report.entries.append(write_entry(out_dir, p, cfg, by_name[rec.solver], rec))
        if progress:
            progress(report)
        return max_failures is not None and len(report.entries) >= max_failures

    if workers <= 1:
        for seed in seeds:
            if handle(*_run_one(cfg, specs, seed)):
                report.stopped_early = report.n_programs < n
                break
    else:
        with ProcessPoolExecutor(workers) as pool:
            # results are consumed in seed order so reports do not depend on scheduling
            futures = [pool.submit(_run_one, cfg, specs, seed) for seed in seeds]
            for fut in futures:
                if handle(*fut.result()):
                    report.stopped_early = report.n_programs < n
                    for f in futures:
                        f.cancel()
                    break
    report.elapsed = time.monotonic() - start
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    (Path(out_dir) / "report").write_text(write_key_values(report.as_dict()), encoding="utf-8")
    return report


def load_entry(path):
    """``(program, meta)`` of a corpus entry directory."""
    from .core import parse_text

    path = Path(path)
    meta = read_key_values((path / "meta").read_text(encoding="utf-8"))
    return parse_text((path / "program.lp").read_text(encoding="utf-8")), meta


def entry_solver_spec(meta: dict) -> SolverSpec:
    return solver_spec_from_mapping({k[7:]: v for k, v in meta.items() if k.startswith("solver.")})
