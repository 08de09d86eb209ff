"""Command-line interface.

Exit codes: tools return 0 on success and 2 on errors; ``solve`` returns
10 (satisfiable) or 20 (unsatisfiable); ``check`` returns 0 for a stable
model and 1 otherwise.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 2


class CliError(Exception):
    pass


def _pair(text):
    try:
        lo, hi = text.split(",")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {text!r}") from None


def _common():
    ap = argparse.ArgumentParser(add_help=False)
    ap.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    ap.add_argument("--format", choices=("lp", "sm"), default=None, help="program format")
    ap.add_argument("--quiet", action="store_true", help="print only essential output")
    return ap


def _config_flags(class_flag="--class"):
    ap = argparse.ArgumentParser(add_help=False)
    g = ap.add_argument_group("generator settings")
    g.add_argument(class_flag, dest="program_class", type=str.upper, choices=("NLP", "WCP", "DLP"), default=None)
    g.add_argument("--config", help="key=value generator config file")
    g.add_argument("--atoms", dest="n_atoms", type=int)
    g.add_argument("--rules", dest="n_rules", type=int)
    g.add_argument("--p-negation", type=float)
    g.add_argument("--body-len", type=_pair, metavar="MIN,MAX")
    g.add_argument("--p-fact", type=float)
    g.add_argument("--p-constraint", type=float)
    g.add_argument("--rule-mix", metavar="TYPE:W,...", help="e.g. basic:1,choice:0.5")
    g.add_argument("--weight-range", type=_pair, metavar="MIN,MAX")
    g.add_argument("--bound-slack", type=int)
    g.add_argument("--max-head-disjuncts", type=int)
    g.add_argument("--max-set-elems", type=int)
    return ap


CONFIG_FIELDS = (
    "n_atoms", "n_rules", "p_negation", "body_len", "p_fact", "p_constraint",
    "weight_range", "bound_slack", "max_head_disjuncts", "max_set_elems",
)


def config_from_args(args, base_factory=None):
    from .fuzzer import ConfigError, check_config, config_from_text, default_config_for_class, parse_config_value

    base_factory = base_factory or default_config_for_class
    if args.config:
        cfg = config_from_text(Path(args.config).read_text(encoding="utf-8"))
        if args.program_class and args.program_class != cfg.program_class.value:
            cfg = replace(cfg, program_class=args.program_class, rule_mix=base_factory(args.program_class).rule_mix)
    else:
        cfg = base_factory(args.program_class or "NLP")
    changes = {k: getattr(args, k) for k in CONFIG_FIELDS if getattr(args, k) is not None}
    if args.rule_mix:
        changes["rule_mix"] = parse_config_value("rule_mix", args.rule_mix)
    if args.seed is not None:
        changes["seed"] = args.seed
    cfg = replace(cfg, **changes)
    errs = check_config(cfg)
    if errs:
        raise ConfigError("; ".join(errs))
    return cfg


def _load(path, fmt):
    from .core import load_program

    if path == "-":
        from .core import parse_smodels, parse_text

        src = sys.stdin.read()
        return parse_smodels(src) if fmt == "sm" else parse_text(src)
    return load_program(path, fmt)


def _dump(p, fmt):
    from .core import emit_smodels, emit_text

    return emit_smodels(p) if fmt == "sm" else emit_text(p)


# commands -----------------------------------------------------------------


def cmd_fuzz(args):
    from .fuzzer import config_to_text, generate

    cfg = config_from_args(args)
    fmt = args.format or "lp"
    if args.save_config:
        Path(args.save_config).write_text(config_to_text(cfg), encoding="utf-8")
    if args.count == 1 and (args.out is None or not Path(args.out).is_dir()):
        text = _dump(generate(cfg), fmt)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        c = cfg.with_seed(cfg.seed + i)
        (out / f"{c.seed}.{fmt}").write_text(_dump(generate(c), fmt), encoding="utf-8")
    if not args.quiet:
        print(f"wrote {args.count} programs to {out}")
    return EXIT_OK


def cmd_solve(args):
    from .semantics import enumerate_stable

    p = _load(args.program, args.format)
    limit = None if args.enumerate == 0 else args.enumerate
    models = enumerate_stable(p, limit=limit)
    for i, m in enumerate(models, 1):
        if not args.quiet:
            print(f"Answer: {i}")
            print(" ".join(p.names(m)))
    print("SATISFIABLE" if models else "UNSATISFIABLE")
    return 10 if models else 20


def _parse_model(p, tokens):
    names = [n for t in tokens for n in t.replace(",", " ").split()]
    by_name = {name: ident for ident, name in p.symbols.items()}
    unknown = [n for n in names if n not in by_name]
    if unknown:
        raise CliError(f"unknown atom {unknown[0]!r}")
    return frozenset(by_name[n] for n in names)


def cmd_check(args):
    from .semantics import explain_instability, oracle_caps

    p = _load(args.program, args.format)
    m = _parse_model(p, args.model)
    cap = oracle_caps()[0]
    if len(p.symbols) > cap:
        raise CliError(f"{len(p.symbols)} atoms exceed the checking cap {cap}")
    reason = explain_instability(p, m)
    if reason is None:
        print("stable")
        return EXIT_OK
    print(f"not stable: {reason}")
    return 1


def cmd_refsolve(args):
    from .refsolve import solve

    return solve(sys.stdin.read(), args.inject_bug)


def _specs(args):
    from .harness import load_solver_spec, refsolve_spec

    specs = [load_solver_spec(path) for path in args.solver or ()]
    for bug in args.refsolve or ():
        specs.append(refsolve_spec(bug, timeout=args.timeout or 10.0))
    if not specs:
        specs.append(refsolve_spec("none", timeout=args.timeout or 10.0))
    if args.timeout:
        specs = [replace(s, timeout=args.timeout) for s in specs]
    return specs


def cmd_campaign(args):
    from .fuzzer import oracle_config_for_class
    from .harness import campaign

    cfg = config_from_args(args, oracle_config_for_class)

    def progress(rep):
        if not args.quiet and rep.n_programs % 100 == 0:
            print(f"{rep.n_programs} programs, {len(rep.entries)} entries", file=sys.stderr)

    report = campaign(cfg, _specs(args), args.n, args.out, workers=args.workers,
                      max_failures=args.max_failures, progress=progress)
    for key, value in report.as_dict().items():
        print(f"{key}={value}")
    return EXIT_OK


def cmd_ddmin(args):
    from .core import emit_text
    from .harness import load_solver_spec
    from .reducer import minimize_entry

    spec = load_solver_spec(args.solver) if args.solver else None
    q, report = minimize_entry(args.entry, args.strategy, args.match, spec)
    if not args.quiet:
        sys.stdout.write(emit_text(q))
    for key, value in report.as_dict().items():
        print(f"{key}={value}")
    return EXIT_OK if report.certified else 1


def cmd_convert(args):
    src_fmt = args.format
    p = _load(args.input, src_fmt)
    text = _dump(p, args.to)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser():
    from .refsolve import BUG_KINDS

    common = _common()
    ap = argparse.ArgumentParser(prog="aspforge", description="Fuzz testing and delta debugging for answer set solvers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuzz", parents=[common, _config_flags()], help="generate random programs")
    p.add_argument("--out", help="output file, or directory when --count > 1")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--save-config", metavar="FILE")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("solve", parents=[common], help="enumerate stable models with the oracle")
    p.add_argument("program")
    p.add_argument("--enumerate", type=int, default=1, metavar="N", help="models to print, 0 for all")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="check whether a set of atoms is a stable model")
    p.add_argument("program")
    p.add_argument("model", nargs="*", help="atom names (space or comma separated)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("refsolve", parents=[common], help="reference solver reading smodels on stdin")
    p.add_argument("--inject-bug", choices=BUG_KINDS, default="none")
    p.set_defaults(func=cmd_refsolve)

    p = sub.add_parser("campaign", parents=[common, _config_flags("--fuzz-class")], help="run a fuzzing campaign")
    p.add_argument("-n", type=int, default=100, help="number of programs")
    p.add_argument("--solver", action="append", metavar="SPEC", help="solver spec file (repeatable)")
    p.add_argument("--refsolve", action="append", choices=BUG_KINDS, metavar="BUG",
                   help="add the built-in reference solver with this bug (repeatable)")
    p.add_argument("--out", default="corpus")
    p.add_argument("--timeout", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-failures", type=int)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("ddmin", parents=[common], help="minimize a corpus entry")
    p.add_argument("entry", help="corpus entry directory")
    p.add_argument("--strategy", choices=("one-by-one", "ddmin"), default="ddmin")
    p.add_argument("--match", choices=("exact", "any"), default="exact")
    p.add_argument("--solver", metavar="SPEC", help="override the solver recorded in the entry")
    p.set_defaults(func=cmd_ddmin)

    p = sub.add_parser("convert", parents=[common], help="convert between text and smodels")
    p.add_argument("input")
    p.add_argument("--to", choices=("lp", "sm"), required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    from .core import AspError
    from .reducer import ReproductionError

    try:
        return args.func(args)
    except (AspError, CliError, ReproductionError, OSError, ValueError) as exc:
        print(f"aspforge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
