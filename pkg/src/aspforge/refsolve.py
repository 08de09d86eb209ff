"""Reference solver backed by the brute-force oracle, with injectable bugs.

Reads a program in smodels format on stdin and answers in clasp style::

    Answer: 1
    a b
    SATISFIABLE

Exit status is 10 (satisfiable), 20 (unsatisfiable) or 2 (bad input).
Each injected bug fires on a purely syntactic trigger, so the smallest
program that provokes it is known in advance.
"""

from __future__ import annotations

import argparse
import sys
import time

BUG_KINDS = (
    "none",
    "crash-on-choice",
    "wrong-unsat-on-constraint",
    "invalid-model-flip",
    "hang-on-disjunction",
    "abort-on-weight",
    "crash-on-neg3",
)

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 2


def rule_lines(src: str) -> list[list[int]]:
    """The integer fields of every rule line before the first ``0``."""
    out = []
    for line in src.splitlines():
        fields = line.split()
        if not fields:
            continue
        if fields == ["0"]:
            break
        out.append([int(f) for f in fields])
    return out


def _segfault():
    import ctypes

    ctypes.string_at(0)


def _abort():
    import os

    os.abort()


def _hang():
    while True:
        time.sleep(0.05)


def _has_constraint(rules) -> bool:
    # the head follows the type for basic, cardinality and weight rules
    return any(r[0] in (1, 2, 5) and r[1] == 1 for r in rules)


def fire_syntactic_bug(bug: str, rules):
    if bug == "crash-on-choice" and any(r[0] == 3 for r in rules):
        _segfault()
    if bug == "crash-on-neg3" and any(r[0] == 1 and r[3] >= 3 for r in rules):
        _segfault()
    if bug == "abort-on-weight" and any(r[0] == 5 for r in rules):
        _abort()
    if bug == "hang-on-disjunction" and any(r[0] == 8 for r in rules):
        _hang()


def solve(src: str, bug: str = "none", out=None) -> int:
    from .core import AspError, is_hidden, parse_smodels
    from .semantics import enumerate_stable

    try:
        p = parse_smodels(src)
        rules = rule_lines(src)
    except (AspError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    out = out or sys.stdout
    fire_syntactic_bug(bug, rules)
    try:
        models = enumerate_stable(p, limit=1)
    except AspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not models or (bug == "wrong-unsat-on-constraint" and _has_constraint(rules)):
        out.write("UNSATISFIABLE\n")
        return EXIT_UNSAT
    visible = sorted(a for a, name in p.symbols.items() if not is_hidden(a, name))
    m = {a for a in models[0] if a in visible}
    if bug == "invalid-model-flip" and visible:
        m ^= {visible[0]}
    out.write("Answer: 1\n" + " ".join(p.symbols[a] for a in sorted(m)) + "\nSATISFIABLE\n")
    return EXIT_SAT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="refsolve", description=__doc__.splitlines()[0])
    ap.add_argument("--inject-bug", choices=BUG_KINDS, default="none")
    args = ap.parse_args(argv)
    return solve(sys.stdin.read(), args.inject_bug)


if __name__ == "__main__":
    sys.exit(main())
