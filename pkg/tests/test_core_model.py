import pytest

from aspforge.core import (
    FALSITY,
    Disjunction,
    Literal,
    MixedClassError,
    NormalHead,
    Program,
    ProgramClass,
    Rule,
    SetHead,
    SetKind,
    Sizes,
    WeightAtom,
    cardinality,
    choice,
    classify_class,
    parse_text,
    program_sizes,
    validate_program,
)


def lit(a, neg=False):
    return Literal(a, neg)


def test_classify_examples():
    assert classify_class(parse_text("a :- not b.")) == ProgramClass.NLP
    assert classify_class(parse_text("h :- 1 [a=2] 3.")) == ProgramClass.WCP
    assert classify_class(parse_text("a | b.")) == ProgramClass.DLP


def test_classify_mixed_is_an_error():
    p = Program(
        (Rule(Disjunction((2, 3))), Rule(NormalHead(4), (WeightAtom(((lit(2), 1),), lower=1),))),
        {2: "a", 3: "b", 4: "h"},
        ProgramClass.WCP,
    )
    with pytest.raises(MixedClassError):
        classify_class(p)


def test_rule_views():
    r = Rule(NormalHead(2), (lit(3), lit(4, True), cardinality([lit(5)], 1)))
    assert r.positive == (3,)
    assert r.negative == (4,)
    assert len(r.set_atoms) == 1
    assert not r.is_fact and not r.is_constraint
    assert Rule(NormalHead(2)).is_fact
    assert Rule(FALSITY, (lit(2),)).is_constraint
    assert list(r.atoms()) == [2, 3, 4, 5]


def test_validate_well_formed():
    assert validate_program(parse_text("a :- not b.\nb :- not a.")) == []


def test_validate_unknown_atom():
    p = Program((Rule(NormalHead(2), (lit(9),)),), {2: "a"})
    errs = validate_program(p)
    assert len(errs) == 1 and "9" in errs[0]


def test_validate_cardinality_weight():
    w = WeightAtom(((lit(3), 2),), lower=1, kind=SetKind.CARDINALITY)
    p = Program((Rule(NormalHead(2), (w,)),), {2: "h", 3: "a"}, ProgramClass.WCP)
    assert len(validate_program(p)) == 1


@pytest.mark.parametrize(
    "rules, symbols, cls",
    [
        ((Rule(NormalHead(1)),), {1: "a"}, ProgramClass.NLP),  # id 1 is reserved
        ((Rule(NormalHead(2)),), {2: "Bad"}, ProgramClass.NLP),
        ((Rule(NormalHead(2)),), {2: "a", 3: "a"}, ProgramClass.NLP),
        ((Rule(Disjunction((2, 2))),), {2: "a"}, ProgramClass.DLP),
        ((Rule(Disjunction(())),), {2: "a"}, ProgramClass.DLP),
        ((Rule(NormalHead(2), (lit(3), lit(3, True))),), {2: "a", 3: "b"}, ProgramClass.NLP),
        ((Rule(NormalHead(2), (WeightAtom(((lit(3), 1),), 3, 2),)),), {2: "a", 3: "b"}, ProgramClass.WCP),
        ((Rule(NormalHead(2), (WeightAtom(((lit(3), 1), (lit(3), 2)), 1),)),), {2: "a", 3: "b"}, ProgramClass.WCP),
        ((Rule(NormalHead(2), (choice([3]),)),), {2: "a", 3: "b"}, ProgramClass.WCP),
        ((Rule(SetHead(WeightAtom(((lit(2, True), 1),), kind=SetKind.CHOICE))),), {2: "a"}, ProgramClass.WCP),
        ((Rule(NormalHead(2), (cardinality([lit(3)], 1),)),), {2: "a", 3: "b"}, ProgramClass.NLP),
        ((Rule(Disjunction((2, 3))),), {2: "a", 3: "b"}, ProgramClass.WCP),
    ],
)
def test_validate_reports_each_broken_invariant(rules, symbols, cls):
    assert validate_program(Program(rules, symbols, cls))


def test_nlp_content_is_admitted_under_wider_tags():
    for cls in ProgramClass:
        assert validate_program(Program((Rule(NormalHead(2)),), {2: "a"}, cls)) == []


def test_program_sizes():
    p = parse_text("h :- 1 [a=1, b=2], c.\n{a, b}.\n:- h.")
    assert program_sizes(p) == Sizes(3, 3, 4)
    assert Sizes(1, 2, 3) <= Sizes(1, 2, 3)
    assert not Sizes(2, 0, 0) <= Sizes(1, 5, 5)
