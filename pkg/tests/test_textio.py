import random
from fractions import Fraction

import pytest

from cplogic.syntax import (
    Atom, BOT, CQ, DQ, And, LabelledFormula, Neg, Or, Sequent, TOP, INTO,
    FROM, free_names,
)
from cplogic.textio import (
    ID, OMEGA, ParseError, parse_bool, parse_formula, parse_judgment,
    parse_sequent, parse_term, parse_type, print_bool, print_formula,
    print_judgment, print_sequent, print_term, print_type, parse_valuation,
    print_valuation,
)

from genlib import rand_bool, rand_formula, rand_term


def test_parse_formula_golden():
    f = parse_formula("C[1/2]{a} (p(0,a) & ~p(1,a))")
    assert f == CQ(Fraction(1, 2), "a", And(Atom(0, "a"), Neg(Atom(1, "a"))))


def test_parse_rejects_threshold_outside_unit():
    with pytest.raises(ParseError):
        parse_formula("C[3/2]{a} p(0,a)")


def test_parse_error_has_span():
    try:
        parse_formula("p(0,a) &")
    except ParseError as e:
        assert e.span.start >= 7
    else:
        raise AssertionError("expected a parse error")


def test_quantifier_scopes_to_the_right():
    f = parse_formula("C[1/2]{a} p(0,a) | p(1,a)")
    assert isinstance(f, CQ) and isinstance(f.body, Or)


def test_print_constants():
    assert print_bool(TOP) == "T"
    assert print_bool(BOT) == "F"
    assert print_formula(DQ(Fraction(1), "a", Atom(0, "a"))).startswith("D[1]{a} ")


def test_term_reserved_literals():
    t = parse_term("nu a. (\\x. x) (+ a 0) omega")
    assert t.body.left == ID and t.body.right == OMEGA
    assert print_term(t) == "nu a. id (+ a 0) omega"


def test_sequent_golden():
    s = parse_sequent("|-{a} T |> C[3/4]{a}(p(1,a) | p(2,a))")
    assert s.names == {"a"}
    assert s.single.direction == INTO


def test_type_golden():
    ty = parse_type("C[1/2] o -> o")
    assert print_type(ty) == "C[1/2] o -> o"


def test_multi_succedent_sequent():
    s = parse_sequent("|-{a, b} T |> p(0,a), F <| p(1,b)")
    assert len(s.succedent) == 2
    assert s.succedent[1].direction == FROM


def test_formula_round_trip_random():
    rng = random.Random(21)
    for _ in range(200):
        a = rand_formula(rng)
        assert parse_formula(print_formula(a)) == a


def test_bool_round_trip_random():
    rng = random.Random(22)
    for _ in range(200):
        b = rand_bool(rng, depth=3)
        assert parse_bool(print_bool(b)) == b


def test_term_round_trip_random():
    rng = random.Random(23)
    for _ in range(200):
        t = rand_term(rng)
        assert parse_term(print_term(t)) == t


def test_sequent_round_trip_random():
    rng = random.Random(24)
    for _ in range(100):
        lfs = []
        for _ in range(rng.randint(1, 3)):
            lfs.append(LabelledFormula(rand_bool(rng),
                                       INTO if rng.random() < 0.5 else FROM,
                                       rand_formula(rng)))
        names = {"a", "b"}
        for lf in lfs:
            names |= free_names(lf.label) | free_names(lf.body)
        s = Sequent(names, lfs)
        assert parse_sequent(print_sequent(s)) == s


def test_printing_is_deterministic():
    rng = random.Random(25)
    for _ in range(50):
        a = rand_formula(rng)
        assert print_formula(a) == print_formula(parse_formula(print_formula(a)))


def test_valuation_round_trip():
    v = parse_valuation("a(0)=1 a(2)=0 b(1)=1")
    assert v.get("a", 0) == 1 and v.get("a", 2) == 0 and v.get("b", 1) == 1
    assert parse_valuation(print_valuation(v)) == v


def test_judgment_round_trip():
    j = parse_judgment("x : C[1] o, y : C[1/2] (C[1] o -> o) |-{a ; 3/4} "
                       "x (+ a 0) y : x(0,a) |> o")
    assert parse_judgment(print_judgment(j)) == j


def test_type_round_trip_random():
    rng = random.Random(26)
    from cplogic.syntax import Arrow, O, QualType

    def rand_type(depth):
        if depth <= 0 or rng.random() < 0.4:
            return O
        return Arrow(QualType(Fraction(rng.randint(0, 4), 4), rand_type(depth - 1)),
                     rand_type(depth - 1))

    for _ in range(100):
        ty = rand_type(3)
        assert parse_type(print_type(ty)) == ty
