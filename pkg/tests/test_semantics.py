import random
from fractions import Fraction
from itertools import product

import pytest

from cplogic.syntax import (
    Atom, BAnd, BNeg, BOr, BVar, BOT, CQ, DQ, LabelledFormula, Neg, TOP,
    And, Or, free_names, formula_atoms, INTO, FROM,
)
from cplogic.semantics import (
    SemanticsError, Valuation, a_decompose, all_valuations, bool_atoms,
    bool_eval, bool_of, check_decomposition, decide, entails, eval_formula,
    labelled_valid, measure, mu_projection, sat_count, sequent_valid,
    sorted_atoms, weak_a_decompose,
)
from cplogic.textio import parse_bool, parse_formula, parse_sequent

from genlib import eval_set, rand_bool, rand_formula, shared_atoms


# -- #SAT and measure -----------------------------------------------------

def test_sat_count_three_variable_golden():
    b = parse_bool("(x(1,a) & ~x(2,a)) | (x(2,a) & ~x(3,a)) | (x(3,a) & ~x(1,a))")
    assert sat_count(b, sorted_atoms(b)) == 6


def test_sat_count_trivial():
    assert sat_count(TOP, []) == 1
    b = parse_bool("x(0,a) & ~x(0,a)")
    assert sat_count(b, sorted_atoms(b)) == 0


def test_sat_count_requires_covering_vars():
    with pytest.raises(SemanticsError):
        sat_count(parse_bool("x(0,a)"), [])


def test_measure_goldens():
    assert measure(parse_bool("(x(0,a) & ~x(1,a)) | (~x(0,a) & x(1,a))")) == Fraction(1, 2)
    two = parse_bool("((x(0,a) & ~x(1,a)) | x(2,a)) | ((~x(0,a) & x(1,a)) | x(2,a))")
    assert measure(two) == Fraction(3, 4)
    assert measure(BOT) == 0


def test_measure_padding_invariant():
    rng = random.Random(31)
    for _ in range(60):
        b = rand_bool(rng, depth=3)
        atoms = sorted_atoms(b)
        padded = atoms + [(9, "a"), (8, "b")]
        n, m = len(atoms), len(padded)
        assert Fraction(sat_count(b, atoms), 1 << n) == \
            Fraction(sat_count(b, padded), 1 << m)


# -- entailment ------------------------------------------------------------

def test_entails_goldens():
    assert entails(parse_bool("x(0,a) & x(1,a)"), parse_bool("x(0,a)"))
    assert not entails(TOP, parse_bool("x(0,a)"))


def test_entails_matches_model_inclusion():
    rng = random.Random(32)
    for _ in range(80):
        b, c = rand_bool(rng), rand_bool(rng)
        atoms = sorted(bool_atoms(b) | bool_atoms(c), key=lambda p: (p[1], p[0]))
        models_b = {tuple(f.items()) for f in all_valuations(atoms) if bool_eval(b, f)}
        models_c = {tuple(f.items()) for f in all_valuations(atoms) if bool_eval(c, f)}
        assert entails(b, c) == (models_b <= models_c)


# -- evaluation of the first multivariate example ---------------------------

EX4_A = ("(p(0,a) & (~p(0,b) & p(1,b))) | (~p(0,a) & p(0,b) & ~p(1,b))"
         " | ((~p(0,a) & p(1,a)) & p(1,b))")
EX4_A_VARIANT = ("(p(0,a) & (~p(0,b) & p(1,b))) | (~p(0,a) & p(0,b) & ~p(1,b))"
                 " | ((~p(0,a) | p(1,a)) & p(1,b))")


def test_eval_projection_cases():
    A = parse_formula(EX4_A)
    half = CQ(Fraction(1, 2), "a", A)
    case2 = Valuation({"b": {0: 1, 1: 0}})
    case4 = Valuation({"b": {0: 0, 1: 0}})
    assert eval_formula(half, case2, {"b"})
    assert not eval_formula(half, case4, {"b"})


def test_eval_zero_threshold_always_true():
    B = parse_formula("p(0,a) & ~p(0,a)")
    f = Valuation({})
    assert eval_formula(CQ(Fraction(0), "a", B), f, set())


def test_mu_projection_variant_case1():
    A = parse_formula(EX4_A_VARIANT)
    b = bool_of(A, {"a", "b"})
    f = Valuation({"b": {0: 1, 1: 1}})
    assert mu_projection(b, "a", f, {"b"}) == Fraction(3, 4)


def test_mu_projection_without_projected_atoms():
    b = parse_bool("x(0,b)")
    f = Valuation({"b": {0: 1}})
    assert mu_projection(b, "a", f, {"b"}) == 1


def test_mu_projection_matches_enumeration():
    rng = random.Random(33)
    for _ in range(60):
        b = rand_bool(rng, depth=3)
        ctx_atoms = [(i, n) for (i, n) in sorted_atoms(b) if n != "a"]
        a_atoms = [(i, n) for (i, n) in sorted_atoms(b) if n == "a"]
        for f in all_valuations(ctx_atoms):
            hits = sum(1 for g in all_valuations(a_atoms)
                       if bool_eval(b, f.merged(g)))
            want = Fraction(hits, 1 << len(a_atoms))
            assert mu_projection(b, "a", f, {"b"}) == want


# -- decompositions -----------------------------------------------------------

def test_a_decompose_pure_atom():
    dec = a_decompose(parse_bool("x(3,a)"), "a", {"b"})
    assert dec.parts == ((parse_bool("x(3,a)"), TOP),)


def test_a_decompose_foreign_atom():
    dec = a_decompose(parse_bool("x(3,b)"), "a", {"b"})
    ds = {(str(type(d).__name__)) for d, _ in dec.parts}
    assert len(dec.parts) == 2
    assert check_decomposition(dec, parse_bool("x(3,b)"))


def test_a_decompose_invariants_random():
    rng = random.Random(34)
    for _ in range(80):
        b = rand_bool(rng, depth=3)
        dec = a_decompose(b, "a", {"b"})
        assert check_decomposition(dec, b)


def test_weak_a_decompose_drops_unsatisfiable():
    assert weak_a_decompose(BOT, "a", {"b"}).parts == ()
    b = parse_bool("x(0,a)")
    assert weak_a_decompose(b, "a", set()).parts == ((b, TOP),)


def test_weak_a_decompose_random():
    rng = random.Random(35)
    for _ in range(60):
        b = rand_bool(rng, depth=3)
        dec = weak_a_decompose(b, "a", {"b"})
        assert check_decomposition(dec, b, weak=True)


# -- Bool translation ---------------------------------------------------------

def test_bool_of_example_one_valid():
    A = parse_formula("(p(0,a) & ~p(1,a)) | (~p(0,a) & p(1,a))")
    assert entails(TOP, bool_of(CQ(Fraction(1, 2), "a", A), set()))


def test_bool_of_example_two_dual_valid():
    A = parse_formula("((p(0,a) & ~p(1,a)) | p(2,a)) | ((~p(0,a) & p(1,a)) | p(2,a))")
    assert entails(TOP, bool_of(DQ(Fraction(1), "a", A), set()))


def test_bool_of_agrees_with_eval():
    rng = random.Random(36)
    for _ in range(150):
        a = rand_formula(rng)
        names = free_names(a) | {"a"}
        b = bool_of(a, names)
        atoms = shared_atoms(a)
        assert bool_atoms(b) <= set(atoms)
        for f in all_valuations(atoms):
            assert eval_formula(a, f, names) == bool_eval(b, f)


def test_fundamental_lemma_random():
    rng = random.Random(37)
    for _ in range(60):
        b = rand_bool(rng, depth=3)
        dec = a_decompose(b, "a", {"b"})
        ctx_atoms = [(i, n) for (i, n) in sorted_atoms(b) if n != "a"]
        for _ in range(5):
            q = Fraction(rng.randint(0, 8), 8)
            for at_least in (True, False):
                sel = dec.selected(q, at_least)
                for f in all_valuations(ctx_atoms):
                    mp = mu_projection(b, "a", f, {n for (_, n) in ctx_atoms} | {"b"})
                    lhs = (mp >= q) if at_least else (mp < q)
                    assert lhs == bool_eval(sel, f)


# -- decision procedure ---------------------------------------------------------

def test_decide_multivariate_goldens():
    A = parse_formula(EX4_A)
    assert decide(CQ(Fraction(1, 2), "b", CQ(Fraction(1, 2), "a", A)), set()).kind == "valid"
    Av = parse_formula(EX4_A_VARIANT)
    assert decide(CQ(Fraction(3, 4), "b", CQ(Fraction(1, 2), "a", Av)), set()).kind == "valid"


def test_decide_contingent_atom():
    v = decide(Atom(0, "a"), {"a"})
    assert v.kind == "contingent" and v.measure == Fraction(1, 2)


def test_interdefinability_on_one_name():
    rng = random.Random(38)
    for _ in range(60):
        a = rand_formula(rng, names=("a",), quants=2)
        q = Fraction(rng.randint(0, 4), 4)
        names = {"a"}
        assert decide(CQ(q, "a", a), names).kind == \
            decide(Neg(DQ(q, "a", a)), names).kind
        assert decide(DQ(q, "a", a), names).kind == \
            decide(Neg(CQ(q, "a", a)), names).kind


def test_zero_threshold_verdicts():
    rng = random.Random(39)
    for _ in range(30):
        a = rand_formula(rng, names=("a",), quants=1)
        assert decide(CQ(Fraction(0), "a", a), free_names(a) - {"a"} | {"b"}).kind == "valid"
        assert decide(DQ(Fraction(0), "a", a), free_names(a) - {"a"} | {"b"}).kind == "invalid"


# -- labelled validity -------------------------------------------------------------

def test_labelled_valid_goldens():
    lf = LabelledFormula(TOP, INTO,
                         parse_formula("C[3/4]{a}(p(1,a) | p(2,a))"))
    assert labelled_valid(lf, {"a"})
    assert labelled_valid(LabelledFormula(BOT, INTO, Atom(0, "a")), {"a"})
    assert not labelled_valid(LabelledFormula(TOP, INTO, Atom(0, "a")), {"a"})


def test_multi_succedent_needs_one_valid_member():
    s = parse_sequent("|-{a} T |> p(0,a), F <| p(0,a), T |> C[0]{a} p(1,a)")
    assert sequent_valid(s)
    s2 = parse_sequent("|-{a} T |> p(0,a), F <| p(0,a)")
    assert not sequent_valid(s2)
