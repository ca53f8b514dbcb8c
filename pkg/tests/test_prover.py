import random
from fractions import Fraction

import pytest

from cplogic.syntax import (
    And, Atom, BVar, BOT, CQ, DQ, Derivation, LabelledFormula, Neg, Or,
    Sequent, TOP, free_names, INTO, FROM,
)
from cplogic.prover import (
    CheckFailure, ProofError, SequentSet, check_derivation, cut,
    decompose_step, falsum_sequent, ms, prove,
)
from cplogic.semantics import bool_eval, eval_formula, labelled_valid
from cplogic.textio import (
    parse_bool, parse_derivation, parse_sequent, print_derivation,
    print_sequent, print_valuation,
)

from genlib import rand_bool, rand_formula


EXAMPLE_SEQUENT = "|-{a} T |> C[3/4]{a}(p(1,a) | p(2,a))"

# The example derivation, frozen in serialized form: an atom axiom per
# disjunct, the two injections joined by a union, then the counting rule
# over the one-part decomposition of the translated body.
EXAMPLE_DERIVATION = (
    '(RC> "|-{a} T |> C[3/4]{a} p(1,a) | p(2,a)" '
    '["adecomp a : x(1,a) | x(2,a) , T" "T |= T"] '
    '(RU> "|-{a} x(1,a) | x(2,a) |> p(1,a) | p(2,a)" '
    '["x(1,a) | x(2,a) |= x(1,a) | x(2,a)"] '
    '(R1O> "|-{a} x(1,a) |> p(1,a) | p(2,a)" [] '
    '(Ax1 "|-{a} x(1,a) |> p(1,a)" ["x(1,a) |= x(1,a)"])) '
    '(R2O> "|-{a} x(2,a) |> p(1,a) | p(2,a)" [] '
    '(Ax1 "|-{a} x(2,a) |> p(2,a)" ["x(2,a) |= x(2,a)"]))))'
)


# -- measures ---------------------------------------------------------------

def test_ms_atom_sequent():
    s = parse_sequent("|-{a} x(0,a) |> p(5,a)")
    assert ms([s]) == 3


def test_ms_empty_set():
    assert ms([]) == 0
    assert SequentSet(()).ms == 0


def test_ms_mixed_set():
    s1 = parse_sequent("|-{a} x(0,a) |> ~p(5,a)")
    s2 = parse_sequent("|-{a} x(1,a) <| p(5,a)")
    assert ms([s1, s2]) == 9 + 3


# -- decomposition ------------------------------------------------------------

def test_decompose_golden_first_step():
    step = decompose_step(parse_sequent(EXAMPLE_SEQUENT))
    assert step is not None and len(step.sequents) == 1
    red = step.sequents[0]
    assert print_sequent(red) == "|-{a} x(1,a) | x(2,a) |> p(1,a) | p(2,a)"


def test_decompose_zero_measure_label():
    step = decompose_step(parse_sequent("|-{a} F |> C[1]{a} p(0,a)"))
    assert step is not None and step.sequents == ()


def test_decompose_atomic_is_normal():
    assert decompose_step(parse_sequent("|-{a} x(0,a) |> p(5,a)")) is None


def test_decompose_strictly_shrinks_measure():
    rng = random.Random(51)
    for _ in range(80):
        a = rand_formula(rng)
        b = rand_bool(rng)
        names = free_names(a) | free_names(b) | {"a"}
        s = Sequent(names, [LabelledFormula(b, INTO if rng.random() < 0.5 else FROM, a)])
        step = decompose_step(s)
        if step is not None:
            assert step.ms < ms([s])


def test_decompose_dead_end_is_falsum():
    step = decompose_step(parse_sequent("|-{a} T |> D[0]{a} p(0,a)"))
    assert step.sequents == (falsum_sequent("a"),)


# -- proving -----------------------------------------------------------------------

def test_prove_reproduces_golden_derivation_bytes():
    out = prove(parse_sequent(EXAMPLE_SEQUENT))
    assert out.proved
    assert print_derivation(out.derivation) == EXAMPLE_DERIVATION
    assert print_derivation(parse_derivation(EXAMPLE_DERIVATION)) == EXAMPLE_DERIVATION


def test_prove_bottom_label_uses_measure_rule():
    out = prove(parse_sequent("|-{a} F |> p(0,a)"))
    assert out.proved and out.derivation.rule == "RM>"


def test_prove_refutes_full_threshold():
    out = prove(parse_sequent("|-{a} T |> C[1]{a} p(0,a)"))
    assert not out.proved
    w = out.witness_sequent.single
    f = out.witness_valuation
    assert bool_eval(w.label, f) and not eval_formula(w.body, f, out.witness_sequent.names)


def test_prover_round_trip_random():
    rng = random.Random(52)
    for _ in range(300):
        a = rand_formula(rng)
        b = rand_bool(rng)
        names = free_names(a) | free_names(b) | {"a"}
        lf = LabelledFormula(b, INTO if rng.random() < 0.5 else FROM, a)
        s = Sequent(names, [lf])
        out = prove(s)
        assert out.proved == labelled_valid(lf, names), print_sequent(s)
        if out.proved:
            check_derivation(out.derivation)
            txt = print_derivation(out.derivation)
            assert print_derivation(parse_derivation(txt)) == txt
        else:
            w = out.witness_sequent.single
            f = out.witness_valuation
            in_label = bool_eval(w.label, f)
            in_body = eval_formula(w.body, f, out.witness_sequent.names)
            assert (w.direction == INTO and in_label and not in_body) \
                or (w.direction == FROM and in_body and not in_label)


def test_prove_rejects_multi_succedent():
    s = parse_sequent("|-{a} T |> p(0,a), F <| p(0,a)")
    with pytest.raises(ProofError):
        prove(s)


# -- checking -----------------------------------------------------------------------

def test_checker_accepts_golden_derivation():
    check_derivation(parse_derivation(EXAMPLE_DERIVATION))


def test_checker_rejects_raised_threshold():
    d = parse_derivation(EXAMPLE_DERIVATION)
    bumped = CQ(Fraction(7, 8), "a", d.conclusion.single.body.body)
    bad = Derivation("RC>", Sequent({"a"}, [LabelledFormula(TOP, INTO, bumped)]),
                     d.premises, d.hypotheses)
    with pytest.raises(CheckFailure) as e:
        check_derivation(bad)
    assert "selected union" in str(e.value)


def test_checker_rejects_bad_axiom():
    bad = Derivation("Ax1", parse_sequent("|-{a} T |> p(0,a)"), (), ())
    with pytest.raises(CheckFailure):
        check_derivation(bad)


def test_checker_rejects_tampered_decomposition():
    d = parse_derivation(EXAMPLE_DERIVATION)
    hyps = tuple(h for h in d.hypotheses if type(h).__name__ != "DecompHyp")
    from cplogic.syntax import DecompHyp
    fake = DecompHyp("a", ((TOP, TOP),))   # claims the label is the full space
    bad = Derivation(d.rule, d.conclusion, d.premises, (fake,) + hyps)
    with pytest.raises(CheckFailure):
        check_derivation(bad)


def test_checker_multi_succedent_passive_context():
    # prove a single-succedent sequent, then widen every node by a passive
    # member; the checker must accept the widened derivation
    out = prove(parse_sequent("|-{a} x(0,a) |> p(0,a) & p(0,a)"))
    passive = LabelledFormula(BOT, INTO, Atom(7, "a"))

    def widen(d):
        s = d.conclusion
        return Derivation(d.rule, Sequent(s.names, list(s.succedent) + [passive]),
                          tuple(widen(p) for p in d.premises), d.hypotheses)

    check_derivation(widen(out.derivation))


def test_checker_rejects_dropped_passive_context():
    out = prove(parse_sequent("|-{a} x(0,a) |> p(0,a) & p(0,a)"))
    passive = LabelledFormula(BOT, INTO, Atom(7, "a"))
    s = out.derivation.conclusion
    bad = Derivation(out.derivation.rule,
                     Sequent(s.names, list(s.succedent) + [passive]),
                     out.derivation.premises, out.derivation.hypotheses)
    with pytest.raises(CheckFailure):
        check_derivation(bad)


# -- cut -------------------------------------------------------------------------------

def test_cut_produces_checked_conclusion():
    d1 = prove(parse_sequent("|-{a} T |> ~p(0,a) | (p(0,a) | ~p(0,a))")).derivation
    d2 = prove(parse_sequent("|-{a} x(0,a) |> p(0,a)")).derivation
    dc = cut(d1, d2, parse_bool("x(0,a)"))
    check_derivation(dc)
    concl = dc.conclusion.single
    assert concl.label == parse_bool("x(0,a)")
    assert concl.body == parse_sequent(
        "|-{a} T |> ~p(0,a) | (p(0,a) | ~p(0,a))").single.body.right


def test_cut_zero_threshold_conclusion():
    goal_body = CQ(Fraction(0), "a", Atom(0, "a"))
    d1 = prove(Sequent({"a"}, [LabelledFormula(TOP, INTO,
                                               Or(Neg(goal_body), goal_body))])).derivation
    d2 = prove(Sequent({"a"}, [LabelledFormula(TOP, INTO, goal_body)])).derivation
    dc = cut(d1, d2, TOP)
    check_derivation(dc)


def test_cut_bottom_label_via_measure_rule():
    d1 = prove(parse_sequent("|-{a} T |> ~p(0,a) | (p(0,a) | ~p(0,a))")).derivation
    d2 = prove(parse_sequent("|-{a} x(0,a) |> p(0,a)")).derivation
    dc = cut(d1, d2, BOT)
    assert dc.rule == "RM>"
    check_derivation(dc)


def test_cut_random_valid_instances():
    rng = random.Random(53)
    done = 0
    while done < 25:
        A = rand_formula(rng, depth=2)
        B = rand_formula(rng, depth=2)
        names = free_names(A) | free_names(B) | {"a"}
        major = Sequent(names, [LabelledFormula(TOP, INTO, Or(Neg(A), B))])
        minor = Sequent(names, [LabelledFormula(TOP, INTO, A)])
        o1, o2 = prove(major), prove(minor)
        if not (o1.proved and o2.proved):
            continue
        dc = cut(o1.derivation, o2.derivation, TOP)
        check_derivation(dc)
        assert dc.conclusion.single.body == B
        done += 1
