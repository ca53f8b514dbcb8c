import random
from fractions import Fraction as Fr

import pytest

from cplogic.syntax import (
    Arrow, BAnd, BNeg, BOr, BVar, BOT, O, QualType, RateHyp, TOP,
    TypeDerivation, TypeJudgment, Var, free_names,
)
from cplogic.lambda_nu import Event, apply_event, beta_step, normalizes_with_prob, _perm_redexes
from cplogic.lcpl import (
    Annotations, RedStep, TypeCheckFailure, apply_step, betasub,
    check_type_derivation, infer, mk_rapp, mk_rbot, mk_rid, mk_rlam,
    mk_rnu, mk_rplus, mk_runion, scale, transport_derivation,
    translate_judgment, translate_type, weaken, weak_names,
)
from cplogic.semantics import all_valuations, bool_eval, decide, sequent_valid
from cplogic.textio import (
    ID, OMEGA, parse_term, parse_type_derivation, print_judgment,
    print_type_derivation,
)

from genlib import rand_term


RHO = Arrow(QualType(Fr(1), O), O)


def pi_derivation(sigma, a, q):
    """reusable identity-or-loop block:  id (+a 0) omega : x(0,a) |> C[q]s -> s"""
    ctx = (("x", QualType(q, sigma)),)
    d = mk_rid(ctx, {a}, "x", TOP, sigma)
    d = mk_rlam(d, "x")
    return mk_rplus(d, "l", OMEGA, a, 0, BVar(0, a))


def example2_derivation():
    d1 = pi_derivation(RHO, "a", Fr(1))
    d2 = pi_derivation(O, "a", Fr(1))
    dapp = mk_rapp(d1, d2, BVar(0, "a"))
    return mk_rnu(dapp, "a", ((BVar(0, "a"), TOP),), Fr(1, 2), TOP)


def example3_derivation():
    dl = mk_rnu(pi_derivation(RHO, "a", Fr(1, 2)), "a",
                ((BVar(0, "a"), TOP),), Fr(1, 2), TOP)
    dr = mk_rnu(pi_derivation(O, "a", Fr(1)), "a",
                ((BVar(0, "a"), TOP),), Fr(1, 2), TOP)
    return mk_rapp(dl, dr, TOP)


def omega_derivation(sigma=O):
    return mk_rbot((), frozenset(), Fr(1), OMEGA, BOT, sigma)


def lam_x_omega_derivation():
    arrow = Arrow(QualType(Fr(0), O), O)
    ctx = (("x", QualType(Fr(1), arrow)),)
    dx = mk_rid(ctx, frozenset(), "x", TOP, arrow)
    dom = mk_rbot(ctx, frozenset(), Fr(0), OMEGA, TOP, O)
    return mk_rlam(mk_rapp(dx, dom, TOP), "x")


# -- checking the worked example derivations --------------------------------------

def test_worked_example_one_checks():
    d = pi_derivation(O, "a", Fr(1, 2))
    check_type_derivation(d)
    assert d.judgment.label == BVar(0, "a")
    assert d.judgment.type == Arrow(QualType(Fr(1, 2), O), O)


def test_worked_example_two_checks():
    d = example2_derivation()
    check_type_derivation(d)
    assert d.judgment.exponent == Fr(1, 2)
    assert d.judgment.term == parse_term(
        "nu a. (id (+ a 0) omega) (id (+ a 0) omega)")


def test_worked_example_three_checks():
    d = example3_derivation()
    check_type_derivation(d)
    assert d.judgment.exponent == Fr(1, 4)


def test_omega_and_guarded_omega_check():
    check_type_derivation(omega_derivation())
    d = lam_x_omega_derivation()
    check_type_derivation(d)
    assert d.judgment.label == TOP and d.judgment.exponent == 1


def test_checker_rejects_wrong_exponent():
    d = example2_derivation()
    j = d.judgment
    bad = TypeDerivation("Rnu", TypeJudgment(j.context, j.names, Fr(3, 4),
                                             j.term, j.label, j.type),
                         d.premises, d.hypotheses)
    with pytest.raises(TypeCheckFailure):
        check_type_derivation(bad)


def test_checker_rejects_low_rate_decomposition():
    dapp = example2_derivation().premises[0]
    with pytest.raises(TypeCheckFailure) as e:
        check_type_derivation(mk_rnu(dapp, "a", ((BVar(0, "a"), TOP),),
                                     Fr(3, 4), TOP))
    assert "measure below the rate" in str(e.value)


def test_checker_rejects_choice_label_flip():
    ctx = (("x", QualType(Fr(1), O)),)
    d = mk_rid(ctx, {"a"}, "x", TOP, O)
    bad_label = BNeg(BVar(0, "a"))     # the left rule needs the positive atom
    bad = mk_rplus(d, "l", OMEGA, "a", 0, bad_label)
    with pytest.raises(TypeCheckFailure):
        check_type_derivation(bad)


def test_serialization_round_trip():
    for d in (example2_derivation(), example3_derivation(),
              lam_x_omega_derivation()):
        txt = print_type_derivation(d)
        d2 = parse_type_derivation(txt)
        check_type_derivation(d2)
        assert print_type_derivation(d2) == txt


# -- transformations ------------------------------------------------------------------

def test_weaken_strengthens_label():
    d = pi_derivation(O, "a", Fr(1))
    w = weaken(d, BAnd(BVar(0, "a"), BVar(1, "a")))
    check_type_derivation(w)


def test_scale_lowers_exponent():
    d = example2_derivation()
    s = scale(d, Fr(1, 3))
    check_type_derivation(s)
    assert s.judgment.exponent == Fr(1, 6)


def test_weak_names_extends_and_renames():
    d = example2_derivation()
    w = weak_names(d, {"c"})
    check_type_derivation(w)
    assert "c" in w.judgment.names
    w2 = weak_names(d, {"a"})          # clashes with the bound generator
    check_type_derivation(w2)
    assert "a" in w2.judgment.names


def test_betasub_directly():
    # t = x, u = id: substitute into the identity judgment
    ctx = (("x", QualType(Fr(1), O)),)
    dt = mk_rid(ctx, frozenset(), "x", TOP, O)
    du = mk_rbot((), frozenset(), Fr(1), OMEGA, BOT, O)
    out = betasub(dt, "x", du)
    check_type_derivation(out)
    assert out.judgment.term == OMEGA
    assert out.judgment.label == BAnd(TOP, BOT)


# -- transport ---------------------------------------------------------------------------

def test_transport_perm_step_preserves_judgment():
    d = example2_derivation()
    out = transport_derivation(d, RedStep("perm", (0,)))
    check_type_derivation(out)
    j, k = d.judgment, out.judgment
    assert (j.context, j.names, j.exponent, j.label, j.type) == \
        (k.context, k.names, k.exponent, k.label, k.type)
    assert k.term == apply_step(j.term, RedStep("perm", (0,)))


def first_beta_path(t, path=()):
    from cplogic.syntax import App, Lam, Choice, Nu
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return path
    kids = []
    if isinstance(t, Lam):
        kids = [(0, t.body)]
    elif isinstance(t, App):
        kids = [(0, t.fn), (1, t.arg)]
    elif isinstance(t, Choice):
        kids = [(0, t.left), (1, t.right)]
    elif isinstance(t, Nu):
        kids = [(0, t.body)]
    for i, k in kids:
        r = first_beta_path(k, path + (i,))
        if r is not None:
            return r
    return None


def test_transport_full_normalization_of_example_two():
    cur = example2_derivation()
    steps = 0
    while True:
        reds = _perm_redexes(cur.judgment.term)
        if not reds:
            break
        cur = transport_derivation(cur, RedStep("perm", reds[0][0]))
        check_type_derivation(cur)
        steps += 1
        assert steps < 50
    assert steps >= 4
    # then one beta step on the normalized subject
    bp = first_beta_path(cur.judgment.term)
    assert bp is not None
    out = transport_derivation(cur, RedStep("beta", bp))
    check_type_derivation(out)
    assert out.judgment.exponent == Fr(1, 2) and out.judgment.label == TOP


def test_transport_beta_and_perm_chain_example_three():
    cur = example3_derivation()
    for _ in range(12):
        reds = _perm_redexes(cur.judgment.term)
        if reds:
            cur = transport_derivation(cur, RedStep("perm", reds[0][0]))
        else:
            bp = first_beta_path(cur.judgment.term)
            if bp is None:
                break
            cur = transport_derivation(cur, RedStep("beta", bp))
        check_type_derivation(cur)
    assert cur.judgment.exponent == Fr(1, 4)


def test_transport_zero_step_identity():
    d = example2_derivation()
    assert transport_derivation(d, RedStep("perm", (0,))) is not None
    with pytest.raises(Exception):
        transport_derivation(d, RedStep("beta", ()))   # no beta redex at the root


# -- inference --------------------------------------------------------------------------

def test_infer_reproduces_example_two():
    t = parse_term("nu a. (id (+ a 0) omega) (id (+ a 0) omega)")
    ann = Annotations(lam={(0, 0, 0): QualType(Fr(1), RHO),
                           (0, 1, 0): QualType(Fr(1), O)},
                      nu={(): Fr(1, 2)})
    d = infer((), t, set(), ann)
    assert d is not None
    check_type_derivation(d)
    assert d.judgment.exponent == Fr(1, 2)
    assert d.judgment.type == RHO and d.judgment.label == TOP


def test_infer_identity_with_qualifier():
    ann = Annotations(lam={(): QualType(Fr(1), O)})
    d = infer((), ID, set(), ann)
    check_type_derivation(d)
    assert d.judgment.type == Arrow(QualType(Fr(1), O), O)


def test_infer_simple_types_choice_free_closed():
    d = infer((), parse_term("\\f. \\x. f (f x)"), set(), None)
    check_type_derivation(d)
    assert d.judgment.exponent == 1
    assert d.judgment.type == Arrow(QualType(Fr(1), Arrow(QualType(Fr(1), O), O)),
                                    Arrow(QualType(Fr(1), O), O))


def test_infer_fails_without_annotations():
    assert infer((), parse_term("nu a. x (+ a 0) y"), set(), None) is None


# -- translation -------------------------------------------------------------------------

def test_translate_type_is_valid_formula():
    rng = random.Random(71)

    def rand_type(depth):
        if depth <= 0 or rng.random() < 0.4:
            return O
        return Arrow(QualType(Fr(rng.randint(0, 4), 4), rand_type(depth - 1)),
                     rand_type(depth - 1))

    for _ in range(25):
        sigma = rand_type(3)
        f = translate_type(sigma)
        assert free_names(f) == set()
        assert decide(f, set()).kind == "valid"


def test_translate_judgment_of_worked_examples_valid():
    for d in (pi_derivation(O, "a", Fr(1, 2)), example2_derivation(),
              example3_derivation(), omega_derivation(),
              lam_x_omega_derivation()):
        s = translate_judgment(d.judgment)
        assert sequent_valid(s), print_judgment(d.judgment)


def test_translate_judgment_shape():
    d = example2_derivation()
    s = translate_judgment(d.judgment)
    assert len(s.succedent) == 1       # empty context: just the main member
    ctx_d = mk_rid((("x", QualType(Fr(1), O)),), {"a"}, "x", TOP, O)
    s2 = translate_judgment(ctx_d.judgment)
    assert len(s2.succedent) == 2      # one refutable member per context entry


# -- the normalization property on typed terms ----------------------------------------------

def corpus():
    yield pi_derivation(O, "a", Fr(1, 2))
    yield pi_derivation(RHO, "a", Fr(1))
    yield example2_derivation()
    yield example3_derivation()
    yield omega_derivation()
    yield lam_x_omega_derivation()


def test_normalization_property_on_worked_examples():
    for d in corpus():
        j = d.judgment
        if j.context:
            continue
        idxs = {(n, i) for (i, n) in
                __import__("cplogic.semantics", fromlist=["bool_atoms"])
                .bool_atoms(j.label)}
        names = sorted(j.names)
        atom_list = sorted((i, n) for (n, i) in idxs)
        for f in all_valuations(atom_list):
            if not bool_eval(j.label, f):
                continue
            ev = Event(f.assignment, names)
            t = apply_event(ev, j.term)
            assert normalizes_with_prob(t, j.exponent, 200), print_judgment(j)


def test_transport_random_reduction_chains():
    import test_acceptance
    rng = random.Random(201)
    corpus = test_acceptance._typed_corpus(rng, 40)
    transported = 0
    for d in corpus:
        cur = d
        for _ in range(12):
            reds = _perm_redexes(cur.judgment.term)
            bp = first_beta_path(cur.judgment.term)
            options = [("perm", p) for (p, _) in reds]
            if bp is not None:
                options.append(("beta", bp))
            if not options:
                break
            kind, path = rng.choice(options)
            nxt = transport_derivation(cur, RedStep(kind, path))
            check_type_derivation(nxt)
            j, k = cur.judgment, nxt.judgment
            assert (j.context, j.names, j.exponent, j.label, j.type) == \
                (k.context, k.names, k.exponent, k.label, k.type)
            cur = nxt
            transported += 1
    assert transported > 100


def test_transport_none_step_is_identity():
    d = example2_derivation()
    assert transport_derivation(d, None) is d
