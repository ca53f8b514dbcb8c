"""Checker robustness: random corruptions of valid derivations must be
rejected, or accepted only when the mutant happens to be another correct
derivation (verified against the semantics)."""

import random
from fractions import Fraction as Fr

from cplogic.syntax import (
    Arrow, BNeg, Derivation, FROM, INTO, LabelledFormula, QualType, RateHyp,
    Sequent, TypeDerivation, TypeJudgment, free_names,
)
from cplogic.prover import CheckFailure, check_derivation, prove
from cplogic.semantics import (
    all_valuations, bool_atoms, bool_eval, labelled_valid, sequent_valid,
)
from cplogic.lcpl import (
    TypeCheckFailure, check_type_derivation, translate_judgment,
)
from cplogic.lambda_nu import Event, apply_event, normalizes_with_prob

from genlib import rand_bool, rand_formula
import test_acceptance


SEQUENT_TAGS = ["Ax1", "Ax2", "RU>", "RI<", "RN>", "RN<", "R1O>", "R2O>",
                "RO<", "RA>", "R1A<", "R2A<", "RM>", "RM<", "RC>", "RC<",
                "RD>", "RD<"]


def _nodes(d, path=()):
    yield d, path
    for i, p in enumerate(d.premises):
        yield from _nodes(p, path + (i,))


def _rebuild_seq(d, path, repl):
    if not path:
        return repl
    ps = list(d.premises)
    ps[path[0]] = _rebuild_seq(ps[path[0]], path[1:], repl)
    return Derivation(d.rule, d.conclusion, tuple(ps), d.hypotheses)


def _mutate_sequent_derivation(d, rng):
    node, path = rng.choice(list(_nodes(d)))
    s = node.conclusion
    lf = s.succedent[0]
    kind = rng.choice(["label", "rule", "drop", "direction"])
    if kind == "label":
        new = Sequent(s.names, (LabelledFormula(BNeg(lf.label), lf.direction,
                                                lf.body),) + s.succedent[1:])
        repl = Derivation(node.rule, new, node.premises, node.hypotheses)
    elif kind == "rule":
        other = rng.choice([t for t in SEQUENT_TAGS if t != node.rule])
        repl = Derivation(other, node.conclusion, node.premises, node.hypotheses)
    elif kind == "drop" and node.premises:
        repl = Derivation(node.rule, node.conclusion, node.premises[:-1],
                          node.hypotheses)
    else:
        flipped = FROM if lf.direction == INTO else INTO
        new = Sequent(s.names, (LabelledFormula(lf.label, flipped,
                                                lf.body),) + s.succedent[1:])
        repl = Derivation(node.rule, new, node.premises, node.hypotheses)
    return _rebuild_seq(d, path, repl)


def test_sequent_checker_rejects_or_stays_sound():
    rng = random.Random(401)
    tried = 0
    while tried < 150:
        a = rand_formula(rng, depth=3)
        b = rand_bool(rng)
        names = free_names(a) | free_names(b) | {"a"}
        lf = LabelledFormula(b, INTO if rng.random() < 0.5 else FROM, a)
        out = prove(Sequent(names, [lf]))
        if not out.proved:
            continue
        try:
            mut = _mutate_sequent_derivation(out.derivation, rng)
        except Exception:
            continue
        tried += 1
        try:
            check_derivation(mut)
        except CheckFailure:
            continue
        except Exception:
            continue
        # an accepted mutant must still have a semantically valid conclusion
        assert sequent_valid(mut.conclusion)


def _rebuild_type(d, path, repl):
    if not path:
        return repl
    ps = list(d.premises)
    ps[path[0]] = _rebuild_type(ps[path[0]], path[1:], repl)
    return TypeDerivation(d.rule, d.judgment, tuple(ps), d.hypotheses)


def _mutate_type_derivation(d, rng):
    node, path = rng.choice(list(_nodes(d)))
    j = node.judgment
    kind = rng.choice(["exp", "label", "rate", "rule"])
    if kind == "exp":
        new = (j.exponent + 1) / 2 if j.exponent < 1 else Fr(1, 3)
        jj = TypeJudgment(j.context, j.names, new, j.term, j.label, j.type)
        repl = TypeDerivation(node.rule, jj, node.premises, node.hypotheses)
    elif kind == "label":
        jj = TypeJudgment(j.context, j.names, j.exponent, j.term,
                          BNeg(j.label), j.type)
        repl = TypeDerivation(node.rule, jj, node.premises, node.hypotheses)
    elif kind == "rate":
        hyps, changed = [], False
        for h in node.hypotheses:
            if isinstance(h, RateHyp) and h.rate < 1:
                hyps.append(RateHyp((h.rate + 1) / 2))
                changed = True
            else:
                hyps.append(h)
        if not changed:
            return None
        repl = TypeDerivation(node.rule, j, node.premises, tuple(hyps))
    else:
        tags = ["Rbot", "Rid", "Runion", "Rlam", "Rapp", "RplusL", "RplusR", "Rnu"]
        other = rng.choice([t for t in tags if t != node.rule])
        repl = TypeDerivation(other, j, node.premises, node.hypotheses)
    return _rebuild_type(d, path, repl)


def _type_judgment_sound(j):
    if j.context:
        return True
    if not sequent_valid(translate_judgment(j)):
        return False
    atoms = sorted(bool_atoms(j.label)
                   | test_acceptance._term_choice_atoms(j.term),
                   key=lambda p: (p[1], p[0]))
    for f in all_valuations(atoms):
        if not bool_eval(j.label, f):
            continue
        t = apply_event(Event(f.assignment, sorted(j.names)), j.term)
        if not normalizes_with_prob(t, j.exponent, 120):
            return False
    return True


def test_type_checker_rejects_or_stays_sound():
    rng = random.Random(402)
    corpus = test_acceptance._typed_corpus(rng, 30)
    tried = 0
    while tried < 120:
        d = rng.choice(corpus)
        m = _mutate_type_derivation(d, rng)
        if m is None:
            continue
        tried += 1
        try:
            check_type_derivation(m)
        except TypeCheckFailure:
            continue
        except Exception:
            continue
        assert _type_judgment_sound(m.judgment)
