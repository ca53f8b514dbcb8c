"""Proof search and checking for the labelled sequent calculus.

Search runs the decomposition rewriting to its normal form and then
replays the steps backwards into rule applications.  The canonical
witnesses keep validity at every step, so no backtracking is required:
for negation the complement of the label, for binary connectives the
Bool translations of the subformulas, and for counting quantifiers the
Bool translation of the body together with its decomposition.  When a
sequent is invalid, fallback witnesses that are always applicable (full
or empty labels) keep the rewriting going, so it still terminates at an
invalid atomic sequent that yields a concrete countermodel.

`check_derivation` is independent of the search: every rule tag, premise
shape and recorded side condition is re-verified against the semantics,
including a passive context for the multi-succedent extension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .syntax import (
    And, Atom, BAnd, BNeg, BOr, BVar, BOT, CQ, DQ, DecompHyp, Derivation,
    EntailHyp, Formula, FROM, INTO, LabelledFormula, MeasureHyp, Neg, Or,
    Sequent, TOP, cn, free_names, fresh_name,
)
from .semantics import (
    ADecomposition, Valuation, a_decompose, bool_of, check_decomposition,
    entails, find_falsifying, measure,
)


class ProofError(ValueError):
    pass


@dataclass(frozen=True)
class SequentSet:
    sequents: tuple

    def __init__(self, sequents):
        object.__setattr__(self, "sequents", tuple(sequents))

    @property
    def ms(self) -> int:
        return ms(self.sequents)


def ms(sequents) -> int:
    """Termination measure: sum of 3^cn over the member sequents."""
    if isinstance(sequents, SequentSet):
        sequents = sequents.sequents
    return sum(3 ** cn(s.single) for s in sequents)


# A normal, invalid, atomic dead-end standing in for the underivable
# bottom sequent the zero-threshold clauses reduce to.
def falsum_sequent(name: str = "a") -> Sequent:
    return Sequent({name}, [LabelledFormula(BOT, FROM, Atom(0, name))])


# ---------------------------------------------------------------------------
# Decomposition rewriting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Step:
    kind: str                    # clause tag used for reconstruction
    reducts: tuple               # resulting sequents
    data: tuple = ()             # witnesses needed to rebuild the rule


def _decompose(s: Sequent) -> Optional[_Step]:
    lf = s.single
    b, body, names = lf.label, lf.body, s.names

    # measure short-circuits apply first
    if lf.direction == INTO and measure(b) == 0:
        return _Step("mu0", ())
    if lf.direction == FROM and measure(b) == 1:
        return _Step("mu1", ())

    if isinstance(body, Atom):
        return None

    if isinstance(body, Neg):
        c = BNeg(b)
        if lf.direction == INTO:
            red = Sequent(names, [LabelledFormula(c, FROM, body.body)])
            return _Step("neg>", (red,), (c,))
        red = Sequent(names, [LabelledFormula(c, INTO, body.body)])
        return _Step("neg<", (red,), (c,))

    if isinstance(body, Or) and lf.direction == INTO:
        c = bool_of(body.left, names)
        d = bool_of(body.right, names)
        if not entails(b, BOr(c, d)):
            c, d = TOP, TOP      # fallback keeps the rewriting total
        return _Step("or>", (Sequent(names, [LabelledFormula(c, INTO, body.left)]),
                             Sequent(names, [LabelledFormula(d, INTO, body.right)])),
                     (c, d))
    if isinstance(body, Or) and lf.direction == FROM:
        return _Step("or<", (Sequent(names, [LabelledFormula(b, FROM, body.left)]),
                             Sequent(names, [LabelledFormula(b, FROM, body.right)])))
    if isinstance(body, And) and lf.direction == INTO:
        return _Step("and>", (Sequent(names, [LabelledFormula(b, INTO, body.left)]),
                              Sequent(names, [LabelledFormula(b, INTO, body.right)])))
    if isinstance(body, And) and lf.direction == FROM:
        c = bool_of(body.left, names)
        d = bool_of(body.right, names)
        if not entails(BAnd(c, d), b):
            c, d = BOT, BOT
        return _Step("and<", (Sequent(names, [LabelledFormula(c, FROM, body.left)]),
                              Sequent(names, [LabelledFormula(d, FROM, body.right)])),
                     (c, d))

    if isinstance(body, (CQ, DQ)):
        at_least = isinstance(body, CQ)
        # dead ends of the zero-threshold clauses (measure cases ruled out above)
        if not at_least and body.q == 0 and lf.direction == INTO:
            return _Step("dead", (falsum_sequent(min(names) if names else "a"),))
        if at_least and body.q == 0 and lf.direction == FROM:
            return _Step("dead", (falsum_sequent(min(names) if names else "a"),))

        from .syntax import rename_free_atom_name, all_names
        bound, inner = body.name, body.body
        if bound in names and bound in free_names(b):
            # genuine clash with the label: work on a renamed copy
            bound = fresh_name(bound, names | all_names(inner))
            inner = rename_free_atom_name(inner, body.name, bound)
        ctx = names - {bound}
        wide = names | {bound}
        c = bool_of(inner, wide)
        dec = a_decompose(c, bound, ctx)
        sel = dec.selected(body.q, at_least=at_least)
        premise_dir = INTO if (at_least == (lf.direction == INTO)) else FROM
        ok = entails(b, sel) if lf.direction == INTO else entails(sel, b)
        if not ok:
            # fallback witnesses from the regularity construction
            c = TOP if premise_dir == INTO else BOT
            dec = a_decompose(c, bound, ctx)
            sel = dec.selected(body.q, at_least=at_least)
            ok = entails(b, sel) if lf.direction == INTO else entails(sel, b)
            if not ok:
                raise ProofError("decomposition fallback failed")  # unreachable
        red = Sequent(wide, [LabelledFormula(c, premise_dir, inner)])
        tag = ("c" if at_least else "d") + lf.direction
        return _Step(tag, (red,), (c, dec, sel, bound, inner))

    raise TypeError(body)


def decompose_step(s: Sequent) -> Optional[SequentSet]:
    """One canonical decomposition rewriting step, or None on a normal
    (atomic-bodied) sequent."""
    step = _decompose(s)
    if step is None:
        return None
    out = SequentSet(step.reducts)
    assert out.ms < ms([s]), "decomposition must shrink the measure"
    return out


# ---------------------------------------------------------------------------
# Proof search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProofOutcome:
    kind: str                              # proved | refuted
    derivation: Optional[Derivation] = None
    witness_sequent: Optional[Sequent] = None
    witness_valuation: Optional[Valuation] = None

    @property
    def proved(self) -> bool:
        return self.kind == "proved"


def prove(s: Sequent) -> ProofOutcome:
    """Decide a single-succedent sequent, returning either a derivation
    or an invalid normal-form sequent with a falsifying valuation."""
    if len(s.succedent) != 1:
        raise ProofError("prove handles single-succedent sequents")
    result = _prove(s)
    if isinstance(result, Derivation):
        return ProofOutcome("proved", derivation=result)
    bad, val = result
    return ProofOutcome("refuted", witness_sequent=bad, witness_valuation=val)


def _prove(s: Sequent):
    step = _decompose(s)
    lf = s.single
    if step is None:
        # normal: atomic body; close by an initial sequent or refute
        assert isinstance(lf.body, Atom)
        atom_var = BVar(lf.body.index, lf.body.name)
        if lf.direction == INTO and entails(lf.label, atom_var):
            return Derivation("Ax1", s, (), (EntailHyp(lf.label, atom_var),))
        if lf.direction == FROM and entails(atom_var, lf.label):
            return Derivation("Ax2", s, (), (EntailHyp(atom_var, lf.label),))
        val = find_falsifying(lf, s.names)
        assert val is not None
        return (s, val)

    before = ms([s])
    assert ms(step.reducts) < before, "set measure must strictly decrease"

    if step.kind == "mu0":
        return Derivation("RM>", s, (), (MeasureHyp(lf.label, "=", Fraction(0)),))
    if step.kind == "mu1":
        return Derivation("RM<", s, (), (MeasureHyp(lf.label, "=", Fraction(1)),))
    if step.kind == "dead":
        bad = step.reducts[0]
        val = find_falsifying(bad.single, bad.names)
        assert val is not None
        return (bad, val)

    subs = []
    for red in step.reducts:
        sub = _prove(red)
        if not isinstance(sub, Derivation):
            return sub
        subs.append(sub)

    b = lf.label
    body = lf.body
    if step.kind == "neg>":
        (c,) = step.data
        return Derivation("RN>", s, (subs[0],), (EntailHyp(b, BNeg(c)),))
    if step.kind == "neg<":
        (c,) = step.data
        return Derivation("RN<", s, (subs[0],), (EntailHyp(BNeg(c), b),))
    if step.kind == "or>":
        c, d = step.data
        left = Derivation("R1O>", Sequent(s.names, [LabelledFormula(c, INTO, body)]),
                          (subs[0],))
        right = Derivation("R2O>", Sequent(s.names, [LabelledFormula(d, INTO, body)]),
                           (subs[1],))
        return Derivation("RU>", s, (left, right), (EntailHyp(b, BOr(c, d)),))
    if step.kind == "or<":
        return Derivation("RO<", s, (subs[0], subs[1]))
    if step.kind == "and>":
        return Derivation("RA>", s, (subs[0], subs[1]))
    if step.kind == "and<":
        c, d = step.data
        left = Derivation("R1A<", Sequent(s.names, [LabelledFormula(c, FROM, body)]),
                          (subs[0],))
        right = Derivation("R2A<", Sequent(s.names, [LabelledFormula(d, FROM, body)]),
                           (subs[1],))
        return Derivation("RI<", s, (left, right), (EntailHyp(BAnd(c, d), b),))
    if step.kind in ("c>", "c<", "d>", "d<"):
        c, dec, sel, bound, _ = step.data
        hyp_decomp = DecompHyp(bound, dec.parts)
        if step.kind == "c>":
            return Derivation("RC>", s, (subs[0],), (hyp_decomp, EntailHyp(b, sel)))
        if step.kind == "c<":
            return Derivation("RC<", s, (subs[0],), (hyp_decomp, EntailHyp(sel, b)))
        if step.kind == "d>":
            return Derivation("RD>", s, (subs[0],), (hyp_decomp, EntailHyp(b, sel)))
        return Derivation("RD<", s, (subs[0],), (hyp_decomp, EntailHyp(sel, b)))
    raise ProofError(f"unknown step {step.kind}")


# ---------------------------------------------------------------------------
# Derivation checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckFailure(Exception):
    path: tuple
    reason: str

    def __str__(self):
        where = "/".join(str(i) for i in self.path) or "root"
        return f"at node {where}: {self.reason}"


def check_derivation(d: Derivation) -> None:
    """Re-verify a derivation node by node; raises CheckFailure.

    The active labelled formula of every sequent is its first member; the
    remaining members form a passive context that must be carried
    unchanged through each rule (multi-succedent extension)."""
    _check(d, ())


def _fail(path, reason):
    raise CheckFailure(tuple(path), reason)


def _need_hyp(d, cls, path):
    for h in d.hypotheses:
        if isinstance(h, cls):
            return h
    _fail(path, f"{d.rule} needs a recorded {cls.__name__}")


def _check(d: Derivation, path) -> None:
    s = d.conclusion
    active = s.succedent[0]
    passive = s.succedent[1:]
    b, body, names = active.label, active.body, s.names

    def premise(i) -> Derivation:
        if i >= len(d.premises):
            _fail(path, f"{d.rule} needs {i + 1} premise(s)")
        return d.premises[i]

    def check_passive(p: Derivation):
        if p.conclusion.succedent[1:] != passive:
            _fail(path, f"{d.rule} premise changes the passive context")

    def active_of(p: Derivation) -> LabelledFormula:
        return p.conclusion.succedent[0]

    rule = d.rule
    if rule == "Ax1":
        if d.premises:
            _fail(path, "Ax1 takes no premises")
        if not (isinstance(body, Atom) and active.direction == INTO):
            _fail(path, "Ax1 concludes b |> p(i,a)")
        if body.name not in names:
            _fail(path, "atom name not declared")
        if not entails(b, BVar(body.index, body.name)):
            _fail(path, "label does not entail the atom")
    elif rule == "Ax2":
        if d.premises:
            _fail(path, "Ax2 takes no premises")
        if not (isinstance(body, Atom) and active.direction == FROM):
            _fail(path, "Ax2 concludes b <| p(i,a)")
        if body.name not in names:
            _fail(path, "atom name not declared")
        if not entails(BVar(body.index, body.name), b):
            _fail(path, "atom does not entail the label")
    elif rule == "RM>":
        if active.direction != INTO:
            _fail(path, "RM> concludes b |> A")
        if measure(b) != 0:
            _fail(path, "label measure is not 0")
    elif rule == "RM<":
        if active.direction != FROM:
            _fail(path, "RM< concludes b <| A")
        if measure(b) != 1:
            _fail(path, "label measure is not 1")
    elif rule in ("RU>", "RI<"):
        p1, p2 = premise(0), premise(1)
        check_passive(p1), check_passive(p2)
        a1, a2 = active_of(p1), active_of(p2)
        if p1.conclusion.names != names or p2.conclusion.names != names:
            _fail(path, "premise name sets differ")
        if not (a1.body == body == a2.body and a1.direction == a2.direction == active.direction):
            _fail(path, f"{rule} premises must re-state the conclusion formula")
        if rule == "RU>":
            if active.direction != INTO:
                _fail(path, "RU> concludes b |> A")
            if not entails(b, BOr(a1.label, a2.label)):
                _fail(path, "label does not entail the union of premise labels")
        else:
            if active.direction != FROM:
                _fail(path, "RI< concludes b <| A")
            if not entails(BAnd(a1.label, a2.label), b):
                _fail(path, "intersection of premise labels does not entail label")
    elif rule in ("RN>", "RN<"):
        p = premise(0)
        check_passive(p)
        a1 = active_of(p)
        if p.conclusion.names != names:
            _fail(path, "premise name set differs")
        if not isinstance(body, Neg) or a1.body != body.body:
            _fail(path, f"{rule} concludes a negation of the premise body")
        if rule == "RN>":
            if not (active.direction == INTO and a1.direction == FROM):
                _fail(path, "RN> flips |> from a <| premise")
            if not entails(b, BNeg(a1.label)):
                _fail(path, "label does not entail the negated premise label")
        else:
            if not (active.direction == FROM and a1.direction == INTO):
                _fail(path, "RN< flips <| from a |> premise")
            if not entails(BNeg(a1.label), b):
                _fail(path, "negated premise label does not entail label")
    elif rule in ("R1O>", "R2O>"):
        p = premise(0)
        check_passive(p)
        a1 = active_of(p)
        if p.conclusion.names != names:
            _fail(path, "premise name set differs")
        if not isinstance(body, Or) or active.direction != INTO or a1.direction != INTO:
            _fail(path, f"{rule} introduces a disjunction on |>")
        want = body.left if rule == "R1O>" else body.right
        if a1.body != want or a1.label != b:
            _fail(path, f"{rule} premise must be the matching disjunct at the same label")
    elif rule == "RO<":
        p1, p2 = premise(0), premise(1)
        check_passive(p1), check_passive(p2)
        a1, a2 = active_of(p1), active_of(p2)
        if not isinstance(body, Or) or active.direction != FROM:
            _fail(path, "RO< introduces a disjunction on <|")
        if not (a1.direction == a2.direction == FROM and a1.label == b == a2.label
                and a1.body == body.left and a2.body == body.right):
            _fail(path, "RO< premises must cover both disjuncts at the same label")
    elif rule == "RA>":
        p1, p2 = premise(0), premise(1)
        check_passive(p1), check_passive(p2)
        a1, a2 = active_of(p1), active_of(p2)
        if not isinstance(body, And) or active.direction != INTO:
            _fail(path, "RA> introduces a conjunction on |>")
        if not (a1.direction == a2.direction == INTO and a1.label == b == a2.label
                and a1.body == body.left and a2.body == body.right):
            _fail(path, "RA> premises must cover both conjuncts at the same label")
    elif rule in ("R1A<", "R2A<"):
        p = premise(0)
        check_passive(p)
        a1 = active_of(p)
        if not isinstance(body, And) or active.direction != FROM or a1.direction != FROM:
            _fail(path, f"{rule} introduces a conjunction on <|")
        want = body.left if rule == "R1A<" else body.right
        if a1.body != want or a1.label != b:
            _fail(path, f"{rule} premise must be the matching conjunct at the same label")
    elif rule in ("RC>", "RC<", "RD>", "RD<"):
        p = premise(0)
        check_passive(p)
        a1 = active_of(p)
        want_cls = CQ if rule[1] == "C" else DQ
        if not isinstance(body, want_cls):
            _fail(path, f"{rule} concludes a {'C' if want_cls is CQ else 'D'} quantifier")
        into_conclusion = rule.endswith(">")
        if (active.direction == INTO) != into_conclusion:
            _fail(path, f"{rule} concludes on the wrong side")
        premise_into = into_conclusion if want_cls is CQ else not into_conclusion
        if (a1.direction == INTO) != premise_into:
            _fail(path, f"{rule} premise is on the wrong side")
        extra = p.conclusion.names - names
        if len(extra) > 1:
            _fail(path, "premise names must extend the context by one bound name")
        if extra:
            bound = next(iter(extra))
        else:
            # a padding name of the conclusion is reused as the binder;
            # sound only while the label has no atoms of that name
            bound = body.name
            if bound not in names or p.conclusion.names != names:
                _fail(path, "premise names must extend the context by the bound name")
            if bound in free_names(b):
                _fail(path, "reused bound name occurs free in the label")
        if p.conclusion.names != names | {bound}:
            _fail(path, "premise names must extend the context by the bound name")
        if bound == body.name:
            if a1.body != body.body:
                _fail(path, f"{rule} premise body must be the quantifier body")
        else:
            # shadowed binder: the premise works on an alpha-renamed copy
            from .syntax import rename_free_atom_name
            if a1.body != rename_free_atom_name(body.body, body.name, bound):
                _fail(path, f"{rule} premise body must be the renamed quantifier body")
        dec_hyp = _need_hyp(d, DecompHyp, path)
        if dec_hyp.name != bound:
            _fail(path, "recorded decomposition names the wrong bound name")
        dec = ADecomposition(bound, frozenset(names) - {bound}, dec_hyp.parts)
        if not check_decomposition(dec, a1.label):
            _fail(path, "recorded decomposition is not a decomposition of the premise label")
        sel = dec.selected(body.q, at_least=(want_cls is CQ))
        if into_conclusion:
            if not entails(b, sel):
                _fail(path, "label does not entail the selected union")
        else:
            if not entails(sel, b):
                _fail(path, "selected union does not entail the label")
    elif rule == "Cut":
        p1, p2 = premise(0), premise(1)
        check_passive(p1), check_passive(p2)
        a1, a2 = active_of(p1), active_of(p2)
        if p1.conclusion.names != names or p2.conclusion.names != names:
            _fail(path, "Cut premise name sets differ from the conclusion")
        if active.direction != INTO or a1.direction != INTO or a2.direction != INTO:
            _fail(path, "Cut works on |> formulas")
        if not (isinstance(a1.body, Or) and isinstance(a1.body.left, Neg)):
            _fail(path, "Cut major premise must be c |> ~A | B")
        if a1.body.left.body != a2.body:
            _fail(path, "Cut premises disagree on the cut formula")
        if a1.body.right != body:
            _fail(path, "Cut conclusion must be the right disjunct of the major premise")
        if not entails(b, BAnd(a1.label, a2.label)):
            _fail(path, "label does not entail the conjunction of premise labels")
    else:
        _fail(path, f"unknown rule tag {rule}")

    for i, p in enumerate(d.premises):
        _check(p, path + (i,))


# ---------------------------------------------------------------------------
# Derived cut
# ---------------------------------------------------------------------------

def cut(d1: Derivation, d2: Derivation, b) -> Derivation:
    """Cut via completeness: the premises make  b |> B  valid, so proof
    search rebuilds a (cut-free) derivation of it."""
    check_derivation(d1)
    check_derivation(d2)
    major = d1.conclusion.single
    minor = d2.conclusion.single
    if not (isinstance(major.body, Or) and isinstance(major.body.left, Neg)
            and major.direction == INTO and minor.direction == INTO):
        raise ProofError("cut needs premises c |> ~A | B and d |> A")
    if major.body.left.body != minor.body:
        raise ProofError("cut formulas disagree")
    if not entails(b, BAnd(major.label, minor.label)):
        raise ProofError("cut label must entail both premise labels")
    names = d1.conclusion.names | d2.conclusion.names
    goal = Sequent(names, [LabelledFormula(b, INTO, major.body.right)])
    outcome = prove(goal)
    if not outcome.proved:
        raise ProofError("cut conclusion unexpectedly invalid")
    return outcome.derivation
