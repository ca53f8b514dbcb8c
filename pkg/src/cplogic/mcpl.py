"""The minimal counting calculus whose derivations decorate to terms.

Formulas are quantifier-rooted: every formula is C[q] over a base that
is either an indexed coin constant or an implication whose antecedent is
again quantifier-rooted.  Sequents carry a multiset context of such
formulas, a declared name set, and a labelled conclusion.

`decorate` maps a checked derivation to a term together with the typing
derivation of its image judgment, following the rule-by-rule decoration
(axiom -> variable, the arrow rules -> abstraction/application, the coin
rule -> an indexed choice, counting -> a generator, bottom -> the loop).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .syntax import (
    Arrow, BAnd, BNeg, BOr, BVar, BOT, Base, BoolFormula, ChoiceHyp,
    CtxIndexHyp, DecompHyp, O, QualType, RateHyp, Rational, SimpleType,
    Var, big_or, check_unit, free_names,
)
from .semantics import ADecomposition, check_decomposition, entails, measure
from .lcpl import (
    mk_rapp, mk_rbot, mk_rid, mk_rlam, mk_rnu, mk_rplus, mk_runion,
)
from .textio import OMEGA


class McplError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Formulas and sequents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McplFlip:
    index: int


@dataclass(frozen=True)
class McplImp:
    arg: "McplFormula"
    result: "McplBase"


McplBase = Union[McplFlip, McplImp]


@dataclass(frozen=True)
class McplFormula:
    q: Rational
    base: McplBase

    def __post_init__(self):
        object.__setattr__(self, "q", check_unit(self.q))


@dataclass(frozen=True)
class McplSequent:
    context: tuple               # tuple of McplFormula
    names: frozenset
    label: BoolFormula
    formula: McplFormula

    def __init__(self, context, names, label, formula):
        object.__setattr__(self, "context", tuple(context))
        object.__setattr__(self, "names", frozenset(names))
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "formula", formula)
        if not free_names(label) <= self.names:
            raise McplError("label names not declared in the sequent")


@dataclass(frozen=True)
class McplDerivation:
    rule: str                    # Mbot | MAx | MimpE | MimpI | Mflip | MC
    conclusion: McplSequent
    premises: tuple = ()
    hypotheses: tuple = ()

    def __init__(self, rule, conclusion, premises=(), hypotheses=()):
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "conclusion", conclusion)
        object.__setattr__(self, "premises", tuple(premises))
        object.__setattr__(self, "hypotheses", tuple(hypotheses))


MCPL_RULE_TAGS = ("Mbot", "MAx", "MimpE", "MimpI", "Mflip", "MC")


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

class McplCheckFailure(Exception):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        where = "/".join(str(i) for i in self.path) or "root"
        super().__init__(f"at node {where}: {reason}")


def check_mcpl_derivation(d: McplDerivation) -> None:
    _mcheck(d, ())


def _mfail(path, reason):
    raise McplCheckFailure(path, reason)


def _mcheck(d: McplDerivation, path) -> None:
    s = d.conclusion
    rule = d.rule

    def premise(i) -> McplDerivation:
        if i >= len(d.premises):
            _mfail(path, f"{rule} needs {i + 1} premise(s)")
        return d.premises[i]

    if rule == "Mbot":
        if d.premises:
            _mfail(path, "Mbot takes no premises")
        if not entails(s.label, BOT):
            _mfail(path, "Mbot label must entail F")
    elif rule == "MAx":
        idx = None
        for h in d.hypotheses:
            if isinstance(h, CtxIndexHyp):
                idx = h.index
        if idx is None or not (0 <= idx < len(s.context)):
            _mfail(path, "MAx needs a valid context index")
        if s.context[idx] != s.formula:
            _mfail(path, "MAx conclusion must restate the indexed hypothesis")
    elif rule == "MimpE":
        # abstraction-like: from G, A |- b |> C[q] B0 conclude C[q](A => B0)
        if not isinstance(s.formula.base, McplImp):
            _mfail(path, "MimpE concludes an implication")
        p = premise(0).conclusion
        want_ctx = s.context + (s.formula.base.arg,)
        if p.context != want_ctx:
            _mfail(path, "MimpE premise context must bind the antecedent last")
        if not (p.names == s.names and p.label == s.label
                and p.formula == McplFormula(s.formula.q, s.formula.base.result)):
            _mfail(path, "MimpE premise must conclude the consequent")
    elif rule == "MimpI":
        # application-like
        p1, p2 = premise(0).conclusion, premise(1).conclusion
        if not (p1.context == s.context == p2.context
                and p1.names == s.names == p2.names):
            _mfail(path, "MimpI premises must share the sequent context")
        if not isinstance(p1.formula.base, McplImp):
            _mfail(path, "MimpI major premise must be an implication")
        if p1.formula.base.arg != p2.formula:
            _mfail(path, "MimpI premises disagree on the antecedent")
        if s.formula != McplFormula(p1.formula.q, p1.formula.base.result):
            _mfail(path, "MimpI conclusion must be the consequent at the major threshold")
        if not entails(s.label, BAnd(p1.label, p2.label)):
            _mfail(path, "label does not entail the conjunction of premise labels")
    elif rule == "Mflip":
        ch = None
        for h in d.hypotheses:
            if isinstance(h, ChoiceHyp):
                ch = h
        if ch is None:
            _mfail(path, "Mflip needs a recorded choice name and index")
        if ch.name not in s.names:
            _mfail(path, "Mflip choice name must be declared")
        p1, p2 = premise(0).conclusion, premise(1).conclusion
        if not (p1.context == s.context == p2.context
                and p1.names == s.names == p2.names
                and p1.formula == s.formula == p2.formula):
            _mfail(path, "Mflip premises must restate the conclusion formula")
        lit = BVar(ch.index, ch.name)
        split = BOr(BAnd(p1.label, lit), BAnd(p2.label, BNeg(lit)))
        if not entails(s.label, split):
            _mfail(path, "label does not entail the coin split of premise labels")
    elif rule == "MC":
        p = premise(0).conclusion
        extra = p.names - s.names
        if len(extra) != 1:
            _mfail(path, "MC premise must extend the names by the generated one")
        bound = next(iter(extra))
        if p.context != s.context:
            _mfail(path, "MC premise context must match")
        dec_hyp = None
        rate = None
        for h in d.hypotheses:
            if isinstance(h, DecompHyp):
                dec_hyp = h
            if isinstance(h, RateHyp):
                rate = h.rate
        if dec_hyp is None or rate is None:
            _mfail(path, "MC needs a recorded decomposition and rate")
        if dec_hyp.name != bound:
            _mfail(path, "recorded decomposition names the wrong bound name")
        dec = ADecomposition(bound, frozenset(s.names), dec_hyp.parts)
        if not check_decomposition(dec, p.label, weak=True):
            _mfail(path, "recorded parts are not a weak decomposition of the premise label")
        for ci, _ in dec_hyp.parts:
            if measure(ci) < rate:
                _mfail(path, "a name part has measure below the rate")
        if not entails(s.label, big_or(e for _, e in dec_hyp.parts)):
            _mfail(path, "label does not entail the union of context parts")
        if s.formula != McplFormula(p.formula.q * rate, p.formula.base):
            _mfail(path, "conclusion threshold must be the premise threshold times the rate")
    else:
        _mfail(path, f"unknown rule tag {rule}")

    for i, p in enumerate(d.premises):
        _mcheck(p, path + (i,))


# ---------------------------------------------------------------------------
# Translation to simple types and decoration
# ---------------------------------------------------------------------------

def mcpl_base_type(b: McplBase) -> SimpleType:
    if isinstance(b, McplFlip):
        return O
    return Arrow(mcpl_qual(b.arg), mcpl_base_type(b.result))


def mcpl_qual(f: McplFormula) -> QualType:
    return QualType(f.q, mcpl_base_type(f.base))


def decorate(d: McplDerivation):
    """The term of a checked derivation, with the typing derivation of
    Gamma* |- term : label |> base-type at the conclusion threshold."""
    check_mcpl_derivation(d)
    return _decorate(d)


def _ctx_vars(context) -> tuple:
    return tuple((f"h{i}", mcpl_qual(f)) for i, f in enumerate(context))


def _decorate(d: McplDerivation):
    s = d.conclusion
    ctx = _ctx_vars(s.context)
    if d.rule == "Mbot":
        td = mk_rbot(ctx, s.names, s.formula.q, OMEGA, s.label,
                     mcpl_base_type(s.formula.base))
        return OMEGA, td
    if d.rule == "MAx":
        idx = next(h.index for h in d.hypotheses if isinstance(h, CtxIndexHyp))
        x = f"h{idx}"
        td = mk_rid(ctx, s.names, x, s.label, mcpl_base_type(s.formula.base))
        return Var(x), td
    if d.rule == "MimpE":
        _, tp = _decorate(d.premises[0])
        x = f"h{len(s.context)}"
        td = mk_rlam(tp, x)
        return td.judgment.term, td
    if d.rule == "MimpI":
        _, t1 = _decorate(d.premises[0])
        _, t2 = _decorate(d.premises[1])
        td = mk_rapp(t1, t2, s.label)
        return td.judgment.term, td
    if d.rule == "Mflip":
        ch = next(h for h in d.hypotheses if isinstance(h, ChoiceHyp))
        _, t1 = _decorate(d.premises[0])
        _, t2 = _decorate(d.premises[1])
        lit = BVar(ch.index, ch.name)
        left = mk_rplus(t1, "l", t2.judgment.term, ch.name, ch.index,
                        BAnd(lit, t1.judgment.label))
        right = mk_rplus(t2, "r", t1.judgment.term, ch.name, ch.index,
                         BAnd(BNeg(lit), t2.judgment.label))
        td = mk_runion(left, right, s.label)
        return td.judgment.term, td
    if d.rule == "MC":
        _, tp = _decorate(d.premises[0])
        bound = next(h.name for h in d.hypotheses if isinstance(h, DecompHyp))
        parts = next(h.parts for h in d.hypotheses if isinstance(h, DecompHyp))
        rate = next(h.rate for h in d.hypotheses if isinstance(h, RateHyp))
        td = mk_rnu(tp, bound, parts, rate, s.label)
        return td.judgment.term, td
    raise McplError(f"unknown rule {d.rule}")


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def print_mcpl_formula(f: McplFormula, _as_arg: bool = False) -> str:
    from .textio import print_rational
    inner = f"C[{print_rational(f.q)}] {_print_base(f.base)}"
    if _as_arg and isinstance(f.base, McplImp):
        return f"({inner})"
    return inner


def _print_base(b: McplBase) -> str:
    if isinstance(b, McplFlip):
        return f"Flip({b.index})"
    return f"{print_mcpl_formula(b.arg, _as_arg=True)} => {_print_base(b.result)}"


def print_mcpl_sequent(s: McplSequent) -> str:
    from .textio import print_bool
    ctx = ", ".join(print_mcpl_formula(f) for f in s.context)
    names = ", ".join(sorted(s.names))
    head = f"{ctx} " if ctx else ""
    return f"{head}|-{{{names}}} {print_bool(s.label)} |> {print_mcpl_formula(s.formula)}"


def print_mcpl_derivation(d: McplDerivation) -> str:
    from .textio import print_hypothesis, _quote
    hyps = " ".join(_quote(print_hypothesis(h)) for h in d.hypotheses)
    prem = "".join(" " + print_mcpl_derivation(p) for p in d.premises)
    return f"({d.rule} {_quote(print_mcpl_sequent(d.conclusion))} [{hyps}]{prem})"


def _parse_mcpl_formula(p) -> McplFormula:
    if p.at("("):
        p.next()
        f = _parse_mcpl_formula(p)
        p.expect(")")
        return f
    p.expect("C")
    p.expect("[")
    q = p.unit_rational()
    p.expect("]")
    return McplFormula(q, _parse_mcpl_base(p))


def _parse_mcpl_base(p) -> McplBase:
    if p.peek().text == "Flip":
        p.next()
        p.expect("(")
        i = p.nat()
        p.expect(")")
        return McplFlip(i)
    arg = _parse_mcpl_formula(p)
    p.expect("=>")
    return McplImp(arg, _parse_mcpl_base(p))


def parse_mcpl_formula(text: str) -> McplFormula:
    from .textio import _Parser
    p = _Parser(text)
    f = _parse_mcpl_formula(p)
    p.done()
    return f


def parse_mcpl_sequent(text: str) -> McplSequent:
    from .textio import _Parser
    p = _Parser(text)
    context = []
    while not p.at("|-"):
        context.append(_parse_mcpl_formula(p))
        if p.at(","):
            p.next()
        else:
            break
    p.expect("|-")
    p.expect("{")
    names = p.name_set()
    p.expect("}")
    label = p.bool_formula()
    p.expect("|>")
    formula = _parse_mcpl_formula(p)
    p.done()
    return McplSequent(context, names, label, formula)


def parse_mcpl_derivation(text: str) -> McplDerivation:
    from .textio import _Parser, _parse_tree
    p = _Parser(text)
    tree = _parse_tree(p, parse_mcpl_sequent)
    p.done()

    def conv(node):
        tag, concl, hyps, prems = node
        return McplDerivation(tag, concl, tuple(conv(q) for q in prems), hyps)

    return conv(tree)
