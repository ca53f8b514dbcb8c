"""Type derivation checking and transformation for the counting type
system over the probabilistic lambda calculus.

Checking is the primary contract: every semantic side condition is
recomputed from scratch.  Subject reduction is constructive: transport
rebuilds a derivation of the reduct judgment by the substitution lemma
(beta) and per-rule derivation surgeries (permutations).

Two deliberate extensions over the bare rule set, both pinned by tests:

* The bottom rule also fires at exponent 0.  A zero exponent promises
  nothing (normalize with probability >= 0), every judgment at 0 is
  semantically vacuous, and without it application arguments under a
  C[0] qualifier would be underivable even where nothing is demanded of
  them (the standard judgment of \\x. x omega at label T needs one).

* The variable rule accepts any recorded rate s with exponent q*s, with
  s defaulting to 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .syntax import (
    App, Arrow, Atom, BAnd, BNeg, BOr, BVar, BOT, Base, BoolFormula, CQ,
    Choice, DecompHyp, Formula, FROM, INTO, Lam, LabelledFormula, Neg,
    Nu, O, Or, QualType, RateHyp, Rational, Sequent, SimpleType, Term, TOP,
    TypeDerivation, TypeJudgment, Var, big_or, free_names, free_vars,
    fresh_name,
)
from .semantics import (
    ADecomposition, a_decompose, check_decomposition, entails,
    measure, weak_a_decompose,
)
from .lambda_nu import rename_term_name, subst, _outranks, _root_perm


class TypeCheckFailure(Exception):
    def __init__(self, path, reason):
        self.path = tuple(path)
        self.reason = reason
        where = "/".join(str(i) for i in self.path) or "root"
        super().__init__(f"at node {where}: {reason}")


class TransportError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Node constructors (each builds exactly the judgment its rule licenses)
# ---------------------------------------------------------------------------

def mk_rbot(context, names, exponent, term, label, typ) -> TypeDerivation:
    j = TypeJudgment(context, names, exponent, term, label, typ)
    return TypeDerivation("Rbot", j)


def mk_rid(context, names, x, label, typ, rate=Fraction(1)) -> TypeDerivation:
    q = dict(context)[x].q
    j = TypeJudgment(context, names, q * rate, Var(x), label, typ)
    return TypeDerivation("Rid", j, (), (RateHyp(rate),))


def mk_runion(p1: TypeDerivation, p2: TypeDerivation, label) -> TypeDerivation:
    j1 = p1.judgment
    j = TypeJudgment(j1.context, j1.names, j1.exponent, j1.term, label, j1.type)
    return TypeDerivation("Runion", j, (p1, p2))


def mk_rlam(p: TypeDerivation, x: str) -> TypeDerivation:
    j = p.judgment
    ctx = tuple((v, qt) for v, qt in j.context if v != x)
    qual = dict(j.context)[x]
    jj = TypeJudgment(ctx, j.names, j.exponent, Lam(x, j.term), j.label,
                      Arrow(qual, j.type))
    return TypeDerivation("Rlam", jj, (p,))


def mk_rapp(pf: TypeDerivation, pa: TypeDerivation, label) -> TypeDerivation:
    jf, ja = pf.judgment, pa.judgment
    jj = TypeJudgment(jf.context, jf.names, jf.exponent, App(jf.term, ja.term),
                      label, jf.type.result)
    return TypeDerivation("Rapp", jj, (pf, pa))


def mk_rplus(p: TypeDerivation, side: str, other: Term, name: str, index: int,
             label) -> TypeDerivation:
    j = p.judgment
    term = Choice(j.term, other, name, index) if side == "l" \
        else Choice(other, j.term, name, index)
    jj = TypeJudgment(j.context, j.names, j.exponent, term, label, j.type)
    return TypeDerivation("RplusL" if side == "l" else "RplusR", jj, (p,))


def mk_rnu(p: TypeDerivation, bound: str, parts, rate, label) -> TypeDerivation:
    j = p.judgment
    jj = TypeJudgment(j.context, j.names - {bound}, j.exponent * rate,
                      Nu(bound, j.term), label, j.type)
    return TypeDerivation("Rnu", jj, (p,), (DecompHyp(bound, tuple(parts)),
                                            RateHyp(rate)))


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def check_type_derivation(d: TypeDerivation) -> None:
    _tcheck(d, ())


def _tfail(path, reason):
    raise TypeCheckFailure(path, reason)


def _rate_of(d: TypeDerivation, default=Fraction(1)):
    for h in d.hypotheses:
        if isinstance(h, RateHyp):
            return h.rate
    return default


def _decomp_of(d: TypeDerivation, path):
    for h in d.hypotheses:
        if isinstance(h, DecompHyp):
            return h
    _tfail(path, f"{d.rule} needs a recorded decomposition")


def _same_base(j1: TypeJudgment, j2: TypeJudgment) -> bool:
    return (j1.context == j2.context and j1.names == j2.names
            and j1.exponent == j2.exponent and j1.term == j2.term
            and j1.type == j2.type)


def _tcheck(d: TypeDerivation, path) -> None:
    j = d.judgment
    ctx, names, r, t, b, sig = (j.context, j.names, j.exponent, j.term,
                                j.label, j.type)
    if not free_names(b) <= names:
        _tfail(path, "label has names outside the judgment name set")
    if not free_names(t) <= names:
        _tfail(path, "subject has names outside the judgment name set")

    def premise(i) -> TypeDerivation:
        if i >= len(d.premises):
            _tfail(path, f"{d.rule} needs {i + 1} premise(s)")
        return d.premises[i]

    rule = d.rule
    if rule == "Rbot":
        if d.premises:
            _tfail(path, "Rbot takes no premises")
        if not free_vars(t) <= {v for v, _ in ctx}:
            _tfail(path, "subject has variables outside the context")
        if not (entails(b, BOT) or r == 0):
            _tfail(path, "Rbot label must entail F (or the exponent be 0)")
    elif rule == "Rid":
        if not isinstance(t, Var):
            _tfail(path, "Rid subject must be a variable")
        qual = dict(ctx).get(t.ident)
        if qual is None:
            _tfail(path, f"variable {t.ident} not in context")
        if qual.type != sig:
            _tfail(path, "variable type does not match the judgment type")
        s = _rate_of(d)
        if r != qual.q * s:
            _tfail(path, "exponent must be the declared threshold times the rate")
    elif rule == "Runion":
        p1, p2 = premise(0), premise(1)
        if not (_same_base(p1.judgment, j) and _same_base(p2.judgment, j)):
            _tfail(path, "Runion premises must restate the judgment (labels aside)")
        if not entails(b, BOr(p1.judgment.label, p2.judgment.label)):
            _tfail(path, "label does not entail the union of premise labels")
    elif rule == "Rlam":
        if not isinstance(t, Lam):
            _tfail(path, "Rlam subject must be an abstraction")
        if not isinstance(sig, Arrow):
            _tfail(path, "Rlam type must be an arrow")
        p = premise(0)
        pj = p.judgment
        want_ctx = dict(ctx)
        want_ctx[t.ident] = sig.arg
        if dict(pj.context) != want_ctx or t.ident in dict(ctx):
            _tfail(path, "Rlam premise context must bind exactly the abstraction variable")
        if not (pj.names == names and pj.exponent == r and pj.term == t.body
                and pj.label == b and pj.type == sig.result):
            _tfail(path, "Rlam premise must type the body at the argument qualifier")
    elif rule == "Rapp":
        if not isinstance(t, App):
            _tfail(path, "Rapp subject must be an application")
        pf, pa = premise(0), premise(1)
        jf, ja = pf.judgment, pa.judgment
        if not (isinstance(jf.type, Arrow) and jf.type.result == sig):
            _tfail(path, "function premise must have an arrow type ending in the result")
        if not (jf.context == ctx and jf.names == names and jf.exponent == r
                and jf.term == t.fn):
            _tfail(path, "function premise must type the function at the same exponent")
        if not (ja.context == ctx and ja.names == names and ja.term == t.arg
                and ja.type == jf.type.arg.type):
            _tfail(path, "argument premise must type the argument at the arrow source")
        if ja.exponent != jf.type.arg.q:
            _tfail(path, "argument exponent must equal the arrow qualifier")
        if not entails(b, BAnd(jf.label, ja.label)):
            _tfail(path, "label does not entail the conjunction of premise labels")
    elif rule in ("RplusL", "RplusR"):
        if not isinstance(t, Choice):
            _tfail(path, f"{rule} subject must be a choice")
        if t.name not in names:
            _tfail(path, "choice name must be declared")
        p = premise(0)
        pj = p.judgment
        want = t.left if rule == "RplusL" else t.right
        if not (pj.context == ctx and pj.names == names and pj.exponent == r
                and pj.term == want and pj.type == sig):
            _tfail(path, f"{rule} premise must type the matching operand")
        lit = BVar(t.index, t.name)
        if rule == "RplusR":
            lit = BNeg(lit)
        if not entails(b, BAnd(lit, pj.label)):
            _tfail(path, "label does not entail the choice literal and premise label")
    elif rule == "Rnu":
        if not isinstance(t, Nu):
            _tfail(path, "Rnu subject must be a generator")
        p = premise(0)
        pj = p.judgment
        extra = pj.names - names
        if len(extra) > 1:
            _tfail(path, "premise names must extend the context by one bound name")
        if extra:
            bound = next(iter(extra))
        else:
            bound = t.name
            if bound not in names or pj.names != names:
                _tfail(path, "premise names must extend the context by the bound name")
            if bound in free_names(b):
                _tfail(path, "reused bound name occurs free in the label")
        if pj.names != names | {bound}:
            _tfail(path, "premise names must extend the context by the bound name")
        want_body = t.body if bound == t.name else rename_term_name(t.body, t.name, bound)
        if not (pj.context == ctx and pj.term == want_body and pj.type == sig):
            _tfail(path, "Rnu premise must type the generator body")
        dec_hyp = _decomp_of(d, path)
        if dec_hyp.name != bound:
            _tfail(path, "recorded decomposition names the wrong bound name")
        dec = ADecomposition(bound, frozenset(names) - {bound}, dec_hyp.parts)
        if not check_decomposition(dec, pj.label, weak=True):
            _tfail(path, "recorded parts are not a weak decomposition of the premise label")
        rate = _rate_of(d)
        for ci, _ in dec_hyp.parts:
            if measure(ci) < rate:
                _tfail(path, "a name part has measure below the rate")
        if not entails(b, big_or(e for _, e in dec_hyp.parts)):
            _tfail(path, "label does not entail the union of context parts")
        if r != pj.exponent * rate:
            _tfail(path, "exponent must be the premise exponent times the rate")
    else:
        _tfail(path, f"unknown rule tag {rule}")

    for i, p in enumerate(d.premises):
        _tcheck(p, path + (i,))


# ---------------------------------------------------------------------------
# Derivation transformations
# ---------------------------------------------------------------------------

def weaken(d: TypeDerivation, label: BoolFormula) -> TypeDerivation:
    """Strengthen the conclusion label (new label must entail the old);
    only abstraction nodes recurse, everything else re-justifies at the
    final node."""
    j = d.judgment
    if d.rule == "Rlam":
        return TypeDerivation("Rlam",
                              TypeJudgment(j.context, j.names, j.exponent,
                                           j.term, label, j.type),
                              (weaken(d.premises[0], label),), d.hypotheses)
    jj = TypeJudgment(j.context, j.names, j.exponent, j.term, label, j.type)
    return TypeDerivation(d.rule, jj, d.premises, d.hypotheses)


def scale(d: TypeDerivation, k: Rational) -> TypeDerivation:
    """Lower the conclusion exponent by a factor k in [0,1]."""
    k = Fraction(k)
    if k == 1:
        return d
    if not 0 <= k <= 1:
        raise TransportError(f"scale factor {k} outside [0,1]")
    j = d.judgment

    def with_exp(exp):
        return TypeJudgment(j.context, j.names, exp, j.term, j.label, j.type)

    if d.rule == "Rbot":
        return TypeDerivation("Rbot", with_exp(j.exponent * k))
    if d.rule == "Rid":
        s = _rate_of(d) * k
        return TypeDerivation("Rid", with_exp(j.exponent * k), (), (RateHyp(s),))
    if d.rule == "Runion":
        return TypeDerivation("Runion", with_exp(j.exponent * k),
                              tuple(scale(p, k) for p in d.premises), d.hypotheses)
    if d.rule == "Rlam":
        return TypeDerivation("Rlam", with_exp(j.exponent * k),
                              (scale(d.premises[0], k),), d.hypotheses)
    if d.rule == "Rapp":
        return TypeDerivation("Rapp", with_exp(j.exponent * k),
                              (scale(d.premises[0], k), d.premises[1]), d.hypotheses)
    if d.rule in ("RplusL", "RplusR"):
        return TypeDerivation(d.rule, with_exp(j.exponent * k),
                              (scale(d.premises[0], k),), d.hypotheses)
    if d.rule == "Rnu":
        dec = _decomp_of(d, ())
        rate = _rate_of(d) * k
        return TypeDerivation("Rnu", with_exp(j.exponent * k), d.premises,
                              (dec, RateHyp(rate)))
    raise TransportError(f"cannot scale rule {d.rule}")


def rename_name_in_derivation(d: TypeDerivation, old: str, new: str) -> TypeDerivation:
    """Rename a free name everywhere in a derivation (stops at generators
    rebinding it)."""
    from .syntax import rename_bool_name
    j = d.judgment
    names = frozenset(new if n == old else n for n in j.names)
    jj = TypeJudgment(j.context, names, j.exponent,
                      rename_term_name(j.term, old, new),
                      rename_bool_name(j.label, old, new), j.type)
    hyps = []
    for h in d.hypotheses:
        if isinstance(h, DecompHyp):
            hyps.append(DecompHyp(new if h.name == old else h.name,
                                  tuple((rename_bool_name(x, old, new),
                                         rename_bool_name(e, old, new))
                                        for x, e in h.parts)))
        else:
            hyps.append(h)
    premises = d.premises
    if d.rule == "Rnu":
        bound = next(iter(d.premises[0].judgment.names - j.names), None)
        if bound != old:
            premises = tuple(rename_name_in_derivation(p, old, new) for p in premises)
    else:
        premises = tuple(rename_name_in_derivation(p, old, new) for p in premises)
    return TypeDerivation(d.rule, jj, premises, tuple(hyps))


def rename_var_in_derivation(d: TypeDerivation, old: str, new: str) -> TypeDerivation:
    """Rename a context variable (new must be fresh for the subderivation)."""
    j = d.judgment
    ctx = tuple((new if v == old else v, qt) for v, qt in j.context)
    jj = TypeJudgment(ctx, j.names, j.exponent, subst(j.term, old, Var(new)),
                      j.label, j.type)
    premises = d.premises
    if d.rule == "Rlam" and d.judgment.term.ident == old:
        pass                      # the binder shadows: premises untouched
    else:
        premises = tuple(rename_var_in_derivation(p, old, new) for p in premises)
    return TypeDerivation(d.rule, jj, premises, d.hypotheses)


def _deriv_names(d: TypeDerivation) -> set:
    from .syntax import all_names
    out = set(d.judgment.names) | all_names(d.judgment.term) \
        | all_names(d.judgment.label)
    for h in d.hypotheses:
        if isinstance(h, DecompHyp):
            out.add(h.name)
            for x, e in h.parts:
                out |= all_names(x) | all_names(e)
    for p in d.premises:
        out |= _deriv_names(p)
    return out


def weak_names(d: TypeDerivation, extra) -> TypeDerivation:
    """Extend every judgment's name set (bound generator names are renamed
    apart when they clash with the extension)."""
    extra = frozenset(extra) - d.judgment.names
    if not extra:
        return d
    j = d.judgment
    jj = TypeJudgment(j.context, j.names | extra, j.exponent, j.term,
                      j.label, j.type)
    if d.rule == "Rnu":
        from .syntax import rename_bool_name
        p = d.premises[0]
        bound_set = p.judgment.names - j.names
        bound = next(iter(bound_set)) if bound_set else d.judgment.term.name
        dec = _decomp_of(d, ())
        if bound in extra:
            fresh = fresh_name(bound, _deriv_names(p) | extra)
            p = rename_name_in_derivation(p, bound, fresh)
            dec = DecompHyp(fresh, tuple((rename_bool_name(x, bound, fresh),
                                          rename_bool_name(e, bound, fresh))
                                         for x, e in dec.parts))
        return TypeDerivation("Rnu", jj, (weak_names(p, extra),),
                              (dec, RateHyp(_rate_of(d))))
    return TypeDerivation(d.rule, jj,
                          tuple(weak_names(p, extra) for p in d.premises),
                          d.hypotheses)


# ---------------------------------------------------------------------------
# Substitution lemma (beta transport core)
# ---------------------------------------------------------------------------

def betasub(dt: TypeDerivation, x: str, du: TypeDerivation) -> TypeDerivation:
    """From  G, x : C[s] sig |- t : b |> tau   and   G |- u : c |> sig
    (argument exponent s), build  G |- t[u/x] : b & c |> tau  at the same
    exponent."""
    j = dt.judgment
    if x not in dict(j.context):
        # x unused here: drop it and conjoin the argument label anyway
        ctx = tuple((v, qt) for v, qt in j.context if v != x)
        jj = TypeJudgment(ctx, j.names, j.exponent, j.term,
                          BAnd(j.label, du.judgment.label), j.type)
        return TypeDerivation(dt.rule, jj,
                              tuple(betasub(p, x, du) for p in dt.premises)
                              if dt.rule != "Rbot" else (),
                              dt.hypotheses)
    qual = dict(j.context)[x]
    c = du.judgment.label
    ctx = tuple((v, qt) for v, qt in j.context if v != x)
    new_label = BAnd(j.label, c)

    if dt.rule == "Rbot":
        return mk_rbot(ctx, j.names, j.exponent, subst(j.term, x, du.judgment.term),
                       new_label, j.type)
    if dt.rule == "Rid":
        y = j.term.ident
        if y == x:
            base = scale(du, _rate_of(dt))
            return weaken(base, new_label)
        return TypeDerivation(
            "Rid", TypeJudgment(ctx, j.names, j.exponent, j.term, new_label, j.type),
            (), dt.hypotheses)
    if dt.rule == "Runion":
        return mk_runion(betasub(dt.premises[0], x, du),
                         betasub(dt.premises[1], x, du), new_label)
    if dt.rule == "Rlam":
        y = j.term.ident
        p = dt.premises[0]
        if y in free_vars(du.judgment.term) or y == x:
            from .syntax import all_vars
            fresh = fresh_name(y, all_vars(du.judgment.term)
                               | all_vars(j.term) | {x}
                               | {v for v, _ in j.context})
            p = rename_var_in_derivation(p, y, fresh)
            y = fresh
        return mk_rlam(betasub(p, x, du), y)
    if dt.rule == "Rapp":
        return mk_rapp(betasub(dt.premises[0], x, du),
                       betasub(dt.premises[1], x, du), new_label)
    if dt.rule in ("RplusL", "RplusR"):
        p = betasub(dt.premises[0], x, du)
        side = "l" if dt.rule == "RplusL" else "r"
        other = j.term.right if side == "l" else j.term.left
        other = subst(other, x, du.judgment.term)
        return mk_rplus(p, side, other, j.term.name, j.term.index, new_label)
    if dt.rule == "Rnu":
        p0 = dt.premises[0]
        bound_set = p0.judgment.names - j.names
        bound = next(iter(bound_set)) if bound_set else j.term.name
        du2 = weak_names(du, {bound})
        p = betasub(p0, x, du2)
        dec = _decomp_of(dt, ())
        parts = tuple((ci, BAnd(ei, c)) for ci, ei in dec.parts)
        return mk_rnu(p, bound, parts, _rate_of(dt), new_label)
    raise TransportError(f"betasub: unsupported rule {dt.rule}")


# ---------------------------------------------------------------------------
# Generator elimination (the vacuous-nu transport)
# ---------------------------------------------------------------------------

def nota(d: TypeDerivation, a: str, parts, s: Rational) -> TypeDerivation:
    """From  G |-^{X+a, r} t : b |> sig  with a not free in t, a recorded
    weak a-decomposition of b, and s in [0,1], build
    G |-^{X, r*s} t : V d_i |> sig."""
    j = d.judgment
    if a not in j.names:
        raise TransportError("nota: name not in the judgment name set")
    if a in free_names(j.term):
        raise TransportError("nota: name occurs free in the subject")
    names = j.names - {a}
    target_label = big_or(e for _, e in parts)

    if d.rule == "Rbot":
        return mk_rbot(j.context, names, j.exponent * s, j.term,
                       target_label, j.type)
    if d.rule == "Rid":
        return TypeDerivation(
            "Rid", TypeJudgment(j.context, names, j.exponent * s, j.term,
                                target_label, j.type),
            (), (RateHyp(_rate_of(d) * s),))
    if d.rule == "Runion":
        outs = []
        for p in d.premises:
            sub_parts = weak_a_decompose(p.judgment.label, a, names).parts
            outs.append(nota(p, a, sub_parts, s))
        return mk_runion(outs[0], outs[1], target_label)
    if d.rule == "Rlam":
        p = nota(d.premises[0], a, parts, s)
        return mk_rlam(p, j.term.ident)
    if d.rule == "Rapp":
        pf, pa = d.premises
        pf2 = nota(pf, a, weak_a_decompose(pf.judgment.label, a, names).parts, s)
        pa2 = nota(pa, a, weak_a_decompose(pa.judgment.label, a, names).parts,
                   Fraction(1))
        return mk_rapp(pf2, pa2, target_label)
    if d.rule in ("RplusL", "RplusR"):
        p = d.premises[0]
        p2 = nota(p, a, weak_a_decompose(p.judgment.label, a, names).parts, s)
        side = "l" if d.rule == "RplusL" else "r"
        other = j.term.right if side == "l" else j.term.left
        return mk_rplus(p2, side, other, j.term.name, j.term.index, target_label)
    if d.rule == "Rnu":
        p0 = d.premises[0]
        bound_set = p0.judgment.names - j.names
        bound = next(iter(bound_set)) if bound_set else j.term.name
        inner_dec = _decomp_of(d, ())
        rate = _rate_of(d)
        # refine each context part of the inner decomposition along a
        big_parts = []
        nu_parts = []
        for fu, eu in inner_dec.parts:
            sub = weak_a_decompose(eu, a, j.names - {a})
            for cuj, euj in sub.parts:
                big_parts.append((cuj, BAnd(fu, euj)))
                nu_parts.append((fu, euj))
        p2 = nota(p0, a, tuple(big_parts), s)
        return mk_rnu(p2, bound, tuple(nu_parts), rate, target_label)
    raise TransportError(f"nota: unsupported rule {d.rule}")


# ---------------------------------------------------------------------------
# Reduction steps on subjects
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RedStep:
    kind: str                    # beta | perm
    path: tuple = ()


def apply_step(t: Term, step: RedStep):
    """The reduct of one step, or None when the step does not apply."""

    def go(u: Term, path, env):
        if not path:
            if step.kind == "beta":
                if isinstance(u, App) and isinstance(u.fn, Lam):
                    return subst(u.fn.body, u.fn.ident, u.arg)
                return None
            return _root_perm(u, env)
        i, rest = path[0], path[1:]
        if isinstance(u, Lam) and i == 0:
            s = go(u.body, rest, env)
            return Lam(u.ident, s) if s is not None else None
        if isinstance(u, App) and i in (0, 1):
            s = go(u.fn if i == 0 else u.arg, rest, env)
            if s is None:
                return None
            return App(s, u.arg) if i == 0 else App(u.fn, s)
        if isinstance(u, Choice) and i in (0, 1):
            s = go(u.left if i == 0 else u.right, rest, env)
            if s is None:
                return None
            if i == 0:
                return Choice(s, u.right, u.name, u.index)
            return Choice(u.left, s, u.name, u.index)
        if isinstance(u, Nu) and i == 0:
            s = go(u.body, rest, env + (u.name,))
            return Nu(u.name, s) if s is not None else None
        return None

    return go(t, step.path, ())


# ---------------------------------------------------------------------------
# Subject reduction transport
# ---------------------------------------------------------------------------

def transport_derivation(d: TypeDerivation,
                         step: Optional[RedStep]) -> TypeDerivation:
    """A derivation of the same judgment for the one-step reduct of the
    subject, built by the constructive subject-reduction transformations.
    A None step is the zero-step transport: the derivation itself."""
    check_type_derivation(d)
    if step is None:
        return d
    if apply_step(d.judgment.term, step) is None:
        raise TransportError("step does not apply to the subject")
    return _transport(d, step.path, step.kind, ())


def _retype(j: TypeJudgment, term: Term) -> TypeJudgment:
    return TypeJudgment(j.context, j.names, j.exponent, term, j.label, j.type)


def _try_rbot(d: TypeDerivation, term: Term) -> TypeDerivation:
    j = d.judgment
    if not (entails(j.label, BOT) or j.exponent == 0):
        raise TransportError("dead-branch rebuild needs a refuting label or exponent 0")
    return mk_rbot(j.context, j.names, j.exponent, term, j.label, j.type)


def _apply_at(t: Term, path, kind, env):
    if not path:
        if kind == "beta":
            if isinstance(t, App) and isinstance(t.fn, Lam):
                return subst(t.fn.body, t.fn.ident, t.arg)
            return None
        return _root_perm(t, env)
    i, rest = path[0], path[1:]
    if isinstance(t, Lam) and i == 0:
        s = _apply_at(t.body, rest, kind, env)
        return Lam(t.ident, s) if s is not None else None
    if isinstance(t, App) and i in (0, 1):
        s = _apply_at(t.fn if i == 0 else t.arg, rest, kind, env)
        if s is None:
            return None
        return App(s, t.arg) if i == 0 else App(t.fn, s)
    if isinstance(t, Choice) and i in (0, 1):
        s = _apply_at(t.left if i == 0 else t.right, rest, kind, env)
        if s is None:
            return None
        if i == 0:
            return Choice(s, t.right, t.name, t.index)
        return Choice(t.left, s, t.name, t.index)
    if isinstance(t, Nu) and i == 0:
        s = _apply_at(t.body, rest, kind, env + (t.name,))
        return Nu(t.name, s) if s is not None else None
    return None


def _transport(d: TypeDerivation, path, kind, env) -> TypeDerivation:
    j = d.judgment
    t = j.term
    reduct = _apply_at(t, path, kind, env)
    if reduct is None:
        raise TransportError("step does not apply at the given position")

    # generic wrappers: a bottom node retypes anything, a union node
    # transports branchwise
    if d.rule == "Rbot":
        return mk_rbot(j.context, j.names, j.exponent, reduct, j.label, j.type)
    if d.rule == "Runion":
        return mk_runion(_transport(d.premises[0], path, kind, env),
                         _transport(d.premises[1], path, kind, env), j.label)

    if path:
        i, rest = path[0], path[1:]
        if d.rule == "Rlam":
            return TypeDerivation("Rlam", _retype(j, reduct),
                                  (_transport(d.premises[0], rest, kind, env),),
                                  d.hypotheses)
        if d.rule == "Rapp":
            pf, pa = d.premises
            if i == 0:
                return TypeDerivation("Rapp", _retype(j, reduct),
                                      (_transport(pf, rest, kind, env), pa),
                                      d.hypotheses)
            return TypeDerivation("Rapp", _retype(j, reduct),
                                  (pf, _transport(pa, rest, kind, env)),
                                  d.hypotheses)
        if d.rule in ("RplusL", "RplusR"):
            active = 0 if d.rule == "RplusL" else 1
            if i == active:
                return TypeDerivation(d.rule, _retype(j, reduct),
                                      (_transport(d.premises[0], rest, kind, env),),
                                      d.hypotheses)
            return TypeDerivation(d.rule, _retype(j, reduct), d.premises,
                                  d.hypotheses)
        if d.rule == "Rnu":
            p = d.premises[0]
            bound_set = p.judgment.names - j.names
            bound = next(iter(bound_set)) if bound_set else t.name
            # a renamed premise body is structurally identical, so the
            # step path transfers unchanged
            return TypeDerivation("Rnu", _retype(j, reduct),
                                  (_transport(p, rest, kind, env + (bound,)),),
                                  d.hypotheses)
        raise TransportError(f"no congruence into rule {d.rule}")

    if kind == "beta":
        return _transport_beta_root(d, reduct, env)
    return _transport_perm_root(d, reduct, env)


def _transport_beta_root(d: TypeDerivation, reduct: Term, env) -> TypeDerivation:
    j = d.judgment
    if d.rule != "Rapp":
        raise TransportError(f"beta redex typed by {d.rule}")
    pf, pa = d.premises
    if pf.rule == "Rbot":
        return _try_rbot(d, reduct)
    if pf.rule == "Runion":
        f1, f2 = pf.premises
        d1 = mk_rapp(f1, pa, BAnd(f1.judgment.label, pa.judgment.label))
        d2 = mk_rapp(f2, pa, BAnd(f2.judgment.label, pa.judgment.label))
        return mk_runion(_transport_beta_root(d1, reduct, env),
                         _transport_beta_root(d2, reduct, env), j.label)
    if pf.rule != "Rlam":
        raise TransportError(f"beta redex function typed by {pf.rule}")
    out = betasub(pf.premises[0], pf.judgment.term.ident, pa)
    return weaken(out, j.label)


def _transport_perm_root(d: TypeDerivation, reduct: Term, env) -> TypeDerivation:
    j = d.judgment
    t = j.term
    rule = d.rule

    if d.rule == "Rbot":
        return _try_rbot(d, reduct)
    if d.rule == "Runion":
        return mk_runion(_transport_perm_root(d.premises[0], reduct, env),
                         _transport_perm_root(d.premises[1], reduct, env),
                         j.label)

    # -- choice-rooted subjects ---------------------------------------------
    if isinstance(t, Choice):
        a, i = t.name, t.index
        l, r = t.left, t.right
        lit = BVar(i, a)
        if rule not in ("RplusL", "RplusR"):
            raise TransportError(f"choice subject typed by {rule}")
        p = d.premises[0]

        if l == r and reduct == l:
            return weaken(p, j.label)

        left_absorb = (isinstance(l, Choice) and l.name == a and l.index == i
                       and reduct == Choice(l.left, r, a, i))
        right_absorb = (isinstance(r, Choice) and r.name == a and r.index == i
                        and reduct == Choice(l, r.right, a, i))
        left_swap = (not left_absorb and not right_absorb
                     and isinstance(l, Choice)
                     and _outranks(l.name, l.index, a, i, env))
        right_swap = (not left_absorb and not right_absorb and not left_swap
                      and isinstance(r, Choice)
                      and _outranks(r.name, r.index, a, i, env))

        if left_absorb:
            if rule == "RplusL":
                if p.rule == "Rbot":
                    return _try_rbot(d, reduct)
                if p.rule == "Runion":
                    q1 = mk_rplus(p.premises[0], "l", r, a, i,
                                  BAnd(lit, p.premises[0].judgment.label))
                    q2 = mk_rplus(p.premises[1], "l", r, a, i,
                                  BAnd(lit, p.premises[1].judgment.label))
                    return mk_runion(_transport_perm_root(q1, reduct, env),
                                     _transport_perm_root(q2, reduct, env), j.label)
                if p.rule == "RplusL":
                    return mk_rplus(p.premises[0], "l", r, a, i, j.label)
                if p.rule == "RplusR":
                    return _try_rbot(d, reduct)   # label entails x & ~x
                raise TransportError(f"absorption under {p.rule}")
            return mk_rplus(p, "r", l.left, a, i, j.label)

        if right_absorb:
            if rule == "RplusR":
                if p.rule == "Rbot":
                    return _try_rbot(d, reduct)
                if p.rule == "Runion":
                    q1 = mk_rplus(p.premises[0], "r", l, a, i,
                                  BAnd(BNeg(lit), p.premises[0].judgment.label))
                    q2 = mk_rplus(p.premises[1], "r", l, a, i,
                                  BAnd(BNeg(lit), p.premises[1].judgment.label))
                    return mk_runion(_transport_perm_root(q1, reduct, env),
                                     _transport_perm_root(q2, reduct, env), j.label)
                if p.rule == "RplusR":
                    return mk_rplus(p.premises[0], "r", l, a, i, j.label)
                if p.rule == "RplusL":
                    return _try_rbot(d, reduct)
                raise TransportError(f"absorption under {p.rule}")
            return mk_rplus(p, "l", r.right, a, i, j.label)

        if left_swap or right_swap:
            inner_choice = l if left_swap else r
            b2, j2 = inner_choice.name, inner_choice.index
            lit2 = BVar(j2, b2)
            passive_types_inner = (rule == "RplusL") == left_swap
            if passive_types_inner:
                # the premise types the inner choice; unwrap its last rule
                if p.rule == "Rbot":
                    return _try_rbot(d, reduct)
                if p.rule == "Runion":
                    side = "l" if rule == "RplusL" else "r"
                    other = r if rule == "RplusL" else l
                    q1 = mk_rplus(p.premises[0], side, other, a, i,
                                  BAnd(lit if side == "l" else BNeg(lit),
                                       p.premises[0].judgment.label))
                    q2 = mk_rplus(p.premises[1], side, other, a, i,
                                  BAnd(lit if side == "l" else BNeg(lit),
                                       p.premises[1].judgment.label))
                    return mk_runion(_transport_perm_root(q1, reduct, env),
                                     _transport_perm_root(q2, reduct, env), j.label)
                if p.rule not in ("RplusL", "RplusR"):
                    raise TransportError(f"swap under {p.rule}")
                inner_prem = p.premises[0]
                outer_side = "l" if rule == "RplusL" else "r"
                outer_other = r if left_swap else l
                mid_label = BAnd(lit if outer_side == "l" else BNeg(lit),
                                 inner_prem.judgment.label)
                mid = mk_rplus(inner_prem, outer_side, outer_other, a, i, mid_label)
                if p.rule == "RplusL":
                    return mk_rplus(mid, "l", reduct.right, b2, j2, j.label)
                return mk_rplus(mid, "r", reduct.left, b2, j2, j.label)
            # the premise types the passive operand occurring in both
            # reduct branches: split on the new root literal
            pas_side = "r" if rule == "RplusR" else "l"
            pas_lit = BNeg(lit) if rule == "RplusR" else lit
            base_label = BAnd(pas_lit, p.judgment.label)
            if pas_side == "l":
                branch1 = mk_rplus(p, "l", reduct.left.right, a, i, base_label)
                branch2 = mk_rplus(p, "l", reduct.right.right, a, i, base_label)
            else:
                branch1 = mk_rplus(p, "r", reduct.left.left, a, i, base_label)
                branch2 = mk_rplus(p, "r", reduct.right.left, a, i, base_label)
            full1 = mk_rplus(branch1, "l", reduct.right, b2, j2,
                             BAnd(lit2, base_label))
            full2 = mk_rplus(branch2, "r", reduct.left, b2, j2,
                             BAnd(BNeg(lit2), base_label))
            return mk_runion(full1, full2, j.label)
        raise TransportError("unrecognized choice step")

    # -- lambda-rooted subjects -----------------------------------------------
    if isinstance(t, Lam):
        if rule != "Rlam":
            raise TransportError(f"lambda subject typed by {rule}")
        p = d.premises[0]
        x = t.ident
        if isinstance(t.body, Choice):
            c = t.body
            if p.rule == "Rbot":
                return _try_rbot(d, reduct)
            if p.rule == "Runion":
                return mk_runion(
                    _transport_perm_root(mk_rlam(p.premises[0], x), reduct, env),
                    _transport_perm_root(mk_rlam(p.premises[1], x), reduct, env),
                    j.label)
            if p.rule in ("RplusL", "RplusR"):
                side = "l" if p.rule == "RplusL" else "r"
                lam_inner = mk_rlam(p.premises[0], x)
                other = Lam(x, c.right if side == "l" else c.left)
                return mk_rplus(lam_inner, side, other, c.name, c.index, j.label)
            raise TransportError(f"lambda-over-choice under {p.rule}")
        if isinstance(t.body, Nu):
            if p.rule == "Rbot":
                return _try_rbot(d, reduct)
            if p.rule == "Runion":
                return mk_runion(
                    _transport_perm_root(mk_rlam(p.premises[0], x), reduct, env),
                    _transport_perm_root(mk_rlam(p.premises[1], x), reduct, env),
                    j.label)
            if p.rule != "Rnu":
                raise TransportError(f"lambda-over-nu under {p.rule}")
            inner = p.premises[0]
            bound_set = inner.judgment.names - p.judgment.names
            bound = next(iter(bound_set)) if bound_set else t.body.name
            lam_inner = mk_rlam(inner, x)
            return mk_rnu(lam_inner, bound, _decomp_of(p, ()).parts,
                          _rate_of(p), j.label)
        raise TransportError("unrecognized lambda step")

    # -- application-rooted subjects --------------------------------------------
    if isinstance(t, App):
        if rule != "Rapp":
            raise TransportError(f"application subject typed by {rule}")
        pf, pa = d.premises
        if isinstance(t.fn, Choice):
            if pf.rule == "Rbot":
                return _try_rbot(d, reduct)
            if pf.rule == "Runion":
                q1 = mk_rapp(pf.premises[0], pa,
                             BAnd(pf.premises[0].judgment.label, pa.judgment.label))
                q2 = mk_rapp(pf.premises[1], pa,
                             BAnd(pf.premises[1].judgment.label, pa.judgment.label))
                return mk_runion(_transport_perm_root(q1, reduct, env),
                                 _transport_perm_root(q2, reduct, env), j.label)
            if pf.rule in ("RplusL", "RplusR"):
                c = t.fn
                side = "l" if pf.rule == "RplusL" else "r"
                app_inner = mk_rapp(pf.premises[0], pa,
                                    BAnd(pf.premises[0].judgment.label,
                                         pa.judgment.label))
                other = App(c.right if side == "l" else c.left, t.arg)
                return mk_rplus(app_inner, side, other, c.name, c.index, j.label)
            raise TransportError(f"choice-function application under {pf.rule}")
        if isinstance(t.fn, Nu):
            if pf.rule == "Rbot":
                return _try_rbot(d, reduct)
            if pf.rule == "Runion":
                q1 = mk_rapp(pf.premises[0], pa,
                             BAnd(pf.premises[0].judgment.label, pa.judgment.label))
                q2 = mk_rapp(pf.premises[1], pa,
                             BAnd(pf.premises[1].judgment.label, pa.judgment.label))
                return mk_runion(_transport_perm_root(q1, reduct, env),
                                 _transport_perm_root(q2, reduct, env), j.label)
            if pf.rule != "Rnu":
                raise TransportError(f"nu-function application under {pf.rule}")
            inner = pf.premises[0]
            bound_set = inner.judgment.names - pf.judgment.names
            bound = next(iter(bound_set)) if bound_set else t.fn.name
            pa_lift = weak_names(pa, {bound})
            dec = _decomp_of(pf, ())
            app_inner = mk_rapp(inner, pa_lift,
                                BAnd(inner.judgment.label, pa_lift.judgment.label))
            parts = tuple((ci, BAnd(ei, pa.judgment.label)) for ci, ei in dec.parts)
            return mk_rnu(app_inner, bound, parts, _rate_of(pf), j.label)
        if isinstance(t.arg, Choice):
            if pa.rule == "Rbot":
                return _try_rbot(d, reduct)
            if pa.rule == "Runion":
                q1 = mk_rapp(pf, pa.premises[0],
                             BAnd(pf.judgment.label, pa.premises[0].judgment.label))
                q2 = mk_rapp(pf, pa.premises[1],
                             BAnd(pf.judgment.label, pa.premises[1].judgment.label))
                return mk_runion(_transport_perm_root(q1, reduct, env),
                                 _transport_perm_root(q2, reduct, env), j.label)
            if pa.rule in ("RplusL", "RplusR"):
                c = t.arg
                side = "l" if pa.rule == "RplusL" else "r"
                app_inner = mk_rapp(pf, pa.premises[0],
                                    BAnd(pf.judgment.label,
                                         pa.premises[0].judgment.label))
                other = App(t.fn, c.right if side == "l" else c.left)
                return mk_rplus(app_inner, side, other, c.name, c.index, j.label)
            raise TransportError(f"choice-argument application under {pa.rule}")
        raise TransportError("unrecognized application step")

    # -- generator-rooted subjects -------------------------------------------
    if isinstance(t, Nu):
        if rule != "Rnu":
            raise TransportError(f"generator subject typed by {rule}")
        p = d.premises[0]
        bound_set = p.judgment.names - j.names
        bound = next(iter(bound_set)) if bound_set else t.name
        if bound not in free_names(p.judgment.term):
            out = nota(p, bound, _decomp_of(d, ()).parts, _rate_of(d))
            return weaken(out, j.label)
        if isinstance(t.body, Choice) and t.body.name != t.name:
            if p.rule == "Rbot":
                return _try_rbot(d, reduct)
            if p.rule not in ("RplusL", "RplusR"):
                raise TransportError(f"generator-over-choice under {p.rule}")
            c = p.judgment.term
            inner = p.premises[0]
            dec = _decomp_of(d, ())
            full = big_or(BAnd(ci, ei) for ci, ei in dec.parts)
            inner_w = weaken(inner, full)
            nu_node = mk_rnu(inner_w, bound, dec.parts, _rate_of(d), j.label)
            side = "l" if p.rule == "RplusL" else "r"
            other_body = c.right if side == "l" else c.left
            other = Nu(bound, other_body)
            return mk_rplus(nu_node, side, other, c.name, c.index, j.label)
        raise TransportError("unrecognized generator step")

    raise TransportError("unrecognized root step")


# ---------------------------------------------------------------------------
# Inference for the annotated syntax-directed fragment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Annotations:
    """Non-syntax-directed data: per-lambda argument qualifiers and
    per-generator target rates, keyed by the binder's path in the term
    (0 = body/function/left, 1 = argument/right)."""
    lam: dict = None
    nu: dict = None

    def __post_init__(self):
        object.__setattr__(self, "lam", dict(self.lam or {}))
        object.__setattr__(self, "nu", dict(self.nu or {}))


def infer(context, t: Term, names, annotations: Optional[Annotations] = None
          ) -> Optional[TypeDerivation]:
    """Best-effort derivation for the annotated syntax-directed fragment
    (no union introductions); None when the fragment heuristic fails.
    Unannotated choice-free closed terms fall back to plain simple-type
    inference with every qualifier and exponent equal to 1."""
    ann = annotations or Annotations()
    if not ann.lam and not ann.nu and not context and not _has_choice(t):
        d = _infer_simple(t)
        if d is not None:
            return d
    try:
        return _infer(tuple(context), t, frozenset(names), ann, ())
    except _InferFail:
        return None


class _InferFail(Exception):
    pass


def _has_choice(t: Term) -> bool:
    if isinstance(t, (Choice, Nu)):
        return True
    if isinstance(t, Lam):
        return _has_choice(t.body)
    if isinstance(t, App):
        return _has_choice(t.fn) or _has_choice(t.arg)
    return False


def _infer(ctx, t, names, ann, path):
    if isinstance(t, Var):
        if t.ident not in dict(ctx):
            raise _InferFail
        qual = dict(ctx)[t.ident]
        return mk_rid(ctx, names, t.ident, TOP, qual.type)
    if isinstance(t, Lam):
        qual = ann.lam.get(path)
        if qual is None:
            raise _InferFail
        inner = tuple(kv for kv in ctx if kv[0] != t.ident) + ((t.ident, qual),)
        p = _infer(inner, t.body, names, ann, path + (0,))
        return mk_rlam(p, t.ident)
    if isinstance(t, App):
        pf = _infer(ctx, t.fn, names, ann, path + (0,))
        if not isinstance(pf.judgment.type, Arrow):
            raise _InferFail
        want = pf.judgment.type.arg
        if want.q == 0:
            pa = mk_rbot(ctx, names, Fraction(0), t.arg, TOP, want.type)
        else:
            pa = _infer(ctx, t.arg, names, ann, path + (1,))
            if pa.judgment.type != want.type:
                raise _InferFail
            if pa.judgment.exponent != want.q:
                if pa.judgment.exponent < want.q:
                    raise _InferFail
                pa = scale(pa, want.q / pa.judgment.exponent)
        return mk_rapp(pf, pa, BAnd(pf.judgment.label, pa.judgment.label))
    if isinstance(t, Choice):
        if t.name not in names:
            raise _InferFail
        p = _infer(ctx, t.left, names, ann, path + (0,))
        return mk_rplus(p, "l", t.right, t.name, t.index,
                        BAnd(BVar(t.index, t.name), p.judgment.label))
    if isinstance(t, Nu):
        rate = ann.nu.get(path)
        if rate is None:
            raise _InferFail
        bound = t.name
        body = t.body
        if bound in names:
            from .syntax import all_names
            bound = fresh_name(bound, names | all_names(body))
            body = rename_term_name(body, t.name, bound)
        p = _infer(ctx, body, names | {bound}, ann, path + (0,))
        dec = weak_a_decompose(p.judgment.label, bound, names)
        if any(measure(ci) < rate for ci, _ in dec.parts):
            raise _InferFail
        label = big_or(e for _, e in dec.parts)
        return mk_rnu(p, bound, dec.parts, rate, label)
    raise _InferFail


# -- simple-type fallback ----------------------------------------------------

class _TVar:
    _n = 0

    def __init__(self):
        _TVar._n += 1
        self.id = _TVar._n
        self.ref = None


def _resolve(ty):
    while isinstance(ty, _TVar) and ty.ref is not None:
        ty = ty.ref
    return ty


def _unify(x, y):
    x, y = _resolve(x), _resolve(y)
    if x is y:
        return
    if isinstance(x, _TVar):
        if _occurs(x, y):
            raise _InferFail
        x.ref = y
        return
    if isinstance(y, _TVar):
        _unify(y, x)
        return
    if isinstance(x, Base) and isinstance(y, Base):
        return
    if isinstance(x, tuple) and isinstance(y, tuple):
        _unify(x[0], y[0])
        _unify(x[1], y[1])
        return
    raise _InferFail


def _occurs(v, ty):
    ty = _resolve(ty)
    if ty is v:
        return True
    if isinstance(ty, tuple):
        return _occurs(v, ty[0]) or _occurs(v, ty[1])
    return False


def _freeze(ty) -> SimpleType:
    ty = _resolve(ty)
    if isinstance(ty, _TVar):
        return O
    if isinstance(ty, Base):
        return O
    return Arrow(QualType(Fraction(1), _freeze(ty[0])), _freeze(ty[1]))


def _infer_simple(t: Term) -> Optional[TypeDerivation]:
    """Simply-typed inference (exponent 1 everywhere) for closed terms
    without choices or generators."""
    if free_vars(t) or _has_choice(t):
        return None
    binder_types: Dict[int, object] = {}

    def assign(u, env):
        if isinstance(u, Var):
            return env[u.ident]
        if isinstance(u, Lam):
            v = _TVar()
            binder_types[id(u)] = v
            return (v, assign(u.body, {**env, u.ident: v}))
        if isinstance(u, App):
            f = assign(u.fn, env)
            a = assign(u.arg, env)
            res = _TVar()
            _unify(f, (a, res))
            return res
        raise _InferFail

    def build(u, ctx):
        if isinstance(u, Var):
            return mk_rid(ctx, frozenset(), u.ident, TOP, dict(ctx)[u.ident].type)
        if isinstance(u, Lam):
            qual = QualType(Fraction(1), _freeze(binder_types[id(u)]))
            inner = tuple(kv for kv in ctx if kv[0] != u.ident) + ((u.ident, qual),)
            return mk_rlam(build(u.body, inner), u.ident)
        if isinstance(u, App):
            pf = build(u.fn, ctx)
            pa = build(u.arg, ctx)
            if not isinstance(pf.judgment.type, Arrow) \
                    or pf.judgment.type.arg.type != pa.judgment.type:
                raise _InferFail
            return mk_rapp(pf, pa, TOP)
        raise _InferFail

    try:
        assign(t, {})
        return build(t, ())
    except _InferFail:
        return None


# ---------------------------------------------------------------------------
# Translation into the logic
# ---------------------------------------------------------------------------

TRANSLATION_NAME = "cw"


def flip_formula(name: str = TRANSLATION_NAME) -> Formula:
    """The closed, classically provable coin formula."""
    return CQ(Fraction(1), name, Or(Atom(0, name), Neg(Atom(0, name))))


def translate_type(sig: SimpleType, name: str = TRANSLATION_NAME) -> Formula:
    """The formula image of a simple type (always a closed, valid formula)."""
    if isinstance(sig, Base):
        return flip_formula(name)
    if isinstance(sig, Arrow):
        return Or(Neg(translate_qual(sig.arg, name)), translate_type(sig.result, name))
    raise TypeError(sig)


def translate_qual(qt: QualType, name: str = TRANSLATION_NAME) -> Formula:
    return CQ(qt.q, name, translate_type(qt.type, name))


def translate_judgment(j: TypeJudgment) -> Sequent:
    """The multi-succedent sequent image of a typing judgment: the label
    must lead into the exponent-quantified type image, while each context
    qualifier image is stated refutable."""
    fresh = fresh_name(TRANSLATION_NAME, j.names)
    members = [LabelledFormula(j.label, INTO,
                               CQ(j.exponent, fresh, translate_type(j.type, fresh)))]
    for _, qt in j.context:
        members.append(LabelledFormula(BOT, FROM, translate_qual(qt, fresh)))
    return Sequent(j.names | {fresh}, members)
