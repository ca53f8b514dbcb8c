"""Core abstract syntax shared by every other module.

Formulas carry named atoms `p(i,a)` and counting quantifiers C[q]{a} /
D[q]{a}; Boolean label formulas carry named variables `x(i,a)`.  The
univariate fragment is just the sub-language where every atom and
quantifier uses one fixed reserved name (see RESERVED_NAME).

All values are immutable after construction.  Equality on Formula and
BoolFormula is literal; equality on Term is alpha-insensitive for both
lambda and nu binders.  Rationals are `fractions.Fraction`, so every
arithmetic result is exact and in lowest terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Fraction

# Name of the single counting variable of the univariate fragment.
RESERVED_NAME = "a"


def check_unit(q: Rational, what: str = "quantifier exponent") -> Rational:
    q = Fraction(q)
    if not (0 <= q <= 1):
        raise ValueError(f"{what} {q} outside [0,1]")
    return q


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """A name not in `avoid`, derived from `base` by numeric suffixing."""
    avoid = set(avoid)
    if base not in avoid:
        return base
    root = base.rstrip("0123456789") or base
    i = 1
    while f"{root}{i}" in avoid:
        i += 1
    return f"{root}{i}"


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    index: int
    name: str


@dataclass(frozen=True)
class Neg:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class CQ:
    q: Rational
    name: str
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "q", check_unit(self.q))


@dataclass(frozen=True)
class DQ:
    q: Rational
    name: str
    body: "Formula"

    def __post_init__(self):
        object.__setattr__(self, "q", check_unit(self.q))


Formula = Union[Atom, Neg, And, Or, CQ, DQ]


# ---------------------------------------------------------------------------
# Boolean label formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BVar:
    index: int
    name: str


@dataclass(frozen=True)
class BTop:
    pass


@dataclass(frozen=True)
class BBot:
    pass


@dataclass(frozen=True)
class BNeg:
    body: "BoolFormula"


@dataclass(frozen=True)
class BAnd:
    left: "BoolFormula"
    right: "BoolFormula"


@dataclass(frozen=True)
class BOr:
    left: "BoolFormula"
    right: "BoolFormula"


BoolFormula = Union[BVar, BTop, BBot, BNeg, BAnd, BOr]

TOP = BTop()
BOT = BBot()


def big_or(parts: Iterable[BoolFormula]) -> BoolFormula:
    """Left-nested disjunction; the empty disjunction is F."""
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = BOr(out, p)
    return out


def big_and(parts: Iterable[BoolFormula]) -> BoolFormula:
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = BAnd(out, p)
    return out


# ---------------------------------------------------------------------------
# Labelled formulas and sequents
# ---------------------------------------------------------------------------

INTO = ">"    # b |> A  means  [[b]] included in [[A]]
FROM = "<"    # b <| A  means  [[A]] included in [[b]]


@dataclass(frozen=True)
class LabelledFormula:
    label: BoolFormula
    direction: str
    body: Formula

    def __post_init__(self):
        if self.direction not in (INTO, FROM):
            raise ValueError(f"bad direction {self.direction!r}")


@dataclass(frozen=True)
class Sequent:
    names: frozenset
    succedent: tuple

    def __init__(self, names: Iterable[str], succedent: Iterable[LabelledFormula]):
        object.__setattr__(self, "names", frozenset(names))
        object.__setattr__(self, "succedent", tuple(succedent))
        if not self.succedent:
            raise ValueError("sequent needs a non-empty succedent")
        for lf in self.succedent:
            used = free_names(lf.label) | free_names(lf.body)
            if not used <= self.names:
                raise ValueError(
                    f"free names {sorted(used - self.names)} not declared in sequent")

    @property
    def single(self) -> LabelledFormula:
        if len(self.succedent) != 1:
            raise ValueError("multi-succedent sequent where one formula expected")
        return self.succedent[0]


# ---------------------------------------------------------------------------
# Lambda-nu terms
# ---------------------------------------------------------------------------

class _TermBase:
    """Alpha-insensitive equality for both lambda and nu binders."""

    def __eq__(self, other):
        if not isinstance(other, _TermBase):
            return NotImplemented
        return term_key(self) == term_key(other)

    def __hash__(self):
        return hash(term_key(self))


@dataclass(frozen=True, eq=False)
class Var(_TermBase):
    ident: str


@dataclass(frozen=True, eq=False)
class Lam(_TermBase):
    ident: str
    body: "Term"


@dataclass(frozen=True, eq=False)
class App(_TermBase):
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, eq=False)
class Choice(_TermBase):
    left: "Term"
    right: "Term"
    name: str
    index: int


@dataclass(frozen=True, eq=False)
class Nu(_TermBase):
    name: str
    body: "Term"


Term = Union[Var, Lam, App, Choice, Nu]


def term_key(t: Term, venv=None, nenv=None):
    """Canonical de Bruijn rendering used for equality and hashing."""
    venv = venv or {}
    nenv = nenv or {}
    if isinstance(t, Var):
        return ("v", venv.get(t.ident, ("f", t.ident)))
    if isinstance(t, Lam):
        v2 = dict(venv)
        v2[t.ident] = len(venv)
        return ("lam", term_key(t.body, v2, nenv))
    if isinstance(t, App):
        return ("app", term_key(t.fn, venv, nenv), term_key(t.arg, venv, nenv))
    if isinstance(t, Choice):
        return ("ch", nenv.get(t.name, ("f", t.name)), t.index,
                term_key(t.left, venv, nenv), term_key(t.right, venv, nenv))
    if isinstance(t, Nu):
        n2 = dict(nenv)
        n2[t.name] = len(nenv)
        return ("nu", term_key(t.body, venv, n2))
    raise TypeError(t)


def free_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.ident}
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.ident}
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    if isinstance(t, Choice):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, Nu):
        return free_vars(t.body)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Simple types with counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Base:
    pass


O = Base()


@dataclass(frozen=True)
class QualType:
    q: Rational
    type: "SimpleType"

    def __post_init__(self):
        object.__setattr__(self, "q", check_unit(self.q))


@dataclass(frozen=True)
class Arrow:
    arg: QualType
    result: "SimpleType"


SimpleType = Union[Base, Arrow]


# ---------------------------------------------------------------------------
# Derivations (sequent calculus)
# ---------------------------------------------------------------------------

# External hypothesis records.  The checker re-verifies each of them from
# scratch; nothing recorded here is trusted.

@dataclass(frozen=True)
class EntailHyp:
    left: BoolFormula
    right: BoolFormula


@dataclass(frozen=True)
class MeasureHyp:
    label: BoolFormula
    op: str                      # one of >= < = 0/1 comparisons
    q: Rational


@dataclass(frozen=True)
class DecompHyp:
    name: str
    parts: tuple                 # tuple of (d over {name}, e over context) pairs


@dataclass(frozen=True)
class RateHyp:
    rate: Rational

    def __post_init__(self):
        object.__setattr__(self, "rate", check_unit(self.rate, "rate"))


@dataclass(frozen=True)
class CtxIndexHyp:
    index: int


@dataclass(frozen=True)
class ChoiceHyp:
    name: str
    index: int


Hypothesis = Union[EntailHyp, MeasureHyp, DecompHyp, RateHyp, CtxIndexHyp, ChoiceHyp]


@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    hypotheses: tuple = ()

    def __init__(self, rule, conclusion, premises=(), hypotheses=()):
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "conclusion", conclusion)
        object.__setattr__(self, "premises", tuple(premises))
        object.__setattr__(self, "hypotheses", tuple(hypotheses))


RULE_TAGS = (
    "Ax1", "Ax2", "RU>", "RI<", "RN>", "RN<", "R1O>", "R2O>", "RO<",
    "RA>", "R1A<", "R2A<", "RM>", "RM<", "RC>", "RC<", "RD>", "RD<", "Cut",
)


# ---------------------------------------------------------------------------
# Type derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeJudgment:
    context: tuple               # tuple of (ident, QualType), idents distinct
    names: frozenset
    exponent: Rational
    term: Term
    label: BoolFormula
    type: SimpleType

    def __init__(self, context, names, exponent, term, label, type):
        context = tuple(context)
        idents = [x for x, _ in context]
        if len(set(idents)) != len(idents):
            raise ValueError("duplicate variable in context")
        object.__setattr__(self, "context", context)
        object.__setattr__(self, "names", frozenset(names))
        object.__setattr__(self, "exponent", check_unit(exponent, "exponent"))
        object.__setattr__(self, "term", term)
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "type", type)


@dataclass(frozen=True)
class TypeDerivation:
    rule: str
    judgment: TypeJudgment
    premises: tuple = ()
    hypotheses: tuple = ()

    def __init__(self, rule, judgment, premises=(), hypotheses=()):
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "judgment", judgment)
        object.__setattr__(self, "premises", tuple(premises))
        object.__setattr__(self, "hypotheses", tuple(hypotheses))


TYPE_RULE_TAGS = ("Rbot", "Rid", "Runion", "Rlam", "Rapp", "RplusL", "RplusR", "Rnu")


# ---------------------------------------------------------------------------
# Free names, connective count, bound-name renaming
# ---------------------------------------------------------------------------

def free_names(x) -> set:
    """Names occurring free in a formula, Boolean formula or term."""
    if isinstance(x, Atom):
        return {x.name}
    if isinstance(x, Neg):
        return free_names(x.body)
    if isinstance(x, (And, Or)):
        return free_names(x.left) | free_names(x.right)
    if isinstance(x, (CQ, DQ)):
        return free_names(x.body) - {x.name}
    if isinstance(x, BVar):
        return {x.name}
    if isinstance(x, (BTop, BBot)):
        return set()
    if isinstance(x, BNeg):
        return free_names(x.body)
    if isinstance(x, (BAnd, BOr)):
        return free_names(x.left) | free_names(x.right)
    if isinstance(x, Var):
        return set()
    if isinstance(x, Lam):
        return free_names(x.body)
    if isinstance(x, App):
        return free_names(x.fn) | free_names(x.arg)
    if isinstance(x, Choice):
        return free_names(x.left) | free_names(x.right) | {x.name}
    if isinstance(x, Nu):
        return free_names(x.body) - {x.name}
    raise TypeError(f"free_names: unsupported {type(x).__name__}")


def all_names(x) -> set:
    """Every name occurring in a formula, Boolean formula or term,
    bound or free (capture-avoidance needs both)."""
    if isinstance(x, Atom):
        return {x.name}
    if isinstance(x, Neg):
        return all_names(x.body)
    if isinstance(x, (And, Or)):
        return all_names(x.left) | all_names(x.right)
    if isinstance(x, (CQ, DQ)):
        return all_names(x.body) | {x.name}
    if isinstance(x, BVar):
        return {x.name}
    if isinstance(x, (BTop, BBot)):
        return set()
    if isinstance(x, BNeg):
        return all_names(x.body)
    if isinstance(x, (BAnd, BOr)):
        return all_names(x.left) | all_names(x.right)
    if isinstance(x, Var):
        return set()
    if isinstance(x, Lam):
        return all_names(x.body)
    if isinstance(x, App):
        return all_names(x.fn) | all_names(x.arg)
    if isinstance(x, Choice):
        return all_names(x.left) | all_names(x.right) | {x.name}
    if isinstance(x, Nu):
        return all_names(x.body) | {x.name}
    raise TypeError(f"all_names: unsupported {type(x).__name__}")


def all_vars(t: Term) -> set:
    """Every term variable occurring, bound or free."""
    if isinstance(t, Var):
        return {t.ident}
    if isinstance(t, Lam):
        return all_vars(t.body) | {t.ident}
    if isinstance(t, App):
        return all_vars(t.fn) | all_vars(t.arg)
    if isinstance(t, Choice):
        return all_vars(t.left) | all_vars(t.right)
    if isinstance(t, Nu):
        return all_vars(t.body)
    raise TypeError(t)


def cn_formula(a: Formula) -> int:
    if isinstance(a, Atom):
        return 1
    if isinstance(a, Neg):
        return 1 + cn_formula(a.body)
    if isinstance(a, (And, Or)):
        return 1 + cn_formula(a.left) + cn_formula(a.right)
    if isinstance(a, (CQ, DQ)):
        return 1 + cn_formula(a.body)
    raise TypeError(a)


def cn(lf: LabelledFormula) -> int:
    """Connective count of a labelled formula (labels do not count)."""
    return cn_formula(lf.body)


def rename_free_atom_name(a: Formula, old: str, new: str) -> Formula:
    """Rename free occurrences of name `old` (atoms and quantifier uses)."""
    if isinstance(a, Atom):
        return Atom(a.index, new) if a.name == old else a
    if isinstance(a, Neg):
        return Neg(rename_free_atom_name(a.body, old, new))
    if isinstance(a, And):
        return And(rename_free_atom_name(a.left, old, new),
                   rename_free_atom_name(a.right, old, new))
    if isinstance(a, Or):
        return Or(rename_free_atom_name(a.left, old, new),
                  rename_free_atom_name(a.right, old, new))
    if isinstance(a, (CQ, DQ)):
        cls = type(a)
        if a.name == old:
            return a
        return cls(a.q, a.name, rename_free_atom_name(a.body, old, new))
    raise TypeError(a)


def rename_bool_name(b: BoolFormula, old: str, new: str) -> BoolFormula:
    if isinstance(b, BVar):
        return BVar(b.index, new) if b.name == old else b
    if isinstance(b, (BTop, BBot)):
        return b
    if isinstance(b, BNeg):
        return BNeg(rename_bool_name(b.body, old, new))
    if isinstance(b, BAnd):
        return BAnd(rename_bool_name(b.left, old, new), rename_bool_name(b.right, old, new))
    if isinstance(b, BOr):
        return BOr(rename_bool_name(b.left, old, new), rename_bool_name(b.right, old, new))
    raise TypeError(b)


def alpha_rename_bound(a: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Rename quantifier binders so that no two quantifiers bind the same
    name and none clashes with a free name (or anything in `avoid`)."""
    used = set(avoid) | free_names(a)

    def walk(f: Formula) -> Formula:
        if isinstance(f, Atom):
            return f
        if isinstance(f, Neg):
            return Neg(walk(f.body))
        if isinstance(f, And):
            return And(walk(f.left), walk(f.right))
        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, (CQ, DQ)):
            cls = type(f)
            name = f.name
            body = f.body
            if name in used:
                # fresh also dodges inner binders, so the rename cannot
                # be captured further down
                name = fresh_name(f.name, used | all_names(body))
                body = rename_free_atom_name(body, f.name, name)
            used.add(name)
            return cls(f.q, name, walk(body))
        raise TypeError(f)

    return walk(a)


def quantifier_free(a: Formula) -> bool:
    if isinstance(a, Atom):
        return True
    if isinstance(a, Neg):
        return quantifier_free(a.body)
    if isinstance(a, (And, Or)):
        return quantifier_free(a.left) and quantifier_free(a.right)
    return False


def formula_atoms(a: Formula) -> set:
    """Free (index, name) atom occurrences of a formula."""
    if isinstance(a, Atom):
        return {(a.index, a.name)}
    if isinstance(a, Neg):
        return formula_atoms(a.body)
    if isinstance(a, (And, Or)):
        return formula_atoms(a.left) | formula_atoms(a.right)
    if isinstance(a, (CQ, DQ)):
        return {(i, n) for (i, n) in formula_atoms(a.body) if n != a.name}
    raise TypeError(a)
