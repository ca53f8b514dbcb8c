"""Exact measure semantics for counting formulas.

Everything here is grounded in one exhaustive #SAT oracle over the atoms
that actually occur in a Boolean formula.  The measure of a formula is
satisfying-count / 2^n, which is independent of padding with unused
atoms, so entailment, projection, decomposition and the Bool translation
are all decided exactly with rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .syntax import (
    TOP, BOT, And, Atom, BAnd, BBot, BNeg, BOr, BTop, BVar, CQ, DQ,
    BoolFormula, Formula, LabelledFormula, Neg, Or, Rational, Sequent,
    big_or, free_names, fresh_name, INTO, FROM,
)


class SemanticsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Valuations
# ---------------------------------------------------------------------------

class Valuation:
    """Finite-support assignment: name -> atom index -> bit."""

    def __init__(self, assignment: Dict[str, Dict[int, int]]):
        self.assignment = {n: dict(m) for n, m in assignment.items()}

    def get(self, name: str, index: int) -> int:
        try:
            return self.assignment[name][index]
        except KeyError:
            raise SemanticsError(f"valuation does not cover atom ({index},{name})")

    def covers(self, name: str, index: int) -> bool:
        return name in self.assignment and index in self.assignment[name]

    def merged(self, other: "Valuation") -> "Valuation":
        out = {n: dict(m) for n, m in self.assignment.items()}
        for n, m in other.assignment.items():
            out.setdefault(n, {}).update(m)
        return Valuation(out)

    def items(self):
        for n in sorted(self.assignment):
            for i in sorted(self.assignment[n]):
                yield n, i, self.assignment[n][i]

    def __eq__(self, other):
        return isinstance(other, Valuation) and self.assignment == other.assignment

    def __repr__(self):
        bits = " ".join(f"{n}({i})={v}" for n, i, v in self.items())
        return bits or "{}"


def all_valuations(atoms: Sequence[Tuple[int, str]]):
    """Every total 0/1 assignment to the given (index, name) atoms."""
    atoms = sorted(atoms, key=lambda p: (p[1], p[0]))
    for bits in product((0, 1), repeat=len(atoms)):
        out: Dict[str, Dict[int, int]] = {}
        for (i, n), b in zip(atoms, bits):
            out.setdefault(n, {})[i] = b
        yield Valuation(out)


# ---------------------------------------------------------------------------
# Boolean formula basics
# ---------------------------------------------------------------------------

def bool_atoms(b: BoolFormula) -> set:
    if isinstance(b, BVar):
        return {(b.index, b.name)}
    if isinstance(b, (BTop, BBot)):
        return set()
    if isinstance(b, BNeg):
        return bool_atoms(b.body)
    if isinstance(b, (BAnd, BOr)):
        return bool_atoms(b.left) | bool_atoms(b.right)
    raise TypeError(b)


def sorted_atoms(b: BoolFormula) -> List[Tuple[int, str]]:
    return sorted(bool_atoms(b), key=lambda p: (p[1], p[0]))


def bool_subst(b: BoolFormula, name: str, index: int, bit: int) -> BoolFormula:
    """Substitute a constant for one atom, folding constants on the way."""
    if isinstance(b, BVar):
        if b.name == name and b.index == index:
            return TOP if bit else BOT
        return b
    if isinstance(b, (BTop, BBot)):
        return b
    if isinstance(b, BNeg):
        s = bool_subst(b.body, name, index, bit)
        if isinstance(s, BTop):
            return BOT
        if isinstance(s, BBot):
            return TOP
        return BNeg(s)
    if isinstance(b, BAnd):
        l = bool_subst(b.left, name, index, bit)
        if isinstance(l, BBot):
            return BOT
        r = bool_subst(b.right, name, index, bit)
        if isinstance(r, BBot):
            return BOT
        if isinstance(l, BTop):
            return r
        if isinstance(r, BTop):
            return l
        return BAnd(l, r)
    if isinstance(b, BOr):
        l = bool_subst(b.left, name, index, bit)
        if isinstance(l, BTop):
            return TOP
        r = bool_subst(b.right, name, index, bit)
        if isinstance(r, BTop):
            return TOP
        if isinstance(l, BBot):
            return r
        if isinstance(r, BBot):
            return l
        return BOr(l, r)
    raise TypeError(b)


def bool_eval(b: BoolFormula, f: Valuation) -> bool:
    if isinstance(b, BVar):
        return f.get(b.name, b.index) == 1
    if isinstance(b, BTop):
        return True
    if isinstance(b, BBot):
        return False
    if isinstance(b, BNeg):
        return not bool_eval(b.body, f)
    if isinstance(b, BAnd):
        return bool_eval(b.left, f) and bool_eval(b.right, f)
    if isinstance(b, BOr):
        return bool_eval(b.left, f) or bool_eval(b.right, f)
    raise TypeError(b)


# ---------------------------------------------------------------------------
# #SAT, measure, entailment
# ---------------------------------------------------------------------------

def sat_count(b: BoolFormula, vars: Sequence[Tuple[int, str]]) -> int:
    """Number of total assignments to `vars` satisfying b, by exhaustive
    Shannon expansion with early pruning on decided branches."""
    vars = list(vars)
    missing = bool_atoms(b) - set(vars)
    if missing:
        raise SemanticsError(f"formula mentions atoms outside vars: {sorted(missing)}")

    def count(form: BoolFormula, rest: List[Tuple[int, str]]) -> int:
        if isinstance(form, BTop):
            return 1 << len(rest)
        if isinstance(form, BBot):
            return 0
        if not rest:
            # no atoms left but formula undecided: impossible after folding
            return 1 if bool_eval(form, Valuation({})) else 0
        (i, n), tail = rest[0], rest[1:]
        return (count(bool_subst(form, n, i, 0), tail)
                + count(bool_subst(form, n, i, 1), tail))

    return count(b, vars)


def measure(b: BoolFormula) -> Rational:
    """mu of the label's interpretation: #SAT over occurring atoms / 2^n."""
    atoms = sorted_atoms(b)
    return Fraction(sat_count(b, atoms), 1 << len(atoms))


def entails(b: BoolFormula, c: BoolFormula, names: Optional[Iterable[str]] = None) -> bool:
    if names is not None:
        used = free_names(b) | free_names(c)
        if not used <= set(names):
            raise SemanticsError(f"entailment mentions undeclared names")
    both = BAnd(b, BNeg(c))
    return sat_count(both, sorted_atoms(both)) == 0


def equivalent(b: BoolFormula, c: BoolFormula) -> bool:
    return entails(b, c) and entails(c, b)


# ---------------------------------------------------------------------------
# Formula evaluation (brute-force oracle)
# ---------------------------------------------------------------------------

def eval_formula(a: Formula, f: Valuation, names: Iterable[str]) -> bool:
    """Membership of f in the interpretation of `a` over the given names.

    Counting quantifiers are evaluated by enumerating every assignment to
    the bound-name atoms of the body; this is the ground-truth oracle the
    Bool translation is tested against.
    """
    names = set(names)
    if not free_names(a) <= names:
        raise SemanticsError("formula has free names outside the declared set")

    def ev(form: Formula, val: Valuation, ns: frozenset) -> bool:
        if isinstance(form, Atom):
            if form.name not in ns:
                raise SemanticsError(f"unbound atom name {form.name}")
            return val.get(form.name, form.index) == 1
        if isinstance(form, Neg):
            return not ev(form.body, val, ns)
        if isinstance(form, And):
            return ev(form.left, val, ns) and ev(form.right, val, ns)
        if isinstance(form, Or):
            return ev(form.left, val, ns) or ev(form.right, val, ns)
        if isinstance(form, (CQ, DQ)):
            from .syntax import rename_free_atom_name, formula_atoms, all_names
            bound, body = form.name, form.body
            if bound in ns:
                bound = fresh_name(bound, ns | all_names(body))
                body = rename_free_atom_name(body, form.name, bound)
            idxs = sorted(i for (i, n) in formula_atoms(body) if n == bound)
            total = 1 << len(idxs)
            hits = 0
            for bits in product((0, 1), repeat=len(idxs)):
                g = Valuation({bound: dict(zip(idxs, bits))})
                if ev(body, val.merged(g), ns | {bound}):
                    hits += 1
            frac = Fraction(hits, total)
            if isinstance(form, CQ):
                return frac >= form.q
            return frac < form.q
        raise TypeError(form)

    return ev(a, f, frozenset(names))


def mu_projection(b: BoolFormula, a: str, f: Valuation, names: Iterable[str]) -> Rational:
    """Measure of the f-slice of b's interpretation along name `a`."""
    names = set(names)
    if a in names:
        raise SemanticsError("projection name must not be in the context")
    if not free_names(b) <= names | {a}:
        raise SemanticsError("label has names outside context + projection name")
    residual = b
    for (i, n) in sorted_atoms(b):
        if n != a:
            residual = bool_subst(residual, n, i, f.get(n, i))
    return measure(residual)


# ---------------------------------------------------------------------------
# a-decompositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ADecomposition:
    name: str
    context: frozenset
    parts: tuple                 # tuple of (d over {name}, e over context)

    def selected(self, q: Rational, at_least: bool) -> BoolFormula:
        """The union of context parts whose name-part measure clears q."""
        if at_least:
            keep = [e for (d, e) in self.parts if measure(d) >= q]
        else:
            keep = [e for (d, e) in self.parts if measure(d) < q]
        return big_or(keep)


def a_decompose(b: BoolFormula, a: str, names: Iterable[str]) -> ADecomposition:
    """Shannon expansion over the context atoms of b: the context parts are
    the complete minterms of b's non-`a` atoms (T when there are none), and
    each name part is b with that minterm substituted in."""
    names = frozenset(names)
    if a in names:
        raise SemanticsError("decomposition name must not be in the context")
    if not free_names(b) <= names | {a}:
        raise SemanticsError("label has names outside context + decomposition name")
    ctx_atoms = [(i, n) for (i, n) in sorted_atoms(b) if n != a]
    parts = []
    for bits in product((0, 1), repeat=len(ctx_atoms)):
        d = b
        lits: List[BoolFormula] = []
        for (i, n), bit in zip(ctx_atoms, bits):
            d = bool_subst(d, n, i, bit)
            lits.append(BVar(i, n) if bit else BNeg(BVar(i, n)))
        e: BoolFormula = TOP
        for lit in lits:
            e = BAnd(e, lit) if not isinstance(e, BTop) else lit
        parts.append((d, e))
    return ADecomposition(a, names, tuple(parts))


def weak_a_decompose(b: BoolFormula, a: str, names: Iterable[str]) -> ADecomposition:
    """a_decompose with unsatisfiable name-parts dropped; F gives no parts."""
    full = a_decompose(b, a, names)
    kept = tuple((d, e) for (d, e) in full.parts
                 if sat_count(d, sorted_atoms(d)) > 0)
    return ADecomposition(full.name, full.context, kept)


def check_decomposition(dec: ADecomposition, b: BoolFormula, weak: bool = False) -> bool:
    """Re-verify a recorded decomposition from scratch."""
    a = dec.name
    for d, e in dec.parts:
        if not free_names(d) <= {a}:
            return False
        if not free_names(e) <= dec.context:
            return False
        if weak and sat_count(d, sorted_atoms(d)) == 0:
            return False
    union = big_or(BAnd(d, e) for (d, e) in dec.parts)
    if not equivalent(union, b):
        return False
    if not weak:
        for i in range(len(dec.parts)):
            for j in range(i + 1, len(dec.parts)):
                if sat_count(BAnd(dec.parts[i][1], dec.parts[j][1]),
                             sorted_atoms(BAnd(dec.parts[i][1], dec.parts[j][1]))) != 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# Bool translation and the decision procedure
# ---------------------------------------------------------------------------

def bool_of(a: Formula, names: Iterable[str]) -> BoolFormula:
    """A Boolean formula with the same interpretation as `a` over `names`."""
    names = frozenset(names)
    if not free_names(a) <= names:
        raise SemanticsError("formula has free names outside the declared set")

    def walk(form: Formula, ns: frozenset) -> BoolFormula:
        if isinstance(form, Atom):
            return BVar(form.index, form.name)
        if isinstance(form, Neg):
            return BNeg(walk(form.body, ns))
        if isinstance(form, And):
            return BAnd(walk(form.left, ns), walk(form.right, ns))
        if isinstance(form, Or):
            return BOr(walk(form.left, ns), walk(form.right, ns))
        if isinstance(form, (CQ, DQ)):
            from .syntax import rename_free_atom_name, all_names
            bound, body = form.name, form.body
            if bound in ns:
                bound = fresh_name(bound, ns | all_names(body))
                body = rename_free_atom_name(body, form.name, bound)
            inner = walk(body, ns | {bound})
            dec = a_decompose(inner, bound, ns)
            return dec.selected(form.q, at_least=isinstance(form, CQ))
        raise TypeError(form)

    return walk(a, names)


@dataclass(frozen=True)
class Verdict:
    kind: str                    # valid | invalid | contingent
    measure: Optional[Rational] = None

    @property
    def is_valid(self) -> bool:
        return self.kind == "valid"


VALID = Verdict("valid")
INVALID = Verdict("invalid")


def decide(a: Formula, names: Iterable[str]) -> Verdict:
    b = bool_of(a, names)
    if entails(TOP, b):
        return VALID
    if entails(b, BOT):
        return INVALID
    return Verdict("contingent", measure(b))


def labelled_valid(lf: LabelledFormula, names: Iterable[str]) -> bool:
    body = bool_of(lf.body, names)
    if lf.direction == INTO:
        return entails(lf.label, body)
    return entails(body, lf.label)


def sequent_valid(s: Sequent) -> bool:
    """A (possibly multi-succedent) sequent is valid when at least one of
    its labelled formulas is."""
    return any(labelled_valid(lf, s.names) for lf in s.succedent)


def find_falsifying(lf: LabelledFormula, names: Iterable[str]) -> Optional[Valuation]:
    """A valuation witnessing invalidity of the labelled formula, if any."""
    names = set(names)
    atoms = sorted(bool_atoms(lf.label)
                   | {(i, n) for (i, n) in _formula_atom_set(lf.body)},
                   key=lambda p: (p[1], p[0]))
    for f in all_valuations(atoms):
        in_label = bool_eval(lf.label, f)
        in_body = eval_formula(lf.body, f, names)
        if lf.direction == INTO and in_label and not in_body:
            return f
        if lf.direction == FROM and in_body and not in_label:
            return f
    return None


def _formula_atom_set(a: Formula) -> set:
    from .syntax import formula_atoms
    return formula_atoms(a)
