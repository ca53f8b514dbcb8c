"""Negation-simple, prenex, and positive-prenex normal forms.

Quantifier extrusion follows the four commutation equivalences with a
fixed leftmost-outermost pull order; zero-threshold quantifiers are
constant-folded away before extrusion because the commutations need a
strictly positive threshold.

Two details of the `epsilon` computation are easy to get wrong, and both
are pinned by brute-force set-equality tests:
  * the dyadic grid uses exponent (max a-index + 1): a label whose
    highest a-index is k ranges over k+1 atoms, so projection measures
    are multiples of 2^-(k+1);
  * epsilon is negative for every on-grid threshold below one, because
    {mu < q} equals {mu <= q + eps} only when (q + eps, q) contains no
    attainable measure, which forces eps = -2^-(grid+1).
For q = 1 the shorter step -2^-(k+1) suffices (no measure sits in the
open gap below one) and keeps p = 1/2 for index-free bodies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .syntax import (
    And, Atom, CQ, DQ, Formula, Neg, Or, Rational, alpha_rename_bound,
    formula_atoms, free_names, quantifier_free,
)
from .semantics import bool_of
from .syntax import BoolFormula


class NormalFormError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Negation simple normal form
# ---------------------------------------------------------------------------

def nsnf(a: Formula) -> Formula:
    """Equivalent formula in which negations only wrap atoms."""
    if isinstance(a, Atom):
        return a
    if isinstance(a, And):
        return And(nsnf(a.left), nsnf(a.right))
    if isinstance(a, Or):
        return Or(nsnf(a.left), nsnf(a.right))
    if isinstance(a, CQ):
        return CQ(a.q, a.name, nsnf(a.body))
    if isinstance(a, DQ):
        return DQ(a.q, a.name, nsnf(a.body))
    if isinstance(a, Neg):
        b = a.body
        if isinstance(b, Atom):
            return a
        if isinstance(b, Neg):
            return nsnf(b.body)
        if isinstance(b, And):
            return Or(nsnf(Neg(b.left)), nsnf(Neg(b.right)))
        if isinstance(b, Or):
            return And(nsnf(Neg(b.left)), nsnf(Neg(b.right)))
        if isinstance(b, CQ):
            return DQ(b.q, b.name, nsnf(b.body))
        if isinstance(b, DQ):
            return CQ(b.q, b.name, nsnf(b.body))
    raise TypeError(a)


# ---------------------------------------------------------------------------
# Zero-threshold elimination
# ---------------------------------------------------------------------------

# Closed stand-ins for an always-full / always-empty formula.
TRUE_FORMULA: Formula = CQ(Fraction(0), "a", Atom(0, "a"))
FALSE_FORMULA: Formula = CQ(Fraction(1), "a", And(Atom(0, "a"), Neg(Atom(0, "a"))))


def _fold_zero(a: Formula):
    """Eliminate every C[0]/D[0] quantifier, and quantifiers over bodies
    that folded to a constant.  Returns a Formula or a bool marker."""
    if isinstance(a, Atom):
        return a
    if isinstance(a, Neg):
        r = _fold_zero(a.body)
        if r is True:
            return False
        if r is False:
            return True
        return Neg(r)
    if isinstance(a, (And, Or)):
        l = _fold_zero(a.left)
        r = _fold_zero(a.right)
        if isinstance(a, And):
            if l is False or r is False:
                return False
            if l is True:
                return r
            if r is True:
                return l
            return And(l, r)
        if l is True or r is True:
            return True
        if l is False:
            return r
        if r is False:
            return l
        return Or(l, r)
    if isinstance(a, (CQ, DQ)):
        body = _fold_zero(a.body)
        if isinstance(a, CQ):
            if a.q == 0 or body is True:
                return True
            if body is False:
                return False      # empty body never reaches a positive q
            return CQ(a.q, a.name, body)
        if a.q == 0 or body is True:
            return False          # D needs measure < q; 1 < q and x < 0 fail
        if body is False:
            return True
        return DQ(a.q, a.name, body)
    raise TypeError(a)


def eliminate_zero_quantifiers(a: Formula) -> Formula:
    r = _fold_zero(a)
    if r is True:
        return TRUE_FORMULA
    if r is False:
        return FALSE_FORMULA
    return r


# ---------------------------------------------------------------------------
# Prenex normal form
# ---------------------------------------------------------------------------

KIND_C = "C"
KIND_D = "D"


@dataclass(frozen=True)
class PrenexFormula:
    prefix: tuple                 # tuple of (kind, q, name)
    matrix: Formula

    def __post_init__(self):
        if not quantifier_free(self.matrix):
            raise NormalFormError("matrix must be quantifier-free")
        names = [n for (_, _, n) in self.prefix]
        if len(set(names)) != len(names):
            raise NormalFormError("prefix names must be pairwise distinct")

    @property
    def positive(self) -> bool:
        return all(k == KIND_C for (k, _, _) in self.prefix)

    def to_formula(self) -> Formula:
        out = self.matrix
        for kind, q, name in reversed(self.prefix):
            out = CQ(q, name, out) if kind == KIND_C else DQ(q, name, out)
        return out


def _negate_prenex(p: PrenexFormula) -> PrenexFormula:
    """Negation of a prenex formula, still prenex.  The negation is
    absorbed by the outermost quantifier (pseudoduality: ~C[q] A is
    D[q] A with the body untouched); only a quantifier-free formula gets
    its matrix negated."""
    if not p.prefix:
        return PrenexFormula((), nsnf(Neg(p.matrix)))
    (k, q, n) = p.prefix[0]
    flipped = KIND_D if k == KIND_C else KIND_C
    return PrenexFormula(((flipped, q, n),) + p.prefix[1:], p.matrix)


def _combine(op: str, p1: PrenexFormula, p2: PrenexFormula) -> PrenexFormula:
    """Prenex form of p1 <op> p2, pulling left-side quantifiers first."""
    if p1.prefix:
        (k, q, a), rest = p1.prefix[0], PrenexFormula(p1.prefix[1:], p1.matrix)
        if k == KIND_C:
            inner = _combine(op, rest, p2)
            return PrenexFormula(((k, q, a),) + inner.prefix, inner.matrix)
        flipped = "or" if op == "and" else "and"
        inner = _combine(flipped, _negate_prenex(p2), rest)
        return PrenexFormula(((k, q, a),) + inner.prefix, inner.matrix)
    if p2.prefix:
        (k, q, a), rest = p2.prefix[0], PrenexFormula(p2.prefix[1:], p2.matrix)
        if k == KIND_C:
            inner = _combine(op, p1, rest)
            return PrenexFormula(((k, q, a),) + inner.prefix, inner.matrix)
        flipped = "or" if op == "and" else "and"
        inner = _combine(flipped, _negate_prenex(p1), rest)
        return PrenexFormula(((k, q, a),) + inner.prefix, inner.matrix)
    node = And if op == "and" else Or
    return PrenexFormula((), node(p1.matrix, p2.matrix))


def _extrude(a: Formula) -> PrenexFormula:
    if isinstance(a, (Atom, Neg)):
        return PrenexFormula((), a)
    if isinstance(a, (CQ, DQ)):
        kind = KIND_C if isinstance(a, CQ) else KIND_D
        inner = _extrude(a.body)
        return PrenexFormula(((kind, a.q, a.name),) + inner.prefix, inner.matrix)
    if isinstance(a, (And, Or)):
        op = "and" if isinstance(a, And) else "or"
        return _combine(op, _extrude(a.left), _extrude(a.right))
    raise TypeError(a)


def pnf(a: Formula) -> PrenexFormula:
    """Prenex normal form, equivalent to `a` over any name set covering
    both free-name sets."""
    stage = nsnf(alpha_rename_bound(a))
    stage = eliminate_zero_quantifiers(stage)
    stage = alpha_rename_bound(nsnf(stage))
    return _extrude(stage)


# ---------------------------------------------------------------------------
# Epsilon computation
# ---------------------------------------------------------------------------

def _max_a_index(b: BoolFormula, a: str) -> Optional[int]:
    from .semantics import bool_atoms
    idxs = [i for (i, n) in bool_atoms(b) if n == a]
    return max(idxs) if idxs else None


def epsilon(q: Rational, body_bool: BoolFormula, a: str) -> Tuple[Rational, Rational]:
    """The (epsilon, p) pair with  not C[q]{a} A  equivalent to  C[p]{a} ~A,
    where body_bool is a Boolean equivalent of A.

    Raises on q = 0: the full-space quantifier has no complement threshold
    inside [0,1]; zero thresholds are eliminated before prenexing instead.
    """
    q = Fraction(q)
    if q == 0:
        raise NormalFormError("epsilon undefined at q = 0; eliminate C[0]/D[0] first")
    if not 0 < q <= 1:
        raise NormalFormError(f"threshold {q} outside (0,1]")
    k = _max_a_index(body_bool, a)
    if q == 1:
        grid = k if k is not None else 0
        eps = -Fraction(1, 1 << (grid + 1))
    else:
        grid = (k + 1) if k is not None else 0
        if (q * (1 << grid)).denominator == 1:
            eps = -Fraction(1, 1 << (grid + 1))
        else:
            eps = Fraction(0)
    p = 1 - (q + eps)
    # q + eps falls off the attainable dyadic grid in every branch
    assert ((q + eps) * (1 << grid)).denominator != 1
    assert 0 < p <= 1
    return eps, p


def epsilon_syntactic(q: Rational, body: Formula, a: str) -> Tuple[Rational, Rational]:
    """Epsilon from a direct syntactic index bound on the body formula,
    avoiding the Bool translation (which can be exponential)."""
    idxs = [i for (i, n) in formula_atoms(body) if n == a]
    k = max(idxs) if idxs else None
    q = Fraction(q)
    if q == 0:
        raise NormalFormError("epsilon undefined at q = 0")
    if q == 1:
        grid = k if k is not None else 0
        eps = -Fraction(1, 1 << (grid + 1))
    else:
        grid = (k + 1) if k is not None else 0
        if (q * (1 << grid)).denominator == 1:
            eps = -Fraction(1, 1 << (grid + 1))
        else:
            eps = Fraction(0)
    return eps, 1 - (q + eps)


# ---------------------------------------------------------------------------
# Positive prenex normal form
# ---------------------------------------------------------------------------

def _neg_ppnf(p: PrenexFormula) -> PrenexFormula:
    """PPNF of the negation of an all-C prenex formula."""
    if not p.prefix:
        return PrenexFormula((), nsnf(Neg(p.matrix)))
    (k, q, a) = p.prefix[0]
    assert k == KIND_C
    rest = PrenexFormula(p.prefix[1:], p.matrix)
    if q == 0:
        # negation of a full-space quantifier: empty
        return _extrude(FALSE_FORMULA)
    body = rest.to_formula()
    _, pthr = epsilon(q, bool_of(body, free_names(body) | {a}), a)
    inner = _neg_ppnf(rest)
    return PrenexFormula(((KIND_C, pthr, a),) + inner.prefix, inner.matrix)


def ppnf(a: Formula) -> PrenexFormula:
    """Positive prenex normal form: prenex with a D-free prefix."""
    base = pnf(a)
    out = PrenexFormula((), base.matrix)
    for kind, q, name in reversed(base.prefix):
        if kind == KIND_C:
            out = PrenexFormula(((KIND_C, q, name),) + out.prefix, out.matrix)
        else:
            if q == 0:
                raise NormalFormError("D[0] in a prenex prefix; fold zeros first")
            body = out.to_formula()
            _, pthr = epsilon(q, bool_of(body, free_names(body) | {name}), name)
            flipped = _neg_ppnf(out)
            out = PrenexFormula(((KIND_C, pthr, name),) + flipped.prefix, flipped.matrix)
    assert out.positive
    return out


# ---------------------------------------------------------------------------
# Wagner-tuple export
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WagnerBlock:
    name: str
    width: int                    # distinct atom indices of this name in the matrix
    threshold_num: int            # m with q = min(1, m / 2^threshold_exp)
    threshold_exp: int
    exact: bool = True


@dataclass(frozen=True)
class WagnerInstance:
    matrix: Formula
    blocks: tuple


def export_wagner(p: PrenexFormula, precision: Optional[int] = None) -> WagnerInstance:
    """Tuple form of a PPNF: per-quantifier (width, threshold) blocks.

    Non-dyadic thresholds are refused unless a precision (the exponent b)
    is supplied, in which case m = ceil(q * 2^b) and the block is flagged
    inexact.  The matrix is exported as-is; CNF conversion is out of scope.
    """
    if not p.positive:
        raise NormalFormError("Wagner export needs a D-free (positive) prefix")
    atom_set = formula_atoms(p.matrix)
    blocks: List[WagnerBlock] = []
    for kind, q, name in p.prefix:
        width = len({i for (i, n) in atom_set if n == name})
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1) == 0:
            b = den.bit_length() - 1
            m = q.numerator
            blocks.append(WagnerBlock(name, width, m, b, True))
        else:
            if precision is None:
                raise NormalFormError(
                    f"threshold {q} is not dyadic; supply a precision to round")
            m = -((-q.numerator * (1 << precision)) // q.denominator)  # ceil
            blocks.append(WagnerBlock(name, width, m, precision, False))
    return WagnerInstance(p.matrix, tuple(blocks))


def print_wagner(w: WagnerInstance) -> str:
    from .textio import print_formula
    lines = [f"matrix {print_formula(w.matrix)}"]
    for blk in w.blocks:
        suffix = "" if blk.exact else " inexact"
        lines.append(f"block {blk.name} {blk.width} {blk.threshold_num} "
                     f"{blk.threshold_exp}{suffix}")
    return "\n".join(lines)


def parse_wagner(text: str) -> WagnerInstance:
    from .textio import parse_formula
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("matrix "):
        raise NormalFormError("expected a leading 'matrix <formula>' line")
    matrix = parse_formula(lines[0][len("matrix "):])
    blocks = []
    for ln in lines[1:]:
        fields = ln.split()
        if fields[0] != "block" or len(fields) not in (5, 6):
            raise NormalFormError(f"bad block line: {ln}")
        exact = len(fields) == 5
        if not exact and fields[5] != "inexact":
            raise NormalFormError(f"bad block line: {ln}")
        blocks.append(WagnerBlock(fields[1], int(fields[2]), int(fields[3]),
                                  int(fields[4]), exact))
    return WagnerInstance(matrix, tuple(blocks))
