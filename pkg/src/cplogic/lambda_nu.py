"""The probabilistic lambda calculus with named indexed choice and
generators: event application, permutative normalization, pseudo-value
distributions, and fuel-bounded reduction.

Choice resolution convention: an event bit 1 selects the LEFT operand of
a choice, bit 0 the right one.  This matches the typing rules, where the
left rule pairs the left operand with a true label atom; the calculus
and the type system must agree on it for the normalization property to
hold on typed terms.

Permutative normal forms are nu-rooted choice trees whose levels
strictly decrease from the root inward (the root carries the maximal
index), with name order ranking an outer-bound name above names bound
within its scope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple, Union

from .syntax import (
    App, Choice, Lam, Nu, Rational, Term, Var, all_names, all_vars,
    free_names, free_vars, fresh_name,
)

_STEP_BOUND = 200_000


class TermError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Events
# ---------------------------------------------------------------------------

class Event:
    """A valuation over a declared name set; only those names resolve
    choices, the rest pass through structurally."""

    def __init__(self, assignment: Dict[str, Dict[int, int]], names):
        self.assignment = {n: dict(m) for n, m in assignment.items()}
        self.names = frozenset(names)

    def get(self, name: str, index: int) -> int:
        try:
            return self.assignment[name][index]
        except KeyError:
            raise TermError(f"event does not cover choice ({name},{index})")

    @classmethod
    def from_valuation(cls, valuation, names) -> "Event":
        return cls(valuation.assignment, names)


def apply_event(f: Event, t: Term) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.ident, apply_event(f, t.body))
    if isinstance(t, App):
        return App(apply_event(f, t.fn), apply_event(f, t.arg))
    if isinstance(t, Choice):
        if t.name in f.names:
            picked = t.left if f.get(t.name, t.index) == 1 else t.right
            return apply_event(f, picked)
        return Choice(apply_event(f, t.left), apply_event(f, t.right), t.name, t.index)
    if isinstance(t, Nu):
        name, body = t.name, t.body
        if name in f.names:
            name = fresh_name(name, f.names | all_names(body))
            body = rename_term_name(body, t.name, name)
        return Nu(name, apply_event(f, body))
    raise TypeError(t)


def rename_term_name(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of a choice/generator name."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.ident, rename_term_name(t.body, old, new))
    if isinstance(t, App):
        return App(rename_term_name(t.fn, old, new), rename_term_name(t.arg, old, new))
    if isinstance(t, Choice):
        name = new if t.name == old else t.name
        return Choice(rename_term_name(t.left, old, new),
                      rename_term_name(t.right, old, new), name, t.index)
    if isinstance(t, Nu):
        if t.name == old:
            return t
        return Nu(t.name, rename_term_name(t.body, old, new))
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Substitution and beta reduction
# ---------------------------------------------------------------------------

def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding substitution for both variable and name binders."""
    if isinstance(t, Var):
        return u if t.ident == x else t
    if isinstance(t, Lam):
        if t.ident == x:
            return t
        if t.ident in free_vars(u):
            y = fresh_name(t.ident, all_vars(u) | all_vars(t.body) | {x})
            return Lam(y, subst(subst(t.body, t.ident, Var(y)), x, u))
        return Lam(t.ident, subst(t.body, x, u))
    if isinstance(t, App):
        return App(subst(t.fn, x, u), subst(t.arg, x, u))
    if isinstance(t, Choice):
        return Choice(subst(t.left, x, u), subst(t.right, x, u), t.name, t.index)
    if isinstance(t, Nu):
        if t.name in free_names(u):
            b = fresh_name(t.name, all_names(u) | all_names(t.body))
            return Nu(b, subst(rename_term_name(t.body, t.name, b), x, u))
        return Nu(t.name, subst(t.body, x, u))
    raise TypeError(t)


def beta_step(t: Term) -> Optional[Term]:
    """Contract the leftmost-outermost beta redex, also under binders and
    inside choice operands; None when beta-normal."""
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return subst(t.fn.body, t.fn.ident, t.arg)
    if isinstance(t, Var):
        return None
    if isinstance(t, Lam):
        r = beta_step(t.body)
        return Lam(t.ident, r) if r is not None else None
    if isinstance(t, App):
        r = beta_step(t.fn)
        if r is not None:
            return App(r, t.arg)
        r = beta_step(t.arg)
        return App(t.fn, r) if r is not None else None
    if isinstance(t, Choice):
        r = beta_step(t.left)
        if r is not None:
            return Choice(r, t.right, t.name, t.index)
        r = beta_step(t.right)
        return Choice(t.left, r, t.name, t.index) if r is not None else None
    if isinstance(t, Nu):
        r = beta_step(t.body)
        return Nu(t.name, r) if r is not None else None
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Permutative reduction
# ---------------------------------------------------------------------------

def _outranks(a: str, i: int, b: str, j: int, env: Tuple[str, ...]) -> bool:
    """Whether choice (a,i) belongs nearer the root than (b,j): same name
    with a larger index, or a name bound further out."""
    if a == b:
        return i > j
    if a in env and b in env:
        return env.index(a) < env.index(b)
    return False


def _root_perm(t: Term, env: Tuple[str, ...]) -> Optional[Term]:
    """Apply one permutative rule at the root, or None."""
    if isinstance(t, Choice):
        l, r, a, i = t.left, t.right, t.name, t.index
        if l == r:
            return l
        if isinstance(l, Choice) and l.name == a and l.index == i:
            return Choice(l.left, r, a, i)
        if isinstance(r, Choice) and r.name == a and r.index == i:
            return Choice(l, r.right, a, i)
        if isinstance(l, Choice) and _outranks(l.name, l.index, a, i, env):
            b, j = l.name, l.index
            return Choice(Choice(l.left, r, a, i), Choice(l.right, r, a, i), b, j)
        if isinstance(r, Choice) and _outranks(r.name, r.index, a, i, env):
            b, j = r.name, r.index
            return Choice(Choice(l, r.left, a, i), Choice(l, r.right, a, i), b, j)
        return None
    if isinstance(t, Lam):
        b = t.body
        if isinstance(b, Choice):
            return Choice(Lam(t.ident, b.left), Lam(t.ident, b.right), b.name, b.index)
        if isinstance(b, Nu):
            return Nu(b.name, Lam(t.ident, b.body))
        return None
    if isinstance(t, App):
        if isinstance(t.fn, Choice):
            c = t.fn
            return Choice(App(c.left, t.arg), App(c.right, t.arg), c.name, c.index)
        if isinstance(t.fn, Nu):
            name, body = t.fn.name, t.fn.body
            if name in free_names(t.arg):
                fresh = fresh_name(name, all_names(t.arg) | all_names(body))
                body = rename_term_name(body, name, fresh)
                name = fresh
            return Nu(name, App(body, t.arg))
        if isinstance(t.arg, Choice):
            c = t.arg
            return Choice(App(t.fn, c.left), App(t.fn, c.right), c.name, c.index)
        return None
    if isinstance(t, Nu):
        b = t.body
        if isinstance(b, Choice) and b.name != t.name:
            return Choice(Nu(t.name, b.left), Nu(t.name, b.right), b.name, b.index)
        if t.name not in free_names(b):
            return b
        return None
    return None


def _perm_redexes(t: Term, env: Tuple[str, ...] = (), path: Tuple[int, ...] = ()):
    """All (path, env) positions where a permutative rule applies."""
    out = []
    if _root_perm(t, env) is not None:
        out.append((path, env))
    if isinstance(t, Lam):
        out += _perm_redexes(t.body, env, path + (0,))
    elif isinstance(t, App):
        out += _perm_redexes(t.fn, env, path + (0,))
        out += _perm_redexes(t.arg, env, path + (1,))
    elif isinstance(t, Choice):
        out += _perm_redexes(t.left, env, path + (0,))
        out += _perm_redexes(t.right, env, path + (1,))
    elif isinstance(t, Nu):
        out += _perm_redexes(t.body, env + (t.name,), path + (0,))
    return out


def _rewrite_at(t: Term, path: Tuple[int, ...], env: Tuple[str, ...]) -> Term:
    if not path:
        r = _root_perm(t, env)
        assert r is not None
        return r
    i, rest = path[0], path[1:]
    if isinstance(t, Lam):
        return Lam(t.ident, _rewrite_at(t.body, rest, env))
    if isinstance(t, App):
        if i == 0:
            return App(_rewrite_at(t.fn, rest, env), t.arg)
        return App(t.fn, _rewrite_at(t.arg, rest, env))
    if isinstance(t, Choice):
        if i == 0:
            return Choice(_rewrite_at(t.left, rest, env), t.right, t.name, t.index)
        return Choice(t.left, _rewrite_at(t.right, rest, env), t.name, t.index)
    if isinstance(t, Nu):
        return Nu(t.name, _rewrite_at(t.body, rest, env + (t.name,)))
    raise TypeError(t)


def pnf_term(t: Term, rng: Optional[random.Random] = None) -> Term:
    """Permutative normal form by exhaustive rule application.  With an
    `rng` the redex order is randomized (used by the confluence tests);
    by default the first redex in preorder is taken."""
    steps = 0
    while True:
        redexes = _perm_redexes(t)
        if not redexes:
            return t
        path, env = redexes[0] if rng is None else rng.choice(redexes)
        t = _rewrite_at(t, path, env)
        steps += 1
        if steps > _STEP_BOUND:
            raise TermError("permutative normalization exceeded the step bound")


# ---------------------------------------------------------------------------
# Permutative normal form classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PseudoValue:
    term: Term


@dataclass(frozen=True)
class NuTree:
    name: str
    level: int
    tree: Term
    leaves: tuple                # tuple of PnfTerm


PnfTerm = Union[PseudoValue, NuTree]


def is_pnf(t: Term) -> Optional[PnfTerm]:
    """Classification of a name-closed permutative normal form, or None
    when some permutative rule still applies."""
    if free_names(t):
        raise TermError("classification needs a name-closed term")
    if _perm_redexes(t):
        return None
    return _classify(t)


def _classify(t: Term) -> PnfTerm:
    if not isinstance(t, Nu):
        return PseudoValue(t)
    a, body = t.name, t.body

    leaves: List[PnfTerm] = []

    def walk(u: Term, bound: int) -> int:
        if isinstance(u, Choice) and u.name == a:
            assert u.index < bound, "tree levels must strictly decrease inward"
            walk(u.left, u.index)
            walk(u.right, u.index)
            return u.index
        assert not free_names(u), "tree leaves must be name-closed"
        leaves.append(_classify(u))
        return -1

    if not (isinstance(body, Choice) and body.name == a):
        # normal generators wrap a proper tree; nothing else survives rule 10
        raise TermError("generator body is not a choice tree")
    level = body.index
    walk(body, level + 1)
    return NuTree(a, level, body, tuple(leaves))


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------

def canonical_term(t: Term, venv=None, nenv=None, counter=None) -> Term:
    """Alpha-canonical rendering: binders renamed v0, v1, ... / n0, n1, ...
    in traversal order, so alpha-equal terms print identically."""
    venv = venv or {}
    nenv = nenv or {}
    counter = counter if counter is not None else [0, 0]
    if isinstance(t, Var):
        return Var(venv.get(t.ident, t.ident))
    if isinstance(t, Lam):
        new = f"v{counter[0]}"
        counter[0] += 1
        v2 = dict(venv)
        v2[t.ident] = new
        return Lam(new, canonical_term(t.body, v2, nenv, counter))
    if isinstance(t, App):
        return App(canonical_term(t.fn, venv, nenv, counter),
                   canonical_term(t.arg, venv, nenv, counter))
    if isinstance(t, Choice):
        return Choice(canonical_term(t.left, venv, nenv, counter),
                      canonical_term(t.right, venv, nenv, counter),
                      nenv.get(t.name, t.name), t.index)
    if isinstance(t, Nu):
        new = f"n{counter[1]}"
        counter[1] += 1
        n2 = dict(nenv)
        n2[t.name] = new
        return Nu(new, canonical_term(t.body, venv, n2, counter))
    raise TypeError(t)


@dataclass(frozen=True)
class Distribution:
    entries: tuple               # tuple of (canonical pseudo-value Term, weight)

    def __init__(self, entries):
        from .textio import print_term
        items = tuple(sorted(entries, key=lambda kv: print_term(kv[0])))
        object.__setattr__(self, "entries", items)
        total = sum(w for _, w in items)
        if total != 1:
            raise TermError(f"distribution weights sum to {total}, not 1")
        if any(w <= 0 for _, w in items):
            raise TermError("distribution weights must be positive")

    def weight(self, v: Term) -> Fraction:
        key = canonical_term(v)
        for term, w in self.entries:
            if term == key:
                return w
        return Fraction(0)


def distribution(t: Term) -> Distribution:
    """Exact distribution of pseudo-values of a name-closed term."""
    if free_names(t):
        raise TermError("distribution needs a name-closed term")
    t = pnf_term(t)
    acc: Dict[Term, Fraction] = {}

    def add(term: Term, w: Fraction):
        key = canonical_term(term)
        acc[key] = acc.get(key, Fraction(0)) + w

    def go(u: Term, w: Fraction):
        if not isinstance(u, Nu):
            add(u, w)
            return
        a, body = u.name, u.body

        def spine_indices(x: Term) -> set:
            if isinstance(x, Choice) and x.name == a:
                return {x.index} | spine_indices(x.left) | spine_indices(x.right)
            return set()

        idxs = sorted(spine_indices(body))
        if not idxs:
            go(body, w)               # vacuous generator (not normal, but safe)
            return
        total = 1 << len(idxs)
        for bits in product((0, 1), repeat=len(idxs)):
            g = dict(zip(idxs, bits))

            def resolve(x: Term) -> Term:
                while isinstance(x, Choice) and x.name == a:
                    x = x.left if g[x.index] == 1 else x.right
                return x

            go(resolve(body), w / total)

    go(t, Fraction(1))
    return Distribution(tuple(acc.items()))


def is_head_normal(t: Term) -> bool:
    """Head normal form: lambdas over an application spine headed by a
    variable."""
    while isinstance(t, Lam):
        t = t.body
    while isinstance(t, App):
        t = t.fn
    return isinstance(t, Var)


def normal_prob(t: Term) -> Rational:
    """Probability mass of head-normal pseudo-values in t's distribution."""
    dist = distribution(t)
    return sum((w for v, w in dist.entries if is_head_normal(v)), Fraction(0))


# ---------------------------------------------------------------------------
# Reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReduceResult:
    term: Term
    steps: int
    exhausted: bool


def reduce_term(t: Term, fuel: int) -> ReduceResult:
    """Interleave permutative normalization with leftmost-outermost beta
    steps, spending at most `fuel` beta contractions."""
    steps = 0
    while True:
        t = pnf_term(t)
        nxt = beta_step(t)
        if nxt is None:
            return ReduceResult(t, steps, False)
        if steps >= fuel:
            return ReduceResult(t, steps, True)
        t = nxt
        steps += 1


def normalizes_with_prob(t: Term, r: Rational, fuel: int = 200) -> bool:
    """Whether some reduct within `fuel` beta steps is in normal form with
    probability at least r.  False only means not found within fuel."""
    if free_names(t):
        raise TermError("normalization check needs a name-closed term")
    r = Fraction(r)
    if r <= 0:
        return True
    steps = 0
    while True:
        t = pnf_term(t)
        if normal_prob(t) >= r:
            return True
        nxt = beta_step(t)
        if nxt is None or steps >= fuel:
            return False
        t = nxt
        steps += 1


def print_distribution(d: Distribution) -> str:
    from .textio import print_term, print_rational
    return "\n".join(f"{print_rational(w)} {print_term(v)}" for v, w in d.entries)
