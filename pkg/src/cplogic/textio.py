"""Concrete textual grammar, parser, and pretty-printer.

Grammar (ASCII, whitespace-insensitive):

    rational   q  := NAT | NAT "/" NAT
    formula    A  := "C[" q "]{" name "}" A | "D[" q "]{" name "}" A | orF
    orF           := andF ("|" andF)*
    andF          := unF ("&" unF)*
    unF           := "~" unF | "p(" NAT "," name ")" | "(" A ")" | quantified
    bool       b  := same shape with atoms "x(" NAT "," name ")", "T", "F"
    labelled   L  := b "|>" A  |  b "<|" A
    sequent       := "|-{" [name ("," name)*] "}" L ("," L)*
    term       t  := "\\" ident "." t | "nu" name "." t | choice
    choice        := app ("(+" name NAT ")" app)*        (left-assoc)
    app           := atomT atomT*                        (left-assoc)
    atomT         := ident | "omega" | "id" | "(" t ")"
    type       s  := "C[" q "]" atomS "->" s | atomS
    atomS         := "o" | "(" s ")"
    qual          := "C[" q "]" atomS
    judgment      := [ident ":" qual ("," ...)] "|-{" names ";" q "}"
                     t ":" b "|>" s
    mcpl formula  := "C[" q "]" mbase | "(" mcpl ")"
    mbase         := "Flip(" NAT ")" | mcpl "=>" mbase
    mcpl sequent  := [mcpl ("," mcpl)*] "|-{" names "}" b "|>" mcpl

Derivations serialize as parenthesized trees

    (TAG "conclusion" ["hyp" ...] premise ...)

where every hypothesis is one of  `b |= c`, `mu b >= q`, `mu b < q`,
`mu b = 0`, `mu b = 1`, `adecomp a : d , e ; d , e ; ...`, `rate q`,
`ctx N`, `choice a N`.

Printing is deterministic: structurally equal values print identically,
and parse(print(x)) == x on every category.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List

from .syntax import (
    And, App, Arrow, Atom, BAnd, BBot, BNeg, BOr, BTop, BVar, Base, BOT,
    BoolFormula, CQ, Choice, ChoiceHyp, CtxIndexHyp, DQ, DecompHyp,
    Derivation, EntailHyp, Formula, FROM, INTO, Lam, LabelledFormula,
    MeasureHyp, Neg, Nu, O, Or, QualType, RateHyp, Rational, Sequent,
    SimpleType, Term, TOP, TypeDerivation, TypeJudgment, Var, term_key,
)

OMEGA: Term = App(Lam("x", App(Var("x"), Var("x"))), Lam("x", App(Var("x"), Var("x"))))
ID: Term = Lam("x", Var("x"))

_RESERVED_TERM_WORDS = {"nu", "omega", "id"}


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, expected, found: str):
        self.span = span
        self.expected = list(expected) if not isinstance(expected, str) else [expected]
        self.found = found
        what = " or ".join(self.expected)
        super().__init__(f"at {span.start}..{span.end}: expected {what}, found {found}")


_PUNCT = ["(+", "|>", "<|", "|-", "|=", "->", "=>", ">=",
          "(", ")", "{", "}", "[", "]", ",", ";", ":", ".",
          "|", "&", "~", "\\", "/", "<", ">", "=", "+"]
_TOKEN_RE = re.compile(
    r'\s*(?:(?P<string>"(?:[^"\\]|\\.)*")'
    r'|(?P<nat>\d+)'
    r'|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)'
    r'|(?P<punct>' + "|".join(re.escape(p) for p in _PUNCT) + r'))')


@dataclass
class Token:
    kind: str
    text: str
    start: int
    end: int


def _tokenize(text: str) -> List[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(SourceSpan(at, at + 1), "a token", repr(stripped[0]))
        for kind in ("string", "nat", "ident", "punct"):
            if m.group(kind) is not None:
                out.append(Token(kind, m.group(kind), m.start(kind), m.end(kind)))
                break
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("punct", "ident")

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise ParseError(SourceSpan(t.start, t.end), repr(text), repr(t.text or "end of input"))
        return self.next()

    def fail(self, expected):
        t = self.peek()
        raise ParseError(SourceSpan(t.start, t.end), expected, repr(t.text or "end of input"))

    def done(self):
        t = self.peek()
        if t.kind != "eof":
            raise ParseError(SourceSpan(t.start, t.end), "end of input", repr(t.text))

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            self.fail("a name")
        return self.next().text

    def nat(self) -> int:
        t = self.peek()
        if t.kind != "nat":
            self.fail("a natural number")
        return int(self.next().text)

    def rational(self) -> Fraction:
        start = self.peek()
        num = self.nat()
        if self.at("/"):
            self.next()
            den = self.nat()
            if den == 0:
                raise ParseError(SourceSpan(start.start, self.peek().start),
                                 "a nonzero denominator", "0")
            return Fraction(num, den)
        return Fraction(num)

    def unit_rational(self) -> Fraction:
        start = self.peek()
        q = self.rational()
        if not (0 <= q <= 1):
            raise ParseError(SourceSpan(start.start, self.peek().start),
                             "a rational in [0,1]", str(q))
        return q

    # -- formulas ----------------------------------------------------------
    def quantifier(self) -> Formula:
        kind = self.next().text           # C or D
        self.expect("[")
        q = self.unit_rational()
        self.expect("]")
        self.expect("{")
        name = self.ident()
        self.expect("}")
        body = self.formula()
        return CQ(q, name, body) if kind == "C" else DQ(q, name, body)

    def _at_quantifier(self) -> bool:
        return (self.peek().kind == "ident" and self.peek().text in ("C", "D")
                and self.peek(1).text == "[")

    def formula(self) -> Formula:
        if self._at_quantifier():
            return self.quantifier()
        return self.or_formula()

    def or_formula(self) -> Formula:
        out = self.and_formula()
        while self.at("|"):
            self.next()
            out = Or(out, self.and_formula())
        return out

    def and_formula(self) -> Formula:
        out = self.un_formula()
        while self.at("&"):
            self.next()
            out = And(out, self.un_formula())
        return out

    def un_formula(self) -> Formula:
        if self.at("~"):
            self.next()
            return Neg(self.un_formula())
        if self._at_quantifier():
            return self.quantifier()
        if self.peek().text == "p" and self.peek(1).text == "(":
            self.next()
            self.expect("(")
            i = self.nat()
            self.expect(",")
            name = self.ident()
            self.expect(")")
            return Atom(i, name)
        if self.at("("):
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        self.fail(["an atom p(i,a)", "'~'", "'('", "a quantifier"])

    # -- Boolean formulas --------------------------------------------------
    def bool_formula(self) -> BoolFormula:
        out = self.bool_and()
        while self.at("|"):
            self.next()
            out = BOr(out, self.bool_and())
        return out

    def bool_and(self) -> BoolFormula:
        out = self.bool_un()
        while self.at("&"):
            self.next()
            out = BAnd(out, self.bool_un())
        return out

    def bool_un(self) -> BoolFormula:
        if self.at("~"):
            self.next()
            return BNeg(self.bool_un())
        if self.peek().text == "x" and self.peek(1).text == "(":
            self.next()
            self.expect("(")
            i = self.nat()
            self.expect(",")
            name = self.ident()
            self.expect(")")
            return BVar(i, name)
        if self.at("T"):
            self.next()
            return TOP
        if self.at("F"):
            self.next()
            return BOT
        if self.at("("):
            self.next()
            b = self.bool_formula()
            self.expect(")")
            return b
        self.fail(["a Boolean atom x(i,a)", "'T'", "'F'", "'~'", "'('"])

    # -- labelled formulas, sequents ----------------------------------------
    def labelled(self) -> LabelledFormula:
        label = self.bool_formula()
        if self.at("|>"):
            self.next()
            return LabelledFormula(label, INTO, self.formula())
        if self.at("<|"):
            self.next()
            return LabelledFormula(label, FROM, self.formula())
        self.fail(["'|>'", "'<|'"])

    def name_set(self) -> List[str]:
        names = []
        if self.peek().kind == "ident":
            names.append(self.ident())
            while self.at(","):
                self.next()
                names.append(self.ident())
        return names

    def sequent(self) -> Sequent:
        self.expect("|-")
        self.expect("{")
        names = self.name_set()
        self.expect("}")
        members = [self.labelled()]
        while self.at(","):
            self.next()
            members.append(self.labelled())
        return Sequent(names, members)

    # -- terms ---------------------------------------------------------------
    def term(self) -> Term:
        if self.at("\\"):
            self.next()
            v = self.ident()
            self.expect(".")
            return Lam(v, self.term())
        if self.peek().kind == "ident" and self.peek().text == "nu":
            self.next()
            n = self.ident()
            self.expect(".")
            return Nu(n, self.term())
        return self.choice_term()

    def choice_term(self) -> Term:
        out = self.app_term()
        while self.at("(+"):
            self.next()
            name = self.ident()
            idx = self.nat()
            self.expect(")")
            right = self.app_term()
            out = Choice(out, right, name, idx)
        return out

    def app_term(self) -> Term:
        out = self.atom_term()
        while True:
            t = self.peek()
            if t.kind == "ident" and t.text != "nu":
                out = App(out, self.atom_term())
            elif t.text == "(":
                out = App(out, self.atom_term())
            else:
                return out

    def atom_term(self) -> Term:
        t = self.peek()
        if t.kind == "ident":
            if t.text == "omega":
                self.next()
                return OMEGA
            if t.text == "id":
                self.next()
                return ID
            if t.text == "nu":
                self.fail("a term atom")
            return Var(self.next().text)
        if self.at("("):
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        self.fail(["a variable", "'('", "'omega'", "'id'"])

    # -- types ----------------------------------------------------------------
    def typ(self) -> SimpleType:
        if self.peek().text == "C" and self.peek(1).text == "[":
            qt = self.qual_type()
            self.expect("->")
            return Arrow(qt, self.typ())
        return self.atom_type()

    def atom_type(self) -> SimpleType:
        if self.at("o"):
            self.next()
            return O
        if self.at("("):
            self.next()
            t = self.typ()
            self.expect(")")
            return t
        self.fail(["'o'", "'('", "a qualified arrow"])

    def qual_type(self) -> QualType:
        self.expect("C")
        self.expect("[")
        q = self.unit_rational()
        self.expect("]")
        return QualType(q, self.atom_type())

    # -- type judgments ---------------------------------------------------------
    def judgment(self) -> TypeJudgment:
        context = []
        while not self.at("|-"):
            v = self.ident()
            self.expect(":")
            context.append((v, self.qual_type()))
            if self.at(","):
                self.next()
            else:
                break
        self.expect("|-")
        self.expect("{")
        names = self.name_set()
        self.expect(";")
        q = self.unit_rational()
        self.expect("}")
        term = self.term()
        self.expect(":")
        label = self.bool_formula()
        self.expect("|>")
        typ = self.typ()
        return TypeJudgment(context, names, q, term, label, typ)


# ---------------------------------------------------------------------------
# Public parse entry points
# ---------------------------------------------------------------------------

def _run(text: str, method: str):
    p = _Parser(text)
    out = getattr(p, method)()
    p.done()
    return out


def parse_formula(text: str) -> Formula:
    return _run(text, "formula")


def parse_bool(text: str) -> BoolFormula:
    return _run(text, "bool_formula")


def parse_labelled(text: str) -> LabelledFormula:
    return _run(text, "labelled")


def parse_sequent(text: str) -> Sequent:
    return _run(text, "sequent")


def parse_term(text: str) -> Term:
    return _run(text, "term")


def parse_type(text: str) -> SimpleType:
    return _run(text, "typ")


def parse_qual_type(text: str) -> QualType:
    return _run(text, "qual_type")


def parse_judgment(text: str) -> TypeJudgment:
    return _run(text, "judgment")


# ---------------------------------------------------------------------------
# Printers
# ---------------------------------------------------------------------------

def print_rational(q: Rational) -> str:
    return str(Fraction(q))


def print_formula(a: Formula, _level: int = 0) -> str:
    if isinstance(a, Atom):
        return f"p({a.index},{a.name})"
    if isinstance(a, Neg):
        return "~" + print_formula(a.body, 3)
    if isinstance(a, And):
        s = f"{print_formula(a.left, 2)} & {print_formula(a.right, 3)}"
        return f"({s})" if _level > 2 else s
    if isinstance(a, Or):
        s = f"{print_formula(a.left, 1)} | {print_formula(a.right, 2)}"
        return f"({s})" if _level > 1 else s
    if isinstance(a, (CQ, DQ)):
        tag = "C" if isinstance(a, CQ) else "D"
        s = f"{tag}[{print_rational(a.q)}]{{{a.name}}} {print_formula(a.body, 0)}"
        return f"({s})" if _level > 0 else s
    raise TypeError(a)


def print_bool(b: BoolFormula, _level: int = 0) -> str:
    if isinstance(b, BVar):
        return f"x({b.index},{b.name})"
    if isinstance(b, BTop):
        return "T"
    if isinstance(b, BBot):
        return "F"
    if isinstance(b, BNeg):
        return "~" + print_bool(b.body, 3)
    if isinstance(b, BAnd):
        s = f"{print_bool(b.left, 2)} & {print_bool(b.right, 3)}"
        return f"({s})" if _level > 2 else s
    if isinstance(b, BOr):
        s = f"{print_bool(b.left, 1)} | {print_bool(b.right, 2)}"
        return f"({s})" if _level > 1 else s
    raise TypeError(b)


def print_labelled(lf: LabelledFormula) -> str:
    arrow = "|>" if lf.direction == INTO else "<|"
    return f"{print_bool(lf.label)} {arrow} {print_formula(lf.body)}"


def print_sequent(s: Sequent) -> str:
    names = ", ".join(sorted(s.names))
    members = ", ".join(print_labelled(lf) for lf in s.succedent)
    return f"|-{{{names}}} {members}"


_OMEGA_KEY = term_key(OMEGA)
_ID_KEY = term_key(ID)


def print_term(t: Term, _ctx: str = "top") -> str:
    key = term_key(t)
    if key == _OMEGA_KEY:
        return "omega"
    if key == _ID_KEY:
        return "id"
    if isinstance(t, Var):
        return t.ident
    if isinstance(t, Lam):
        s = f"\\{t.ident}. {print_term(t.body, 'top')}"
        return f"({s})" if _ctx != "top" else s
    if isinstance(t, Nu):
        s = f"nu {t.name}. {print_term(t.body, 'top')}"
        return f"({s})" if _ctx != "top" else s
    if isinstance(t, App):
        s = f"{print_term(t.fn, 'appfn')} {print_term(t.arg, 'apparg')}"
        return f"({s})" if _ctx not in ("top", "appfn", "choiceleft", "choiceright") else s
    if isinstance(t, Choice):
        s = (f"{print_term(t.left, 'choiceleft')} (+ {t.name} {t.index}) "
             f"{print_term(t.right, 'apparg')}")
        return f"({s})" if _ctx not in ("top", "choiceleft") else s
    raise TypeError(t)


def print_type(s: SimpleType) -> str:
    if isinstance(s, Base):
        return "o"
    if isinstance(s, Arrow):
        return f"{print_qual_type(s.arg)} -> {print_type(s.result)}"
    raise TypeError(s)


def _print_atom_type(s: SimpleType) -> str:
    if isinstance(s, Base):
        return "o"
    return f"({print_type(s)})"


def print_qual_type(qt: QualType) -> str:
    return f"C[{print_rational(qt.q)}] {_print_atom_type(qt.type)}"


def print_judgment(j: TypeJudgment) -> str:
    ctx = ", ".join(f"{v} : {print_qual_type(qt)}" for v, qt in j.context)
    names = ", ".join(sorted(j.names))
    head = f"{ctx} " if ctx else ""
    return (f"{head}|-{{{names} ; {print_rational(j.exponent)}}} "
            f"{print_term(j.term)} : {print_bool(j.label)} |> {print_type(j.type)}")


# ---------------------------------------------------------------------------
# Hypotheses
# ---------------------------------------------------------------------------

def print_hypothesis(h) -> str:
    if isinstance(h, EntailHyp):
        return f"{print_bool(h.left)} |= {print_bool(h.right)}"
    if isinstance(h, MeasureHyp):
        if h.op in (">=", "<"):
            return f"mu {print_bool(h.label)} {h.op} {print_rational(h.q)}"
        return f"mu {print_bool(h.label)} = {print_rational(h.q)}"
    if isinstance(h, DecompHyp):
        parts = " ; ".join(f"{print_bool(d)} , {print_bool(e)}" for d, e in h.parts)
        return f"adecomp {h.name} : {parts}" if parts else f"adecomp {h.name} :"
    if isinstance(h, RateHyp):
        return f"rate {print_rational(h.rate)}"
    if isinstance(h, CtxIndexHyp):
        return f"ctx {h.index}"
    if isinstance(h, ChoiceHyp):
        return f"choice {h.name} {h.index}"
    raise TypeError(h)


def parse_hypothesis(text: str):
    p = _Parser(text)
    t = p.peek()
    if t.text == "mu":
        p.next()
        label = p.bool_formula()
        if p.at(">="):
            p.next()
            return_value = MeasureHyp(label, ">=", p.rational())
        elif p.at("<"):
            p.next()
            return_value = MeasureHyp(label, "<", p.rational())
        elif p.at("="):
            p.next()
            return_value = MeasureHyp(label, "=", p.rational())
        else:
            p.fail(["'>='", "'<'", "'='"])
        p.done()
        return return_value
    if t.text == "adecomp":
        p.next()
        name = p.ident()
        p.expect(":")
        parts = []
        while p.peek().kind != "eof":
            d = p.bool_formula()
            p.expect(",")
            e = p.bool_formula()
            parts.append((d, e))
            if p.at(";"):
                p.next()
            else:
                break
        p.done()
        return DecompHyp(name, tuple(parts))
    if t.text == "rate":
        p.next()
        r = p.unit_rational()
        p.done()
        return RateHyp(r)
    if t.text == "ctx":
        p.next()
        i = p.nat()
        p.done()
        return CtxIndexHyp(i)
    if t.text == "choice":
        p.next()
        name = p.ident()
        i = p.nat()
        p.done()
        return ChoiceHyp(name, i)
    left = p.bool_formula()
    p.expect("|=")
    right = p.bool_formula()
    p.done()
    return EntailHyp(left, right)


# ---------------------------------------------------------------------------
# Derivation trees: (TAG "conclusion" ["hyp" ...] premise ...)
# ---------------------------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unquote(s: str) -> str:
    return s[1:-1].replace('\\"', '"').replace("\\\\", "\\")


def print_derivation(d: Derivation) -> str:
    hyps = " ".join(_quote(print_hypothesis(h)) for h in d.hypotheses)
    prem = "".join(" " + print_derivation(p) for p in d.premises)
    return f"({d.rule} {_quote(print_sequent(d.conclusion))} [{hyps}]{prem})"


def print_type_derivation(d: TypeDerivation) -> str:
    hyps = " ".join(_quote(print_hypothesis(h)) for h in d.hypotheses)
    prem = "".join(" " + print_type_derivation(p) for p in d.premises)
    return f"({d.rule} {_quote(print_judgment(d.judgment))} [{hyps}]{prem})"


def _parse_tree(p: "_Parser", conclusion_parser):
    p.expect("(")
    tagtok = p.peek()
    if tagtok.kind not in ("ident", "punct"):
        p.fail("a rule tag")
    # rule tags may be composite like RC> ; glue adjacent punctuation
    tag = p.next().text
    while p.peek().kind == "punct" and p.peek().text in (">", "<") \
            and p.peek().start == p.toks[p.pos - 1].end:
        tag += p.next().text
    concl_tok = p.peek()
    if concl_tok.kind != "string":
        p.fail("a quoted conclusion")
    conclusion = conclusion_parser(_unquote(p.next().text))
    p.expect("[")
    hyps = []
    while p.peek().kind == "string":
        hyps.append(parse_hypothesis(_unquote(p.next().text)))
    p.expect("]")
    premises = []
    while p.at("("):
        premises.append(_parse_tree(p, conclusion_parser))
    p.expect(")")
    return tag, conclusion, tuple(hyps), tuple(premises)


def parse_derivation(text: str) -> Derivation:
    p = _Parser(text)
    d = _tree_to_derivation(_parse_tree(p, parse_sequent))
    p.done()
    return d


def _tree_to_derivation(tree) -> Derivation:
    tag, concl, hyps, prems = tree
    return Derivation(tag, concl, tuple(_tree_to_derivation(q) for q in prems), hyps)


def parse_type_derivation(text: str) -> TypeDerivation:
    p = _Parser(text)
    d = _tree_to_type_derivation(_parse_tree(p, parse_judgment))
    p.done()
    return d


def _tree_to_type_derivation(tree) -> TypeDerivation:
    tag, concl, hyps, prems = tree
    return TypeDerivation(tag, concl, tuple(_tree_to_type_derivation(q) for q in prems), hyps)


# ---------------------------------------------------------------------------
# Valuations
# ---------------------------------------------------------------------------

def print_valuation(v) -> str:
    parts = [f"{n}({i})={bit}" for n, i, bit in v.items()]
    return " ".join(parts) if parts else "{}"


def parse_valuation(text: str):
    from .semantics import Valuation
    text = text.strip()
    if text == "{}" or not text:
        return Valuation({})
    p = _Parser(text)
    assignment = {}
    while p.peek().kind != "eof":
        name = p.ident()
        p.expect("(")
        idx = p.nat()
        p.expect(")")
        p.expect("=")
        bit = p.nat()
        if bit not in (0, 1):
            p.fail("a bit")
        assignment.setdefault(name, {})[idx] = bit
    return Valuation(assignment)
