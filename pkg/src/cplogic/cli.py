"""Batch command-line front end.

Every command reads one input (a file argument or stdin), writes a
one-token verdict as the first stdout line followed by the artifact,
and reports diagnostics on stderr.  Exit codes: 0 success / valid /
proved / ok; 1 semantically negative (invalid, refuted, check error,
bound not reached); 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .syntax import free_names, formula_atoms
from .semantics import (
    all_valuations, bool_of, decide, eval_formula, measure,
    SemanticsError,
)
from .normalform import (
    NormalFormError, export_wagner, pnf, ppnf, print_wagner,
)
from .prover import CheckFailure, check_derivation, prove
from .lambda_nu import (
    TermError, distribution, normal_prob, normalizes_with_prob, pnf_term,
    print_distribution, reduce_term,
)
from .lcpl import TypeCheckFailure, check_type_derivation, translate_judgment
from .mcpl import McplCheckFailure, check_mcpl_derivation, decorate, parse_mcpl_derivation
from . import textio
from .textio import ParseError


def _read_input(args) -> str:
    if args.input and args.input != "-":
        with open(args.input, "r", encoding="utf-8") as f:
            return f.read()
    return sys.stdin.read()


def _out(*lines):
    for line in lines:
        print(line)


def cmd_parse(args) -> int:
    text = _read_input(args)
    parsers = {
        "formula": (textio.parse_formula, textio.print_formula),
        "bool": (textio.parse_bool, textio.print_bool),
        "sequent": (textio.parse_sequent, textio.print_sequent),
        "term": (textio.parse_term, textio.print_term),
        "type": (textio.parse_type, textio.print_type),
        "judgment": (textio.parse_judgment, textio.print_judgment),
    }
    parse, pprint = parsers[args.kind]
    value = parse(text)
    _out("ok", pprint(value))
    return 0


def cmd_measure(args) -> int:
    a = textio.parse_formula(_read_input(args))
    b = bool_of(a, free_names(a))
    _out(textio.print_rational(measure(b)))
    return 0


def _decide_by_oracle(a):
    names = free_names(a)
    atoms = sorted(formula_atoms(a), key=lambda p: (p[1], p[0]))
    hits = 0
    total = 0
    for f in all_valuations(atoms):
        total += 1
        if eval_formula(a, f, names):
            hits += 1
    if hits == total:
        return "valid", None
    if hits == 0:
        return "invalid", None
    return "contingent", Fraction(hits, total)


def cmd_decide(args) -> int:
    a = textio.parse_formula(_read_input(args))
    if args.oracle:
        kind, m = _decide_by_oracle(a)
    else:
        v = decide(a, free_names(a))
        kind, m = v.kind, v.measure
    if kind == "contingent":
        _out("contingent", textio.print_rational(m))
    else:
        _out(kind)
    return 0 if kind == "valid" else 1


def cmd_pnf(args) -> int:
    a = textio.parse_formula(_read_input(args))
    p = pnf(a)
    _out("ok", textio.print_formula(p.to_formula()))
    return 0


def cmd_ppnf(args) -> int:
    a = textio.parse_formula(_read_input(args))
    p = ppnf(a)
    _out("ok", textio.print_formula(p.to_formula()))
    return 0


def cmd_wagner(args) -> int:
    a = textio.parse_formula(_read_input(args))
    w = export_wagner(ppnf(a), precision=args.precision)
    verdict = "ok" if all(b.exact for b in w.blocks) else "inexact"
    _out(verdict, print_wagner(w))
    return 0


def cmd_prove(args) -> int:
    s = textio.parse_sequent(_read_input(args))
    outcome = prove(s)
    if outcome.proved:
        _out("proved", textio.print_derivation(outcome.derivation))
        return 0
    _out("refuted",
         textio.print_sequent(outcome.witness_sequent),
         textio.print_valuation(outcome.witness_valuation))
    return 1


def cmd_check_proof(args) -> int:
    d = textio.parse_derivation(_read_input(args))
    try:
        check_derivation(d)
    except CheckFailure as e:
        _out(f"error: {e}")
        return 1
    _out("ok")
    return 0


def cmd_term_pnf(args) -> int:
    t = textio.parse_term(_read_input(args))
    _out("ok", textio.print_term(pnf_term(t)))
    return 0


def cmd_term_dist(args) -> int:
    t = textio.parse_term(_read_input(args))
    _out("ok", print_distribution(distribution(t)))
    return 0


def cmd_term_normal_prob(args) -> int:
    t = textio.parse_term(_read_input(args))
    if args.bound is not None:
        bound = _parse_fraction(args.bound)
        if normalizes_with_prob(t, bound, args.fuel):
            _out("reached")
            return 0
        _out("not-reached")
        return 1
    _out(textio.print_rational(normal_prob(t)))
    return 0


def cmd_term_reduce(args) -> int:
    t = textio.parse_term(_read_input(args))
    r = reduce_term(t, args.fuel)
    _out("exhausted" if r.exhausted else "normal", textio.print_term(r.term))
    return 0


def cmd_typecheck(args) -> int:
    d = textio.parse_type_derivation(_read_input(args))
    try:
        check_type_derivation(d)
    except TypeCheckFailure as e:
        _out(f"error: {e}")
        return 1
    _out("ok")
    return 0


def cmd_mcpl_check(args) -> int:
    d = parse_mcpl_derivation(_read_input(args))
    try:
        check_mcpl_derivation(d)
    except McplCheckFailure as e:
        _out(f"error: {e}")
        return 1
    if args.decorate:
        term, td = decorate(d)
        _out("ok", textio.print_term(term), textio.print_type_derivation(td))
    else:
        _out("ok")
    return 0


def cmd_translate(args) -> int:
    d = textio.parse_type_derivation(_read_input(args))
    try:
        check_type_derivation(d)
    except TypeCheckFailure as e:
        _out(f"error: {e}")
        return 1
    s = translate_judgment(d.judgment)
    from .semantics import sequent_valid
    ok = sequent_valid(s)
    _out("valid" if ok else "invalid", textio.print_sequent(s))
    return 0 if ok else 1


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cpl",
        description="counting propositional logic toolbox")
    ap.add_argument("--jobs", type=int, default=1,
                    help="parallelism hint (commands run sequentially)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", default="-",
                       help="input file (default: stdin)")
        p.set_defaults(fn=fn)
        return p

    p = add("parse", cmd_parse)
    p.add_argument("--kind", default="formula",
                   choices=["formula", "bool", "sequent", "term", "type", "judgment"])
    add("measure", cmd_measure)
    p = add("decide", cmd_decide)
    p.add_argument("--oracle", action="store_true",
                   help="decide by brute-force evaluation instead of the Bool translation")
    add("pnf", cmd_pnf)
    add("ppnf", cmd_ppnf)
    p = add("wagner", cmd_wagner)
    p.add_argument("--precision", type=int, default=None,
                   help="dyadic exponent for rounding non-dyadic thresholds")
    add("prove", cmd_prove)
    add("check-proof", cmd_check_proof)
    add("term-pnf", cmd_term_pnf)
    add("term-dist", cmd_term_dist)
    p = add("term-normal-prob", cmd_term_normal_prob)
    p.add_argument("--bound", default=None,
                   help="check reachability of this probability instead")
    p.add_argument("--fuel", type=int, default=200)
    p = add("term-reduce", cmd_term_reduce)
    p.add_argument("--fuel", type=int, default=200)
    add("typecheck", cmd_typecheck)
    p = add("mcpl-check", cmd_mcpl_check)
    p.add_argument("--decorate", action="store_true",
                   help="also print the decorated term and its typing derivation")
    add("translate", cmd_translate)
    return ap


def run(argv) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except (SemanticsError, NormalFormError, TermError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
