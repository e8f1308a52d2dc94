"""Command-line front end.

Exit codes: 0 on success, 1 on a domain error (diagnostic on stderr),
2 on usage errors (argparse).  All outputs are byte-stable: languages are
dumped in canonical order, documents with sorted cell ids.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import ipomset as ip
from . import kleene as kl
from . import pathlang as pl
from . import pcset as pc
from . import surgery as sg
from .errors import HdaError
from .langset import (
    Truncation,
    dump_language,
    eval_expr,
    expr_alphabet,
    format_expr,
    parse_expr,
)


def _truncation(args) -> Truncation:
    return Truncation.of(args.size, args.width)


def _check_alphabet(args, labels) -> None:
    if args.alphabet:
        declared = set(args.alphabet.split(","))
        extra = set(labels) - declared
        if extra:
            raise HdaError(
                f"labels outside the declared alphabet: {sorted(extra)}")


def _emit_hda(x: pc.Hda, out: Optional[str]) -> None:
    text = pc.dumps_doc(x)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_parse(args) -> int:
    e = parse_expr(args.expr)
    _check_alphabet(args, expr_alphabet(e))
    print(format_expr(e))
    return 0


def _cmd_eval(args) -> int:
    e = parse_expr(args.expr)
    _check_alphabet(args, expr_alphabet(e))
    sys.stdout.write(dump_language(eval_expr(e, _truncation(args))))
    return 0


def _cmd_compile(args) -> int:
    e = parse_expr(args.expr)
    _check_alphabet(args, expr_alphabet(e))
    _emit_hda(kl.compile_expr(e, ceiling=args.ceiling), args.out)
    return 0


def _cmd_extract(args) -> int:
    x = pc.load_hda(args.hda)
    print(format_expr(kl.extract(x)))
    return 0


def _cmd_lang(args) -> int:
    x = pc.load_hda(args.hda)
    sys.stdout.write(dump_language(
        pl.enumerate_language(x, _truncation(args))))
    return 0


def _cmd_member(args) -> int:
    x = pc.load_hda(args.hda)
    p = ip.parse_ipomset(args.ipomset)
    by_paths = pl.member_by_paths(x, p)
    by_track = (pl.member_by_track(x, p)
                if x.kind == pc.PLAIN else by_paths)
    if by_paths != by_track:
        raise HdaError("membership oracles disagree; this is a bug")
    print("MEMBER" if by_paths else "NOT MEMBER")
    return 0


def _cmd_equiv(args) -> int:
    e = parse_expr(args.expr)
    x = pc.load_hda(args.hda)
    t = _truncation(args)
    want = eval_expr(e, t)
    got = pl.enumerate_language(x, t)
    if want.members == got.members:
        print("EQUIVALENT")
    else:
        print("DIFFER")
        missing = sorted(p.to_literal() for p in want.members - got.members)
        extra = sorted(p.to_literal() for p in got.members - want.members)
        for lit in missing[:10]:
            print(f"  only in expression: {lit}")
        for lit in extra[:10]:
            print(f"  only in automaton:  {lit}")
    return 0


def _cmd_validate(args) -> int:
    x = pc.load_hda(args.hda)  # raises DocumentError on violations
    errs = x.validate()
    if errs:
        for e in errs:
            print(e, file=sys.stderr)
        return 1
    print("OK")
    return 0


def _cmd_path(args) -> int:
    x = pc.load_hda(args.hda)
    path = pl.parse_path(x, args.path)
    print(pl.ev_path(x, path).to_literal())
    return 0


def _cmd_report(args) -> int:
    from . import report
    x = pc.load_hda(args.hda)
    for path in report.write_report(x, _truncation(args), args.outdir):
        print(path)
    return 0


def _cmd_op(args) -> int:
    op = args.operation
    x = pc.load_hda(args.hda)
    if op in ("tensor", "union", "glue"):
        if not args.rhs:
            raise HdaError(f"op {op} needs a second automaton")
        y = pc.load_hda(args.rhs)
        out = {
            "tensor": pc.tensor,
            "union": lambda a, b: pc.coproduct([a, b]),
            "glue": sg.compose_serial,
        }[op](x, y)
    elif op == "plus":
        out = sg.kleene_plus(x)
    elif op == "resolve":
        out = pc.resolve(x)
    elif op == "close":
        out = pc.close(x)
    elif op == "reverse":
        out = pc.reverse_hda(x)
    elif op == "cylinder":
        # pull both the start cells and the accept cells apart
        sp = sg.spider(x) if x.kind == pc.IFACE else sg.spider(
            pc.trim(pc.resolve(x)))
        out = sp.spider
    elif op == "properize":
        if x.kind == pc.PLAIN:
            x = pc.trim(pc.resolve(x))
        res = (sg.start_properize(x) if args.which == "start"
               else sg.accept_properize(x))
        out = res.hda
    elif op == "subtract-id":
        out = sg.subtract_identities(x)
    else:  # pragma: no cover - argparse restricts choices
        raise HdaError(f"unknown operation {op}")
    _emit_hda(out, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdalang",
        description="Higher-dimensional automata and ipomset languages")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_trunc(p):
        p.add_argument("--size", type=float, default=3.0,
                       help="maximal ipomset size (half-integers allowed)")
        p.add_argument("--width", type=int, default=2,
                       help="maximal ipomset width")

    def add_alphabet(p):
        p.add_argument("--alphabet", default=None,
                       help="comma-separated declared alphabet")

    p = sub.add_parser("parse", help="parse an expression and echo it")
    p.add_argument("expr")
    add_alphabet(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("eval", help="evaluate an expression to a language dump")
    p.add_argument("expr")
    add_trunc(p)
    add_alphabet(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compile", help="compile an expression to an automaton")
    p.add_argument("expr")
    p.add_argument("-o", "--out", default=None)
    p.add_argument("--ceiling", type=int, default=200000)
    add_alphabet(p)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("extract", help="extract an expression from an automaton")
    p.add_argument("hda")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("lang", help="enumerate the bounded language")
    p.add_argument("hda")
    add_trunc(p)
    p.set_defaults(func=_cmd_lang)

    p = sub.add_parser("member", help="decide bounded membership of a literal")
    p.add_argument("hda")
    p.add_argument("ipomset", help="ipomset literal, e.g. 'events: a, b; order: 0<1'")
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("equiv", help="compare expression and automaton languages")
    p.add_argument("--expr", required=True)
    p.add_argument("--hda", required=True)
    add_trunc(p)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("validate", help="validate an interchange document")
    p.add_argument("hda")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("path", help="replay a path literal and print its ipomset")
    p.add_argument("hda")
    p.add_argument("path", help="path literal, e.g. 'v0 U{a} e D{a} v1'")
    p.set_defaults(func=_cmd_path)

    p = sub.add_parser("report", help="write language dump and figures")
    p.add_argument("hda")
    p.add_argument("-o", "--outdir", default="report")
    add_trunc(p)
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("op", help="apply a construction to automata")
    p.add_argument("operation", choices=[
        "tensor", "union", "glue", "plus", "resolve", "close", "reverse",
        "cylinder", "properize", "subtract-id"])
    p.add_argument("hda")
    p.add_argument("rhs", nargs="?", default=None)
    p.add_argument("-o", "--out", default=None)
    p.add_argument("--which", choices=["start", "accept"], default="start",
                   help="side for properize")
    p.set_defaults(func=_cmd_op)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HdaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
