"""Finite truncated languages of interval ipomsets and rational expressions.

A language here is a down-closed set of interval ipomsets intersected with
a truncation window (maximal size and width), which keeps every value
finite over a finite alphabet.  The rational operations (union, gluing,
parallel, Kleene plus) are implemented directly on these windows; the
expression front end maps an AST onto them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from . import ipomset as ip
from .errors import ExprSyntaxError, TruncationMismatch
from .ipomset import Ipomset

# ---------------------------------------------------------------------------
# Truncation windows and languages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    """Window bounds: size is stored doubled so the field stays integral."""

    twice_size: int
    width: int

    def __post_init__(self):
        if self.twice_size < 0 or self.width < 0:
            raise ValueError("truncation bounds must be non-negative")

    @classmethod
    def of(cls, size: Union[int, float, Fraction], width: int) -> "Truncation":
        twice = int(2 * Fraction(size))
        return cls(twice, width)

    @property
    def size(self) -> Fraction:
        return Fraction(self.twice_size, 2)

    def admits(self, p: Ipomset) -> bool:
        return ip.twice_size(p) <= self.twice_size and ip.width(p) <= self.width


@dataclass(frozen=True)
class Language:
    """Members of a down-closed interval-ipomset language within a window."""

    members: frozenset[Ipomset]
    trunc: Truncation

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __contains__(self, p: Ipomset) -> bool:
        return p in self.members


def language(members: Iterable[Ipomset], trunc: Truncation) -> Language:
    """Build a language value, dropping members outside the window."""
    kept = frozenset(
        p for p in members if ip.is_interval(p) and trunc.admits(p))
    return Language(kept, trunc)


def is_down_closed_in_window(lang: Language) -> bool:
    """Re-derive the down-closure and check nothing inside the window is new."""
    closed = ip.down_close(lang.members)
    return all(not lang.trunc.admits(q) or q in lang.members for q in closed)


def _check_trunc(l: Language, m: Language) -> Truncation:
    if l.trunc != m.trunc:
        raise TruncationMismatch(f"{l.trunc} vs {m.trunc}")
    return l.trunc


def lang_union(l: Language, m: Language) -> Language:
    t = _check_trunc(l, m)
    return Language(l.members | m.members, t)


def lang_glue(l: Language, m: Language) -> Language:
    # size is invariant under subsumption, so composites over the size
    # bound can be dropped before down-closing; width cannot be used to
    # prune here since down-closure may shrink it back into the window
    t = _check_trunc(l, m)
    out: set[Ipomset] = set()
    for p in l.members:
        pt = p.interface_loset("target").labels
        for q in m.members:
            if pt != q.interface_loset("source").labels:
                continue
            glued = ip.glue(p, q)
            if ip.twice_size(glued) > t.twice_size:
                continue
            out.update(r for r in ip.down_close([glued]) if t.admits(r))
    return Language(frozenset(out), t)


def lang_parallel(l: Language, m: Language) -> Language:
    t = _check_trunc(l, m)
    out: set[Ipomset] = set()
    for p in l.members:
        for q in m.members:
            par = ip.parallel(p, q)
            if ip.twice_size(par) > t.twice_size:
                continue
            out.update(r for r in ip.down_close([par]) if t.admits(r))
    return Language(frozenset(out), t)


def lang_plus(l: Language) -> Language:
    """Least fixpoint of M ↦ L ∪ (M * L) inside the window.

    Identity members are units for gluing, so they are split off first
    and re-joined at the end; every remaining factor adds at least one
    half to the size, which bounds the iteration.
    """
    t = l.trunc
    idents = frozenset(p for p in l.members if p.is_identity())
    core = Language(l.members - idents, t)
    acc = core
    while True:
        nxt = lang_union(acc, lang_glue(acc, core))
        if nxt.members == acc.members:
            break
        acc = nxt
    return Language(acc.members | idents, t)


def lang_equal(l: Language, m: Language) -> bool:
    _check_trunc(l, m)
    return l.members == m.members


def lang_subset(l: Language, m: Language) -> bool:
    _check_trunc(l, m)
    return l.members <= m.members


# ---------------------------------------------------------------------------
# Rational expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatExpr:
    pass


@dataclass(frozen=True)
class EmptyExpr(RatExpr):
    pass


@dataclass(frozen=True)
class EpsExpr(RatExpr):
    pass


@dataclass(frozen=True)
class AtomExpr(RatExpr):
    label: str
    source: bool = False
    target: bool = False


@dataclass(frozen=True)
class UnionExpr(RatExpr):
    left: RatExpr
    right: RatExpr


@dataclass(frozen=True)
class GlueExpr(RatExpr):
    left: RatExpr
    right: RatExpr


@dataclass(frozen=True)
class ParExpr(RatExpr):
    left: RatExpr
    right: RatExpr


@dataclass(frozen=True)
class PlusExpr(RatExpr):
    arg: RatExpr


# smart constructors used by the extraction pipeline ------------------------


def runion(left: RatExpr, right: RatExpr) -> RatExpr:
    if isinstance(left, EmptyExpr):
        return right
    if isinstance(right, EmptyExpr):
        return left
    if left == right:
        return left
    return UnionExpr(left, right)


def rglue(left: RatExpr, right: RatExpr) -> RatExpr:
    if isinstance(left, EmptyExpr) or isinstance(right, EmptyExpr):
        return EmptyExpr()
    if isinstance(left, EpsExpr):
        return right
    if isinstance(right, EpsExpr):
        return left
    return GlueExpr(left, right)


def rplus(arg: RatExpr) -> RatExpr:
    if isinstance(arg, (EmptyExpr, EpsExpr, PlusExpr)):
        return arg
    return PlusExpr(arg)


# parser --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(\|\||\^\+|[()+;]|[01]|\.?[A-Za-z_][A-Za-z0-9_]*\.?)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


def parse_expr(text: str) -> RatExpr:
    """Parse an expression; precedence ``^+`` > ``||`` > ``;`` > ``+``."""
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i][0] if i < len(tokens) else None

    def advance():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def parse_union() -> RatExpr:
        node = parse_glue()
        while peek() == "+":
            advance()
            node = UnionExpr(node, parse_glue())
        return node

    def parse_glue() -> RatExpr:
        node = parse_par()
        while peek() == ";":
            advance()
            node = GlueExpr(node, parse_par())
        return node

    def parse_par() -> RatExpr:
        node = parse_plus()
        while peek() == "||":
            advance()
            node = ParExpr(node, parse_plus())
        return node

    def parse_plus() -> RatExpr:
        node = parse_atom()
        while peek() == "^+":
            advance()
            node = PlusExpr(node)
        return node

    def parse_atom() -> RatExpr:
        if i >= len(tokens):
            raise ExprSyntaxError("unexpected end of expression", len(text))
        tok, at = advance()
        if tok == "(":
            node = parse_union()
            if peek() != ")":
                raise ExprSyntaxError("missing closing parenthesis",
                                      tokens[i - 1][1] if i <= len(tokens) else len(text))
            advance()
            return node
        if tok == "0":
            return EmptyExpr()
        if tok == "1":
            return EpsExpr()
        if tok in (")", "+", ";", "||", "^+"):
            raise ExprSyntaxError(f"unexpected token {tok!r}", at)
        label, src, tgt = ip.parse_ilo_token(tok)
        return AtomExpr(label, src, tgt)

    node = parse_union()
    if i < len(tokens):
        raise ExprSyntaxError(f"trailing input {tokens[i][0]!r}", tokens[i][1])
    return node


def format_expr(e: RatExpr) -> str:
    """Render an AST back to the grammar (minimal parentheses)."""

    def prec(node: RatExpr) -> int:
        if isinstance(node, UnionExpr):
            return 0
        if isinstance(node, GlueExpr):
            return 1
        if isinstance(node, ParExpr):
            return 2
        return 3

    def go(node: RatExpr, parent: int) -> str:
        if isinstance(node, EmptyExpr):
            return "0"
        if isinstance(node, EpsExpr):
            return "1"
        if isinstance(node, AtomExpr):
            return ("." if node.source else "") + node.label + \
                ("." if node.target else "")
        if isinstance(node, PlusExpr):
            return go(node.arg, 3) + "^+"
        sym, my = {
            UnionExpr: (" + ", 0),
            GlueExpr: (" ; ", 1),
            ParExpr: (" || ", 2),
        }[type(node)]
        body = go(node.left, my) + sym + go(node.right, my + 1)
        return f"({body})" if my < parent else body

    return go(e, 0)


def expr_alphabet(e: RatExpr) -> frozenset[str]:
    if isinstance(e, AtomExpr):
        return frozenset([e.label])
    if isinstance(e, (UnionExpr, GlueExpr, ParExpr)):
        return expr_alphabet(e.left) | expr_alphabet(e.right)
    if isinstance(e, PlusExpr):
        return expr_alphabet(e.arg)
    return frozenset()


def eval_expr(e: RatExpr, trunc: Truncation) -> Language:
    """Denotational evaluation by structural recursion (shared subtrees are
    evaluated once, which matters for machine-generated expressions)."""
    cache: dict[RatExpr, Language] = {}

    def go(node: RatExpr) -> Language:
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, EmptyExpr):
            out = Language(frozenset(), trunc)
        elif isinstance(node, EpsExpr):
            out = language([ip.empty()], trunc)
        elif isinstance(node, AtomExpr):
            out = language(
                [ip.singleton(node.label, node.source, node.target)], trunc)
        elif isinstance(node, UnionExpr):
            out = lang_union(go(node.left), go(node.right))
        elif isinstance(node, GlueExpr):
            out = lang_glue(go(node.left), go(node.right))
        elif isinstance(node, ParExpr):
            out = lang_parallel(go(node.left), go(node.right))
        elif isinstance(node, PlusExpr):
            out = lang_plus(go(node.arg))
        else:
            raise TypeError(f"not a rational expression: {node!r}")
        cache[node] = out
        return out

    return go(e)


# ---------------------------------------------------------------------------
# Dumps
# ---------------------------------------------------------------------------


def _render_half(twice: int) -> str:
    return str(twice // 2) if twice % 2 == 0 else f"{twice // 2}.5"


def dump_language(lang: Language) -> str:
    """Byte-stable dump: truncation header, one canonical literal per line."""
    lines = [f"truncation: size={_render_half(lang.trunc.twice_size)} "
             f"width={lang.trunc.width}"]
    lines.extend(p.to_literal()
                 for p in sorted(lang.members, key=ip.literal_sort_key))
    return "\n".join(lines) + "\n"
