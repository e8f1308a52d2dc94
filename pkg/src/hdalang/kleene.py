"""Both compiler directions between rational expressions and recognisers.

Compilation is structural: atoms map to fixed one-edge recognisers, union
to coproduct, parallel to tensor, gluing to the properize-close-glue
pipeline, and plus to the identity-splitting plus construction.
Extraction goes through a standard automaton whose letters are discrete
ipomsets, eliminated state by state into an expression whose only
operations are union, gluing, parallel, and plus.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from . import pcset as pc
from . import surgery as sg
from .errors import IdentityOverlap, SizeCeiling
from .ipomset import IloSet
from .langset import (
    AtomExpr,
    EmptyExpr,
    EpsExpr,
    GlueExpr,
    ParExpr,
    PlusExpr,
    RatExpr,
    UnionExpr,
    rglue,
    rplus,
    runion,
)
from .pcset import Cell, Hda, PrecubeSet, coproduct, empty_hda, point_hda, \
    relabel, tensor, trim


# ---------------------------------------------------------------------------
# Expression -> HDA
# ---------------------------------------------------------------------------


def atom_recognizer(label: str, source: bool, target: bool) -> Hda:
    """One labelled edge; interface flags move the start/accept marker onto
    the edge itself, so the event is already running / never terminated."""
    cells = {
        "v0": Cell("v0", IloSet(()), (), ()),
        "v1": Cell("v1", IloSet(()), (), ()),
        "e": Cell("e", IloSet((label,)), ("v0",), ("v1",)),
    }
    start = frozenset(["e" if source else "v0"])
    accept = frozenset(["e" if target else "v1"])
    return trim(Hda(PrecubeSet(cells, pc.PLAIN), start, accept))


def compile_expr(e: RatExpr, ceiling: int = 200000) -> Hda:
    """Compile an expression into a plain HDA recognising its language."""
    memo: dict[RatExpr, Hda] = {}

    def go(node: RatExpr) -> Hda:
        if node in memo:
            return memo[node]
        if isinstance(node, EmptyExpr):
            out = empty_hda()
        elif isinstance(node, EpsExpr):
            out = point_hda()
        elif isinstance(node, AtomExpr):
            out = atom_recognizer(node.label, node.source, node.target)
        elif isinstance(node, UnionExpr):
            out = relabel(coproduct([go(node.left), go(node.right)]))[0]
        elif isinstance(node, ParExpr):
            out = relabel(trim(tensor(go(node.left), go(node.right))))[0]
        elif isinstance(node, GlueExpr):
            out = sg.compose_serial(go(node.left), go(node.right),
                                    ceiling=ceiling)
        elif isinstance(node, PlusExpr):
            out = sg.kleene_plus(go(node.arg), ceiling=ceiling)
        else:
            raise TypeError(f"not a rational expression: {node!r}")
        if len(out.cells) > ceiling:
            raise SizeCeiling(
                f"compiled automaton beyond {ceiling} cells")
        memo[node] = out
        return out

    return go(e)


# ---------------------------------------------------------------------------
# HDA -> expression
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterleavingAutomaton:
    """Standard automaton over discrete-ipomset letters; states are cells,
    each transition starts or terminates one nonempty event set."""

    states: tuple[str, ...]
    transitions: tuple[tuple[str, IloSet, str], ...]
    start: frozenset[str]
    accept: frozenset[str]


def interleaving_automaton(x: Hda) -> InterleavingAutomaton:
    if x.start & x.accept:
        raise IdentityOverlap(sorted(x.start & x.accept)[:3])
    table = x.pcset
    transitions: list[tuple[str, IloSet, str]] = []
    for cid in sorted(table.cells):
        cell = table.cells[cid]
        n = cell.dim
        full = frozenset(range(n))
        lower_ok = [p for p in range(n) if p not in cell.iev.sources]
        upper_ok = [p for p in range(n) if p not in cell.iev.targets]
        for a in _nonempty_subsets(lower_ok):
            src = table.face(cid, a, ())
            letter = IloSet(cell.iev.labels, full - frozenset(a), full)
            transitions.append((src, letter, cid))
        for b in _nonempty_subsets(upper_ok):
            dst = table.face(cid, (), b)
            letter = IloSet(cell.iev.labels, full, full - frozenset(b))
            transitions.append((cid, letter, dst))
    return InterleavingAutomaton(
        tuple(sorted(table.cells)), tuple(transitions), x.start, x.accept)


def _nonempty_subsets(items):
    import itertools
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)


def letter_expr(letter: IloSet) -> RatExpr:
    """A discrete ipomset as a parallel composition of flagged atoms."""
    atoms = [AtomExpr(lab, i in letter.sources, i in letter.targets)
             for i, lab in enumerate(letter.labels)]
    if not atoms:
        return EpsExpr()
    return reduce(ParExpr, atoms)


def _eliminate(automaton: InterleavingAutomaton) -> RatExpr:
    """State elimination, lowest degree first; stars are expanded on the
    spot (``r* s`` becomes ``s + r^+ ; s``), so only union, gluing and plus
    appear in the output."""
    SRC, SNK = "__source__", "__sink__"
    edges: dict[tuple[str, str], RatExpr] = {}

    def add(i: str, j: str, expr: RatExpr) -> None:
        if isinstance(expr, EmptyExpr):
            return
        edges[(i, j)] = runion(edges.get((i, j), EmptyExpr()), expr)

    for src, letter, dst in automaton.transitions:
        add(src, dst, letter_expr(letter))
    for s in automaton.start:
        add(SRC, s, EpsExpr())
    for t in automaton.accept:
        add(t, SNK, EpsExpr())

    remaining = set(automaton.states)
    while remaining:
        def degree(q: str) -> int:
            return sum(1 for (i, j) in edges if i == q or j == q)
        q = min(sorted(remaining), key=degree)
        remaining.discard(q)
        loop = edges.pop((q, q), None)
        ins = [(i, r) for (i, j), r in edges.items() if j == q and i != q]
        outs = [(j, r) for (i, j), r in edges.items() if i == q and j != q]
        for (i, j) in [k for k in edges if k[0] == q or k[1] == q]:
            del edges[(i, j)]
        for i, rin in ins:
            for j, rout in outs:
                add(i, j, rglue(rin, rout))
                if loop is not None:
                    add(i, j, rglue(rin, rglue(rplus(loop), rout)))
    return edges.get((SRC, SNK), EmptyExpr())


def extract(x: Hda) -> RatExpr:
    """An expression whose language equals the recogniser's language.

    The identity part is read off the cells that are both start and accept;
    the rest goes through identity subtraction and state elimination over
    the interleaving automaton.
    """
    id_words = sorted({x.cell(cid).iev.labels
                       for cid in x.start & x.accept})
    id_expr: RatExpr = EmptyExpr()
    for word in id_words:
        id_expr = runion(id_expr, letter_expr(
            IloSet(word, frozenset(range(len(word))),
                   frozenset(range(len(word))))))

    core = trim(sg.subtract_identities(x))
    main: RatExpr = EmptyExpr()
    if core.start and core.accept:
        main = _eliminate(interleaving_automaton(core))
    return runion(id_expr, main)
