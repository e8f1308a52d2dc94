"""Precubical sets and higher-dimensional automata as finite cell tables.

Cells carry an interface-flagged, event-ordered label list and links to
their elementary lower/upper faces, one per event position.  A lower face
at position ``i`` exists exactly when ``i`` is not a source-interface
event, an upper face when it is not a target-interface event; composite
faces are computed, and the validator checks that elementary faces
commute.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import AxiomViolation, DocumentError, IllegalFace, InvalidMap
from .ipomset import IloSet

PLAIN = "plain"
IFACE = "iface"


# ---------------------------------------------------------------------------
# Cells and cell tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """One cell: id, its ilo-set of running events, elementary face links."""

    cid: str
    iev: IloSet
    d0: tuple[Optional[str], ...]
    d1: tuple[Optional[str], ...]

    @property
    def dim(self) -> int:
        return len(self.iev.labels)


def _drop(positions: Sequence, i: int) -> tuple:
    return tuple(x for k, x in enumerate(positions) if k != i)


def _reindex(flags: frozenset[int], removed: int) -> frozenset[int]:
    return frozenset(i if i < removed else i - 1
                     for i in flags if i != removed)


def face_iev(iev: IloSet, pos: int, upper: bool) -> IloSet:
    """Ilo-set of the elementary face removing ``pos``."""
    labels = _drop(iev.labels, pos)
    if upper:
        sources = _reindex(iev.sources - {pos}, pos)
        targets = _reindex(iev.targets, pos)
    else:
        sources = _reindex(iev.sources, pos)
        targets = _reindex(iev.targets - {pos}, pos)
    return IloSet(labels, sources, targets)


class PrecubeSet:
    """Immutable table of cells closed under elementary faces."""

    def __init__(self, cells: Mapping[str, Cell], kind: str = PLAIN):
        if kind not in (PLAIN, IFACE):
            raise AxiomViolation(f"unknown kind {kind!r}")
        self.cells: dict[str, Cell] = dict(cells)
        self.kind = kind
        self._reach: Optional[dict[str, frozenset[str]]] = None

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def cell(self, cid: str) -> Cell:
        return self.cells[cid]

    def ids(self) -> list[str]:
        return sorted(self.cells)

    def dim(self) -> int:
        return max((c.dim for c in self.cells.values()), default=0)

    # -- elementary and composite faces ------------------------------------

    def elem_face(self, cid: str, pos: int, upper: bool) -> Optional[str]:
        cell = self.cells[cid]
        if not (0 <= pos < cell.dim):
            raise IllegalFace(f"position {pos} out of range for {cid}")
        return (cell.d1 if upper else cell.d0)[pos]

    def face(self, cid: str, lower: Iterable[int], upper: Iterable[int]) -> str:
        """Composite face unstarting ``lower`` and terminating ``upper``
        (positions in the given cell); order-independent."""
        lower = set(lower)
        upper = set(upper)
        cell = self.cells[cid]
        if lower & upper:
            raise IllegalFace("lower and upper positions must be disjoint")
        if not all(0 <= p < cell.dim for p in lower | upper):
            raise IllegalFace(f"position out of range for {cid}")
        if lower & cell.iev.sources:
            raise IllegalFace("cannot unstart a source-interface event")
        if upper & cell.iev.targets:
            raise IllegalFace("cannot terminate a target-interface event")
        cur = cid
        # descending original positions, so earlier removals do not shift
        for p in sorted(lower | upper, reverse=True):
            nxt = self.elem_face(cur, p, upper=p in upper)
            if nxt is None:
                raise IllegalFace(f"face at position {p} missing on {cur}")
            cur = nxt
        return cur

    # -- reachability --------------------------------------------------------

    def reach(self) -> dict[str, frozenset[str]]:
        """Reachability preorder: ``b in reach()[a]`` iff some path runs
        from ``a`` to ``b`` (generated by lower faces before their cell,
        cells before their upper faces)."""
        if self._reach is None:
            succ: dict[str, set[str]] = {cid: set() for cid in self.cells}
            for cid, cell in self.cells.items():
                for f in cell.d0:
                    if f is not None:
                        succ[f].add(cid)
                for f in cell.d1:
                    if f is not None:
                        succ[cid].add(f)
            out = {}
            for cid in self.cells:
                seen = {cid}
                stack = [cid]
                while stack:
                    cur = stack.pop()
                    for nxt in succ[cur]:
                        if nxt not in seen:
                            seen.add(nxt)
                            stack.append(nxt)
                out[cid] = frozenset(seen)
            self._reach = out
        return self._reach

    def acyclic(self) -> bool:
        r = self.reach()
        return all(a == b or a not in r[b]
                   for a in self.cells for b in r[a])

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of violations; empty means the table is valid."""
        errs: list[str] = []
        for cid, cell in self.cells.items():
            n = cell.dim
            if len(cell.d0) != n or len(cell.d1) != n:
                errs.append(f"{cid}: face arity does not match dimension")
                continue
            if self.kind == PLAIN and not cell.iev.plain:
                errs.append(f"{cid}: interface flags on a plain cell table")
            for pos in range(n):
                for upper in (False, True):
                    flags = cell.iev.targets if upper else cell.iev.sources
                    link = (cell.d1 if upper else cell.d0)[pos]
                    name = "upper" if upper else "lower"
                    if pos in flags:
                        if link is not None:
                            errs.append(
                                f"{cid}: {name} face at {pos} not permitted")
                        continue
                    if link is None:
                        errs.append(f"{cid}: missing {name} face at {pos}")
                        continue
                    if link not in self.cells:
                        errs.append(f"{cid}: dangling face id {link}")
                        continue
                    want = face_iev(cell.iev, pos, upper)
                    if self.cells[link].iev != want:
                        errs.append(
                            f"{cid}: face {link} has ilo-set "
                            f"{self.cells[link].iev.word()!r}, expected "
                            f"{want.word()!r}")
            # elementary faces commute
            for i in range(n):
                for j in range(i + 1, n):
                    for ui in (False, True):
                        for uj in (False, True):
                            a = self._try_face2(cid, j, uj, i, ui)
                            b = self._try_face2(cid, i, ui, j - 1, uj)
                            if a != b:
                                errs.append(
                                    f"{cid}: faces at {i}/{j} "
                                    f"({int(ui)},{int(uj)}) do not commute")
        return errs

    def _try_face2(self, cid, p1, u1, p2, u2):
        cell = self.cells[cid]
        f1 = (cell.d1 if u1 else cell.d0)[p1]
        if f1 is None or f1 not in self.cells:
            return None
        c1 = self.cells[f1]
        if not (0 <= p2 < c1.dim):
            return None
        return (c1.d1 if u2 else c1.d0)[p2]


# ---------------------------------------------------------------------------
# HDAs
# ---------------------------------------------------------------------------


@dataclass
class Hda:
    """A finite cell table with start and accept cells (any dimension)."""

    pcset: PrecubeSet
    start: frozenset[str] = frozenset()
    accept: frozenset[str] = frozenset()

    @property
    def kind(self) -> str:
        return self.pcset.kind

    @property
    def cells(self) -> dict[str, Cell]:
        return self.pcset.cells

    def cell(self, cid: str) -> Cell:
        return self.pcset.cell(cid)

    def dim(self) -> int:
        return self.pcset.dim()

    def validate(self) -> list[str]:
        errs = self.pcset.validate()
        for cid in self.start | self.accept:
            if cid not in self.pcset.cells:
                errs.append(f"marker {cid} is not a cell")
        if self.kind == IFACE:
            for cid in self.start:
                if cid in self.pcset.cells:
                    iev = self.cell(cid).iev
                    if iev.sources != frozenset(range(len(iev))):
                        errs.append(f"start cell {cid} has S != U")
            for cid in self.accept:
                if cid in self.pcset.cells:
                    iev = self.cell(cid).iev
                    if iev.targets != frozenset(range(len(iev))):
                        errs.append(f"accept cell {cid} has T != U")
        return errs


def empty_hda(kind: str = PLAIN) -> Hda:
    return Hda(PrecubeSet({}, kind), frozenset(), frozenset())


def point_hda(start: bool = True, accept: bool = True) -> Hda:
    cells = {"v": Cell("v", IloSet(()), (), ())}
    return Hda(PrecubeSet(cells, PLAIN),
               frozenset(["v"] if start else []),
               frozenset(["v"] if accept else []))


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


@dataclass
class PcMap:
    """A total cell function between cell tables (or HDAs)."""

    src: Union[Hda, PrecubeSet]
    dst: Union[Hda, PrecubeSet]
    mapping: dict[str, str]

    @staticmethod
    def _table(x) -> PrecubeSet:
        return x.pcset if isinstance(x, Hda) else x

    def src_table(self) -> PrecubeSet:
        return self._table(self.src)

    def dst_table(self) -> PrecubeSet:
        return self._table(self.dst)

    def __call__(self, cid: str) -> str:
        return self.mapping[cid]

    def image(self) -> frozenset[str]:
        return frozenset(self.mapping.values())

    def injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)

    def validate(self, check_markers: bool = False) -> list[str]:
        errs: list[str] = []
        s, d = self.src_table(), self.dst_table()
        if set(self.mapping) != set(s.cells):
            errs.append("mapping domain is not the full source cell set")
            return errs
        for cid, tid in self.mapping.items():
            if tid not in d.cells:
                errs.append(f"{cid} maps to unknown cell {tid}")
                continue
            if s.cells[cid].iev != d.cells[tid].iev:
                errs.append(f"{cid} -> {tid} changes the ilo-set")
                continue
            cs, cd = s.cells[cid], d.cells[tid]
            for pos in range(cs.dim):
                for upper in (False, True):
                    fs = (cs.d1 if upper else cs.d0)[pos]
                    fd = (cd.d1 if upper else cd.d0)[pos]
                    if (fs is None) != (fd is None):
                        errs.append(f"{cid} -> {tid}: face pattern differs")
                    elif fs is not None and self.mapping.get(fs) != fd:
                        errs.append(
                            f"{cid} -> {tid}: face at {pos} not preserved")
        if check_markers:
            if not isinstance(self.src, Hda) or not isinstance(self.dst, Hda):
                errs.append("marker check requires HDA endpoints")
            else:
                for cid in self.src.start:
                    if self.mapping.get(cid) not in self.dst.start:
                        errs.append(f"start cell {cid} not sent to a start cell")
                for cid in self.src.accept:
                    if self.mapping.get(cid) not in self.dst.accept:
                        errs.append(f"accept cell {cid} not sent to an accept cell")
        return errs

    def require_valid(self, check_markers: bool = False) -> "PcMap":
        errs = self.validate(check_markers)
        if errs:
            raise InvalidMap("; ".join(errs))
        return self


def compose_maps(f: PcMap, g: PcMap) -> PcMap:
    """g after f."""
    return PcMap(f.src, g.dst, {c: g.mapping[t] for c, t in f.mapping.items()})


# ---------------------------------------------------------------------------
# Standard cubes and Yoneda maps
# ---------------------------------------------------------------------------


def _subset_key(positions: Iterable[int]) -> str:
    return "".join(str(p) for p in sorted(positions))


def cube_cell_id(lower: Iterable[int], upper: Iterable[int]) -> str:
    return f"[{_subset_key(lower)}|{_subset_key(upper)}]"


def standard_cube(u: IloSet) -> tuple[PrecubeSet, str]:
    """The representable cell table of an ilo-set.

    Cells are pairs ``[A|B]`` of disjoint position sets (A unstarted,
    B terminated) avoiding the interfaces; returns the table and the id
    of the top cell ``[|]``.
    """
    n = len(u.labels)
    kind = PLAIN if u.plain else IFACE
    cells: dict[str, Cell] = {}
    all_pos = range(n)
    a_candidates = [p for p in all_pos if p not in u.sources]
    b_candidates = [p for p in all_pos if p not in u.targets]
    for a_bits in _subsets(a_candidates):
        for b_bits in _subsets(b_candidates):
            a, b = set(a_bits), set(b_bits)
            if a & b:
                continue
            active = [p for p in all_pos if p not in a and p not in b]
            labels = tuple(u.labels[p] for p in active)
            srcs = frozenset(i for i, p in enumerate(active) if p in u.sources)
            tgts = frozenset(i for i, p in enumerate(active) if p in u.targets)
            d0, d1 = [], []
            for i, p in enumerate(active):
                d0.append(None if p in u.sources
                          else cube_cell_id(a | {p}, b))
                d1.append(None if p in u.targets
                          else cube_cell_id(a, b | {p}))
            cid = cube_cell_id(a, b)
            cells[cid] = Cell(cid, IloSet(labels, srcs, tgts),
                              tuple(d0), tuple(d1))
    return PrecubeSet(cells, kind), cube_cell_id((), ())


def _subsets(items: Sequence[int]):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def cube_face_pair(cid: str) -> tuple[frozenset[int], frozenset[int]]:
    """Decode a cube cell id back into its (lower, upper) position sets."""
    body = cid.strip("[]")
    a, _, b = body.partition("|")
    return (frozenset(int(ch) for ch in a), frozenset(int(ch) for ch in b))


def yoneda(x: Union[Hda, PrecubeSet], cid: str) -> PcMap:
    """The unique cell-table map from the standard cube of ``iev(cid)``
    sending the top cell to ``cid``."""
    table = x.pcset if isinstance(x, Hda) else x
    cube, _top = standard_cube(table.cell(cid).iev)
    mapping = {}
    for ccid in cube.cells:
        a, b = cube_face_pair(ccid)
        mapping[ccid] = table.face(cid, a, b)
    return PcMap(cube, x, mapping)


# ---------------------------------------------------------------------------
# Reversal, tensor, coproduct
# ---------------------------------------------------------------------------


def reverse_hda(x: Hda) -> Hda:
    """Swap lower and upper faces, source and target flags, start and
    accept cells; an involution."""
    cells = {}
    for cid, c in x.cells.items():
        cells[cid] = Cell(cid, IloSet(c.iev.labels, c.iev.targets,
                                      c.iev.sources), c.d1, c.d0)
    return Hda(PrecubeSet(cells, x.kind), x.accept, x.start)


def tensor(x: Hda, y: Hda) -> Hda:
    """Parallel composition of plain HDAs: cells are pairs, the event list
    of a pair puts all first-component events before the second's."""
    if x.kind != PLAIN or y.kind != PLAIN:
        raise AxiomViolation("tensor is defined for plain HDAs")
    cells: dict[str, Cell] = {}

    def pid(a: str, b: str) -> str:
        return f"({a})*({b})"

    for (xa, ca), (yb, cb) in itertools.product(
            x.cells.items(), y.cells.items()):
        labels = ca.iev.labels + cb.iev.labels
        nx = ca.dim
        d0 = [pid(ca.d0[i], yb) if i < nx else pid(xa, cb.d0[i - nx])
              for i in range(len(labels))]
        d1 = [pid(ca.d1[i], yb) if i < nx else pid(xa, cb.d1[i - nx])
              for i in range(len(labels))]
        cid = pid(xa, yb)
        cells[cid] = Cell(cid, IloSet(labels), tuple(d0), tuple(d1))
    return Hda(
        PrecubeSet(cells, PLAIN),
        frozenset(pid(a, b) for a in x.start for b in y.start),
        frozenset(pid(a, b) for a in x.accept for b in y.accept),
    )


def coproduct(parts: Sequence[Hda]) -> Hda:
    """Disjoint union; cell ids get a positional prefix."""
    if not parts:
        return empty_hda()
    kinds = {p.kind for p in parts}
    if len(kinds) != 1:
        raise AxiomViolation("coproduct parts must share a kind")
    cells: dict[str, Cell] = {}
    start: set[str] = set()
    accept: set[str] = set()
    for k, part in enumerate(parts):
        pre = f"{k}."

        def rn(cid, pre=pre):
            return None if cid is None else pre + cid

        for cid, c in part.cells.items():
            cells[pre + cid] = Cell(pre + cid, c.iev,
                                    tuple(rn(f) for f in c.d0),
                                    tuple(rn(f) for f in c.d1))
        start.update(pre + s for s in part.start)
        accept.update(pre + a for a in part.accept)
    return Hda(PrecubeSet(cells, parts[0].kind),
               frozenset(start), frozenset(accept))


# ---------------------------------------------------------------------------
# Resolution and closure
# ---------------------------------------------------------------------------


def resolve(x: Hda) -> Hda:
    """Free interface assignment: every cell spawns one copy per pair of
    interface subsets; language-preserving."""
    if x.kind != PLAIN:
        raise AxiomViolation("resolve is defined for plain HDAs")

    def rid(cid: str, s: Iterable[int], t: Iterable[int]) -> str:
        return f"{cid};{_subset_key(s)};{_subset_key(t)}"

    cells: dict[str, Cell] = {}
    for cid, c in x.cells.items():
        positions = list(range(c.dim))
        for s_bits in _subsets(positions):
            for t_bits in _subsets(positions):
                s, t = frozenset(s_bits), frozenset(t_bits)
                d0, d1 = [], []
                for i in positions:
                    d0.append(None if i in s else rid(
                        c.d0[i], _reindex(s, i), _reindex(t - {i}, i)))
                    d1.append(None if i in t else rid(
                        c.d1[i], _reindex(s - {i}, i), _reindex(t, i)))
                ncid = rid(cid, s, t)
                cells[ncid] = Cell(ncid, IloSet(c.iev.labels, s, t),
                                   tuple(d0), tuple(d1))
    start = set()
    for cid in x.start:
        n = x.cell(cid).dim
        full = frozenset(range(n))
        for t_bits in _subsets(list(range(n))):
            start.add(rid(cid, full, frozenset(t_bits)))
    accept = set()
    for cid in x.accept:
        n = x.cell(cid).dim
        full = frozenset(range(n))
        for s_bits in _subsets(list(range(n))):
            accept.add(rid(cid, frozenset(s_bits), full))
    return Hda(PrecubeSet(cells, IFACE), frozenset(start), frozenset(accept))


def closure_cell_id(cid: str, a: Iterable[int], b: Iterable[int]) -> str:
    """Id scheme of :func:`close`: base cell plus unstarted/terminated
    interface position sets (positions of the base cell)."""
    return f"{cid};{_subset_key(a)};{_subset_key(b)}"


def close(x: Hda) -> Hda:
    """Fill in the faces suppressed by interfaces: cells are pairs of a base
    cell with sets of already-unstarted source events and already-terminated
    target events; language-preserving."""
    if x.kind != IFACE:
        raise AxiomViolation("close is defined for cell tables with interfaces")

    kid = closure_cell_id
    cells: dict[str, Cell] = {}
    for cid, c in x.cells.items():
        srcs, tgts = c.iev.sources, c.iev.targets
        for a_bits in _subsets(sorted(srcs)):
            for b_bits in _subsets(sorted(tgts)):
                a, b = frozenset(a_bits), frozenset(b_bits)
                if a & b:
                    continue
                active = [p for p in range(c.dim) if p not in a | b]
                labels = tuple(c.iev.labels[p] for p in active)
                d0, d1 = [], []
                for p in active:
                    if p in srcs:
                        d0.append(kid(cid, a | {p}, b))
                    else:
                        base = c.d0[p]
                        d0.append(kid(base, _reindex(a, p), _reindex(b, p)))
                    if p in tgts:
                        d1.append(kid(cid, a, b | {p}))
                    else:
                        base = c.d1[p]
                        d1.append(kid(base, _reindex(a, p), _reindex(b, p)))
                ncid = kid(cid, a, b)
                cells[ncid] = Cell(ncid, IloSet(labels), tuple(d0), tuple(d1))
    return Hda(
        PrecubeSet(cells, PLAIN),
        frozenset(kid(cid, (), ()) for cid in x.start),
        frozenset(kid(cid, (), ()) for cid in x.accept),
    )


# ---------------------------------------------------------------------------
# Housekeeping: relabel, trim, isomorphism
# ---------------------------------------------------------------------------


def relabel(x: Hda, prefix: str = "c") -> tuple[Hda, dict[str, str]]:
    """Renumber cell ids deterministically (sorted by old id)."""
    names = {old: f"{prefix}{k}" for k, old in enumerate(sorted(x.cells))}
    cells = {}
    for old, c in x.cells.items():
        nid = names[old]
        cells[nid] = Cell(
            nid, c.iev,
            tuple(None if f is None else names[f] for f in c.d0),
            tuple(None if f is None else names[f] for f in c.d1))
    out = Hda(PrecubeSet(cells, x.kind),
              frozenset(names[s] for s in x.start),
              frozenset(names[a] for a in x.accept))
    return out, names


def trim(x: Hda) -> Hda:
    """Restrict to cells lying on some start-to-accept path, then close
    under faces; the language is unchanged."""
    reach = x.pcset.reach()
    fwd: set[str] = set()
    for s in x.start:
        fwd |= reach[s]
    useful = {c for c in fwd if any(a in reach[c] for a in x.accept)}
    keep: set[str] = set()
    stack = list(useful)
    while stack:
        cid = stack.pop()
        if cid in keep:
            continue
        keep.add(cid)
        c = x.cell(cid)
        for f in itertools.chain(c.d0, c.d1):
            if f is not None and f not in keep:
                stack.append(f)
    cells = {cid: c for cid, c in x.cells.items() if cid in keep}
    return Hda(PrecubeSet(cells, x.kind),
               x.start & useful, x.accept & useful)


def iso_cell_tables(x: Union[Hda, PrecubeSet], y: Union[Hda, PrecubeSet]) -> bool:
    """Search for an isomorphism of cell tables (face-commuting bijection
    preserving ilo-sets).  Start/accept markers are ignored."""
    tx = x.pcset if isinstance(x, Hda) else x
    ty = y.pcset if isinstance(y, Hda) else y
    if len(tx.cells) != len(ty.cells):
        return False
    xs = sorted(tx.cells, key=lambda c: (-tx.cells[c].dim, c))
    pools: dict[str, list[str]] = {}
    for cid in xs:
        pools[cid] = sorted(d for d, cell in ty.cells.items()
                            if cell.iev == tx.cells[cid].iev)
        if not pools[cid]:
            return False
    cofaces: dict[str, list[tuple[str, int, bool]]] = {c: [] for c in tx.cells}
    for cid, c in tx.cells.items():
        for pos in range(c.dim):
            for upper in (False, True):
                f = (c.d1 if upper else c.d0)[pos]
                if f is not None:
                    cofaces[f].append((cid, pos, upper))

    assigned: dict[str, str] = {}
    used: set[str] = set()

    def consistent(cid: str, did: str) -> bool:
        cx, cy = tx.cells[cid], ty.cells[did]
        for pos in range(cx.dim):
            for upper in (False, True):
                fx = (cx.d1 if upper else cx.d0)[pos]
                fy = (cy.d1 if upper else cy.d0)[pos]
                if (fx is None) != (fy is None):
                    return False
                if fx is not None and fx in assigned and assigned[fx] != fy:
                    return False
        for par, pos, upper in cofaces[cid]:
            if par in assigned:
                cp = ty.cells[assigned[par]]
                if ((cp.d1 if upper else cp.d0)[pos]) != did:
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(xs):
            return True
        cid = xs[k]
        for did in pools[cid]:
            if did in used or not consistent(cid, did):
                continue
            assigned[cid] = did
            used.add(did)
            if search(k + 1):
                return True
            del assigned[cid]
            used.discard(did)
        return False

    return search(0)


# ---------------------------------------------------------------------------
# Interchange documents
# ---------------------------------------------------------------------------


def to_doc(x: Hda, alphabet: Optional[Sequence[str]] = None) -> dict:
    """Serialise an HDA to the JSON interchange structure."""
    if alphabet is None:
        alphabet = sorted({lab for c in x.cells.values()
                           for lab in c.iev.labels})
    cells = []
    for cid in sorted(x.cells):
        c = x.cells[cid]
        cells.append({
            "id": cid,
            "labels": list(c.iev.labels),
            "sflags": sorted(c.iev.sources),
            "tflags": sorted(c.iev.targets),
            "d0": list(c.d0),
            "d1": list(c.d1),
        })
    return {
        "alphabet": list(alphabet),
        "kind": x.kind,
        "cells": cells,
        "start": sorted(x.start),
        "accept": sorted(x.accept),
    }


def from_doc(doc: dict) -> Hda:
    """Parse and validate the JSON interchange structure."""
    try:
        kind = doc["kind"]
        raw_cells = doc["cells"]
        start = frozenset(doc.get("start", []))
        accept = frozenset(doc.get("accept", []))
        alphabet = set(doc.get("alphabet", []))
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed document: {exc}")
    cells: dict[str, Cell] = {}
    for entry in raw_cells:
        try:
            cid = entry["id"]
            iev = IloSet(tuple(entry["labels"]),
                         frozenset(entry.get("sflags", [])),
                         frozenset(entry.get("tflags", [])))
            cell = Cell(cid, iev,
                        tuple(entry["d0"]), tuple(entry["d1"]))
        except (KeyError, TypeError, AxiomViolation) as exc:
            raise DocumentError(f"malformed cell entry: {exc}")
        if cid in cells:
            raise DocumentError(f"duplicate cell id {cid}")
        if alphabet and not set(iev.labels) <= alphabet:
            raise DocumentError(f"cell {cid} uses labels outside the alphabet")
        cells[cid] = cell
    hda = Hda(PrecubeSet(cells, kind), start, accept)
    errs = hda.validate()
    if errs:
        raise DocumentError("invalid cell table: " + "; ".join(errs[:5]))
    return hda


def dumps_doc(x: Hda) -> str:
    return json.dumps(to_doc(x), indent=2) + "\n"


def load_hda(path: str) -> Hda:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"not valid JSON: {exc}")
    return from_doc(doc)


def save_hda(x: Hda, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_doc(x))
