"""Gluing surgery on higher-dimensional automata.

Everything here is explicit combinatorics: quotients are union-find with
congruence closure over face links, cylinders are enumerated cell by
cell, and the properization / identity-subtraction / Kleene-plus
pipelines assemble those pieces into language-correct constructions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import pcset as pc
from .errors import (
    AxiomViolation,
    IllegalFace,
    ImagesNotDisjoint,
    NotSeparated,
    NotSimple,
    PreconditionViolation,
    ShapeMismatch,
    SizeCeiling,
)
from .ipomset import IloSet
from .pcset import (
    Cell,
    Hda,
    PcMap,
    PrecubeSet,
    close,
    coproduct,
    cube_face_pair,
    empty_hda,
    relabel,
    resolve,
    reverse_hda,
    standard_cube,
    trim,
    yoneda,
)

# dimension bound for cube subset enumeration inside cylinders
_MAX_CYLINDER_DIM = 3

BOT = "_bot"
TOP = "_top"


# ---------------------------------------------------------------------------
# Inclusions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InclusionReport:
    injective: bool
    face_closed: bool
    initial: bool
    final: bool


def classify_inclusion(m: PcMap) -> InclusionReport:
    """Check injectivity and whether the image is a sub-cell-table that is
    down- resp. up-closed under reachability."""
    m.require_valid()
    table = m.dst_table()
    image = m.image()
    face_closed = True
    for cid in image:
        c = table.cells[cid]
        for f in itertools.chain(c.d0, c.d1):
            if f is not None and f not in image:
                face_closed = False
    initial = face_closed
    final = face_closed
    for cid, c in table.cells.items():
        if cid in image:
            continue
        for f in c.d1:
            if f is not None and f in image:
                initial = False
        for f in c.d0:
            if f is not None and f in image:
                final = False
    return InclusionReport(m.injective(), face_closed, initial, final)


# ---------------------------------------------------------------------------
# Quotients (union-find with congruence closure)
# ---------------------------------------------------------------------------


def _quotient(
    cells: dict[str, Cell],
    pairs: Iterable[tuple[str, str]],
    kind: str,
) -> tuple[PrecubeSet, dict[str, str]]:
    parent: dict[str, str] = {cid: cid for cid in cells}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    queue = list(pairs)
    while queue:
        a, b = queue.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        ca, cb = cells[ra], cells[rb]
        if ca.iev != cb.iev:
            raise AxiomViolation(
                f"cannot identify {ra} with {rb}: ilo-sets differ")
        parent[ra] = rb
        for fa, fb in itertools.chain(zip(ca.d0, cb.d0), zip(ca.d1, cb.d1)):
            if fa is not None and fb is not None:
                queue.append((fa, fb))

    classes: dict[str, list[str]] = {}
    for cid in cells:
        classes.setdefault(find(cid), []).append(cid)
    rep = {root: min(members) for root, members in classes.items()}
    classmap = {cid: rep[find(cid)] for cid in cells}

    out: dict[str, Cell] = {}
    for root, members in classes.items():
        c = cells[members[0]]
        nid = rep[root]
        out[nid] = Cell(
            nid, c.iev,
            tuple(None if f is None else classmap[f] for f in c.d0),
            tuple(None if f is None else classmap[f] for f in c.d1))
    return PrecubeSet(out, kind), classmap


# ---------------------------------------------------------------------------
# Gluing composition along a cube
# ---------------------------------------------------------------------------


def glue_hdas(x: Hda, y: Hda) -> Hda:
    """Identify the unique accept cell of ``x`` with the unique start cell
    of ``y`` together with all their faces."""
    if x.kind != pc.PLAIN or y.kind != pc.PLAIN:
        raise AxiomViolation("gluing composition expects plain HDAs")
    if len(x.accept) != 1:
        raise NotSimple(f"left factor has {len(x.accept)} accept cells")
    if len(y.start) != 1:
        raise NotSimple(f"right factor has {len(y.start)} start cells")
    (xa,) = x.accept
    (yb,) = y.start
    if x.cell(xa).iev.labels != y.cell(yb).iev.labels:
        raise ShapeMismatch(
            f"accept events {x.cell(xa).iev.labels} vs "
            f"start events {y.cell(yb).iev.labels}")
    yx = yoneda(x, xa)
    yy = yoneda(y, yb)

    cells: dict[str, Cell] = {}
    for pre, h in (("L.", x), ("R.", y)):
        for cid, c in h.cells.items():
            nid = pre + cid
            cells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
    pairs = [("L." + yx.mapping[c], "R." + yy.mapping[c])
             for c in yx.src_table().cells]
    table, classmap = _quotient(cells, pairs, pc.PLAIN)
    return Hda(
        table,
        frozenset(classmap["L." + s] for s in x.start),
        frozenset(classmap["R." + a] for a in y.accept))


# ---------------------------------------------------------------------------
# Sequential gluing and self-gluing
# ---------------------------------------------------------------------------


@dataclass
class SeqGlueResult:
    hda: Hda
    part_maps: list[dict[str, str]]
    gluer_maps: list[dict[str, str]]


def seq_glue(
    parts: Sequence[Hda],
    gluers: Sequence[PrecubeSet],
    fs: Sequence[PcMap],
    gs: Sequence[PcMap],
) -> SeqGlueResult:
    """Chain gluing: identify, for each connector k, the final image of
    ``gs[k]`` in part k with the initial image of ``fs[k]`` in part k+1."""
    n = len(parts)
    if len(gluers) != n - 1 or len(fs) != n - 1 or len(gs) != n - 1:
        raise PreconditionViolation("chain lengths do not match")
    kinds = {p.kind for p in parts}
    if len(kinds) != 1:
        raise PreconditionViolation("parts must share a kind")
    for k in range(n - 1):
        rep_f = classify_inclusion(fs[k])
        if not (rep_f.injective and rep_f.initial):
            raise PreconditionViolation(
                f"connector {k}: forward leg is not an initial inclusion")
        rep_g = classify_inclusion(gs[k])
        if not (rep_g.injective and rep_g.final):
            raise PreconditionViolation(
                f"connector {k}: backward leg is not a final inclusion")
        if not gluers[k].acyclic():
            raise PreconditionViolation(f"connector {k} is not acyclic")
    for k in range(1, n - 1):
        overlap = fs[k - 1].image() & gs[k].image()
        if overlap:
            raise PreconditionViolation(
                f"part {k}: connector images overlap on {sorted(overlap)[:3]}")

    cells: dict[str, Cell] = {}
    for k, part in enumerate(parts):
        pre = f"p{k}."
        for cid, c in part.cells.items():
            nid = pre + cid
            cells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
    pairs = []
    for k in range(n - 1):
        for yid in gluers[k].cells:
            pairs.append((f"p{k}." + gs[k].mapping[yid],
                          f"p{k + 1}." + fs[k].mapping[yid]))
    table, classmap = _quotient(cells, pairs, parts[0].kind)
    hda = Hda(
        table,
        frozenset(classmap[f"p0.{s}"] for s in parts[0].start),
        frozenset(classmap[f"p{n - 1}.{a}"] for a in parts[-1].accept))
    part_maps = [{cid: classmap[f"p{k}.{cid}"] for cid in parts[k].cells}
                 for k in range(n)]
    gluer_maps = [{yid: classmap[f"p{k}." + gs[k].mapping[yid]]
                   for yid in gluers[k].cells}
                  for k in range(n - 1)]
    return SeqGlueResult(hda, part_maps, gluer_maps)


def self_glue(x: Hda, y: PrecubeSet, f: PcMap, g: PcMap) -> Hda:
    """Coequaliser identifying ``f(y)`` with ``g(y)`` inside one automaton;
    identification chains are propagated by congruence closure."""
    rep_f = classify_inclusion(f)
    if not (rep_f.injective and rep_f.initial):
        raise PreconditionViolation("forward leg is not an initial inclusion")
    rep_g = classify_inclusion(g)
    if not (rep_g.injective and rep_g.final):
        raise PreconditionViolation("backward leg is not a final inclusion")
    if not y.acyclic():
        raise PreconditionViolation("gluing object is not acyclic")
    regions = {
        "forward image": f.image(),
        "backward image": g.image(),
        "start cells": x.start,
        "accept cells": x.accept,
    }
    names = list(regions)
    for a, b in itertools.combinations(names, 2):
        if regions[a] & regions[b]:
            raise PreconditionViolation(f"{a} and {b} overlap")
    pairs = [(f.mapping[yid], g.mapping[yid]) for yid in y.cells]
    table, classmap = _quotient(dict(x.cells), pairs, x.kind)
    return Hda(
        table,
        frozenset(classmap[s] for s in x.start),
        frozenset(classmap[a] for a in x.accept))


# ---------------------------------------------------------------------------
# Cylinders
# ---------------------------------------------------------------------------


@dataclass
class CylinderResult:
    pcset: PrecubeSet
    j: dict[str, str]          # base cell -> cylinder cell
    p: dict[str, str]          # cylinder cell -> base cell
    ftilde: dict[str, str]     # Y cell -> cylinder cell
    gtilde: dict[str, str]     # Z cell -> cylinder cell
    # cylinder cell -> (base cell, past cube cells, future cube cells)
    info: dict[str, tuple[str, frozenset[str], frozenset[str]]] = None


def _upclosed_families(eligible: set[frozenset[int]],
                       candidates: Sequence[int]) -> list[frozenset[frozenset[int]]]:
    """All up-closed (within the subset lattice of ``candidates``) families
    of eligible subsets; ``eligible`` must itself be up-closed."""
    pool = sorted(eligible, key=lambda s: (len(s), sorted(s)))
    families: list[frozenset[frozenset[int]]] = []
    full = frozenset(candidates)
    for bits in itertools.product((False, True), repeat=len(pool)):
        fam = {s for s, b in zip(pool, bits) if b}
        ok = True
        for s in fam:
            for extra in full - s:
                sup = s | {extra}
                if sup in eligible and sup not in fam:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            families.append(frozenset(fam))
    return families


def _map_assignments(
    sub_cells: list[str],
    cube: PrecubeSet,
    target: PrecubeSet,
    fibers: dict[str, list[str]],
) -> list[dict[str, str]]:
    """All ways to map a face-closed set of cube cells into ``target`` so
    that faces commute and each cell lands in its prescribed fiber."""
    order = sorted(sub_cells, key=lambda c: (-cube.cells[c].dim, c))
    results: list[dict[str, str]] = []
    assigned: dict[str, str] = {}

    cofaces: dict[str, list[tuple[str, int, bool]]] = {c: [] for c in sub_cells}
    inside = set(sub_cells)
    for cid in sub_cells:
        c = cube.cells[cid]
        for pos in range(c.dim):
            for upper in (False, True):
                fcell = (c.d1 if upper else c.d0)[pos]
                if fcell is not None and fcell in inside:
                    cofaces[fcell].append((cid, pos, upper))

    def consistent(cid: str, tid: str) -> bool:
        cc, tc = cube.cells[cid], target.cells[tid]
        if cc.iev != tc.iev:
            return False
        for pos in range(cc.dim):
            for upper in (False, True):
                fc = (cc.d1 if upper else cc.d0)[pos]
                ft = (tc.d1 if upper else tc.d0)[pos]
                if (fc is None) != (ft is None):
                    return False
                if fc is not None and fc in assigned and assigned[fc] != ft:
                    return False
        for par, pos, upper in cofaces[cid]:
            if par in assigned:
                tp = target.cells[assigned[par]]
                if ((tp.d1 if upper else tp.d0)[pos]) != tid:
                    return False
        return True

    def search(k: int):
        if k == len(order):
            results.append(dict(assigned))
            return
        cid = order[k]
        for tid in fibers[cid]:
            if consistent(cid, tid):
                assigned[cid] = tid
                search(k + 1)
                del assigned[cid]

    search(0)
    return results


def cylinder(f: PcMap, g: PcMap) -> CylinderResult:
    """Mapping-cylinder-like cell table separating the image of ``f`` to
    the past and the image of ``g`` to the future of a copy of the base.

    A cell over base cell x consists of an initial sub-table K and a final
    sub-table L of the standard cube of x, together with lifts of the cube
    restriction along f resp. g.
    """
    base = f.dst_table()
    if g.dst_table() is not base and g.dst_table().cells is not base.cells:
        # allow distinct wrappers around the same table
        if set(g.dst_table().cells) != set(base.cells):
            raise PreconditionViolation("cylinder legs must share a codomain")
    if f.image() & g.image():
        raise ImagesNotDisjoint(sorted(f.image() & g.image())[:3])
    ytab, ztab = f.src_table(), g.src_table()

    fib_f: dict[str, list[str]] = {}
    for yid, tid in f.mapping.items():
        fib_f.setdefault(tid, []).append(yid)
    fib_g: dict[str, list[str]] = {}
    for zid, tid in g.mapping.items():
        fib_g.setdefault(tid, []).append(zid)
    for pool in itertools.chain(fib_f.values(), fib_g.values()):
        pool.sort()

    # enumerate cells ------------------------------------------------------
    # key: (x, K ids, L ids, phi items, psi items)
    keys: list[tuple] = []
    cube_cache: dict[str, tuple[PrecubeSet, str]] = {}

    def cube_of(x: str) -> PrecubeSet:
        if x not in cube_cache:
            cube_cache[x] = standard_cube(base.cells[x].iev)
        return cube_cache[x][0]

    per_cell_variants: dict[str, list[tuple]] = {}
    for x in sorted(base.cells):
        c = base.cells[x]
        if c.dim > _MAX_CYLINDER_DIM:
            raise PreconditionViolation(
                f"cylinder over a {c.dim}-cell exceeds the desk-scale bound")
        cube = cube_of(x)
        yon = yoneda(base, x).mapping
        positions = range(c.dim)
        a_cands = [p for p in positions if p not in c.iev.sources]
        b_cands = [p for p in positions if p not in c.iev.targets]

        def liftable(part_sets, leg_fibers, is_lower):
            """Subsets whose whole cube slice has nonempty fibers."""
            good = set()
            for bits in _all_subsets(a_cands if is_lower else b_cands):
                s = frozenset(bits)
                ok = True
                for other_bits in _all_subsets(b_cands if is_lower else a_cands):
                    o = frozenset(other_bits)
                    if s & o:
                        continue
                    ccid = pc.cube_cell_id(s, o) if is_lower \
                        else pc.cube_cell_id(o, s)
                    if not leg_fibers.get(yon[ccid]):
                        ok = False
                        break
                if ok:
                    good.add(s)
            # keep only sets whose entire up-set is good
            out = set()
            cands = a_cands if is_lower else b_cands
            for s in good:
                if all(frozenset(s | set(e)) in good
                       for e in _all_subsets([c2 for c2 in cands if c2 not in s])):
                    out.add(s)
            return out

        elig_a = liftable(None, fib_f, True)
        elig_b = liftable(None, fib_g, False)
        fams_k = _upclosed_families(elig_a, a_cands)
        fams_l = _upclosed_families(elig_b, b_cands)

        variants: list[tuple] = []
        for fam_k in fams_k:
            k_cells = sorted(
                ccid for ccid in cube.cells
                if cube_face_pair(ccid)[0] in fam_k)
            phis = _map_assignments(
                k_cells, cube, ytab,
                {ccid: fib_f.get(yon[ccid], []) for ccid in k_cells})
            for fam_l in fams_l:
                l_cells = sorted(
                    ccid for ccid in cube.cells
                    if cube_face_pair(ccid)[1] in fam_l)
                psis = _map_assignments(
                    l_cells, cube, ztab,
                    {ccid: fib_g.get(yon[ccid], []) for ccid in l_cells})
                for phi in phis:
                    for psi in psis:
                        variants.append((
                            x,
                            tuple(k_cells),
                            tuple(l_cells),
                            tuple(sorted(phi.items())),
                            tuple(sorted(psi.items())),
                        ))
        per_cell_variants[x] = variants
        keys.extend(variants)

    key_id = {key: f"y{k}" for k, key in enumerate(sorted(keys))}

    # faces ----------------------------------------------------------------
    cells: dict[str, Cell] = {}
    for key, cid in key_id.items():
        x, k_cells, l_cells, phi_items, psi_items = key
        kset, lset = set(k_cells), set(l_cells)
        phi, psi = dict(phi_items), dict(psi_items)
        c = base.cells[x]
        d0: list[Optional[str]] = []
        d1: list[Optional[str]] = []
        for pos in range(c.dim):
            for upper in (False, True):
                link = (c.d1 if upper else c.d0)[pos]
                if link is None:
                    (d1 if upper else d0).append(None)
                    continue
                sub = _restrict_cylinder_key(
                    base, x, kset, lset, phi, psi, pos, upper, link)
                (d1 if upper else d0).append(key_id[sub])
        cells[cid] = Cell(cid, c.iev, tuple(d0), tuple(d1))

    table = PrecubeSet(cells, base.kind)

    j = {x: key_id[(x, (), (), (), ())] for x in base.cells}
    p = {cid: key[0] for key, cid in key_id.items()}
    ftilde: dict[str, str] = {}
    for yid in ytab.cells:
        x = f.mapping[yid]
        cube = cube_of(x)
        yy = yoneda(ytab, yid).mapping
        phi = tuple(sorted((ccid, yy[ccid]) for ccid in cube.cells))
        key = (x, tuple(sorted(cube.cells)), (), phi, ())
        ftilde[yid] = key_id[key]
    gtilde: dict[str, str] = {}
    for zid in ztab.cells:
        x = g.mapping[zid]
        cube = cube_of(x)
        zz = yoneda(ztab, zid).mapping
        psi = tuple(sorted((ccid, zz[ccid]) for ccid in cube.cells))
        key = (x, (), tuple(sorted(cube.cells)), (), psi)
        gtilde[zid] = key_id[key]
    info = {cid: (key[0], frozenset(key[1]), frozenset(key[2]))
            for key, cid in key_id.items()}
    return CylinderResult(table, j, p, ftilde, gtilde, info)


def _all_subsets(items: Sequence[int]):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _restrict_cylinder_key(base, x, kset, lset, phi, psi, pos, upper, link):
    """Key of the cylinder cell obtained by one elementary face."""
    face_cell = base.cells[link]
    cube_f, _ = standard_cube(face_cell.iev)

    def lift(q: int) -> int:
        return q if q < pos else q + 1

    k2, l2, phi2, psi2 = [], [], {}, {}
    for ccid in cube_f.cells:
        a, b = cube_face_pair(ccid)
        na = frozenset(lift(q) for q in a) | ({pos} if not upper else frozenset())
        nb = frozenset(lift(q) for q in b) | ({pos} if upper else frozenset())
        big = pc.cube_cell_id(na, nb)
        if big in kset:
            k2.append(ccid)
            phi2[ccid] = phi[big]
        if big in lset:
            l2.append(ccid)
            psi2[ccid] = psi[big]
    return (link, tuple(sorted(k2)), tuple(sorted(l2)),
            tuple(sorted(phi2.items())), tuple(sorted(psi2.items())))


# ---------------------------------------------------------------------------
# Properization
# ---------------------------------------------------------------------------


def _marker_cubes(x: Hda, markers: Iterable[str], prefix: str
                  ) -> tuple[PrecubeSet, PcMap, dict[str, str]]:
    """Coproduct of standard cubes, one per marked cell, mapped into ``x``
    by faces; returns the table, the map, and marker -> top-cell-id."""
    cells: dict[str, Cell] = {}
    mapping: dict[str, str] = {}
    tops: dict[str, str] = {}
    for k, mid in enumerate(sorted(markers)):
        pre = f"{prefix}{k}."
        cube, top = standard_cube(x.cell(mid).iev)
        yon = yoneda(x, mid).mapping
        for cid, c in cube.cells.items():
            nid = pre + cid
            cells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
            mapping[nid] = yon[cid]
        tops[mid] = pre + top
    table = PrecubeSet(cells, x.kind)
    return table, PcMap(table, x.pcset, mapping), tops


@dataclass
class ProperizeResult:
    hda: Hda
    projection: PcMap


def start_properize(x: Hda) -> ProperizeResult:
    """Pull the start cells apart from the rest of the automaton.

    The result replaces each start cell by a fresh copy whose cube hangs
    over the old one; the projection back has the future lifting property,
    so the language is unchanged, and the new start map is an initial
    inclusion.
    """
    jtab, w, tops = _marker_cubes(x, x.start, "s")
    zempty = PrecubeSet({}, x.kind)
    cyl = cylinder(w, PcMap(zempty, x.pcset, {}))
    start = frozenset(cyl.ftilde[tops[s]] for s in x.start)
    accept = frozenset(cid for cid, b in cyl.p.items() if b in x.accept)
    out = Hda(cyl.pcset, start, accept)
    proj = PcMap(out, x, dict(cyl.p))
    return ProperizeResult(out, proj)


def accept_properize(x: Hda) -> ProperizeResult:
    """Dual of :func:`start_properize`, implemented by reversal."""
    rev = reverse_hda(x)
    res = start_properize(rev)
    hda = reverse_hda(res.hda)
    proj = PcMap(hda, x, dict(res.projection.mapping))
    return ProperizeResult(hda, proj)


# ---------------------------------------------------------------------------
# Simple decomposition and identity subtraction
# ---------------------------------------------------------------------------


def decompose_simple(x: Hda) -> list[Hda]:
    """One summand per (start, accept) pair, all sharing the cell table."""
    return [Hda(x.pcset, frozenset([s]), frozenset([t]))
            for s in sorted(x.start) for t in sorted(x.accept)]


def subtract_identities(x: Hda) -> Hda:
    """Recogniser of the same language minus all identity ipomsets.

    Decomposes into simple summands, makes each start proper (so that a
    positive-length accepting path can never end in the start copy), drops
    accept cells that are start cells, and reassembles.
    """
    if x.kind == pc.PLAIN:
        inner = subtract_identities(resolve(x))
        return relabel(trim(close(inner)))[0]
    parts = []
    for summand in decompose_simple(x):
        proper = start_properize(summand).hda
        parts.append(Hda(proper.pcset, proper.start,
                         proper.accept - proper.start))
    out = coproduct(parts) if parts else empty_hda(x.kind)
    return relabel(trim(out))[0]


# ---------------------------------------------------------------------------
# Language-correct serial composition of recognisers
# ---------------------------------------------------------------------------


def compose_serial(x: Hda, y: Hda, ceiling: int = 200000) -> Hda:
    """Recognise the gluing composition of the two languages.

    Works summand by summand: properize the left factor at each accept
    cell and the right factor at each start cell, close both, and glue
    along the interface cube whenever the event lo-sets agree.
    """
    if not (x.start and x.accept and y.start and y.accept):
        return empty_hda()
    rx = resolve(x) if x.kind == pc.PLAIN else x
    ry = resolve(y) if y.kind == pc.PLAIN else y
    rx, ry = trim(rx), trim(ry)

    lefts = []
    for a in sorted(rx.accept):
        summand = Hda(rx.pcset, rx.start, frozenset([a]))
        closed = trim(close(accept_properize(summand).hda))
        lefts.append((rx.cell(a).iev.labels, relabel(closed)[0]))
    rights = []
    for b in sorted(ry.start):
        summand = Hda(ry.pcset, frozenset([b]), ry.accept)
        closed = trim(close(start_properize(summand).hda))
        rights.append((ry.cell(b).iev.labels, relabel(closed)[0]))

    parts = []
    total = 0
    for la, left in lefts:
        for lb, right in rights:
            if la != lb:
                continue
            if not (left.start and left.accept and right.start and right.accept):
                continue
            glued = trim(glue_hdas(left, right))
            total += len(glued.cells)
            if total > ceiling:
                raise SizeCeiling(f"serial composition beyond {ceiling} cells")
            parts.append(glued)
    if not parts:
        return empty_hda()
    return relabel(trim(coproduct(parts)))[0]


# ---------------------------------------------------------------------------
# Spider: Kleene plus for separated languages
# ---------------------------------------------------------------------------


def _interface_image(x: Hda, markers: Iterable[str]) -> frozenset[str]:
    out: set[str] = set()
    for mid in markers:
        out.update(yoneda(x, mid).mapping.values())
    return frozenset(out)


@dataclass
class SpiderResult:
    spider: Hda                      # with the fresh start/accept copies
    match_pairs: list[tuple[str, str]]   # ev-compatible (accept, start) pairs
    start_copy: dict[tuple[str, str], str]   # (accept|_bot, start) -> cell
    accept_copy: dict[tuple[str, str], str]  # (accept, start|_top) -> cell
    projection: dict[str, str]


def spider(x: Hda) -> SpiderResult:
    """Cylinder of the start and accept maps with one cube copy per
    compatible accept/start pair plus one replacement copy each."""
    start_img = _interface_image(x, x.start)
    accept_img = _interface_image(x, x.accept)
    if start_img & accept_img:
        raise NotSeparated(sorted(start_img & accept_img)[:3])
    match_pairs = [
        (yid, xid)
        for yid in sorted(x.accept) for xid in sorted(x.start)
        if x.cell(yid).iev.labels == x.cell(xid).iev.labels
    ]
    bot_index = match_pairs + [(BOT, xid) for xid in sorted(x.start)]
    top_index = match_pairs + [(yid, TOP) for yid in sorted(x.accept)]

    jcells: dict[str, Cell] = {}
    jmap: dict[str, str] = {}
    bot_tops: dict[tuple[str, str], str] = {}
    for k, (yid, xid) in enumerate(bot_index):
        pre = f"b{k}."
        cube, top = standard_cube(x.cell(xid).iev)
        yon = yoneda(x, xid).mapping
        for cid, c in cube.cells.items():
            nid = pre + cid
            jcells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
            jmap[nid] = yon[cid]
        bot_tops[(yid, xid)] = pre + top
    jbot = PrecubeSet(jcells, x.kind)

    kcells: dict[str, Cell] = {}
    kmap: dict[str, str] = {}
    top_tops: dict[tuple[str, str], str] = {}
    for k, (yid, xid) in enumerate(top_index):
        pre = f"t{k}."
        cube, top = standard_cube(x.cell(yid).iev)
        yon = yoneda(x, yid).mapping
        for cid, c in cube.cells.items():
            nid = pre + cid
            kcells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
            kmap[nid] = yon[cid]
        top_tops[(yid, xid)] = pre + top
    jtop = PrecubeSet(kcells, x.kind)

    cyl = cylinder(PcMap(jbot, x.pcset, jmap), PcMap(jtop, x.pcset, kmap))
    start_copy = {pair: cyl.ftilde[tid] for pair, tid in bot_tops.items()}
    accept_copy = {pair: cyl.gtilde[tid] for pair, tid in top_tops.items()}
    hda = Hda(
        cyl.pcset,
        frozenset(start_copy[(BOT, xid)] for xid in x.start),
        frozenset(accept_copy[(yid, TOP)] for yid in x.accept))
    return SpiderResult(hda, match_pairs, start_copy, accept_copy, dict(cyl.p))


def closure_cube_map(x: Hda, closed: Hda, cid: str) -> tuple[PrecubeSet, dict[str, str]]:
    """The plain cube over ``ev(cid)`` mapped into ``close(x)``: events in
    the cell's interfaces fold into the closure bookkeeping sets, the rest
    are honest faces."""
    iev = x.cell(cid).iev
    cube, _ = standard_cube(IloSet(iev.labels))
    mapping: dict[str, str] = {}
    for ccid in cube.cells:
        a, b = cube_face_pair(ccid)
        base = x.pcset.face(cid, a - iev.sources, b - iev.targets)
        mapping[ccid] = pc.closure_cell_id(base, a & iev.sources,
                                           b & iev.targets)
    for tid in mapping.values():
        if tid not in closed.cells:
            raise AxiomViolation(f"closure cube misses cell {tid}")
    return cube, mapping


def spider_plus(x: Hda, ceiling: int = 200000) -> Hda:
    """Kleene plus of a separated language: copy the start/accept cells in
    the spider, close, and weld each compatible accept copy to its start
    copy by a self-gluing."""
    if not (x.start and x.accept):
        return empty_hda()
    if x.kind != pc.IFACE:
        raise AxiomViolation("spider plus expects an iHDA")
    sp = spider(x)
    csp = close(sp.spider)
    if len(csp.cells) > ceiling:
        raise SizeCeiling(f"spider closure beyond {ceiling} cells")

    wcells: dict[str, Cell] = {}
    fmap: dict[str, str] = {}
    gmap: dict[str, str] = {}
    for k, pair in enumerate(sp.match_pairs):
        pre = f"w{k}."
        cube_f, mf = closure_cube_map(sp.spider, csp, sp.start_copy[pair])
        cube_g, mg = closure_cube_map(sp.spider, csp, sp.accept_copy[pair])
        assert set(cube_f.cells) == set(cube_g.cells)
        for cid, c in cube_f.cells.items():
            nid = pre + cid
            wcells[nid] = Cell(
                nid, c.iev,
                tuple(None if f is None else pre + f for f in c.d0),
                tuple(None if f is None else pre + f for f in c.d1))
            fmap[nid] = mf[cid]
            gmap[nid] = mg[cid]
    weld = PrecubeSet(wcells, pc.PLAIN)
    glued = self_glue(csp, weld,
                      PcMap(weld, csp.pcset, fmap),
                      PcMap(weld, csp.pcset, gmap))
    return relabel(trim(glued))[0]


def spider_chain(x: Hda, gamma: Sequence[tuple[str, str]]) -> Hda:
    """The n-fold chain of spider copies through the compatible pairs in
    ``gamma``; its language is the n-fold gluing of the factor languages."""
    sp = spider(x)
    csp = close(sp.spider)
    n = len(gamma) + 1

    def closed_id(cyl_cell: str) -> str:
        return pc.closure_cell_id(cyl_cell, (), ())

    parts: list[Hda] = []
    for k in range(n):
        if k == 0:
            start = frozenset(closed_id(sp.start_copy[(BOT, xid)])
                              for xid in x.start)
        else:
            start = frozenset([closed_id(sp.start_copy[gamma[k - 1]])])
        if k == n - 1:
            accept = frozenset(closed_id(sp.accept_copy[(yid, TOP)])
                               for yid in x.accept)
        else:
            accept = frozenset([closed_id(sp.accept_copy[gamma[k]])])
        parts.append(Hda(csp.pcset, start, accept))

    gluers, fs, gs = [], [], []
    for k in range(n - 1):
        cube_g, mg = closure_cube_map(sp.spider, csp, sp.accept_copy[gamma[k]])
        cube_f, mf = closure_cube_map(sp.spider, csp, sp.start_copy[gamma[k]])
        gluers.append(cube_g)
        gs.append(PcMap(cube_g, parts[k].pcset, mg))
        fs.append(PcMap(cube_f, parts[k + 1].pcset, mf))
    return seq_glue(parts, gluers, fs, gs).hda


# ---------------------------------------------------------------------------
# Kleene plus without the separation assumption
# ---------------------------------------------------------------------------


def _identity_recognizers(x: Hda) -> list[Hda]:
    """One cube recogniser per identity ipomset accepted by ``x``."""
    words = sorted({x.cell(cid).iev.labels for cid in x.start & x.accept})
    out = []
    for labels in words:
        cube, top = standard_cube(IloSet(labels))
        out.append(Hda(cube, frozenset([top]), frozenset([top])))
    return out


def structurally_separated(x: Hda) -> bool:
    """No cell lies in both the start-map and the accept-map image.

    This is equivalent to the language being separated: a non-separated
    accepted ipomset is witnessed by a shared face of a start and an
    accept cell, and conversely such a shared face always yields a
    non-separated accepted ipomset.
    """
    return not (_interface_image(x, x.start) & _interface_image(x, x.accept))


def kleene_plus(x: Hda, ceiling: int = 200000) -> Hda:
    """Kleene plus of an arbitrary recogniser.

    Identities are split off (they are gluing units).  For the rest, the
    plus of any power with separated language is handled by the spider;
    the plus then decomposes as the bounded powers below it plus their
    composition with that spider.  A power with index exceeding twice the
    dimension is always separated, which bounds the search.
    """
    if x.kind != pc.PLAIN:
        raise AxiomViolation("kleene plus expects a plain HDA")
    id_parts = _identity_recognizers(x)
    core = subtract_identities(x)
    core = relabel(trim(core))[0]
    if not (core.start and core.accept) or core.dim() == 0:
        # nothing but identities can be accepted
        return relabel(coproduct(id_parts))[0] if id_parts else empty_hda()

    n = 2 * core.dim() + 1
    powers = [core]
    main: Optional[Hda] = None
    while True:
        top = powers[-1]
        if not (top.start and top.accept):
            # this power is empty, so all higher ones vanish
            main = coproduct(powers[:-1]) if len(powers) > 1 else empty_hda()
            break
        resolved = trim(resolve(top))
        if structurally_separated(resolved):
            plus_top = spider_plus(resolved, ceiling=ceiling)
            bounded = relabel(coproduct(powers))[0]
            tail = compose_serial(bounded, plus_top, ceiling=ceiling)
            main = coproduct([bounded, tail])
            break
        if len(powers) == n:
            raise PreconditionViolation(
                f"power {n} of a width-{core.dim()} recogniser not separated")
        powers.append(compose_serial(top, core, ceiling=ceiling))
    out = coproduct(id_parts + [main]) if id_parts else main
    return relabel(trim(out))[0]


# ---------------------------------------------------------------------------
# Lifting-property validators
# ---------------------------------------------------------------------------


def has_flp(m: PcMap) -> bool:
    """Future lifting: every event-starting step of the codomain lifts
    along the map from any preimage of its lower cell (finite search)."""
    src, dst = m.src_table(), m.dst_table()
    pre: dict[str, list[str]] = {}
    for cid, tid in m.mapping.items():
        pre.setdefault(tid, []).append(cid)
    for x, cell in dst.cells.items():
        a_ok = [p for p in range(cell.dim) if p not in cell.iev.sources]
        for a in _all_subsets(a_ok):
            if not a:
                continue
            low = dst.face(x, a, ())
            for y in pre.get(low, []):
                if not any(src.face(z, a, ()) == y for z in pre.get(x, [])):
                    return False
    return True


def has_plp(m: PcMap) -> bool:
    """Past lifting: dual of :func:`has_flp`."""
    src, dst = m.src_table(), m.dst_table()
    pre: dict[str, list[str]] = {}
    for cid, tid in m.mapping.items():
        pre.setdefault(tid, []).append(cid)
    for x, cell in dst.cells.items():
        b_ok = [p for p in range(cell.dim) if p not in cell.iev.targets]
        for b in _all_subsets(b_ok):
            if not b:
                continue
            high = dst.face(x, (), b)
            for y in pre.get(high, []):
                if not any(src.face(z, (), b) == y for z in pre.get(x, [])):
                    return False
    return True


def bounded_tlp(m: PcMap, sources: frozenset[str], targets: frozenset[str],
                trunc) -> bool:
    """Total lifting with respect to two cell sets, checked for every
    codomain path inside the truncation window."""
    from .pathlang import accepting_paths
    src_tab = m.src_table()
    pre: dict[str, list[str]] = {}
    for cid, tid in m.mapping.items():
        pre.setdefault(tid, []).append(cid)
    dst = m.dst if isinstance(m.dst, Hda) else Hda(m.dst_table())
    probe = Hda(dst.pcset, frozenset(sources), frozenset(targets))
    for alpha in accepting_paths(probe, trunc):
        want = set(pre.get(alpha.tgt, []))
        for y in pre.get(alpha.src, []):
            frontier = {y}
            for k, step in enumerate(alpha.steps):
                nxt = alpha.cells[k + 1]
                new: set[str] = set()
                if step.up:
                    for cand in pre.get(nxt, []):
                        try:
                            if src_tab.face(cand, step.events, ()) in frontier:
                                new.add(cand)
                        except IllegalFace:
                            pass
                else:
                    for cur in frontier:
                        try:
                            new.add(src_tab.face(cur, (), step.events))
                        except IllegalFace:
                            pass
                frontier = new
                if not frontier:
                    break
            if not want <= frontier:
                return False
    return True
