"""Paths in cell tables, their event ipomsets, and bounded language oracles.

A path alternates cells with up-steps (starting a set of events) and
down-steps (terminating a set).  Its event ipomset is the gluing of one
discrete step ipomset per step; accumulated size grows by half per event
started or terminated, which makes bounded enumeration finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from . import ipomset as ip
from . import pcset as pc
from .errors import AxiomViolation, IllegalFace, InvalidMap, InvalidPath, \
    NotInterval
from .ipomset import IloSet, Ipomset
from .langset import Language, Truncation
from .pcset import Cell, Hda, PcMap, PrecubeSet


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One step; ``events`` are positions in the higher-dimensional cell
    (the target cell of an up-step, the source cell of a down-step)."""

    up: bool
    events: frozenset[int]

    def __post_init__(self):
        if not self.events:
            raise InvalidPath("steps must start or terminate at least one event")


@dataclass(frozen=True)
class Path:
    cells: tuple[str, ...]
    steps: tuple[Step, ...]

    def __post_init__(self):
        if len(self.cells) != len(self.steps) + 1:
            raise InvalidPath("cell/step counts do not match")

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def src(self) -> str:
        return self.cells[0]

    @property
    def tgt(self) -> str:
        return self.cells[-1]


def validate_path(x: Union[Hda, PrecubeSet], path: Path) -> None:
    table = x.pcset if isinstance(x, Hda) else x
    for cid in path.cells:
        if cid not in table.cells:
            raise InvalidPath(f"unknown cell {cid}")
    for k, step in enumerate(path.steps):
        prev, cur = path.cells[k], path.cells[k + 1]
        big = cur if step.up else prev
        small = prev if step.up else cur
        cell = table.cell(big)
        if not all(0 <= p < cell.dim for p in step.events):
            raise InvalidPath(f"step {k}: event position out of range")
        try:
            got = table.face(big, step.events if step.up else (),
                             () if step.up else step.events)
        except Exception as exc:
            raise InvalidPath(f"step {k}: {exc}")
        if got != small:
            raise InvalidPath(
                f"step {k}: face of {big} at {sorted(step.events)} is {got}, "
                f"not {small}")


def step_ipomset(cell_iev: IloSet, events: frozenset[int], up: bool) -> Ipomset:
    """Discrete ipomset of one step on a cell with the given running events."""
    n = len(cell_iev.labels)
    full = frozenset(range(n))
    if up:
        return ip.discrete(IloSet(cell_iev.labels, full - events, full))
    return ip.discrete(IloSet(cell_iev.labels, full, full - events))


def ev_path(x: Union[Hda, PrecubeSet], path: Path) -> Ipomset:
    """The interval ipomset of events occurring along a path."""
    return ev_path_with_ledger(x, path)[0]


def ev_path_with_ledger(
    x: Union[Hda, PrecubeSet], path: Path
) -> tuple[Ipomset, list[tuple[int, ...]]]:
    """ev plus, per visited cell, the positions of its running events inside
    the result (a consistent event ledger)."""
    validate_path(x, path)
    table = x.pcset if isinstance(x, Hda) else x
    first = table.cell(path.cells[0]).iev
    acc = ip.identity(IloSet(first.labels))
    ledger: list[tuple[int, ...]] = [tuple(range(len(first.labels)))]
    for k, step in enumerate(path.steps):
        big = path.cells[k + 1] if step.up else path.cells[k]
        s = step_ipomset(table.cell(big).iev, step.events, step.up)
        acc, pmap, qmap = ip.glue_indexed(acc, s)
        ledger = [tuple(pmap[i] for i in entry) for entry in ledger]
        nxt_iev = table.cell(path.cells[k + 1]).iev
        if step.up:
            ledger.append(tuple(qmap[i] for i in range(len(nxt_iev.labels))))
        else:
            keep = [i for i in range(len(table.cell(big).iev.labels))
                    if i not in step.events]
            ledger.append(tuple(qmap[i] for i in keep))
    return acc, ledger


def concat(alpha: Path, beta: Path) -> Path:
    if alpha.tgt != beta.src:
        raise InvalidPath("paths are not concatenable")
    return Path(alpha.cells + beta.cells[1:], alpha.steps + beta.steps)


def sparse_normal_form(x: Union[Hda, PrecubeSet], path: Path) -> Path:
    """Merge consecutive same-direction steps; ev is unchanged."""
    validate_path(x, path)
    table = x.pcset if isinstance(x, Hda) else x
    cells = [path.cells[0]]
    steps: list[Step] = []
    for k, step in enumerate(path.steps):
        nxt = path.cells[k + 1]
        if steps and steps[-1].up == step.up:
            prev = steps[-1]
            if step.up:
                # lift previous positions along the new inclusion
                inject = [i for i in range(table.cell(nxt).dim)
                          if i not in step.events]
                merged = frozenset(inject[i] for i in prev.events) | step.events
            else:
                big = cells[-2]
                inject = [i for i in range(table.cell(big).dim)
                          if i not in prev.events]
                merged = prev.events | frozenset(inject[i] for i in step.events)
            steps[-1] = Step(step.up, merged)
            cells[-1] = nxt
        else:
            steps.append(step)
            cells.append(nxt)
    out = Path(tuple(cells), tuple(steps))
    validate_path(x, out)
    return out


# ---------------------------------------------------------------------------
# Step tables and language enumeration
# ---------------------------------------------------------------------------


def _step_tables(table: PrecubeSet):
    """For each cell: the up-steps entering a higher cell and the down-steps
    leaving to an upper face, with nonempty event sets."""
    ups: dict[str, list[tuple[str, frozenset[int]]]] = {c: [] for c in table.cells}
    downs: dict[str, list[tuple[str, frozenset[int]]]] = {c: [] for c in table.cells}
    for cid, cell in table.cells.items():
        positions = range(cell.dim)
        lower_ok = [p for p in positions if p not in cell.iev.sources]
        upper_ok = [p for p in positions if p not in cell.iev.targets]
        for r in range(1, len(lower_ok) + 1):
            for combo in itertools.combinations(lower_ok, r):
                a = frozenset(combo)
                ups[table.face(cid, a, ())].append((cid, a))
        for r in range(1, len(upper_ok) + 1):
            for combo in itertools.combinations(upper_ok, r):
                b = frozenset(combo)
                downs[cid].append((table.face(cid, (), b), b))
    return ups, downs


def enumerate_language(x: Hda, trunc: Truncation) -> Language:
    """All event ipomsets of accepting paths within the window.

    Worklist over (cell, accumulated ipomset) states; cycles are legal and
    handled by state deduplication, since a state determines all its
    continuations.
    """
    table = x.pcset
    ups, downs = _step_tables(table)
    seen: set[tuple[str, Ipomset]] = set()
    work: list[tuple[str, Ipomset]] = []
    for s in x.start:
        state = (s, ip.identity(IloSet(table.cell(s).iev.labels)))
        if state not in seen:
            seen.add(state)
            work.append(state)
    members: set[Ipomset] = set()
    while work:
        cid, acc = work.pop()
        if cid in x.accept:
            members.add(acc)
        for nxt, events in ups[cid]:
            s = step_ipomset(table.cell(nxt).iev, events, up=True)
            cand = ip.glue(acc, s)
            if ip.twice_size(cand) > trunc.twice_size:
                continue
            if ip.width(cand) > trunc.width:
                continue
            state = (nxt, cand)
            if state not in seen:
                seen.add(state)
                work.append(state)
        for nxt, events in downs[cid]:
            s = step_ipomset(table.cell(cid).iev, events, up=False)
            cand = ip.glue(acc, s)
            if ip.twice_size(cand) > trunc.twice_size:
                continue
            if ip.width(cand) > trunc.width:
                continue
            state = (nxt, cand)
            if state not in seen:
                seen.add(state)
                work.append(state)
    return Language(frozenset(members), trunc)


def accepting_paths(x: Hda, trunc: Truncation) -> Iterator[Path]:
    """Yield every accepting path whose accumulated size stays within the
    window (no deduplication; steps have nonempty event sets)."""
    table = x.pcset
    ups, downs = _step_tables(table)

    def walk(cid: str, acc: Ipomset, cells: tuple[str, ...],
             steps: tuple[Step, ...]) -> Iterator[Path]:
        if cid in x.accept:
            yield Path(cells, steps)
        for nxt, events in ups[cid]:
            s = step_ipomset(table.cell(nxt).iev, events, up=True)
            cand = ip.glue(acc, s)
            if ip.twice_size(cand) > trunc.twice_size or \
                    ip.width(cand) > trunc.width:
                continue
            yield from walk(nxt, cand, cells + (nxt,),
                            steps + (Step(True, events),))
        for nxt, events in downs[cid]:
            s = step_ipomset(table.cell(cid).iev, events, up=False)
            cand = ip.glue(acc, s)
            if ip.twice_size(cand) > trunc.twice_size or \
                    ip.width(cand) > trunc.width:
                continue
            yield from walk(nxt, cand, cells + (nxt,),
                            steps + (Step(False, events),))

    for s in sorted(x.start):
        yield from walk(s, ip.identity(IloSet(table.cell(s).iev.labels)),
                        (s,), ())


# ---------------------------------------------------------------------------
# Track objects
# ---------------------------------------------------------------------------

_UNSTARTED, _RUNNING, _DONE = "0", "e", "1"

_ALLOWED = {("0", "0"), ("e", "0"), ("1", "0"), ("1", "e"), ("1", "1")}


def track_object(p: Ipomset) -> Hda:
    """The recogniser of the principal down-set of an interval ipomset.

    Cells are cuts: functions marking each event unstarted, running, or
    terminated, compatible with precedence; the running events of a cut
    form an antichain listed in event order.
    """
    if not ip.is_interval(p):
        raise NotInterval(p.to_literal())
    n = p.n
    states: list[str] = []
    for combo in itertools.product((_UNSTARTED, _RUNNING, _DONE), repeat=n):
        if all((combo[a], combo[b]) in _ALLOWED for a, b in p.rel):
            states.append("".join(combo))

    def actives(c: str) -> list[int]:
        return p.eo_sorted(i for i in range(n) if c[i] == _RUNNING)

    cells: dict[str, Cell] = {}
    for c in states:
        act = actives(c)
        labels = tuple(p.labels[i] for i in act)
        d0, d1 = [], []
        for pos, event in enumerate(act):
            low = c[:event] + _UNSTARTED + c[event + 1:]
            high = c[:event] + _DONE + c[event + 1:]
            d0.append(low)
            d1.append(high)
        cells[c] = Cell(c, IloSet(labels), tuple(d0), tuple(d1))
    bot = "".join(_RUNNING if i in p.sources else _UNSTARTED for i in range(n))
    top = "".join(_RUNNING if i in p.targets else _DONE for i in range(n))
    return Hda(PrecubeSet(cells, pc.PLAIN), frozenset([bot]), frozenset([top]))


# ---------------------------------------------------------------------------
# Membership oracles
# ---------------------------------------------------------------------------


def member_by_paths(x: Hda, p: Ipomset) -> bool:
    """Membership by bounded path enumeration at the window of ``p``."""
    if not ip.is_interval(p):
        return False
    window = Truncation(ip.twice_size(p), ip.width(p))
    return p in enumerate_language(x, window).members


def member_by_track(x: Hda, p: Ipomset) -> bool:
    """Membership by searching a cell-table map from the track object of
    ``p`` into ``x`` sending the two cuts to start and accept cells."""
    if not ip.is_interval(p):
        return False
    if x.kind != pc.PLAIN:
        raise AxiomViolation("track membership needs a plain HDA")
    track = track_object(p)
    return _track_map_exists(track, x)


def _track_map_exists(track: Hda, x: Hda) -> bool:
    ttab, xtab = track.pcset, x.pcset
    order = sorted(ttab.cells, key=lambda c: (-ttab.cells[c].dim, c))
    bot = next(iter(track.start))
    top = next(iter(track.accept))
    pools: dict[str, list[str]] = {}
    for cid in order:
        want = ttab.cells[cid].iev
        pool = [d for d, cell in xtab.cells.items() if cell.iev == want]
        if cid == bot:
            pool = [d for d in pool if d in x.start]
        if cid == top:
            pool = [d for d in pool if d in x.accept]
        if not pool:
            return False
        pools[cid] = sorted(pool)
    cofaces: dict[str, list[tuple[str, int, bool]]] = {c: [] for c in ttab.cells}
    for cid, c in ttab.cells.items():
        for pos in range(c.dim):
            for upper in (False, True):
                f = (c.d1 if upper else c.d0)[pos]
                if f is not None:
                    cofaces[f].append((cid, pos, upper))

    assigned: dict[str, str] = {}

    def consistent(cid: str, did: str) -> bool:
        ct, cd = ttab.cells[cid], xtab.cells[did]
        for pos in range(ct.dim):
            for upper in (False, True):
                ft = (ct.d1 if upper else ct.d0)[pos]
                fd = (cd.d1 if upper else cd.d0)[pos]
                if ft is not None and ft in assigned and assigned[ft] != fd:
                    return False
        for par, pos, upper in cofaces[cid]:
            if par in assigned:
                cp = xtab.cells[assigned[par]]
                if ((cp.d1 if upper else cp.d0)[pos]) != did:
                    return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        cid = order[k]
        for did in pools[cid]:
            if consistent(cid, did):
                assigned[cid] = did
                if search(k + 1):
                    return True
                del assigned[cid]
        return False

    return search(0)


# ---------------------------------------------------------------------------
# Weak equivalence (bounded)
# ---------------------------------------------------------------------------


def bounded_weak_equivalence(f: PcMap, trunc: Truncation) -> bool:
    """True iff every accepting path of the codomain inside the window lifts
    to an accepting path of the domain along ``f`` (exhaustive check)."""
    if not isinstance(f.src, Hda) or not isinstance(f.dst, Hda):
        raise InvalidMap("weak equivalence needs HDA endpoints")
    f.require_valid(check_markers=True)
    src, dst = f.src, f.dst
    preimage: dict[str, list[str]] = {}
    for cid, tid in f.mapping.items():
        preimage.setdefault(tid, []).append(cid)

    stab = src.pcset
    for beta in accepting_paths(dst, trunc):
        fronts = {c for c in preimage.get(beta.src, []) if c in src.start}
        for k, step in enumerate(beta.steps):
            nxt = beta.cells[k + 1]
            new_front: set[str] = set()
            if step.up:
                for cand in preimage.get(nxt, []):
                    try:
                        if stab.face(cand, step.events, ()) in fronts:
                            new_front.add(cand)
                    except IllegalFace:
                        continue
            else:
                for cur in fronts:
                    try:
                        new_front.add(stab.face(cur, (), step.events))
                    except IllegalFace:
                        continue
            fronts = new_front
            if not fronts:
                break
        if not (fronts & src.accept):
            return False
    return True


# ---------------------------------------------------------------------------
# Path literals
# ---------------------------------------------------------------------------


def parse_path(x: Union[Hda, PrecubeSet], text: str) -> Path:
    """Parse a path literal ``c0 U{a,b} c1 D{b} c2``: cell ids alternating
    with step tokens whose braces list the started/terminated labels (a
    multiset).  Positions are resolved against the cell table."""
    table = x.pcset if isinstance(x, Hda) else x
    tokens = text.split()
    if not tokens:
        raise InvalidPath("empty path literal")
    if len(tokens) % 2 == 0:
        raise InvalidPath("path literal must alternate cells and steps")
    cells = tokens[0::2]
    steps: list[Step] = []
    for k, tok in enumerate(tokens[1::2]):
        if not (tok[:1] in ("U", "D") and tok[1:2] == "{" and tok.endswith("}")):
            raise InvalidPath(f"bad step token {tok!r}")
        up = tok[0] == "U"
        want = sorted(lbl.strip() for lbl in tok[2:-1].split(",") if lbl.strip())
        if not want:
            raise InvalidPath(f"step token {tok!r} lists no events")
        prev, cur = cells[k], cells[k + 1]
        big = cur if up else prev
        small = prev if up else cur
        if big not in table.cells:
            raise InvalidPath(f"unknown cell {big}")
        cell = table.cell(big)
        found = None
        for combo in itertools.combinations(range(cell.dim), len(want)):
            if sorted(cell.iev.labels[i] for i in combo) != want:
                continue
            try:
                got = table.face(big, combo if up else (),
                                 () if up else combo)
            except Exception:
                continue
            if got == small:
                found = frozenset(combo)
                break
        if found is None:
            raise InvalidPath(
                f"no step {tok} connects {prev} to {cur}")
        steps.append(Step(up, found))
    path = Path(tuple(cells), tuple(steps))
    validate_path(x, path)
    return path


def format_path(x: Union[Hda, PrecubeSet], path: Path) -> str:
    table = x.pcset if isinstance(x, Hda) else x
    parts = [path.cells[0]]
    for k, step in enumerate(path.steps):
        big = path.cells[k + 1] if step.up else path.cells[k]
        labels = ",".join(sorted(table.cell(big).iev.labels[i]
                                 for i in step.events))
        parts.append(("U{" if step.up else "D{") + labels + "}")
        parts.append(path.cells[k + 1])
    return " ".join(parts)
