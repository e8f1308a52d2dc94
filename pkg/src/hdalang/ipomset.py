"""Labelled posets with interfaces (ipomsets) and their algebra.

An ipomset carries two strict orders on one event set: the *precedence*
order (events that must happen one after the other) and the *event order*
(a bookkeeping order that totally orders every antichain of concurrent
events).  Source and target interfaces mark events that are already
running at the start, or still running at the end.

Values are stored in canonical form up to *essential* isomorphism: the
event order is kept only on precedence-incomparable pairs, and events are
renumbered by a deterministic scheme, so structural equality coincides
with essential isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .errors import AxiomViolation, InterfaceMismatch

# Renumbering falls back to an exhaustive search when the combined order
# is cyclic; keep that search bounded.
_MAX_FALLBACK_EVENTS = 9


# ---------------------------------------------------------------------------
# lo-sets with interfaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IloSet:
    """A totally ordered list of labelled events with interface flags.

    The list order *is* the event order.  ``sources`` and ``targets`` hold
    the positions flagged as belonging to the source / target interface.
    """

    labels: tuple[str, ...]
    sources: frozenset[int] = frozenset()
    targets: frozenset[int] = frozenset()

    def __post_init__(self):
        n = len(self.labels)
        if not all(0 <= i < n for i in self.sources | self.targets):
            raise AxiomViolation("interface flag out of range")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def plain(self) -> bool:
        return not self.sources and not self.targets

    def underlying(self) -> "IloSet":
        """The same lo-set with both interfaces dropped."""
        return IloSet(self.labels)

    def tokens(self) -> tuple[str, ...]:
        return tuple(
            ("." if i in self.sources else "")
            + lab
            + ("." if i in self.targets else "")
            for i, lab in enumerate(self.labels)
        )

    def word(self) -> str:
        return " ".join(self.tokens()) if self.labels else "()"


def parse_ilo_token(token: str) -> tuple[str, bool, bool]:
    """Split a token like ``.a.`` into (label, source?, target?)."""
    src = token.startswith(".")
    tgt = token.endswith(".") and len(token) > 1
    label = token.strip(".")
    if not label or "." in label:
        raise AxiomViolation(f"bad event token {token!r}")
    return label, src, tgt


def ilo_from_word(word: str) -> IloSet:
    """Inverse of :meth:`IloSet.word` (``()`` denotes the empty lo-set)."""
    word = word.strip()
    if word in ("", "()"):
        return IloSet(())
    labels, srcs, tgts = [], set(), set()
    for i, token in enumerate(word.split()):
        label, s, t = parse_ilo_token(token)
        labels.append(label)
        if s:
            srcs.add(i)
        if t:
            tgts.add(i)
    return IloSet(tuple(labels), frozenset(srcs), frozenset(tgts))


# ---------------------------------------------------------------------------
# Ipomsets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ipomset:
    """Canonical ipomset.

    ``rel`` is the strict precedence order (transitively closed),
    ``eo`` the event order restricted to precedence-incomparable pairs.
    Do not construct directly; go through :func:`canonicalize` or the
    factory functions below.
    """

    labels: tuple[str, ...]
    rel: frozenset[tuple[int, int]]
    eo: frozenset[tuple[int, int]]
    sources: frozenset[int]
    targets: frozenset[int]

    @property
    def n(self) -> int:
        return len(self.labels)

    def lt(self, i: int, j: int) -> bool:
        return (i, j) in self.rel

    def incomparable(self, i: int, j: int) -> bool:
        return i != j and (i, j) not in self.rel and (j, i) not in self.rel

    def eo_sorted(self, events: Iterable[int]) -> list[int]:
        """Order a precedence antichain by the event order."""
        evs = list(events)
        evs.sort()
        # insertion sort by eo; eo is total and transitive on antichains
        out: list[int] = []
        for e in evs:
            k = len(out)
            for idx, o in enumerate(out):
                if (e, o) in self.eo:
                    k = idx
                    break
            out.insert(k, e)
        return out

    def interface_loset(self, which: str) -> IloSet:
        """The source or target interface as a plain lo-set."""
        pos = self.sources if which == "source" else self.targets
        ordered = self.eo_sorted(pos)
        return IloSet(tuple(self.labels[i] for i in ordered))

    def is_identity(self) -> bool:
        """True iff every event lies in both interfaces (S = P = T)."""
        return len(self.sources) == self.n == len(self.targets)

    def is_discrete(self) -> bool:
        return not self.rel

    def to_literal(self) -> str:
        parts = ["events: " + ", ".join(
            ("." if i in self.sources else "")
            + lab
            + ("." if i in self.targets else "")
            for i, lab in enumerate(self.labels)
        )]
        if self.rel:
            parts.append("order: " + ", ".join(
                f"{i}<{j}" for i, j in sorted(self.rel)))
        inversions = sorted((i, j) for i, j in self.eo if i > j)
        if inversions:
            parts.append("eo: " + ", ".join(f"{i}<{j}" for i, j in inversions))
        return "; ".join(parts)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Ipomset({self.to_literal()!r})"


@dataclass(frozen=True)
class Measures:
    """Width and size of an ipomset; size is kept doubled to stay integral."""

    width: int
    twice_size: int

    @property
    def size(self) -> Fraction:
        return Fraction(self.twice_size, 2)


# ---------------------------------------------------------------------------
# Validation and canonical form
# ---------------------------------------------------------------------------


def _transitive_closure(n: int, pairs: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    succ: list[set[int]] = [set() for _ in range(n)]
    for a, b in pairs:
        succ[a].add(b)
    closed: list[set[int]] = [set() for _ in range(n)]
    for a in range(n):
        stack = list(succ[a])
        seen = closed[a]
        while stack:
            b = stack.pop()
            if b not in seen:
                seen.add(b)
                stack.extend(succ[b])
    return {(a, b) for a in range(n) for b in closed[a]}


def canonicalize(
    labels: Sequence[str],
    rel: Iterable[tuple[int, int]],
    eo: Iterable[tuple[int, int]],
    sources: Iterable[int],
    targets: Iterable[int],
) -> Ipomset:
    """Validate a raw labelled iposet and return its canonical form."""
    ip, _ = canonicalize_with_perm(labels, rel, eo, sources, targets)
    return ip


def canonicalize_with_perm(
    labels: Sequence[str],
    rel: Iterable[tuple[int, int]],
    eo: Iterable[tuple[int, int]],
    sources: Iterable[int],
    targets: Iterable[int],
) -> tuple[Ipomset, tuple[int, ...]]:
    """As :func:`canonicalize`, also returning ``perm`` with
    ``perm[old_index] = new_index``."""
    labels = tuple(labels)
    n = len(labels)
    sources = frozenset(sources)
    targets = frozenset(targets)
    if not all(0 <= i < n for i in sources | targets):
        raise AxiomViolation("interface member out of range")
    rel = list(rel)
    eo = list(eo)
    for a, b in itertools.chain(rel, eo):
        if not (0 <= a < n and 0 <= b < n):
            raise AxiomViolation(f"order pair {(a, b)} out of range")

    order = _transitive_closure(n, rel)
    if any(a == b for a, b in order):
        raise AxiomViolation("cyclic precedence order")

    # event order: close transitively, then keep only incomparable pairs
    eo_closed = _transitive_closure(n, eo)
    if any(a == b for a, b in eo_closed):
        raise AxiomViolation("cyclic event order")
    essential = {(a, b) for a, b in eo_closed
                 if (a, b) not in order and (b, a) not in order}
    for a, b in essential:
        if (b, a) in essential:
            raise AxiomViolation(f"event order ambiguous on pair {(a, b)}")
    for a in range(n):
        for b in range(a + 1, n):
            if (a, b) in order or (b, a) in order:
                continue
            if (a, b) not in essential and (b, a) not in essential:
                raise AxiomViolation(
                    f"pair {(a, b)} neither precedence- nor event-ordered")

    for s in sources:
        if any(b == s for _, b in order):
            raise AxiomViolation(f"source event {s} is not minimal")
    for t in targets:
        if any(a == t for a, _ in order):
            raise AxiomViolation(f"target event {t} is not maximal")

    listing = _canonical_listing(labels, order, essential, sources, targets)
    pos = {old: new for new, old in enumerate(listing)}
    perm = tuple(pos[i] for i in range(n))
    ip = Ipomset(
        labels=tuple(labels[i] for i in listing),
        rel=frozenset((pos[a], pos[b]) for a, b in order),
        eo=frozenset((pos[a], pos[b]) for a, b in essential),
        sources=frozenset(pos[s] for s in sources),
        targets=frozenset(pos[t] for t in targets),
    )
    return ip, perm


def _canonical_listing(labels, order, essential, sources, targets) -> list[int]:
    """Pick the canonical event numbering.

    The union of precedence and essential event order compares every pair,
    so its strongly connected blocks are totally ordered and the listing is
    forced up to the arrangement inside each block; blocks are usually
    singletons, and the rare cyclic block is renumbered by exhaustive
    lexicographic minimisation.
    """
    n = len(labels)
    combined = order | essential
    # strongly connected blocks of the combined relation
    reach: list[set[int]] = [set() for _ in range(n)]
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in combined:
        succ[a].append(b)
    for a in range(n):
        stack = [a]
        while stack:
            u = stack.pop()
            for v in succ[u]:
                if v not in reach[a]:
                    reach[a].add(v)
                    stack.append(v)
    block_of: dict[int, frozenset[int]] = {}
    for a in range(n):
        block_of[a] = frozenset(
            {a} | {b for b in reach[a] if a in reach[b]})
    blocks = sorted({b for b in block_of.values()},
                    key=lambda blk: sum(
                        1 for other in block_of.values()
                        if other != blk and min(other) in reach[min(blk)]),
                    reverse=True)

    listing: list[int] = []
    for blk in blocks:
        members = sorted(blk)
        if len(members) == 1:
            listing.extend(members)
            continue
        if len(members) > _MAX_FALLBACK_EVENTS:
            raise AxiomViolation(
                f"cyclic block of {len(members)} events exceeds the "
                f"renumbering bound")
        prefix = list(listing)

        def key(perm):
            pos = {old: new for new, old in enumerate(prefix + list(perm))}
            inside = set(prefix) | set(perm)
            return (
                tuple(labels[i] for i in perm),
                tuple(sorted((pos[a], pos[b]) for a, b in order
                             if a in inside and b in inside)),
                tuple(sorted((pos[a], pos[b]) for a, b in essential
                             if a in inside and b in inside)),
                tuple(sorted(pos[s] for s in sources if s in inside)),
                tuple(sorted(pos[t] for t in targets if t in inside)),
            )

        best = min(itertools.permutations(members), key=key)
        listing.extend(best)
    return listing


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def empty() -> Ipomset:
    return canonicalize((), (), (), (), ())


def singleton(label: str, source: bool = False, target: bool = False) -> Ipomset:
    return canonicalize(
        (label,), (), (),
        (0,) if source else (), (0,) if target else ())


def discrete(ilo: IloSet) -> Ipomset:
    """The discrete ipomset of an ilo-set (event order = list order)."""
    n = len(ilo)
    eo = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return canonicalize(ilo.labels, (), eo, ilo.sources, ilo.targets)


def identity(u: IloSet) -> Ipomset:
    """The identity ipomset on a lo-set: every event in both interfaces."""
    n = len(u.labels)
    return discrete(IloSet(u.labels, frozenset(range(n)), frozenset(range(n))))


def reverse(p: Ipomset) -> Ipomset:
    """Swap interfaces and invert precedence; the event order is kept."""
    return canonicalize(
        p.labels,
        [(b, a) for a, b in p.rel],
        p.eo,
        p.targets,
        p.sources,
    )


# ---------------------------------------------------------------------------
# Compositions
# ---------------------------------------------------------------------------


def glue(p: Ipomset, q: Ipomset) -> Ipomset:
    """Serial composition identifying the target interface of ``p`` with the
    source interface of ``q``; raises InterfaceMismatch when the interfaces
    are not isomorphic lo-sets."""
    return glue_indexed(p, q)[0]


def glue_indexed(
    p: Ipomset, q: Ipomset
) -> tuple[Ipomset, tuple[int, ...], tuple[int, ...]]:
    """As :func:`glue`, also returning the index maps of both arguments
    into the result."""
    p_t = p.eo_sorted(p.targets)
    q_s = q.eo_sorted(q.sources)
    if [p.labels[i] for i in p_t] != [q.labels[i] for i in q_s]:
        raise InterfaceMismatch(
            f"target {p.interface_loset('target').word()!r} vs "
            f"source {q.interface_loset('source').word()!r}")

    np_ = p.n
    qmap: dict[int, int] = {}
    for tgt_event, src_event in zip(p_t, q_s):
        qmap[src_event] = tgt_event
    fresh = np_
    for i in range(q.n):
        if i not in qmap:
            qmap[i] = fresh
            fresh += 1
    total = fresh

    labels = list(p.labels) + [""] * (total - np_)
    for i in range(q.n):
        labels[qmap[i]] = q.labels[i]

    rel = set(p.rel)
    rel.update((qmap[a], qmap[b]) for a, b in q.rel)
    p_only = [i for i in range(np_) if i not in p.targets]
    q_only = [qmap[i] for i in range(q.n) if i not in q.sources]
    rel.update((a, b) for a in p_only for b in q_only)

    eo = set(p.eo)
    eo.update((qmap[a], qmap[b]) for a, b in q.eo)

    sources = set(p.sources)
    targets = {qmap[t] for t in q.targets}

    ip, perm = canonicalize_with_perm(labels, rel, eo, sources, targets)
    pmap = tuple(perm[i] for i in range(np_))
    qmap_final = tuple(perm[qmap[i]] for i in range(q.n))
    return ip, pmap, qmap_final


def parallel(p: Ipomset, q: Ipomset) -> Ipomset:
    """Parallel composition: disjoint union with every ``p`` event placed
    before every ``q`` event in the event order."""
    np_ = p.n
    labels = p.labels + q.labels
    rel = set(p.rel) | {(a + np_, b + np_) for a, b in q.rel}
    eo = set(p.eo) | {(a + np_, b + np_) for a, b in q.eo}
    eo.update((i, j + np_) for i in range(np_) for j in range(q.n))
    sources = set(p.sources) | {s + np_ for s in q.sources}
    targets = set(p.targets) | {t + np_ for t in q.targets}
    return canonicalize(labels, rel, eo, sources, targets)


# ---------------------------------------------------------------------------
# Measures and recognisers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=65536)
def width(p: Ipomset) -> int:
    """Cardinality of a maximal precedence antichain (exhaustive)."""
    n = p.n
    best = 0
    # branch over events in index order, keeping only mutually incomparable
    def grow(start: int, chosen: list[int]):
        nonlocal best
        best = max(best, len(chosen))
        for i in range(start, n):
            if len(chosen) + (n - i) <= best:
                break
            if all(p.incomparable(i, j) for j in chosen):
                chosen.append(i)
                grow(i + 1, chosen)
                chosen.pop()

    grow(0, [])
    return best


def twice_size(p: Ipomset) -> int:
    return 2 * p.n - len(p.sources) - len(p.targets)


def measures(p: Ipomset) -> Measures:
    return Measures(width=width(p), twice_size=twice_size(p))


def is_interval(p: Ipomset) -> bool:
    """Interval-order test via 2+2-freeness of the precedence order."""
    rel = p.rel
    return all(
        (a, d) in rel or (c, b) in rel
        for a, b in rel for c, d in rel
    )


def interval_representation(p: Ipomset) -> Optional[dict[int, tuple[int, int]]]:
    """Search for begin/end values realising the precedence order, i.e. with
    ``x < y`` exactly when ``e(x) < b(y)``.

    Independent of :func:`is_interval`; used as a cross-check oracle.  The
    axioms are inequalities between the 2n endpoint values (strict for
    ordered pairs, non-strict for overlaps), so a representation exists iff
    the inequality digraph has no cycle through a strict edge; a witness is
    read off strict-edge-counting potentials.
    """
    n = p.n
    if n == 0:
        return {}
    # node 2i = b(i), node 2i+1 = e(i); edges (u, v, strict) mean u <= v / u < v
    edges: list[tuple[int, int, bool]] = [(2 * i, 2 * i + 1, False)
                                          for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if (i, j) in p.rel:
                edges.append((2 * i + 1, 2 * j, True))       # e(i) < b(j)
            elif (j, i) not in p.rel:
                edges.append((2 * j, 2 * i + 1, False))      # b(j) <= e(i)

    m = 2 * n
    succ: list[list[tuple[int, bool]]] = [[] for _ in range(m)]
    for u, v, strict in edges:
        succ[u].append((v, strict))

    # Tarjan-free SCC via Kosaraju on a tiny graph
    order_out: list[int] = []
    seen = [False] * m
    for s in range(m):
        if seen[s]:
            continue
        stack = [(s, iter(succ[s]))]
        seen[s] = True
        while stack:
            u, it = stack[-1]
            advanced = False
            for v, _ in it:
                if not seen[v]:
                    seen[v] = True
                    stack.append((v, iter(succ[v])))
                    advanced = True
                    break
            if not advanced:
                order_out.append(u)
                stack.pop()
    pred: list[list[int]] = [[] for _ in range(m)]
    for u, v, _ in edges:
        pred[v].append(u)
    comp = [-1] * m
    ncomp = 0
    for s in reversed(order_out):
        if comp[s] != -1:
            continue
        stack = [s]
        comp[s] = ncomp
        while stack:
            u = stack.pop()
            for v in pred[u]:
                if comp[v] == -1:
                    comp[v] = ncomp
                    stack.append(v)
        ncomp += 1
    for u, v, strict in edges:
        if strict and comp[u] == comp[v]:
            return None

    # potentials: longest strict-edge count along the condensation
    level = [0] * ncomp
    csucc: dict[int, list[tuple[int, bool]]] = {}
    indeg = [0] * ncomp
    for u, v, strict in edges:
        if comp[u] != comp[v]:
            csucc.setdefault(comp[u], []).append((comp[v], strict))
            indeg[comp[v]] += 1
    queue = [c for c in range(ncomp) if indeg[c] == 0]
    topo = []
    while queue:
        c = queue.pop()
        topo.append(c)
        for d, strict in csucc.get(c, []):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    for c in topo:
        for d, strict in csucc.get(c, []):
            level[d] = max(level[d], level[c] + (1 if strict else 0))
    return {i: (level[comp[2 * i]], level[comp[2 * i + 1]]) for i in range(n)}


# ---------------------------------------------------------------------------
# Subsumption and down-closure
# ---------------------------------------------------------------------------


def subsumes(p: Ipomset, q: Ipomset) -> bool:
    """True iff ``p`` refines ``q`` (written p ⊑ q): some interface- and
    label-preserving bijection reflects precedence and preserves the
    essential event order."""
    if p.n != q.n:
        return False
    if sorted(p.labels) != sorted(q.labels):
        return False
    if len(p.sources) != len(q.sources) or len(p.targets) != len(q.targets):
        return False

    n = p.n
    candidates: list[list[int]] = []
    for i in range(n):
        cs = [
            j for j in range(n)
            if p.labels[i] == q.labels[j]
            and (i in p.sources) == (j in q.sources)
            and (i in p.targets) == (j in q.targets)
        ]
        if not cs:
            return False
        candidates.append(cs)

    assigned: dict[int, int] = {}
    used = [False] * n

    def ok(i: int, j: int) -> bool:
        for i2, j2 in assigned.items():
            if (j, j2) in q.rel and (i, i2) not in p.rel:
                return False
            if (j2, j) in q.rel and (i2, i) not in p.rel:
                return False
            if p.incomparable(i, i2):
                if (i, i2) in p.eo and (j, j2) not in q.eo:
                    return False
                if (i2, i) in p.eo and (j2, j) not in q.eo:
                    return False
        return True

    def search(i: int) -> bool:
        if i == n:
            return True
        for j in candidates[i]:
            if not used[j] and ok(i, j):
                used[j] = True
                assigned[i] = j
                if search(i + 1):
                    return True
                used[j] = False
                del assigned[i]
        return False

    return search(0)


def sequentializations(p: Ipomset) -> frozenset[Ipomset]:
    """All ipomsets obtained from ``p`` by adding precedence pairs, i.e.
    every ipomset subsumed by ``p`` on the same carrier (interval or not)."""
    seen: set[Ipomset] = set()
    frontier = [p]
    seen.add(p)
    while frontier:
        cur = frontier.pop()
        n = cur.n
        for i in range(n):
            for j in range(n):
                if i == j or not cur.incomparable(i, j):
                    continue
                # the new pair must keep sources minimal and targets maximal
                if j in cur.sources or i in cur.targets:
                    continue
                rel = set(cur.rel)
                rel.add((i, j))
                nxt = canonicalize(cur.labels, rel, cur.eo,
                                   cur.sources, cur.targets)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
    return frozenset(seen)


def down_close(tops: Iterable[Ipomset]) -> frozenset[Ipomset]:
    """All *interval* ipomsets subsumed by some element of ``tops``."""
    out: set[Ipomset] = set()
    for top in tops:
        for q in sequentializations(top):
            if is_interval(q):
                out.add(q)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Literals
# ---------------------------------------------------------------------------


def parse_ipomset(text: str) -> Ipomset:
    """Parse the textual literal produced by :meth:`Ipomset.to_literal`.

    Grammar: ``events: <tok>, ...`` followed by optional ``order:`` pairs
    ``i<j`` (positions) and an optional ``eo:`` section listing event-order
    pairs that disagree with the listing order.  Unlisted incomparable
    pairs default to the listing order.
    """
    sections: dict[str, str] = {}
    for raw in text.split(";"):
        raw = raw.strip()
        if not raw:
            continue
        key, _, rest = raw.partition(":")
        sections[key.strip()] = rest.strip()
    if "events" not in sections:
        raise AxiomViolation("ipomset literal must start with 'events:'")

    labels: list[str] = []
    sources: set[int] = set()
    targets: set[int] = set()
    if sections["events"]:
        for i, tok in enumerate(t.strip() for t in sections["events"].split(",")):
            label, s, t_ = parse_ilo_token(tok)
            labels.append(label)
            if s:
                sources.add(i)
            if t_:
                targets.add(i)
    n = len(labels)

    def pairs(section: str) -> list[tuple[int, int]]:
        out = []
        if sections.get(section):
            for item in sections[section].split(","):
                a, _, b = item.partition("<")
                try:
                    out.append((int(a), int(b)))
                except ValueError:
                    raise AxiomViolation(f"bad pair {item!r} in {section}")
        return out

    rel = pairs("order")
    order = _transitive_closure(n, rel)
    overrides = dict()
    for i, j in pairs("eo"):
        overrides[frozenset((i, j))] = (i, j)
    eo = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in order or (j, i) in order:
                continue
            eo.append(overrides.get(frozenset((i, j)), (i, j)))
    return canonicalize(labels, rel, eo, sources, targets)


def literal_sort_key(p: Ipomset) -> tuple:
    return (twice_size(p), p.n, p.to_literal())
