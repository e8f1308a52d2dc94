"""Seeded random generators for ipomsets and automata.

Used by the test suite as a reproducibility harness: everything is driven
by a caller-supplied ``random.Random`` so corpora are stable across runs.
"""

from __future__ import annotations

import random
from typing import Sequence

from . import ipomset as ip
from . import pcset as pc
from .ipomset import IloSet, Ipomset
from .pcset import Hda, PrecubeSet, coproduct, relabel, standard_cube
from .surgery import _quotient


def random_ipomset(rng: random.Random, max_events: int = 5,
                   labels: Sequence[str] = ("a", "b")) -> Ipomset:
    """A random valid ipomset; precedence from a random dag, event order
    from a random linear order on the incomparable pairs."""
    n = rng.randint(0, max_events)
    labs = [rng.choice(labels) for _ in range(n)]
    topo = list(range(n))
    rng.shuffle(topo)
    rel = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.35:
                rel.add((topo[i], topo[j]))
    order = ip._transitive_closure(n, rel)
    evperm = list(range(n))
    rng.shuffle(evperm)
    rank = {e: k for k, e in enumerate(evperm)}
    eo = [(a, b) if rank[a] < rank[b] else (b, a)
          for a in range(n) for b in range(a + 1, n)
          if (a, b) not in order and (b, a) not in order]
    minimal = [i for i in range(n) if not any(b == i for _, b in order)]
    maximal = [i for i in range(n) if not any(a == i for a, _ in order)]
    sources = [i for i in minimal if rng.random() < 0.3]
    targets = [i for i in maximal if rng.random() < 0.3]
    return ip.canonicalize(labs, order, eo, sources, targets)


def random_ilo(rng: random.Random, max_events: int,
               labels: Sequence[str]) -> IloSet:
    n = rng.randint(0, max_events)
    labs = tuple(rng.choice(labels) for _ in range(n))
    sources = frozenset(i for i in range(n) if rng.random() < 0.4)
    targets = frozenset(i for i in range(n) if rng.random() < 0.4)
    return IloSet(labs, sources, targets)


def random_interval_ipomset(rng: random.Random, max_events: int = 5,
                            max_width: int = 3,
                            labels: Sequence[str] = ("a", "b")) -> Ipomset:
    """A random interval ipomset, generated as a gluing of discrete steps
    (every interval ipomset arises this way); width stays below the bound
    because gluing takes the maximum of the factor widths."""
    while True:
        k = rng.randint(1, 3)
        word = [rng.choice(labels)
                for _ in range(rng.randint(0, max_width))]
        srcs = frozenset(i for i in range(len(word)) if rng.random() < 0.5)
        tgts = frozenset(i for i in range(len(word)) if rng.random() < 0.7)
        acc = ip.discrete(IloSet(tuple(word), srcs, tgts))
        for _ in range(k - 1):
            tgt_word = list(acc.interface_loset("target").labels)
            positions = list(range(len(tgt_word)))
            new_word = list(tgt_word)
            new_pos = dict(zip(positions, range(len(tgt_word))))
            while len(new_word) < max_width and rng.random() < 0.5:
                at = rng.randint(0, len(new_word))
                new_word.insert(at, rng.choice(labels))
                new_pos = {old: p + (1 if p >= at else 0)
                           for old, p in new_pos.items()}
            srcs2 = frozenset(new_pos.values())
            tgts2 = frozenset(i for i in range(len(new_word))
                              if rng.random() < 0.6)
            step = ip.discrete(IloSet(tuple(new_word), srcs2, tgts2))
            acc = ip.glue(acc, step)
        if acc.n <= max_events:
            return acc


def random_hda(rng: random.Random, max_cells: int = 10,
               labels: Sequence[str] = ("a", "b"),
               allow_squares: bool = True) -> Hda:
    """A random plain HDA: a pile of vertices, edges, and squares with some
    same-shape cells identified, and random nonempty start/accept sets."""
    pieces: list[Hda] = []
    budget = max_cells
    while budget > 0:
        roll = rng.random()
        if allow_squares and roll < 0.2 and budget >= 9:
            u = IloSet((rng.choice(labels), rng.choice(labels)))
            cost = 9
        elif roll < 0.75 and budget >= 3:
            u = IloSet((rng.choice(labels),))
            cost = 3
        else:
            u = IloSet(())
            cost = 1
        cube, _ = standard_cube(u)
        pieces.append(Hda(cube, frozenset(), frozenset()))
        budget -= cost
        if rng.random() < 0.25 and len(pieces) >= 2:
            break
    merged = coproduct(pieces)
    cells = dict(merged.cells)
    for _ in range(rng.randint(0, 5)):
        by_iev: dict = {}
        for cid, c in cells.items():
            by_iev.setdefault(c.iev, []).append(cid)
        buckets = [b for b in by_iev.values() if len(b) >= 2]
        if not buckets:
            break
        bucket = rng.choice(sorted(buckets, key=lambda b: b[0]))
        a, b = rng.sample(bucket, 2)
        table, _ = _quotient(cells, [(a, b)], pc.PLAIN)
        cells = dict(table.cells)
    ids = sorted(cells)
    start = frozenset(rng.sample(ids, rng.randint(1, min(2, len(ids)))))
    accept = frozenset(rng.sample(ids, rng.randint(1, min(2, len(ids)))))
    out = relabel(Hda(PrecubeSet(cells, pc.PLAIN), start, accept))[0]
    assert out.validate() == []
    return out
