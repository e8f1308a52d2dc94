#!/usr/bin/env python3
"""Regenerate the JSON fixtures under fixtures/.

Every fixture is spelled out cell by cell (or built from the standard
cube constructors) so the files stay deterministic; fig1.json is kept
hand-authored and is not rewritten here.
"""

from __future__ import annotations

import os
import sys

from hdalang.ipomset import IloSet, ilo_from_word
from hdalang import pcset as pc
from hdalang.pcset import Cell, Hda, PrecubeSet


def vertex(cid: str) -> Cell:
    return Cell(cid, IloSet(()), (), ())


def edge(cid: str, label: str, lo: str | None, hi: str | None,
         source: bool = False, target: bool = False) -> Cell:
    return Cell(
        cid,
        IloSet((label,),
               frozenset([0] if source else []),
               frozenset([0] if target else [])),
        (lo,), (hi,))


def save(name: str, hda: Hda, outdir: str) -> None:
    errs = hda.validate()
    if errs:
        raise SystemExit(f"{name}: invalid fixture: {errs[:3]}")
    pc.save_hda(hda, os.path.join(outdir, name + ".json"))
    print("wrote", name, f"({len(hda.cells)} cells)")


def main(outdir: str = "fixtures") -> None:
    # the six single-letter recognizers
    save("prop9_empty", Hda(PrecubeSet({}, pc.PLAIN)), outdir)
    save("prop9_eps", Hda(PrecubeSet({"v": vertex("v")}, pc.PLAIN),
                          frozenset(["v"]), frozenset(["v"])), outdir)
    base = {"v0": vertex("v0"), "v1": vertex("v1"),
            "e": edge("e", "a", "v0", "v1")}
    save("prop9_a", Hda(PrecubeSet(dict(base), pc.PLAIN),
                        frozenset(["v0"]), frozenset(["v1"])), outdir)
    save("prop9_astart", Hda(PrecubeSet(dict(base), pc.PLAIN),
                             frozenset(["e"]), frozenset(["v1"])), outdir)
    save("prop9_atarget", Hda(PrecubeSet(dict(base), pc.PLAIN),
                              frozenset(["v0"]), frozenset(["e"])), outdir)
    save("prop9_aboth", Hda(PrecubeSet(dict(base), pc.PLAIN),
                            frozenset(["e"]), frozenset(["e"])), outdir)

    # the worked-example cubes
    cube_ab, _ = pc.standard_cube(IloSet(("a", "b")))
    save("cube_ab", Hda(cube_ab), outdir)
    icube, _ = pc.standard_cube(ilo_from_word(".a b."))
    save("icube_sab_t", Hda(icube), outdir)

    # single segment (resolution blows it up to six cells)
    save("segment", Hda(PrecubeSet(dict(base), pc.PLAIN),
                        frozenset(["v0"]), frozenset(["v1"])), outdir)

    # non-proper iHDAs: start vertex with an incoming edge
    cells = {"a0": vertex("a0"), "a1": vertex("a1"),
             "ed": edge("ed", "x", "a0", "a1")}
    save("nonproper_vertex",
         Hda(PrecubeSet(cells, pc.IFACE),
             frozenset(["a1"]), frozenset(["a1"])), outdir)

    # non-proper: two start edges sharing their target vertex
    cells = {
        "w": vertex("w"),
        "e1": edge("e1", "x", None, "w", source=True),
        "e2": edge("e2", "x", None, "w", source=True),
    }
    save("nonproper_shared",
         Hda(PrecubeSet(cells, pc.IFACE),
             frozenset(["e1", "e2"]), frozenset(["w"])), outdir)

    # non-proper: start square whose two upper faces are identified
    cells = {
        "v": vertex("v"),
        "e": edge("e", "x", None, "v", source=True),
        "s": Cell("s", IloSet(("x", "x"), frozenset([0, 1]), frozenset()),
                  (None, None), ("e", "e")),
    }
    save("nonproper_square",
         Hda(PrecubeSet(cells, pc.IFACE),
             frozenset(["s"]), frozenset(["v"])), outdir)

    # spider census: two starts, two accepts, exactly one compatible pair
    cells = {
        "s1": vertex("s1"),
        "v2": vertex("v2"),
        "t1": vertex("t1"),
        "u2": vertex("u2"),
        "s2": edge("s2", "x", None, "v2", source=True),
        "t2": edge("t2", "y", "u2", None, target=True),
        "eb": edge("eb", "b", "v2", "t1"),
        "ec": edge("ec", "c", "s1", "u2"),
    }
    save("spider_census",
         Hda(PrecubeSet(cells, pc.IFACE),
             frozenset(["s1", "s2"]), frozenset(["t1", "t2"])), outdir)

    # gluing regression: loops on the accept/start vertices create words
    # that do not factor through the interface
    cells = {
        "v0": vertex("v0"), "z": vertex("z"),
        "ea": edge("ea", "a", "v0", "z"),
        "lb": edge("lb", "b", "z", "z"),
    }
    save("improper_left",
         Hda(PrecubeSet(cells, pc.PLAIN),
             frozenset(["v0"]), frozenset(["z"])), outdir)
    cells = {
        "zp": vertex("zp"), "w": vertex("w"),
        "lc": edge("lc", "c", "zp", "zp"),
        "ed": edge("ed", "d", "zp", "w"),
    }
    save("improper_right",
         Hda(PrecubeSet(cells, pc.PLAIN),
             frozenset(["zp"]), frozenset(["w"])), outdir)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
