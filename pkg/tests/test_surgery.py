"""Gluing machinery: inclusions, quotients, cylinders, properization,
identity subtraction, spider, and the general plus."""

import pytest

from conftest import load

from hdalang import ipomset as ip
from hdalang import langset as ls
from hdalang import pathlang as pl
from hdalang import pcset as pc
from hdalang import surgery as sg
from hdalang.errors import (
    ImagesNotDisjoint,
    NotSimple,
    PreconditionViolation,
    ShapeMismatch,
)
from hdalang.ipomset import IloSet
from hdalang.langset import Truncation, lang_glue, lang_plus, language
from hdalang.pcset import Cell, Hda, PcMap, PrecubeSet

T32 = Truncation.of(3, 2)
T42 = Truncation.of(4, 2)
A = ip.singleton("a")
B = ip.singleton("b")


def edge_hda(lab="a"):
    cells = {
        "v0": Cell("v0", IloSet(()), (), ()),
        "v1": Cell("v1", IloSet(()), (), ()),
        "e": Cell("e", IloSet((lab,)), ("v0",), ("v1",)),
    }
    return Hda(PrecubeSet(cells), frozenset(["v0"]), frozenset(["v1"]))


def lang(x, t=T32):
    return pl.enumerate_language(x, t).members


def start_map(x):
    return sg._marker_cubes(x, x.start, "s")[1]


def accept_map(x):
    return sg._marker_cubes(x, x.accept, "t")[1]


# -- inclusions ----------------------------------------------------------------


def test_identity_map_is_initial_and_final(fig1):
    m = PcMap(fig1, fig1, {c: c for c in fig1.cells})
    rep = sg.classify_inclusion(m)
    assert rep.injective and rep.initial and rep.final


def test_nonproper_fixture_start_maps_not_initial():
    for name in ["nonproper_vertex", "nonproper_shared", "nonproper_square"]:
        x = load(name)
        rep = sg.classify_inclusion(start_map(x))
        assert not (rep.injective and rep.initial), name


def test_proper_start_map_is_initial():
    x = load("prop9_astart")  # start cell is the edge, nothing enters it
    as_iface = Hda(pc.resolve(x).pcset, pc.resolve(x).start,
                   pc.resolve(x).accept)
    proper = sg.start_properize(pc.trim(pc.resolve(x))).hda
    rep = sg.classify_inclusion(start_map(proper))
    assert rep.injective and rep.initial


# -- gluing composition ----------------------------------------------------------


def test_glue_hdas_edge_chain():
    z = sg.glue_hdas(edge_hda("a"), edge_hda("b"))
    assert z.validate() == []
    assert len(z.cells) == 5            # 3 + 3 minus one merged vertex
    assert lang(z) == frozenset([ip.glue(A, B)])


def test_glue_hdas_along_edge_merges_three_cells():
    # glue two squares along a full edge: |cube([a])| = 3 cells merge
    sqa = pc.tensor(edge_hda("a"), edge_hda("b"))
    top_edge = sqa.pcset.face(next(iter(
        c for c in sqa.cells if sqa.cell(c).dim == 2)), [], [1])
    left = Hda(sqa.pcset, sqa.start, frozenset([top_edge]))
    sqb = pc.tensor(edge_hda("a"), edge_hda("c"))
    bottom_edge = sqb.pcset.face(next(iter(
        c for c in sqb.cells if sqb.cell(c).dim == 2)), [1], [])
    right = Hda(sqb.pcset, frozenset([bottom_edge]), sqb.accept)
    z = sg.glue_hdas(left, right)
    assert z.validate() == []
    assert len(z.cells) == 9 + 9 - 3


def test_glue_hdas_preconditions():
    two_accepts = Hda(edge_hda().pcset, frozenset(["v0"]),
                      frozenset(["v0", "v1"]))
    with pytest.raises(NotSimple):
        sg.glue_hdas(two_accepts, edge_hda())
    sq = pc.tensor(edge_hda("a"), edge_hda("b"))
    top = next(c for c in sq.cells if sq.cell(c).dim == 2)
    square_accept = Hda(sq.pcset, sq.start, frozenset([top]))
    with pytest.raises(ShapeMismatch):
        sg.glue_hdas(square_accept, edge_hda())


# -- sequential gluing -----------------------------------------------------------


def _three_factor_chain():
    """Closures of three proper one-letter recognisers glued at vertices."""
    parts, gluers, fs, gs = [], [], [], []
    labels = ["a", "b", "c"]
    closed = []
    for lab in labels:
        r = pc.trim(pc.resolve(edge_hda(lab)))
        closed.append(pc.close(r))
    for k in range(2):
        left, right = closed[k], closed[k + 1]
        (acc,) = left.accept
        (st,) = right.start
        cube, _ = pc.standard_cube(IloSet(()))
        gluers.append(cube)
        gs.append(PcMap(cube, left.pcset,
                        {next(iter(cube.cells)): acc}))
        fs.append(PcMap(cube, right.pcset,
                        {next(iter(cube.cells)): st}))
    return closed, gluers, fs, gs


def test_seq_glue_three_factors_language_and_count():
    parts, gluers, fs, gs = _three_factor_chain()
    res = sg.seq_glue(parts, gluers, fs, gs)
    z = res.hda
    assert z.validate() == []
    assert len(z.cells) == sum(len(p.cells) for p in parts) - 2
    want = ip.glue(ip.glue(A, B), ip.singleton("c"))
    assert lang(z, Truncation.of(3, 1)) == frozenset([want])
    # structural maps: connector images are exactly the part overlaps
    for k in range(2):
        img_k = set(res.part_maps[k].values())
        img_k1 = set(res.part_maps[k + 1].values())
        assert set(res.gluer_maps[k].values()) == img_k & img_k1


def test_seq_glue_two_factors_matches_glue_hdas():
    parts, gluers, fs, gs = _three_factor_chain()
    res = sg.seq_glue(parts[:2], gluers[:1], fs[:1], gs[:1])
    direct = sg.glue_hdas(parts[0], parts[1])
    assert pc.iso_cell_tables(res.hda, direct)
    assert lang(res.hda) == lang(direct)


def test_seq_glue_rejects_bad_legs():
    parts, gluers, fs, gs = _three_factor_chain()
    # swap the forward leg to a non-initial target (the accept vertex)
    (acc,) = parts[1].accept
    bad_f = PcMap(gluers[0], parts[1].pcset,
                  {next(iter(gluers[0].cells)): acc})
    with pytest.raises(PreconditionViolation):
        sg.seq_glue(parts[:2], gluers[:1], [bad_f], gs[:1])


# -- self-gluing ------------------------------------------------------------------


def _two_edge_loop():
    """Two a-edges self-glued end-to-start into a loop; markers sit on the
    edges so the weld stays disjoint from them."""
    cells = {}
    for k in (0, 1):
        cells[f"u{k}"] = Cell(f"u{k}", IloSet(()), (), ())
        cells[f"w{k}"] = Cell(f"w{k}", IloSet(()), (), ())
        cells[f"e{k}"] = Cell(f"e{k}", IloSet(("a",)), (f"u{k}",), (f"w{k}",))
    x = Hda(PrecubeSet(cells), frozenset(["e0"]), frozenset(["e1"]))
    ytab = PrecubeSet({
        "p0": Cell("p0", IloSet(()), (), ()),
        "p1": Cell("p1", IloSet(()), (), ()),
    })
    f = PcMap(ytab, x.pcset, {"p0": "u0", "p1": "u1"})
    g = PcMap(ytab, x.pcset, {"p0": "w1", "p1": "w0"})
    return x, ytab, f, g


def test_self_glue_loop_geometry_and_language():
    x, ytab, f, g = _two_edge_loop()
    v = sg.self_glue(x, ytab, f, g)
    assert v.validate() == []
    assert len(v.cells) == 4            # 2 edges + 2 merged vertices
    # language: start on e0 (a running), terminate, run e1, keep it running
    want = ip.glue(ip.glue(
        ip.singleton("a", source=True, target=True),
        ip.singleton("a", source=True)),
        ip.singleton("a", source=True, target=True))
    got = lang(v, Truncation.of(1, 1))
    assert got == frozenset([want])


def test_self_glue_unfolds_into_chains():
    # truncated language of the self-gluing equals the union over chain
    # lengths of the sequential gluings
    x, ytab, f, g = _two_edge_loop()
    v = sg.self_glue(x, ytab, f, g)
    t = Truncation.of(3, 1)
    want = lang(v, t)
    got = set()
    for n in (1, 2, 3, 4):
        res = sg.seq_glue([x] * n, [ytab] * (n - 1), [f] * (n - 1),
                          [g] * (n - 1))
        got |= lang(res.hda, t)
    assert got == want


def test_self_glue_empty_weld_is_identity():
    x = edge_hda()
    empty = PrecubeSet({}, pc.PLAIN)
    nothing = PcMap(empty, x.pcset, {})
    v = sg.self_glue(x, empty, nothing, nothing)
    assert pc.iso_cell_tables(v, x)


def test_self_glue_rejects_marker_overlap():
    # gluing accept straight to start violates marker disjointness
    x = edge_hda()
    pt = PrecubeSet({"p": Cell("p", IloSet(()), (), ())})
    f = PcMap(pt, x.pcset, {"p": "v0"})
    g = PcMap(pt, x.pcset, {"p": "v1"})
    with pytest.raises(PreconditionViolation):
        sg.self_glue(x, pt, f, g)


# -- cylinders --------------------------------------------------------------------


def _edge_point_cylinder():
    x = edge_hda()
    empty = PrecubeSet({}, pc.PLAIN)
    ptab = PrecubeSet({"q": Cell("q", IloSet(()), (), ())})
    f = PcMap(ptab, x.pcset, {"q": "v0"})
    g = PcMap(empty, x.pcset, {})
    return x, ptab, f, g, sg.cylinder(f, g)


def test_cylinder_empty_legs_is_base(fig1):
    empty = PrecubeSet({}, pc.PLAIN)
    nothing = PcMap(empty, fig1.pcset, {})
    cyl = sg.cylinder(nothing, nothing)
    assert pc.iso_cell_tables(cyl.pcset, fig1.pcset)
    assert sorted(cyl.j.values()) == sorted(cyl.pcset.cells)


def test_cylinder_cells_of_edge_point_example():
    x, ptab, f, g, cyl = _edge_point_cylinder()
    assert cyl.pcset.validate() == []
    assert len(cyl.pcset.cells) == 5
    # identities of the four structural maps
    assert all(cyl.p[cyl.j[c]] == c for c in x.cells)
    assert cyl.p[cyl.ftilde["q"]] == "v0"
    rep = sg.classify_inclusion(PcMap(ptab, cyl.pcset, dict(cyl.ftilde)))
    assert rep.injective and rep.initial


def test_cylinder_images_disjoint_and_characterised():
    x, ptab, f, g, cyl = _edge_point_cylinder()
    jset = set(cyl.j.values())
    fset = set(cyl.ftilde.values())
    assert not (jset & fset)
    for cid, (base, k_cells, l_cells) in cyl.info.items():
        assert not (k_cells & l_cells)
        cube, _ = pc.standard_cube(x.cell(base).iev)
        full = frozenset(cube.cells)
        assert (cid in fset) == (k_cells == full and not l_cells)
        assert (cid in jset) == (not k_cells and not l_cells)


def test_cylinder_rejects_overlapping_images():
    x = edge_hda()
    pt = PrecubeSet({"p": Cell("p", IloSet(()), (), ())})
    m = PcMap(pt, x.pcset, {"p": "v0"})
    with pytest.raises(ImagesNotDisjoint):
        sg.cylinder(m, m)


def test_cylinder_projection_lifting(fig1):
    # cylinder over the start and accept maps of the running example
    r = pc.trim(pc.resolve(fig1))
    sp = sg.spider(r)
    base = Hda(r.pcset)
    cylhda = Hda(sp.spider.pcset)
    proj = PcMap(cylhda, base, dict(sp.projection))
    assert proj.validate() == []
    assert sg.has_flp(proj)
    assert sg.has_plp(proj)
    fset = frozenset(pl_img for pl_img in
                     sg._interface_image(r, r.start))
    gset = frozenset(sg._interface_image(r, r.accept))
    assert sg.bounded_tlp(proj, fset, gset, T32)


def test_cylinder_lem28_fields(fig1):
    r = pc.trim(pc.resolve(fig1))
    jtab, w, _ = sg._marker_cubes(r, r.start, "s")
    ktab, v, _ = sg._marker_cubes(r, r.accept, "t")
    cyl = sg.cylinder(w, v)
    fimg, gimg = w.image(), v.image()
    for cid, (base, k_cells, l_cells) in cyl.info.items():
        assert not (k_cells & l_cells)
        if base in fimg:
            assert not l_cells
        if base in gimg:
            assert not k_cells


# -- properization ----------------------------------------------------------------


def test_properize_preserves_language_on_counterexamples():
    for name in ["nonproper_vertex", "nonproper_shared", "nonproper_square"]:
        x = load(name)
        res = sg.start_properize(x)
        assert res.hda.validate() == []
        rep = sg.classify_inclusion(start_map(res.hda))
        assert rep.injective and rep.initial, name
        assert lang(res.hda, T32) == lang(x, T32), name
        assert pl.bounded_weak_equivalence(res.projection, T32), name


def test_properized_start_cells_minimal():
    for name in ["nonproper_vertex", "nonproper_shared", "spider_census"]:
        x = load(name)
        proper = sg.start_properize(x).hda
        reach = proper.pcset.reach()
        for s in proper.start:
            below = [c for c in proper.pcset.cells
                     if s in reach[c] and c != s]
            assert below == [], (name, s, below)


def test_accept_properize_dual(fig1):
    r = pc.trim(pc.resolve(fig1))
    res = sg.accept_properize(r)
    assert res.hda.validate() == []
    rep = sg.classify_inclusion(accept_map(res.hda))
    assert rep.injective and rep.final
    assert lang(res.hda, Truncation.of(4, 3)) == lang(r, Truncation.of(4, 3))


def test_properize_already_proper_input():
    r = pc.trim(pc.resolve(edge_hda()))
    res = sg.start_properize(r)
    assert lang(res.hda) == lang(r)


# -- decomposition and identity subtraction ------------------------------------


def test_decompose_simple_counts_and_union(rng):
    x = load("spider_census")
    parts = sg.decompose_simple(x)
    assert len(parts) == 4
    t = T32
    union = set()
    for part in parts:
        union |= lang(part, t)
    assert union == lang(x, t)
    simple = sg.decompose_simple(edge_hda())
    assert len(simple) == 1


def test_subtract_identities_examples(fig1):
    t = T32
    assert lang(sg.subtract_identities(pc.point_hda()), t) == frozenset()
    s1 = sg.subtract_identities(fig1)
    assert lang(s1, Truncation.of(4, 3)) == lang(fig1, Truncation.of(4, 3))
    eps = load("prop9_eps")
    assert lang(sg.subtract_identities(eps), t) == frozenset()
    both = load("prop9_aboth")   # accepts the identity <a|a|a> and chains
    sub = sg.subtract_identities(both)
    want = lang(both, t) - {p for p in lang(both, t) if p.is_identity()}
    assert lang(sub, t) == want


# -- serial composition: equality and the regression witness --------------------


def test_compose_serial_language_law_on_loop_fixtures():
    left, right = load("improper_left"), load("improper_right")
    t = Truncation.of(4, 1)
    want = lang_glue(pl.enumerate_language(left, t),
                     pl.enumerate_language(right, t)).members
    good = sg.compose_serial(left, right)
    assert lang(good, t) == want


def test_naive_gluing_overshoots_without_properization():
    left, right = load("improper_left"), load("improper_right")
    t = Truncation.of(4, 1)
    want = lang_glue(pl.enumerate_language(left, t),
                     pl.enumerate_language(right, t)).members
    naive = sg.glue_hdas(left, right)
    got = lang(naive, t)
    assert want < got
    # an explicit interleaving witness: a c b d
    witness = ip.glue(ip.glue(ip.glue(
        A, ip.singleton("c")), B), ip.singleton("d"))
    assert witness in got and witness not in want


def test_proper_closure_gluing_matches_language_law():
    # the equality of the gluing law on properized closures, checked
    # directly on the closure gluing rather than through compose_serial
    t = T42
    la = pc.trim(pc.resolve(load("improper_left")))
    lb = pc.trim(pc.resolve(load("improper_right")))
    a_prop = sg.accept_properize(la).hda
    b_prop = sg.start_properize(lb).hda
    glued = sg.glue_hdas(pc.trim(pc.close(a_prop)), pc.trim(pc.close(b_prop)))
    want = lang_glue(pl.enumerate_language(la, t),
                     pl.enumerate_language(lb, t)).members
    assert lang(glued, t) == want


# -- spider ----------------------------------------------------------------------


def test_spider_census_counts():
    x = load("spider_census")
    sp = sg.spider(x)
    assert len(sp.match_pairs) == 1
    # one copy per compatible accept plus the replacement copy, per start
    assert len(sp.start_copy) == len(sp.match_pairs) + len(x.start)
    assert len(sp.accept_copy) == len(sp.match_pairs) + len(x.accept)
    assert len(sp.spider.start) == len(x.start)
    assert len(sp.spider.accept) == len(x.accept)


def test_spider_plus_language_law():
    t = T42
    ab = sg.compose_serial(edge_hda("a"), edge_hda("b"))
    r = pc.trim(pc.resolve(ab))
    plus = sg.spider_plus(r)
    want = lang_plus(pl.enumerate_language(r, t)).members
    assert lang(plus, t) == want


def test_swarm_law_at_two_factors():
    # union over compatible pairs of two-factor chains = squared language
    t = T42
    x = pc.trim(pc.resolve(pc.coproduct([edge_hda("a"), edge_hda("b")])))
    sp = sg.spider(x)
    base = pl.enumerate_language(x, t)
    want = lang_glue(base, base).members
    got = set()
    for pair in sp.match_pairs:
        chain = sg.spider_chain(x, [pair])
        got |= lang(chain, t)
    assert got == want


def test_spider_rejects_overlapping_neighbourhoods():
    x = pc.trim(pc.resolve(load("prop9_atarget")))   # {a.} is not separated
    with pytest.raises(Exception):
        sg.spider(x)


# -- kleene plus -------------------------------------------------------------------


def test_kleene_plus_of_letter():
    plus = sg.kleene_plus(edge_hda("a"))
    t = Truncation.of(3, 1)
    want = lang_plus(language([A], t)).members
    assert lang(plus, t) == want


def test_kleene_plus_identity_only():
    plus = sg.kleene_plus(pc.point_hda())
    assert lang(plus, T32) == frozenset([ip.empty()])


def test_kleene_plus_not_separated_language():
    # {a.} glues with itself never (target interface mismatch with source)
    x = load("prop9_atarget")
    plus = sg.kleene_plus(x)
    assert lang(plus, T32) == frozenset([ip.singleton("a", target=True)])
