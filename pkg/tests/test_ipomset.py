"""The ipomset algebra: canonical forms, compositions, measures, closure."""

import random

import pytest

from hdalang import ipomset as ip
from hdalang.errors import AxiomViolation, InterfaceMismatch
from hdalang.ipomset import IloSet
from hdalang.randgen import random_interval_ipomset, random_ipomset

A = ip.singleton("a")
B = ip.singleton("b")
C = ip.singleton("c")


def glue_chain(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = ip.glue(out, p)
    return out


# -- canonicalization --------------------------------------------------------


def test_event_order_dropped_on_comparable_pairs():
    one = ip.canonicalize(("a", "b"), [(0, 1)], [(0, 1)], (), ())
    other = ip.canonicalize(("a", "b"), [(0, 1)], [(1, 0)], (), ())
    assert one == other
    assert one.eo == frozenset()


def test_canonical_form_is_permutation_invariant():
    # relabel events of a || (b -> c) by a permutation of indices
    base = ip.parallel(A, ip.glue(B, C))
    perm = ip.canonicalize(
        ("c", "a", "b"), [(2, 0)], [(1, 2), (1, 0), (2, 0)], (), ())
    assert perm == base


def test_canonicalize_idempotent_on_random_iposets(rng):
    for _ in range(1000):
        p = random_ipomset(rng, 6)
        assert ip.canonicalize(p.labels, p.rel, p.eo,
                               p.sources, p.targets) == p


def test_axiom_violations_raise():
    with pytest.raises(AxiomViolation):  # cyclic precedence
        ip.canonicalize(("a", "b"), [(0, 1), (1, 0)], [], (), ())
    with pytest.raises(AxiomViolation):  # incomparable pair without eo
        ip.canonicalize(("a", "b"), [], [], (), ())
    with pytest.raises(AxiomViolation):  # source not minimal
        ip.canonicalize(("a", "b"), [(0, 1)], [], (1,), ())
    with pytest.raises(AxiomViolation):  # target not maximal
        ip.canonicalize(("a", "b"), [(0, 1)], [], (), (0,))


def test_cyclic_combined_order_still_canonicalizes():
    # a<b with event order c before a and b before c: the union of the two
    # orders is cyclic, the fallback numbering must handle it
    p = ip.canonicalize(("a", "b", "c"), [(0, 1)], [(2, 0), (1, 2)], (), ())
    q = ip.canonicalize(("c", "b", "a"), [(2, 1)], [(0, 2), (1, 0)], (), ())
    assert p == q
    assert ip.is_interval(p)


# -- constructors ------------------------------------------------------------


def test_singletons_and_identity():
    assert A.to_literal() == "events: a"
    assert ip.singleton("a", source=True).to_literal() == "events: .a"
    assert ip.identity(IloSet(())) == ip.empty()
    u = IloSet(("a", "b"))
    idu = ip.identity(u)
    assert idu.is_identity() and ip.twice_size(idu) == 0


def test_reverse_swaps_interfaces():
    p = ip.singleton("a", target=True)       # <0|a|a>
    assert ip.reverse(p) == ip.singleton("a", source=True)
    q = ip.glue(A, B)
    assert ip.reverse(ip.reverse(q)) == q


# -- gluing ------------------------------------------------------------------


def test_glue_of_matching_interface_singletons_is_letter():
    left = ip.singleton("a", target=True)
    right = ip.singleton("a", source=True)
    assert ip.glue(left, right) == A


def test_glue_interface_mismatch():
    with pytest.raises(InterfaceMismatch):
        ip.glue(ip.singleton("a", target=True), ip.singleton("b", source=True))
    with pytest.raises(InterfaceMismatch):
        ip.glue(A, ip.singleton("b", source=True))


def test_glue_identity_units():
    idu = ip.identity(IloSet(("a", "b")))
    # id_U * Q = Q whenever S_Q = U, and dually
    q = ip.discrete(IloSet(("a", "b"), frozenset([0, 1]), frozenset()))
    assert ip.glue(idu, q) == q
    p = ip.discrete(IloSet(("a", "b"), frozenset(), frozenset([0, 1])))
    assert ip.glue(p, idu) == p


def test_parallel_examples():
    col = ip.parallel(A, B)
    assert col.is_discrete() and col.n == 2
    assert ip.parallel(ip.empty(), A) == A
    two = ip.parallel(ip.glue(A, B), ip.glue(A, B))
    assert ip.width(two) == 2 and not ip.is_interval(two)


def test_parallel_not_commutative_due_to_event_order():
    assert ip.parallel(A, B) != ip.parallel(B, A)


# -- measures ----------------------------------------------------------------


def test_measures_examples():
    m = ip.measures(ip.singleton("a", source=True))
    assert m.width == 1 and m.twice_size == 1
    l = ip.singleton("a", target=True)
    r = ip.singleton("a", source=True)
    # size(<0|a|a>) + size(<a|a|0>) = 1 = size([a])
    assert ip.twice_size(l) + ip.twice_size(r) == ip.twice_size(A) == 2
    assert ip.twice_size(ip.glue(l, r)) == ip.twice_size(l) + ip.twice_size(r)
    m2 = ip.measures(ip.parallel(A, ip.glue(B, C)))
    assert m2.width == 2 and m2.size == 3


def test_width_size_laws_random(rng):
    for _ in range(300):
        p = random_ipomset(rng, 5)
        q = random_ipomset(rng, 5)
        par = ip.parallel(p, q)
        assert ip.width(par) == ip.width(p) + ip.width(q)
        assert ip.twice_size(par) == ip.twice_size(p) + ip.twice_size(q)


def test_glue_width_max_and_size_additive(rng):
    for _ in range(300):
        p = random_interval_ipomset(rng, 5, 3)
        q = random_interval_ipomset(rng, 5, 3)
        try:
            g = ip.glue(p, q)
        except InterfaceMismatch:
            continue
        assert ip.width(g) == max(ip.width(p), ip.width(q))
        assert ip.twice_size(g) == ip.twice_size(p) + ip.twice_size(q)


# -- interval recognition ----------------------------------------------------


def test_is_interval_examples():
    assert ip.is_interval(ip.glue(A, B))
    assert not ip.is_interval(ip.parallel(ip.glue(A, B), ip.glue(A, B)))
    assert ip.is_interval(ip.empty())


def test_interval_agrees_with_representation_search(rng):
    for _ in range(400):
        p = random_ipomset(rng, 6)
        rep = ip.interval_representation(p)
        assert ip.is_interval(p) == (rep is not None)
        if rep is not None:
            for i in range(p.n):
                bi, ei = rep[i]
                assert bi <= ei
                for j in range(p.n):
                    if i != j:
                        assert ((i, j) in p.rel) == (ei < rep[j][0])


# -- subsumption -------------------------------------------------------------


def test_subsumption_examples():
    b_then_ac = ip.glue(B, ip.discrete(IloSet(("a", "c"))))
    a_par_bc = ip.parallel(A, ip.glue(B, C))
    assert ip.subsumes(b_then_ac, a_par_bc)
    assert ip.subsumes(ip.glue(A, B), ip.parallel(A, B))
    assert not ip.subsumes(ip.parallel(A, B), ip.glue(A, B))


def test_subsumption_reflexive_transitive(rng):
    seen = [random_interval_ipomset(rng, 4, 2) for _ in range(40)]
    for p in seen:
        assert ip.subsumes(p, p)
    for p in seen[:15]:
        downs = sorted(ip.down_close([p]), key=ip.literal_sort_key)
        for q in downs:
            assert ip.subsumes(q, p)
            for r in ip.down_close([q]):
                assert ip.subsumes(r, p)  # transitivity through q


def test_mutual_subsumption_is_equality(rng):
    for _ in range(100):
        p = random_ipomset(rng, 4)
        q = random_ipomset(rng, 4)
        if ip.subsumes(p, q) and ip.subsumes(q, p):
            assert p == q


def test_width_monotone_under_subsumption(rng):
    for _ in range(60):
        q = random_interval_ipomset(rng, 5, 3)
        for p in ip.down_close([q]):
            assert ip.width(p) <= ip.width(q)


# -- down-closure ------------------------------------------------------------


def test_down_close_on_antichain():
    got = ip.down_close([ip.parallel(A, B)])
    assert got == frozenset(
        [ip.parallel(A, B), ip.glue(A, B), ip.glue(B, A)])


def test_down_close_fixes_identities():
    idu = ip.identity(IloSet(("a", "b")))
    assert ip.down_close([idu]) == frozenset([idu])


def test_down_close_idempotent_extensive(rng):
    for _ in range(40):
        p = random_interval_ipomset(rng, 4, 2)
        once = ip.down_close([p])
        assert p in once
        assert ip.down_close(once) == once
        for q in once:
            assert sorted(q.labels) == sorted(p.labels)
            assert len(q.sources) == len(p.sources)
            assert len(q.targets) == len(p.targets)


def test_elementary_decomposition_subsumption():
    # <U|U|Z> * <Z|V|V> is subsumed by <U|W|V> for Z = U∩V, W = U∪V
    w = ("a", "b", "c")
    u_pos, v_pos = {0, 1}, {0, 2}
    z_pos = u_pos & v_pos
    left = ip.discrete(IloSet(("a", "b"),
                              frozenset([0, 1]), frozenset([0])))
    right = ip.discrete(IloSet(("a", "c"),
                               frozenset([0]), frozenset([0, 1])))
    glued = ip.glue(left, right)
    top = ip.discrete(IloSet(w, frozenset(u_pos), frozenset(v_pos)))
    assert ip.subsumes(glued, top)
    assert glued in ip.down_close([top])


# -- associativity -----------------------------------------------------------


def test_composition_associativity(rng):
    for _ in range(150):
        p = random_interval_ipomset(rng, 4, 2)
        q = random_interval_ipomset(rng, 4, 2)
        r = random_interval_ipomset(rng, 4, 2)
        assert ip.parallel(ip.parallel(p, q), r) == \
            ip.parallel(p, ip.parallel(q, r))
        try:
            left = ip.glue(ip.glue(p, q), r)
        except InterfaceMismatch:
            continue
        assert left == ip.glue(p, ip.glue(q, r))


def test_glue_of_intervals_is_interval(rng):
    for _ in range(150):
        p = random_interval_ipomset(rng, 4, 3)
        q = random_interval_ipomset(rng, 4, 3)
        try:
            g = ip.glue(p, q)
        except InterfaceMismatch:
            continue
        assert ip.is_interval(g)


# -- literals ----------------------------------------------------------------


def test_literal_round_trip(rng):
    cases = [ip.empty(), A, ip.glue(A, B), ip.parallel(A, ip.glue(B, C)),
             ip.identity(IloSet(("a", "b")))]
    cases += [random_ipomset(rng, 5) for _ in range(100)]
    for p in cases:
        assert ip.parse_ipomset(p.to_literal()) == p


def test_literal_examples():
    assert ip.parse_ipomset("events: a, b; order: 0<1") == ip.glue(A, B)
    assert ip.parse_ipomset("events: .a.") == \
        ip.singleton("a", source=True, target=True)
    assert ip.parse_ipomset("events:") == ip.empty()
