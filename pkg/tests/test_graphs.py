"""Core combinatorics: canonical forms with signs, enumeration, extractors."""

import itertools
import random

import pytest

from graphcomplexes.graphs import (
    EnumConstraints,
    Graph,
    GraphError,
    automorphism_zero_oracle,
    brute_force_classes,
    canonical_key,
    canonicalize,
    complete_graph,
    degree,
    enumerate_classes,
    enumerate_weightings,
    loop_order,
    parse_key,
    single_edge,
    skeleton,
    string_decomposition,
    undirected_cycle,
)


# -- canonicalize -----------------------------------------------------------------


def test_single_edge_nonzero_identity_sign():
    cls, sign = canonicalize(single_edge(), 2)
    assert not cls.is_zero
    assert sign == 1
    assert cls.key == "d=2;V=2;E=[(0,1)]"


@pytest.mark.parametrize("d", [2, 3])
def test_two_cycle_vanishes(d):
    cls, _ = canonicalize(Graph(2, ((0, 1), (1, 0))), d)
    assert cls.is_zero


def test_parallel_edges_vanish_even_parity_only():
    dbl = Graph(2, ((0, 1), (0, 1)))
    assert canonicalize(dbl, 2)[0].is_zero
    assert not canonicalize(dbl, 3)[0].is_zero


def test_triangle_vanishes_undirected_even():
    tri = Graph(3, ((0, 1), (0, 2), (1, 2)), directed=False)
    assert canonicalize(tri, 2)[0].is_zero


def test_polygon_classes_survive_iff_p_mod_4_is_1():
    for p in range(1, 13):
        cls, _ = canonicalize(undirected_cycle(p), 2)
        assert cls.is_zero == (p % 4 != 1), p


def test_k4_nonzero_degree_zero():
    cls, _ = canonicalize(complete_graph(4), 2)
    assert not cls.is_zero
    assert cls.degree() == 0


def test_canonicalize_idempotent():
    graphs = [
        Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2))),
        Graph(3, ((0, 0), (0, 1), (1, 2), (2, 0))),
        Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0)), weights=(1, 2, 1, 3)),
        Graph(4, ((0, 1), (0, 2), (1, 2), (2, 3), (1, 3)), directed=False),
    ]
    for g in graphs:
        for d in (2, 3):
            cls, _ = canonicalize(g, d)
            again, sign = canonicalize(cls.graph, d)
            assert again.graph == cls.graph
            assert sign == 1


@pytest.mark.parametrize("d", [2, 3])
def test_isomorphism_soundness_random_relabelings(d):
    rng = random.Random(42 + d)
    from graphcomplexes.graphs import _perm_parity

    graphs = [
        Graph(3, ((0, 1), (1, 2), (2, 0))),
        Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2))),
        Graph(3, ((0, 0), (0, 1), (1, 2), (2, 0))),
        Graph(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3))),
        Graph(4, ((0, 1), (1, 2), (2, 3), (3, 0)), weights=(1, 2, 1, 2)),
    ]
    for g in graphs:
        cls0, s0 = canonicalize(g, d)
        for _ in range(25):
            perm = list(range(g.n))
            rng.shuffle(perm)
            rel = g.relabel(perm)
            order = list(range(len(rel.edges)))
            rng.shuffle(order)
            g2 = Graph(g.n, tuple(rel.edges[i] for i in order), g.directed,
                       rel.weights)
            cls2, s2 = canonicalize(g2, d)
            assert cls2.graph == cls0.graph
            if cls0.is_zero:
                continue
            if d % 2 == 0:
                # the edge shuffle contributes its parity; relabelling none
                assert s2 * _perm_parity(order) == s0
            else:
                assert s2 * _perm_parity(perm) == s0


@pytest.mark.parametrize("d", [2, 3])
def test_zero_detection_matches_automorphism_oracle(d):
    cells = [(s, t) for s in range(3) for t in range(3)]
    for E in range(1, 5):
        for combo in itertools.combinations_with_replacement(cells, E):
            g = Graph(3, tuple(combo))
            cls, _ = canonicalize(g, d)
            assert cls.is_zero == automorphism_zero_oracle(g, d)


def test_weights_color_but_never_sign():
    # an asymmetric weighting resurrects a class killed by symmetry
    two_cycle = Graph(2, ((0, 1), (1, 0)))
    assert canonicalize(two_cycle, 2)[0].is_zero
    asym = Graph(2, ((0, 1), (1, 0)), weights=(1, 2))
    assert not canonicalize(asym, 2)[0].is_zero
    sym = Graph(2, ((0, 1), (1, 0)), weights=(2, 2))
    assert canonicalize(sym, 2)[0].is_zero


def test_weight_condition_enforced():
    bad = Graph(2, ((0, 1), (0, 1), (0, 1)), weights=(1, 1))
    with pytest.raises(GraphError):
        canonicalize(bad, 3)


def test_malformed_edges_rejected():
    with pytest.raises(GraphError):
        Graph(2, ((0, 2),))


# -- degree / loop order ------------------------------------------------------------


def test_degree_formula_examples():
    assert degree(complete_graph(4), 2) == 0
    assert degree(undirected_cycle(5), 2) == 3
    assert degree(Graph(1, ((0, 0),)), 2) == -1


def test_degree_independent_of_weights_and_canonical_form():
    g = Graph(3, ((0, 1), (1, 2), (2, 0)))
    gw = Graph(3, ((0, 1), (1, 2), (2, 0)), weights=(3, 1, 2))
    for d in (2, 3):
        assert degree(g, d) == degree(gw, d)
        cls, _ = canonicalize(gw, d)
        assert degree(cls.graph, d) == degree(gw, d)


def test_loop_order_examples():
    assert loop_order(complete_graph(4)) == 3
    assert loop_order(undirected_cycle(7)) == 1
    tree = Graph(5, ((0, 1), (0, 2), (1, 3), (1, 4)))
    assert loop_order(tree) == 0
    with pytest.raises(GraphError):
        loop_order(Graph(2, ()))


# -- canonical key round trip --------------------------------------------------------


def test_canonical_key_round_trip():
    g = Graph(3, ((0, 1), (1, 2), (2, 0)), weights=(2, 1, 1))
    key = canonical_key(g, 3)
    assert key == "d=3;V=3;E=[(0,1),(1,2),(2,0)];W=[2,1,1]"
    g2, d = parse_key(key)
    assert g2 == g and d == 3
    plain = canonical_key(single_edge(), 2)
    g3, d3 = parse_key(plain)
    assert g3 == single_edge() and d3 == 2


# -- enumeration ----------------------------------------------------------------------


def test_enumerate_tadpole_slice():
    c = EnumConstraints(directed=True, connected=True)
    assert len(enumerate_classes(1, 1, 2, c)) == 1


def test_enumerate_two_vertex_two_edge_slice_empty():
    c = EnumConstraints(directed=True, connected=True, no_tadpoles=True)
    assert enumerate_classes(2, 2, 2, c) == []


def test_enumerate_triangle_slice_undirected():
    # the only candidate is the triangle and it dies by its odd reflection
    c = EnumConstraints(directed=False, connected=True, min_valency=2,
                        no_tadpoles=True)
    assert enumerate_classes(3, 3, 2, c) == []
    all_classes = enumerate_classes(3, 3, 2, c, include_zero=True)
    assert len(all_classes) == 1
    assert all_classes[0].is_zero


@pytest.mark.parametrize("directed", [True, False])
@pytest.mark.parametrize("d", [2, 3])
def test_enumerate_agrees_with_brute_force(directed, d):
    c = EnumConstraints(directed=directed, connected=True, min_valency=2)
    for V in range(1, 4):
        for E in range(0, 5):
            got = [x.key for x in enumerate_classes(V, E, d, c)]
            want = [x.key for x in brute_force_classes(V, E, d, c)]
            assert got == want, (V, E)


def test_enumerate_deterministic():
    c = EnumConstraints(directed=True, connected=True, min_valency=2)
    a = [x.key for x in enumerate_classes(4, 5, 2, c)]
    b = [x.key for x in enumerate_classes(4, 5, 2, c)]
    assert a == b == sorted(a)


def test_weighted_enumeration_resurrects_broken_symmetry():
    c = EnumConstraints(directed=True, connected=True)
    classes = enumerate_classes(2, 2, 2, c, include_zero=True)
    two_cycle = [x for x in classes
                 if x.graph.edges == ((0, 1), (1, 0))]
    assert two_cycle and two_cycle[0].is_zero
    weighted = enumerate_weightings(two_cycle[0], 2, 4)
    # symmetric weightings die, asymmetric ones survive: (1,2),(1,3)
    assert len(weighted) == 2
    assert all(not w.is_zero for w in weighted)


# -- structural extractors -------------------------------------------------------------


def test_skeleton_fixed_point():
    g = Graph(3, ((0, 1), (1, 2), (2, 0)))
    assert skeleton(g) == g


def test_skeleton_single_edge():
    s = skeleton(single_edge())
    assert s.n == 1 and s.edges == ()


def test_skeleton_two_cycle_with_feeder():
    g = Graph(3, ((0, 1), (1, 0), (2, 0)))
    s = skeleton(g)
    assert s.n == 2 and sorted(s.edges) == [(0, 1), (1, 0)]
    assert skeleton(s) == s


def test_skeleton_empties_out():
    path = Graph(3, ((0, 1), (1, 2)))
    s = skeleton(path)
    # 0 goes first, then 1, then the bare vertex 2 has no outgoing edge left
    assert s.n == 1 and s.edges == ()


def test_string_decomposition_no_passing():
    g = Graph(3, ((0, 1), (1, 2), (2, 0), (0, 1), (2, 1)), weights=(1, 2, 1))
    dec = string_decomposition(g)
    assert dec.core_vertices == (0, 1, 2)
    assert dec.strings == ()
    assert sorted(dec.edge_weights) == [0, 0, 0, 0, 0]
    assert sorted(dec.reduced.edges) == sorted(g.edges)


def test_string_decomposition_passing_chain():
    # two core vertices joined by a two-vertex passing chain, plus feeders
    g = Graph(
        6,
        ((0, 2), (2, 3), (3, 1), (0, 1), (1, 0), (4, 0), (5, 1)),
        weights=(2, 2, 1, 1, 1, 1),
    )
    dec = string_decomposition(g)
    assert set(dec.core_vertices) == {0, 1}
    assert dec.strings == ((4,), (5,))
    weighted_edges = sorted(zip(dec.reduced.edges, dec.edge_weights))
    assert weighted_edges == [((0, 1), 0), ((0, 1), 2), ((1, 0), 0)]


def test_string_decomposition_pure_string():
    g = Graph(3, ((0, 1), (1, 2)), weights=(1, 2, 1))
    dec = string_decomposition(g)
    assert dec.core_vertices == ()
    assert dec.strings == ((0, 1, 2),)
    assert dec.reduced.n == 0
