"""Registry, graded bases, summand classification, disconnected bookkeeping."""

import pytest

from graphcomplexes.complexes import (
    Basis,
    ComplexError,
    GradedSlice,
    StringClass,
    basis,
    classify_summand,
    disconnected_dims,
    disconnected_dims_oracle,
    get_complex,
)
from graphcomplexes.graphs import Graph
from graphcomplexes.homology import cached_basis


def test_unknown_complex_rejected():
    with pytest.raises(ComplexError):
        get_complex("noSuchThing")


def test_slice_forces_edge_count_and_degree():
    sl = GradedSlice("dfcGC_ge2", 2, 3, 5)
    assert sl.E == 7
    assert sl.degree() == 5 - 2 - (2 - 1) * (3 - 1)
    # degree formula agrees with the per-graph formula on every basis element
    for cls in basis(sl).classes:
        assert cls.degree() == sl.degree()
        assert len(cls.graph.edges) - cls.graph.n + 1 == 3


def test_polygon_slice_bases():
    for p in range(1, 12):
        bas = basis(GradedSlice("GC_ge2", 2, 1, p))
        assert len(bas) == (1 if p % 4 == 1 else 0), p


def test_aux_basis_total_weight_two():
    classes = []
    for n in (1, 2):
        classes += basis(GradedSlice("AuxC", 0, 0, n, 2)).classes
    assert sorted(c.key for c in classes) == ["w=2;S=[1,1]", "w=2;S=[2]"]


def test_dwgc_eq_single_vertex_empty():
    # a balanced single vertex needs in = out >= 2, impossible without edges
    assert len(basis(GradedSlice("dwGC_eq", 2, 0, 1, 3))) == 0


def test_weighted_slice_needs_cap():
    with pytest.raises(ComplexError):
        basis(GradedSlice("dwGC_star", 2, 1, 2))


def test_inclusion_consistency():
    for d in (2, 3):
        for b in (1, 2, 3):
            for V in (1, 2, 3, 4):
                keys = {
                    name: set(cached_basis(GradedSlice(name, d, b, V)).keys())
                    for name in ("dcGC", "dfcGC_ge2", "dfcGC", "OGC")
                }
                assert keys["dcGC"] <= keys["dfcGC_ge2"] <= keys["dfcGC"]
                assert keys["OGC"] <= keys["dcGC"]


def test_weighted_summands_partition_star():
    for d in (2, 3):
        for b in (1, 2):
            for V in (1, 2, 3):
                W = 5
                star = set(cached_basis(GradedSlice("dwGC_star", d, b, V, W)).keys())
                eq = set(cached_basis(GradedSlice("dwGC_eq", d, b, V, W)).keys())
                neq = set(cached_basis(GradedSlice("dwGC", d, b, V, W)).keys())
                assert eq | neq == star
                assert not (eq & neq)


def test_eq_bases_biject_with_balanced_directed():
    # weights on the equal summand are forced, so stripping them is a bijection
    for d in (2, 3):
        for (b, V) in ((2, 1), (3, 2), (4, 3)):
            W = b - 1 if b >= 1 else 0
            eq = cached_basis(GradedSlice("dwGC_eq", d, b, V, max(W, V)))
            bal = cached_basis(GradedSlice("dcGC_eq", d, b, V))
            stripped = sorted(
                Graph(c.graph.n, c.graph.edges).edges for c in eq.classes
            )
            assert stripped == sorted(c.graph.edges for c in bal.classes)


def test_degree_bound_balanced_d2():
    # nonzero balanced slices have degree V - b - 1 <= -2
    for V in range(1, 7):
        for b in range(0, V + 3):
            bas = cached_basis(GradedSlice("dcGC_eq", 2, b, V))
            for cls in bas.classes:
                assert cls.degree() <= -2
            if b <= V and len(bas):
                pytest.fail(f"balanced slice b={b} V={V} should be empty")


def test_classify_summand():
    g = Graph(2, ((0, 1), (0, 1), (0, 1), (1, 0), (1, 0), (1, 0)),
              weights=(2, 2))
    assert classify_summand(g) == "dwGC_eq"
    g2 = Graph(2, ((0, 1), (0, 1), (0, 1), (1, 0), (1, 0), (1, 0)),
               weights=(2, 3))
    assert classify_summand(g2) == "dwGC"
    pendant = Graph(2, ((0, 1),), weights=(1, 1))
    assert classify_summand(pendant) == "dwGC"


def test_basis_rejects_duplicates():
    sl = GradedSlice("dfcGC", 2, 1, 2)
    cls = basis(sl).classes
    with pytest.raises(ComplexError):
        Basis(sl, cls + cls)


# -- disconnected bookkeeping ---------------------------------------------------


def test_disconnected_dims_one_generator_hand_expansion():
    # single generator in degree 0, d even, up to 2 parts:
    # shifted degree d, symmetric square in 2d, shift back: degrees 0 and d
    for d in (2, 4):
        out = disconnected_dims({0: 1}, d, 2)
        assert out == {0: 1, d: 1}


def test_disconnected_dims_empty():
    assert disconnected_dims({}, 2, 3) == {}


def test_disconnected_dims_matches_oracle():
    tables = [
        {0: 1},
        {0: 2, 3: 1},
        {-1: 1, 2: 2},
        {1: 1, 2: 1, 3: 1},
    ]
    for d in (2, 3):
        for t in tables:
            for parts in (1, 2, 3):
                for extra in (False, True):
                    got = disconnected_dims(t, d, parts, extra)
                    want = disconnected_dims_oracle(t, d, parts, extra)
                    assert got == want, (t, d, parts, extra)


def test_disconnected_dims_odd_shifted_degree_antisymmetrises():
    # one generator whose shifted degree is odd: no symmetric square
    out = disconnected_dims({1: 1}, 2, 3)
    assert out == {1: 1}
