"""Differentials, the Lie bracket, and the chain maps between complexes.

All signs are produced constructively: each elementary surgery (vertex
splitting, pendant-vertex attachment, graph insertion) emits a representative
whose stored edge order (even parity) or vertex order (odd parity) realises
a definite orientation, plus an explicit numeric factor where the stored
layout cannot.  Canonicalisation then folds every term with the sign of the
carrier permutation.  d^2 = 0 on every slice is the acceptance test of the
conventions, not an assumption.

Conventions, fixed once:

* splitting a vertex v of an l-vertex graph creates the edge v -> l (old
  slot keeps the source); the new edge goes last in the edge order and the
  new vertex last in the vertex order -- no numeric factor;
* a pendant attachment at v puts the new edge first in the edge order; for
  odd parity its vertex orientation is (v, 0, .., v-1, new, v+1, ..), a
  factor (-1)^(l-1) relative to natural order.  The summand prefactors are
  -(-1)^deg for the outgoing and -(-1)^(deg+d) for the incoming pendant;
* undirected differentials use half of the splitting assignments (the two
  halves are related by swapping the new vertices) and a single pendant
  summand with the outgoing prefactor;
* insertion g1 o_v g2 puts g2's first vertex in v's slot and the rest at
  the end, g2's edges after g1's.  With these choices [g, edge] equals the
  differential on the nose, and bracket(edge, g) differs from it by the
  frozen reconciling sign -(-1)^deg(g) coming from graded antisymmetry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .complexes import ComplexError, ComplexSpec, StringClass, get_complex
from .graphs import (
    Graph,
    GraphError,
    OrientedClass,
    _canonicalize_flip_class,
    canonicalize,
    degree,
    loop_order,
    single_edge,
)


class SubcomplexViolation(AssertionError):
    """A differential term left a span that should be closed; the sign
    conventions or the span definition are wrong."""


RECONCILING_SIGN_NOTE = (
    "bracket(edge, g) = -(-1)**degree(g) * differential(g); fixed by graded "
    "antisymmetry from [g, edge] = differential(g)."
)


def reconciling_sign(deg: int) -> int:
    return -((-1) ** deg)


@dataclass
class ChainVector:
    """Exact integer combination of canonical classes, keyed by canonical key."""

    coeffs: dict[str, int] = field(default_factory=dict)
    elements: dict[str, object] = field(default_factory=dict)

    def add(self, element, coeff: int) -> None:
        if coeff == 0:
            return
        key = element.key
        new = self.coeffs.get(key, 0) + coeff
        if new:
            self.coeffs[key] = new
            self.elements[key] = element
        else:
            self.coeffs.pop(key, None)
            self.elements.pop(key, None)

    def add_vector(self, other: "ChainVector", scale: int = 1) -> None:
        for key, c in other.coeffs.items():
            self.add(other.elements[key], c * scale)

    def scaled(self, scale: int) -> "ChainVector":
        out = ChainVector()
        out.add_vector(self, scale)
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, ChainVector) and self.coeffs == other.coeffs

    def to_json(self) -> dict[str, str]:
        return {k: str(v) for k, v in sorted(self.coeffs.items())}


class _Accumulator:
    """Folds raw (graph, coefficient) terms through canonicalisation."""

    def __init__(self, d: int, mode: str):
        self.d = d
        self.mode = mode   # 'directed' | 'undirected' | 'flip'
        self.vec = ChainVector()

    def add(self, g: Graph, coeff: int) -> None:
        if coeff == 0:
            return
        if self.mode == "flip":
            cls, sign = _canonicalize_flip_class(g, self.d)
        elif self.mode == "undirected":
            norm = tuple((min(s, t), max(s, t)) for s, t in g.edges)
            cls, sign = canonicalize(
                Graph(g.n, norm, directed=False, weights=g.weights), self.d
            )
        else:
            cls, sign = canonicalize(g, self.d)
        if cls.is_zero:
            return
        self.vec.add(cls, coeff * sign)


def _acc_mode(spec: ComplexSpec, d: int) -> str:
    if spec.directed:
        return "directed"
    return "undirected" if d % 2 == 0 else "flip"


# -- raw surgeries -------------------------------------------------------------


def _split_terms(g: Graph, halved: bool,
                 weight_splits: bool = False) -> Iterator[tuple[Graph, int]]:
    """Vertex-splitting summands; coefficient is always +1 here.

    The split vertex keeps its slot and sources the new edge into the
    appended vertex.  Weighted mode distributes the weight over ordered
    positive compositions and enforces the weight condition at both parts.
    """
    n = g.n
    for v in range(n):
        occ = [(ei, slot) for ei, e in enumerate(g.edges)
               for slot in (0, 1) if e[slot] == v]
        assignments = itertools.product((v, n), repeat=len(occ))
        if halved and occ:
            assignments = (a for a in assignments if a[0] == v)
        if weight_splits:
            wv = g.weights[v]
            comps = [(wv - a, a) for a in range(1, wv)]   # (kept, appended)
            if not comps:
                continue
        else:
            comps = [(None, None)]
        for assign in assignments:
            edges = [list(e) for e in g.edges]
            for (ei, slot), target in zip(occ, assign):
                edges[ei][slot] = target
            new_edges = tuple(tuple(e) for e in edges) + ((v, n),)
            for kept, appended in comps:
                if weight_splits:
                    weights = g.weights[:v] + (kept,) + g.weights[v + 1:] + (appended,)
                    cand = Graph(n + 1, new_edges, True, weights)
                    if not _weight_ok(cand, v) or not _weight_ok(cand, n):
                        continue
                else:
                    cand = Graph(n + 1, new_edges, True, None)
                yield cand, 1


def _weight_ok(g: Graph, v: int) -> bool:
    ind = sum(1 for _, t in g.edges if t == v)
    outd = sum(1 for s, _ in g.edges if s == v)
    return g.weights[v] >= max(1, ind - 1, outd - 1)


def _pendant_graph(g: Graph, v: int, incoming: bool,
                   new_weight: Optional[int]) -> Graph:
    e = (g.n, v) if incoming else (v, g.n)
    weights = None
    if g.weights is not None:
        weights = g.weights + (new_weight,)
    return Graph(g.n + 1, (e,) + g.edges, True, weights)


def raw_delta_terms(g: Graph, d: int) -> Iterator[tuple[Graph, int]]:
    """Summands of the full directed differential (no constraints applied)."""
    deg = degree(g, d)
    corr = 1 if d % 2 == 0 else (-1) ** (g.n - 1)
    yield from _split_terms(g, halved=False)
    c_out = -((-1) ** deg) * corr
    c_in = -((-1) ** (deg + d)) * corr
    for v in range(g.n):
        yield _pendant_graph(g, v, incoming=False, new_weight=None), c_out
        yield _pendant_graph(g, v, incoming=True, new_weight=None), c_in


def raw_undirected_delta_terms(g: Graph, d: int) -> Iterator[tuple[Graph, int]]:
    """Summands of the undirected differential on a stored representative."""
    deg = degree(g, d)
    corr = 1 if d % 2 == 0 else (-1) ** (g.n - 1)
    yield from _split_terms(g, halved=True)
    c_pen = -((-1) ** deg) * corr
    for v in range(g.n):
        yield _pendant_graph(g, v, incoming=False, new_weight=None), c_pen


def raw_weighted_delta_terms(g: Graph, d: int,
                             weight_cap: int) -> Iterator[tuple[Graph, int]]:
    """Summands of the weighted differential, truncated at the weight cap."""
    if g.weights is None:
        raise GraphError("weighted differential needs a weighted graph")
    total = g.total_weight()
    if total > weight_cap:
        raise GraphError("class exceeds the weight cap")
    deg = degree(g, d)
    corr = 1 if d % 2 == 0 else (-1) ** (g.n - 1)
    yield from _split_terms(g, halved=False, weight_splits=True)
    c_out = -((-1) ** deg) * corr
    c_in = -((-1) ** (deg + d)) * corr
    ind, outd = g.in_degrees(), g.out_degrees()
    budget = weight_cap - total
    for v in range(g.n):
        if g.weights[v] > outd[v] - 1:
            for c in range(1, budget + 1):
                yield _pendant_graph(g, v, incoming=False, new_weight=c), c_out
        if g.weights[v] > ind[v] - 1:
            for c in range(1, budget + 1):
                yield _pendant_graph(g, v, incoming=True, new_weight=c), c_in


# -- the differential per complex ------------------------------------------------


def differential(element, complex_name: str, W: Optional[int] = None,
                 on_violation: str = "raise") -> ChainVector:
    """The differential of a basis element inside the named complex.

    Terms leaving the span are dropped for quotient complexes and must have
    cancelled for subcomplexes (anything surviving raises
    ``SubcomplexViolation`` unless ``on_violation='drop'``).
    """
    if complex_name == "AuxC":
        return d_aux(element)
    spec = get_complex(complex_name)
    d = element.parity
    g = element.graph
    if spec.weighted:
        if W is None:
            raise ComplexError("weighted differential needs a weight cap W")
        raw = raw_weighted_delta_terms(g, d, W)
    elif spec.directed:
        raw = raw_delta_terms(g, d)
    else:
        raw = raw_undirected_delta_terms(g, d)
    acc = _Accumulator(d, _acc_mode(spec, d))
    for cand, coeff in raw:
        acc.add(cand, coeff)
    return _filter_span(acc.vec, spec, on_violation)


def _filter_span(vec: ChainVector, spec: ComplexSpec,
                 on_violation: str) -> ChainVector:
    out = ChainVector()
    for key, coeff in vec.coeffs.items():
        cls = vec.elements[key]
        if spec.admits(cls.graph):
            out.add(cls, coeff)
        elif spec.drop_mode == "subcomplex" and on_violation == "raise":
            raise SubcomplexViolation(
                f"{spec.name}: differential term {key} (coefficient {coeff}) "
                "left the span without cancelling"
            )
    return out


# -- auxiliary string complex ----------------------------------------------------


def d_aux(s: StringClass) -> ChainVector:
    """Splits one weighted vertex into two consecutive ones, with the sign
    (-1)^(position-1) of a degree-one derivation acting past earlier
    vertices.  Total weight is preserved, length grows by one."""
    vec = ChainVector()
    w = s.weights
    for i, a in enumerate(w):
        sign = (-1) ** i
        for b in range(1, a):
            vec.add(StringClass(w[:i] + (b, a - b) + w[i + 1:]), sign)
    return vec


# -- Lie bracket -----------------------------------------------------------------


def _insert_terms(g1: Graph, v: int, g2: Graph) -> Iterator[Graph]:
    """g1 with g2 substituted into vertex v, over all reattachments.

    g2's first vertex takes v's slot, the rest are appended; g2's edges are
    appended after g1's.  Both graphs must be directed and unweighted.
    """
    n1, n2 = g1.n, g2.n
    mapped = [v] + [n1 + j - 1 for j in range(1, n2)]
    g2_edges = tuple((mapped[s], mapped[t]) for s, t in g2.edges)
    occ = [(ei, slot) for ei, e in enumerate(g1.edges)
           for slot in (0, 1) if e[slot] == v]
    for assign in itertools.product(mapped, repeat=len(occ)):
        edges = [list(e) for e in g1.edges]
        for (ei, slot), target in zip(occ, assign):
            edges[ei][slot] = target
        yield Graph(n1 + n2 - 1, tuple(tuple(e) for e in edges) + g2_edges)


def bracket(x: ChainVector, y: ChainVector, d: int) -> ChainVector:
    """Graded Lie bracket on directed graph classes:
    [x, y] = sum over insertions of y into x minus (-1)^(|x||y|) the reverse.
    Inputs must be homogeneous."""
    dx = _homogeneous_degree(x, d)
    dy = _homogeneous_degree(y, d)
    acc = _Accumulator(d, "directed")
    for kx, cx in x.coeffs.items():
        gx = x.elements[kx].graph
        for ky, cy in y.coeffs.items():
            gy = y.elements[ky].graph
            for v in range(gx.n):
                for term in _insert_terms(gx, v, gy):
                    acc.add(term, cx * cy)
    koszul = -((-1) ** (dx * dy))
    for ky, cy in y.coeffs.items():
        gy = y.elements[ky].graph
        for kx, cx in x.coeffs.items():
            gx = x.elements[kx].graph
            for v in range(gy.n):
                for term in _insert_terms(gy, v, gx):
                    acc.add(term, koszul * cx * cy)
    return acc.vec


def _homogeneous_degree(vec: ChainVector, d: int) -> int:
    degs = {degree(vec.elements[k].graph, d) for k in vec.coeffs}
    if len(degs) > 1:
        raise ComplexError(f"bracket needs homogeneous input, got degrees {degs}")
    return degs.pop() if degs else 0


def vector_of(element, coeff: int = 1) -> ChainVector:
    vec = ChainVector()
    vec.add(element, coeff)
    return vec


def edge_vector(d: int) -> ChainVector:
    cls, _ = canonicalize(single_edge(), d)
    return vector_of(cls)


def loop_action(element: OrientedClass) -> ChainVector:
    """Action of the one-dimensional rescaling extension: 2 * loop order."""
    return vector_of(element, 2 * loop_order(element.graph))


# -- chain maps ------------------------------------------------------------------


def map_i_directed(element: OrientedClass, target_complex: str = "dfcGC_ge2",
                   on_violation: str = "raise") -> ChainVector:
    """Sum over all edge-direction assignments of an undirected class.

    For odd parity the stored representative's directions are the reference
    and each reversal costs a sign."""
    g = element.graph
    d = element.parity
    if g.directed:
        raise ComplexError("map_i_directed expects an undirected class")
    spec = get_complex(target_complex)
    acc = _Accumulator(d, "directed")
    k = len(g.edges)
    for mask in range(1 << k):
        edges = tuple(
            (t, s) if (mask >> i) & 1 else (s, t)
            for i, (s, t) in enumerate(g.edges)
        )
        coeff = 1 if d % 2 == 0 else (-1) ** bin(mask).count("1")
        acc.add(Graph(g.n, edges), coeff)
    return _filter_span(acc.vec, spec, on_violation)


def map_F_wheeled(element: OrientedClass, W: int) -> ChainVector:
    """Sum over all admissible weight functions with total weight <= W.

    Weights never carry signs, so every term has coefficient +1 before
    canonical folding.  Injective on bases: the all-minimal-weights term of
    distinct classes differs."""
    g = element.graph
    if not g.directed or g.weights is not None:
        raise ComplexError("map_F_wheeled expects an unweighted directed class")
    d = element.parity
    ind, outd = g.in_degrees(), g.out_degrees()
    smin = [max(1, ind[v] - 1, outd[v] - 1) for v in range(g.n)]
    budget = W - sum(smin)
    acc = _Accumulator(d, "directed")
    if budget < 0:
        return acc.vec
    for extra in _bounded_vectors(g.n, budget):
        weights = tuple(smin[v] + extra[v] for v in range(g.n))
        acc.add(Graph(g.n, g.edges, True, weights), 1)
    return acc.vec


def _bounded_vectors(n: int, budget: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(budget + 1):
        for rest in _bounded_vectors(n - 1, budget - first):
            yield (first,) + rest


def count_weightings_oracle(g: Graph, W: int) -> int:
    """Independent count of integer points s_v <= w_v with sum <= W."""
    ind, outd = g.in_degrees(), g.out_degrees()
    smin = [max(1, ind[v] - 1, outd[v] - 1) for v in range(g.n)]
    count = 0
    for w in itertools.product(*[range(s, W + 1) for s in smin]):
        if sum(w) <= W:
            count += 1
    return count


def project_equal(vec: ChainVector) -> ChainVector:
    """Quotient projection onto balanced graphs (in = out at every vertex)."""
    out = ChainVector()
    for key, coeff in vec.coeffs.items():
        cls = vec.elements[key]
        if cls.graph.in_degrees() == cls.graph.out_degrees():
            out.add(cls, coeff)
    return out


def rescaling_class(W: int, d: int) -> ChainVector:
    """The weighted rescaling cocycle, truncated at total weight W.

    The closed representative carries coefficient a on the weight-a vertex:
    it is the image of the derivation-complex rescaling cycle, whose
    (m,m)-corolla has coefficient m-1 and becomes the vertex of weight
    a = m-1.  (A coefficient a-1 fails closedness for every sign
    convention: d would leave the constant 1 on every two-vertex graph.)
    """
    if W < 1:
        raise ComplexError("weight cap must be at least 1")
    vec = ChainVector()
    for a in range(1, W + 1):
        cls, _ = canonicalize(Graph(1, (), True, (a,)), d)
        vec.add(cls, a)
    return vec
