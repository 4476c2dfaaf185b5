"""Registry of graph complexes as constraint bundles, with graded bases.

Each complex id names a span of graph classes (directed or undirected,
weighted or not) cut out by generation constraints plus an optional span
predicate, together with the semantics of differential terms that leave the
span:

* ``subcomplex`` -- such terms must cancel among themselves; a surviving
  one is an error (the sign conventions or the span are wrong);
* ``quotient``   -- such terms are projected away (induced differential).

A graded slice fixes (loop order b, vertex count V); connectivity forces
E = V + b - 1 and the cohomological degree V - d - (d-1)(b-1).  Weighted
slices are additionally truncated at a total-weight cap W, a legitimate
quotient because no differential term ever decreases total weight.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional

from .graphs import (
    EnumConstraints,
    Graph,
    GraphError,
    OrientedClass,
    canonicalize,
    enumerate_classes,
    enumerate_weightings,
)


class ComplexError(ValueError):
    pass


def _is_balanced(g: Graph) -> bool:
    return g.in_degrees() == g.out_degrees()


def _has_unbalanced_vertex(g: Graph) -> bool:
    return g.in_degrees() != g.out_degrees()


def _has_bivalent(g: Graph) -> bool:
    return any(v == 2 for v in g.valencies())


def _all_weights_forced(g: Graph) -> bool:
    """True when every vertex has weight in-1 = out-1 (the 'equal' summand)."""
    ind, outd = g.in_degrees(), g.out_degrees()
    return all(
        g.weights[v] == ind[v] - 1 == outd[v] - 1 for v in range(g.n)
    )


@dataclass(frozen=True)
class ComplexSpec:
    name: str
    directed: bool
    constraints: EnumConstraints
    weighted: bool = False
    weight_rule: str = "all"            # 'all' | 'eq' | 'noneq'
    span: Optional[Callable[[Graph], bool]] = None
    drop_mode: str = "subcomplex"       # 'subcomplex' | 'quotient'
    connected: bool = True

    def admits(self, g: Graph) -> bool:
        c = self.constraints
        if g.directed != self.directed:
            return False
        if c.connected and not g.is_connected():
            return False
        if any(v < c.min_valency for v in g.valencies()):
            return False
        if c.no_tadpoles and g.has_tadpole():
            return False
        if c.no_passing and g.passing_vertices():
            return False
        if c.balanced and not _is_balanced(g):
            return False
        if c.acyclic and not g.is_acyclic():
            return False
        if self.weighted:
            if g.weights is None:
                return False
            ind, outd = g.in_degrees(), g.out_degrees()
            if any(g.weights[v] < max(1, ind[v] - 1, outd[v] - 1)
                   for v in range(g.n)):
                return False
            if self.weight_rule == "eq" and not _all_weights_forced(g):
                return False
            if self.weight_rule == "noneq" and _all_weights_forced(g):
                return False
        elif g.weights is not None:
            return False
        if self.span is not None and not self.span(g):
            return False
        return True


_CONN = dict(connected=True)

REGISTRY: dict[str, ComplexSpec] = {
    # directed, unweighted
    "dfGC": ComplexSpec("dfGC", True, EnumConstraints(directed=True, connected=False),
                        connected=False),
    "dfcGC": ComplexSpec("dfcGC", True, EnumConstraints(directed=True, **_CONN)),
    "dfcGC_ge2": ComplexSpec("dfcGC_ge2", True,
                             EnumConstraints(directed=True, min_valency=2, **_CONN)),
    "dcGC": ComplexSpec("dcGC", True,
                        EnumConstraints(directed=True, min_valency=2,
                                        no_passing=True, **_CONN)),
    "dcGC_eq": ComplexSpec("dcGC_eq", True,
                           EnumConstraints(directed=True, min_valency=2,
                                           no_passing=True, balanced=True, **_CONN),
                           drop_mode="quotient"),
    "dcGC_neq": ComplexSpec("dcGC_neq", True,
                            EnumConstraints(directed=True, min_valency=2,
                                            no_passing=True, **_CONN),
                            span=_has_unbalanced_vertex),
    "OGC": ComplexSpec("OGC", True,
                       EnumConstraints(directed=True, min_valency=2,
                                       no_passing=True, acyclic=True, **_CONN)),
    # undirected
    "fGC": ComplexSpec("fGC", False, EnumConstraints(directed=False, connected=False),
                       connected=False),
    "GC_ge2": ComplexSpec("GC_ge2", False,
                          EnumConstraints(directed=False, min_valency=2, **_CONN)),
    "GC2": ComplexSpec("GC2", False,
                       EnumConstraints(directed=False, min_valency=2, **_CONN),
                       span=_has_bivalent),
    "GC": ComplexSpec("GC", False,
                      EnumConstraints(directed=False, min_valency=3, **_CONN)),
    # weighted
    "dwGC_star": ComplexSpec("dwGC_star", True,
                             EnumConstraints(directed=True, **_CONN),
                             weighted=True, weight_rule="all",
                             drop_mode="quotient"),
    "dwGC": ComplexSpec("dwGC", True, EnumConstraints(directed=True, **_CONN),
                        weighted=True, weight_rule="noneq",
                        drop_mode="quotient"),
    "dwGC_eq": ComplexSpec("dwGC_eq", True, EnumConstraints(directed=True, **_CONN),
                           weighted=True, weight_rule="eq",
                           drop_mode="quotient"),
    # the auxiliary string complex is handled by its own basis builder
    "AuxC": ComplexSpec("AuxC", True, EnumConstraints()),
}

# The weight-cap truncation makes every weighted complex a quotient; for the
# two summands the split terms must additionally stay inside the summand,
# which assemble() cross-checks against the star complex when asked.


def get_complex(name: str) -> ComplexSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ComplexError(
            f"unknown complex {name!r}; known: {', '.join(sorted(REGISTRY))}"
        ) from None


@dataclass(frozen=True)
class GradedSlice:
    """A finite graded piece of a complex: fixed loop order and vertex count.

    For AuxC the fields are reinterpreted: V is the string length (its
    degree) and W the exact total weight; b is ignored.
    """

    complex: str
    d: int
    b: int
    V: int
    W: Optional[int] = None

    @property
    def E(self) -> int:
        return self.V + self.b - 1

    def degree(self) -> int:
        if self.complex == "AuxC":
            return self.V
        return self.V - self.d - (self.d - 1) * (self.b - 1)

    def shifted(self, dv: int) -> "GradedSlice":
        return GradedSlice(self.complex, self.d, self.b, self.V + dv, self.W)


@dataclass(frozen=True)
class StringClass:
    """Basis element of the auxiliary complex: a chain of weighted passing
    vertices headed by a weighted univalent in-vertex."""

    weights: tuple[int, ...]

    @property
    def key(self) -> str:
        return f"w={sum(self.weights)};S=[" + ",".join(map(str, self.weights)) + "]"

    def degree(self) -> int:
        return len(self.weights)


@dataclass
class Basis:
    """Ordered basis of one graded slice with a key -> position index."""

    slice: GradedSlice
    classes: list
    index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {c.key: i for i, c in enumerate(self.classes)}
        if len(self.index) != len(self.classes):
            raise ComplexError("duplicate canonical keys in basis")

    def __len__(self):
        return len(self.classes)

    def keys(self) -> list[str]:
        return [c.key for c in self.classes]


def basis(sl: GradedSlice, limit: Optional[int] = None) -> Basis:
    """Complete nonzero basis of a graded slice, sorted by canonical key."""
    if sl.complex == "AuxC":
        return _aux_basis(sl)
    spec = get_complex(sl.complex)
    if spec.weighted and sl.W is None:
        raise ComplexError(f"{sl.complex} needs a weight cap W")
    if sl.V < 1 or sl.E < 0:
        return Basis(sl, [])
    if spec.weighted and sl.W < sl.V:
        return Basis(sl, [])

    raw = enumerate_classes(sl.V, sl.E, sl.d, spec.constraints,
                            include_zero=spec.weighted, limit=limit)
    out = []
    for cls in raw:
        if spec.span is not None and not spec.span(cls.graph):
            continue
        if spec.weighted:
            out.extend(enumerate_weightings(cls, sl.d, sl.W, spec.weight_rule))
        else:
            out.append(cls)
    out.sort(key=lambda c: c.key)
    return Basis(sl, out)


def _aux_basis(sl: GradedSlice) -> Basis:
    """Strings of length V with positive weights summing to exactly W."""
    if sl.W is None:
        raise ComplexError("AuxC slices are graded by total weight W")
    n, w = sl.V, sl.W
    if n < 1 or w < n:
        return Basis(sl, [])
    elems = [StringClass(c) for c in _compositions(w, n)]
    elems.sort(key=lambda s: s.key)
    return Basis(sl, elems)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def classify_summand(g: Graph) -> str:
    """Which direct summand of the full weighted complex a class lies in:
    'dwGC_eq' when every vertex has weight in-1 = out-1, else 'dwGC'."""
    if g.weights is None:
        raise ComplexError("classify_summand needs a weighted graph")
    return "dwGC_eq" if _all_weights_forced(g) else "dwGC"


# -- disconnected bookkeeping ---------------------------------------------------


def disconnected_dims(connected: dict[int, int], d: int, max_parts: int,
                      include_rescaling_generator: bool = False) -> dict[int, int]:
    """Dimension table of the graded symmetric algebra on the connected table.

    Models  Sym^{1..max_parts}((G + [optional K in degree 0])[-d])[d]:
    a generator of degree j sits in degree j+d after the shift; generators of
    even shifted degree symmetrise, odd ones antisymmetrise; a product of k
    generators of shifted degrees j_i lands in degree (sum j_i) - d.
    """
    gens: list[tuple[int, int]] = sorted(connected.items())
    if include_rescaling_generator:
        gens.append((0, 1))
    # state: {(parts, total_shifted_degree): dim}
    state: dict[tuple[int, int], int] = {(0, 0): 1}
    for deg, dim in gens:
        if dim <= 0:
            continue
        sdeg = deg + d
        new_state: dict[tuple[int, int], int] = {}
        for (parts, tot), mult in state.items():
            kmax = max_parts - parts
            if sdeg % 2 == 0:
                choices = [(k, comb(dim + k - 1, k)) for k in range(kmax + 1)]
            else:
                choices = [(k, comb(dim, k)) for k in range(min(kmax, dim) + 1)]
            for k, ways in choices:
                if ways == 0:
                    continue
                key = (parts + k, tot + k * sdeg)
                new_state[key] = new_state.get(key, 0) + mult * ways
        state = new_state
    out: dict[int, int] = {}
    for (parts, tot), mult in state.items():
        if 1 <= parts <= max_parts and mult:
            deg = tot - d
            out[deg] = out.get(deg, 0) + mult
    return dict(sorted(out.items()))


def disconnected_dims_oracle(connected: dict[int, int], d: int,
                             max_parts: int,
                             include_rescaling_generator: bool = False) -> dict[int, int]:
    """Brute-force multiset enumeration of products of generators."""
    gens: list[int] = []
    for deg, dim in sorted(connected.items()):
        gens.extend([deg] * dim)
    if include_rescaling_generator:
        gens.append(0)
    out: dict[int, int] = {}
    for k in range(1, max_parts + 1):
        for combo in itertools.combinations_with_replacement(range(len(gens)), k):
            sdegs = [gens[i] + d for i in combo]
            # odd shifted degrees antisymmetrise: repeats vanish
            odd = [i for i in combo if (gens[i] + d) % 2 == 1]
            if len(odd) != len(set(odd)):
                continue
            deg = sum(sdegs) - d
            out[deg] = out.get(deg, 0) + 1
    return dict(sorted(out.items()))
