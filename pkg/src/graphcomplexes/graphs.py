"""Directed and undirected multigraphs with orientation-aware canonical forms.

A graph here is a finite multigraph: ``n`` vertices labelled ``0..n-1`` and an
ordered tuple of edges.  Parallel edges and self-loops ("tadpoles") are
allowed.  The edge-list order and the vertex-index order are meaningful as
orientation bookkeeping only:

* even parity -- the orientation is the edge order (a class changes sign
  under odd permutations of its edge list);
* odd parity  -- the orientation is the vertex order.

``canonicalize`` maps any labelled representative to a canonical one and
reports the sign relating the input's stored orientation to the canonical
orientation.  A class is zero when some automorphism of the graph induces an
odd permutation of the orientation carrier.

Vertex weights, when present, act as vertex colours: they constrain the
automorphism group but never contribute signs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence


class GraphError(ValueError):
    """Malformed graph input (bad edge indices, weight condition violated)."""


class SliceTooLarge(RuntimeError):
    """Enumeration exceeded its resource budget; carries the partial count."""

    def __init__(self, partial_count: int):
        super().__init__(f"slice too large, partial count {partial_count}")
        self.partial_count = partial_count


Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """A directed or undirected multigraph, optionally vertex-weighted.

    ``edges`` is an ordered tuple of ``(source, target)`` pairs; for
    undirected graphs each pair is normalised to ``source <= target``.
    ``weights``, when set, assigns a positive integer to every vertex.
    """

    n: int
    edges: tuple[Edge, ...]
    directed: bool = True
    weights: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        for s, t in self.edges:
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise GraphError(f"edge ({s},{t}) out of range for n={self.n}")
            if not self.directed and s > t:
                raise GraphError(f"undirected edge ({s},{t}) not normalised")
        if self.weights is not None:
            if len(self.weights) != self.n:
                raise GraphError("weight vector length != vertex count")
            if any(w < 1 for w in self.weights):
                raise GraphError("weights must be positive integers")

    # -- basic invariants ---------------------------------------------------

    def in_degrees(self) -> list[int]:
        d = [0] * self.n
        for _, t in self.edges:
            d[t] += 1
        return d

    def out_degrees(self) -> list[int]:
        d = [0] * self.n
        for s, _ in self.edges:
            d[s] += 1
        return d

    def valencies(self) -> list[int]:
        """Total valency per vertex; a self-loop counts twice."""
        d = [0] * self.n
        for s, t in self.edges:
            d[s] += 1
            d[t] += 1
        return d

    def loop_counts(self) -> list[int]:
        d = [0] * self.n
        for s, t in self.edges:
            if s == t:
                d[s] += 1
        return d

    def has_tadpole(self) -> bool:
        return any(s == t for s, t in self.edges)

    def is_connected(self) -> bool:
        """Connectivity of the underlying undirected graph; empty graph is not."""
        if self.n == 0:
            return False
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s, t in self.edges:
            rs, rt = find(s), find(t)
            if rs != rt:
                parent[rs] = rt
        root = find(0)
        return all(find(v) == root for v in range(self.n))

    def is_acyclic(self) -> bool:
        """True when the directed graph has no closed path of directed edges."""
        if not self.directed:
            raise GraphError("acyclicity is a directed notion")
        indeg = self.in_degrees()
        out = [[] for _ in range(self.n)]
        for s, t in self.edges:
            if s == t:
                return False
            out[s].append(t)
        stack = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while stack:
            v = stack.pop()
            seen += 1
            for t in out[v]:
                indeg[t] -= 1
                if indeg[t] == 0:
                    stack.append(t)
        return seen == self.n

    def passing_vertices(self) -> list[int]:
        """Vertices with exactly one incoming and one outgoing edge."""
        ind, outd = self.in_degrees(), self.out_degrees()
        return [v for v in range(self.n) if ind[v] == 1 and outd[v] == 1]

    def check_weight_condition(self) -> None:
        """Require w_v >= max(1, in-1, out-1) at every vertex."""
        if self.weights is None:
            raise GraphError("graph carries no weights")
        ind, outd = self.in_degrees(), self.out_degrees()
        for v, w in enumerate(self.weights):
            if w < max(1, ind[v] - 1, outd[v] - 1):
                raise GraphError(
                    f"weight {w} at vertex {v} below max(1,{ind[v]-1},{outd[v]-1})"
                )

    def total_weight(self) -> int:
        if self.weights is None:
            raise GraphError("graph carries no weights")
        return sum(self.weights)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Apply the vertex relabelling old index -> ``perm[old]``."""
        edges = []
        for s, t in self.edges:
            a, b = perm[s], perm[t]
            if not self.directed and a > b:
                a, b = b, a
            edges.append((a, b))
        weights = None
        if self.weights is not None:
            weights = [0] * self.n
            for old, new in enumerate(perm):
                weights[new] = self.weights[old]
            weights = tuple(weights)
        return Graph(self.n, tuple(edges), self.directed, weights)


def single_vertex(weight: Optional[int] = None) -> Graph:
    w = None if weight is None else (weight,)
    return Graph(1, (), True, w)


def single_edge() -> Graph:
    """The one-edge directed graph 0 -> 1, the Maurer-Cartan generator."""
    return Graph(2, ((0, 1),))


def undirected_cycle(p: int) -> Graph:
    """The polygon with p vertices (p = 1 gives the one-vertex loop)."""
    if p < 1:
        raise GraphError("polygon needs at least one vertex")
    if p == 1:
        return Graph(1, ((0, 0),), directed=False)
    if p == 2:
        return Graph(2, ((0, 1), (0, 1)), directed=False)
    edges = tuple(
        (min(i, (i + 1) % p), max(i, (i + 1) % p)) for i in range(p)
    )
    return Graph(p, edges, directed=False)


def complete_graph(n: int) -> Graph:
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return Graph(n, edges, directed=False)


# -- degrees and gradings ----------------------------------------------------


def degree(g: Graph, d: int) -> int:
    """Cohomological degree d*V + (1-d)*E - d; independent of weights."""
    return d * g.n + (1 - d) * len(g.edges) - d


def loop_order(g: Graph) -> int:
    """First Betti number E - V + 1 of a connected graph."""
    if not g.is_connected():
        raise GraphError("loop order requires a connected graph")
    return len(g.edges) - g.n + 1


# -- canonical forms ----------------------------------------------------------


def _perm_parity(perm: Sequence[int]) -> int:
    """Parity (+1/-1) of a permutation given in one-line notation."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _sort_parity(items: list) -> int:
    """Parity of the stable sort permutation of ``items`` (distinct items)."""
    order = sorted(range(len(items)), key=lambda i: items[i])
    return _perm_parity(order)


def _refine_colors(n: int, edges: tuple[Edge, ...], directed: bool,
                   colors: list) -> list[int]:
    """1-WL colour refinement for multigraphs; returns stable integer colours."""
    # integerise the initial colours
    palette = {c: i for i, c in enumerate(sorted(set(colors)))}
    cur = [palette[c] for c in colors]
    while True:
        sig: list = [None] * n
        for v in range(n):
            sig[v] = [cur[v]]
        for s, t in edges:
            if s == t:
                sig[s].append(("L",))
            elif directed:
                sig[s].append(("o", cur[t]))
                sig[t].append(("i", cur[s]))
            else:
                sig[s].append(("e", cur[t]))
                sig[t].append(("e", cur[s]))
        keys = [(c[0], tuple(sorted(c[1:]))) for c in sig]
        palette = {k: i for i, k in enumerate(sorted(set(keys)))}
        nxt = [palette[k] for k in keys]
        if nxt == cur:
            return cur
        cur = nxt


def _canonical_labelings(n: int, edges: tuple[Edge, ...], directed: bool,
                         init_colors: list) -> tuple[tuple, list[list[int]]]:
    """All vertex relabellings achieving the minimal canonical encoding.

    Individualisation-refinement search; the full leaf set is explored, so
    the returned labellings are closed under the automorphism group (there
    are exactly |Aut| of them).
    """
    if n == 0:
        return ((), ()), [[]]

    best_code = None
    best_perms: list[list[int]] = []

    def encode(perm: list[int]) -> tuple:
        rel = []
        for s, t in edges:
            a, b = perm[s], perm[t]
            if not directed and a > b:
                a, b = b, a
            rel.append((a, b))
        col = [None] * n
        for old, new in enumerate(perm):
            col[new] = init_colors[old]
        return (tuple(col), tuple(sorted(rel)))

    def descend(colors: list) -> None:
        nonlocal best_code, best_perms
        stable = _refine_colors(n, edges, directed, colors)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(stable):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = cells[c]
                break
        if target is None:
            order = sorted(range(n), key=lambda v: stable[v])
            perm = [0] * n
            for new, old in enumerate(order):
                perm[old] = new
            code = encode(perm)
            if best_code is None or code < best_code:
                best_code = code
                best_perms = [perm]
            elif code == best_code:
                best_perms.append(perm)
            return
        for v in target:
            descend([(c, 1 if u == v else 0) for u, c in enumerate(stable)])

    descend(list(map(lambda c: (c,), init_colors)))
    return best_code, best_perms


@dataclass(frozen=True)
class OrientedClass:
    """A canonical representative of a graph class with orientation data.

    ``graph`` is canonically labelled; its stored edge order (even parity)
    or vertex order (odd parity) is the reference orientation of the class.
    ``is_zero`` marks classes killed by an orientation-odd automorphism.
    """

    graph: Graph
    parity: int
    is_zero: bool

    @property
    def key(self) -> str:
        return canonical_key(self.graph, self.parity)

    def degree(self) -> int:
        return degree(self.graph, self.parity)


_CANON_CACHE: dict = {}
_CANON_CACHE_MAX = 1 << 21


def canonicalize(g: Graph, d: int) -> tuple[OrientedClass, int]:
    """Canonical class of ``g`` for parity ``d`` and the relative sign.

    The sign relates the input's stored orientation (edge order for even d,
    vertex order for odd d) to the canonical representative's orientation.
    Idempotent: canonicalising a canonical representative gives sign +1.
    """
    if g.weights is not None:
        g.check_weight_condition()
    even = d % 2 == 0
    cache_key = (g.n, g.edges, g.directed, g.weights, d)
    hit = _CANON_CACHE.get(cache_key)
    if hit is not None:
        return hit

    if not g.directed and not even:
        result = _canonicalize_flip_class(g, d)
    else:
        result = _canonicalize_plain(g, d)
    if len(_CANON_CACHE) < _CANON_CACHE_MAX:
        _CANON_CACHE[cache_key] = result
    return result


def _canonicalize_plain(g: Graph, d: int) -> tuple[OrientedClass, int]:
    even = d % 2 == 0
    n = g.n
    ind, outd, loops = g.in_degrees(), g.out_degrees(), g.loop_counts()
    w = g.weights or (0,) * n
    if g.directed:
        init = [(w[v], ind[v], outd[v], loops[v]) for v in range(n)]
    else:
        val = g.valencies()
        init = [(w[v], val[v], loops[v]) for v in range(n)]
    _, perms = _canonical_labelings(n, g.edges, g.directed, init)
    perm0 = perms[0]
    canon = g.relabel(perm0)
    canon = replace(canon, edges=tuple(sorted(canon.edges)))

    if even:
        # parallel edges admit an odd edge-swap automorphism
        if len(set(canon.edges)) < len(canon.edges):
            return (OrientedClass(canon, d, True), 1)
        sign0 = _sort_parity([_apply(perm0, e, g.directed) for e in g.edges])
        is_zero = any(
            _sort_parity([_apply(p, e, g.directed) for e in g.edges]) != sign0
            for p in perms[1:]
        )
    else:
        sign0 = _perm_parity(perm0)
        is_zero = any(_perm_parity(p) != sign0 for p in perms[1:])

    cls = OrientedClass(canon, d, is_zero)
    return (cls, 1 if is_zero else sign0)


def _apply(perm: Sequence[int], e: Edge, directed: bool) -> Edge:
    a, b = perm[e[0]], perm[e[1]]
    if not directed and a > b:
        a, b = b, a
    return (a, b)


def _canonicalize_flip_class(g: Graph, d: int) -> tuple[OrientedClass, int]:
    """Odd parity with edge directions defined only up to flip-with-sign.

    The canonical representative is the undirected graph with every edge
    oriented from its smaller to its larger label; the input's stored
    directions are one representative of the flip class.  Reversing an edge
    costs a sign, so a self-loop (flipping to itself) kills the class, and a
    vertex relabelling contributes its permutation parity times the parity
    of the number of edges it reverses.
    """
    n = g.n
    norm = tuple((min(s, t), max(s, t)) for s, t in g.edges)
    und = Graph(n, tuple(sorted(norm)), directed=False, weights=g.weights)
    if g.has_tadpole():
        cls0, _ = _canonicalize_plain(und, d - 1)  # structure only
        return (OrientedClass(replace(cls0.graph, directed=False), d, True), 1)

    w = g.weights or (0,) * n
    val, loops = und.valencies(), und.loop_counts()
    init = [(w[v], val[v], loops[v]) for v in range(n)]
    _, perms = _canonical_labelings(n, norm, False, init)

    def flip_sign(perm):
        flips = sum(1 for s, t in g.edges if perm[s] > perm[t])
        return _perm_parity(perm) * (-1) ** flips

    sign0 = flip_sign(perms[0])
    is_zero = any(flip_sign(p) != sign0 for p in perms[1:])
    canon = und.relabel(perms[0])
    canon = replace(canon, edges=tuple(sorted(canon.edges)))
    cls = OrientedClass(canon, d, is_zero)
    return (cls, 1 if is_zero else sign0)


def automorphism_zero_oracle(g: Graph, d: int) -> bool:
    """Brute-force zero test: search all vertex permutations for an
    orientation-odd automorphism.  Independent of the canonical-form search.
    """
    even = d % 2 == 0
    if not g.directed and not even:
        raise GraphError("oracle covers fixed-direction carriers only")
    if even and len(set(g.edges)) < len(g.edges):
        return True
    ref = sorted(g.edges)
    w = g.weights
    for perm in itertools.permutations(range(g.n)):
        rel = [_apply(perm, e, g.directed) for e in g.edges]
        if sorted(rel) != ref:
            continue
        if w is not None:
            ok = all(w[perm.index(v)] == w[v] for v in range(g.n))
            if not ok:
                continue
        sign = _sort_parity(rel) if even else _perm_parity(list(perm))
        if sign == -1:
            return True
    return False


# -- canonical textual format --------------------------------------------------


def canonical_key(g: Graph, d: int) -> str:
    """One-line textual form: ``d=<int>;V=<n>;E=[(s,t),...]`` plus
    ``;W=[w1,...,wn]`` for weighted graphs.  Used as cache key everywhere."""
    es = ",".join(f"({s},{t})" for s, t in g.edges)
    key = f"d={d};V={g.n};E=[{es}]"
    if g.weights is not None:
        key += ";W=[" + ",".join(str(w) for w in g.weights) + "]"
    return key


def parse_key(key: str, directed: bool = True) -> tuple[Graph, int]:
    """Inverse of ``canonical_key``; returns the graph and the parity."""
    parts = key.split(";")
    d = int(parts[0].removeprefix("d="))
    n = int(parts[1].removeprefix("V="))
    es = parts[2].removeprefix("E=[").removesuffix("]")
    edges = []
    if es:
        for tok in es.replace("(", "").split("),"):
            s, t = tok.rstrip(")").split(",")
            edges.append((int(s), int(t)))
    weights = None
    if len(parts) > 3:
        ws = parts[3].removeprefix("W=[").removesuffix("]")
        weights = tuple(int(x) for x in ws.split(",")) if ws else ()
    return Graph(n, tuple(edges), directed, weights), d


# -- enumeration ----------------------------------------------------------------


@dataclass(frozen=True)
class EnumConstraints:
    """Generation-level constraints for a graded slice."""

    directed: bool = True
    connected: bool = True
    min_valency: int = 0
    no_tadpoles: bool = False
    no_passing: bool = False
    balanced: bool = False
    acyclic: bool = False


def _bidegree_sequences(V: int, E: int, c: EnumConstraints) -> Iterator[list[tuple[int, int]]]:
    """Non-increasing sequences of (in, out) vertex margins."""

    def rec(v: int, rem_in: int, rem_out: int, prev: tuple[int, int], acc):
        if v == V:
            if rem_in == 0 and rem_out == 0:
                yield list(acc)
            return
        rest = V - v - 1
        for i in range(min(rem_in, prev[0]), -1, -1):
            # later in-margins are <= i by the non-increasing order
            if rem_in - i > rest * i:
                continue
            o_hi = min(rem_out, prev[1]) if i == prev[0] else rem_out
            for o in range(o_hi, -1, -1):
                if i + o < c.min_valency:
                    continue
                if c.balanced and i != o:
                    continue
                if c.no_passing and (i, o) == (1, 1):
                    continue
                if (rem_in - i) + (rem_out - o) < rest * c.min_valency:
                    continue
                yield from rec(v + 1, rem_in - i, rem_out - o, (i, o), acc + [(i, o)])

    yield from rec(0, E, E, (E, E), [])


def _matrices_with_margins(outs: list[int], ins: list[int],
                           loops_ok: bool) -> Iterator[list[list[int]]]:
    """Non-negative integer V x V matrices with the given row/column sums."""
    V = len(outs)
    col_rem = list(ins)

    def fill_row(v: int, rows: list):
        if v == V:
            if all(r == 0 for r in col_rem):
                yield rows
            return
        # row v is a composition of outs[v] over the V cells
        def cells(u: int, rem: int, row: list):
            if u == V:
                if rem == 0:
                    yield from fill_row(v + 1, rows + [row])
                return
            cap = col_rem[u]
            if u == v and not loops_ok:
                cap = 0
            hi = min(rem, cap)
            # feasibility: later columns must absorb the remainder
            later = sum(col_rem[x] for x in range(u + 1, V) if loops_ok or x != v)
            for k in range(hi, -1, -1):
                if rem - k > later:
                    continue
                col_rem[u] -= k
                yield from cells(u + 1, rem - k, row + [k])
                col_rem[u] += k

        yield from cells(0, outs[v], [])

    yield from fill_row(0, [])


def _undirected_edge_lists(V: int, E: int, c: EnumConstraints) -> Iterator[tuple[Edge, ...]]:
    """Lexicographically sorted undirected edge lists in first-appearance
    vertex order, pruned on frozen valencies and remaining capacity.

    Once the current edge's smaller endpoint has passed a vertex, that
    vertex can never gain valency again, so its minimum-valency deficit
    prunes the branch immediately.
    """
    min_val = c.min_valency

    def rec(edges: list[Edge], last: Edge, used: int, deg: list[int]):
        placed = len(edges)
        if placed == E:
            # leftover vertices are isolated; only admissible at min_val 0
            if used < V and min_val > 0:
                return
            yield tuple(edges)
            return
        rem = E - placed
        a_lo = last[0]
        for a in range(a_lo, min(used, V - 1) + 1):
            # vertices before a are frozen now
            if any(deg[u] < min_val for u in range(a)):
                break
            b_lo = last[1] if a == last[0] else a
            b_hi = min(V - 1, used + 1 if a == used else used)
            if a == used:
                b_lo = max(b_lo, a)
            for b in range(b_lo, b_hi + 1):
                if a == b and c.no_tadpoles:
                    continue
                new_used = max(used, b + 1, a + 1)
                deg[a] += 1
                deg[b] += 1
                need = sum(max(0, min_val - deg[u]) for u in range(new_used))
                need += (V - new_used) * min_val
                if need <= 2 * (rem - 1):
                    edges.append((a, b))
                    yield from rec(edges, (a, b), new_used, deg)
                    edges.pop()
                deg[a] -= 1
                deg[b] -= 1

    if E == 0:
        if V == 0 or min_val == 0:
            yield ()
        return
    yield from rec([], (0, 0), 0, [0] * V)


def _labeled_candidates(V: int, E: int, c: EnumConstraints,
                        limit: Optional[int]) -> Iterator[Graph]:
    count = 0
    if c.directed:
        for seq in _bidegree_sequences(V, E, c):
            ins = [i for i, _ in seq]
            outs = [o for _, o in seq]
            for m in _matrices_with_margins(outs, ins, not c.no_tadpoles):
                edges = []
                for s in range(V):
                    for t in range(V):
                        edges.extend([(s, t)] * m[s][t])
                g = Graph(V, tuple(edges))
                count += 1
                if limit is not None and count > limit:
                    raise SliceTooLarge(count)
                yield g
    else:
        for edges in _undirected_edge_lists(V, E, c):
            g = Graph(V, edges, directed=False)
            count += 1
            if limit is not None and count > limit:
                raise SliceTooLarge(count)
            yield g


def _passes(g: Graph, c: EnumConstraints) -> bool:
    if c.connected and not g.is_connected():
        return False
    if c.acyclic and not g.is_acyclic():
        return False
    return True


def enumerate_classes(V: int, E: int, d: int, c: EnumConstraints,
                      include_zero: bool = False,
                      limit: Optional[int] = None) -> list[OrientedClass]:
    """All isomorphism classes of the slice, sorted by canonical key.

    Zero classes (killed by an odd automorphism) are dropped unless
    ``include_zero`` is set -- weighted enumeration needs them because a
    weighting can break the symmetry that killed the unweighted class.
    """
    if V < 0 or E < 0:
        raise GraphError("counts must be non-negative")
    if V == 0:
        return []
    found: dict[str, OrientedClass] = {}
    for g in _labeled_candidates(V, E, c, limit):
        if not _passes(g, c):
            continue
        cls, _ = canonicalize(g, d)
        key = cls.key
        if key not in found:
            found[key] = cls
    out = [cls for _, cls in sorted(found.items())
           if include_zero or not cls.is_zero]
    return out


def brute_force_classes(V: int, E: int, d: int, c: EnumConstraints,
                        include_zero: bool = False) -> list[OrientedClass]:
    """Independent enumeration oracle: every labelled edge multiset, dedup by
    canonical key.  Only feasible at very small sizes."""
    if V == 0:
        return []
    if c.directed:
        cells = [(s, t) for s in range(V) for t in range(V)
                 if (s != t or not c.no_tadpoles)]
    else:
        cells = [(s, t) for s in range(V) for t in range(s, V)
                 if (s != t or not c.no_tadpoles)]
    found: dict[str, OrientedClass] = {}
    for combo in itertools.combinations_with_replacement(cells, E):
        g = Graph(V, tuple(combo), directed=c.directed)
        vals = g.valencies()
        if any(v < c.min_valency for v in vals):
            continue
        if c.no_passing and g.passing_vertices():
            continue
        if c.balanced and g.in_degrees() != g.out_degrees():
            continue
        if not _passes(g, c):
            continue
        cls, _ = canonicalize(g, d)
        if cls.key not in found:
            found[cls.key] = cls
    return [cls for _, cls in sorted(found.items())
            if include_zero or not cls.is_zero]


def enumerate_weightings(cls: OrientedClass, d: int, weight_cap: int,
                         rule: str = "all") -> list[OrientedClass]:
    """Weighted classes over one underlying graph, total weight <= cap.

    rule: 'all' (every admissible weighting), 'eq' (forced weights
    w_v = in-1 = out-1 only) or 'noneq' (everything except the eq one).
    """
    g = cls.graph
    ind, outd = g.in_degrees(), g.out_degrees()
    smin = [max(1, ind[v] - 1, outd[v] - 1) for v in range(g.n)]
    if rule == "eq":
        if any(ind[v] != outd[v] or smin[v] != ind[v] - 1 for v in range(g.n)):
            return []
        choices = [[ind[v] - 1] for v in range(g.n)]
    else:
        budget = weight_cap - sum(smin)
        if budget < 0:
            return []
        choices = [list(range(smin[v], smin[v] + budget + 1)) for v in range(g.n)]
    found: dict[str, OrientedClass] = {}
    for w in itertools.product(*choices):
        if sum(w) > weight_cap:
            continue
        if rule == "noneq" and all(
            ind[v] == outd[v] and w[v] == ind[v] - 1 for v in range(g.n)
        ):
            continue
        wg = Graph(g.n, g.edges, g.directed, tuple(w))
        wcls, _ = canonicalize(wg, d)
        if not wcls.is_zero and wcls.key not in found:
            found[wcls.key] = wcls
    return [cls for _, cls in sorted(found.items())]


# -- structural extractors -------------------------------------------------------


def skeleton(g: Graph) -> Graph:
    """Recursively delete univalent in-vertices (one outgoing edge, nothing
    else).  The result is a fixed point; a graph may empty out entirely."""
    keep = list(range(g.n))
    edges = list(g.edges)
    while True:
        ind = {v: 0 for v in keep}
        outd = {v: 0 for v in keep}
        for s, t in edges:
            ind[t] += 1
            outd[s] += 1
        drop = {v for v in keep if ind[v] == 0 and outd[v] == 1}
        if not drop:
            break
        keep = [v for v in keep if v not in drop]
        edges = [(s, t) for s, t in edges if s not in drop and t not in drop]
    remap = {v: i for i, v in enumerate(keep)}
    new_edges = tuple((remap[s], remap[t]) for s, t in edges)
    weights = None
    if g.weights is not None:
        weights = tuple(g.weights[v] for v in keep)
    return Graph(len(keep), new_edges, g.directed, weights)


@dataclass(frozen=True)
class StringDecomposition:
    core_vertices: tuple[int, ...]
    strings: tuple[tuple[int, ...], ...]   # vertex chains headed by a univalent in-vertex
    reduced: Graph                          # on the core vertices, reindexed
    edge_weights: tuple[int, ...]           # passing-chain length per reduced edge
    core_index: tuple[int, ...]             # reduced index -> original vertex


def string_decomposition(g: Graph) -> StringDecomposition:
    """Split a connected directed graph into core vertices, strings and a
    reduced graph whose edges carry the length of the contracted passing
    chain (0 for an ordinary edge).

    A string is a chain headed by a univalent in-vertex running through
    passing vertices.  A maximal passing chain between core vertices becomes
    one weighted edge.  A directed path graph (the bare string shape) is a
    single string with no core; a pure cycle of passing vertices keeps its
    minimal vertex as an artificial core anchor.
    """
    if not g.is_connected():
        raise GraphError("string decomposition requires a connected graph")
    ind, outd = g.in_degrees(), g.out_degrees()
    passing = {v for v in range(g.n) if ind[v] == 1 and outd[v] == 1}
    heads = {v for v in range(g.n) if ind[v] == 0 and outd[v] == 1}
    tails = {v for v in range(g.n) if ind[v] == 1 and outd[v] == 0}
    if (len(heads) == 1 and len(tails) == 1
            and len(passing) == g.n - 2 and len(g.edges) == g.n - 1):
        # bare string: the whole graph is one chain, nothing is core
        order = []
        cur = next(iter(heads))
        succ = {s: t for s, t in g.edges}
        while True:
            order.append(cur)
            if cur not in succ:
                break
            cur = succ[cur]
        return StringDecomposition(
            core_vertices=(), strings=(tuple(order),),
            reduced=Graph(0, (), True, () if g.weights is not None else None),
            edge_weights=(), core_index=(),
        )
    core = [v for v in range(g.n) if v not in passing and v not in heads]
    if not core and not heads and g.n:
        core = [0]          # all-passing cycle: anchor at the minimal vertex
        passing.discard(0)

    succ: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for s, t in g.edges:
        succ[s].append(t)

    # strings: walk from each head through passing vertices
    strings = []
    stringy: set[int] = set()
    for h in sorted(heads):
        chain = [h]
        cur = succ[h][0]
        while cur in passing and cur not in stringy and cur != h:
            chain.append(cur)
            cur = succ[cur][0]
        strings.append(tuple(chain))
        stringy.update(chain)

    core_set = set(core)
    remap = {v: i for i, v in enumerate(sorted(core_set))}
    red_edges = []
    red_weights = []
    for s, t in g.edges:
        if s not in core_set:
            continue
        # follow the passing chain (skipping stringy vertices feeding in)
        length = 0
        cur = t
        while cur in passing and cur not in stringy and cur not in core_set:
            length += 1
            cur = succ[cur][0]
        if cur in core_set:
            red_edges.append((remap[s], remap[cur]))
            red_weights.append(length)
    reduced = Graph(len(core_set), tuple(red_edges), True,
                    tuple(g.weights[v] for v in sorted(core_set)) if g.weights else None)
    return StringDecomposition(
        core_vertices=tuple(sorted(core_set)),
        strings=tuple(sorted(strings)),
        reduced=reduced,
        edge_weights=tuple(red_weights),
        core_index=tuple(sorted(core_set)),
    )
