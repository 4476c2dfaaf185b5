"""Graded cohomology tables, verification suites and claim reports.

Slices are graded by vertex count inside a fixed loop order; the differential
raises the vertex count by one, so a contiguous V range yields a finite
cochain complex.  Interior dimensions dim basis - rank(in) - rank(out) are
exact; at a truncation edge the unknown boundary rank widens the dimension
to an interval, never silently to a number.  A lower edge at V = 1 (or an
empty slice below) is a natural boundary and stays exact.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

from .complexes import Basis, ComplexError, GradedSlice, basis, get_complex
from .differentials import (
    ChainVector,
    differential,
    map_F_wheeled,
    map_i_directed,
    project_equal,
    vector_of,
)
from .linalg import (
    DEFAULT_SEED,
    ImageResult,
    SparseIntMatrix,
    assemble,
    in_image,
    rank,
    random_primes,
)

SCHEMA_VERSION = 1


# -- shared in-memory cache of bases and differential matrices -------------------

_BASIS_CACHE: dict = {}
_MATRIX_CACHE: dict = {}


def clear_caches() -> None:
    _BASIS_CACHE.clear()
    _MATRIX_CACHE.clear()


def cached_basis(sl: GradedSlice) -> Basis:
    key = (sl.complex, sl.d, sl.b, sl.V, sl.W)
    if key not in _BASIS_CACHE:
        _BASIS_CACHE[key] = basis(sl)
    return _BASIS_CACHE[key]


def diff_operator(complex_name: str, W: Optional[int]) -> Callable:
    return lambda cls: differential(cls, complex_name, W)


def cached_diff_matrix(sl: GradedSlice) -> SparseIntMatrix:
    """Assembled differential matrix from slice (b, V) into (b, V+1)."""
    key = (sl.complex, sl.d, sl.b, sl.V, sl.W)
    if key not in _MATRIX_CACHE:
        src = cached_basis(sl)
        tgt = cached_basis(sl.shifted(1))
        _MATRIX_CACHE[key] = assemble(src, tgt, diff_operator(sl.complex, sl.W))
    return _MATRIX_CACHE[key]


# -- dimension tables -------------------------------------------------------------


@dataclass
class DegreeEntry:
    V: int
    degree: int
    dim_low: int
    dim_high: int
    exact: bool

    @property
    def dim(self) -> Optional[int]:
        return self.dim_low if self.exact else None


@dataclass
class CohomologyReport:
    complex: str
    d: int
    b: int
    W: Optional[int]
    primes: list[int]
    table: list[DegreeEntry]
    basis_dims: dict[int, int]
    rank_ladder: dict[int, int]
    flags: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def dims_by_degree(self, exact_only: bool = True) -> dict[int, int]:
        out = {}
        for e in self.table:
            if e.exact or not exact_only:
                out[e.degree] = out.get(e.degree, 0) + e.dim_low
        return out

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "complex": self.complex,
            "d": self.d,
            "b": self.b,
            "W": self.W,
            "primes": self.primes,
            "table": [
                {
                    "V": e.V,
                    "degree": e.degree,
                    "dim": e.dim_low if e.exact else [e.dim_low, e.dim_high],
                    "exact": e.exact,
                }
                for e in self.table
            ],
            "basis_dims": {str(k): v for k, v in self.basis_dims.items()},
            "rank_ladder": {str(k): v for k, v in self.rank_ladder.items()},
            "flags": self.flags,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _dims_from_ranks(Vs: list[int], dims: dict[int, int],
                     rank_in: dict[int, Optional[int]],
                     rank_out: dict[int, Optional[int]],
                     degree_of: Callable[[int], int]) -> list[DegreeEntry]:
    table = []
    for V in Vs:
        n = dims[V]
        ri, ro = rank_in.get(V), rank_out.get(V)
        if n == 0:
            table.append(DegreeEntry(V, degree_of(V), 0, 0, True))
            continue
        if ri is not None and ro is not None:
            dim = n - ri - ro
            table.append(DegreeEntry(V, degree_of(V), dim, dim, True))
        elif ri is not None:
            table.append(DegreeEntry(V, degree_of(V), 0, n - ri, False))
        elif ro is not None:
            table.append(DegreeEntry(V, degree_of(V), 0, n - ro, False))
        else:
            table.append(DegreeEntry(V, degree_of(V), 0, n, False))
    return table


def cohomology(complex_name: str, d: int, b: int, V_range: Sequence[int],
               W: Optional[int] = None, primes: Optional[list[int]] = None,
               seed: int = DEFAULT_SEED, mode: str = "modular") -> CohomologyReport:
    """Cohomology dimension table of one loop-order slice family.

    For AuxC the V range means string lengths and W the exact total weight.
    The range is silently extended one slice below the requested bottom so
    the incoming rank there is exact; the top edge keeps its honest interval
    unless the top slice (or the one above, when cheap to decide) is empty.
    """
    get_complex(complex_name)
    Vs = sorted(V_range)
    if not Vs:
        raise ComplexError("empty V range")
    lo, hi = Vs[0], Vs[-1]
    ps = primes if primes is not None else random_primes(3, seed)

    bases: dict[int, Basis] = {}
    ext_lo = max(1, lo - 1)
    for V in range(ext_lo, hi + 1):
        bases[V] = cached_basis(GradedSlice(complex_name, d, b, V, W))

    mats: dict[int, SparseIntMatrix] = {}
    ranks: dict[int, int] = {}
    agreement = True
    for V in range(ext_lo, hi):
        if len(bases[V]) == 0 or len(bases[V + 1]) == 0:
            ranks[V] = 0
            continue
        mats[V] = cached_diff_matrix(GradedSlice(complex_name, d, b, V, W))
        res = rank(mats[V], mode=mode, primes=ps)
        agreement = agreement and (res.mode == "rational" or res.agreed)
        ranks[V] = res.rank

    rank_in: dict[int, Optional[int]] = {}
    rank_out: dict[int, Optional[int]] = {}
    for V in Vs:
        if V - 1 in ranks:
            rank_in[V] = ranks[V - 1]
        elif V <= 1:
            rank_in[V] = 0
        else:
            rank_in[V] = None
        if V in ranks:
            rank_out[V] = ranks[V]
        elif V == hi and len(bases[V]) == 0:
            rank_out[V] = 0
        else:
            rank_out[V] = None

    degree_of = lambda V: GradedSlice(complex_name, d, b, V, W).degree()
    table = _dims_from_ranks(Vs, {V: len(bases[V]) for V in Vs},
                             rank_in, rank_out, degree_of)
    return CohomologyReport(
        complex=complex_name, d=d, b=b, W=W, primes=ps, table=table,
        basis_dims={V: len(bases[V]) for V in Vs},
        rank_ladder=dict(sorted(ranks.items())),
        flags={"rank_mode": mode, "prime_agreement": agreement,
               "bottom_extended": ext_lo < lo or lo <= 1},
    )


# -- verification suites -----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def verify_d_squared(complex_name: str, d: int, b_values: Sequence[int],
                     V_max: int, W: Optional[int] = None) -> list[CheckResult]:
    """Exact zero products of consecutive assembled differentials.

    For every b and every V with V+2 <= V_max the product of the matrices
    (V+1 -> V+2) o (V -> V+1) must be the integer zero matrix.
    """
    out = []
    for b in b_values:
        for V in range(1, V_max - 1):
            sl = GradedSlice(complex_name, d, b, V, W)
            b0, b1, b2 = (cached_basis(sl), cached_basis(sl.shifted(1)),
                          cached_basis(sl.shifted(2)))
            name = f"d2[{complex_name},d={d},b={b},V={V}->{V+2}]"
            if len(b0) == 0 or len(b1) == 0:
                out.append(CheckResult(name, True, "vacuous (empty slice)"))
                continue
            m01 = cached_diff_matrix(sl)
            m12 = cached_diff_matrix(sl.shifted(1))
            prod = m12.matmul(m01)
            if prod.is_zero():
                out.append(CheckResult(
                    name, True,
                    f"dims {len(b0)}/{len(b1)}/{len(b2)}, nnz {m01.nnz}+{m12.nnz}"))
            else:
                (r, c), v = next(iter(sorted(prod.entries.items())))
                culprit = b0.keys()[c]
                out.append(CheckResult(
                    name, False,
                    f"nonzero product entry {v} at row {b2.keys()[r]} "
                    f"from basis element {culprit}"))
    return out


def verify_d_squared_aux(w_max: int) -> list[CheckResult]:
    out = []
    for w in range(1, w_max + 1):
        for n in range(1, w):
            sl = GradedSlice("AuxC", 0, 0, n, w)
            m01 = cached_diff_matrix(sl)
            m12 = cached_diff_matrix(sl.shifted(1))
            prod = m12.matmul(m01)
            out.append(CheckResult(
                f"d2[AuxC,w={w},n={n}->{n+2}]", prod.is_zero(),
                "" if prod.is_zero() else f"nonzero entries {prod.entries}"))
    return out


CHAIN_MAPS: dict[str, dict] = {
    "F_wheeled": {
        "source": "dfcGC_ge2", "target": "dwGC_star", "weighted_target": True,
    },
    "F_wheeled_dcGC": {
        "source": "dcGC", "target": "dwGC_star", "weighted_target": True,
    },
    "i_directed": {
        "source": "GC_ge2", "target": "dfcGC_ge2", "weighted_target": False,
    },
    "project_equal": {
        "source": "dcGC", "target": "dcGC_eq", "weighted_target": False,
    },
}


def _chain_map_operator(name: str, W: Optional[int]) -> Callable:
    if name.startswith("F_wheeled"):
        return lambda cls: map_F_wheeled(cls, W)
    if name == "i_directed":
        return map_i_directed
    if name == "project_equal":
        return lambda cls: project_equal(vector_of(cls))
    raise ComplexError(f"unknown chain map {name}")


def verify_chain_map(name: str, d: int, b_values: Sequence[int], V_max: int,
                     W: Optional[int] = None) -> list[CheckResult]:
    """Exact matrix identity M_target * Phi = Phi * M_source per slice pair."""
    info = CHAIN_MAPS[name]
    src_cx, tgt_cx = info["source"], info["target"]
    tgt_W = W if info["weighted_target"] else None
    phi = _chain_map_operator(name, W)
    out = []
    for b in b_values:
        for V in range(1, V_max):
            s_lo = GradedSlice(src_cx, d, b, V)
            s_hi = GradedSlice(src_cx, d, b, V + 1)
            t_lo = GradedSlice(tgt_cx, d, b, V, tgt_W)
            t_hi = GradedSlice(tgt_cx, d, b, V + 1, tgt_W)
            bs, bs1 = cached_basis(s_lo), cached_basis(s_hi)
            bt, bt1 = cached_basis(t_lo), cached_basis(t_hi)
            cname = f"chainmap[{name},d={d},b={b},V={V}]"
            if len(bs) == 0:
                out.append(CheckResult(cname, True, "vacuous (empty source)"))
                continue
            d_src = assemble(bs, bs1, diff_operator(src_cx, None))
            d_tgt = assemble(bt, bt1, diff_operator(tgt_cx, tgt_W))
            phi_lo = assemble(bs, bt, phi)
            phi_hi = assemble(bs1, bt1, phi)
            lhs = d_tgt.matmul(phi_lo)
            rhs = phi_hi.matmul(d_src)
            diff_entries = dict(lhs.entries)
            for k, v in rhs.entries.items():
                diff_entries[k] = diff_entries.get(k, 0) - v
                if diff_entries[k] == 0:
                    del diff_entries[k]
            if not diff_entries:
                out.append(CheckResult(cname, True,
                                       f"dims {len(bs)}->{len(bt)}"))
            else:
                (r, c), v = next(iter(sorted(diff_entries.items())))
                out.append(CheckResult(
                    cname, False,
                    f"mismatch {v} at target {bt1.keys()[r]} from {bs.keys()[c]}"))
    return out


@dataclass
class CocycleReport:
    closed: bool
    coboundary: str                 # 'yes' | 'no' | 'unknown'
    image_detail: str = ""
    primes: list[int] = field(default_factory=list)


def is_nontrivial_cocycle(vec: ChainVector, complex_name: str, d: int, b: int,
                          V: int, W: Optional[int] = None,
                          seed: int = DEFAULT_SEED) -> CocycleReport:
    """Exact closedness plus modular-certified image membership of a vector
    living in the slice (b, V)."""
    if vec.is_zero():
        return CocycleReport(True, "yes", "zero vector")
    dv = ChainVector()
    for key, c in vec.coeffs.items():
        dv.add_vector(differential(vec.elements[key], complex_name, W), c)
    closed = dv.is_zero()

    below = GradedSlice(complex_name, d, b, V - 1, W)
    b_below = cached_basis(below)
    b_here = cached_basis(GradedSlice(complex_name, d, b, V, W))
    missing = [k for k in vec.coeffs if k not in b_here.index]
    if missing:
        raise ComplexError(f"vector keys outside the slice basis: {missing[:3]}")
    dense_vec = {b_here.index[k]: c for k, c in vec.coeffs.items()}
    if len(b_below) == 0:
        return CocycleReport(closed, "no", "empty slice below", [])
    m = cached_diff_matrix(below)
    res = in_image(m, dense_vec, seed=seed)
    status = {True: "yes", False: "no", None: "unknown"}[res.in_image]
    return CocycleReport(closed, status, res.detail, res.certificate_primes)


def ses_consistency(d: int, b: int, V_range: Sequence[int],
                    seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """Slice-wise checks of the short exact sequence
    0 -> dcGC_neq -> dcGC -> dcGC_eq -> 0:
    basis partition, Euler-characteristic additivity and, for d = 2, the
    dimension identity of the induced short exact sequences in cohomology
    on exactly-known interior degrees."""
    out = []
    Vs = sorted(V_range)
    for V in Vs:
        full = cached_basis(GradedSlice("dcGC", d, b, V))
        neq = cached_basis(GradedSlice("dcGC_neq", d, b, V))
        eq = cached_basis(GradedSlice("dcGC_eq", d, b, V))
        part = set(neq.keys()) | set(eq.keys())
        ok = (len(neq) + len(eq) == len(full)) and part == set(full.keys())
        out.append(CheckResult(
            f"ses-basis[d={d},b={b},V={V}]", ok,
            f"{len(full)} = {len(neq)} + {len(eq)}"))

    reports = {
        name: cohomology(name, d, b, Vs, seed=seed)
        for name in ("dcGC", "dcGC_neq", "dcGC_eq")
    }
    chi = {}
    for name, rep in reports.items():
        chi[name] = sum((-1) ** e.degree * e.dim_low
                        for e in rep.table if e.exact)
    exact_everywhere = all(
        e.exact for rep in reports.values() for e in rep.table
    )
    basis_chi = {
        name: sum((-1) ** GradedSlice(name, d, b, V).degree() * rep.basis_dims[V]
                  for V in Vs)
        for name, rep in reports.items()
    }
    out.append(CheckResult(
        f"ses-euler-basis[d={d},b={b}]",
        basis_chi["dcGC"] == basis_chi["dcGC_neq"] + basis_chi["dcGC_eq"],
        f"{basis_chi}"))
    if exact_everywhere:
        out.append(CheckResult(
            f"ses-euler-cohomology[d={d},b={b}]",
            chi["dcGC"] == chi["dcGC_neq"] + chi["dcGC_eq"],
            f"{chi}"))
    if d == 2:
        dims = {name: {e.V: e for e in rep.table} for name, rep in reports.items()}
        for V in Vs[:-1]:
            eq_e = dims["dcGC_eq"].get(V)
            neq_e = dims["dcGC_neq"].get(V + 1)
            full_e = dims["dcGC"].get(V + 1)
            if not (eq_e and neq_e and full_e):
                continue
            if not (eq_e.exact and neq_e.exact and full_e.exact):
                continue
            ok = neq_e.dim_low == eq_e.dim_low + full_e.dim_low
            out.append(CheckResult(
                f"ses-split[d=2,b={b},V={V}]", ok,
                f"H(neq,V+1)={neq_e.dim_low} vs H(eq,V)={eq_e.dim_low} "
                f"+ H(dcGC,V+1)={full_e.dim_low}"))
    return out


# -- mapping cone (exploratory, truncation-labelled) -------------------------------


def _resolve_cone_map(map_name: str, W: Optional[int]):
    """Map spec for cone_report: a registered chain map, or 'identity:<cx>'
    / 'zero:<cx>' for the calibration cones."""
    if map_name in CHAIN_MAPS:
        info = CHAIN_MAPS[map_name]
        return (info["source"], info["target"], info["weighted_target"],
                _chain_map_operator(map_name, W))
    if map_name.startswith(("identity:", "zero:")):
        kind, cx = map_name.split(":")
        weighted = get_complex(cx).weighted
        if kind == "identity":
            op = vector_of
        else:
            op = lambda cls: ChainVector()
        return (cx, cx, weighted, op)
    raise ComplexError(f"unknown cone map {map_name!r}")


def cone_report(map_name: str, d: int, b: int, V_range: Sequence[int],
                W: Optional[int] = None, seed: int = DEFAULT_SEED) -> CohomologyReport:
    """Truncated mapping-cone dimension table for one of the chain maps.

    The cone of Phi: A -> B has C_V = A_{V+1} (+) B_V with differential
    (a, b) -> (-d a, Phi(a) + d b).  Top-edge entries are intervals; this
    report is exploratory evidence only, never a theorem checker.
    """
    src_cx, tgt_cx, weighted_target, phi = _resolve_cone_map(map_name, W)
    src_W = W if get_complex(src_cx).weighted else None
    tgt_W = W if weighted_target else None
    Vs = sorted(V_range)
    lo, hi = max(1, Vs[0] - 1), Vs[-1]
    ps = random_primes(3, seed)

    a_basis = {V: cached_basis(GradedSlice(src_cx, d, b, V + 1, src_W))
               for V in range(lo, hi + 1)}
    b_basis = {V: cached_basis(GradedSlice(tgt_cx, d, b, V, tgt_W))
               for V in range(lo, hi + 1)}
    dims = {V: len(a_basis[V]) + len(b_basis[V]) for V in Vs}

    ranks: dict[int, int] = {}
    for V in range(lo, hi):
        nA, nB = len(a_basis[V]), len(b_basis[V])
        nA1, nB1 = len(a_basis[V + 1]), len(b_basis[V + 1])
        m = SparseIntMatrix(nA1 + nB1, nA + nB)
        if nA and nA1:
            dA = assemble(a_basis[V], a_basis[V + 1], diff_operator(src_cx, src_W))
            for (r, c), v in dA.entries.items():
                m.set(r, c, -v)
        if nA and nB1:
            ph = assemble(a_basis[V], b_basis[V + 1], phi)
            for (r, c), v in ph.entries.items():
                m.set(nA1 + r, c, v)
        if nB and nB1:
            dB = assemble(b_basis[V], b_basis[V + 1], diff_operator(tgt_cx, tgt_W))
            for (r, c), v in dB.entries.items():
                m.set(nA1 + r, nA + c, v)
        res = rank(m, primes=ps)
        ranks[V] = res.rank

    rank_in = {V: (ranks[V - 1] if V - 1 in ranks else (0 if V <= 1 else None))
               for V in Vs}
    rank_out = {V: (ranks[V] if V in ranks else None) for V in Vs}
    degree_of = lambda V: GradedSlice(tgt_cx, d, b, V, tgt_W).degree()
    table = _dims_from_ranks(Vs, dims, rank_in, rank_out, degree_of)
    return CohomologyReport(
        complex=f"cone({map_name})", d=d, b=b, W=W, primes=ps, table=table,
        basis_dims=dims, rank_ladder=dict(sorted(ranks.items())),
        flags={"exploratory": True},
    )
