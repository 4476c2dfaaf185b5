"""Reusable verification suites: Maurer-Cartan/bracket coherence, cocycle
certificates, enumeration oracle agreement, and a small process pool for
independent slice checks."""

from __future__ import annotations

import itertools
import random
from multiprocessing import Pool
from typing import Optional, Sequence

from .complexes import GradedSlice, basis
from .differentials import (
    ChainVector,
    bracket,
    differential,
    edge_vector,
    reconciling_sign,
    rescaling_class,
    vector_of,
)
from .graphs import (
    EnumConstraints,
    brute_force_classes,
    canonicalize,
    complete_graph,
    degree,
    enumerate_classes,
)
from .homology import CheckResult, cached_basis, is_nontrivial_cocycle
from .linalg import DEFAULT_SEED


def mc_bracket_suite(seed: int = DEFAULT_SEED,
                     V_max: int = 4, b_max: int = 3,
                     jacobi_trials: int = 20) -> list[CheckResult]:
    """[edge, edge] = 0; bracket-vs-differential on all small basis elements
    under the frozen reconciling sign; graded antisymmetry and Jacobi on
    random small triples.  All checks are exact."""
    out = []
    for d in (2, 3):
        e = edge_vector(d)
        out.append(CheckResult(f"mc[e,e][d={d}]", bracket(e, e, d).is_zero()))

    for d in (2, 3):
        checked, bad = 0, []
        for b in range(b_max + 1):
            for V in range(1, V_max + 1):
                for cls in cached_basis(GradedSlice("dfcGC_ge2", d, b, V)).classes:
                    lhs = bracket(edge_vector(d), vector_of(cls), d)
                    rhs = differential(cls, "dfcGC").scaled(
                        reconciling_sign(cls.degree()))
                    checked += 1
                    if lhs != rhs:
                        bad.append(cls.key)
        out.append(CheckResult(
            f"bracket-vs-delta[d={d}]", not bad,
            f"{checked} elements" + (f", mismatches {bad[:3]}" if bad else "")))

    rng = random.Random(seed)
    pool: dict[int, list] = {}
    for d in (2, 3):
        pool[d] = [edge_vector(d)]
        for b in (1, 2):
            for V in (1, 2, 3):
                for cls in cached_basis(GradedSlice("dfcGC_ge2", d, b, V)).classes:
                    pool[d].append(vector_of(cls))
    for d in (2, 3):
        ok_anti = ok_jac = True
        for _ in range(jacobi_trials):
            x, y, z = (rng.choice(pool[d]) for _ in range(3))
            dx = _deg_of(x, d)
            dy = _deg_of(y, d)
            anti = bracket(x, y, d)
            anti.add_vector(bracket(y, x, d), (-1) ** (dx * dy))
            ok_anti = ok_anti and anti.is_zero()
            jac = bracket(x, bracket(y, z, d), d)
            jac.add_vector(bracket(bracket(x, y, d), z, d), -1)
            jac.add_vector(bracket(y, bracket(x, z, d), d), -((-1) ** (dx * dy)))
            ok_jac = ok_jac and jac.is_zero()
        out.append(CheckResult(f"bracket-antisymmetry[d={d}]", ok_anti,
                               f"{jacobi_trials} random pairs"))
        out.append(CheckResult(f"bracket-jacobi[d={d}]", ok_jac,
                               f"{jacobi_trials} random triples"))
    return out


def _deg_of(vec: ChainVector, d: int) -> int:
    key = next(iter(vec.coeffs))
    return degree(vec.elements[key].graph, d)


def cocycle_suite(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    """The tetrahedron class and the truncated rescaling class are closed
    and not coboundaries, certified modulo random primes."""
    out = []
    k4, _ = canonicalize(complete_graph(4), 2)
    rep = is_nontrivial_cocycle(vector_of(k4), "GC", 2, 3, 4, seed=seed)
    out.append(CheckResult(
        "cocycle[K4,GC,d=2,b=3]",
        rep.closed and rep.coboundary == "no",
        f"closed={rep.closed} coboundary={rep.coboundary} ({rep.image_detail})"))
    for d in (2, 3):
        for W in (4, 5):
            r = rescaling_class(W, d)
            rep = is_nontrivial_cocycle(r, "dwGC", d, 0, 1, W, seed=seed)
            out.append(CheckResult(
                f"cocycle[rescaling,W={W},d={d}]",
                rep.closed and rep.coboundary == "no",
                f"closed={rep.closed} coboundary={rep.coboundary}"))
    return out


def oracle_suite(V_max: int = 4, E_max: int = 6,
                 quick: bool = False) -> list[CheckResult]:
    """enumerate() against the labelled brute-force oracle: identical counts
    and identical canonical key sets on every small slice."""
    bundles = [
        ("directed", EnumConstraints(directed=True, connected=True)),
        ("directed-ge2", EnumConstraints(directed=True, connected=True,
                                         min_valency=2)),
        ("directed-nopass", EnumConstraints(directed=True, connected=True,
                                            min_valency=2, no_passing=True)),
        ("undirected-ge2", EnumConstraints(directed=False, connected=True,
                                           min_valency=2)),
    ]
    if not quick:
        bundles += [
            ("directed-notad", EnumConstraints(directed=True, connected=True,
                                               no_tadpoles=True)),
            ("undirected", EnumConstraints(directed=False, connected=True)),
            ("directed-balanced", EnumConstraints(directed=True, connected=True,
                                                  balanced=True)),
            ("directed-acyclic", EnumConstraints(directed=True, connected=True,
                                                 min_valency=2, no_passing=True,
                                                 acyclic=True)),
        ]
    out = []
    for name, c in bundles:
        bad = []
        total = 0
        e_cap = E_max if not quick else min(E_max, 4)
        for V in range(1, V_max + 1):
            for E in range(0, e_cap + 1):
                for d in (2, 3):
                    got = [x.key for x in enumerate_classes(V, E, d, c)]
                    want = [x.key for x in brute_force_classes(V, E, d, c)]
                    total += len(want)
                    if got != want:
                        bad.append((V, E, d))
        out.append(CheckResult(f"oracle[{name}]", not bad,
                               f"{total} classes" + (f", bad {bad}" if bad else "")))
    return out


# -- process pool over independent slices ----------------------------------------


def _d2_task(args) -> CheckResult:
    from .homology import verify_d_squared
    cx, d, b, V_max, W = args
    results = verify_d_squared(cx, d, [b], V_max, W)
    bad = [r for r in results if not r.ok]
    if bad:
        return bad[0]
    return CheckResult(f"d2[{cx},d={d},b={b},V<={V_max}]", True,
                       f"{len(results)} slice pairs")


def run_d2_parallel(specs: Sequence[tuple], jobs: int = 1) -> list[CheckResult]:
    """specs: (complex, d, b, V_max, W) tuples, one worker per loop order."""
    if jobs <= 1:
        return [_d2_task(s) for s in specs]
    with Pool(jobs) as pool:
        return pool.map(_d2_task, specs)
