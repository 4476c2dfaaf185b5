"""Command-line front end: slice enumeration, cohomology reports,
verification suites and matrix export.

Exit codes: 0 success, 2 usage error (unknown complex, missing weight cap),
3 partial result (truncation intervals or unverified ranks in a report,
or a slice that exceeded its resource budget).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from . import cache as diskcache
from .complexes import ComplexError, GradedSlice, basis, get_complex
from .differentials import rescaling_class, vector_of
from .graphs import GraphError, SliceTooLarge, canonicalize, complete_graph
from .homology import (
    CheckResult,
    cached_basis,
    cached_diff_matrix,
    cohomology,
    is_nontrivial_cocycle,
    ses_consistency,
    verify_chain_map,
    verify_d_squared,
    verify_d_squared_aux,
)
from .linalg import DEFAULT_SEED
from .verify import mc_bracket_suite, cocycle_suite, oracle_suite

USAGE_ERROR = 2
PARTIAL = 3


def _parse_range(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":")
        return list(range(int(lo), int(hi) + 1))
    v = int(spec)
    return [v]


def _apply_constraint_overrides(spec, tokens: str):
    c = spec.constraints
    for tok in tokens.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if "=" in tok:
            key, val = tok.split("=")
            c = dataclasses.replace(c, **{key: int(val)})
        else:
            c = dataclasses.replace(c, **{tok: True})
    return dataclasses.replace(spec, name=spec.name + "+custom", constraints=c)


def cmd_enumerate(args) -> int:
    try:
        spec = get_complex(args.complex)
    except ComplexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if spec.weighted and args.W is None:
        print(f"error: {args.complex} needs --W (weight cap)", file=sys.stderr)
        return USAGE_ERROR

    root = diskcache.cache_root(args.cache)
    t0 = time.perf_counter()

    if args.complex == "AuxC":
        if args.w is None:
            print("error: AuxC needs --w (total weight)", file=sys.stderr)
            return USAGE_ERROR
        keys = []
        for n in range(1, args.w + 1):
            sl = GradedSlice("AuxC", 0, 0, n, args.w)
            keys.extend(basis(sl).keys())
        for k in keys:
            print(k)
        print(f"count: {len(keys)}")
        return 0

    if args.d is None or args.b is None or args.V is None:
        print("error: --d, --b and --V are required", file=sys.stderr)
        return USAGE_ERROR
    sl = GradedSlice(args.complex, args.d, args.b, args.V, args.W)

    cached = diskcache.load_basis(root, sl) if args.constraints is None else None
    hit = cached is not None
    if cached is None:
        try:
            if args.constraints:
                spec2 = _apply_constraint_overrides(spec, args.constraints)
                from .graphs import enumerate_classes, enumerate_weightings
                raw = enumerate_classes(sl.V, sl.E, sl.d, spec2.constraints,
                                        include_zero=spec2.weighted)
                classes = []
                for cls in raw:
                    if spec2.weighted:
                        classes.extend(
                            enumerate_weightings(cls, sl.d, sl.W, spec2.weight_rule))
                    else:
                        classes.append(cls)
                from .complexes import Basis
                classes.sort(key=lambda c: c.key)
                cached = Basis(sl, classes)
            else:
                cached = basis(sl)
                diskcache.store_basis(root, cached)
        except SliceTooLarge as exc:
            print(f"slice too large; partial count {exc.partial_count}",
                  file=sys.stderr)
            return PARTIAL
    elapsed = time.perf_counter() - t0
    for k in cached.keys():
        print(k)
    print(f"count: {len(cached)}")
    if args.timing:
        print(f"elapsed: {elapsed:.3f}s cache: {'hit' if hit else 'miss'}")
    return 0


def cmd_cohomology(args) -> int:
    try:
        get_complex(args.complex)
    except ComplexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    spec = get_complex(args.complex)
    if args.complex == "AuxC":
        if args.w is None:
            print("error: AuxC needs --w", file=sys.stderr)
            return USAGE_ERROR
        rep = cohomology("AuxC", 0, 0, range(1, args.w + 2), W=args.w,
                         seed=args.seed)
    else:
        if spec.weighted and args.W is None:
            print(f"error: {args.complex} needs --W", file=sys.stderr)
            return USAGE_ERROR
        if args.d is None or args.b is None or args.V is None:
            print("error: --d, --b and --V are required", file=sys.stderr)
            return USAGE_ERROR
        rep = cohomology(args.complex, args.d, args.b, _parse_range(args.V),
                         W=args.W, seed=args.seed)
    payload = rep.to_json()
    if args.out:
        Path(args.out).write_text(payload)
    print(payload)
    partial = any(not e.exact for e in rep.table) or not rep.flags.get(
        "prime_agreement", True)
    return PARTIAL if partial else 0


def _print_results(results: list[CheckResult]) -> bool:
    ok = True
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name} {r.detail}")
        ok = ok and r.ok
    return ok


def cmd_verify(args) -> int:
    suites = (["d2", "chainmaps", "mc", "cocycles", "ses", "oracle"]
              if args.suite == "all" else [args.suite])
    results: list[CheckResult] = []
    vmax, bmax = args.V_max, args.b_max
    for suite in suites:
        if suite == "d2":
            for cx in ("dfcGC_ge2", "dcGC", "dcGC_eq"):
                for d in (2, 3):
                    results += verify_d_squared(cx, d, range(bmax + 1), vmax)
            for d in (2, 3):
                results += verify_d_squared("dwGC_star", d, range(3),
                                            min(vmax, 3), W=args.W_cap)
            results += verify_d_squared_aux(6)
        elif suite == "chainmaps":
            for d in (2, 3):
                results += verify_chain_map("i_directed", d, range(bmax + 1), vmax)
                results += verify_chain_map("project_equal", d,
                                            range(bmax + 2), min(vmax, 4))
                results += verify_chain_map("F_wheeled", d, range(3),
                                            min(vmax, 4), W=args.W_cap)
        elif suite == "mc":
            results += mc_bracket_suite(seed=args.seed)
        elif suite == "cocycles":
            results += cocycle_suite(seed=args.seed)
        elif suite == "ses":
            for d in (2, 3):
                for b in range(2, bmax + 2):
                    results += ses_consistency(d, b, range(1, min(vmax, 5) + 1),
                                               seed=args.seed)
        elif suite == "oracle":
            results += oracle_suite()
        else:
            print(f"error: unknown suite {suite!r}", file=sys.stderr)
            return USAGE_ERROR
    ok = _print_results(results)
    if not ok and args.dump:
        Path(args.dump).write_text(json.dumps(
            [dataclasses.asdict(r) for r in results if not r.ok], indent=2))
        print(f"failure dump written to {args.dump}")
    return 0 if ok else 1


def cmd_export(args) -> int:
    try:
        spec = get_complex(args.complex)
    except ComplexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if spec.weighted and args.W is None:
        print(f"error: {args.complex} needs --W", file=sys.stderr)
        return USAGE_ERROR
    root = diskcache.cache_root(args.cache)
    out_dir = Path(args.out_dir) if args.out_dir else root
    for V in _parse_range(args.V):
        sl = GradedSlice(args.complex, args.d, args.b, V, args.W)
        m = cached_diff_matrix(sl)
        d = diskcache.slice_dir(out_dir, sl)
        d.mkdir(parents=True, exist_ok=True)
        diskcache.store_basis(out_dir, cached_basis(sl))
        path = diskcache.store_matrix(out_dir, sl, m)
        print(f"{path} rows={m.rows} cols={m.cols} nnz={m.nnz}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="graphcomplexes",
        description="finite graded slices of graph complexes: bases, "
                    "differentials, cohomology and verification suites",
    )
    ap.add_argument("--cache", help="cache root (default env GRAPHCOMPLEXES_CACHE or ./cache)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_range=False):
        p.add_argument("--complex", required=True)
        p.add_argument("--d", type=int)
        p.add_argument("--b", type=int)
        p.add_argument("--V", type=(str if with_range else int))
        p.add_argument("--W", type=int)
        p.add_argument("--w", type=int, help="AuxC total weight")
        p.add_argument("--cache", help="cache root")

    pe = sub.add_parser("enumerate", help="list a slice basis")
    common(pe)
    pe.add_argument("--constraints", help="comma list of overrides, e.g. no_tadpoles,min_valency=3")
    pe.add_argument("--timing", action="store_true")

    pc = sub.add_parser("cohomology", help="cohomology dimension report")
    common(pc, with_range=True)
    pc.add_argument("--out", help="write the JSON report here")
    pc.add_argument("--seed", type=int, default=DEFAULT_SEED)

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("--suite", default="all",
                    choices=["d2", "chainmaps", "mc", "cocycles", "ses",
                             "oracle", "all"])
    pv.add_argument("--V-max", dest="V_max", type=int, default=5)
    pv.add_argument("--b-max", dest="b_max", type=int, default=3)
    pv.add_argument("--W-cap", dest="W_cap", type=int, default=5)
    pv.add_argument("--seed", type=int, default=DEFAULT_SEED)
    pv.add_argument("--jobs", type=int, default=1,
                    help="worker processes for independent slices")
    pv.add_argument("--dump", help="write failing checks to this JSON file")

    px = sub.add_parser("export", help="dump differential matrices (MatrixMarket)")
    common(px, with_range=True)
    px.add_argument("--out-dir", help="target directory (default: cache root)")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "enumerate":
            return cmd_enumerate(args)
        if args.command == "cohomology":
            return cmd_cohomology(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "export":
            return cmd_export(args)
    except (ComplexError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except SliceTooLarge as exc:
        print(f"slice too large; partial count {exc.partial_count}",
              file=sys.stderr)
        return PARTIAL
    return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
