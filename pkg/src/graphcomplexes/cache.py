"""Disk cache for bases and assembled differential matrices.

Layout: ``<root>/<complex>/<d>/<b>/<V>[/<W>]/`` holding ``basis.txt`` (one
canonical key per line, in basis order), ``dmatrix.mtx`` (the differential
out of this slice, MatrixMarket coordinate integer) and ``manifest.json``
with counts, checksums and a version stamp.  A cache entry is valid only if
its version stamp matches; the canonical textual graph format is the key.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Optional

from .complexes import Basis, GradedSlice, StringClass, get_complex
from .graphs import OrientedClass, parse_key
from .linalg import SparseIntMatrix, read_matrix_market, write_matrix_market

CACHE_VERSION = 1
ENV_VAR = "GRAPHCOMPLEXES_CACHE"


def cache_root(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get(ENV_VAR, "cache"))


def slice_dir(root: Path, sl: GradedSlice) -> Path:
    parts = [sl.complex, str(sl.d), str(sl.b), str(sl.V)]
    if sl.W is not None:
        parts.append(str(sl.W))
    return root.joinpath(*parts)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def store_basis(root: Path, bas: Basis) -> Path:
    d = slice_dir(root, bas.slice)
    d.mkdir(parents=True, exist_ok=True)
    body = "".join(k + "\n" for k in bas.keys())
    (d / "basis.txt").write_text(body)
    manifest = _load_manifest(d)
    manifest["basis"] = {
        "count": len(bas),
        "sha256": _sha256(d / "basis.txt"),
    }
    _write_manifest(d, manifest)
    return d / "basis.txt"


def load_basis(root: Path, sl: GradedSlice) -> Optional[Basis]:
    d = slice_dir(root, sl)
    f = d / "basis.txt"
    manifest = _load_manifest(d)
    if not f.exists() or "basis" not in manifest:
        return None
    if manifest.get("version") != CACHE_VERSION:
        return None
    if manifest["basis"]["sha256"] != _sha256(f):
        return None
    keys = [line for line in f.read_text().splitlines() if line]
    spec = get_complex(sl.complex)
    classes = []
    for key in keys:
        if sl.complex == "AuxC":
            body = key.split(";S=[")[1].rstrip("]")
            weights = tuple(int(x) for x in body.split(",")) if body else ()
            classes.append(StringClass(weights))
        else:
            g, dd = parse_key(key, directed=spec.directed)
            classes.append(OrientedClass(g, dd, False))
    return Basis(sl, classes)


def store_matrix(root: Path, sl: GradedSlice, m: SparseIntMatrix) -> Path:
    d = slice_dir(root, sl)
    d.mkdir(parents=True, exist_ok=True)
    path = d / "dmatrix.mtx"
    write_matrix_market(m, str(path))
    manifest = _load_manifest(d)
    manifest["dmatrix"] = {
        "rows": m.rows, "cols": m.cols, "nnz": m.nnz,
        "sha256": _sha256(path),
    }
    _write_manifest(d, manifest)
    return path


def load_matrix(root: Path, sl: GradedSlice) -> Optional[SparseIntMatrix]:
    d = slice_dir(root, sl)
    path = d / "dmatrix.mtx"
    manifest = _load_manifest(d)
    if not path.exists() or "dmatrix" not in manifest:
        return None
    if manifest.get("version") != CACHE_VERSION:
        return None
    if manifest["dmatrix"]["sha256"] != _sha256(path):
        return None
    return read_matrix_market(str(path))


def _load_manifest(d: Path) -> dict:
    f = d / "manifest.json"
    if f.exists():
        try:
            m = json.loads(f.read_text())
            if m.get("version") == CACHE_VERSION:
                return m
        except json.JSONDecodeError:
            pass
    return {"version": CACHE_VERSION}


def _write_manifest(d: Path, manifest: dict) -> None:
    manifest["version"] = CACHE_VERSION
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
