"""CSV/JSON writers for fields, profiles, plans and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import platform
from pathlib import Path

import numpy as np
import scipy

from .hydro import Grid2D


def versions() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fmt(v) -> str:
    return repr(float(v))


def write_field_csv(path, grid: Grid2D, fields: dict):
    """Columns ``x,y,<name>...``; rows run over l (y index) then k (x index).

    A complex array given alone is written as ``x,y,re,im``.
    """
    names = list(fields)
    arrays = [np.asarray(fields[n]).reshape(grid.shape) for n in names]
    complex_mode = len(arrays) == 1 and np.iscomplexobj(arrays[0])
    header = ["x", "y", "re", "im"] if complex_mode else ["x", "y", *names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for l, y in enumerate(grid.y):
            for k, x in enumerate(grid.x):
                if complex_mode:
                    v = arrays[0][l, k]
                    w.writerow([_fmt(x), _fmt(y), _fmt(v.real), _fmt(v.imag)])
                else:
                    w.writerow([_fmt(x), _fmt(y), *(_fmt(a[l, k]) for a in arrays)])


def read_field_csv(path, grid: Grid2D) -> dict:
    """Inverse of :func:`write_field_csv`; complex files come back under ``"psi"``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    if body.shape[0] != grid.N_x * grid.N_y:
        raise ValueError(f"{path}: expected {grid.N_x * grid.N_y} rows, got {body.shape[0]}")
    if header == ["x", "y", "re", "im"]:
        return {"psi": (body[:, 2] + 1j * body[:, 3]).reshape(grid.shape)}
    return {name: body[:, i + 2].reshape(grid.shape) for i, name in enumerate(header[2:])}


def write_table_csv(path, columns: dict):
    """Equal-length 1-D columns, one row per index."""
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    if len({c.shape[0] for c in cols}) > 1:
        raise ValueError("columns differ in length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def write_rows_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def read_rows_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def write_results_csv(path, estimates, plan_bases):
    """Measurement results as ``basis,string,estimate,stderr``."""
    rows = [(plan_bases[b], s, m, e) for s, b, m, e in
            zip(estimates.strings, estimates.basis_of, estimates.mean, estimates.stderr)]
    write_rows_csv(path, ["basis", "string", "estimate", "stderr"], rows)


def write_manifest(out_dir, config: dict, seed, extra=None):
    """``manifest.json`` listing every file in ``out_dir`` with its digest."""
    out_dir = Path(out_dir)
    files = {p.relative_to(out_dir).as_posix(): file_digest(p)
             for p in sorted(out_dir.rglob("*")) if p.is_file() and p.name != "manifest.json"}
    manifest = {"config": config, "config_hash": config_hash(config), "seed": seed,
                "versions": versions(), "files": files}
    if extra:
        manifest.update(extra)
    write_json(out_dir / "manifest.json", manifest)
    return manifest
