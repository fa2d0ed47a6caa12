"""Text formats: masks, polygons, frames, weights, and the CSV/JSON artifacts."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError


def _lines(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"file not found: {path}")
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _ints(path, lineno, line):
    try:
        return [int(t) for t in line.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"{path}:{lineno}: expected integers, got {line!r}") from None


def read_mask(path):
    """Mask file: header ``d W [H]`` then one integer coordinate tuple per line.

    Returns ``(extents, points)``; every coordinate must satisfy ``0 <= k_i < extent_i``.
    """
    rows = list(_lines(path))
    if not rows:
        raise InputError(f"{path}: empty mask file")
    head = _ints(path, *rows[0])
    if len(head) < 2 or head[0] not in (1, 2) or len(head) != head[0] + 1:
        raise InputError(f"{path}:{rows[0][0]}: header must be 'd W [H]'")
    d, ext = head[0], np.array(head[1:], dtype=np.int64)
    if np.any(ext < 1):
        raise InputError(f"{path}: extents must be positive")
    pts = []
    for lineno, line in rows[1:]:
        k = _ints(path, lineno, line)
        if len(k) != d:
            raise InputError(f"{path}:{lineno}: expected {d} coordinates")
        if any(v < 0 or v >= e for v, e in zip(k, ext)):
            raise InputError(f"{path}:{lineno}: point {tuple(k)} outside the extents")
        pts.append(k)
    return tuple(int(e) for e in ext), np.array(pts, dtype=np.int64).reshape(-1, d)


def read_polygon(path):
    """Polygon CSV: one ``x,y`` vertex per line."""
    verts = []
    for lineno, line in _lines(path):
        try:
            x, y = (float(t) for t in line.replace(",", " ").split())
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected 'x,y'") from None
        verts.append((x, y))
    return verts


def read_frame(path):
    """Frame file: header ``M n`` then per vector its index coordinates and M ``re im`` pairs.

    The index dimension is whatever is left over on each line.  Returns
    ``(points, vectors)``.
    """
    rows = list(_lines(path))
    if not rows:
        raise InputError(f"{path}: empty frame file")
    head = _ints(path, *rows[0])
    if len(head) != 2 or min(head) < 1:
        raise InputError(f"{path}: header must be 'M n_vectors'")
    M, n = head
    if len(rows) - 1 != n:
        raise InputError(f"{path}: header promises {n} vectors, found {len(rows) - 1}")
    pts, vecs, dims = [], [], set()
    for lineno, line in rows[1:]:
        tok = line.split()
        d = len(tok) - 2 * M
        if d < 1:
            raise InputError(f"{path}:{lineno}: too few entries for M = {M}")
        dims.add(d)
        try:
            pts.append([int(t) for t in tok[:d]])
            vals = np.array([float(t) for t in tok[d:]]).reshape(M, 2)
        except ValueError:
            raise InputError(f"{path}:{lineno}: malformed entry") from None
        vecs.append(vals[:, 0] + 1j * vals[:, 1])
    if len(dims) != 1:
        raise InputError(f"{path}: index dimension varies between lines")
    return np.array(pts, dtype=np.int64), np.array(vecs)


def write_frame(path, points, vectors):
    vectors = np.asarray(vectors)
    lines = [f"{vectors.shape[1]} {vectors.shape[0]}"]
    for k, v in zip(np.asarray(points), vectors):
        coords = " ".join(str(int(c)) for c in np.atleast_1d(k))
        vals = " ".join(f"{fmt(z.real)} {fmt(z.imag)}" for z in v)
        lines.append(f"{coords} {vals}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_weights(path):
    vals = []
    for lineno, line in _lines(path):
        try:
            vals.append(complex(line))
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected a number") from None
    return np.array(vals)


def fmt(x):
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def write_table(path, header, rows):
    out = [",".join(header)]
    out += [",".join(_cell(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def write_eigs(path, eigenvalues):
    write_table(path, ("index", "eigenvalue"), enumerate(np.asarray(eigenvalues, dtype=float)))


def read_eigs(path):
    rows = Path(path).read_text().splitlines()[1:]
    return np.array([float(r.split(",")[1]) for r in rows])


def write_json(path, obj):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n",
                          encoding="utf-8")
