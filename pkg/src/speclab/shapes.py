"""CLI shape descriptors: ``rect:x0,y0,x1,y1``, ``disk:cx,cy,r``, ``poly:@file.csv``.

One-dimensional forms drop the second coordinate: ``rect:x0,x1`` and ``disk:c,r``.
"""
from __future__ import annotations

from pathlib import Path

from .errors import InputError
from .io import read_polygon
from .lattice import disk, polygon, rectangle


def _numbers(text, what):
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad {what} descriptor {text!r}") from None


def parse_shape(spec, base_dir=".", check_files=True):
    name, sep, arg = str(spec).partition(":")
    if not sep:
        raise InputError(f"shape {spec!r} must look like rect:..., disk:... or poly:@file")
    if name == "rect":
        v = _numbers(arg, "rect")
        if len(v) == 4:
            return rectangle(v[:2], v[2:])
        if len(v) == 2:
            return rectangle(v[:1], v[1:])
        raise InputError("rect needs x0,y0,x1,y1 (or x0,x1 in 1-d)")
    if name == "disk":
        v = _numbers(arg, "disk")
        if len(v) not in (2, 3):
            raise InputError("disk needs cx,cy,r (or c,r in 1-d)")
        return disk(v[:-1], v[-1])
    if name == "poly":
        if not arg.startswith("@"):
            raise InputError("poly needs @file.csv")
        if not check_files:
            return None
        p = Path(arg[1:])
        return polygon(read_polygon(p if p.is_absolute() else Path(base_dir) / p))
    raise InputError(f"unknown shape kind {name!r}")
