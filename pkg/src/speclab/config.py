"""Line-oriented experiment configs: ``key = value`` with ``#`` comments.

Parsing collects every problem before failing.  ``serialize`` writes every key
used by the experiment kind (defaults included) in sorted order, so
``serialize(parse_config(serialize(c)))`` is a fixed point.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import ConfigError, InputError, ParseError, ValidationError

KINDS = ("spectrum", "refine", "dilate", "mixed", "prolate", "prolate-study", "bounds")
_ALL = KINDS
_GABOR = ("spectrum", "dilate", "bounds")
_REQUIRED = object()


# -- value parsers -------------------------------------------------------------


def _pos_int(s):
    v = int(s)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def _seed(s):
    v = int(s)
    if v < 0:
        raise ValueError("must be an unsigned integer")
    return v


def _pos_float(s):
    v = float(s)
    if not v > 0:
        raise ValueError("must be positive")
    return v


def _float_list(s):
    vals = [float(t) for t in s.replace(";", ",").split(",") if t.strip()]
    if not vals:
        raise ValueError("empty list")
    return tuple(vals)


def _int_list(s):
    vals = tuple(_pos_int(t) for t in s.split(",") if t.strip())
    if not vals:
        raise ValueError("empty list")
    return vals


def _deltas(s):
    vals = _float_list(s)
    bad = [v for v in vals if not 0 < v < 1]
    if bad:
        raise ValueError(f"values {bad} are not strictly inside (0, 1)")
    return tuple(sorted(set(vals)))


def _interval(s):
    vals = tuple(int(t) for t in s.split(","))
    if len(vals) != 2:
        raise ValueError("expected 'start,stop'")
    if vals[1] <= vals[0]:
        raise ValueError("interval is empty")
    return vals


def _ladder(s):
    rungs = []
    for part in s.split(";"):
        if not part.strip():
            continue
        a, b = (_pos_int(t) for t in part.split(","))
        rungs.append((a, b))
    if not rungs:
        raise ValueError("empty ladder")
    return tuple(rungs)


def _delta_half(s):
    v = float(s)
    if not 0 < v < 0.5:
        raise ValueError("must lie in (0, 1/2)")
    return v


def _fraction(s):
    v = float(s)
    if not 0 < v <= 1:
        raise ValueError("must lie in (0, 1]")
    return v


def _text(s):
    if not s:
        raise ValueError("empty value")
    return s


def _kind(s):
    if s not in KINDS:
        raise ValueError(f"unknown experiment kind {s!r} (expected one of {', '.join(KINDS)})")
    return s


def _show_list(vals):
    return ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in vals)


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    kinds: tuple = _ALL
    default: Any = _REQUIRED
    show: Callable[[Any], str] = str


FIELDS = {
    "kind": Field(_kind),
    "out": Field(_text),
    "deltas": Field(_deltas, default=(0.1, 0.5, 0.9), show=_show_list),
    "s_grid": Field(_float_list, default=None, show=_show_list),
    "seed": Field(_seed, default=0),
    "length": Field(_pos_int, kinds=("spectrum", "refine", "dilate", "mixed", "prolate", "bounds")),
    "shift": Field(_pos_int, kinds=_GABOR, default=1),
    "mod": Field(_pos_int, kinds=_GABOR, default=1),
    "window": Field(_text, kinds=_GABOR + ("refine",), default="gauss"),
    "domain": Field(_text, kinds=_GABOR + ("refine", "mixed")),
    "frame": Field(_text, kinds=("spectrum", "bounds"), default=None),
    "ladder": Field(_ladder, kinds=("refine",),
                    show=lambda v: ";".join(f"{a},{b}" for a, b in v)),
    "factors": Field(_float_list, kinds=("dilate",), show=_show_list),
    "windows": Field(_text, kinds=("mixed",)),
    "weights": Field(_text, kinds=("mixed",)),
    "freq": Field(_interval, kinds=("prolate",), show=_show_list),
    "time": Field(_interval, kinds=("prolate",), show=_show_list),
    "lengths": Field(_int_list, kinds=("prolate-study",), show=_show_list),
    "sizes": Field(_int_list, kinds=("prolate-study",), default=None, show=_show_list),
    "delta": Field(_delta_half, kinds=("prolate-study",), default=0.1, show=repr),
    "fraction": Field(_fraction, kinds=("prolate-study",), default=0.25, show=repr),
    "gamma": Field(_pos_float, kinds=("bounds",), default=None, show=repr),
    "alpha": Field(_pos_float, kinds=("bounds",), default=1.0, show=repr),
    "beta": Field(_pos_float, kinds=("bounds",), default=2.0, show=repr),
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    out: str
    deltas: tuple
    s_grid: tuple | None
    seed: int
    params: dict = field(default_factory=dict)
    base_dir: Path = field(default=Path("."), compare=False)

    def get(self, key):
        if key in ("kind", "out", "deltas", "s_grid", "seed"):
            return getattr(self, key)
        return self.params.get(key)

    def resolve(self, path):
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def out_prefix(self):
        return self.resolve(self.out)

    def echo(self):
        """Config as a plain dict of canonical strings (what ``serialize`` writes)."""
        out = {}
        for key in sorted(FIELDS):
            f = FIELDS[key]
            if self.kind not in f.kinds:
                continue
            v = self.get(key)
            if v is not None:
                out[key] = f.show(v)
        return out


def _tokenize(text):
    raw, errors = {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            errors.append(ParseError(lineno, f"expected 'key = value', got {body!r}"))
        elif key in raw:
            errors.append(ParseError(lineno, f"duplicate key {key!r}"))
        else:
            raw[key] = (lineno, value)
    return raw, errors


def _file_refs(key, value):
    """Paths a value points at (``@path`` forms)."""
    if key == "domain":
        if value.startswith("@"):
            return [value[1:]]
        if value.startswith("poly:@"):
            return [value[6:]]
    elif key == "window" and value.startswith("file:@"):
        return [value[6:]]
    elif key in ("frame", "weights", "windows"):
        v = value[5:] if value.startswith("file:") else value
        if v.startswith("@"):
            return [v[1:]]
    return []


def _check_value(key, value):
    """Syntax checks for string-valued fields that parse lazily."""
    if key == "domain" and not value.startswith("@"):
        from .shapes import parse_shape

        parse_shape(value, check_files=False)
    elif key == "window":
        name, _, arg = value.partition(":")
        if name == "boxcar":
            _pos_int(arg)
        elif not (value == "gauss" or value.startswith("file:@")):
            raise ValueError("expected gauss, boxcar:w or file:@path")
    elif key == "windows" and not (value.startswith("@") or value.startswith("file:@")):
        name, _, arg = value.partition(":")
        if name != "hermite":
            raise ValueError("expected hermite:n or @path")
        _pos_int(arg)
    elif key == "frame" and not value.startswith("@"):
        raise ValueError("expected @path")
    elif key == "weights" and not value.startswith("@"):
        _float_list(value)


def build_config(raw, base_dir=".", lines=None):
    """Validate a ``{key: string}`` mapping; raises ConfigError listing every problem."""
    lines = lines or {}
    base_dir = Path(base_dir)
    errors = []
    kind = raw.get("kind")
    if kind is None:
        errors.append(ValidationError("kind", "missing"))
    elif kind not in KINDS:
        errors.append(ValidationError("kind", f"unknown experiment kind {kind!r}"))
        kind = None
    values = {}
    for key, value in raw.items():
        f = FIELDS.get(key)
        if f is None:
            errors.append(ValidationError(key, "unknown key"))
            continue
        if kind is not None and kind not in f.kinds:
            errors.append(ValidationError(key, f"not used by kind {kind!r}"))
            continue
        try:
            values[key] = f.parse(value)
            _check_value(key, value)
        except (ValueError, InputError) as exc:
            where = f" (line {lines[key]})" if key in lines else ""
            errors.append(ValidationError(key, f"{exc}{where}"))
            continue
        for ref in _file_refs(key, value):
            p = Path(ref)
            if not (p if p.is_absolute() else base_dir / p).is_file():
                errors.append(ValidationError(key, f"file not found: {ref}"))
    if kind is not None:
        for key, f in FIELDS.items():
            if kind in f.kinds and key not in values and key not in raw:
                if f.default is _REQUIRED:
                    if key == "length" and "frame" in raw:
                        continue
                    errors.append(ValidationError(key, "missing"))
                else:
                    values[key] = f.default
        if kind == "dilate" and str(raw.get("domain", "")).startswith("@"):
            errors.append(ValidationError("domain", "dilation needs a shape, not a mask file"))
        if "frame" in raw:
            for key in ("length", "shift", "mod", "window"):
                if key in raw:
                    errors.append(ValidationError(key, "not used with an imported frame"))
    if errors:
        raise ConfigError(errors)
    top = {k: values.pop(k) for k in ("kind", "out", "deltas", "s_grid", "seed")}
    if kind in ("spectrum", "bounds") and values.get("frame") is not None:
        for key in ("length", "shift", "mod", "window"):
            values.pop(key, None)
    return ExperimentConfig(params=dict(sorted(values.items())), base_dir=base_dir, **top)


def parse_config(text, base_dir="."):
    raw, errors = _tokenize(text)
    try:
        cfg = build_config({k: v for k, (_, v) in raw.items()}, base_dir,
                           {k: n for k, (n, _) in raw.items()})
    except ConfigError as exc:
        errors.extend(exc.errors)
        cfg = None
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"), path.parent)


def serialize(config):
    return "".join(f"{k} = {v}\n" for k, v in config.echo().items())


def normalize(text):
    """Canonical form of a config text: explicit keys in sorted order."""
    return serialize(parse_config(text))


def thread_count(n_jobs):
    env = os.environ.get("SPECLAB_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise InputError(f"SPECLAB_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise InputError("SPECLAB_THREADS must be >= 1")
        return max(1, min(cap, n_jobs))
    return max(1, n_jobs)
