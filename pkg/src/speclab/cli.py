"""Command-line entry point: one subcommand per experiment kind plus ``run --config``.

Exit codes: 0 success, 1 numerical failure, 2 not a frame, 3 input error.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import KINDS, build_config, load_config, thread_count
from .errors import ConfigError, InputError, SpeclabError
from .runner import execute

# flag name -> config key, per subcommand
_COMMON = {"out": "out", "deltas": "deltas", "s_grid": "s_grid", "seed": "seed"}
_GABOR = {"length": "length", "shift": "shift", "mod": "mod", "window": "window", "domain": "domain"}
FLAGS = {
    "spectrum": {**_GABOR, "frame": "frame"},
    "bounds": {**_GABOR, "frame": "frame", "gamma": "gamma", "alpha": "alpha", "beta": "beta"},
    "refine": {"length": "length", "ladder": "ladder", "window": "window", "domain": "domain"},
    "dilate": {**_GABOR, "factors": "factors"},
    "mixed": {"length": "length", "windows": "windows", "weights": "weights", "domain": "domain"},
    "prolate": {"length": "length", "freq": "freq", "time": "time"},
    "prolate-study": {"lengths": "lengths", "sizes": "sizes", "delta": "delta",
                      "fraction": "fraction"},
}
_HELP = {
    "length": "signal length L", "shift": "time step a", "mod": "frequency step b",
    "window": "gauss | boxcar:w | file:@path", "domain": "rect:..., disk:..., poly:@file or @mask",
    "frame": "@file with an imported frame", "ladder": "rungs 'a,b;a,b;...'",
    "factors": "dilation factors 'R1,R2,...'", "windows": "hermite:n or @file",
    "weights": "comma list or @file", "freq": "frequency interval 'k0,k1' (half-open)",
    "time": "time interval 't0,t1' (half-open)", "lengths": "L values 'L1,L2,...'",
    "sizes": "interval sizes 's1,s2,...'", "delta": "plunge threshold in (0, 1/2)",
    "fraction": "interval size as a fraction of L when sizes is absent",
    "gamma": "inflation rate (default: index dimension)", "alpha": "exponential decay rate",
    "beta": "exponential decay power", "out": "output prefix", "deltas": "delta grid",
    "s_grid": "s-grid override", "seed": "random seed",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser():
    p = _Parser(prog="speclab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"speclab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        for flag, key in {**_COMMON, **FLAGS[kind]}.items():
            sp.add_argument("--" + flag.replace("_", "-"), dest=key, help=_HELP.get(flag),
                            required=(flag == "out"))
        sp.add_argument("--force", action="store_true", help="overwrite existing outputs")
    rp = sub.add_parser("run", help="run one or more config files")
    rp.add_argument("--config", nargs="+", required=True)
    rp.add_argument("--force", action="store_true")
    return p


def _report(exc):
    if isinstance(exc, ConfigError):
        for e in exc.errors:
            print(f"error: {e}", file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)
    return exc.exit_code


def _run_one(cfg, force):
    try:
        execute(cfg, force=force)
    except SpeclabError as exc:
        return _report(exc)
    print(f"ok {os.path.normpath(cfg.out_prefix)}")
    return 0


def _run_configs(paths, force):
    cfgs = [load_config(p) for p in paths]
    prefixes = [str(c.out_prefix.resolve()) for c in cfgs]
    if len(set(prefixes)) != len(prefixes):
        raise InputError("two configs share an output prefix")
    workers = thread_count(len(cfgs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            codes = list(pool.map(lambda c: _run_one(c, force), cfgs))
    else:
        codes = [_run_one(c, force) for c in cfgs]
    return max(codes)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise InputError("missing subcommand (try --help)")
        if args.command == "run":
            return _run_configs(args.config, args.force)
        raw = {"kind": args.command}
        for key in {**_COMMON, **FLAGS[args.command]}.values():
            v = getattr(args, key)
            if v is not None:
                raw[key] = v
        return _run_one(build_config(raw), args.force)
    except SpeclabError as exc:
        return _report(exc)


if __name__ == "__main__":
    sys.exit(main())
