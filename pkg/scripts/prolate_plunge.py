"""Plunge counts of discrete prolate concentration operators over a ladder of lengths.

    python3 scripts/prolate_plunge.py --lengths 64,128,256 --delta 0.1
"""
import argparse
from dataclasses import dataclass

from speclab.io import write_table
from speclab.prolate import plunge_study


@dataclass
class Settings:
    lengths: str = "64,128,256"
    sizes: str = ""
    delta: float = 0.1
    fraction: float = 0.25
    out: str = ""


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Settings()).items():
        p.add_argument("--" + name, type=type(default), default=default)
    return Settings(**vars(p.parse_args()))


def main(s):
    lengths = [int(v) for v in s.lengths.split(",")]
    sizes = [int(v) for v in s.sizes.split(",")] if s.sizes else None
    rows, fit = plunge_study(lengths, sizes, s.delta, s.fraction, workers=len(lengths))
    for r in rows:
        print(f"L={r.L:5d} |I|=|J|={r.size_I:4d} trace {r.trace:8.2f} count(1/2) {r.count_half:4d} "
              f"plunge {r.plunge:3d} plunge/trace {r.plunge / r.trace:.4f}")
    print(f"fit plunge ~ log(trace): slope {fit.slope:.4g}, intercept {fit.intercept:.4g}, "
          f"R^2 {fit.r2:.4g}")
    if s.out:
        write_table(s.out, ("L", "size_I", "size_J", "trace", "count_half", "plunge",
                            "log_regressor"),
                    [(r.L, r.size_I, r.size_J, r.trace, r.count_half, r.plunge, r.log_regressor)
                     for r in rows])


if __name__ == "__main__":
    main(parse_args())
