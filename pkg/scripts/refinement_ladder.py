"""Gabor multiplier counts on a fixed disk while the lattice is refined.

    python3 scripts/refinement_ladder.py --length 64 --radius 12 --ladder "4,4;2,2;1,1"
"""
import argparse
from dataclasses import dataclass

from speclab.gabor import refinement_study
from speclab.io import write_table
from speclab.lattice import continuous_perimeter, disk


@dataclass
class Settings:
    length: int = 64
    radius: float = 12.0
    ladder: str = "4,4;2,2;1,1"
    deltas: str = "0.1,0.5,0.9"
    window: str = "gauss"
    out: str = ""


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Settings()).items():
        p.add_argument("--" + name, type=type(default), default=default)
    return Settings(**vars(p.parse_args()))


def main(s):
    L = s.length
    shape = disk((L / 2, L / 2), s.radius)
    ladder = [tuple(int(v) for v in step.split(",")) for step in s.ladder.split(";")]
    deltas = [float(d) for d in s.deltas.split(",")]
    rungs = refinement_study(s.window, shape, L, ladder, deltas, workers=len(ladder))
    budget = max(2.0, 0.1 * continuous_perimeter(shape))
    print(f"L={L} disk radius {s.radius}: count-change budget {budget:.2f}")
    rows = []
    for r in rungs:
        if not r.frame_ok:
            print(f"  ({r.a},{r.b}) not a frame: {r.error}")
            continue
        for d in deltas:
            rows.append((r.a, r.b, r.mask_size, r.mu_omega, d, r.counts[d], r.deviation(d),
                         r.plunges[d], r.n_of_s[2.0]))
            print(f"  ({r.a},{r.b}) delta={d}: count {r.counts[d]}, mu {r.mu_omega:.4f}, "
                  f"deviation {r.deviation(d):.4f}, N(2) {r.n_of_s[2.0]:.4f}")
    if s.out:
        write_table(s.out, ("a", "b", "mask_size", "mu_omega", "delta", "count", "deviation",
                            "plunge", "N_s2"), rows)


if __name__ == "__main__":
    main(parse_args())
