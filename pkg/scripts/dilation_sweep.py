"""Spectral deviation of a Gabor multiplier on dilates R*disk against the perimeter.

    python3 scripts/dilation_sweep.py --length 64 --radius 3 --factors 1,2,3,4
"""
import argparse
from dataclasses import dataclass

from speclab.gabor import build_gabor_frame, gabor_spectrum, tf_mask
from speclab.io import write_table
from speclab.lattice import continuous_perimeter, disk
from speclab.spectral import count_above, hankel_schatten


@dataclass
class Settings:
    length: int = 64
    shift: int = 2
    mod: int = 2
    radius: float = 3.0
    factors: str = "1,2,3,4"
    delta: float = 0.5
    window: str = "gauss"
    out: str = ""


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Settings()).items():
        p.add_argument("--" + name, type=type(default), default=default)
    return Settings(**vars(p.parse_args()))


def main(s):
    L = s.length
    system = build_gabor_frame(L, s.shift, s.mod, s.window)
    base = disk((L / 2, L / 2), s.radius)
    rows = []
    for R in (float(v) for v in s.factors.split(",")):
        shape = base.dilated(R)
        mask = tf_mask(shape, L, s.shift, s.mod)
        prof = gabor_spectrum(system, mask)
        mu = system.frame.measure(mask)
        per = continuous_perimeter(shape)
        dev = abs(count_above(prof, s.delta) - mu)
        hs2 = hankel_schatten(prof, 2)
        rows.append((R, per, len(mask), mu, dev, hs2, dev / per))
        print(f"R={R:g}: perimeter {per:7.2f} mu {mu:8.3f} deviation {dev:6.3f} "
              f"|H|_S2^2 {hs2:7.3f} deviation/perimeter {dev / per:.4f}")
    if s.out:
        write_table(s.out, ("factor", "perimeter", "mask_size", "mu_omega", "deviation",
                            "hankel_s2", "deviation_per_perimeter"), rows)


if __name__ == "__main__":
    main(parse_args())
