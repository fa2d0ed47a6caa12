import numpy as np

from speclab.frames import FrameSystem
from speclab.lattice import DiscreteDomain, LatticeSpec


def random_frame(rng, M, n, d=1):
    """n random complex vectors in C^M on an integer index set of dimension d."""
    vecs = rng.standard_normal((n, M)) + 1j * rng.standard_normal((n, M))
    if d == 1:
        pts = np.arange(n)[:, None]
    else:
        w = int(np.ceil(np.sqrt(n)))
        pts = np.array([(i // w, i % w) for i in range(n)])
    return FrameSystem.from_points(LatticeSpec.identity(d), pts, vecs, mass=1.0)


def random_mask(rng, frame, p=0.4):
    keep = rng.random(len(frame)) < p
    return frame.index.subset(keep)


def domain(points, d=None, lattice=None):
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim == 1:
        pts = pts[:, None]
    lattice = lattice or LatticeSpec.identity(pts.shape[1] if d is None else d)
    return DiscreteDomain.from_points(lattice, pts.reshape(-1, lattice.dim))


def random_blob(rng, d, size, span=None):
    """Random connected-ish subset grown from the origin by random unit steps."""
    span = size if span is None else span
    pts = {(0,) * d}
    frontier = [(0,) * d]
    while len(pts) < size:
        base = frontier[rng.integers(len(frontier))]
        axis, sign = rng.integers(d), rng.choice([-1, 1])
        new = list(base)
        new[axis] = int(np.clip(new[axis] + sign, -span, span))
        new = tuple(new)
        if new not in pts:
            pts.add(new)
            frontier.append(new)
    return np.array(sorted(pts))
