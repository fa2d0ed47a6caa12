"""Dispatch validated configs to the numerical modules and write the run artifacts.

Every run writes ``<prefix>.eigs.csv``, ``<prefix>.summary.json`` and
``<prefix>.timing.json``; study kinds add their tables and per-configuration
eigenvalue files.  Everything except the timing sidecar is a deterministic
function of the config.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import bound_report, kernel_from_frame, kernel_from_gabor
from .errors import InputError, NotAFrame
from .frames import FrameSystem, multiplier_hermitian
from .gabor import (build_gabor_frame, gabor_spectrum, make_windows, mixed_state_multiplier,
                    refinement_study, tf_mask)
from .io import read_frame, read_mask, read_weights, write_eigs, write_json, write_table
from .lattice import (DiscreteDomain, LatticeSpec, continuous_perimeter, inflation_constant,
                      isotropic_fineness, lattice_perimeter)
from .prolate import plunge_study, prolate_operator
from .shapes import parse_shape
from .spectral import (SpectralProfile, count_above, hankel_schatten, hermitian_eigenvalues,
                       plunge_count, tau)

SUMMARY_KEYS = ("bounds", "config", "counts", "deviations", "dimension", "geometry", "hankel",
                "kind", "mu_omega", "plunges", "study", "trace", "version")
HANKEL_P = {"S2": 2.0, "S1": 1.0, "S1/2": 0.5}


def dkey(delta):
    return repr(float(delta))


@dataclass
class RunResult:
    summary: dict
    files: dict = field(default_factory=dict)  # suffix -> writer
    wall_seconds: float = 0.0


def _plunge(profile, delta):
    d = min(delta, 1 - delta)
    return None if d >= 0.5 else plunge_count(profile, d)


def _functionals(profile, mu, deltas):
    counts = {dkey(d): count_above(profile, d) for d in deltas}
    return {
        "counts": counts,
        "deviations": {dkey(d): abs(counts[dkey(d)] - mu) for d in deltas},
        "plunges": {dkey(d): _plunge(profile, d) for d in deltas},
        "hankel": {k: hankel_schatten(profile, p) for k, p in HANKEL_P.items()},
        "trace": float(profile.trace),
        "dimension": int(profile.dimension),
        "mu_omega": float(mu),
    }


def _geometry(mask, gamma):
    return {
        "gamma": float(gamma),
        "inflation_constant": inflation_constant(mask, gamma),
        "isotropic_fineness": isotropic_fineness(mask.lattice),
        "lattice_perimeter": lattice_perimeter(mask),
        "mask_size": len(mask),
    }


def _window_spec(cfg, spec):
    if spec.startswith("file:@"):
        return "file:@" + str(cfg.resolve(spec[6:]))
    return spec


def _tf_domain(cfg, L, a, b):
    spec = cfg.get("domain")
    if spec.startswith("@"):
        ext, pts = read_mask(cfg.resolve(spec[1:]))
        if len(ext) != 2:
            raise InputError("TF masks are two-dimensional")
        if ext[0] > L // a or ext[1] > L // b:
            raise InputError(f"mask extents {ext} exceed the lattice torus ({L // a}, {L // b})")
        return DiscreteDomain.from_points(LatticeSpec.diagonal(a, b), pts, mass=a * b / L,
                                          period=(L // a, L // b))
    return tf_mask(parse_shape(spec, cfg.base_dir), L, a, b)


def _imported(cfg):
    pts, vecs = read_frame(cfg.resolve(cfg.get("frame")[1:]))
    d = pts.shape[1]
    frame = FrameSystem.from_points(LatticeSpec.identity(d), pts, vecs, mass=1.0)
    frame.require_frame()
    spec = cfg.get("domain")
    if spec.startswith("@"):
        _, mpts = read_mask(cfg.resolve(spec[1:]))
        if mpts.shape[1] != d:
            raise InputError("mask and frame index dimensions differ")
    else:
        shape = parse_shape(spec, cfg.base_dir)
        if shape.dim != d:
            raise InputError("shape and frame index dimensions differ")
        mpts = frame.index.points[shape.contains(frame.index.ambient)]
    mask = DiscreteDomain.from_points(frame.index.lattice, mpts, mass=1.0)
    frame.mask_rows(mask)
    return frame, mask


def _concentration(cfg):
    """Frame (Gabor or imported), mask, profile and kernel for spectrum/bounds runs."""
    if cfg.get("frame") is not None:
        frame, mask = _imported(cfg)
        prof = hermitian_eigenvalues(multiplier_hermitian(frame, mask))
        return frame, mask, prof, (lambda: kernel_from_frame(frame))
    L, a, b = cfg.get("length"), cfg.get("shift"), cfg.get("mod")
    system = build_gabor_frame(L, a, b, _window_spec(cfg, cfg.get("window")))
    mask = _tf_domain(cfg, L, a, b)
    return system.frame, mask, gabor_spectrum(system, mask), (lambda: kernel_from_gabor(system))


def _base(cfg, prof, mu, geometry=None, bounds=None, study=None):
    out = {"kind": cfg.kind, "config": cfg.echo(), "version": __version__,
           "geometry": geometry, "bounds": bounds, "study": study}
    out.update(_functionals(prof, mu, cfg.deltas))
    return out


def _eigs_writer(values):
    return lambda path: write_eigs(path, values)


def _run_spectrum(cfg):
    frame, mask, prof, _ = _concentration(cfg)
    gamma = float(mask.dim)
    summary = _base(cfg, prof, frame.measure(mask), _geometry(mask, gamma))
    return summary, {".eigs.csv": _eigs_writer(prof.eigenvalues)}


def _run_bounds(cfg):
    frame, mask, prof, make_kernel = _concentration(cfg)
    gamma = cfg.get("gamma") or float(mask.dim)
    geom = _geometry(mask, gamma)
    kernel = make_kernel()
    reports = {}
    for d in cfg.deltas:
        rep = bound_report(kernel, mask, geom["inflation_constant"], gamma, tau(d),
                           cfg.s_grid, geom["lattice_perimeter"], cfg.get("alpha"), cfg.get("beta"))
        reports[dkey(d)] = rep.to_dict()
    summary = _base(cfg, prof, frame.measure(mask), geom, reports)
    return summary, {".eigs.csv": _eigs_writer(prof.eigenvalues)}


def _run_dilate(cfg):
    L, a, b = cfg.get("length"), cfg.get("shift"), cfg.get("mod")
    system = build_gabor_frame(L, a, b, _window_spec(cfg, cfg.get("window")))
    shape = parse_shape(cfg.get("domain"), cfg.base_dir)
    files, rows, study = {}, [], []
    for k, R in enumerate(cfg.get("factors")):
        mask = tf_mask(shape.dilated(R), L, a, b)
        prof = gabor_spectrum(system, mask)
        mu = system.frame.measure(mask)
        per = continuous_perimeter(shape.dilated(R))
        f = _functionals(prof, mu, cfg.deltas)
        for d in cfg.deltas:
            rows.append((R, per, len(mask), mu, d, f["counts"][dkey(d)],
                         f["deviations"][dkey(d)], f["plunges"][dkey(d)]))
        files[f".R{k}.eigs.csv"] = _eigs_writer(prof.eigenvalues)
        study.append({"factor": R, "perimeter": per, "mask_size": len(mask),
                      "eigs_file": f".R{k}.eigs.csv", **{k2: f[k2] for k2 in
                      ("counts", "deviations", "plunges", "mu_omega", "trace")}})
    header = ("factor", "perimeter", "mask_size", "mu_omega", "delta", "count", "deviation", "plunge")
    files[".dilate.csv"] = lambda path: write_table(path, header, rows)
    files[".eigs.csv"] = _eigs_writer(prof.eigenvalues)
    summary = _base(cfg, prof, mu, _geometry(mask, 2.0), study={"factors": study})
    return summary, files


def _run_refine(cfg):
    L = cfg.get("length")
    spec = cfg.get("domain")
    if spec.startswith("@"):
        raise InputError("refinement needs a continuous shape for the domain")
    shape = parse_shape(spec, cfg.base_dir)
    rungs = refinement_study(_window_spec(cfg, cfg.get("window")), shape, L,
                             cfg.get("ladder"), cfg.deltas)
    budget = max(2.0, 0.1 * continuous_perimeter(shape))
    files, rows, study = {}, [], []
    s_cols = sorted({s for r in rungs for s in r.n_of_s})
    last = None
    for k, r in enumerate(rungs):
        entry = {"a": r.a, "b": r.b, "frame_ok": r.frame_ok, "error": r.error}
        if r.frame_ok:
            entry.update(mask_size=r.mask_size, mu_omega=r.mu_omega,
                         counts={dkey(d): c for d, c in r.counts.items()},
                         deviations={dkey(d): r.deviation(d) for d in r.counts},
                         plunges={dkey(d): p for d, p in r.plunges.items()},
                         N_of_s={repr(s): v for s, v in r.n_of_s.items()},
                         eigs_file=f".rung{k}.eigs.csv")
            files[f".rung{k}.eigs.csv"] = _eigs_writer(r.eigenvalues)
            last = r
        study.append(entry)
        for d in cfg.deltas:
            if r.frame_ok:
                rows.append((k, r.a, r.b, True, r.mask_size, r.mu_omega, d, r.counts[d],
                             r.deviation(d), r.plunges[d], *[r.n_of_s[s] for s in s_cols]))
            else:
                rows.append((k, r.a, r.b, False, None, None, d, None, None, None,
                             *[None for _ in s_cols]))
    if last is None:
        raise NotAFrame("no rung of the ladder is a frame")
    header = ("rung", "a", "b", "frame_ok", "mask_size", "mu_omega", "delta", "count",
              "deviation", "plunge", *[f"N_s{s:g}" for s in s_cols])
    files[".refine.csv"] = lambda path: write_table(path, header, rows)
    prof = SpectralProfile.from_values(last.eigenvalues)
    files[".eigs.csv"] = _eigs_writer(prof.eigenvalues)
    ok = [r for r in rungs if r.frame_ok]
    changes = {dkey(d): [abs(x.counts[d] - y.counts[d]) for x, y in zip(ok, ok[1:])]
               for d in cfg.deltas}
    study = {"rungs": study, "stability_budget": budget, "count_changes": changes}
    mask = tf_mask(shape, L, last.a, last.b)
    return _base(cfg, prof, last.mu_omega, _geometry(mask, 2.0), study=study), files


def _run_mixed(cfg):
    L = cfg.get("length")
    spec = cfg.get("windows")
    if spec.startswith("@") or spec.startswith("file:@"):
        spec = "@" + str(cfg.resolve(spec.split("@", 1)[1]))
    windows = make_windows(spec, L)
    wspec = cfg.get("weights")
    if wspec.startswith("@"):
        weights = read_weights(cfg.resolve(wspec[1:]))
    else:
        weights = np.array([float(t) for t in wspec.split(",")])
    mask = _tf_domain(cfg, L, 1, 1)
    prof = hermitian_eigenvalues(mixed_state_multiplier(windows, weights, mask))
    summary = _base(cfg, prof, len(mask) / L, _geometry(mask, 2.0))
    return summary, {".eigs.csv": _eigs_writer(prof.eigenvalues)}


def _interval_domain(L, J):
    pts = (np.arange(J[0], J[1]) % L)[:, None]
    return DiscreteDomain.from_points(LatticeSpec.identity(1), pts, mass=1.0, period=(L,))


def _run_prolate(cfg):
    L = cfg.get("length")
    inst = prolate_operator(L, cfg.get("freq"), cfg.get("time"))
    prof = inst.profile
    geom = _geometry(_interval_domain(L, inst.J), 1.0)
    summary = _base(cfg, prof, inst.trace, geom)
    return summary, {".eigs.csv": _eigs_writer(prof.eigenvalues)}


def _run_prolate_study(cfg):
    delta = cfg.get("delta")
    rows, fit = plunge_study(cfg.get("lengths"), cfg.get("sizes"), delta, cfg.get("fraction"))
    last = rows[-1]
    inst = prolate_operator(last.L, (0, last.size_I), (0, last.size_J))
    header = ("L", "size_I", "size_J", "trace", "count_half", "plunge", "log_regressor")
    table = [(r.L, r.size_I, r.size_J, r.trace, r.count_half, r.plunge, r.log_regressor)
             for r in rows]
    study = {
        "delta": delta,
        "fit": {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2},
        "rows": [dict(zip(header, row)) for row in table],
        "plunge_per_trace": [r.plunge / r.trace for r in rows],
    }
    files = {".study.csv": lambda path: write_table(path, header, table),
             ".eigs.csv": _eigs_writer(inst.profile.eigenvalues)}
    summary = _base(cfg, inst.profile, inst.trace,
                    _geometry(_interval_domain(last.L, inst.J), 1.0), study=study)
    return summary, files


DISPATCH = {
    "spectrum": _run_spectrum,
    "bounds": _run_bounds,
    "dilate": _run_dilate,
    "refine": _run_refine,
    "mixed": _run_mixed,
    "prolate": _run_prolate,
    "prolate-study": _run_prolate_study,
}


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if v != v:
            return "nan"
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def run(cfg):
    """Compute everything for one config; nothing is written yet."""
    t0 = time.perf_counter()
    summary, files = DISPATCH[cfg.kind](cfg)
    summary = _json_safe(summary)
    assert tuple(sorted(summary)) == SUMMARY_KEYS, sorted(summary)
    files[".summary.json"] = lambda path: write_json(path, summary)
    return RunResult(summary, files, time.perf_counter() - t0)


def output_paths(prefix, suffixes):
    prefix = Path(prefix)
    return [prefix.parent / (prefix.name + s) for s in suffixes]


def execute(cfg, force=False):
    """Run and write all artifacts; refuses to overwrite existing files unless ``force``."""
    base = (".eigs.csv", ".summary.json", ".timing.json")
    _refuse_existing(output_paths(cfg.out_prefix, base), force)
    result = run(cfg)
    suffixes = sorted(result.files) + [".timing.json"]
    _refuse_existing(output_paths(cfg.out_prefix, suffixes), force)
    cfg.out_prefix.parent.mkdir(parents=True, exist_ok=True)
    for suffix, writer in sorted(result.files.items()):
        writer(output_paths(cfg.out_prefix, [suffix])[0])
    write_json(output_paths(cfg.out_prefix, [".timing.json"])[0],
               {"version": __version__, "wall_seconds": result.wall_seconds})
    return result


def _refuse_existing(paths, force):
    if force:
        return
    taken = [str(p) for p in paths if p.exists()]
    if taken:
        raise InputError(f"refusing to overwrite {', '.join(taken)} (use --force)")
