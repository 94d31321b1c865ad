"""Rebuild the reference monostable tetrahedron from its published numbers.

The node coordinates of the built model were published only as a drawing,
so the fixture is reconstructed rather than transcribed.  Unknowns: 12
coordinates (6 shape parameters after rigid motions).  Constraints:

* total volume 668.624 cm^3 and the four published loading-zone volumes
  (five equations, leaving a one-parameter family), and
* the 234 g/cm^3 core density needed for the B->A->D->C pattern with the
  same carbon tube frame, which picks one member of that family.

The family is traced by pinning the dihedral angle at the middle obtuse
edge ``bc``; a root find on that angle matches the density.  The result is
placed with face D on z = 0 and written to
``src/monotet/data/monostable_model.yaml``.

Run:  python tools/reconstruct_reference.py   (several minutes)
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, least_squares

from monotet.design import CARBON_TUBE_FRAME, min_core_density
from monotet.geometry import GeometryError, Tetrahedron, dihedral_angle, mm3_to_cm3
from monotet.scene import dump_scene
from monotet.tipping import ObtusePath, obtuse_paths
from monotet.zones import chain_patterns, loading_zone

TOTAL = 668.624
ZONES = [1.4318, 0.5716, 0.0199, 0.0067]  # sinks D, A, C, B along path abcd
TYPE2_DENSITY = 234.0
PATH = ObtusePath("abcd", (0.0, 0.0, 0.0))
PATTERNS = chain_patterns(PATH)
TARGET = np.array([TOTAL] + ZONES)
OUT = Path(__file__).resolve().parents[1] / "src" / "monotet" / "data" / "monostable_model.yaml"


def volumes(t: Tetrahedron) -> np.ndarray:
    return np.array([mm3_to_cm3(t.volume)] + [loading_zone(t, p).volume_cm3 for p in PATTERNS])


def residuals(x, angle_bc):
    try:
        t = Tetrahedron(x.reshape(4, 3))
        v = volumes(t)
    except GeometryError:
        return np.full(6, 50.0)
    r = np.log(np.maximum(v, 1e-12) / TARGET)
    if angle_bc is None:
        return r
    return np.r_[r, (dihedral_angle(t, "bc") - angle_bc) / 10.0]


def solve(x0, angle_bc=None):
    r = least_squares(residuals, x0, args=(angle_bc,), diff_step=1e-7,
                      xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    return r.x, float(np.abs(r.fun).max())


def seed(rng_seed=1) -> np.ndarray:
    rng = np.random.default_rng(rng_seed)
    while True:
        try:
            t = Tetrahedron(rng.normal(size=(4, 3)))
        except GeometryError:
            continue
        paths = obtuse_paths(t)
        if not paths:
            continue
        t = t.relabeled(paths[0].order)
        x0 = (t.points - t.centroid).ravel() * (TOTAL * 1000 / t.volume) ** (1 / 3)
        if np.any(residuals(x0, None) > 20):
            continue
        x, err = solve(x0)
        if err < 1e-8:
            return x


def canonical(points: np.ndarray) -> np.ndarray:
    """a at the origin, b on +x, c in the xy-plane (y > 0), d above."""
    a, b, c, d = points
    ex = (b - a) / np.linalg.norm(b - a)
    ez = np.cross(b - a, c - a)
    ez /= np.linalg.norm(ez)
    if (d - a) @ ez < 0:
        ez = -ez
    ey = np.cross(ez, ex)
    R = np.vstack([ex, ey, ez])
    return (points - a) @ R.T


def main(decimals: int = 4):
    x = seed()
    cache = {}

    def gap(angle):
        nonlocal x
        x, err = solve(x, angle)
        t = Tetrahedron(x.reshape(4, 3))
        zone = loading_zone(t, PATTERNS[2], PATH)
        rho = min_core_density(t, CARBON_TUBE_FRAME, zone)
        cache[angle] = (x.copy(), rho)
        print(f"bc angle {angle:.4f}: fit residual {err:.1e}, type II density {rho:.2f}", flush=True)
        return rho - TYPE2_DENSITY

    for warm in (100.0, 104.0, 108.0, 110.0, 111.0):
        x, _ = solve(x, warm)
    angle = brentq(gap, 111.0, 112.0, xtol=0.005)
    pts = np.round(canonical(cache[min(cache, key=lambda k: abs(k - angle))][0].reshape(4, 3)), decimals)
    t = Tetrahedron(pts)
    print("vertices (mm):\n", pts)
    print("volumes (cm^3):", volumes(t))
    dump_scene(OUT, t, provenance=(
        "Reconstructed, not transcribed: fitted to the total volume (668.624 cm^3), "
        "the four published zone volumes and the 234 g/cm^3 Type II density "
        "threshold; see tools/reconstruct_reference.py. Face D rests on z = 0."))
    print("wrote", OUT)


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
