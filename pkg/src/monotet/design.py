"""Two-material construction: a light tube frame plus a dense core cut by a plane.

Masses are grams, densities g/cm^3, lengths mm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import product

import numpy as np
from scipy.optimize import minimize

from .geometry import (
    EDGES,
    LABELS,
    ConvexPolytope,
    GeometryError,
    HalfSpace,
    Plane,
    VOLUME_FLOOR,
    Tetrahedron,
    halfspace_intersection,
    tetra_cut_moments,
    mm3_to_cm3,
    volume_centroid,
)
from .tipping import FallingPattern, falling_pattern
from .zones import LoadingZone

FRAME_MODES = ("tubes", "solid")


class InfeasibleDesign(RuntimeError):
    """No design parameters in the searched range produce a functional body."""


@dataclass(frozen=True)
class MaterialSpec:
    name: str
    density: float  # g/cm^3

    def __post_init__(self):
        if not self.density > 0:
            raise ValueError(f"density of {self.name} must be positive")


CARBON_FIBRE = MaterialSpec("pultruded carbon fibre", 1.36)
TUNGSTEN_CARBIDE = MaterialSpec("tungsten carbide", 14.15)
EPOXY = MaterialSpec("epoxy", 1.3)


@dataclass(frozen=True)
class FrameSpec:
    outer_diameter: float = 1.0  # mm
    inner_diameter: float = 0.5  # mm
    material: MaterialSpec = CARBON_FIBRE
    joint_mass: float = 0.0  # g per vertex

    def __post_init__(self):
        if not 0 <= self.inner_diameter < self.outer_diameter:
            raise ValueError("need 0 <= inner diameter < outer diameter")
        if self.joint_mass < 0:
            raise ValueError("joint mass must be nonnegative")

    @property
    def linear_density(self) -> float:
        """Tube mass per mm of length, g/mm."""
        area = math.pi / 4 * (self.outer_diameter**2 - self.inner_diameter**2)
        return mm3_to_cm3(area) * self.material.density


CARBON_TUBE_FRAME = FrameSpec()


@dataclass(frozen=True)
class CoreSpec:
    """Dense region ``tetrahedron ∩ interface``."""

    interface: HalfSpace
    material: MaterialSpec = TUNGSTEN_CARBIDE

    def with_density(self, density: float) -> "CoreSpec":
        return replace(self, material=MaterialSpec(self.material.name, density))


@dataclass(frozen=True)
class MassModel:
    frame_mass: float
    frame_com: np.ndarray
    core_mass: float
    core_com: np.ndarray
    core_region: ConvexPolytope | None = None

    @property
    def total_mass(self) -> float:
        return self.frame_mass + self.core_mass

    @property
    def com(self) -> np.ndarray:
        return (self.frame_mass * self.frame_com + self.core_mass * self.core_com) / self.total_mass


def frame_model(t: Tetrahedron, f: FrameSpec) -> tuple[float, np.ndarray]:
    """Mass and COM of the edge tubes plus joint point masses."""
    lam = f.linear_density
    masses, points = [], []
    for e in EDGES:
        p, q = t[e[0]], t[e[1]]
        masses.append(lam * np.linalg.norm(q - p))
        points.append((p + q) / 2)
    for k in LABELS:
        masses.append(f.joint_mass)
        points.append(t[k])
    m = np.array(masses)
    total = float(m.sum())
    if total <= 0:
        raise GeometryError("frame has zero mass")
    return total, (m[:, None] * np.array(points)).sum(axis=0) / total


def core_from_plane(t: Tetrahedron, c: CoreSpec) -> tuple[float, np.ndarray, ConvexPolytope]:
    region = halfspace_intersection([c.interface], start=t.as_polytope())
    if region is None:
        raise GeometryError("interface plane leaves no core inside the tetrahedron")
    vc = volume_centroid(region)
    return mm3_to_cm3(vc.volume) * c.material.density, vc.centroid, region


def mass_model(t: Tetrahedron, f: FrameSpec, core: CoreSpec, mode: str = "tubes") -> MassModel:
    """Composite mass model.

    ``mode="tubes"`` adds the core to the edge frame.  ``mode="solid"``
    spreads the frame mass uniformly over the tetrahedron as a light
    solid that the core displaces.
    """
    mf, cf = frame_model(t, f)
    mc, cc, region = core_from_plane(t, core)
    if mode == "tubes":
        return MassModel(mf, cf, mc, cc, region)
    if mode != "solid":
        raise ValueError(f"unknown frame mode {mode!r}")
    vt = mm3_to_cm3(t.volume)
    vcore = mm3_to_cm3(volume_centroid(region).volume)
    rho_light = mf / vt
    m_light = rho_light * (vt - vcore)
    if m_light <= 0:
        return MassModel(0.0, cc, mc, cc, region)
    c_light = (vt * t.centroid - vcore * cc) / (vt - vcore)
    return MassModel(m_light, c_light, mc, cc, region)


def verify_design(t: Tetrahedron, f: FrameSpec, core: CoreSpec, mode: str = "tubes") -> FallingPattern:
    return falling_pattern(t, mass_model(t, f, core, mode).com)


# --------------------------------------------------------------------------
# interface search

def heavy_corner(t: Tetrahedron, zone: LoadingZone) -> str:
    """Vertex nearest the zone centroid."""
    z = zone.centroid
    return min(LABELS, key=lambda k: np.linalg.norm(t[k] - z))


def interface_plane(t: Tetrahedron, corner: str, target, alpha: float, theta: float, phi: float) -> HalfSpace:
    """Half-space ``n @ (x - anchor) <= 0`` with ``anchor = corner + alpha*(target - corner)``.

    ``theta``/``phi`` are the polar and azimuthal angles of ``n`` about the
    corner-to-target axis; the corner is on the core side iff ``theta < pi/2``.
    """
    v = t[corner]
    w = np.asarray(target, dtype=float) - v
    w = w / np.linalg.norm(w)
    u = np.cross(w, [1.0, 0, 0])
    if np.linalg.norm(u) < 0.1:
        u = np.cross(w, [0, 1.0, 0])
    u /= np.linalg.norm(u)
    u2 = np.cross(w, u)
    n = math.cos(theta) * w + math.sin(theta) * (math.cos(phi) * u + math.sin(phi) * u2)
    anchor = v + alpha * (np.asarray(target, dtype=float) - v)
    return HalfSpace(Plane.through(anchor, n))


@dataclass(frozen=True)
class CoreFit:
    core: CoreSpec
    margin: float  # mm, positive when the composite COM is inside the zone
    params: tuple[float, float, float]
    corner: str
    com: np.ndarray

    @property
    def functional(self) -> bool:
        return self.margin > 0


def _composite_com(t, frame, hs, density, mode):
    """Composite COM for a plane cut, via closed-form cut moments; ``None`` if no core."""
    mf, cf = frame
    v, cc = tetra_cut_moments(t.points, hs)
    if v <= VOLUME_FLOOR:
        return None
    vc = mm3_to_cm3(v)
    mc = vc * density
    if mode == "solid":
        vt = mm3_to_cm3(t.volume)
        if vt - vc <= 0:
            return cc
        m_light = mf / vt * (vt - vc)
        cf = (vt * t.centroid - vc * cc) / (vt - vc)
        mf = m_light
    elif mode != "tubes":
        raise ValueError(f"unknown frame mode {mode!r}")
    return (mf * cf + mc * cc) / (mf + mc)


def _design_margin(t, frame, density, zone, corner, target, x, mode):
    alpha, theta, phi = x
    if not (0 < alpha <= ALPHA_MAX):
        return -np.inf, None, None
    hs = interface_plane(t, corner, target, alpha, theta, phi)
    com = _composite_com(t, frame, hs, density, mode)
    if com is None:
        return -np.inf, None, None
    return zone.region.signed_distance(com), CoreSpec(hs, MaterialSpec("core", density)), com


#: anchor may run past the zone centroid, up to this multiple of the corner distance
ALPHA_MAX = 3.0
GRID = dict(alpha=(0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0),
            theta_deg=tuple(range(0, 181, 15)), phi_steps=12)


def fit_core(t: Tetrahedron, f: FrameSpec, density: float, zone: LoadingZone, *,
             corner: str | None = None, mode: str = "tubes", grid: dict | None = None,
             n_starts: int = 4, stop_at: float | None = None) -> CoreFit:
    """Search the interface plane maximising the COM's depth inside ``zone``.

    Coarse grid over (anchor fraction, tilt, azimuth), then Nelder-Mead from
    the ``n_starts`` best grid points.  Grid ties are broken by grid order
    so the result is reproducible.  With ``stop_at`` the search returns as
    soon as a margin above it is seen.
    """
    if zone.empty:
        raise ValueError("cannot fit a core to an empty zone")
    g = GRID if grid is None else grid
    c = corner or heavy_corner(t, zone)
    target = zone.centroid
    frame = frame_model(t, f)

    def evaluate(x):
        m, core, com = _design_margin(t, frame, density, zone, c, target, x, mode)
        return CoreFit(core, float(m), tuple(float(v) for v in x), c, com)

    def done(fit):
        return stop_at is not None and fit.margin > stop_at

    tried = []
    for alpha, th in product(g["alpha"], g["theta_deg"]):
        phis = [0.0] if th in (0, 180) else np.linspace(0, 2 * np.pi, g["phi_steps"], endpoint=False)
        for ph in phis:
            fit = evaluate((alpha, math.radians(th), float(ph)))
            if done(fit):
                return fit
            tried.append(fit)
    tried = [ft for ft in tried if ft.core is not None]
    if not tried:
        raise InfeasibleDesign("no interface plane cuts the tetrahedron")
    tried.sort(key=lambda ft: -ft.margin)  # stable: grid order breaks ties
    best = tried[0]

    def obj(x):
        m, *_ = _design_margin(t, frame, density, zone, c, target, x, mode)
        return 1e9 if not np.isfinite(m) else -m

    scale = max(1.0, zone.region.diameter)
    for start in tried[:n_starts]:
        res = minimize(obj, np.array(start.params), method="Nelder-Mead",
                       options=dict(xatol=1e-7, fatol=1e-7 * scale, maxiter=800,
                                    initial_simplex=_simplex(start.params)))
        fit = evaluate(res.x)
        if fit.core is not None and fit.margin > best.margin:
            best = fit
        if done(best):
            break
    return best


def _simplex(x0):
    x0 = np.asarray(x0, dtype=float)
    steps = np.array([0.05, math.radians(5), math.radians(20)])
    return np.vstack([x0] + [x0 + np.eye(3)[i] * steps[i] for i in range(3)])


# --------------------------------------------------------------------------
# thresholds

def segment_window(region: ConvexPolytope, p0, p1) -> tuple[float, float] | None:
    """Parameter interval of ``p0 + s*(p1 - p0)`` lying in ``region``."""
    p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
    N = np.array([pl.normal for pl in region.planes])
    o = np.array([pl.offset for pl in region.planes])
    a, b = N @ p0 - o, N @ (p1 - p0)  # a + s*b <= 0
    lo, hi = -np.inf, np.inf
    for ai, bi in zip(a, b):
        if abs(bi) < 1e-300:
            if ai > 0:
                return None
        elif bi > 0:
            hi = min(hi, -ai / bi)
        else:
            lo = max(lo, -ai / bi)
    return (lo, hi) if lo < hi else None


def fixed_interface_density(t: Tetrahedron, f: FrameSpec, core: CoreSpec, zone: LoadingZone) -> float:
    """Smallest core density putting the COM into ``zone`` for this interface (tube frame).

    The COM runs from the frame COM to the core centroid as density grows,
    so the threshold follows from the entry point of that segment.
    """
    mf, cf = frame_model(t, f)
    mc1, cc, _ = core_from_plane(t, core.with_density(1.0))
    win = segment_window(zone.region, cf, cc)
    if win is None or win[1] < 1 or win[0] >= 1:
        return math.inf
    lam = max(win[0], 0.0)
    return lam * mf / ((1 - lam) * mc1)


def min_core_density(t: Tetrahedron, f: FrameSpec, zone: LoadingZone, *, mode: str = "tubes",
                     lo: float = 1e-3, hi: float = 1e6, rel_tol: float = 0.005,
                     grid: dict | None = None) -> float:
    """Bisection (in log density) for the smallest density with a functional interface.

    Returns ``inf`` when even ``hi`` does not work.
    """
    def works(rho):
        return fit_core(t, f, rho, zone, mode=mode, grid=grid, stop_at=0.0).margin > 0

    if not works(hi):
        return math.inf
    if works(lo):
        return lo
    while hi / lo > 1 + rel_tol:
        mid = math.sqrt(lo * hi)
        if works(mid):
            hi = mid
        else:
            lo = mid
    return hi


def scaled_design(t: Tetrahedron, core: CoreSpec, s: float) -> tuple[Tetrahedron, CoreSpec]:
    hs = HalfSpace(Plane(core.interface.normal, s * core.interface.offset))
    return t.transformed(scale=s), replace(core, interface=hs)


def scaled_margin(t, f, core, zone, s, mode="tubes") -> float:
    """COM depth in the zone at linear scale ``s``, divided by ``s``."""
    ts, cs = scaled_design(t, core, s)
    com = mass_model(ts, f, cs, mode).com
    return zone.region.signed_distance(com / s)


def min_scale(t: Tetrahedron, f: FrameSpec, core: CoreSpec, zone: LoadingZone, *,
              mode: str = "tubes", lo: float = 1e-3, hi: float = 1e3, rel_tol: float = 0.005) -> float:
    """Smallest uniform scale at which the design is still functional.

    Tube cross-sections stay fixed, so frame mass grows like ``s`` while
    the core grows like ``s**3``.
    """
    if scaled_margin(t, f, core, zone, hi, mode) <= 0:
        raise InfeasibleDesign(f"design not functional at any scale up to {hi}")
    if scaled_margin(t, f, core, zone, lo, mode) > 0:
        return lo
    while hi / lo > 1 + rel_tol:
        mid = math.sqrt(lo * hi)
        if scaled_margin(t, f, core, zone, mid, mode) > 0:
            hi = mid
        else:
            lo = mid
    return hi
