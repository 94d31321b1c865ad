"""Loading zones: the sets of centre-of-mass positions giving one falling pattern."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    FACES,
    ConvexPolytope,
    HalfSpace,
    Plane,
    Tetrahedron,
    face_plane,
    face_vertices,
    halfspace_intersection,
    mm3_to_cm3,
    volume_centroid,
)
from .tipping import FallingPattern, ObtusePath, obtuse_paths

log = logging.getLogger(__name__)

#: zones smaller than this (cm^3) count as empty
EMPTY_CM3 = 1e-12

# chain patterns in path coordinates, keyed by their stable face
_CHAIN = "CDAB"


def chain_patterns(path: ObtusePath) -> list[FallingPattern]:
    """The four monostable chain patterns along ``path``, ordered by stable face D, A, C, B."""
    out = []
    for sink in "DACB":
        k = _CHAIN.index(sink)
        succ = {}
        for i, f in enumerate(_CHAIN):
            if i < k:
                succ[path.face(f)] = path.face(_CHAIN[i + 1])
            elif i > k:
                succ[path.face(f)] = path.face(_CHAIN[i - 1])
            else:
                succ[path.face(f)] = None
        out.append(FallingPattern(succ))
    return out


def edge_halfspace(t: Tetrahedron, face: str, edge: str) -> HalfSpace:
    """Points whose projection on ``face`` lies on the inner side of ``edge``.

    The bounding plane contains ``edge`` and is perpendicular to ``face``.
    """
    n = face_plane(t, face).normal
    i, j = edge
    third = next(k for k in face_vertices(face) if k not in edge)
    p, q = t[i], t[j]
    u = np.cross(q - p, n)
    if (t[third] - p) @ u > 0:
        u = -u
    return HalfSpace(Plane.through(p, u))


def shared_edge(f: str, g: str) -> str:
    e = "".join(sorted(set(face_vertices(f)) & set(face_vertices(g))))
    if f == g or len(e) != 2:
        raise ValueError(f"faces {f} and {g} are not adjacent")
    return e


def face_halfspaces(t: Tetrahedron, face: str, successor: str | None) -> list[HalfSpace]:
    """Constraints making ``face`` stable (``successor=None``) or tip onto ``successor``."""
    verts = face_vertices(face)
    edges = ["".join(sorted(verts.replace(k, ""))) for k in verts]
    if successor is None:
        return [edge_halfspace(t, face, e) for e in edges]
    exit_edge = shared_edge(face, successor)
    out = []
    for e in edges:
        h = edge_halfspace(t, face, e)
        out.append(h.complement() if e == exit_edge else h)
    return out


def pattern_halfspaces(t: Tetrahedron, p: FallingPattern) -> list[HalfSpace]:
    hs = []
    for f in FACES:
        hs.extend(face_halfspaces(t, f, p[f]))
    hs.extend(HalfSpace(face_plane(t, f)) for f in FACES)
    return hs


def zone_type(p: FallingPattern, path: ObtusePath) -> str:
    """``"I"`` when the stable face is ``A`` or ``D`` in path coordinates, else ``"II"``."""
    if p not in chain_patterns(path):
        raise ValueError(f"{p} is not a chain pattern along path {path.order}")
    return "I" if path.path_label(p.sink) in "AD" else "II"


@dataclass(frozen=True, eq=False)
class LoadingZone:
    pattern: FallingPattern
    region: ConvexPolytope | None
    volume_cm3: float
    zone_type: str | None = None
    path: ObtusePath | None = None

    @property
    def empty(self) -> bool:
        return self.region is None

    @property
    def centroid(self) -> np.ndarray:
        return volume_centroid(self.region).centroid


def loading_zone(t: Tetrahedron, p: FallingPattern, path: ObtusePath | None = None) -> LoadingZone:
    region = halfspace_intersection(pattern_halfspaces(t, p))
    vol = 0.0
    if region is not None:
        vol = mm3_to_cm3(volume_centroid(region).volume)
        if vol < EMPTY_CM3:
            region, vol = None, 0.0
    ztype = zone_type(p, path) if (path is not None and p.is_monostable) else None
    if region is not None and region.n_vertices != 4:
        log.info("zone %s has %d vertices, not 4", p, region.n_vertices)
    return LoadingZone(p, region, vol, ztype, path)


@dataclass(frozen=True, eq=False)
class ZoneReport:
    tetrahedron: Tetrahedron
    zones: list[LoadingZone] = field(default_factory=list)
    paths: list[ObtusePath] = field(default_factory=list)

    @property
    def total_volume_cm3(self) -> float:
        return mm3_to_cm3(self.tetrahedron.volume)

    @property
    def loadable(self) -> bool:
        return bool(self.zones)

    def zone(self, pattern: FallingPattern) -> LoadingZone:
        for z in self.zones:
            if z.pattern == pattern:
                return z
        raise KeyError(str(pattern))


def enumerate_zones(t: Tetrahedron, all_maps: bool = False) -> ZoneReport:
    """Nonempty loading zones of the chain patterns along every obtuse path.

    With ``all_maps`` every monostable successor map (4 * 3**3 of them) is
    tried instead, regardless of obtuse paths.
    """
    paths = obtuse_paths(t)
    if all_maps:
        return ZoneReport(t, monostable_zones(t), paths)
    seen, zones = set(), []
    for path in paths:
        for p in chain_patterns(path):
            if p in seen:
                continue
            seen.add(p)
            z = loading_zone(t, p, path)
            if not z.empty:
                zones.append(z)
    zones.sort(key=lambda z: (z.zone_type or "", -z.volume_cm3))
    return ZoneReport(t, zones, paths)


def monostable_zones(t: Tetrahedron) -> list[LoadingZone]:
    """Depth-first search over all monostable successor maps, pruning empty partial zones."""
    base = t.as_polytope()
    found = []

    def descend(poly, faces, succ):
        if not faces:
            vol = mm3_to_cm3(volume_centroid(poly).volume)
            if vol >= EMPTY_CM3:
                found.append(LoadingZone(FallingPattern(succ), poly, vol))
            return
        f, rest = faces[0], faces[1:]
        for g in FACES:
            if g == f:
                continue
            sub = halfspace_intersection(face_halfspaces(t, f, g), start=poly)
            if sub is not None:
                descend(sub, rest, {**succ, f: g})

    for sink in FACES:
        poly = halfspace_intersection(face_halfspaces(t, sink, None), start=base)
        if poly is not None:
            descend(poly, [f for f in FACES if f != sink], {sink: None})
    return found
