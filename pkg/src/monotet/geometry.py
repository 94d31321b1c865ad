"""Planes, tetrahedra, convex polytopes and their measures.

All lengths are millimetres.  Points are plain ``numpy`` arrays of shape
``(3,)``; polytopes keep an explicit vertex/facet representation with
outward facet planes so that interior means ``normal @ p <= offset`` for
every facet.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

#: volumes below this (mm^3) are treated as degenerate
VOLUME_FLOOR = 1e-9
#: point-on-plane tolerance (mm) at unit scale
PLANE_TOL = 1e-9

MM3_PER_CM3 = 1000.0

LABELS = "abcd"
FACES = "ABCD"
EDGES = ("ab", "ac", "ad", "bc", "bd", "cd")


class GeometryError(ValueError):
    """Degenerate or otherwise unusable geometric input."""


class UnboundedError(GeometryError):
    """A half-space intersection that does not enclose a bounded region."""


def as_point(p) -> np.ndarray:
    a = np.asarray(p, dtype=float).reshape(3)
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"non-finite point {a}")
    return a


def mm3_to_cm3(v: float) -> float:
    return v / MM3_PER_CM3


@dataclass(frozen=True)
class Plane:
    """The plane ``normal @ p == offset`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(3)
        norm = np.linalg.norm(n)
        if not np.isfinite(norm) or norm == 0.0:
            raise GeometryError("plane normal must be a nonzero finite vector")
        if abs(norm - 1.0) > 1e-12:
            n = n / norm
            object.__setattr__(self, "offset", float(self.offset) / norm)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, point, normal) -> "Plane":
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(n, float(n @ as_point(point)))

    @classmethod
    def from_points(cls, p, q, r) -> "Plane":
        p, q, r = as_point(p), as_point(q), as_point(r)
        n = np.cross(q - p, r - p)
        size = max(np.linalg.norm(q - p), np.linalg.norm(r - p), 1e-300)
        if np.linalg.norm(n) <= 1e-12 * size * size:
            raise GeometryError("collinear points do not define a plane")
        return cls.through(p, n)

    def signed_distance(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float) @ self.normal - self.offset

    def project(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return p - np.multiply.outer(self.signed_distance(p), self.normal)

    def flipped(self) -> "Plane":
        return Plane(-self.normal, -self.offset)


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space ``plane.normal @ p <= plane.offset``."""

    plane: Plane

    @classmethod
    def from_normal(cls, normal, offset) -> "HalfSpace":
        return cls(Plane(normal, offset))

    @property
    def normal(self) -> np.ndarray:
        return self.plane.normal

    @property
    def offset(self) -> float:
        return self.plane.offset

    def slack(self, p) -> np.ndarray:
        """Distance inside the boundary (negative outside)."""
        return self.plane.offset - np.asarray(p, dtype=float) @ self.plane.normal

    def contains(self, p, tol: float = PLANE_TOL) -> bool:
        return bool(self.slack(p) >= -tol)

    def complement(self) -> "HalfSpace":
        return HalfSpace(self.plane.flipped())


class VolumeCentroid(NamedTuple):
    volume: float
    centroid: np.ndarray
    degenerate: bool

    @property
    def volume_cm3(self) -> float:
        return mm3_to_cm3(self.volume)


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """Bounded 3-d convex polytope.

    ``facets[i]`` is a cycle of vertex indices, counter-clockwise seen from
    outside, lying on ``planes[i]`` whose normal points outward.
    """

    vertices: np.ndarray
    facets: tuple[tuple[int, ...], ...]
    planes: tuple[Plane, ...]

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "facets", tuple(tuple(int(i) for i in f) for f in self.facets))
        object.__setattr__(self, "planes", tuple(self.planes))
        if len(self.facets) != len(self.planes):
            raise GeometryError("one plane per facet required")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for f in self.facets:
            for i, j in zip(f, f[1:] + f[:1]):
                out.add((min(i, j), max(i, j)))
        return out

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.facets)

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))

    def halfspaces(self) -> list[HalfSpace]:
        return [HalfSpace(p) for p in self.planes]

    def slacks(self, p) -> np.ndarray:
        """Facet slacks of point(s) ``p``; shape ``(..., n_facets)``."""
        N = np.array([pl.normal for pl in self.planes])
        o = np.array([pl.offset for pl in self.planes])
        return o - np.asarray(p, dtype=float) @ N.T

    def contains(self, p, tol: float = PLANE_TOL) -> np.ndarray:
        return np.all(self.slacks(p) >= -tol, axis=-1)

    def is_convex(self, tol: float = PLANE_TOL) -> bool:
        scale = max(1.0, float(np.abs(self.vertices).max()))
        return bool(np.all(self.slacks(self.vertices) >= -tol * scale))

    def signed_distance(self, p) -> float:
        """Euclidean distance to the boundary, positive inside, negative outside."""
        p = as_point(p)
        s = self.slacks(p)
        if np.all(s >= 0):
            return float(s.min())
        best = np.inf
        for f in self.facets:
            pts = self.vertices[list(f)]
            for k in range(1, len(pts) - 1):
                best = min(best, _point_triangle_distance(p, pts[0], pts[k], pts[k + 1]))
        return -float(best)

    def triangles(self) -> np.ndarray:
        """Fan triangulation of all facets, shape ``(m, 3, 3)``, outward oriented."""
        tris = []
        for f in self.facets:
            for k in range(1, len(f) - 1):
                tris.append((f[0], f[k], f[k + 1]))
        return self.vertices[np.array(tris, dtype=int)]

    def tetrahedra(self) -> np.ndarray:
        """Decomposition into tetrahedra (cone from the vertex mean), ``(m, 4, 3)``."""
        tris = self.triangles()
        apex = np.broadcast_to(self.vertices.mean(axis=0), (len(tris), 1, 3))
        return np.concatenate([apex, tris], axis=1)

    def clip(self, hs: HalfSpace) -> "ConvexPolytope | None":
        """Intersection with one half-space, ``None`` when nothing is left."""
        return halfspace_intersection([hs], start=self)

    def transformed(self, rotation=None, translation=None, scale: float = 1.0) -> "ConvexPolytope":
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if translation is None else as_point(translation)
        v = scale * self.vertices @ R.T + t
        planes = tuple(Plane(R @ pl.normal, scale * pl.offset + (R @ pl.normal) @ t)
                       for pl in self.planes)
        return ConvexPolytope(v, self.facets, planes)

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` points uniformly distributed in the polytope."""
        tets = self.tetrahedra()
        vols = np.abs(_tet_signed_volumes(tets))
        pick = rng.choice(len(tets), size=n, p=vols / vols.sum())
        w = rng.dirichlet(np.ones(4), size=n)
        return np.einsum("nk,nkd->nd", w, tets[pick])


def _tet_signed_volumes(tets: np.ndarray) -> np.ndarray:
    a = tets[..., 0, :]
    return np.einsum("...i,...i->...", np.cross(tets[..., 1, :] - a, tets[..., 2, :] - a),
                     tets[..., 3, :] - a) / 6.0


def _point_triangle_distance(p, a, b, c) -> float:
    # Ericson, closest point on triangle
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return float(np.linalg.norm(p - a))
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return float(np.linalg.norm(bp))
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        v = d1 / (d1 - d3)
        return float(np.linalg.norm(p - (a + v * ab)))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return float(np.linalg.norm(cp))
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        w = d2 / (d2 - d6)
        return float(np.linalg.norm(p - (a + w * ac)))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return float(np.linalg.norm(p - (b + w * (c - b))))
    denom = 1.0 / (va + vb + vc)
    v, w = vb * denom, vc * denom
    return float(np.linalg.norm(p - (a + ab * v + ac * w)))


@dataclass(frozen=True, eq=False)
class Tetrahedron:
    """Four labelled vertices ``a, b, c, d``; face ``A`` is opposite ``a`` and so on."""

    points: np.ndarray = field(repr=True)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.shape != (4, 3) or not np.all(np.isfinite(p)):
            raise GeometryError("a tetrahedron needs four finite 3-d points")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        if abs(self.signed_volume) <= VOLUME_FLOOR:
            raise GeometryError(f"degenerate tetrahedron (volume {self.signed_volume:.3g} mm^3)")

    @classmethod
    def from_mapping(cls, vertices: dict) -> "Tetrahedron":
        return cls(np.array([vertices[k] for k in LABELS], dtype=float))

    def __getitem__(self, label: str) -> np.ndarray:
        return self.points[LABELS.index(label)]

    @property
    def vertices(self) -> dict[str, np.ndarray]:
        return {k: self.points[i] for i, k in enumerate(LABELS)}

    @property
    def signed_volume(self) -> float:
        return float(_tet_signed_volumes(self.points))

    @property
    def volume(self) -> float:
        return abs(self.signed_volume)

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    @property
    def diameter(self) -> float:
        return max(float(np.linalg.norm(self[e[0]] - self[e[1]])) for e in EDGES)

    def relabeled(self, order: str) -> "Tetrahedron":
        """New tetrahedron whose ``a, b, c, d`` are this one's ``order`` vertices."""
        return Tetrahedron(np.array([self[k] for k in order]))

    def transformed(self, rotation=None, translation=None, scale: float = 1.0) -> "Tetrahedron":
        R = np.eye(3) if rotation is None else np.asarray(rotation, dtype=float)
        t = np.zeros(3) if translation is None else as_point(translation)
        return Tetrahedron(scale * self.points @ R.T + t)

    def as_polytope(self) -> ConvexPolytope:
        """Polytope view; facet ``i`` is face ``FACES[i]``, vertex ``i`` is ``LABELS[i]``."""
        facets, planes = [], []
        for i in range(4):
            f = [j for j in range(4) if j != i]
            pl = Plane.from_points(*self.points[f])
            if pl.signed_distance(self.points[i]) > 0:
                f = [f[0], f[2], f[1]]
                pl = pl.flipped()
            facets.append(tuple(f))
            planes.append(pl)
        return ConvexPolytope(self.points, facets, planes)


def face_vertices(face: str) -> str:
    """Labels of the three vertices on ``face``."""
    return LABELS.replace(face.lower(), "")


def face_plane(t: Tetrahedron, face: str) -> Plane:
    """Outward plane of ``face``; the opposite vertex is strictly inside."""
    if face not in FACES:
        raise GeometryError(f"unknown face {face!r}")
    i = FACES.index(face)
    p, q, r = (t[k] for k in face_vertices(face))
    pl = Plane.from_points(p, q, r)
    if pl.signed_distance(t.points[i]) > 0:
        pl = pl.flipped()
    return pl


def edge_faces(edge: str) -> tuple[str, str]:
    """The two faces meeting at ``edge`` (those not opposite its endpoints)."""
    e = _norm_edge(edge)
    f1, f2 = (k.upper() for k in LABELS if k not in e)
    return f1, f2


def _norm_edge(edge) -> str:
    e = "".join(sorted("".join(edge)))
    if e not in EDGES:
        raise GeometryError(f"{edge!r} is not an edge of a tetrahedron")
    return e


def dihedral_angle(t: Tetrahedron, edge) -> float:
    """Interior dihedral angle at ``edge`` in degrees."""
    f1, f2 = edge_faces(edge)
    n1, n2 = face_plane(t, f1).normal, face_plane(t, f2).normal
    c = np.clip(n1 @ n2, -1.0, 1.0)
    return float(180.0 - np.degrees(np.arccos(c)))


def dihedral_angles(t: Tetrahedron) -> dict[str, float]:
    return {e: dihedral_angle(t, e) for e in EDGES}


def solid_angle(t: Tetrahedron, vertex: str) -> float:
    """Solid angle (steradians) subtended at ``vertex``; positive for any nondegenerate tetra."""
    o = t[vertex]
    a, b, c = (t[k] - o for k in LABELS if k != vertex)
    la, lb, lc = (np.linalg.norm(x) for x in (a, b, c))
    num = abs(a @ np.cross(b, c))
    den = la * lb * lc + (a @ b) * lc + (a @ c) * lb + (b @ c) * la
    return float(2.0 * np.arctan2(num, den))


def volume_centroid(poly: ConvexPolytope | Tetrahedron) -> VolumeCentroid:
    """Volume and centroid by the divergence theorem over triangulated facets."""
    if isinstance(poly, Tetrahedron):
        poly = poly.as_polytope()
    if not poly.facets:
        return VolumeCentroid(0.0, np.full(3, np.nan), True)
    origin = poly.vertices.mean(axis=0)
    tris = poly.triangles() - origin
    vols = np.einsum("ij,ij->i", tris[:, 0], np.cross(tris[:, 1], tris[:, 2])) / 6.0
    vol = float(vols.sum())
    if vol <= VOLUME_FLOOR:
        return VolumeCentroid(max(vol, 0.0), np.full(3, np.nan), True)
    cen = origin + (vols[:, None] * tris.sum(axis=1)).sum(axis=0) / (4.0 * vol)
    return VolumeCentroid(vol, cen, False)


# --------------------------------------------------------------------------
# half-space intersection by incremental clipping

class _Clipper:
    """Mutable polytope used while clipping; each vertex remembers its planes."""

    def __init__(self, normals, offsets):
        self.normals = list(normals)
        self.offsets = list(offsets)
        self.verts: list[np.ndarray] = []
        self.inc: list[frozenset] = []
        self.faces: list[tuple[int, list[int]]] = []

    @classmethod
    def box(cls, lo, hi):
        c = cls([], [])
        for axis in range(3):
            for sign, bound in ((-1.0, lo[axis]), (1.0, hi[axis])):
                n = np.zeros(3)
                n[axis] = sign
                c.normals.append(n)
                c.offsets.append(sign * bound)
        corners = {}
        for ix in (0, 1):
            for iy in (0, 1):
                for iz in (0, 1):
                    corners[(ix, iy, iz)] = len(c.verts)
                    c.verts.append(np.array([(lo, hi)[ix][0], (lo, hi)[iy][1], (lo, hi)[iz][2]]))
                    c.inc.append(frozenset({0 + ix, 2 + iy, 4 + iz}))
        k = corners
        # ccw seen from outside
        c.faces = [
            (0, [k[0, 0, 0], k[0, 0, 1], k[0, 1, 1], k[0, 1, 0]]),
            (1, [k[1, 0, 0], k[1, 1, 0], k[1, 1, 1], k[1, 0, 1]]),
            (2, [k[0, 0, 0], k[1, 0, 0], k[1, 0, 1], k[0, 0, 1]]),
            (3, [k[0, 1, 0], k[0, 1, 1], k[1, 1, 1], k[1, 1, 0]]),
            (4, [k[0, 0, 0], k[0, 1, 0], k[1, 1, 0], k[1, 0, 0]]),
            (5, [k[0, 0, 1], k[1, 0, 1], k[1, 1, 1], k[0, 1, 1]]),
        ]
        return c

    @classmethod
    def from_polytope(cls, poly: ConvexPolytope):
        c = cls([p.normal for p in poly.planes], [p.offset for p in poly.planes])
        c.verts = [v.copy() for v in poly.vertices]
        inc = [set() for _ in c.verts]
        for fi, f in enumerate(poly.facets):
            for v in f:
                inc[v].add(fi)
        c.inc = [frozenset(s) for s in inc]
        c.faces = [(fi, list(f)) for fi, f in enumerate(poly.facets)]
        return c

    def scale(self) -> float:
        return max(1.0, max(float(np.abs(v).max()) for v in self.verts))

    def _solve_vertex(self, planes, guess):
        planes = sorted(planes)
        N = np.array([self.normals[i] for i in planes])
        o = np.array([self.offsets[i] for i in planes])
        if len(planes) < 3 or np.linalg.matrix_rank(N, tol=1e-9) < 3:
            return guess
        x, *_ = np.linalg.lstsq(N, o, rcond=None)
        if np.linalg.norm(x - guess) > 1e-6 * self.scale():
            return guess
        return x

    def cut(self, normal, offset, tol_rel) -> bool:
        """Clip by ``normal @ p <= offset``; returns False if nothing remains."""
        pid = len(self.normals)
        self.normals.append(np.asarray(normal, dtype=float))
        self.offsets.append(float(offset))
        V = np.array(self.verts)
        s = V @ self.normals[pid] - offset
        tol = tol_rel * self.scale()
        outside = s > tol
        if not outside.any():
            return True
        if not (s < -tol).any():
            return False
        on = np.abs(s) <= tol
        for i in np.flatnonzero(on):
            self.inc[i] = self.inc[i] | {pid}

        cache: dict[tuple[int, int], int] = {}

        def crossing(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                t = s[i] / (s[i] - s[j])
                guess = V[i] + t * (V[j] - V[i])
                planes = (self.inc[i] & self.inc[j]) | {pid}
                self.verts.append(self._solve_vertex(planes, guess))
                self.inc.append(frozenset(planes))
                cache[key] = len(self.verts) - 1
            return cache[key]

        new_faces = []
        cap_next: dict[int, int] = {}
        n_old = len(V)
        for fid, poly in self.faces:
            out = []
            m = len(poly)
            for k in range(m):
                i, j = poly[k], poly[(k + 1) % m]
                if not outside[i]:
                    out.append(i)
                if (s[i] < -tol and outside[j]) or (outside[i] and s[j] < -tol):
                    out.append(crossing(i, j))
            if len(out) < 3:
                continue
            is_on = [(v >= n_old) or on[v] for v in out]
            for k in range(len(out)):
                k2 = (k + 1) % len(out)
                if is_on[k] and is_on[k2]:
                    cap_next[out[k2]] = out[k]
            new_faces.append((fid, out))
        cap = _chain(cap_next)
        if cap is None:
            cap = self._angle_sort(list(cap_next) + list(cap_next.values()), pid)
        if len(cap) >= 3:
            new_faces.append((pid, cap))
        self.faces = new_faces
        self._compact()
        return bool(self.faces)

    def _angle_sort(self, ids, pid):
        ids = sorted(set(ids))
        if len(ids) < 3:
            return ids
        n = self.normals[pid]
        P = np.array([self.verts[i] for i in ids])
        c = P.mean(axis=0)
        u = P[0] - c
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        ang = np.arctan2((P - c) @ w, (P - c) @ u)
        return [ids[k] for k in np.argsort(ang)]

    def _compact(self):
        used = sorted({v for _, f in self.faces for v in f})
        remap = {old: new for new, old in enumerate(used)}
        self.verts = [self.verts[i] for i in used]
        self.inc = [self.inc[i] for i in used]
        self.faces = [(fid, [remap[v] for v in f]) for fid, f in self.faces]


def _chain(nxt: dict[int, int]):
    if len(nxt) < 3:
        return None
    start = next(iter(nxt))
    out = [start]
    cur = nxt[start]
    while cur != start:
        if cur not in nxt or len(out) > len(nxt):
            return None
        out.append(cur)
        cur = nxt[cur]
    return out if len(out) == len(nxt) else None


def halfspace_intersection(halfspaces: Sequence[HalfSpace], *,
                           start: ConvexPolytope | None = None,
                           tol: float = 1e-12) -> ConvexPolytope | None:
    """Bounded intersection of closed half-spaces.

    Returns ``None`` when the intersection is empty or has no volume and
    raises :class:`UnboundedError` when it extends to infinity.  The
    half-spaces are applied one at a time to an enclosing box (or to
    ``start`` when given); every new vertex is re-solved from the planes it
    lies on, so the size of the enclosing box does not cost precision.
    """
    if not halfspaces and start is None:
        raise GeometryError("need at least one half-space")
    if start is None:
        offs = max(1.0, max(abs(h.offset) for h in halfspaces))
        big = 1e6 * offs
        clipper = _Clipper.box(-np.full(3, big), np.full(3, big))
        n_box = 6
    else:
        clipper = _Clipper.from_polytope(start)
        n_box = 0
    for h in halfspaces:
        if not clipper.cut(h.normal, h.offset, tol):
            return None
    if n_box and any(min(inc) < n_box for inc in clipper.inc):
        raise UnboundedError("half-spaces do not bound a finite region")
    planes = tuple(Plane(clipper.normals[fid], clipper.offsets[fid]) for fid, _ in clipper.faces)
    poly = ConvexPolytope(np.array(clipper.verts), [f for _, f in clipper.faces], planes)
    if volume_centroid(poly).volume <= VOLUME_FLOOR:
        return None
    return poly


# --------------------------------------------------------------------------
# convex hull

def convex_hull(points) -> ConvexPolytope:
    """Convex hull with coplanar triangles merged into polygonal facets."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(P) < 4:
        raise GeometryError(f"need at least 4 points for a 3-d hull, got {len(P)}")
    if not np.all(np.isfinite(P)):
        raise GeometryError("non-finite point in hull input")
    centred = P - P.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False)
    scale = max(sv[0], 1e-300)
    if sv[1] <= 1e-12 * scale:
        raise GeometryError("hull input is collinear")
    if sv[2] <= 1e-12 * scale:
        raise GeometryError("hull input is coplanar")
    try:
        hull = ConvexHull(P)
    except QhullError as exc:
        raise GeometryError(f"hull computation failed: {exc}") from exc

    used = np.unique(hull.simplices)
    remap = {old: new for new, old in enumerate(used)}
    verts = P[used]
    size = float(np.abs(verts).max()) or 1.0
    groups: list[list[int]] = []
    keys: list[np.ndarray] = []
    for k, eq in enumerate(hull.equations):
        for g, key in zip(groups, keys):
            if np.allclose(eq[:3], key[:3], atol=1e-9) and abs(eq[3] - key[3]) <= 1e-9 * size:
                g.append(k)
                break
        else:
            groups.append([k])
            keys.append(eq)
    facets, planes = [], []
    for g, key in zip(groups, keys):
        ids = sorted({remap[v] for k in g for v in hull.simplices[k]})
        n = key[:3] / np.linalg.norm(key[:3])
        Q = verts[ids]
        c = Q.mean(axis=0)
        u = Q[0] - c
        u /= np.linalg.norm(u)
        w = np.cross(n, u)
        ang = np.arctan2((Q - c) @ w, (Q - c) @ u)
        cyc = [ids[i] for i in np.argsort(ang)]
        pl = Plane(n, float(n @ c))
        facets.append(tuple(cyc))
        planes.append(pl)
    return ConvexPolytope(verts, facets, planes)


def tetra_cut_moments(points, halfspace: HalfSpace) -> tuple[float, np.ndarray]:
    """Volume and centroid of ``tetrahedron ∩ halfspace`` without building a polytope.

    Closed-form case split on how many vertices are inside; used in inner
    optimisation loops.  Returns ``(0, nan)`` for an empty cut.
    """
    P = np.asarray(points, dtype=float)
    s = P @ halfspace.normal - halfspace.offset
    inside = [i for i in range(4) if s[i] <= 0]
    outside = [i for i in range(4) if s[i] > 0]

    def cut(i, j):
        return P[i] + s[i] / (s[i] - s[j]) * (P[j] - P[i])

    def moments(tets):
        T = np.array(tets)
        v = np.abs(_tet_signed_volumes(T))
        return float(v.sum()), (v[:, None] * T.mean(axis=1)).sum(axis=0)

    if not inside:
        return 0.0, np.full(3, np.nan)
    if not outside:
        v, m = moments([P])
    elif len(inside) == 1:
        i = inside[0]
        v, m = moments([[P[i]] + [cut(i, j) for j in outside]])
    elif len(inside) == 3:
        k = outside[0]
        vt, mt = moments([P])
        vk, mk = moments([[P[k]] + [cut(k, j) for j in inside]])
        v, m = vt - vk, mt - mk
    else:
        (i, j), (k, l) = inside, outside
        a0, a1, a2 = P[i], cut(i, k), cut(i, l)
        b0, b1, b2 = P[j], cut(j, k), cut(j, l)
        v, m = moments([[a0, a1, a2, b0], [a1, a2, b0, b1], [a2, b0, b1, b2]])
    if v <= 0:
        return 0.0, np.full(3, np.nan)
    return v, m / v
