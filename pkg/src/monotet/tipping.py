"""Static stability and quasi-static tipping of a convex body on a floor.

A body resting on facet ``F`` is stable when the orthogonal projection of
its centre of mass onto ``F``'s plane falls inside ``F``.  Otherwise it
pivots over the edge of ``F`` the projection lies beyond and comes to
rest on the neighbouring facet.  When the projection lies beyond two
edges at once the outcome depends on dynamics and is reported as
ambiguous.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .geometry import (
    FACES,
    LABELS,
    ConvexPolytope,
    GeometryError,
    Plane,
    Tetrahedron,
    as_point,
    dihedral_angle,
)

#: relative tolerance (times body diameter) for marginal projections
MARGINAL_REL = 1e-9
#: dihedral angles must exceed 90 degrees by this much to count as obtuse
OBTUSE_TOL_DEG = 1e-9


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


class MarginalStabilityError(GeometryError):
    """The centre of mass projects onto (or very near) a face boundary."""


@dataclass(frozen=True)
class TipResult:
    """Outcome of resting a body on one face.

    ``kind`` is ``"stable"``, ``"tips"``, ``"ambiguous"`` (projection in a
    vertex wedge, ``vertex`` set) or ``"marginal"`` (projection on a
    boundary within tolerance).
    """

    kind: str
    next_face: object = None
    edge: tuple | None = None
    vertex: object = None

    @property
    def is_stable(self) -> bool:
        return self.kind == "stable"


@dataclass(frozen=True)
class FallingPattern:
    """Where each face of a tetrahedron sends the body: a neighbouring face or ``None`` (stable)."""

    successor: Mapping[str, str | None]
    ambiguous: frozenset = frozenset()

    def __post_init__(self):
        succ = dict(self.successor)
        if set(succ) != set(FACES):
            raise ValueError(f"pattern must assign all of {FACES}, got {sorted(succ)}")
        for f, g in succ.items():
            if g is not None and (g not in FACES or g == f):
                raise ValueError(f"bad successor {f}->{g}")
        object.__setattr__(self, "successor", dict(sorted(succ.items())))
        object.__setattr__(self, "ambiguous", frozenset(self.ambiguous))

    def __getitem__(self, face: str) -> str | None:
        return self.successor[face]

    def __hash__(self):
        return hash((tuple(self.successor.items()), self.ambiguous))

    def __eq__(self, other):
        if not isinstance(other, FallingPattern):
            return NotImplemented
        return self.successor == other.successor and self.ambiguous == other.ambiguous

    @property
    def stable_faces(self) -> list[str]:
        return [f for f, g in self.successor.items() if g is None and f not in self.ambiguous]

    @property
    def is_monostable(self) -> bool:
        return not self.ambiguous and len(self.stable_faces) == 1

    @property
    def sink(self) -> str:
        if not self.is_monostable:
            raise ValueError("pattern has no unique stable face")
        return self.stable_faces[0]

    def has_cycle(self) -> bool:
        for f in FACES:
            seen, cur = set(), f
            while cur is not None:
                if cur in seen:
                    return True
                seen.add(cur)
                cur = self.successor[cur]
        return False

    def __str__(self) -> str:
        from .patterns import format_pattern
        return format_pattern(self)


@dataclass(frozen=True)
class ObtusePath:
    """Vertex order ``(p0, p1, p2, p3)`` whose edges p0p1, p1p2, p2p3 are obtuse."""

    order: str
    angles: tuple[float, float, float]

    @property
    def edges(self) -> tuple[str, str, str]:
        o = self.order
        return (o[0:2], o[1:3], o[2:4])

    def face(self, path_label: str) -> str:
        """Actual face label playing the role of ``path_label`` (``A`` is opposite ``order[0]``)."""
        return self.order[FACES.index(path_label)].upper()

    def path_label(self, face: str) -> str:
        return FACES[self.order.index(face.lower())]


# --------------------------------------------------------------------------
# helpers for polytope faces

def _face_edges(body: ConvexPolytope, face: int):
    """Per edge of ``face``: endpoint ids, a point on it and the in-plane outward unit normal."""
    f = body.facets[face]
    n = body.planes[face].normal
    V = body.vertices
    out = []
    for i, j in zip(f, f[1:] + f[:1]):
        e = V[j] - V[i]
        u = np.cross(e, n)
        u /= np.linalg.norm(u)
        out.append(((i, j), V[i], u))
    return out


def _tol(body: ConvexPolytope) -> float:
    return MARGINAL_REL * body.diameter


def _check_inside(body: ConvexPolytope, com: np.ndarray):
    if not np.all(body.slacks(com) > 0):
        raise GeometryError("centre of mass must lie strictly inside the body")


def edge_offsets(body: ConvexPolytope, com, face: int) -> np.ndarray:
    """Signed distances of the projected COM beyond each edge of ``face`` (positive = outside)."""
    com = as_point(com)
    p = body.planes[face].project(com)
    return np.array([(p - q) @ u for _, q, u in _face_edges(body, face)])


def face_stability(body: ConvexPolytope, com, face: int) -> Stability:
    com = as_point(com)
    _check_inside(body, com)
    d = edge_offsets(body, com, face)
    tol = _tol(body)
    if np.all(d < -tol):
        return Stability.STABLE
    if np.any(d > tol):
        return Stability.UNSTABLE
    return Stability.MARGINAL


def is_stable_face(body: ConvexPolytope | Tetrahedron, com, face) -> bool:
    """Whether ``body`` rests on ``face``; raises :class:`MarginalStabilityError` on a tie."""
    body, face = _resolve(body, face)
    s = face_stability(body, com, face)
    if s is Stability.MARGINAL:
        raise MarginalStabilityError(f"projection of the COM is on the boundary of face {face}")
    return s is Stability.STABLE


def _resolve(body, face):
    if isinstance(body, Tetrahedron):
        return body.as_polytope(), FACES.index(face) if isinstance(face, str) else face
    return body, face


def neighbour_across(body: ConvexPolytope, face: int, edge: tuple[int, int]) -> int:
    V = body.vertices
    tol = 1e-9 * max(1.0, body.diameter)
    best, best_d = None, np.inf
    for g, pl in enumerate(body.planes):
        if g == face:
            continue
        d = max(abs(pl.signed_distance(V[edge[0]])), abs(pl.signed_distance(V[edge[1]])))
        if d < best_d:
            best, best_d = g, d
    if best is None or best_d > tol:
        raise GeometryError(f"no facet adjacent to {face} across {edge}")
    return best


def tip_step(body: ConvexPolytope | Tetrahedron, com, face) -> TipResult:
    """One quasi-static step from ``face``.

    For a :class:`Tetrahedron` faces and edges are reported with letter
    labels; for a general polytope with facet and vertex indices.
    """
    tet = body if isinstance(body, Tetrahedron) else None
    poly, fi = _resolve(body, face)
    com = as_point(com)
    _check_inside(poly, com)
    edges = _face_edges(poly, fi)
    d = edge_offsets(poly, com, fi)
    tol = _tol(poly)
    if np.all(d < -tol):
        return TipResult("stable")
    beyond = np.flatnonzero(d > tol)
    if np.any(np.abs(d) <= tol):
        return TipResult("marginal")
    if len(beyond) > 1:
        shared = set(edges[beyond[0]][0]) & set(edges[beyond[1]][0])
        v = shared.pop() if shared else None
        return TipResult("ambiguous", vertex=LABELS[v] if (tet is not None and v is not None) else v)
    ids = edges[beyond[0]][0]
    g = neighbour_across(poly, fi, ids)
    if tet is not None:
        return TipResult("tips", FACES[g], "".join(sorted(LABELS[i] for i in ids)))
    return TipResult("tips", g, ids)


def falling_pattern(t: Tetrahedron, com) -> FallingPattern:
    succ, amb = {}, set()
    for f in FACES:
        r = tip_step(t, com, f)
        if r.kind == "tips":
            succ[f] = r.next_face
        else:
            succ[f] = None
            if r.kind != "stable":
                amb.add(f)
    return FallingPattern(succ, frozenset(amb))


def height_above(body: ConvexPolytope, com, face: int) -> float:
    """Height of the COM when ``body`` rests on ``face``."""
    return float(-body.planes[face].signed_distance(as_point(com)))


@dataclass(frozen=True)
class TumbleTrace:
    """Faces visited with COM heights (mm); ``outcome`` says how the trace ended."""

    steps: tuple[tuple[object, float], ...]
    outcome: str

    @property
    def faces(self) -> list:
        return [f for f, _ in self.steps]

    @property
    def heights(self) -> list[float]:
        return [h for _, h in self.steps]

    def __len__(self):
        return len(self.steps)


def tumble_sequence(body: ConvexPolytope | Tetrahedron, com, start) -> TumbleTrace:
    """Follow tip steps from ``start`` until a stable face (or an ambiguity) is reached."""
    tet = body if isinstance(body, Tetrahedron) else None
    poly, fi = _resolve(body, start)
    com = as_point(com)
    steps = []
    for _ in range(len(poly.facets) + 1):
        label = FACES[fi] if tet is not None else fi
        steps.append((label, height_above(poly, com, fi)))
        r = tip_step(poly, com, fi)
        if r.kind != "tips":
            return TumbleTrace(tuple(steps), r.kind)
        fi = r.next_face
    raise GeometryError("tumble did not terminate; heights failed to decrease")


def obtuse_paths(t: Tetrahedron, tol: float = OBTUSE_TOL_DEG) -> list[ObtusePath]:
    """All obtuse paths, one per undirected path (``order[0] < order[3]``)."""
    ang = {e: dihedral_angle(t, e) for e in ("ab", "ac", "ad", "bc", "bd", "cd")}
    out = []
    for order in itertools.permutations(LABELS):
        if order[0] > order[3]:
            continue
        es = ["".join(sorted(order[k:k + 2])) for k in range(3)]
        a = tuple(ang[e] for e in es)
        if all(x > 90.0 + tol for x in a):
            out.append(ObtusePath("".join(order), a))
    return out


# --------------------------------------------------------------------------
# vectorised classification for Monte Carlo work

#: batch codes
STABLE, AMBIGUOUS, MARGINAL = -1, -2, -3


def classify_many(points: np.ndarray, coms: np.ndarray, rel_tol: float = MARGINAL_REL) -> np.ndarray:
    """Successor codes for ``n`` (tetrahedron, COM) pairs, shape ``(n, 4)``.

    ``points`` is ``(n, 4, 3)`` (or ``(4, 3)``, broadcast), ``coms`` is
    ``(n, 3)``.  Entries are a face index 0..3, or ``STABLE``,
    ``AMBIGUOUS``, ``MARGINAL``.  Works from the vertices directly rather
    than through the polytope code behind :func:`falling_pattern`.
    """
    X = np.atleast_2d(np.asarray(coms, dtype=float))
    P = np.broadcast_to(np.asarray(points, dtype=float), (len(X), 4, 3))
    diam = np.max(np.linalg.norm(P[:, :, None, :] - P[:, None, :, :], axis=-1), axis=(1, 2))
    tol = rel_tol * diam
    out = np.empty((len(X), 4), dtype=int)
    for fi in range(4):
        others = [k for k in range(4) if k != fi]
        p0, p1, p2 = (P[:, k] for k in others)
        n = np.cross(p1 - p0, p2 - p0)
        d = np.empty((len(X), 3))
        for col, skip in enumerate(others):
            i, j = [k for k in others if k != skip]
            u = np.cross(P[:, j] - P[:, i], n)
            flip = np.einsum("ij,ij->i", P[:, skip] - P[:, i], u) > 0
            u[flip] *= -1
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            d[:, col] = np.einsum("ij,ij->i", X - P[:, i], u)
        nbeyond = (d > tol[:, None]).sum(axis=1)
        marginal = np.any(np.abs(d) <= tol[:, None], axis=1)
        res = np.full(len(X), STABLE)
        res[nbeyond >= 2] = AMBIGUOUS
        one = nbeyond == 1
        # the face across the edge opposite ``skip`` in this face is the one opposite ``skip``
        res[one] = np.array(others)[np.argmax(d[one], axis=1)]
        res[marginal] = MARGINAL
        out[:, fi] = res
    return out


def classify_batch(t: Tetrahedron, coms: np.ndarray, rel_tol: float = MARGINAL_REL) -> np.ndarray:
    """:func:`classify_many` for one tetrahedron and many COMs."""
    return classify_many(t.points, coms, rel_tol)


def chain_lengths(codes: np.ndarray) -> np.ndarray:
    """Length of the face sequence started from each face, ``-1`` if ambiguous; shape ``(n, 4)``."""
    codes = np.asarray(codes)
    n = len(codes)
    out = np.empty((n, 4), dtype=int)
    rows = np.arange(n)
    for start in range(4):
        cur = np.full(n, start)
        length = np.ones(n, dtype=int)
        alive = np.ones(n, dtype=bool)
        bad = np.zeros(n, dtype=bool)
        for _ in range(4):
            nxt = codes[rows, cur]
            moving = alive & (nxt >= 0)
            bad |= alive & (nxt < STABLE)
            alive = moving
            cur = np.where(moving, nxt, cur)
            length += moving
        out[:, start] = np.where(bad, -1, length)
    return out


def pattern_codes(p: FallingPattern) -> np.ndarray:
    return np.array([AMBIGUOUS if f in p.ambiguous else STABLE if p[f] is None else FACES.index(p[f])
                     for f in FACES])


# --------------------------------------------------------------------------
# independent energy oracle

def lowering_pivots(body: ConvexPolytope, com, face: int, angle: float = 1e-6) -> list[tuple[int, int]]:
    """Edges of ``face`` about which a small roll lowers the COM.

    Rotates the body about each edge by ``angle`` in the direction that lifts
    the rest of the face off the floor and compares COM heights.
    """
    com = as_point(com)
    pl: Plane = body.planes[face]
    f = body.facets[face]
    V = body.vertices
    down = pl.normal  # floor is the facet plane, gravity along +normal
    h0 = -pl.signed_distance(com)
    out = []
    for i, j in zip(f, f[1:] + f[:1]):
        axis = V[j] - V[i]
        axis /= np.linalg.norm(axis)
        other = next(V[k] for k in f if k not in (i, j))
        for sgn in (1.0, -1.0):
            R = _rodrigues(axis, sgn * angle)
            lifted = -(down @ (R @ (other - V[i]) + V[i]) - pl.offset)
            if lifted > 0:
                break
        c = R @ (com - V[i]) + V[i]
        h = -(down @ c - pl.offset)
        if h < h0:
            out.append((i, j))
    return out


def _rodrigues(axis: np.ndarray, theta: float) -> np.ndarray:
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(theta) * K + (1 - np.cos(theta)) * K @ K


# --------------------------------------------------------------------------
# search for homogeneous tetrahedra that tumble twice

def heppes_search(rng: np.random.Generator, max_samples: int = 10**6, batch: int = 20_000,
                  size: float = 100.0):
    """First homogeneous tetrahedron (com = centroid) with a three-face sequence.

    Vertices are Gaussian with scale ``size`` mm.  Returns
    ``(tetrahedron, start_face, samples_used)`` or ``None`` when none of
    ``max_samples`` candidates qualifies.
    """
    used = 0
    while used < max_samples:
        n = min(batch, max_samples - used)
        P = size * rng.standard_normal((n, 4, 3))
        used += n
        vol = np.abs(np.einsum("ij,ij->i", P[:, 1] - P[:, 0], np.cross(P[:, 2] - P[:, 0], P[:, 3] - P[:, 0])))
        P = P[vol > 1e-6 * size**3]
        lengths = chain_lengths(classify_many(P, P.mean(axis=1)))
        hits = np.argwhere(lengths >= 3)
        if len(hits):
            k, start = hits[0]
            t = Tetrahedron(P[k])
            if len(tumble_sequence(t, t.centroid, FACES[start])) >= 3:
                return t, FACES[start], used - n + int(k) + 1
    return None
