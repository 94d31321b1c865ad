"""Scene files (YAML with explicit units) and OFF/OBJ triangle meshes."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .design import CARBON_FIBRE, TUNGSTEN_CARBIDE, CoreSpec, FrameSpec, MaterialSpec
from .geometry import LABELS, GeometryError, HalfSpace, Plane, Tetrahedron, as_point

UNITS = {"length": "mm", "density": "g/cm3", "mass": "g"}


class SceneError(ValueError):
    """Malformed scene or mesh file."""


@dataclass
class Scene:
    tetrahedron: Tetrahedron | None = None
    mesh: "Mesh | None" = None
    com: np.ndarray | None = None
    frame: FrameSpec | None = None
    core: CoreSpec | None = None
    provenance: str = ""


@dataclass
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray

    def volume_centroid(self):
        """Volume and centroid of the closed, outward-oriented triangle mesh."""
        T = self.vertices[self.triangles]
        o = self.vertices.mean(axis=0)
        T = T - o
        v = np.einsum("ij,ij->i", T[:, 0], np.cross(T[:, 1], T[:, 2])) / 6.0
        vol = float(v.sum())
        if vol <= 0:
            raise GeometryError("mesh is not closed and outward oriented")
        return vol, o + (v[:, None] * T.sum(axis=1)).sum(axis=0) / (4 * vol)


def _material(d: dict, default: MaterialSpec) -> MaterialSpec:
    return MaterialSpec(str(d.get("material", default.name)), float(d.get("density", default.density)))


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise SceneError(f"cannot read scene: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SceneError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SceneError(f"{path}: expected a mapping at top level")
    return scene_from_dict(data, base=path.parent)


def scene_from_dict(data: dict, base: Path = Path(".")) -> Scene:
    units = data.get("units")
    if not isinstance(units, dict):
        raise SceneError("scene must declare its units")
    for key, want in UNITS.items():
        if key in units and units[key] != want:
            raise SceneError(f"unsupported {key} unit {units[key]!r}; expected {want!r}")
    if units.get("length") != "mm":
        raise SceneError("scene must declare length: mm")
    scene = Scene(provenance=str(data.get("provenance", "")))
    try:
        if "tetrahedron" in data:
            if "density" not in units:
                raise SceneError("scene must declare density: g/cm3")
            tv = data["tetrahedron"]
            scene.tetrahedron = Tetrahedron(np.array([tv[k] for k in LABELS], dtype=float))
        if "mesh" in data:
            scene.mesh = load_mesh(base / data["mesh"])
        if scene.tetrahedron is None and scene.mesh is None:
            raise SceneError("scene needs a tetrahedron or a mesh")
        if data.get("com") is not None:
            scene.com = as_point(data["com"])
        if "frame" in data:
            f = data["frame"]
            scene.frame = FrameSpec(float(f["outer_diameter"]), float(f["inner_diameter"]),
                                    _material(f, CARBON_FIBRE), float(f.get("joint_mass", 0.0)))
        if "core" in data:
            c = data["core"]
            mat = _material(c, TUNGSTEN_CARBIDE)
            hs = None
            if "interface" in c:
                hs = HalfSpace(Plane(c["interface"]["normal"], float(c["interface"]["offset"])))
            scene.core = CoreSpec(hs, mat)
    except (KeyError, TypeError) as exc:
        raise SceneError(f"bad scene entry: {exc!r}") from exc
    return scene


def dump_scene(path: str | Path, t: Tetrahedron, *, com=None, provenance: str = "",
               frame: FrameSpec | None = None, core: CoreSpec | None = None) -> None:
    data: dict = {"units": dict(UNITS)}
    if provenance:
        data["provenance"] = provenance
    data["tetrahedron"] = {k: [float(x) for x in t[k]] for k in LABELS}
    if com is not None:
        data["com"] = [float(x) for x in com]
    if frame is not None:
        data["frame"] = {"outer_diameter": frame.outer_diameter, "inner_diameter": frame.inner_diameter,
                         "material": frame.material.name, "density": frame.material.density,
                         "joint_mass": frame.joint_mass}
    if core is not None:
        entry = {"material": core.material.name, "density": core.material.density}
        if core.interface is not None:
            entry["interface"] = {"normal": [float(x) for x in core.interface.normal],
                                  "offset": float(core.interface.offset)}
        data["core"] = entry
    Path(path).write_text(yaml.safe_dump(data, sort_keys=False))


def reference_scene_path() -> Path:
    return Path(str(resources.files("monotet") / "data" / "monostable_model.yaml"))


def reference_scene() -> Scene:
    """The reconstructed monostable model shipped with the package."""
    return load_scene(reference_scene_path())


# --------------------------------------------------------------------------
# meshes

def load_mesh(path: str | Path) -> Mesh:
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        text = path.read_text()
    except OSError as exc:
        raise SceneError(f"cannot read mesh: {exc}") from exc
    if suffix == ".off":
        return parse_off(text)
    if suffix == ".obj":
        return parse_obj(text)
    raise SceneError(f"unsupported mesh format {suffix!r} (use .off or .obj)")


def parse_off(text: str) -> Mesh:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("OFF"):
        raise SceneError("OFF file must start with 'OFF'")
    head = lines[0][3:].split() or lines.pop(1).split()
    try:
        nv, nf = int(head[0]), int(head[1])
        body = lines[1:]
        V = np.array([[float(x) for x in body[i].split()[:3]] for i in range(nv)])
        tris = []
        for i in range(nv, nv + nf):
            idx = [int(x) for x in body[i].split()]
            k, ids = idx[0], idx[1:idx[0] + 1]
            if len(ids) != k or k < 3:
                raise SceneError(f"bad face line {body[i]!r}")
            tris.extend((ids[0], ids[j], ids[j + 1]) for j in range(1, k - 1))
    except (IndexError, ValueError) as exc:
        raise SceneError(f"malformed OFF file: {exc}") from exc
    return _mesh(V, tris)


def parse_obj(text: str) -> Mesh:
    V, tris = [], []
    for n, line in enumerate(text.splitlines(), 1):
        parts = line.split("#")[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "v":
                V.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                ids = [int(p.split("/")[0]) for p in parts[1:]]
                ids = [i - 1 if i > 0 else len(V) + i for i in ids]
                tris.extend((ids[0], ids[j], ids[j + 1]) for j in range(1, len(ids) - 1))
        except ValueError as exc:
            raise SceneError(f"line {n}: {exc}") from exc
    return _mesh(np.array(V, dtype=float), tris)


def _mesh(V, tris) -> Mesh:
    T = np.array(tris, dtype=int).reshape(-1, 3)
    if len(V) == 0 or len(T) == 0:
        raise SceneError("mesh has no vertices or faces")
    if T.min() < 0 or T.max() >= len(V):
        raise SceneError("face index out of range")
    return Mesh(np.asarray(V, dtype=float), T)


def write_off(path: str | Path, mesh: Mesh) -> None:
    out = ["OFF", f"{len(mesh.vertices)} {len(mesh.triangles)} 0"]
    out += [" ".join(f"{x:.6f}" for x in v) for v in mesh.vertices]
    out += ["3 " + " ".join(str(i) for i in f) for f in mesh.triangles]
    Path(path).write_text("\n".join(out) + "\n")


def box_mesh(lo, hi) -> Mesh:
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    V = np.array([[(lo, hi)[i][0], (lo, hi)[j][1], (lo, hi)[k][2]]
                  for i in (0, 1) for j in (0, 1) for k in (0, 1)])
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    T = [(q[0], q[1], q[2]) for q in quads] + [(q[0], q[2], q[3]) for q in quads]
    return Mesh(V, np.array(T))


def lander_mesh() -> Mesh:
    """Non-convex test body: a tall box on four splayed, separate leg boxes (mm)."""
    parts = [box_mesh([-40, -40, 60], [40, 40, 260])]
    for sx, sy in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        c = np.array([sx * 90.0, sy * 90.0])
        parts.append(box_mesh([c[0] - 6, c[1] - 6, 0], [c[0] + 6, c[1] + 6, 55]))
    V, T, off = [], [], 0
    for p in parts:
        V.append(p.vertices)
        T.append(p.triangles + off)
        off += len(p.vertices)
    return Mesh(np.vstack(V), np.vstack(T))


def mesh_com(mesh: Mesh) -> np.ndarray:
    return mesh.volume_centroid()[1]


__all__ = [
    "Mesh", "Scene", "SceneError", "box_mesh", "dump_scene", "lander_mesh", "load_mesh",
    "load_scene", "parse_obj", "parse_off", "reference_scene", "write_off",
]
