"""``monotet`` command line: analyze, zones, simulate, design, hull.

Exit codes: 0 success, 1 geometric degeneracy, 2 parse error, 3 infeasible design.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import design as dz
from .geometry import (
    EDGES,
    FACES,
    LABELS,
    GeometryError,
    convex_hull,
    dihedral_angles,
    mm3_to_cm3,
    solid_angle,
    volume_centroid,
)
from .patterns import PatternParseError, format_pattern, parse_pattern
from .scene import Scene, SceneError, load_mesh, load_scene, reference_scene_path
from .tipping import classify_batch, falling_pattern, pattern_codes, tip_step, tumble_sequence
from .zones import enumerate_zones, loading_zone

EXIT_OK, EXIT_GEOMETRY, EXIT_PARSE, EXIT_INFEASIBLE = 0, 1, 2, 3


# --------------------------------------------------------------------------
# rendering

def fmt(x, nd=4) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
        out = f"{x:.{nd}f}"
        return "0." + "0" * nd if out == "-0." + "0" * nd else out
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(fmt(v, nd) for v in x) + "]"
    return str(x)


def render_tree(data, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, val in data.items():
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_tree(val, indent + 1))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}:")
            for item in val:
                sub = render_tree(item, indent + 2).splitlines()
                lines.append(f"{pad}  - {sub[0].strip()}")
                lines.extend(sub[1:])
        else:
            lines.append(f"{pad}{key}: {fmt(val) if isinstance(val, (list, tuple)) else val}")
    return "\n".join(lines)


def render_table(header: list[str], rows: list[list[str]], footer: str = "") -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(header), line(["-" * w for w in widths])] + [line(r) for r in rows]
    if footer:
        out.append(footer)
    return "\n".join(out)


# --------------------------------------------------------------------------
# commands

def _tetra(scene: Scene):
    if scene.tetrahedron is None:
        raise SceneError("scene has no tetrahedron")
    return scene.tetrahedron


def cmd_analyze(scene: Scene, args) -> tuple[dict, str | None]:
    t = _tetra(scene)
    ang = dihedral_angles(t)
    com = scene.com if scene.com is not None else t.centroid
    fp = falling_pattern(t, com)
    report = enumerate_zones(t)
    paths = report.paths
    tree = {
        "volume_mm3": fmt(t.volume),
        "volume_cm3": fmt(mm3_to_cm3(t.volume)),
        "dihedral_angles_deg": {e: fmt(ang[e]) for e in EDGES},
        "solid_angles_sr": {k: fmt(solid_angle(t, k), 6) for k in LABELS},
        "obtuse_edges": [e for e in EDGES if ang[e] > 90.0 + 1e-9] or "none",
        "obtuse_paths": ["-".join(p.order) for p in paths] or "none",
        "loadable": fmt(bool(paths)),
        "monostable_zones_found": fmt(len(report.zones)),
        "com": fmt(com),
        "com_source": "scene" if scene.com is not None else "centroid",
        "falling_pattern": format_pattern(fp),
        "stable_faces": fp.stable_faces or "none",
    }
    table = render_table(["edge", "dihedral (deg)", "obtuse"],
                         [[e, fmt(ang[e]), fmt(ang[e] > 90.0 + 1e-9)] for e in EDGES])
    return tree, table


def cmd_zones(scene: Scene, args) -> tuple[dict, str | None]:
    t = _tetra(scene)
    report = enumerate_zones(t, all_maps=args.all_maps)
    rows, zones = [], []
    rng = np.random.default_rng(args.seed)
    for z in report.zones:
        entry = {"pattern": format_pattern(z.pattern), "type": z.zone_type or "-",
                 "volume_cm3": fmt(z.volume_cm3), "vertices": fmt(z.region.n_vertices)}
        if args.samples:
            pts = z.region.sample_uniform(args.samples, rng)
            codes = classify_batch(t, pts)
            valid = ~np.any(codes <= -2, axis=1)
            agree = np.all(codes[valid] == pattern_codes(z.pattern), axis=1)
            entry["samples"] = fmt(args.samples)
            entry["non_marginal"] = fmt(int(valid.sum()))
            entry["agreement"] = fmt(float(agree.mean()) if agree.size else float("nan"), 6)
        zones.append(entry)
        rows.append([entry["pattern"], (z.zone_type or "-") + ".", entry["volume_cm3"] + " cm3"])
    tree = {
        "total_volume_cm3": fmt(report.total_volume_cm3),
        "loadable": fmt(report.loadable),
        "obtuse_paths": ["-".join(p.order) for p in report.paths] or "none",
        "zones": zones or "none",
    }
    table = render_table(["Falling pattern", "Type", "Volume of loading zone"], rows,
                         f"Volume of entire tetrahedron is {fmt(report.total_volume_cm3)} cm3")
    return tree, table


def _pattern_com(t, args, scene):
    if args.pattern:
        p = parse_pattern(args.pattern)
        z = loading_zone(t, p)
        if z.empty:
            raise GeometryError(f"loading zone of {args.pattern} is empty")
        return z.centroid, f"centroid of zone {format_pattern(p)}"
    if scene.com is not None:
        return scene.com, "scene"
    return t.centroid, "centroid"


def _trace_entry(trace) -> dict:
    return {"faces": "->".join(str(f) for f in trace.faces), "heights_mm": fmt(trace.heights),
            "outcome": trace.outcome}


def cmd_simulate(scene: Scene, args) -> tuple[dict, str | None]:
    t = _tetra(scene)
    com, source = _pattern_com(t, args, scene)
    traces = {f: tumble_sequence(t, com, f) for f in FACES}
    tree = {"com": fmt(com), "com_source": source,
            "falling_pattern": format_pattern(falling_pattern(t, com)),
            "traces": {f: _trace_entry(tr) for f, tr in traces.items()}}
    rows = [[f, "->".join(tr.faces), fmt(tr.heights, 3), tr.outcome] for f, tr in traces.items()]
    return tree, render_table(["start", "sequence", "heights (mm)", "outcome"], rows)


def cmd_design(scene: Scene, args) -> tuple[dict, str | None]:
    t = _tetra(scene)
    frame = scene.frame or dz.CARBON_TUBE_FRAME
    density = args.density or (scene.core.material.density if scene.core else dz.TUNGSTEN_CARBIDE.density)
    report = enumerate_zones(t)
    if not report.loadable:
        raise dz.InfeasibleDesign("tetrahedron is not loadable")
    if args.pattern:
        zone = report.zone(parse_pattern(args.pattern))
    else:
        zone = max((z for z in report.zones if z.zone_type == "I"), key=lambda z: z.volume_cm3,
                   default=report.zones[0])
    fit = dz.fit_core(t, frame, density, zone, mode=args.frame_mode)
    mm = dz.mass_model(t, frame, fit.core, args.frame_mode)
    pattern = falling_pattern(t, mm.com)
    mf, _ = dz.frame_model(t, frame)
    light = mf / mm3_to_cm3(t.volume)
    tree = {
        "zone": {"pattern": format_pattern(zone.pattern), "type": zone.zone_type,
                 "volume_cm3": fmt(zone.volume_cm3)},
        "frame": {"linear_density_g_per_cm": fmt(frame.linear_density * 10, 6),
                  "mass_g": fmt(mf), "effective_density_g_cm3": fmt(light, 6)},
        "core": {"density_g_cm3": fmt(density, 2), "density_ratio": fmt(density / light, 1),
                 "interface_normal": fmt(fit.core.interface.normal, 6),
                 "interface_offset_mm": fmt(fit.core.interface.offset),
                 "mass_g": fmt(mm.core_mass), "corner": fit.corner},
        "composite_com": fmt(mm.com),
        "margin_mm": fmt(fit.margin),
        "functional": fmt(fit.functional),
        "verified_pattern": format_pattern(pattern),
        "stable_faces": pattern.stable_faces,
    }
    if fit.functional:
        tree["min_scale"] = fmt(dz.min_scale(t, frame, fit.core, zone, mode=args.frame_mode))
    tree["min_core_density_g_cm3"] = fmt(dz.min_core_density(t, frame, zone, mode=args.frame_mode), 2)
    rows = []
    if args.thresholds:
        th = {}
        for z in report.zones:
            reopt = dz.min_core_density(t, frame, z, mode=args.frame_mode)
            fixed = dz.fixed_interface_density(t, frame, fit.core, z)
            th[format_pattern(z.pattern)] = {"type": z.zone_type, "reoptimized_g_cm3": fmt(reopt, 2),
                                             "fixed_interface_g_cm3": fmt(fixed, 2)}
            rows.append([format_pattern(z.pattern), z.zone_type + ".", fmt(reopt, 2), fmt(fixed, 2)])
        tree["thresholds"] = th
    table = None
    if rows:
        table = render_table(["Falling pattern", "Type", "min density (g/cm3)", "with this interface"], rows)
    if not fit.functional:
        raise _Infeasible(tree, table)
    return tree, table


def cmd_hull(scene: Scene | None, args) -> tuple[dict, str | None]:
    if args.mesh:
        mesh = load_mesh(args.mesh)
        com = None
    elif scene is not None and scene.mesh is not None:
        mesh, com = scene.mesh, scene.com
    else:
        raise SceneError("hull needs --mesh or a scene with a mesh entry")
    vol, cen = mesh.volume_centroid()
    com = cen if com is None else com
    hull = convex_hull(mesh.vertices)
    hv = volume_centroid(hull)
    faces = []
    rows = []
    for fi in range(len(hull.facets)):
        trace = tumble_sequence(hull, com, fi)
        first = tip_step(hull, com, fi)
        faces.append({"facet": fmt(fi), "steps": fmt(len(trace)), "final": fmt(trace.faces[-1]),
                      "outcome": trace.outcome, "first_step": first.kind})
        rows.append([str(fi), "->".join(str(f) for f in trace.faces), trace.outcome])
    stable = [fi for fi in range(len(hull.facets)) if tip_step(hull, com, fi).is_stable]
    tree = {
        "mesh": {"vertices": fmt(len(mesh.vertices)), "triangles": fmt(len(mesh.triangles)),
                 "volume_mm3": fmt(vol)},
        "hull": {"vertices": fmt(hull.n_vertices), "facets": fmt(len(hull.facets)),
                 "volume_mm3": fmt(hv.volume), "euler": fmt(hull.euler_characteristic())},
        "com": fmt(com),
        "stable_facets": [str(i) for i in stable] or "none",
        "tumbles": faces,
    }
    return tree, render_table(["start facet", "sequence", "outcome"], rows)


class _Infeasible(Exception):
    def __init__(self, tree, table):
        super().__init__("design not functional")
        self.tree, self.table = tree, table


COMMANDS = {"analyze": cmd_analyze, "zones": cmd_zones, "simulate": cmd_simulate,
            "design": cmd_design, "hull": cmd_hull}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="monotet", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", default=None,
                        help="scene file (YAML, mm and g/cm3); defaults to the bundled reference model")
    common.add_argument("--pattern", help="falling pattern such as 'B->A->D<-C'")
    common.add_argument("--density", type=float, help="core density, g/cm3")
    common.add_argument("--samples", type=int, default=0, help="Monte Carlo samples per zone")
    common.add_argument("--seed", type=int, default=0, help="seed for every Monte Carlo path")
    common.add_argument("--format", choices=("table", "tree"), default="tree")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="dihedral angles, obtuse paths, loadability")
    z = sub.add_parser("zones", parents=[common], help="loading zones and their volumes")
    z.add_argument("--all-maps", action="store_true", help="search every monostable successor map")
    sub.add_parser("simulate", parents=[common], help="tumble traces from each face")
    d = sub.add_parser("design", parents=[common], help="fit a planar-interface core")
    d.add_argument("--frame-mode", choices=dz.FRAME_MODES, default="tubes")
    d.add_argument("--thresholds", action="store_true", help="minimal core density for every zone")
    h = sub.add_parser("hull", parents=[common], help="convex hull of a mesh and tumbling on it")
    h.add_argument("--mesh", help="OFF or OBJ triangle mesh (mm)")
    return ap


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    code = EXIT_OK
    try:
        scene = None
        if not (args.command == "hull" and args.mesh):
            scene = load_scene(Path(args.scene) if args.scene else reference_scene_path())
        try:
            tree, table = COMMANDS[args.command](scene, args)
        except _Infeasible as exc:
            tree, table, code = exc.tree, exc.table, EXIT_INFEASIBLE
    except (SceneError, PatternParseError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except dz.InfeasibleDesign as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    print(render_tree({args.command: tree}), file=out)
    if args.format == "table" and table:
        print(file=out)
        print(table, file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
